//! Geometric phases of cyclic state paths, numerically and in closed form.
//!
//! The numeric phase of a path `ψ_0 … ψ_N` is
//! `φ_g = φ_total - φ_dyn` with `φ_dyn = Σ arg⟨ψ_k|ψ_{k+1}⟩` and `φ_total`
//! the phase of `⟨ψ_0|ψ_N⟩`, lifted to an unwrapped value (see
//! [`CyclicPath::with_branch_hint`]).

use std::f64::consts::{PI, TAU};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coherent::{build_coherent_state, CoherentAngles};
use crate::error::{Error, Result};
use crate::nmr::{composite_z_rotation, SystemParams};
use crate::spin::{SpinValue, StateVector, C64};

/// Smallest number of steps accepted by [`numeric_geometric_phase`].
pub const MIN_STEPS: usize = 100;
/// Endpoint overlap modulus below which a path is not cyclic.
pub const CYCLIC_TOL: f64 = 1e-8;
/// Adjacent overlap modulus below which a step is too coarse.
pub const MIN_STEP_OVERLAP: f64 = 0.99;

/// Discretized state path over `φ' ∈ [0, 2π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicPath {
    states: Vec<StateVector>,
    params: Vec<f64>,
    total_phase_branch: Option<f64>,
    exact_dynamic_phase: Option<f64>,
}

impl CyclicPath {
    pub fn new(states: Vec<StateVector>, params: Vec<f64>) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::InvalidPath("a path needs at least two states".into()));
        }
        if states.len() != params.len() {
            return Err(Error::InvalidPath(format!(
                "{} states but {} parameter values",
                states.len(),
                params.len()
            )));
        }
        let d = states[0].dim();
        for (k, s) in states.iter().enumerate() {
            if s.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
            }
            if (s.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidPath(format!("state {k} has norm {}", s.norm())));
            }
        }
        Ok(Self {
            states,
            params,
            total_phase_branch: None,
            exact_dynamic_phase: None,
        })
    }

    /// Picks the `2π` branch of the total phase nearest to `hint`. Without a
    /// hint the phase of `⟨ψ_0|ψ_k⟩` is tracked continuously along the path.
    pub fn with_branch_hint(mut self, hint: f64) -> Self {
        self.total_phase_branch = Some(hint);
        self
    }

    pub fn with_exact_dynamic_phase(mut self, phase: f64) -> Self {
        self.exact_dynamic_phase = Some(phase);
        self
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn n_steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn branch_hint(&self) -> Option<f64> {
        self.total_phase_branch
    }

    pub fn exact_dynamic_phase(&self) -> Option<f64> {
        self.exact_dynamic_phase
    }

    /// Multiplies state `k` by `e^{iα(φ'_k)}`. The branch hint moves with the
    /// endpoint phase difference; the exact dynamic phase is dropped.
    pub fn regauge(&self, alpha: impl Fn(f64) -> f64) -> Self {
        let states = self
            .states
            .iter()
            .zip(&self.params)
            .map(|(s, &p)| s.with_global_phase(alpha(p)))
            .collect();
        let shift = alpha(*self.params.last().unwrap()) - alpha(self.params[0]);
        Self {
            states,
            params: self.params.clone(),
            total_phase_branch: self.total_phase_branch.map(|h| h + shift),
            exact_dynamic_phase: None,
        }
    }

    fn subsampled(&self) -> Self {
        let n = self.n_steps();
        let mut idx: Vec<usize> = (0..=n).step_by(2).collect();
        if *idx.last().unwrap() != n {
            idx.push(n);
        }
        Self {
            states: idx.iter().map(|&i| self.states[i].clone()).collect(),
            params: idx.iter().map(|&i| self.params[i]).collect(),
            total_phase_branch: self.total_phase_branch,
            exact_dynamic_phase: self.exact_dynamic_phase,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricPhaseResult {
    pub total_phase: f64,
    pub dynamic_phase: f64,
    pub geometric_phase: f64,
    pub n_steps: usize,
    /// `|φ_g(N) - φ_g(N/2)| / 3`, the Richardson estimate for a second-order scheme.
    pub estimated_error: f64,
    /// `-∫⟨ψ|G|ψ⟩dφ'` for built-in paths.
    pub exact_dynamic_phase: Option<f64>,
}

fn wrap(x: f64) -> f64 {
    x - TAU * ((x + PI) / TAU).floor()
}

fn phases(path: &CyclicPath) -> (f64, f64) {
    let s = &path.states;
    let dynamic: f64 = s.windows(2).map(|w| w[0].inner(&w[1]).arg()).sum();
    let closing = s[0].inner(s.last().unwrap());
    let total = match path.total_phase_branch {
        Some(hint) => {
            let p = closing.arg();
            p + TAU * ((hint - p) / TAU).round()
        }
        None => {
            let mut acc = 0.0;
            let mut prev = 0.0;
            for st in &s[1..] {
                let a = s[0].inner(st).arg();
                acc += wrap(a - prev);
                prev = a;
            }
            acc
        }
    };
    (total, dynamic)
}

pub fn numeric_geometric_phase(path: &CyclicPath) -> Result<GeometricPhaseResult> {
    let n = path.n_steps();
    if n < MIN_STEPS {
        return Err(Error::InvalidPath(format!("{n} steps; at least {MIN_STEPS} are required")));
    }
    let s = &path.states;
    let closing = s[0].inner(&s[n]).norm();
    if closing < 1.0 - CYCLIC_TOL {
        return Err(Error::NonCyclicPath { overlap: closing });
    }
    for (k, w) in s.windows(2).enumerate() {
        let o = w[0].inner(&w[1]).norm();
        if o < MIN_STEP_OVERLAP {
            return Err(Error::StepTooCoarse { step: k, overlap: o });
        }
    }
    let (total, dynamic) = phases(path);
    let geometric = total - dynamic;
    let (ct, cd) = phases(&path.subsampled());
    Ok(GeometricPhaseResult {
        total_phase: total,
        dynamic_phase: dynamic,
        geometric_phase: geometric,
        n_steps: n,
        estimated_error: (geometric - (ct - cd)).abs() / 3.0,
        exact_dynamic_phase: path.exact_dynamic_phase,
    })
}

/// The three evolutions with closed-form phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseCase {
    /// Free quadrupolar evolution.
    A,
    /// Single-mode condensate analogue.
    B,
    /// Two-mode condensate analogue (rotation about z).
    C,
}

impl PhaseCase {
    pub const ALL: [PhaseCase; 3] = [PhaseCase::A, PhaseCase::B, PhaseCase::C];

    /// Diagonal of the generator `G` (path `e^{-iφ'G}`), in basis order.
    pub fn generator_diagonal(&self, j: SpinValue) -> Vec<f64> {
        let jv = j.j();
        let jj = jv * (jv + 1.0);
        // nuclear I_z = -m
        j.m_values()
            .map(|m| {
                let iz = -m;
                match self {
                    PhaseCase::A => -iz + (3.0 * iz * iz - jj) / 6.0,
                    PhaseCase::B => 0.5 * (iz * iz - (2.0 * jv - 1.0) * iz - jj / 3.0),
                    PhaseCase::C => iz,
                }
            })
            .collect()
    }

    pub fn closed_form(&self, j: SpinValue, theta: f64) -> f64 {
        match self {
            PhaseCase::A => closed_form_a(j, theta),
            PhaseCase::B => closed_form_b(j, theta),
            PhaseCase::C => closed_form_c(j, theta),
        }
    }
}

impl fmt::Display for PhaseCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseCase::A => "A",
            PhaseCase::B => "B",
            PhaseCase::C => "C",
        })
    }
}

impl std::str::FromStr for PhaseCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(PhaseCase::A),
            "B" | "b" => Ok(PhaseCase::B),
            "C" | "c" => Ok(PhaseCase::C),
            other => Err(Error::InvalidPath(format!("unknown case '{other}' (expected A, B or C)"))),
        }
    }
}

/// `πI[(I - 1/2)cos²θ - 2cos θ + 5/2 - I]`
pub fn closed_form_a(j: SpinValue, theta: f64) -> f64 {
    let i = j.j();
    let c = theta.cos();
    PI * i * ((i - 0.5) * c * c - 2.0 * c + 2.5 - i)
}

/// `(πI(2I - 1)/2)(3 + cos θ)(1 - cos θ)`
pub fn closed_form_b(j: SpinValue, theta: f64) -> f64 {
    let i = j.j();
    let c = theta.cos();
    PI * i * (2.0 * i - 1.0) / 2.0 * (3.0 + c) * (1.0 - c)
}

/// `-2πI(1 - cos θ)`
pub fn closed_form_c(j: SpinValue, theta: f64) -> f64 {
    -2.0 * PI * j.j() * (1.0 - theta.cos())
}

fn check_steps(n_steps: usize) -> Result<()> {
    if n_steps < MIN_STEPS {
        return Err(Error::InvalidPath(format!("{n_steps} steps; at least {MIN_STEPS} are required")));
    }
    Ok(())
}

fn path_params(n_steps: usize) -> Vec<f64> {
    (0..=n_steps).map(|k| TAU * k as f64 / n_steps as f64).collect()
}

/// `e^{-iφ'_k G}|ζ(θ,φ)⟩` for a diagonal generator, with the branch hint
/// `-2π·g_0` (the phase picked up by the `I_z = +j` state) and the exact
/// dynamic phase `-2π⟨G⟩`.
fn diagonal_path(j: SpinValue, angles: CoherentAngles, n_steps: usize, g: &[f64]) -> Result<CyclicPath> {
    check_steps(n_steps)?;
    let psi0 = build_coherent_state(j, angles);
    let params = path_params(n_steps);
    let states = params
        .iter()
        .map(|&p| {
            let amps = psi0
                .amplitudes()
                .iter()
                .zip(g)
                .map(|(a, &gn)| a * C64::from_polar(1.0, -p * gn))
                .collect();
            StateVector::from_amplitudes(amps)
        })
        .collect();
    let mean_g: f64 = psi0.amplitudes().iter().zip(g).map(|(a, gn)| a.norm_sqr() * gn).sum();
    Ok(CyclicPath::new(states, params)?
        .with_branch_hint(-TAU * g[0])
        .with_exact_dynamic_phase(-TAU * mean_g))
}

/// `e^{-iφ'(-I_z + (3I_z² - I²)/6)}|ζ(θ,φ)⟩`, the free evolution with
/// `ω_RF = ω_L - ω_Q` and `φ' = ω_Q t`.
pub fn free_evolution_path(j: SpinValue, angles: CoherentAngles, n_steps: usize) -> Result<CyclicPath> {
    diagonal_path(j, angles, n_steps, &PhaseCase::A.generator_diagonal(j))
}

/// `e^{-i(φ'/2)(I_z² - (2I-1)I_z - (I²+I)/3)}|ζ(θ,φ)⟩`; fails with
/// `NonCyclicPath` if the endpoint does not return to the start.
pub fn single_mode_bec_path(j: SpinValue, angles: CoherentAngles, n_steps: usize) -> Result<CyclicPath> {
    let path = diagonal_path(j, angles, n_steps, &PhaseCase::B.generator_diagonal(j))?;
    let s = path.states();
    let overlap = s[0].inner(s.last().unwrap()).norm();
    if overlap < 1.0 - CYCLIC_TOL {
        return Err(Error::NonCyclicPath { overlap });
    }
    Ok(path)
}

/// Parameters of the condensate analogue mapped onto the nuclear spin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BecMapping {
    pub omega_0: f64,
    pub q: f64,
    pub g: f64,
    pub phi: f64,
}

impl BecMapping {
    /// `ω_0 = ω_RF - ω_L`, `q = ω_Q/2`, `G = ω_1`, `φ = φ_s`.
    pub fn from_nmr(params: &SystemParams) -> Self {
        Self {
            omega_0: params.omega_rf - params.omega_l,
            q: params.omega_q / 2.0,
            g: params.omega_1,
            phi: params.phi_s,
        }
    }

    /// The configuration used by the two-mode path: `q = 0`, `G = 0`.
    pub fn two_mode(omega_0: f64) -> Self {
        Self {
            omega_0,
            q: 0.0,
            g: 0.0,
            phi: 0.0,
        }
    }

    pub fn validate_two_mode(&self) -> Result<()> {
        if self.q != 0.0 || self.g != 0.0 {
            return Err(Error::InvalidMapping(format!(
                "two-mode evolution needs q = 0 and G = 0 (got q = {}, G = {})",
                self.q, self.g
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoModeRealization {
    DirectZRot,
    CompositePulses,
}

/// `e^{-iφ' I_z}|ζ(θ,φ)⟩`, either directly or through the composite pulse at each `φ'_k`.
pub fn two_mode_path(
    j: SpinValue,
    angles: CoherentAngles,
    n_steps: usize,
    realization: TwoModeRealization,
    mapping: &BecMapping,
) -> Result<CyclicPath> {
    mapping.validate_two_mode()?;
    let direct = diagonal_path(j, angles, n_steps, &PhaseCase::C.generator_diagonal(j))?;
    match realization {
        TwoModeRealization::DirectZRot => Ok(direct),
        TwoModeRealization::CompositePulses => {
            let psi0 = &direct.states()[0];
            let states: Vec<StateVector> = direct
                .params()
                .iter()
                .map(|&p| composite_z_rotation(j, p).apply(psi0))
                .collect();
            let mut path = CyclicPath::new(states, direct.params().to_vec())?;
            path.total_phase_branch = direct.total_phase_branch;
            path.exact_dynamic_phase = direct.exact_dynamic_phase;
            Ok(path)
        }
    }
}

/// Built-in path for a case (`C` uses the direct realization).
pub fn case_path(case: PhaseCase, j: SpinValue, angles: CoherentAngles, n_steps: usize) -> Result<CyclicPath> {
    match case {
        PhaseCase::A => free_evolution_path(j, angles, n_steps),
        PhaseCase::B => single_mode_bec_path(j, angles, n_steps),
        PhaseCase::C => two_mode_path(
            j,
            angles,
            n_steps,
            TwoModeRealization::DirectZRot,
            &BecMapping::two_mode(1.0),
        ),
    }
}

/// One numeric/closed-form comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseComparison {
    pub case: PhaseCase,
    pub spin: SpinValue,
    pub theta: f64,
    pub closed_form: f64,
    pub numeric: Result<GeometricPhaseResult>,
}

impl PhaseComparison {
    pub fn abs_error(&self) -> Option<f64> {
        self.numeric
            .as_ref()
            .ok()
            .map(|r| (r.geometric_phase - self.closed_form).abs())
    }
}

/// Evaluates every `(case, j, θ)` combination in parallel, ordered case-major,
/// then by `j`, then by `θ`.
pub fn compare_grid(cases: &[PhaseCase], spins: &[SpinValue], thetas: &[f64], n_steps: usize) -> Vec<PhaseComparison> {
    let jobs: Vec<(PhaseCase, SpinValue, f64)> = cases
        .iter()
        .flat_map(|&c| spins.iter().flat_map(move |&j| thetas.iter().map(move |&t| (c, j, t))))
        .collect();
    jobs.par_iter()
        .map(|&(case, spin, theta)| {
            let numeric = CoherentAngles::new(theta, 0.0)
                .and_then(|a| case_path(case, spin, a, n_steps))
                .and_then(|p| numeric_geometric_phase(&p));
            PhaseComparison {
                case,
                spin,
                theta,
                closed_form: case.closed_form(spin, theta),
                numeric,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    const N: usize = 20_000;

    fn spin(two_j: u32) -> SpinValue {
        SpinValue::new(two_j).unwrap()
    }

    fn ang(t: f64, p: f64) -> CoherentAngles {
        CoherentAngles::new(t, p).unwrap()
    }

    fn gp(path: Result<CyclicPath>) -> GeometricPhaseResult {
        numeric_geometric_phase(&path.unwrap()).unwrap()
    }

    #[test]
    fn constant_path_has_no_phase() {
        let s = build_coherent_state(spin(3), ang(1.0, 0.5));
        let path = CyclicPath::new(vec![s; 201], path_params(200)).unwrap();
        let r = numeric_geometric_phase(&path).unwrap();
        assert_eq!((r.total_phase, r.dynamic_phase, r.geometric_phase), (0.0, 0.0, 0.0));
    }

    #[test]
    fn spin_half_anchors() {
        let half = spin(1);
        let r = gp(free_evolution_path(half, ang(FRAC_PI_2, 0.0), N));
        assert!((r.geometric_phase - PI).abs() < 1e-4);
        for t in [0.3, 1.0, 2.0, 3.0] {
            let r = gp(single_mode_bec_path(half, ang(t, 0.0), N));
            assert!(r.geometric_phase.abs() < 1e-4);
            let r = gp(case_path(PhaseCase::C, half, ang(t, 0.0), N));
            assert!((r.geometric_phase + PI * (1.0 - t.cos())).abs() < 1e-4);
        }
    }

    #[test]
    fn pole_values_are_unwrapped() {
        let j = spin(3);
        let r = gp(free_evolution_path(j, ang(PI, 0.0), N));
        assert!((r.geometric_phase - 6.0 * PI).abs() < 1e-9);
        let r = gp(single_mode_bec_path(j, ang(PI, 0.0), N));
        assert!((r.geometric_phase - 6.0 * PI).abs() < 1e-9);
        let r = gp(case_path(PhaseCase::C, j, ang(PI, 0.0), N));
        assert!((r.geometric_phase + 6.0 * PI).abs() < 1e-9);
        let r = gp(free_evolution_path(j, ang(0.0, 0.0), N));
        assert!(r.geometric_phase.abs() < 1e-9);
    }

    #[test]
    fn two_mode_spin_three_halves_equator() {
        let r = gp(case_path(PhaseCase::C, spin(3), ang(FRAC_PI_2, 0.0), N));
        assert!((r.geometric_phase + 3.0 * PI).abs() < 1e-4);
    }

    #[test]
    fn closed_form_examples() {
        let half = spin(1);
        for t in [0.0, 0.4, 1.3, PI] {
            assert!((closed_form_a(half, t) - PI * (1.0 - t.cos())).abs() < 1e-12);
            assert_eq!(closed_form_b(half, t), 0.0);
            assert!((closed_form_a(half, t) + closed_form_c(half, t)).abs() < 1e-12);
        }
        assert!((closed_form_c(spin(3), PI) + 6.0 * PI).abs() < 1e-12);
        assert!((closed_form_a(spin(3), PI) - 6.0 * PI).abs() < 1e-12);
        assert!((closed_form_b(spin(3), PI) - 6.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn half_integer_free_evolution_matches_closed_form() {
        for two_j in [1, 3, 5] {
            let j = spin(two_j);
            for k in 0..=18 {
                let t = PI * k as f64 / 18.0;
                let r = gp(free_evolution_path(j, ang(t, 0.0), N));
                assert!((r.geometric_phase - closed_form_a(j, t)).abs() < 1e-4, "j={j} θ={t}");
            }
        }
    }

    #[test]
    fn integer_spin_free_evolution_is_not_cyclic() {
        let path = free_evolution_path(spin(2), ang(1.0, 0.0), 1000).unwrap();
        assert!(matches!(numeric_geometric_phase(&path), Err(Error::NonCyclicPath { .. })));
    }

    #[test]
    fn dynamic_phase_matches_exact_integral() {
        for case in PhaseCase::ALL {
            let r = gp(case_path(case, spin(5), ang(1.1, 0.0), N));
            assert!((r.dynamic_phase - r.exact_dynamic_phase.unwrap()).abs() < 1e-5);
            assert!(r.estimated_error < 1e-5);
            assert_eq!(r.geometric_phase, r.total_phase - r.dynamic_phase);
        }
    }

    #[test]
    fn phase_is_independent_of_phi() {
        for case in PhaseCase::ALL {
            let base = gp(case_path(case, spin(3), ang(0.9, 0.0), 4000)).geometric_phase;
            for p in [FRAC_PI_2, PI] {
                let other = gp(case_path(case, spin(3), ang(0.9, p), 4000)).geometric_phase;
                assert!((base - other).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn regauge_leaves_geometric_phase_unchanged() {
        let path = case_path(PhaseCase::A, spin(3), ang(2.0, 0.0), 4000).unwrap();
        let base = numeric_geometric_phase(&path).unwrap();
        let moved = numeric_geometric_phase(&path.regauge(|p| 3.0 * (p * 1.3).sin() + 0.7 * p)).unwrap();
        assert!((base.geometric_phase - moved.geometric_phase).abs() < 1e-9);
        assert!((base.dynamic_phase - moved.dynamic_phase).abs() > 1.0);
        assert!(moved.exact_dynamic_phase.is_none());
    }

    #[test]
    fn realizations_agree() {
        for two_j in 1..=5 {
            let j = spin(two_j);
            let a = ang(1.2, 0.4);
            let m = BecMapping::two_mode(1.0);
            let d = gp(two_mode_path(j, a, 2000, TwoModeRealization::DirectZRot, &m));
            let c = gp(two_mode_path(j, a, 2000, TwoModeRealization::CompositePulses, &m));
            assert!((d.geometric_phase - c.geometric_phase).abs() < 1e-6);
        }
    }

    #[test]
    fn mapping_constraints() {
        let p = SystemParams::reference_experiment();
        let m = BecMapping::from_nmr(&p);
        assert_eq!(m.q, p.omega_q / 2.0);
        assert_eq!(m.g, p.omega_1);
        assert!(matches!(m.validate_two_mode(), Err(Error::InvalidMapping(_))));
        let r = two_mode_path(spin(1), ang(1.0, 0.0), 200, TwoModeRealization::DirectZRot, &m);
        assert!(matches!(r, Err(Error::InvalidMapping(_))));
        assert!(BecMapping::two_mode(0.0).validate_two_mode().is_ok());
    }

    #[test]
    fn path_validation() {
        assert!(matches!(
            free_evolution_path(spin(1), ang(1.0, 0.0), 50),
            Err(Error::InvalidPath(_))
        ));
        let s = build_coherent_state(spin(1), ang(1.0, 0.0));
        let short = CyclicPath::new(vec![s.clone(); 11], path_params(10)).unwrap();
        assert!(matches!(numeric_geometric_phase(&short), Err(Error::InvalidPath(_))));
        assert!(CyclicPath::new(vec![s.clone(); 3], vec![0.0; 2]).is_err());
        let unnormalized = StateVector::from_amplitudes(vec![C64::new(2.0, 0.0), C64::new(0.0, 0.0)]);
        assert!(CyclicPath::new(vec![unnormalized; 2], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn coarse_steps_are_rejected() {
        let j = spin(10);
        let psi = build_coherent_state(j, ang(FRAC_PI_2, 0.0));
        let params = path_params(100);
        let states = params
            .iter()
            .map(|&p| crate::nmr::direct_z_rotation(j, 20.0 * p).apply(&psi))
            .collect();
        let path = CyclicPath::new(states, params).unwrap();
        assert!(matches!(numeric_geometric_phase(&path), Err(Error::StepTooCoarse { .. })));
    }

    #[test]
    fn error_shrinks_with_more_steps() {
        let j = spin(5);
        let t = 1.0;
        let e1 = (gp(single_mode_bec_path(j, ang(t, 0.0), 1000)).geometric_phase
            - gp(single_mode_bec_path(j, ang(t, 0.0), 40_000)).geometric_phase)
            .abs();
        let e2 = (gp(single_mode_bec_path(j, ang(t, 0.0), 2000)).geometric_phase
            - gp(single_mode_bec_path(j, ang(t, 0.0), 40_000)).geometric_phase)
            .abs();
        assert!(e2 <= e1 / 2.0 || e1 < 1e-12, "{e1} {e2}");
    }
}
