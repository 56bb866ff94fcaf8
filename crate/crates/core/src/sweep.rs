//! Polar and azimuthal rotation sweeps in three simulation modes.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coherent::{build_coherent_state, fidelity, CoherentAngles, DeviationMatrix};
use crate::error::{Error, Result};
use crate::nmr::{
    simulate_program, PulseEvent, SystemParams, Trajectory, ZRotRealization, PHASE_MINUS_X, PHASE_X, PHASE_Y,
};
use crate::spin::SpinValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Polar,
    Azimuthal,
}

/// How each sweep point is realized.
///
/// * `Ideal`: every pulse is an instantaneous rotation.
/// * `Finite`: the preparation pulse runs under the full Hamiltonian; the
///   azimuthal z-rotation stays ideal.
/// * `Composite`: every pulse, including the three of the composite z-rotation,
///   runs under the full Hamiltonian, separated by optional gaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Ideal,
    Finite,
    Composite,
}

impl SweepMode {
    pub const ALL: [SweepMode; 3] = [SweepMode::Ideal, SweepMode::Finite, SweepMode::Composite];

    pub fn as_str(&self) -> &'static str {
        match self {
            SweepMode::Ideal => "ideal",
            SweepMode::Finite => "finite",
            SweepMode::Composite => "composite",
        }
    }
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepKind::Polar => "polar",
            SweepKind::Azimuthal => "azimuthal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_steps: usize,
    /// Free evolution inserted between consecutive pulses in `Composite` mode, seconds.
    pub inter_pulse_gap: f64,
}

impl SweepConfig {
    pub fn new(n_steps: usize) -> Self {
        Self {
            n_steps,
            inter_pulse_gap: 0.0,
        }
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.inter_pulse_gap = gap;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub kind: SweepKind,
    pub mode: SweepMode,
    pub index: usize,
    /// θ for polar sweeps, φ_τ for azimuthal ones.
    pub parameter: f64,
    pub trajectory: Trajectory,
    /// Traceless-deviation fidelity of the final state against the ideal one.
    pub fidelity: f64,
}

impl SweepPoint {
    /// Final `(⟨I_x⟩, ⟨I_y⟩, ⟨I_z⟩, |⟨I⟩|)`.
    pub fn expectations(&self) -> [f64; 4] {
        *self.trajectory.expectations.last().expect("non-empty trajectory")
    }
}

/// Sweep parameter values `k·span/(n-1)`.
pub fn sweep_parameters(kind: SweepKind, n_steps: usize) -> Vec<f64> {
    let span = match kind {
        SweepKind::Polar => PI,
        SweepKind::Azimuthal => 2.0 * PI,
    };
    let last = (n_steps.max(2) - 1) as f64;
    (0..n_steps).map(|k| span * k as f64 / last).collect()
}

/// Initial state of both sweeps, `|ζ(0,0)⟩`.
pub fn sweep_initial_state(j: SpinValue) -> crate::spin::StateVector {
    build_coherent_state(j, CoherentAngles::new(0.0, 0.0).expect("valid angles"))
}

fn pulse(finite: bool, angle: f64, phase: f64) -> PulseEvent {
    if finite {
        PulseEvent::FinitePulse { angle, phase }
    } else {
        PulseEvent::IdealPulse { angle, phase }
    }
}

/// Event list for one sweep point.
pub fn sweep_program(kind: SweepKind, mode: SweepMode, parameter: f64, gap: f64) -> Vec<PulseEvent> {
    let finite = mode != SweepMode::Ideal;
    match kind {
        // R(θ, π) is a y pulse of angle θ
        SweepKind::Polar => vec![pulse(finite, parameter, PHASE_Y)],
        SweepKind::Azimuthal => {
            let prepare = pulse(finite, FRAC_PI_2, PHASE_Y);
            match mode {
                SweepMode::Ideal | SweepMode::Finite => vec![
                    prepare,
                    PulseEvent::CompositeZRot {
                        angle: parameter,
                        realization: ZRotRealization::Composite,
                    },
                ],
                SweepMode::Composite => {
                    let pulses = [
                        prepare,
                        pulse(true, FRAC_PI_2, PHASE_X),
                        pulse(true, parameter, PHASE_Y),
                        pulse(true, FRAC_PI_2, PHASE_MINUS_X),
                    ];
                    let mut out = Vec::with_capacity(7);
                    for (i, p) in pulses.into_iter().enumerate() {
                        if i > 0 && gap > 0.0 {
                            out.push(PulseEvent::Delay { duration: gap });
                        }
                        out.push(p);
                    }
                    out
                }
            }
        }
    }
}

/// Runs every point of a sweep in all three modes. Output is ordered by
/// point index, then by mode (`ideal`, `finite`, `composite`).
pub fn run_sweep(kind: SweepKind, j: SpinValue, params: &SystemParams, config: &SweepConfig) -> Result<Vec<SweepPoint>> {
    if config.n_steps < 2 {
        return Err(Error::InvalidProgram(format!("sweeps need at least 2 points, got {}", config.n_steps)));
    }
    if !(config.inter_pulse_gap >= 0.0) {
        return Err(Error::InvalidProgram("inter-pulse gap must be non-negative".into()));
    }
    let initial = sweep_initial_state(j);
    let values = sweep_parameters(kind, config.n_steps);
    let per_point: Vec<Result<Vec<SweepPoint>>> = values
        .par_iter()
        .enumerate()
        .map(|(index, &parameter)| {
            let ideal_prog = sweep_program(kind, SweepMode::Ideal, parameter, 0.0);
            let ideal = simulate_program(&ideal_prog, &initial, params, j)?;
            let reference = DeviationMatrix::traceless(ideal.final_state());
            SweepMode::ALL
                .iter()
                .map(|&mode| {
                    let trajectory = if mode == SweepMode::Ideal {
                        ideal.clone()
                    } else {
                        let prog = sweep_program(kind, mode, parameter, config.inter_pulse_gap);
                        simulate_program(&prog, &initial, params, j)?
                    };
                    let fid = fidelity(&DeviationMatrix::traceless(trajectory.final_state()), &reference)?;
                    Ok(SweepPoint {
                        kind,
                        mode,
                        index,
                        parameter,
                        trajectory,
                        fidelity: fid,
                    })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(values.len() * 3);
    for point in per_point {
        out.extend(point?);
    }
    Ok(out)
}

pub fn polar_sweep(j: SpinValue, params: &SystemParams, n_steps: usize) -> Result<Vec<SweepPoint>> {
    run_sweep(SweepKind::Polar, j, params, &SweepConfig::new(n_steps))
}

pub fn azimuthal_sweep(j: SpinValue, params: &SystemParams, n_steps: usize) -> Result<Vec<SweepPoint>> {
    run_sweep(SweepKind::Azimuthal, j, params, &SweepConfig::new(n_steps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spin(two_j: u32) -> SpinValue {
        SpinValue::new(two_j).unwrap()
    }

    fn of_mode(points: &[SweepPoint], mode: SweepMode) -> Vec<&SweepPoint> {
        points.iter().filter(|p| p.mode == mode).collect()
    }

    #[test]
    fn parameter_grids() {
        let p = sweep_parameters(SweepKind::Polar, 19);
        assert_eq!(p.len(), 19);
        assert!((p[1] - PI / 18.0).abs() < 1e-15 && p[18] == PI);
        let a = sweep_parameters(SweepKind::Azimuthal, 33);
        assert!((a[1] - PI / 16.0).abs() < 1e-15 && a[32] == 2.0 * PI);
    }

    #[test]
    fn ideal_polar_sweep_follows_bloch_circle() {
        let j = spin(3);
        let pts = polar_sweep(j, &SystemParams::reference_experiment(), 19).unwrap();
        assert_eq!(pts.len(), 57);
        for p in of_mode(&pts, SweepMode::Ideal) {
            let e = p.expectations();
            // nuclear ⟨I_z⟩ = j cos θ, ⟨I_x⟩ = -j sin θ at φ = π
            assert!((e[2] - 1.5 * p.parameter.cos()).abs() < 1e-10);
            assert!((e[0] + 1.5 * p.parameter.sin()).abs() < 1e-10);
            assert!((e[3] - 1.5).abs() < 1e-10);
            assert_eq!(p.fidelity, 1.0);
        }
        let first_finite = of_mode(&pts, SweepMode::Finite)[0];
        assert!((first_finite.fidelity - 1.0).abs() < 1e-15);
    }

    #[test]
    fn finite_polar_sweep_at_reference_parameters() {
        let j = spin(3);
        let pts = polar_sweep(j, &SystemParams::reference_experiment(), 19).unwrap();
        for p in of_mode(&pts, SweepMode::Finite) {
            assert!(p.fidelity >= 0.8, "theta = {} gave {}", p.parameter, p.fidelity);
            assert!(p.expectations()[3] <= 1.5 + 1e-12);
        }
        assert!(of_mode(&pts, SweepMode::Finite).iter().any(|p| p.fidelity < 0.999));
    }

    #[test]
    fn zero_quadrupole_finite_matches_ideal() {
        for two_j in 1..=6 {
            let j = spin(two_j);
            let params = SystemParams::reference_experiment().with_omega_q(0.0);
            for kind in [SweepKind::Polar, SweepKind::Azimuthal] {
                let pts = run_sweep(kind, j, &params, &SweepConfig::new(9)).unwrap();
                for p in &pts {
                    assert!((p.fidelity - 1.0).abs() < 1e-10, "{kind} {} {}", p.mode, p.fidelity);
                }
            }
        }
    }

    #[test]
    fn ideal_azimuthal_sweep_rotates_in_equator() {
        let j = spin(3);
        let pts = azimuthal_sweep(j, &SystemParams::reference_experiment(), 33).unwrap();
        let ideal = of_mode(&pts, SweepMode::Ideal);
        let e0 = ideal[0].expectations();
        assert!((e0[0] + 1.5).abs() < 1e-12 && e0[1].abs() < 1e-12);
        for p in ideal {
            let e = p.expectations();
            // |ζ(π/2, π - φ_τ)⟩
            assert!((e[0] - 1.5 * (PI - p.parameter).cos()).abs() < 1e-10);
            assert!((e[1] - 1.5 * (PI - p.parameter).sin()).abs() < 1e-10);
            assert!(e[2].abs() < 1e-10 && (e[3] - 1.5).abs() < 1e-10);
        }
    }

    #[test]
    fn gaps_lower_composite_fidelity() {
        let j = spin(3);
        let params = SystemParams::reference_experiment();
        let tight = run_sweep(SweepKind::Azimuthal, j, &params, &SweepConfig::new(9)).unwrap();
        let gapped = run_sweep(SweepKind::Azimuthal, j, &params, &SweepConfig::new(9).with_gap(3e-6)).unwrap();
        let mean = |pts: &[SweepPoint]| {
            let c = of_mode(pts, SweepMode::Composite);
            c.iter().map(|p| p.fidelity).sum::<f64>() / c.len() as f64
        };
        assert!(mean(&gapped) < mean(&tight));
        assert_eq!(sweep_program(SweepKind::Azimuthal, SweepMode::Composite, 1.0, 3e-6).len(), 7);
    }

    #[test]
    fn sweeps_reject_bad_config() {
        let j = spin(3);
        let p = SystemParams::reference_experiment();
        assert!(polar_sweep(j, &p, 1).is_err());
        assert!(run_sweep(SweepKind::Polar, j, &p, &SweepConfig::new(3).with_gap(-1.0)).is_err());
    }
}
