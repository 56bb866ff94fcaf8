//! Rotating-frame quadrupolar dynamics: Hamiltonian, pulse and free-evolution
//! propagators, the pseudo-pure state model and a small program simulator.
//!
//! All operators here are nuclear spin operators `I` (see [`crate::spin`]).

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::coherent::DeviationMatrix;
use crate::error::{Error, Result};
use crate::spin::{unitary_exponential, ComplexMatrix, SpinOperators, SpinValue, StateVector, C64};

/// Phase of an `x` pulse.
pub const PHASE_X: f64 = 0.0;
/// Phase of a `y` pulse.
pub const PHASE_Y: f64 = FRAC_PI_2;
/// Phase of a `-x` pulse.
pub const PHASE_MINUS_X: f64 = PI;
/// Phase of a `-y` pulse.
pub const PHASE_MINUS_Y: f64 = 3.0 * FRAC_PI_2;

/// Rotating-frame frequencies in rad/s and the RF phase in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega_l: f64,
    pub omega_rf: f64,
    pub omega_q: f64,
    pub omega_1: f64,
    pub phi_s: f64,
}

impl SystemParams {
    /// On resonance (`ω_RF = ω_L`) with the given couplings.
    pub fn on_resonance(omega_l: f64, omega_q: f64, omega_1: f64) -> Self {
        Self {
            omega_l,
            omega_rf: omega_l,
            omega_q,
            omega_1,
            phi_s: 0.0,
        }
    }

    /// The sodium-23 sample: 105.85 MHz Larmor, 15 kHz quadrupolar coupling and
    /// an 8 μs π pulse, on resonance.
    pub fn reference_experiment() -> Self {
        Self::on_resonance(
            2.0 * PI * 105.85e6,
            2.0 * PI * 15e3,
            Self::omega_1_from_pi_pulse(8e-6),
        )
    }

    /// `ω_1 = π / t_π`.
    pub fn omega_1_from_pi_pulse(pi_pulse_length: f64) -> f64 {
        PI / pi_pulse_length
    }

    pub fn with_omega_q(mut self, omega_q: f64) -> Self {
        self.omega_q = omega_q;
        self
    }

    pub fn with_phase(mut self, phi_s: f64) -> Self {
        self.phi_s = phi_s;
        self
    }

    /// Non-fatal warnings about the regime the parameters describe.
    pub fn advisories(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.omega_l != 0.0 && self.omega_q.abs() >= 0.01 * self.omega_l.abs() {
            out.push(format!(
                "|omega_Q| = {:.3e} is not small compared with |omega_L| = {:.3e}",
                self.omega_q.abs(),
                self.omega_l.abs()
            ));
        }
        if self.omega_1 != 0.0 && self.omega_1.abs() <= self.omega_q.abs() {
            out.push("omega_1 does not exceed omega_Q; pulses are not non-selective".into());
        }
        out
    }
}

/// High-temperature thermal model with `ε = βħω_L / Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalModel {
    pub beta_hbar_omega_l: f64,
    pub partition_z: f64,
    pub epsilon: f64,
}

impl ThermalModel {
    pub fn new(beta_hbar_omega_l: f64, partition_z: f64) -> Result<Self> {
        if !(partition_z > 0.0) || !(beta_hbar_omega_l >= 0.0) || !beta_hbar_omega_l.is_finite() {
            return Err(Error::InvalidProgram(format!(
                "thermal model needs Z > 0 and beta*hbar*omega_L >= 0 (got {partition_z}, {beta_hbar_omega_l})"
            )));
        }
        Ok(Self {
            beta_hbar_omega_l,
            partition_z,
            epsilon: beta_hbar_omega_l / partition_z,
        })
    }
}

/// `(1 - βħω_L I_z) / Z`
pub fn thermal_density(j: SpinValue, model: &ThermalModel) -> DeviationMatrix {
    let iz = SpinOperators::nuclear(j).z;
    let d = j.dimension();
    let m = (&ComplexMatrix::identity(d) - &iz.scale(model.beta_hbar_omega_l)).scale(1.0 / model.partition_z);
    DeviationMatrix::new(m, crate::coherent::MatrixKind::Density).expect("diagonal real matrix")
}

/// `(1/Z - ε)·1 + ε|ψ⟩⟨ψ|`
pub fn pseudo_pure_density(state: &StateVector, model: &ThermalModel) -> DeviationMatrix {
    let d = state.dim();
    let background = ComplexMatrix::identity(d).scale(1.0 / model.partition_z - model.epsilon);
    let m = &background + &state.projector().scale(model.epsilon);
    DeviationMatrix::new(m, crate::coherent::MatrixKind::Density).expect("Hermitian by construction")
}

/// `(ρ - (1/Z - ε)·1) / ε`, recovering `|ψ⟩⟨ψ|`.
pub fn deviation_part(rho: &DeviationMatrix, model: &ThermalModel) -> Result<DeviationMatrix> {
    if model.epsilon == 0.0 {
        return Err(Error::InconsistentState("epsilon = 0 leaves no pseudo-pure part".into()));
    }
    let d = rho.dim();
    let background = ComplexMatrix::identity(d).scale(1.0 / model.partition_z - model.epsilon);
    let m = (rho.matrix() - &background).scale(1.0 / model.epsilon);
    DeviationMatrix::new(m, crate::coherent::MatrixKind::Density)
}

/// `3I_z² - I²`
pub fn quadrupole_operator(j: SpinValue) -> ComplexMatrix {
    let jj = j.j() * (j.j() + 1.0);
    let diag: Vec<f64> = j.m_values().map(|m| 3.0 * m * m - jj).collect();
    ComplexMatrix::from_real_diagonal(&diag)
}

/// `I_x cos φ_s + I_y sin φ_s`
pub fn rf_generator(j: SpinValue, phi_s: f64) -> ComplexMatrix {
    SpinOperators::nuclear(j).along([phi_s.cos(), phi_s.sin(), 0.0])
}

/// `H = -(ω_L - ω_RF) I_z + (ω_Q/6)(3I_z² - I²) + [rf_on] ω_1 (I_x cos φ_s + I_y sin φ_s)`
pub fn hamiltonian(params: &SystemParams, j: SpinValue, rf_on: bool) -> ComplexMatrix {
    let iz = SpinOperators::nuclear(j).z;
    let mut h = &iz.scale(-(params.omega_l - params.omega_rf)) + &quadrupole_operator(j).scale(params.omega_q / 6.0);
    if rf_on {
        h = &h + &rf_generator(j, params.phi_s).scale(params.omega_1);
    }
    h
}

/// `exp[-iθ(I_x cos φ_s + I_y sin φ_s)]`
pub fn ideal_pulse_propagator(j: SpinValue, theta: f64, phi_s: f64) -> ComplexMatrix {
    unitary_exponential(&rf_generator(j, phi_s), theta).expect("RF generator is Hermitian")
}

/// Diagonal of the RF-off Hamiltonian, in basis order.
fn free_diagonal(params: &SystemParams, j: SpinValue) -> Vec<f64> {
    let jj = j.j() * (j.j() + 1.0);
    let detuning = params.omega_l - params.omega_rf;
    // nuclear I_z = -m
    j.m_values()
        .map(|m| detuning * m + params.omega_q / 6.0 * (3.0 * m * m - jj))
        .collect()
}

/// `exp[i(ω_L - ω_RF)t I_z - i(ω_Q t/6)(3I_z² - I²)]`
pub fn free_evolution_propagator(params: &SystemParams, j: SpinValue, t: f64) -> Result<ComplexMatrix> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidProgram(format!("free evolution time {t} must be non-negative")));
    }
    let diag = free_diagonal(params, j);
    let d = diag.len();
    Ok(ComplexMatrix::from_fn(d, |r, c| {
        if r == c {
            C64::from_polar(1.0, -t * diag[r])
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// `[π/2]_x → [angle]_y → [π/2]_{-x}` in chronological order, i.e.
/// `P_{-x}(π/2) · P_y(angle) · P_x(π/2)`, which equals `exp(-i·angle·I_z)`.
pub fn composite_z_rotation(j: SpinValue, angle: f64) -> ComplexMatrix {
    let first = ideal_pulse_propagator(j, FRAC_PI_2, PHASE_X);
    let middle = ideal_pulse_propagator(j, angle, PHASE_Y);
    let last = ideal_pulse_propagator(j, FRAC_PI_2, PHASE_MINUS_X);
    &(&last * &middle) * &first
}

/// `exp(-i·angle·I_z)`
pub fn direct_z_rotation(j: SpinValue, angle: f64) -> ComplexMatrix {
    // nuclear I_z = -m
    let phases: Vec<C64> = j.m_values().map(|m| C64::from_polar(1.0, angle * m)).collect();
    ComplexMatrix::from_fn(j.dimension(), |r, c| if r == c { phases[r] } else { C64::new(0.0, 0.0) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZRotRealization {
    Composite,
    Direct,
}

/// One step of a pulse program.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PulseEvent {
    /// Instantaneous rotation by the RF generator.
    IdealPulse { angle: f64, phase: f64 },
    /// Evolution under the full Hamiltonian with RF on for `angle / ω_1` seconds.
    FinitePulse { angle: f64, phase: f64 },
    /// Free evolution for `duration` seconds.
    Delay { duration: f64 },
    /// Net rotation `exp(-i·angle·I_z)`, through ideal pulses or directly.
    CompositeZRot { angle: f64, realization: ZRotRealization },
}

impl PulseEvent {
    /// Wall-clock length of the event for the given parameters.
    pub fn duration(&self, params: &SystemParams) -> f64 {
        match *self {
            PulseEvent::FinitePulse { angle, .. } => angle / params.omega_1,
            PulseEvent::Delay { duration } => duration,
            _ => 0.0,
        }
    }

    /// The propagator of this event.
    pub fn propagator(&self, params: &SystemParams, j: SpinValue) -> Result<ComplexMatrix> {
        match *self {
            PulseEvent::IdealPulse { angle, phase } => Ok(ideal_pulse_propagator(j, angle, phase)),
            PulseEvent::FinitePulse { angle, phase } => {
                if !(params.omega_1 > 0.0) {
                    return Err(Error::InvalidProgram("finite pulses need omega_1 > 0".into()));
                }
                if !(angle >= 0.0) || !angle.is_finite() {
                    return Err(Error::InvalidProgram(format!("finite pulse angle {angle} must be non-negative")));
                }
                if angle == 0.0 {
                    return Ok(ComplexMatrix::identity(j.dimension()));
                }
                let h = hamiltonian(&params.with_phase(phase), j, true);
                unitary_exponential(&h, angle / params.omega_1)
            }
            PulseEvent::Delay { duration } => free_evolution_propagator(params, j, duration),
            PulseEvent::CompositeZRot { angle, realization } => Ok(match realization {
                ZRotRealization::Composite => composite_z_rotation(j, angle),
                ZRotRealization::Direct => direct_z_rotation(j, angle),
            }),
        }
    }
}

/// Nuclear expectations `(⟨I_x⟩, ⟨I_y⟩, ⟨I_z⟩, |⟨I⟩|)`.
pub fn spin_expectations(state: &StateVector, j: SpinValue) -> [f64; 4] {
    let e = SpinOperators::nuclear(j).expectation(state);
    [e[0], e[1], e[2], (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt()]
}

/// States and expectations after each event; entry 0 is the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub expectations: Vec<[f64; 4]>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory holds at least the initial state")
    }
}

pub fn simulate_program(
    program: &[PulseEvent],
    initial: &StateVector,
    params: &SystemParams,
    j: SpinValue,
) -> Result<Trajectory> {
    if initial.dim() != j.dimension() {
        return Err(Error::DimensionMismatch {
            expected: j.dimension(),
            found: initial.dim(),
        });
    }
    let mut t = 0.0;
    let mut state = initial.clone();
    let mut traj = Trajectory {
        times: vec![t],
        states: vec![state.clone()],
        expectations: vec![spin_expectations(&state, j)],
    };
    for event in program {
        let u = event.propagator(params, j)?;
        state = u.apply(&state);
        t += event.duration(params);
        traj.times.push(t);
        traj.expectations.push(spin_expectations(&state, j));
        traj.states.push(state.clone());
    }
    Ok(traj)
}
