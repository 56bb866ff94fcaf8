//! Spin-j coherent states under NMR quadrupolar dynamics.
//!
//! * [`spin`]: angular momentum matrices, propagators and rotations.
//! * [`coherent`]: coherent-state construction, inversion and diagnostics.
//! * [`nmr`]: rotating-frame Hamiltonian, pulses and program simulation.
//! * [`sweep`]: polar and azimuthal rotation sweeps.
//! * [`geometric`]: numeric and closed-form geometric phases.
//! * [`dsl`]: the `.pseq` pulse-program language.

pub mod coherent;
pub mod dsl;
pub mod error;
pub mod geometric;
pub mod nmr;
pub mod spin;
pub mod sweep;

pub use coherent::{
    bloch_vector, build_coherent_state, density_matrix_elements, extract_phi, extract_theta, fidelity, husimi_q,
    CoherentAngles, DeviationMatrix, MatrixKind, ZetaPoint,
};
pub use error::{Error, Result};
pub use geometric::{numeric_geometric_phase, CyclicPath, GeometricPhaseResult, PhaseCase};
pub use nmr::{PulseEvent, SystemParams, Trajectory};
pub use spin::{
    angular_momentum_matrices, rotation_operator, unitary_exponential, BlochVector, ComplexMatrix, SpinValue,
    StateVector, C64,
};
