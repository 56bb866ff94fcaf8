use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spin value: {0}")]
    InvalidSpin(String),

    #[error("matrix is not Hermitian (max |H - H^dagger| = {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    #[error("density matrix is not consistent with a coherent state: {0}")]
    InconsistentState(String),

    #[error("azimuthal angle is undefined at a pole of the Bloch sphere")]
    DegeneratePole,

    #[error("matrix norm underflows; fidelity is undefined")]
    ZeroMatrix,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid angles: {0}")]
    InvalidAngles(String),

    #[error("invalid pulse program: {0}")]
    InvalidProgram(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("path is not cyclic (|<psi_0|psi_N>| = {overlap:.3e})")]
    NonCyclicPath { overlap: f64 },

    #[error("step {step} too coarse (|<psi_k|psi_k+1>| = {overlap:.6})")]
    StepTooCoarse { step: usize, overlap: f64 },

    #[error("invalid BEC mapping: {0}")]
    InvalidMapping(String),
}

pub type Result<T> = std::result::Result<T, Error>;
