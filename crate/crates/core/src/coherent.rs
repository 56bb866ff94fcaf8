//! Spin coherent states `|ζ(θ,φ)⟩`, their density matrices, angle inversion and
//! phase-space diagnostics.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{BlochVector, ComplexMatrix, SpinOperators, SpinValue, StateVector, C64};

const POLE_TOL: f64 = 1e-12;
const ANGLE_SLACK: f64 = 1e-12;

/// Bloch-sphere angles, `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentAngles {
    theta: f64,
    phi: f64,
}

impl CoherentAngles {
    /// `θ` may overshoot `[0, π]` by 1e-12 (clamped); `φ` is reduced mod 2π.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidAngles(format!("non-finite angles ({theta}, {phi})")));
        }
        if !(-ANGLE_SLACK..=PI + ANGLE_SLACK).contains(&theta) {
            return Err(Error::InvalidAngles(format!("theta = {theta} outside [0, pi]")));
        }
        Ok(Self {
            theta: theta.clamp(0.0, PI),
            phi: normalize_angle(phi),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn at_pole(&self) -> bool {
        self.theta.sin().abs() < POLE_TOL
    }

    pub fn bloch_vector(&self) -> BlochVector {
        BlochVector::from_angles(self.theta, self.phi)
    }
}

/// Reduce an angle to `[0, 2π)`.
pub fn normalize_angle(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Stereographic coordinate `ζ = -e^{-iφ} tan(θ/2)`, with an explicit point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZetaPoint {
    Finite(C64),
    Infinity,
}

pub fn zeta_from_angles(angles: CoherentAngles) -> ZetaPoint {
    let half = angles.theta / 2.0;
    if PI - angles.theta <= POLE_TOL {
        return ZetaPoint::Infinity;
    }
    ZetaPoint::Finite(-C64::from_polar(half.tan(), -angles.phi))
}

pub fn angles_from_zeta(z: ZetaPoint) -> CoherentAngles {
    match z {
        ZetaPoint::Infinity => CoherentAngles { theta: PI, phi: 0.0 },
        ZetaPoint::Finite(z) => {
            if z.norm() == 0.0 {
                return CoherentAngles { theta: 0.0, phi: 0.0 };
            }
            let w = -z.conj();
            CoherentAngles {
                theta: 2.0 * z.norm().atan(),
                phi: normalize_angle(w.arg()),
            }
        }
    }
}

/// Whether a Hermitian matrix is a unit-trace density or an identity-subtracted deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixKind {
    Density,
    Deviation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationMatrix {
    matrix: ComplexMatrix,
    kind: MatrixKind,
}

impl DeviationMatrix {
    pub fn new(matrix: ComplexMatrix, kind: MatrixKind) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > 1e-10 * matrix.max_abs().max(1.0) {
            return Err(Error::NonHermitianInput { deviation: defect });
        }
        Ok(Self { matrix, kind })
    }

    /// `|ψ⟩⟨ψ|`
    pub fn pure(state: &StateVector) -> Self {
        Self {
            matrix: state.projector(),
            kind: MatrixKind::Density,
        }
    }

    /// `|ψ⟩⟨ψ| - 1/d`, the traceless part seen by tomography.
    pub fn traceless(state: &StateVector) -> Self {
        Self::pure(state).to_deviation()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Element by basis index (`0` is `m = -j`).
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix.get(row, col)
    }

    /// Removes the identity component, leaving a traceless matrix.
    pub fn to_deviation(&self) -> Self {
        let d = self.dim();
        let shift = self.matrix.trace().re / d as f64;
        Self {
            matrix: &self.matrix - &ComplexMatrix::identity(d).scale(shift),
            kind: MatrixKind::Deviation,
        }
    }

    /// A deviation matrix lifted back to unit trace by adding `(1 - Tr)/d`.
    pub fn to_density(&self) -> Self {
        let d = self.dim();
        let shift = (1.0 - self.matrix.trace().re) / d as f64;
        Self {
            matrix: &self.matrix + &ComplexMatrix::identity(d).scale(shift),
            kind: MatrixKind::Density,
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Amplitudes `c_m = ζ^{j+m} (1+|ζ|²)^{-j} √C(2j, j+m)`, evaluated as
/// `√C(2j,k) cos^{2j-k}(θ/2) (-e^{-iφ} sin(θ/2))^k`, which is exact at `θ = π`.
pub fn build_coherent_state(j: SpinValue, angles: CoherentAngles) -> StateVector {
    let n = j.two_j();
    let (s, c) = (angles.theta / 2.0).sin_cos();
    let step = -C64::from_polar(s, -angles.phi);
    let amps = (0..=n)
        .map(|k| step.powu(k) * (binomial(n, k).sqrt() * c.powi((n - k) as i32)))
        .collect();
    StateVector::from_amplitudes(amps)
}

/// Density matrix of `|ζ(θ,φ)⟩` written out element by element.
pub fn density_matrix_elements(j: SpinValue, angles: CoherentAngles) -> DeviationMatrix {
    let n = j.two_j();
    let d = j.dimension();
    let (s, c) = (angles.theta / 2.0).sin_cos();
    let norms: Vec<f64> = (0..=n).map(|k| binomial(n, k).sqrt()).collect();
    let matrix = ComplexMatrix::from_fn(d, |r, col| {
        // r = j+m, col = j+m', so 2j+m+m' = r+col and 2j-m-m' = 4j-r-col
        let sign = if (r + col) % 2 == 0 { 1.0 } else { -1.0 };
        let mag = c.powi((2 * n as usize - r - col) as i32) * s.powi((r + col) as i32);
        let phase = C64::from_polar(1.0, (col as f64 - r as f64) * angles.phi);
        phase * (sign * mag * norms[r] * norms[col])
    });
    DeviationMatrix {
        matrix,
        kind: MatrixKind::Density,
    }
}

fn as_density(rho: &DeviationMatrix, j: SpinValue) -> Result<DeviationMatrix> {
    if rho.dim() != j.dimension() {
        return Err(Error::DimensionMismatch {
            expected: j.dimension(),
            found: rho.dim(),
        });
    }
    Ok(match rho.kind {
        MatrixKind::Density => rho.clone(),
        MatrixKind::Deviation => rho.to_density(),
    })
}

/// `θ = 2·atan2(ρ_{j,j}^{1/4j}, ρ_{-j,-j}^{1/4j})`.
pub fn extract_theta(rho: &DeviationMatrix, j: SpinValue) -> Result<f64> {
    let rho = as_density(rho, j)?;
    let last = j.dimension() - 1;
    let lower = rho.get(0, 0);
    let upper = rho.get(last, last);
    for (label, z) in [("rho_{-j,-j}", lower), ("rho_{j,j}", upper)] {
        if z.re < -1e-8 || z.im.abs() > 1e-8 {
            return Err(Error::InconsistentState(format!(
                "{label} = {z} is not a non-negative real"
            )));
        }
    }
    let root = 1.0 / (2.0 * f64::from(j.two_j()));
    let cos_half = lower.re.max(0.0).powf(root);
    let sin_half = upper.re.max(0.0).powf(root);
    let unit = cos_half * cos_half + sin_half * sin_half;
    if (unit - 1.0).abs() > 1e-6 {
        return Err(Error::InconsistentState(format!(
            "corner roots give cos^2 + sin^2 = {unit}"
        )));
    }
    Ok(2.0 * sin_half.atan2(cos_half))
}

/// `φ` from the central off-diagonal pair: `(m, m') = (0, 1)` for integer `j`,
/// `(-1/2, 1/2)` for half-integer `j`.
pub fn extract_phi(rho: &DeviationMatrix, j: SpinValue, theta: f64) -> Result<f64> {
    if theta.sin().abs() < 1e-9 {
        return Err(Error::DegeneratePole);
    }
    let rho = as_density(rho, j)?;
    let n = j.two_j();
    let (s, c) = (theta / 2.0).sin_cos();
    let (lo, hi, scale) = if j.is_integer_spin() {
        let k = (n / 2) as usize;
        let norm = (binomial(n, n / 2) * binomial(n, n / 2 + 1)).sqrt();
        let sign = -1.0; // (-1)^{2j+1}
        (k, k + 1, sign * c.powi(n as i32 - 1) * s.powi(n as i32 + 1) * norm)
    } else {
        let k = ((n - 1) / 2) as usize;
        let norm = binomial(n, (n - 1) / 2);
        let sign = -1.0; // (-1)^{2j}, 2j odd
        (k, k + 1, sign * c.powi(n as i32) * s.powi(n as i32) * norm)
    };
    let a = rho.get(lo, hi);
    let b = rho.get(hi, lo);
    let cos_phi = ((a + b) / (2.0 * scale)).re;
    let sin_phi = ((a - b) / (C64::new(0.0, 2.0) * scale)).re;
    let unit = cos_phi * cos_phi + sin_phi * sin_phi;
    if (unit - 1.0).abs() > 1e-6 {
        return Err(Error::InconsistentState(format!(
            "off-diagonal pair gives cos^2 + sin^2 = {unit}"
        )));
    }
    Ok(normalize_angle(sin_phi.atan2(cos_phi)))
}

/// Both angles at once; `φ` is reported as 0 at a pole.
pub fn extract_angles(rho: &DeviationMatrix, j: SpinValue) -> Result<CoherentAngles> {
    let theta = extract_theta(rho, j)?;
    let phi = match extract_phi(rho, j, theta) {
        Ok(phi) => phi,
        Err(Error::DegeneratePole) => 0.0,
        Err(e) => return Err(e),
    };
    CoherentAngles::new(theta, phi)
}

/// Raw ladder-operator expectations `(⟨J_x⟩, ⟨J_y⟩, ⟨J_z⟩)`.
pub fn ladder_expectation(state: &StateVector, j: SpinValue) -> [f64; 3] {
    SpinOperators::ladder(j).expectation(state)
}

/// `n = -⟨J⟩/j = ⟨I⟩/j`.
pub fn bloch_vector(state: &StateVector, j: SpinValue) -> BlochVector {
    let e = ladder_expectation(state, j);
    let jj = j.j();
    BlochVector::new(-e[0] / jj, -e[1] / jj, -e[2] / jj)
}

/// `Q(θ',φ') = |⟨ζ(θ',φ')|ψ⟩|²`, maximal value 1.
pub fn husimi_q(state: &StateVector, j: SpinValue, grid: &[CoherentAngles]) -> Vec<f64> {
    grid.iter()
        .map(|&a| build_coherent_state(j, a).inner(state).norm_sqr().min(1.0))
        .collect()
}

/// `θ_i = iπ/n_theta` (`i = 0..=n_theta`), `φ_k = 2πk/n_phi` (`k < n_phi`), θ-major.
pub fn husimi_grid(n_theta: usize, n_phi: usize) -> Vec<CoherentAngles> {
    let n_theta = n_theta.max(1);
    let mut grid = Vec::with_capacity((n_theta + 1) * n_phi);
    for i in 0..=n_theta {
        let theta = PI * i as f64 / n_theta as f64;
        for k in 0..n_phi {
            grid.push(CoherentAngles {
                theta,
                phi: TAU * k as f64 / n_phi as f64,
            });
        }
    }
    grid
}

/// `F = Tr(ab) / √(Tr(a²) Tr(b²))`.
pub fn fidelity(a: &DeviationMatrix, b: &DeviationMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let (ma, mb) = (a.matrix.inner(), b.matrix.inner());
    if a.matrix.frobenius_norm() <= 1e-14 || b.matrix.frobenius_norm() <= 1e-14 {
        return Err(Error::ZeroMatrix);
    }
    // Tr(AB) for Hermitian A, B is Σ A_ij conj(B_ij)
    let tr = |x: &nalgebra::DMatrix<C64>, y: &nalgebra::DMatrix<C64>| -> f64 {
        x.iter().zip(y.iter()).map(|(p, q)| (p * q.conj()).re).sum()
    };
    let f = tr(ma, mb) / (tr(ma, ma) * tr(mb, mb)).sqrt();
    Ok(f.clamp(-1.0, 1.0))
}
