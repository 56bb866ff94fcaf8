//! Spin-j angular momentum algebra.
//!
//! States and operators live in the `|j,m⟩` basis ordered `m = -j, -j+1, …, +j`,
//! so the first basis vector is `|j,-j⟩`. `ħ = 1`; Hamiltonians are in rad/s.
//!
//! Two operator sets are provided. [`SpinOperators::ladder`] are the textbook
//! matrices (`J_z = diag(m)`, `[J_x, J_y] = iJ_z`). [`SpinOperators::nuclear`]
//! are their negatives, `I = -J`. The coherent-state construction
//! `ζ = -e^{-iφ} tan(θ/2)`, the rotation `e^{-iθ I·m}` and the NMR propagators
//! are only mutually consistent in the nuclear set: the ladder state `|j,-j⟩`
//! is the `I_z = +j` state `|I,I⟩`. Everything physical in this crate is written
//! in nuclear operators.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const HERMITIAN_TOL: f64 = 1e-10;

/// Spin quantum number `j`, stored doubled so half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpinValue {
    two_j: u32,
}

impl SpinValue {
    pub fn new(two_j: u32) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::InvalidSpin("two_j must be at least 1".into()));
        }
        Ok(Self { two_j })
    }

    /// Accepts `j` as a float; it must be a positive multiple of 1/2.
    pub fn from_j(j: f64) -> Result<Self> {
        let doubled = 2.0 * j;
        if !doubled.is_finite() || (doubled - doubled.round()).abs() > 1e-9 || doubled.round() < 1.0 {
            return Err(Error::InvalidSpin(format!("{j} is not a positive multiple of 1/2")));
        }
        Self::new(doubled.round() as u32)
    }

    pub fn two_j(self) -> u32 {
        self.two_j
    }

    pub fn j(self) -> f64 {
        f64::from(self.two_j) / 2.0
    }

    pub fn dimension(self) -> usize {
        self.two_j as usize + 1
    }

    pub fn is_integer_spin(self) -> bool {
        self.two_j.is_multiple_of(2)
    }

    /// Magnetic quantum numbers in basis order.
    pub fn m_values(self) -> impl Iterator<Item = f64> {
        let j = self.j();
        (0..self.dimension()).map(move |k| k as f64 - j)
    }

    /// Basis index of the ladder label `m`.
    pub fn index_of(self, m: f64) -> Option<usize> {
        let k = m + self.j();
        let r = k.round();
        if (k - r).abs() > 1e-9 || r < 0.0 || r as usize >= self.dimension() {
            None
        } else {
            Some(r as usize)
        }
    }
}

impl fmt::Display for SpinValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer_spin() {
            write!(f, "{}", self.two_j / 2)
        } else {
            write!(f, "{}/2", self.two_j)
        }
    }
}

impl std::str::FromStr for SpinValue {
    type Err = Error;

    /// Parses `"3/2"`, `"1.5"` or `"2"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSpin(format!("cannot parse '{s}'")))?;
            return match den.trim() {
                "2" => Self::new(num),
                "1" => Self::new(2 * num),
                _ => Err(Error::InvalidSpin(format!("'{s}' is not a multiple of 1/2"))),
            };
        }
        let j: f64 = s
            .parse()
            .map_err(|_| Error::InvalidSpin(format!("cannot parse '{s}'")))?;
        Self::from_j(j)
    }
}

/// Dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn from_inner(m: DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "ComplexMatrix must be square");
        Self(m)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0)));
        Self(DMatrix::from_diagonal(&d))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = self.adjoint() * self;
        prod.max_abs_diff(&Self::identity(self.dim())) <= tol
    }

    /// `[A, B] = AB - BA`
    pub fn commutator(&self, other: &Self) -> Self {
        self * other - other * self
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.dim(), v.dim(), "operator/state dimension mismatch");
        StateVector(&self.0 * &v.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

impl Mul<&ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(self.0 + rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(self.0 - rhs.0)
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-self.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// Ket in the `|j,m⟩` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(DVector<C64>);

impl StateVector {
    pub fn from_amplitudes(amps: Vec<C64>) -> Self {
        Self(DVector::from_vec(amps))
    }

    /// `k`-th basis vector (`k = 0` is `|j,-j⟩`).
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitude(&self, k: usize) -> C64 {
        self.0[k]
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn normalized(&self) -> Self {
        Self(self.0.normalize())
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim(), "state dimension mismatch");
        self.0.dotc(&other.0)
    }

    pub fn with_global_phase(&self, alpha: f64) -> Self {
        Self(self.0.map(|z| z * C64::from_polar(1.0, alpha)))
    }

    /// `|self⟩⟨self|`
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix(&self.0 * self.0.adjoint())
    }

    /// `⟨self|op|self⟩`
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        self.0.dotc(&(&op.0 * &self.0))
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn overlap_probability(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Cartesian components of a spin operator.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    pub z: ComplexMatrix,
    spin: SpinValue,
}

impl SpinOperators {
    /// Textbook matrices: `J_z = diag(m)`, `J_± ` from `√(j(j+1) - m(m±1))`.
    pub fn ladder(j: SpinValue) -> Self {
        let d = j.dimension();
        let jj = j.j();
        let m: Vec<f64> = j.m_values().collect();
        let mut raise = DMatrix::<C64>::zeros(d, d);
        for k in 0..d - 1 {
            raise[(k + 1, k)] = C64::new((jj * (jj + 1.0) - m[k] * (m[k] + 1.0)).sqrt(), 0.0);
        }
        let lower = raise.adjoint();
        let x = (&raise + &lower).map(|z| z * 0.5);
        let y = (&raise - &lower).map(|z| z * C64::new(0.0, -0.5));
        Self {
            x: ComplexMatrix(x),
            y: ComplexMatrix(y),
            z: ComplexMatrix::from_real_diagonal(&m),
            spin: j,
        }
    }

    /// Nuclear spin operators `I = -J`; `|j,-j⟩` has `I_z = +j`.
    pub fn nuclear(j: SpinValue) -> Self {
        let l = Self::ladder(j);
        Self {
            x: -l.x,
            y: -l.y,
            z: -l.z,
            spin: j,
        }
    }

    pub fn spin(&self) -> SpinValue {
        self.spin
    }

    /// `J² = j(j+1)·1` (same for both sign conventions).
    pub fn squared(&self) -> ComplexMatrix {
        &(&(&self.x * &self.x) + &(&self.y * &self.y)) + &(&self.z * &self.z)
    }

    /// Raising operator `J_x + iJ_y` for this set.
    pub fn raising(&self) -> ComplexMatrix {
        &self.x + &self.y.scale_complex(C64::new(0.0, 1.0))
    }

    /// `a_x J_x + a_y J_y + a_z J_z`
    pub fn along(&self, a: [f64; 3]) -> ComplexMatrix {
        &(&self.x.scale(a[0]) + &self.y.scale(a[1])) + &self.z.scale(a[2])
    }

    pub fn expectation(&self, state: &StateVector) -> [f64; 3] {
        [
            state.expectation(&self.x).re,
            state.expectation(&self.y).re,
            state.expectation(&self.z).re,
        ]
    }
}

/// Ladder-basis `(Jx, Jy, Jz)`.
pub fn angular_momentum_matrices(j: SpinValue) -> SpinOperators {
    SpinOperators::ladder(j)
}

/// Cached eigendecomposition of a Hermitian generator; evaluates
/// `exp(-i·scale·H)` for any number of scales.
#[derive(Debug, Clone)]
pub struct HermitianPropagator {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl HermitianPropagator {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        let defect = h.hermiticity_defect();
        if defect > HERMITIAN_TOL * h.max_abs().max(1.0) {
            return Err(Error::NonHermitianInput { deviation: defect });
        }
        let sym = (&h.0 + h.0.adjoint()).map(|z| z * 0.5);
        let eig = SymmetricEigen::new(sym);
        Ok(Self {
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn at(&self, scale: f64) -> ComplexMatrix {
        let phases = DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&l| C64::from_polar(1.0, -scale * l)),
        );
        let v = &self.eigenvectors;
        ComplexMatrix(v * DMatrix::from_diagonal(&phases) * v.adjoint())
    }
}

/// `exp(-i·scale·H)` for Hermitian `H`.
pub fn unitary_exponential(h: &ComplexMatrix, scale: f64) -> Result<ComplexMatrix> {
    Ok(HermitianPropagator::new(h)?.at(scale))
}

/// Rotation axis `m = (sin φ, -cos φ, 0)` in the equatorial plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationAxis {
    pub phi: f64,
}

impl RotationAxis {
    pub fn new(phi: f64) -> Self {
        Self { phi }
    }

    pub fn vector(&self) -> [f64; 3] {
        [self.phi.sin(), -self.phi.cos(), 0.0]
    }

    /// `I·m` in nuclear operators.
    pub fn generator(&self, ops: &SpinOperators) -> ComplexMatrix {
        ops.along(self.vector())
    }
}

/// `R_{θ,φ} = exp(-iθ I·m)`; carries `|j,-j⟩` to the coherent state `|ζ(θ,φ)⟩`.
pub fn rotation_operator(j: SpinValue, theta: f64, phi: f64) -> ComplexMatrix {
    let ops = SpinOperators::nuclear(j);
    let generator = RotationAxis::new(phi).generator(&ops);
    unitary_exponential(&generator, theta).expect("spin generators are Hermitian")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// `(sin θ cos φ, sin θ sin φ, cos θ)`
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let d = [self.x - other.x, self.y - other.y, self.z - other.z];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }
}
