//! Dense complex matrices, singular values, Schatten and `l^p` norms,
//! duality maps and positivity tests.
//!
//! Every Schatten norm in the crate goes through [`singular_values`] (or its
//! values-only variant); there is no separate eigenvalue path for Hermitian
//! inputs.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);


/// Unit-modulus phase of `z`, with `phase(0) = 0`.
#[inline]
pub fn phase(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        ZERO
    } else {
        z / r
    }
}

// ── Exponents ──────────────────────────────────────────────────────────

/// An exponent `p` in `[1, inf]`. Infinity is its own variant so that the
/// conjugate pair `1 <-> inf` is exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PExponent {
    Finite(f64),
    Infinity,
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(PExponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(PExponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn one() -> Self {
        PExponent::Finite(1.0)
    }

    pub fn two() -> Self {
        PExponent::Finite(2.0)
    }

    /// Numeric value, `f64::INFINITY` for the infinite exponent.
    pub fn value(self) -> f64 {
        match self {
            PExponent::Finite(p) => p,
            PExponent::Infinity => f64::INFINITY,
        }
    }

    /// The conjugate exponent `p*` with `1/p + 1/p* = 1`.
    pub fn conjugate(self) -> Self {
        match self {
            PExponent::Infinity => PExponent::Finite(1.0),
            PExponent::Finite(p) if p == 1.0 => PExponent::Infinity,
            PExponent::Finite(p) if p == 2.0 => PExponent::Finite(2.0),
            PExponent::Finite(p) => PExponent::Finite(p / (p - 1.0)),
        }
    }

    pub fn is_one(self) -> bool {
        self == PExponent::Finite(1.0)
    }

    pub fn is_infinite(self) -> bool {
        self == PExponent::Infinity
    }

    /// True for `1 < p < inf`.
    pub fn is_interior(self) -> bool {
        matches!(self, PExponent::Finite(p) if p > 1.0)
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExponent::Finite(p) => write!(f, "{p}"),
            PExponent::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for PExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PExponent::Finite(p) => s.serialize_f64(*p),
            PExponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for PExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let p = match Raw::deserialize(d)? {
            Raw::Num(p) => p,
            Raw::Text(s) => parse_exponent_str(&s).map_err(serde::de::Error::custom)?,
        };
        PExponent::new(p).map_err(serde::de::Error::custom)
    }
}

fn parse_exponent_str(s: &str) -> std::result::Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        other => other.parse::<f64>().map_err(|e| format!("bad exponent {s:?}: {e}")),
    }
}

impl std::str::FromStr for PExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let p = parse_exponent_str(s).map_err(Error::InvalidInput)?;
        PExponent::new(p)
    }
}

// ── Matrices ───────────────────────────────────────────────────────────

/// Dense complex matrix. Thin wrapper over `nalgebra::DMatrix<Complex64>`;
/// the JSON form is row-major `{"rows", "cols", "data": [[re, im], ...]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        ComplexMatrix(DMatrix::from_fn(rows, cols, |i, j| f(i, j)))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if rows * cols != entries.len() {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(ComplexMatrix(DMatrix::from_row_slice(rows, cols, entries)))
    }

    pub fn from_real_row_major(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        let z: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_row_major(rows, cols, &z)
    }

    /// Builds a matrix from rows of real entries. All rows must share a length.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: bad.len(),
            });
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_real_row_major(n, m, &flat)
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn real_diagonal(values: &[f64]) -> Self {
        let z: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diagonal(&z)
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Self {
        ComplexMatrix(m)
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<C64> {
        let (r, c) = self.shape();
        let mut out = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == ZERO)
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        ComplexMatrix(self.0.transpose())
    }

    pub fn scale(&self, c: C64) -> Self {
        ComplexMatrix(&self.0 * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(ComplexMatrix(self.0.component_mul(&other.0)))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        ComplexMatrix(self.0.kronecker(&other.0))
    }

    pub fn trace(&self) -> C64 {
        let n = self.rows().min(self.cols());
        (0..n).map(|i| self.0[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.cols(),
                found: v.len(),
            });
        }
        let mut out = vec![ZERO; self.rows()];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..self.cols()).map(|j| self.0[(i, j)] * v[j]).sum();
        }
        Ok(out)
    }

    /// Integer power by repeated squaring. Square matrices only.
    pub fn pow(&self, k: u32) -> Result<Self> {
        self.check_square()?;
        let mut result = Self::identity(self.rows());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        Ok(result)
    }

    /// Frobenius distance `||self - other||_F`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok((&self.0 - &other.0).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
    }

    /// True when every imaginary part is zero within `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.0.iter().all(|z| z.im.abs() <= tol)
    }

    /// Real parts as a row-major `DMatrix<f64>`.
    pub fn real_part(&self) -> DMatrix<f64> {
        self.0.map(|z| z.re)
    }

    pub fn from_real(m: &DMatrix<f64>) -> Self {
        ComplexMatrix(m.map(|x| C64::new(x, 0.0)))
    }

    pub(crate) fn check_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "expected a square matrix, got {}x{}",
                self.rows(),
                self.cols()
            )))
        }
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() == other.shape() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "shape mismatch: {:?} vs {:?}",
                self.shape(),
                other.shape()
            )))
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows(),
            cols: self.cols(),
            data: self.to_row_major().iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        let entries: Vec<C64> = raw.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        ComplexMatrix::from_row_major(raw.rows, raw.cols, &entries)
            .map_err(serde::de::Error::custom)
    }
}

// ── Singular values and norms ──────────────────────────────────────────

/// Thin singular value decomposition `M = U diag(values) V*` with values
/// sorted nonincreasing.
#[derive(Clone, Debug)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
    pub u: ComplexMatrix,
    pub v_adjoint: ComplexMatrix,
}

impl SingularSpectrum {
    /// `U diag(f(values)) V*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let k = self.values.len();
        let mut us = self.u.0.clone();
        for j in 0..k {
            let s = C64::new(f(self.values[j]), 0.0);
            for i in 0..us.nrows() {
                us[(i, j)] *= s;
            }
        }
        ComplexMatrix(us * &self.v_adjoint.0)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|s| s)
    }
}

fn check_finite(m: &ComplexMatrix) -> Result<()> {
    if m.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput("matrix has non-finite entries".into()))
    }
}

fn to_faer(m: &ComplexMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.rows(), m.cols(), |i, j| m.0[(i, j)])
}

/// Thin SVD of `m`.
pub fn singular_values(m: &ComplexMatrix) -> Result<SingularSpectrum> {
    check_finite(m)?;
    let svd = to_faer(m)
        .thin_svd()
        .map_err(|_| Error::Accuracy("SVD did not converge".into()))?;
    let (u, s, v) = (svd.U(), svd.S(), svd.V());
    let k = m.rows().min(m.cols());
    Ok(SingularSpectrum {
        values: (0..k).map(|i| s[i].re).collect(),
        u: ComplexMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]),
        v_adjoint: ComplexMatrix::from_fn(v.ncols(), v.nrows(), |i, j| v[(j, i)].conj()),
    })
}

/// Singular values only, nonincreasing.
pub fn singular_values_only(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_finite(m)?;
    to_faer(m)
        .singular_values()
        .map_err(|_| Error::Accuracy("SVD did not converge".into()))
}

/// `(sum |x_i|^p)^(1/p)` over nonnegative magnitudes; max for `p = inf`.
pub fn power_sum_norm(magnitudes: impl Iterator<Item = f64>, p: PExponent) -> f64 {
    match p {
        PExponent::Infinity => magnitudes.fold(0.0, f64::max),
        PExponent::Finite(q) if q == 1.0 => magnitudes.sum(),
        PExponent::Finite(q) if q == 2.0 => magnitudes.map(|x| x * x).sum::<f64>().sqrt(),
        PExponent::Finite(q) => {
            // Scale by the max to keep x^q in range.
            let mags: Vec<f64> = magnitudes.collect();
            let top = mags.iter().copied().fold(0.0, f64::max);
            if top == 0.0 {
                return 0.0;
            }
            let s: f64 = mags.iter().map(|&x| (x / top).powf(q)).sum();
            top * s.powf(1.0 / q)
        }
    }
}

pub fn schatten_norm(m: &ComplexMatrix, p: PExponent) -> Result<f64> {
    let values = singular_values_only(m)?;
    Ok(power_sum_norm(values.into_iter(), p))
}

pub fn lp_norm(v: &[C64], p: PExponent) -> f64 {
    power_sum_norm(v.iter().map(|z| z.norm()), p)
}

fn require_interior(p: PExponent, routine: &'static str) -> Result<f64> {
    match p {
        PExponent::Finite(q) if q > 1.0 => Ok(q),
        _ => Err(Error::ExponentRouting {
            p: p.value(),
            routine,
        }),
    }
}

/// Norm-attaining functional of `v` in `l^p`: `w_i = phase(v_i) |v_i|^(p-1) / ||v||_p^(p-1)`.
/// Satisfies `||w||_{p*} = 1` and `Re <w, v> = ||v||_p`.
pub fn duality_map_vector(v: &[C64], p: PExponent) -> Result<Vec<C64>> {
    let q = require_interior(p, "duality_map_vector")?;
    let norm = lp_norm(v, p);
    if norm == 0.0 {
        return Err(Error::UndefinedDirection);
    }
    Ok(v.iter()
        .map(|&z| {
            let r = z.norm() / norm;
            phase(z) * r.powf(q - 1.0)
        })
        .collect())
}

/// Schatten analogue of [`duality_map_vector`]: `U Σ^(p-1) V* / ||M||_p^(p-1)`.
pub fn duality_map_matrix(m: &ComplexMatrix, p: PExponent) -> Result<ComplexMatrix> {
    let q = require_interior(p, "duality_map_matrix")?;
    let spec = singular_values(m)?;
    let norm = power_sum_norm(spec.values.iter().copied(), p);
    if norm == 0.0 {
        return Err(Error::UndefinedDirection);
    }
    Ok(spec.reconstruct_with(|s| (s / norm).powf(q - 1.0)))
}

/// Sesquilinear trace pairing `Tr(A* B)`.
pub fn trace_pairing(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    a.check_same_shape(b)?;
    Ok(a.0.iter().zip(b.0.iter()).map(|(x, y)| x.conj() * y).sum())
}

/// Eigenvalues (ascending) of the Hermitian part of a square matrix.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    m.check_square()?;
    check_finite(m)?;
    let h = (&m.0 + m.0.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(h, 1e-15, 10_000)
        .ok_or_else(|| Error::Accuracy("Hermitian eigensolver did not converge".into()))?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Default Hermiticity / eigenvalue tolerance, relative to `||M||_F`.
pub const PSD_TOL: f64 = 1e-9;

/// Positive semidefiniteness test: `M` Hermitian within `tol * ||M||_F` and
/// smallest eigenvalue `>= -tol * ||M||_F`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    m.check_square()?;
    let scale = m.frobenius_norm();
    if scale == 0.0 {
        return Ok(true);
    }
    let skew = m.distance(&m.adjoint())?;
    if skew > tol * scale {
        return Ok(false);
    }
    let lowest = hermitian_eigenvalues(m)?.first().copied().unwrap_or(0.0);
    Ok(lowest >= -tol * scale)
}
