//! Operator norms on `l^p_n(S^p_m)` by nonlinear power iteration.
//!
//! The iteration is `x <- J_{p*}(T^† J_p(T x))` where `J_p` is the duality
//! map of the mixed norm. Each step can only increase `||T x||`, so the value
//! sequence of a run is nondecreasing and every reported value is certified
//! by its witness.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    phase, power_sum_norm, schatten_norm, singular_values, singular_values_only, ComplexMatrix,
    PExponent, C64, ZERO,
};

// ── Block vectors ──────────────────────────────────────────────────────

/// An element of `l^p_n(S^p_m)`: `n` square blocks of size `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlockVectorJson", into = "BlockVectorJson")]
pub struct BlockVector {
    m: usize,
    blocks: Vec<DMatrix<C64>>,
}

#[derive(Serialize, Deserialize)]
struct BlockVectorJson {
    block_dim: usize,
    blocks: Vec<ComplexMatrix>,
}

impl TryFrom<BlockVectorJson> for BlockVector {
    type Error = Error;
    fn try_from(raw: BlockVectorJson) -> Result<Self> {
        let v = BlockVector::new(raw.blocks)?;
        if !v.blocks.is_empty() && v.m != raw.block_dim {
            return Err(Error::DimensionMismatch {
                expected: raw.block_dim,
                found: v.m,
            });
        }
        Ok(v)
    }
}

impl From<BlockVector> for BlockVectorJson {
    fn from(v: BlockVector) -> Self {
        BlockVectorJson {
            block_dim: v.m,
            blocks: v.blocks.into_iter().map(ComplexMatrix::from_dmatrix).collect(),
        }
    }
}

impl BlockVector {
    /// Blocks must be square and share one size.
    pub fn new(blocks: Vec<ComplexMatrix>) -> Result<Self> {
        let m = blocks.first().map_or(1, ComplexMatrix::rows);
        for b in &blocks {
            if b.rows() != m || b.cols() != m {
                return Err(Error::InvalidInput(format!(
                    "block of shape {}x{} in a vector of {m}x{m} blocks",
                    b.rows(),
                    b.cols()
                )));
            }
        }
        Ok(BlockVector {
            m,
            blocks: blocks.into_iter().map(ComplexMatrix::into_dmatrix).collect(),
        })
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        BlockVector {
            m,
            blocks: vec![DMatrix::zeros(m, m); n],
        }
    }

    pub fn from_scalars(v: &[C64]) -> Self {
        BlockVector {
            m: 1,
            blocks: v.iter().map(|&z| DMatrix::from_element(1, 1, z)).collect(),
        }
    }

    pub(crate) fn from_dmatrices(m: usize, blocks: Vec<DMatrix<C64>>) -> Self {
        debug_assert!(blocks.iter().all(|b| b.shape() == (m, m)));
        BlockVector { m, blocks }
    }

    /// Gaussian real and imaginary parts in every entry.
    pub fn random_gaussian(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Self {
        let blocks = (0..n)
            .map(|_| {
                DMatrix::from_fn(m, m, |_, _| {
                    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
                })
            })
            .collect();
        BlockVector { m, blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_dim(&self) -> usize {
        self.m
    }

    pub fn block(&self, i: usize) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix(self.blocks[i].clone())
    }

    pub fn blocks(&self) -> Vec<ComplexMatrix> {
        self.blocks.iter().cloned().map(ComplexMatrix::from_dmatrix).collect()
    }

    pub(crate) fn raw_blocks(&self) -> &[DMatrix<C64>] {
        &self.blocks
    }

    pub(crate) fn raw_blocks_mut(&mut self) -> &mut [DMatrix<C64>] {
        &mut self.blocks
    }

    /// The entries when `m = 1`.
    pub fn scalars(&self) -> Option<Vec<C64>> {
        (self.m == 1).then(|| self.blocks.iter().map(|b| b[(0, 0)]).collect())
    }

    pub fn scale(&self, c: C64) -> Self {
        BlockVector {
            m: self.m,
            blocks: self.blocks.iter().map(|b| b * c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|z| *z == ZERO))
    }

    /// Largest entrywise difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }
}

/// `(sum_i ||X_i||_{S^p}^p)^(1/p)`, or `max_i ||X_i||_inf` for `p = inf`.
pub fn mixed_norm(x: &BlockVector, p: PExponent) -> f64 {
    if x.m == 1 {
        return power_sum_norm(x.blocks.iter().map(|b| b[(0, 0)].norm()), p);
    }
    let norms = x.blocks.iter().map(|b| {
        schatten_norm(&ComplexMatrix::from_dmatrix(b.clone()), p)
            .expect("block vectors hold finite entries")
    });
    power_sum_norm(norms, p)
}

/// Norm and duality map of `x` in the mixed norm, from one SVD per block.
/// Returns `(||x||, J_p(x))`; `J_p(0)` is reported as `None`.
fn norm_and_duality(x: &BlockVector, p: f64) -> (f64, Option<BlockVector>) {
    if x.m == 1 {
        let norm = power_sum_norm(x.blocks.iter().map(|b| b[(0, 0)].norm()), PExponent::Finite(p));
        if norm == 0.0 {
            return (0.0, None);
        }
        let blocks = x
            .blocks
            .iter()
            .map(|b| {
                let z = b[(0, 0)];
                DMatrix::from_element(1, 1, phase(z) * (z.norm() / norm).powf(p - 1.0))
            })
            .collect();
        return (norm, Some(BlockVector { m: 1, blocks }));
    }
    let spectra: Vec<_> = x
        .blocks
        .iter()
        .map(|b| {
            singular_values(&ComplexMatrix::from_dmatrix(b.clone()))
                .expect("block vectors hold finite entries")
        })
        .collect();
    let norm = power_sum_norm(
        spectra.iter().flat_map(|s| s.values.iter().copied()),
        PExponent::Finite(p),
    );
    if norm == 0.0 {
        return (0.0, None);
    }
    let blocks = spectra
        .iter()
        .map(|s| s.reconstruct_with(|v| (v / norm).powf(p - 1.0)).into_dmatrix())
        .collect();
    (norm, Some(BlockVector { m: x.m, blocks }))
}

/// Duality map of a block vector: blockwise `U Σ^(p-1) V*` with the global
/// normalization `||x||^(p-1)`.
pub fn duality_map_block(x: &BlockVector, p: PExponent) -> Result<BlockVector> {
    match p {
        PExponent::Finite(q) if q > 1.0 => {
            norm_and_duality(x, q).1.ok_or(Error::UndefinedDirection)
        }
        _ => Err(Error::ExponentRouting {
            p: p.value(),
            routine: "duality_map_block",
        }),
    }
}

// ── Operators ──────────────────────────────────────────────────────────

/// A linear map between block vectors with fixed block size. The adjoint is
/// taken for the real pairing `Re sum_i Tr(A_i* B_i)`.
pub trait BlockMap: Sync {
    fn input_blocks(&self) -> usize;
    fn output_blocks(&self) -> usize;
    fn block_dim(&self) -> usize;
    fn apply(&self, x: &BlockVector) -> BlockVector;
    fn apply_adjoint(&self, y: &BlockVector) -> BlockVector;
    /// Nonzero entries `(i, j, t_ij)` when the map is a plain matrix on
    /// block size 1.
    fn scalar_entries(&self) -> Option<&[(usize, usize, C64)]> {
        None
    }
    /// `c` when the map is `c · Id`.
    fn scalar_multiple_of_identity(&self) -> Option<C64> {
        None
    }
}

/// `(T x)_i = sum_j t_ij X_j` with scalar coefficients `t_ij`.
#[derive(Clone, Debug)]
pub struct BlockOperator {
    coeffs: ComplexMatrix,
    m: usize,
    nonzeros: Vec<(usize, usize, C64)>,
}

impl BlockOperator {
    pub fn new(coeffs: ComplexMatrix, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("block size must be positive".into()));
        }
        if !coeffs.is_finite() {
            return Err(Error::InvalidInput("operator has non-finite coefficients".into()));
        }
        let mut nonzeros = Vec::new();
        for i in 0..coeffs.rows() {
            for j in 0..coeffs.cols() {
                let t = coeffs[(i, j)];
                if t != ZERO {
                    nonzeros.push((i, j, t));
                }
            }
        }
        Ok(BlockOperator { coeffs, m, nonzeros })
    }

    /// Plain matrix acting on `l^p_n` (block size 1).
    pub fn scalar(coeffs: ComplexMatrix) -> Result<Self> {
        Self::new(coeffs, 1)
    }

    pub fn identity(n: usize, m: usize) -> Self {
        Self::new(ComplexMatrix::identity(n), m).expect("identity is finite")
    }

    pub fn coeffs(&self) -> &ComplexMatrix {
        &self.coeffs
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::new(self.coeffs.scale(c), self.m).expect("scaling keeps entries finite")
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.coeffs.adjoint(), self.m).expect("adjoint keeps entries finite")
    }

    pub fn with_block_dim(&self, m: usize) -> Result<Self> {
        Self::new(self.coeffs.clone(), m)
    }

    fn check_input(&self, x: &BlockVector, n: usize) {
        assert_eq!(x.len(), n, "block count mismatch");
        assert_eq!(x.m, self.m, "block size mismatch");
    }
}

impl BlockMap for BlockOperator {
    fn input_blocks(&self) -> usize {
        self.coeffs.cols()
    }

    fn output_blocks(&self) -> usize {
        self.coeffs.rows()
    }

    fn block_dim(&self) -> usize {
        self.m
    }

    fn apply(&self, x: &BlockVector) -> BlockVector {
        self.check_input(x, self.input_blocks());
        let mut out = BlockVector::zeros(self.output_blocks(), self.m);
        for &(i, j, t) in &self.nonzeros {
            axpy(&mut out.blocks[i], t, &x.blocks[j]);
        }
        out
    }

    fn apply_adjoint(&self, y: &BlockVector) -> BlockVector {
        self.check_input(y, self.output_blocks());
        let mut out = BlockVector::zeros(self.input_blocks(), self.m);
        for &(i, j, t) in &self.nonzeros {
            axpy(&mut out.blocks[j], t.conj(), &y.blocks[i]);
        }
        out
    }

    fn scalar_entries(&self) -> Option<&[(usize, usize, C64)]> {
        (self.m == 1).then_some(self.nonzeros.as_slice())
    }

    fn scalar_multiple_of_identity(&self) -> Option<C64> {
        let n = self.coeffs.rows();
        if n == 0 || !self.coeffs.is_square() {
            return None;
        }
        let c = self.coeffs[(0, 0)];
        let diagonal = self.nonzeros.iter().all(|&(i, j, t)| i == j && t == c);
        (diagonal && self.nonzeros.len() == n).then_some(c)
    }
}

const ONE_C: C64 = C64::new(1.0, 0.0);

/// `y += a x`.
#[inline]
pub(crate) fn axpy(y: &mut DMatrix<C64>, a: C64, x: &DMatrix<C64>) {
    for (u, v) in y.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *u += a * v;
    }
}

// ── Estimation ─────────────────────────────────────────────────────────

fn default_restarts() -> usize {
    32
}
fn default_max_iters() -> usize {
    500
}
fn default_tol() -> f64 {
    1e-10
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            restarts: default_restarts(),
            max_iters: default_max_iters(),
            tol: default_tol(),
            seed: 0,
        }
    }
}

/// Best run of a multi-start estimate. `value = mixed_norm(T witness)` and
/// `mixed_norm(witness) = 1`, so `value` is a lower bound for `||T||`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PNormEstimate {
    pub p: PExponent,
    pub value: f64,
    pub converged: bool,
    #[serde(rename = "restarts")]
    pub restarts_used: usize,
    pub iterations: usize,
    pub witness: BlockVector,
    pub seed: u64,
    /// Set when every start was annihilated by the operator.
    #[serde(default)]
    pub zero: bool,
}

/// One power-iteration run. `trace` holds `||T x_k||` for every iterate.
#[derive(Clone, Debug)]
pub struct PowerRun {
    pub value: f64,
    pub witness: BlockVector,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<f64>,
}

fn finite_interior(p: PExponent, routine: &'static str) -> Result<f64> {
    match p {
        PExponent::Finite(q) if q > 1.0 => Ok(q),
        _ => Err(Error::ExponentRouting {
            p: p.value(),
            routine,
        }),
    }
}

fn check_map<T: BlockMap + ?Sized>(t: &T, x: &BlockVector) -> Result<()> {
    if x.len() != t.input_blocks() {
        return Err(Error::DimensionMismatch {
            expected: t.input_blocks(),
            found: x.len(),
        });
    }
    if x.m != t.block_dim() {
        return Err(Error::DimensionMismatch {
            expected: t.block_dim(),
            found: x.m,
        });
    }
    Ok(())
}

/// A single run of the duality-map power iteration from `start`.
pub fn power_iteration<T: BlockMap + ?Sized>(
    t: &T,
    p: PExponent,
    start: &BlockVector,
    max_iters: usize,
    tol: f64,
) -> Result<PowerRun> {
    let q = finite_interior(p, "power_iteration")?;
    let q_star = q / (q - 1.0);
    check_map(t, start)?;
    let n0 = mixed_norm(start, p);
    if n0 == 0.0 {
        return Err(Error::UndefinedDirection);
    }
    if let Some(entries) = t.scalar_entries() {
        let x: Vec<C64> = start.raw_blocks().iter().map(|b| b[(0, 0)] / n0).collect();
        let sizes = (t.output_blocks(), t.input_blocks());
        return Ok(scalar_power_iteration(entries, sizes, q, x, max_iters, tol));
    }
    let mut x = start.scale(C64::new(1.0 / n0, 0.0));
    let (mut value, mut jy) = norm_and_duality(&t.apply(&x), q);
    let mut trace = vec![value];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        let Some(dual) = jy.take() else {
            // T x = 0: the run is stuck at zero.
            converged = true;
            break;
        };
        let z = t.apply_adjoint(&dual);
        let (_, x_next) = norm_and_duality(&z, q_star);
        let Some(x_next) = x_next else {
            converged = true;
            break;
        };
        let (v_next, jy_next) = norm_and_duality(&t.apply(&x_next), q);
        iterations += 1;
        trace.push(v_next);
        let step = v_next - value;
        if v_next >= value {
            value = v_next;
            x = x_next;
            jy = jy_next;
        } else {
            // Only rounding can lower the value; keep the better iterate.
            converged = true;
            break;
        }
        if step.abs() < tol {
            converged = true;
            break;
        }
    }
    Ok(PowerRun {
        value,
        witness: x,
        iterations,
        converged,
        trace,
    })
}

fn scalar_norm_and_duality(x: &[C64], p: f64) -> (f64, Option<Vec<C64>>) {
    let norm = power_sum_norm(x.iter().map(|z| z.norm()), PExponent::Finite(p));
    if norm == 0.0 {
        return (0.0, None);
    }
    (norm, Some(x.iter().map(|&z| phase(z) * (z.norm() / norm).powf(p - 1.0)).collect()))
}

/// The same iteration as the block version, on plain vectors.
fn scalar_power_iteration(
    entries: &[(usize, usize, C64)],
    (rows, cols): (usize, usize),
    q: f64,
    mut x: Vec<C64>,
    max_iters: usize,
    tol: f64,
) -> PowerRun {
    let q_star = q / (q - 1.0);
    let apply = |x: &[C64]| {
        let mut y = vec![ZERO; rows];
        for &(i, j, t) in entries {
            y[i] += t * x[j];
        }
        y
    };
    let apply_adjoint = |y: &[C64]| {
        let mut x = vec![ZERO; cols];
        for &(i, j, t) in entries {
            x[j] += t.conj() * y[i];
        }
        x
    };
    let (mut value, mut jy) = scalar_norm_and_duality(&apply(&x), q);
    let mut trace = vec![value];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        let Some(dual) = jy.take() else {
            converged = true;
            break;
        };
        let Some(x_next) = scalar_norm_and_duality(&apply_adjoint(&dual), q_star).1 else {
            converged = true;
            break;
        };
        let (v_next, jy_next) = scalar_norm_and_duality(&apply(&x_next), q);
        iterations += 1;
        trace.push(v_next);
        let step = v_next - value;
        if v_next >= value {
            value = v_next;
            x = x_next;
            jy = jy_next;
        } else {
            converged = true;
            break;
        }
        if step.abs() < tol {
            converged = true;
            break;
        }
    }
    PowerRun {
        value,
        witness: BlockVector::from_scalars(&x),
        iterations,
        converged,
        trace,
    }
}

/// Multi-start estimate of `||T||` on `l^p(S^p_m)`, `1 < p < inf`.
pub fn estimate_pnorm<T: BlockMap + ?Sized>(
    t: &T,
    p: PExponent,
    cfg: &EstimateConfig,
) -> Result<PNormEstimate> {
    estimate_pnorm_with_starts(t, p, cfg, &[])
}

/// As [`estimate_pnorm`], with extra deterministic starts tried before the
/// random ones. Random restart `i` draws from seed `cfg.seed + i`.
pub fn estimate_pnorm_with_starts<T: BlockMap + ?Sized>(
    t: &T,
    p: PExponent,
    cfg: &EstimateConfig,
    warm: &[BlockVector],
) -> Result<PNormEstimate> {
    finite_interior(p, "estimate_pnorm")?;
    for w in warm {
        check_map(t, w)?;
    }
    let n = t.input_blocks();
    let m = t.block_dim();
    if n == 0 {
        return Err(Error::InvalidInput("operator acts on an empty space".into()));
    }
    if let Some(c) = t.scalar_multiple_of_identity() {
        // ||c Id|| = |c| in every mixed norm; any unit vector attains it.
        let mut witness = BlockVector::zeros(n, m);
        witness.blocks[0][(0, 0)] = ONE_C;
        return Ok(PNormEstimate {
            p,
            value: c.norm(),
            converged: true,
            restarts_used: 0,
            iterations: 0,
            zero: false,
            witness,
            seed: cfg.seed,
        });
    }
    let warm: Vec<&BlockVector> = warm.iter().filter(|w| mixed_norm(w, p) > 0.0).collect();
    let total = warm.len() + cfg.restarts.max(1);
    let runs: Vec<Result<PowerRun>> = (0..total)
        .into_par_iter()
        .map(|i| {
            let start = if i < warm.len() {
                warm[i].clone()
            } else {
                let seed = cfg.seed.wrapping_add((i - warm.len()) as u64);
                BlockVector::random_gaussian(n, m, &mut ChaCha8Rng::seed_from_u64(seed))
            };
            power_iteration(t, p, &start, cfg.max_iters, cfg.tol)
        })
        .collect();

    let mut best: Option<PowerRun> = None;
    for run in runs {
        let run = run?;
        best = Some(match best {
            None => run,
            Some(b) => {
                let tie = (run.value - b.value).abs() <= 1e-12 * b.value.max(1.0);
                if (tie && run.iterations < b.iterations) || (!tie && run.value > b.value) {
                    run
                } else {
                    b
                }
            }
        });
    }
    let best = best.expect("at least one run");
    Ok(PNormEstimate {
        p,
        zero: best.value == 0.0,
        value: best.value,
        converged: best.converged,
        restarts_used: total,
        iterations: best.iterations,
        witness: best.witness,
        seed: cfg.seed,
    })
}

/// Closed forms for a scalar matrix: max column sum, top singular value,
/// max row sum.
pub fn exact_pnorm_special(t: &ComplexMatrix, p: PExponent) -> Result<f64> {
    let (rows, cols) = t.shape();
    match p {
        PExponent::Infinity => Ok((0..rows)
            .map(|i| (0..cols).map(|j| t[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)),
        PExponent::Finite(q) if q == 1.0 => Ok((0..cols)
            .map(|j| (0..rows).map(|i| t[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)),
        PExponent::Finite(q) if q == 2.0 => {
            Ok(singular_values_only(t)?.first().copied().unwrap_or(0.0))
        }
        _ => Err(Error::ExponentRouting {
            p: p.value(),
            routine: "exact_pnorm_special",
        }),
    }
}

/// Exact norm of a scalar-coefficient block operator for `p` in {1, 2, inf},
/// with an attaining witness. The scalar closed forms carry over to every
/// block size.
pub fn exact_block_estimate(op: &BlockOperator, p: PExponent) -> Result<PNormEstimate> {
    let t = op.coeffs();
    let (rows, cols) = t.shape();
    let m = op.m;
    let mut e00 = DMatrix::zeros(m, m);
    e00[(0, 0)] = ONE_C;
    let mut witness = BlockVector::zeros(cols, m);
    match p {
        PExponent::Finite(q) if q == 1.0 => {
            let col_sum = |j: usize| (0..rows).map(|i| t[(i, j)].norm()).sum::<f64>();
            let best = (0..cols).fold(0, |b, j| if col_sum(j) > col_sum(b) { j } else { b });
            if cols > 0 {
                witness.blocks[best] = e00;
            }
        }
        PExponent::Infinity => {
            let row_sum = |i: usize| (0..cols).map(|j| t[(i, j)].norm()).sum::<f64>();
            let best = (0..rows).fold(0, |b, i| if row_sum(i) > row_sum(b) { i } else { b });
            for j in 0..cols {
                let c = if rows > 0 { phase(t[(best, j)]).conj() } else { ONE_C };
                witness.blocks[j] = DMatrix::identity(m, m) * c;
            }
            if (0..cols).all(|j| witness.blocks[j].iter().all(|z| *z == ZERO)) && cols > 0 {
                witness.blocks[0] = DMatrix::identity(m, m);
            }
        }
        PExponent::Finite(q) if q == 2.0 => {
            let spec = singular_values(t)?;
            // Top right singular vector: first row of V*, conjugated.
            for j in 0..cols {
                witness.blocks[j] = &e00 * spec.v_adjoint[(0, j)].conj();
            }
        }
        _ => {
            return Err(Error::ExponentRouting {
                p: p.value(),
                routine: "exact_block_estimate",
            })
        }
    }
    let value = mixed_norm(&op.apply(&witness), p);
    Ok(PNormEstimate {
        p,
        value,
        converged: true,
        restarts_used: 0,
        iterations: 0,
        zero: value == 0.0,
        witness,
        seed: 0,
    })
}

// ── Sampling oracle ────────────────────────────────────────────────────

const REFINED_STARTS: usize = 8;

/// Best of `samples` Gaussian starts, with its witness (unit mixed norm).
#[derive(Clone, Debug)]
pub struct SampledBound {
    pub value: f64,
    pub witness: BlockVector,
}

fn ratio<T: BlockMap + ?Sized>(t: &T, x: &BlockVector, p: PExponent) -> f64 {
    let d = mixed_norm(x, p);
    if d == 0.0 {
        0.0
    } else {
        mixed_norm(&t.apply(x), p) / d
    }
}

/// Brute-force lower bound: the largest `||T x|| / ||x||` over random
/// Gaussian `x`, optionally polishing the best few by coordinate ascent.
pub fn sample_lower_bound<T: BlockMap + ?Sized>(
    t: &T,
    p: PExponent,
    samples: usize,
    refine: bool,
    seed: u64,
) -> Result<SampledBound> {
    if samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let n = t.input_blocks();
    let m = t.block_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<(f64, BlockVector)> = (0..samples)
        .map(|_| {
            let x = BlockVector::random_gaussian(n, m, &mut rng);
            (ratio(t, &x, p), x)
        })
        .collect();
    pool.sort_by(|a, b| b.0.total_cmp(&a.0));
    if refine {
        pool.truncate(REFINED_STARTS);
        pool = pool
            .into_par_iter()
            .map(|(r, x)| coordinate_ascent(t, p, x, r))
            .collect();
        pool.sort_by(|a, b| b.0.total_cmp(&a.0));
    }
    let (best, best_x) = pool.swap_remove(0);
    let norm = mixed_norm(&best_x, p);
    let witness = if norm > 0.0 {
        best_x.scale(C64::new(1.0 / norm, 0.0))
    } else {
        best_x
    };
    Ok(SampledBound { value: best, witness })
}

/// Pattern search over real and imaginary parts of every entry, halving the
/// step whenever a full sweep brings no improvement.
fn coordinate_ascent<T: BlockMap + ?Sized>(
    t: &T,
    p: PExponent,
    mut x: BlockVector,
    mut best: f64,
) -> (f64, BlockVector) {
    const MIN_STEP: f64 = 1e-9;
    const MAX_EVALS: usize = 400_000;
    let norm = mixed_norm(&x, p);
    if norm == 0.0 {
        return (best, x);
    }
    x = x.scale(C64::new(1.0 / norm, 0.0));
    let coords: Vec<(usize, usize, bool)> = (0..x.len())
        .flat_map(|b| (0..x.m * x.m).flat_map(move |e| [(b, e, false), (b, e, true)]))
        .collect();
    let mut step = 0.25 / (coords.len() as f64).sqrt();
    let mut evals = 0;
    while step > MIN_STEP && evals < MAX_EVALS {
        let mut improved = false;
        for &(b, e, imag) in &coords {
            for sign in [1.0, -1.0] {
                let delta = if imag {
                    C64::new(0.0, sign * step)
                } else {
                    C64::new(sign * step, 0.0)
                };
                x.blocks[b].as_mut_slice()[e] += delta;
                let r = ratio(t, &x, p);
                evals += 1;
                if r > best {
                    best = r;
                    improved = true;
                    break;
                }
                x.blocks[b].as_mut_slice()[e] -= delta;
            }
        }
        if improved {
            let norm = mixed_norm(&x, p);
            x = x.scale(C64::new(1.0 / norm, 0.0));
        } else {
            step *= 0.5;
        }
    }
    (best, x)
}
