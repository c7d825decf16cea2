//! Truncated norms `||P(S_n)||`, `||P(S_n) ⊗ Id_{S^p_m}||` and `||P(σ_n)||`.
//!
//! Every estimate is a witness-certified lower bound for its truncation.
//! Warm starts tie the three quantities together: a scalar witness `x`
//! embeds as `x ⊗ e_00` and as the diagonal matrix `diag(x)`, and both
//! embeddings preserve the ratio `||P x|| / ||x||`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::shift::{toeplitz_of, SigmaMap};
use super::Polynomial;
use crate::error::{Error, Result};
use crate::matrix::{singular_values, PExponent, C64, ZERO};
use crate::pnorm::{
    estimate_pnorm_with_starts, exact_block_estimate, mixed_norm, BlockMap, BlockOperator,
    BlockVector, EstimateConfig, PNormEstimate,
};

pub const DEFAULT_LADDER: [usize; 5] = [8, 16, 32, 64, 128];

/// Below this size `poly_norm` starts from random vectors only; above it the
/// witness of the half-size truncation is also tried.
const CHAIN_FLOOR: usize = 8;

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidInput("truncation size must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn is_exact_route(p: PExponent) -> bool {
    matches!(p, PExponent::Infinity) || p.value() == 1.0 || p.value() == 2.0
}

fn zero_estimate(p: PExponent, n: usize, m: usize, cfg: &EstimateConfig) -> PNormEstimate {
    let mut witness = BlockVector::zeros(n, m);
    witness.raw_blocks_mut()[0][(0, 0)] = C64::new(1.0, 0.0);
    PNormEstimate {
        p,
        value: 0.0,
        converged: true,
        restarts_used: 0,
        iterations: 0,
        witness,
        seed: cfg.seed,
        zero: true,
    }
}

/// Appends zero blocks up to length `n`. Because `P(S_n)` is lower
/// triangular Toeplitz, the padded vector has at least the old ratio.
fn pad(w: &BlockVector, n: usize) -> BlockVector {
    let mut blocks = w.raw_blocks().to_vec();
    blocks.resize(n, DMatrix::zeros(w.block_dim(), w.block_dim()));
    BlockVector::from_dmatrices(w.block_dim(), blocks)
}

/// `x ⊗ e_00` for a scalar vector `x`.
fn lift_scalar(x: &BlockVector, m: usize) -> BlockVector {
    let blocks = x
        .raw_blocks()
        .iter()
        .map(|b| {
            let mut out = DMatrix::zeros(m, m);
            out[(0, 0)] = b[(0, 0)];
            out
        })
        .collect();
    BlockVector::from_dmatrices(m, blocks)
}

/// `diag(x)` as a single block.
fn diagonal_embedding(x: &BlockVector) -> BlockVector {
    let v: Vec<C64> = x.raw_blocks().iter().map(|b| b[(0, 0)]).collect();
    let n = v.len();
    let d = DMatrix::from_fn(n, n, |i, j| if i == j { v[i] } else { ZERO });
    BlockVector::from_dmatrices(n, vec![d])
}

/// `X_j = σ^{n-1-j}(A)`: then `(S_n X)_j = σ(X_j)` exactly because `σ` is
/// nilpotent on the truncation, so the last block of `P(S_n) X` is `P(σ) A`.
fn kitover_start(a: &DMatrix<C64>, n: usize, m: usize) -> BlockVector {
    let mut base = DMatrix::zeros(m, m);
    let k = a.nrows().min(m);
    base.view_mut((0, 0), (k, k)).copy_from(&a.view((0, 0), (k, k)));
    let shift = |x: &DMatrix<C64>| {
        DMatrix::from_fn(m, m, |i, j| if i > 0 && j > 0 { x[(i - 1, j - 1)] } else { ZERO })
    };
    let mut blocks = vec![DMatrix::zeros(m, m); n];
    let mut cur = base;
    for j in (0..n).rev() {
        blocks[j] = cur.clone();
        cur = shift(&cur);
    }
    BlockVector::from_dmatrices(m, blocks)
}

fn scalar_operator(p: &Polynomial, n: usize, m: usize) -> BlockOperator {
    BlockOperator::new(toeplitz_of(p, n), m).expect("Toeplitz matrices are finite")
}

fn poly_norm_with(
    poly: &Polynomial,
    p: PExponent,
    n: usize,
    cfg: &EstimateConfig,
    extra: &[BlockVector],
) -> Result<PNormEstimate> {
    check_n(n)?;
    if poly.is_zero() {
        return Ok(zero_estimate(p, n, 1, cfg));
    }
    let op = scalar_operator(poly, n, 1);
    if is_exact_route(p) {
        return exact_block_estimate(&op, p);
    }
    let mut warm: Vec<BlockVector> = extra.to_vec();
    if n > CHAIN_FLOOR {
        let half = poly_norm_with(poly, p, n / 2, cfg, &[])?;
        warm.push(pad(&half.witness, n));
    }
    estimate_pnorm_with_starts(&op, p, cfg, &warm)
}

/// `||P(S_n)||` on `l^p_n`. The exponents 1, 2 and inf use closed forms;
/// other exponents run the power iteration, seeded with the witness of the
/// half-size truncation so that estimates never decrease along doublings.
pub fn poly_norm(poly: &Polynomial, p: PExponent, n: usize, cfg: &EstimateConfig) -> Result<PNormEstimate> {
    poly_norm_with(poly, p, n, cfg, &[])
}

/// `||P(σ_n)||` on `S^p_n`, computed on a single `n×n` block.
pub fn sigma_norm(poly: &Polynomial, p: PExponent, n: usize, cfg: &EstimateConfig) -> Result<PNormEstimate> {
    check_n(n)?;
    if poly.is_zero() {
        return Ok(zero_estimate(p, 1, n, cfg));
    }
    let map = SigmaMap::new(poly, n);
    match p {
        PExponent::Finite(q) if q == 2.0 => {
            // On S^2 the map splits over diagonals into Toeplitz sections of
            // sizes 1..n; the largest section carries the norm.
            let spec = singular_values(&toeplitz_of(poly, n))?;
            let v: Vec<C64> = (0..n).map(|j| spec.v_adjoint[(0, j)].conj()).collect();
            let witness = diagonal_embedding(&BlockVector::from_scalars(&v));
            let value = mixed_norm(&map.apply(&witness), p);
            Ok(PNormEstimate {
                p,
                value,
                converged: true,
                restarts_used: 0,
                iterations: 0,
                zero: value == 0.0,
                witness,
                seed: cfg.seed,
            })
        }
        PExponent::Finite(q) if q > 1.0 => {
            let scalar = poly_norm(poly, p, n, cfg)?;
            let warm = [diagonal_embedding(&scalar.witness)];
            estimate_pnorm_with_starts(&map, p, cfg, &warm)
        }
        _ => Err(Error::ExponentRouting {
            p: p.value(),
            routine: "sigma_norm",
        }),
    }
}

fn vector_norm_with(
    poly: &Polynomial,
    p: PExponent,
    n: usize,
    m: usize,
    cfg: &EstimateConfig,
    extra: &[BlockVector],
) -> Result<PNormEstimate> {
    check_n(n)?;
    if m == 0 {
        return Err(Error::InvalidInput("block size must be at least 1".into()));
    }
    if m == 1 {
        return poly_norm_with(poly, p, n, cfg, extra);
    }
    if poly.is_zero() {
        return Ok(zero_estimate(p, n, m, cfg));
    }
    let op = scalar_operator(poly, n, m);
    if is_exact_route(p) {
        return exact_block_estimate(&op, p);
    }
    let scalar = poly_norm(poly, p, n, cfg)?;
    let mut warm: Vec<BlockVector> = extra.to_vec();
    warm.push(lift_scalar(&scalar.witness, m));
    if m >= n {
        let sigma = sigma_norm(poly, p, n, cfg)?;
        warm.push(kitover_start(&sigma.witness.raw_blocks()[0], n, m));
    }
    estimate_pnorm_with_starts(&op, p, cfg, &warm)
}

/// `||P(S_n) ⊗ Id_{S^p_m}||` on `l^p_n(S^p_m)`. For `m = 1` this is exactly
/// [`poly_norm`].
pub fn poly_vector_norm(
    poly: &Polynomial,
    p: PExponent,
    n: usize,
    m: usize,
    cfg: &EstimateConfig,
) -> Result<PNormEstimate> {
    vector_norm_with(poly, p, n, m, cfg, &[])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub n: usize,
    pub value: f64,
    pub converged: bool,
    pub certified: bool,
}

/// Truncated norms along a ladder of sizes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormProfile {
    pub polynomial: Polynomial,
    pub p: PExponent,
    pub m: usize,
    pub entries: Vec<ProfileEntry>,
}

impl NormProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,value,converged\n");
        for e in &self.entries {
            out.push_str(&format!("{},{:.17e},{}\n", e.n, e.value, e.converged));
        }
        out
    }
}

/// Re-evaluates a witness: `||T w|| = value` and `||w|| = 1`, both to 1e-8.
pub(crate) fn witness_certifies<T: BlockMap + ?Sized>(t: &T, est: &PNormEstimate) -> bool {
    let norm = mixed_norm(&est.witness, est.p);
    let image = mixed_norm(&t.apply(&est.witness), est.p);
    let scale = est.value.max(1.0);
    (norm - 1.0).abs() <= 1e-8 && (image - est.value).abs() <= 1e-8 * scale
}

/// Estimates along an increasing ladder. Each size also starts from the
/// previous witness, so the profile is nondecreasing.
pub fn norm_profile(
    poly: &Polynomial,
    p: PExponent,
    ladder: &[usize],
    m: usize,
    cfg: &EstimateConfig,
) -> Result<NormProfile> {
    let mut sizes = ladder.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let mut entries = Vec::with_capacity(sizes.len());
    let mut previous: Option<BlockVector> = None;
    for &n in &sizes {
        let extra: Vec<BlockVector> = previous.iter().map(|w| pad(w, n)).collect();
        let est = vector_norm_with(poly, p, n, m, cfg, &extra)?;
        let certified = witness_certifies(&scalar_operator(poly, n, m.max(1)), &est);
        entries.push(ProfileEntry {
            n,
            value: est.value,
            converged: est.converged,
            certified,
        });
        previous = Some(est.witness);
    }
    Ok(NormProfile {
        polynomial: poly.clone(),
        p,
        m,
        entries,
    })
}
