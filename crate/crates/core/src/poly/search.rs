//! Random and perturbative search for polynomials whose Schatten-valued
//! norm exceeds the scalar one.
//!
//! Both numbers are lower bounds of truncated norms, so a positive
//! difference is evidence, not proof.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::norms::{poly_norm, poly_vector_norm, witness_certifies};
use super::shift::toeplitz_of;
use super::Polynomial;
use crate::error::{Error, Result};
use crate::matrix::{PExponent, C64};
use crate::pnorm::{BlockOperator, BlockVector, EstimateConfig};

pub const HEURISTIC_BANNER: &str = "heuristic, not certified: the scalar value is itself a lower \
bound for the truncated scalar norm, so a positive gap is not a proof";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapSearchConfig {
    /// Number of candidate polynomials evaluated.
    pub budget: usize,
    /// Truncation size.
    pub n: usize,
    /// Block size of the Schatten-valued estimate.
    pub m: usize,
    /// Ranked candidates kept in the report.
    pub top: usize,
    pub estimate: EstimateConfig,
    pub seed: u64,
}

impl Default for GapSearchConfig {
    fn default() -> Self {
        GapSearchConfig {
            budget: 40,
            n: 16,
            m: 4,
            top: 10,
            estimate: EstimateConfig {
                restarts: 4,
                max_iters: 300,
                tol: 1e-10,
                seed: 0,
            },
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapCandidate {
    pub polynomial: Polynomial,
    pub degree: usize,
    pub scalar_value: f64,
    pub vector_value: f64,
    pub gap: f64,
    pub n: usize,
    pub m: usize,
    pub witness: BlockVector,
    /// The witness reproduces `vector_value` within 1e-8.
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapSearchReport {
    pub banner: String,
    pub p: PExponent,
    pub max_degree: usize,
    pub evaluated: usize,
    pub candidates: Vec<GapCandidate>,
}

/// Scalar and block estimates of one polynomial.
pub fn evaluate_candidate(poly: &Polynomial, p: PExponent, cfg: &GapSearchConfig) -> Result<GapCandidate> {
    let scalar = poly_norm(poly, p, cfg.n, &cfg.estimate)?;
    let vector = poly_vector_norm(poly, p, cfg.n, cfg.m, &cfg.estimate)?;
    let op = BlockOperator::new(toeplitz_of(poly, cfg.n), cfg.m)?;
    Ok(GapCandidate {
        polynomial: poly.clone(),
        degree: poly.degree(),
        scalar_value: scalar.value,
        vector_value: vector.value,
        gap: vector.value - scalar.value,
        n: cfg.n,
        m: cfg.m,
        certified: witness_certifies(&op, &vector),
        witness: vector.witness,
    })
}

/// Coefficients with Gaussian real and imaginary parts, scaled to
/// `sum |a_k| = 1`.
fn random_coeffs(rng: &mut ChaCha8Rng, degree: usize) -> Vec<C64> {
    let a: Vec<C64> = (0..=degree)
        .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    normalize(a)
}

fn normalize(a: Vec<C64>) -> Vec<C64> {
    let s: f64 = a.iter().map(|z| z.norm()).sum();
    a.into_iter().map(|z| z / s).collect()
}

fn perturb(rng: &mut ChaCha8Rng, base: &Polynomial, scale: f64) -> Vec<C64> {
    let a = base
        .coeffs()
        .iter()
        .map(|&z| {
            z + C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)) * scale
        })
        .collect();
    normalize(a)
}

/// Spends `cfg.budget` evaluations: the first half on fresh random
/// polynomials of degree `2..=max_degree`, the rest on perturbations of the
/// current leaders. Candidates are ranked by gap, then by smaller degree.
pub fn gap_search(p: PExponent, max_degree: usize, cfg: &GapSearchConfig) -> Result<GapSearchReport> {
    if p.value() == 2.0 {
        return Err(Error::Rejected(
            "no gap exists at p = 2: ||P||_2 = ||P||_{2,S_2} = sup over the unit circle".into(),
        ));
    }
    if max_degree < 2 {
        return Err(Error::InvalidInput("degree must be at least 2".into()));
    }
    if cfg.budget == 0 || cfg.n <= max_degree || cfg.m < 2 {
        return Err(Error::InvalidInput(
            "need budget >= 1, truncation n > degree and block size m >= 2".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pool: Vec<GapCandidate> = Vec::with_capacity(cfg.budget);
    let explore = cfg.budget.div_ceil(2);
    for i in 0..cfg.budget {
        let coeffs = if i < explore || pool.is_empty() {
            let degree = rng.random_range(2..=max_degree);
            random_coeffs(&mut rng, degree)
        } else {
            let leaders = pool.len().min(5);
            let base = pool[rng.random_range(0..leaders)].polynomial.clone();
            perturb(&mut rng, &base, 0.1)
        };
        let poly = Polynomial::new(coeffs)?;
        pool.push(evaluate_candidate(&poly, p, cfg)?);
        rank(&mut pool);
    }
    pool.truncate(cfg.top.max(1));
    Ok(GapSearchReport {
        banner: HEURISTIC_BANNER.to_string(),
        p,
        max_degree,
        evaluated: cfg.budget,
        candidates: pool,
    })
}

fn rank(pool: &mut [GapCandidate]) {
    pool.sort_by(|a, b| b.gap.total_cmp(&a.gap).then(a.degree.cmp(&b.degree)));
}

impl GapSearchReport {
    /// One row per candidate: rank, degree, scalar, vector, gap, certified, coefficients.
    pub fn table(&self) -> String {
        let mut out = format!("# {}\nrank,degree,scalar,vector,gap,certified,coefficients\n", self.banner);
        for (i, c) in self.candidates.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{:.10},{:.10},{:.3e},{},\"{}\"\n",
                i + 1,
                c.degree,
                c.scalar_value,
                c.vector_value,
                c.gap,
                c.certified,
                c.polynomial
            ));
        }
        out
    }
}
