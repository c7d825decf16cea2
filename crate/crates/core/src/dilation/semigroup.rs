//! Schur multiplier semigroups `A(t) = [exp(-t |α_i - α_j|²)]`, the
//! Schoenberg test for conditionally negative definite kernels, and the
//! Gaussian dilation `T_t(x) = E[D_t x D_t*]`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ZERO};
use crate::multiplier::gram_factorize_real;

const SYMMETRY_TOL: f64 = 1e-10;
/// Relative eigenvalue tolerance for the algebraic CND test.
const CND_TOL: f64 = 1e-10;
/// Monte-Carlo draws are split into this many seeded chunks, so results do
/// not depend on the thread count.
const MC_CHUNKS: u64 = 64;

/// Points `α_1, .., α_n` in `R^r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemigroupSpec {
    pub alphas: Vec<Vec<f64>>,
}

impl SemigroupSpec {
    pub fn new(alphas: Vec<Vec<f64>>) -> Result<Self> {
        let r = alphas.first().map_or(0, Vec::len);
        if alphas.is_empty() {
            return Err(Error::InvalidInput("at least one point is needed".into()));
        }
        for a in &alphas {
            if a.len() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    found: a.len(),
                });
            }
            if a.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("non-finite coordinate".into()));
            }
        }
        Ok(SemigroupSpec { alphas })
    }

    pub fn size(&self) -> usize {
        self.alphas.len()
    }

    /// `[|α_i - α_j|²]`.
    pub fn squared_distances(&self) -> DMatrix<f64> {
        let n = self.size();
        DMatrix::from_fn(n, n, |i, j| {
            self.alphas[i].iter().zip(&self.alphas[j]).map(|(a, b)| (a - b) * (a - b)).sum()
        })
    }

    /// `A(t) = [exp(-t |α_i - α_j|²)]`.
    pub fn matrix(&self, t: f64) -> DMatrix<f64> {
        self.squared_distances().map(|d| (-t * d).exp())
    }

    /// `T_t(x) = A(t) ∘ x`.
    pub fn apply(&self, t: f64, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        ComplexMatrix::from_real(&self.matrix(t)).hadamard(x)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SchoenbergCertificate {
    /// Points with `a_ij = |α_i - α_j|²`.
    Embedding { alphas: Vec<Vec<f64>>, residual: f64 },
    /// `exp(-t A)` has the negative eigenvalue `eigenvalue`; `t` minimizes
    /// that eigenvalue relative to the largest entry.
    Violation { t: f64, eigenvalue: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchoenbergReport {
    pub cnd: bool,
    /// Smallest eigenvalue of `-P A P / 2`, `P` the projection onto the
    /// complement of the constants.
    pub min_eigenvalue: f64,
    pub certificate: SchoenbergCertificate,
    /// `(t, smallest eigenvalue of exp(-t A))` at the requested samples.
    pub spot_checks: Vec<(f64, f64)>,
}

fn min_eigenvalue(m: DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

fn exp_min_eigenvalue(a: &DMatrix<f64>, t: f64) -> f64 {
    min_eigenvalue(a.map(|x| (-t * x).exp()))
}

/// Decides whether a real symmetric zero-diagonal `A` is conditionally
/// negative definite, i.e. `exp(-tA)` is positive semidefinite for every
/// `t > 0`.
pub fn schoenberg_check(a: &DMatrix<f64>, t_samples: &[f64]) -> Result<SchoenbergReport> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::InvalidInput("expected a nonempty square matrix".into()));
    }
    let scale = a.abs().max().max(1.0);
    if (0..n).any(|i| a[(i, i)].abs() > SYMMETRY_TOL) {
        return Err(Error::Precondition("the diagonal must vanish".into()));
    }
    if (a - a.transpose()).abs().max() > SYMMETRY_TOL * scale {
        return Err(Error::Precondition("the kernel must be symmetric".into()));
    }
    if t_samples.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidInput("sample times must be positive".into()));
    }
    let p = DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
    let b = (&p * a * &p) * -0.5;
    let b = (&b + b.transpose()) * 0.5;
    let lmin = min_eigenvalue(b.clone());
    let cnd = lmin >= -CND_TOL * scale;
    let spot_checks: Vec<(f64, f64)> = t_samples.iter().map(|&t| (t, exp_min_eigenvalue(a, t))).collect();

    let certificate = if cnd {
        let f = gram_factorize_real(&b)?;
        let spec = SemigroupSpec::new(f.vectors.clone())?;
        let residual = (spec.squared_distances() - a).abs().max();
        SchoenbergCertificate::Embedding {
            alphas: f.vectors,
            residual,
        }
    } else {
        // Scan a log grid on top of the requested samples and keep the most
        // negative eigenvalue relative to the largest entry, skipping times
        // where the exponential overflows.
        let grid = (0..=160).map(|k| 10f64.powf(-4.0 + k as f64 * 0.05));
        let (t, eigenvalue, _) = t_samples
            .iter()
            .copied()
            .chain(grid)
            .filter_map(|t| {
                let m = a.map(|x| (-t * x).exp());
                let size = m.max();
                (size < 1e12).then(|| {
                    let lambda = min_eigenvalue(m);
                    (t, lambda, lambda / size)
                })
            })
            .min_by(|x, y| x.2.total_cmp(&y.2))
            .ok_or_else(|| Error::Accuracy("exp(-tA) overflows on the whole grid".into()))?;
        SchoenbergCertificate::Violation { t, eigenvalue }
    };
    Ok(SchoenbergReport {
        cnd,
        min_eigenvalue: lmin,
        certificate,
        spot_checks,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaussianReport {
    pub t: f64,
    pub samples: usize,
    pub seed: u64,
    pub mc_estimate: ComplexMatrix,
    pub exact: ComplexMatrix,
    /// Frobenius distance between the two.
    pub residual: f64,
    /// Three standard deviations of the Frobenius error.
    pub three_sigma: f64,
}

/// Monte-Carlo average of `D_t(w) x D_t(w)*` with
/// `D_t(w) = diag(exp(i √t <α_j, w>))`, against `T_t(x)`.
///
/// `w = √2 g` with `g` standard normal in `R^r`, so that
/// `E exp(i <h, w>) = exp(-|h|²)`.
pub fn gaussian_semigroup_dilate(
    spec: &SemigroupSpec,
    t: f64,
    x: &ComplexMatrix,
    samples: usize,
    seed: u64,
) -> Result<GaussianReport> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidInput(format!("t must be nonnegative, got {t}")));
    }
    let n = spec.size();
    if x.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.rows(),
        });
    }
    if samples == 0 {
        return Err(Error::InvalidInput("at least one sample is needed".into()));
    }
    let r = spec.alphas[0].len();
    let exact = spec.apply(t, x)?;
    let scale = (2.0 * t).sqrt();
    let chunk_sums: Vec<Vec<C64>> = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|c| {
            let count = samples / MC_CHUNKS as usize + usize::from((c as usize) < samples % MC_CHUNKS as usize);
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(c));
            let mut acc = vec![ZERO; n * n];
            let mut phase = vec![ZERO; n];
            let mut g = vec![0.0; r];
            for _ in 0..count {
                g.iter_mut().for_each(|v| *v = StandardNormal.sample(&mut rng));
                for (ph, a) in phase.iter_mut().zip(&spec.alphas) {
                    let dot: f64 = a.iter().zip(&g).map(|(p, q)| p * q).sum();
                    *ph = C64::from_polar(1.0, scale * dot);
                }
                for j in 0..n {
                    for k in 0..n {
                        acc[j * n + k] += phase[j] * phase[k].conj();
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = vec![ZERO; n * n];
    for chunk in &chunk_sums {
        for (t, c) in total.iter_mut().zip(chunk) {
            *t += c;
        }
    }
    let inv = 1.0 / samples as f64;
    let mc_estimate = ComplexMatrix::from_fn(n, n, |j, k| total[j * n + k] * inv * x[(j, k)]);
    let residual = mc_estimate.distance(&exact)?;
    let d = spec.squared_distances();
    let variance: f64 = (0..n)
        .flat_map(|j| (0..n).map(move |k| (j, k)))
        .map(|(j, k)| x[(j, k)].norm_sqr() * (1.0 - (-2.0 * t * d[(j, k)]).exp()))
        .sum::<f64>()
        * inv;
    Ok(GaussianReport {
        t,
        samples,
        seed,
        mc_estimate,
        exact,
        residual,
        three_sigma: 3.0 * variance.sqrt(),
    })
}
