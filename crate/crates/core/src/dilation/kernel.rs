//! Kernels `b` supported in `[0, T]`, their discretization `a_{n,k}`, and
//! the operator `∫ b(t) T_t dt` for matrix semigroups.

use gauss_quad::GaussLegendre;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::semigroup::SemigroupSpec;
use crate::error::{Error, Result};
use crate::matrix::{is_psd, ComplexMatrix, PExponent, C64, PSD_TOL};
use crate::multiplier::{SchurMap, SchurMultiplier};
use crate::pnorm::{estimate_pnorm, exact_pnorm_special, BlockOperator, EstimateConfig};

fn one() -> f64 {
    1.0
}

/// A real kernel on a bounded subset of `[0, inf)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KernelFunction {
    /// `height` on `[start, end]`.
    Indicator {
        start: f64,
        end: f64,
        #[serde(default = "one")]
        height: f64,
    },
    /// Hat of the given half width, `height` at `center`.
    Triangle {
        center: f64,
        half_width: f64,
        #[serde(default = "one")]
        height: f64,
    },
    /// `exp(-rate t)` on `[0, cutoff]`.
    Exp { rate: f64, cutoff: f64 },
    /// Piecewise linear through `(k step, values[k])`.
    Samples { step: f64, values: Vec<f64> },
}

impl KernelFunction {
    /// Checks finiteness and that the support is a bounded part of `[0, inf)`.
    pub fn validate(&self) -> Result<()> {
        let finite = match self {
            KernelFunction::Indicator { start, end, height } => {
                [*start, *end, *height].iter().all(|x| x.is_finite()) && start < end
            }
            KernelFunction::Triangle {
                center,
                half_width,
                height,
            } => [*center, *half_width, *height].iter().all(|x| x.is_finite()) && *half_width > 0.0,
            KernelFunction::Exp { rate, cutoff } => {
                rate.is_finite() && !cutoff.is_nan() && *cutoff > 0.0
            }
            KernelFunction::Samples { step, values } => {
                step.is_finite() && *step > 0.0 && values.len() >= 2 && values.iter().all(|v| v.is_finite())
            }
        };
        if !finite {
            return Err(Error::InvalidInput(format!("malformed kernel {self:?}")));
        }
        let (lo, hi) = self.support();
        if !hi.is_finite() {
            return Err(Error::Precondition("the kernel support must be bounded".into()));
        }
        if lo < 0.0 {
            return Err(Error::Precondition("the kernel must be supported in [0, inf)".into()));
        }
        Ok(())
    }

    /// Closed interval outside which `b` vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self {
            KernelFunction::Indicator { start, end, .. } => (*start, *end),
            KernelFunction::Triangle { center, half_width, .. } => (center - half_width, center + half_width),
            KernelFunction::Exp { cutoff, .. } => (0.0, *cutoff),
            KernelFunction::Samples { step, values } => (0.0, step * (values.len() - 1) as f64),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t < lo || t > hi {
            return 0.0;
        }
        match self {
            KernelFunction::Indicator { height, .. } => *height,
            KernelFunction::Triangle {
                center,
                half_width,
                height,
            } => height * (1.0 - (t - center).abs() / half_width).max(0.0),
            KernelFunction::Exp { rate, .. } => (-rate * t).exp(),
            KernelFunction::Samples { step, values } => {
                let x = t / step;
                let k = (x.floor() as usize).min(values.len() - 2);
                let f = x - k as f64;
                values[k] * (1.0 - f) + values[k + 1] * f
            }
        }
    }

    /// Points where `b` may fail to be smooth, sorted, including the ends of
    /// the support.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = self.support();
        match self {
            KernelFunction::Triangle { center, .. } => vec![lo, *center, hi],
            KernelFunction::Samples { step, values } => (0..values.len()).map(|k| k as f64 * step).collect(),
            _ => vec![lo, hi],
        }
    }

    /// `∫ |b|`.
    pub fn l1_norm(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.integrate(|x| x.abs()))
    }

    /// `∫ b`.
    pub fn mass(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.integrate(|x| x))
    }
}

/// Consecutive intervals between the sorted union of two sets of cut points.
impl KernelFunction {
    /// `∫ f(b(t)) dt`, 16-point Gauss-Legendre on panels of length at most
    /// 1/8 between breakpoints.
    fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let rule = GaussLegendre::new(16).expect("order >= 2");
        pieces(&self.breakpoints(), &[])
            .iter()
            .map(|&(a, b)| {
                let panels = ((b - a) * 8.0).ceil().max(1.0) as usize;
                let h = (b - a) / panels as f64;
                (0..panels)
                    .map(|k| {
                        let lo = a + k as f64 * h;
                        rule.integrate(lo, lo + h, |t| f(self.eval(t)))
                    })
                    .sum::<f64>()
            })
            .sum()
    }
}

fn pieces(a: &[f64], b: &[f64]) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = a.iter().chain(b).copied().collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])).collect()
}

/// `a_{n,k} = ∫∫_{[0,1]²} (1/n) b((t - s + k)/n) ds dt` for `k >= 0`.
///
/// The difference `t - s` has density `1 - |u|` on `[-1, 1]`, so
/// `a_{n,k} = ∫ hat_k(τ) b(τ) dτ` with `hat_k` the hat function centred at
/// `k/n` of half width `1/n`. The integral is taken piecewise between the
/// kink points of `b` and `hat_k` with an `order`-point Gauss–Legendre rule,
/// which is exact for piecewise linear `b` once `order >= 2`.
pub fn discretize_kernel(b: &KernelFunction, n: usize, order: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    b.validate()?;
    let rule = GaussLegendre::new(order.max(2)).expect("order >= 2");
    let (lo, hi) = b.support();
    let nf = n as f64;
    // Nonzero only when ((k-1)/n, (k+1)/n) meets (lo, hi).
    let last = (nf * hi + 1.0).ceil() as usize;
    let breaks = b.breakpoints();
    let coeffs = (0..=last)
        .map(|k| {
            let kf = k as f64;
            let (left, right) = ((kf - 1.0) / nf, (kf + 1.0) / nf);
            if right <= lo || left >= hi {
                return 0.0;
            }
            let hat_cuts = [left.max(lo), (kf / nf).clamp(lo, hi), right.min(hi)];
            let inside: Vec<f64> = breaks.iter().copied().filter(|&x| x > left && x < right).collect();
            pieces(&hat_cuts, &inside)
                .iter()
                .map(|&(a, c)| {
                    rule.integrate(a, c, |tau| (1.0 - (nf * tau - kf).abs()).max(0.0) * b.eval(tau))
                })
                .sum()
        })
        .collect::<Vec<f64>>();
    let mut coeffs = coeffs;
    while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
        coeffs.pop();
    }
    Ok(coeffs)
}

/// The semigroup `T_t` being averaged.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SemigroupSource {
    /// `T_t = exp(tL)` acting on `C^n`.
    Generator { generator: ComplexMatrix },
    /// Schur multipliers `T_t(x) = A(t) ∘ x` acting on `S^p_n`.
    Schur { spec: SemigroupSpec },
}

impl SemigroupSource {
    /// The matrix of `T_t` (for Schur semigroups, the symbol `A(t)`).
    pub fn at(&self, t: f64) -> ComplexMatrix {
        match self {
            SemigroupSource::Generator { generator } => {
                ComplexMatrix::from_dmatrix(generator.as_dmatrix().scale(t).exp())
            }
            SemigroupSource::Schur { spec } => ComplexMatrix::from_real(&spec.matrix(t)),
        }
    }

    fn size(&self) -> usize {
        match self {
            SemigroupSource::Generator { generator } => generator.rows(),
            SemigroupSource::Schur { spec } => spec.size(),
        }
    }

    /// Norm of the operator whose matrix (or symbol) is `m`.
    pub fn operator_norm(&self, m: &ComplexMatrix, p: PExponent, cfg: &EstimateConfig) -> Result<f64> {
        match self {
            SemigroupSource::Generator { .. } => match exact_pnorm_special(m, p) {
                Ok(v) => Ok(v),
                Err(Error::ExponentRouting { .. }) => Ok(estimate_pnorm(&BlockOperator::scalar(m.clone())?, p, cfg)?.value),
                Err(e) => Err(e),
            },
            SemigroupSource::Schur { .. } => {
                if p.value() == 2.0 {
                    return Ok(m.max_abs());
                }
                let map = SchurMap::new(&SchurMultiplier::new(m.clone())?);
                Ok(estimate_pnorm(&map, p, cfg)?.value)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Gauss–Legendre points per panel.
    pub order: usize,
    /// Refinement stops when two successive panel doublings differ by less
    /// than this, entrywise.
    pub tol: f64,
    pub max_doublings: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            order: 8,
            tol: 1e-9,
            max_doublings: 12,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvolutionConfig {
    pub quadrature: QuadratureConfig,
    /// Exponents for the norm report and the contractivity check.
    pub p: Vec<PExponent>,
    pub estimate: EstimateConfig,
    /// Times in the support at which contractivity of `T_t` is checked.
    pub contractivity_samples: usize,
}

impl Default for ConvolutionConfig {
    fn default() -> Self {
        ConvolutionConfig {
            quadrature: QuadratureConfig::default(),
            p: vec![PExponent::two()],
            estimate: EstimateConfig::default(),
            contractivity_samples: 9,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormEntry {
    pub p: PExponent,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvolutionReport {
    /// `∫ b(t) T_t dt` (for Schur semigroups, its symbol).
    pub result: ComplexMatrix,
    pub l1_norm: f64,
    pub norms: Vec<NormEntry>,
    /// Panels per piece of the support at convergence.
    pub panels: usize,
    /// Entrywise change at the last doubling.
    pub refinement_gap: f64,
}

fn composite(
    rule: &GaussLegendre,
    spans: &[(f64, f64)],
    panels: usize,
    f: &impl Fn(f64) -> ComplexMatrix,
    n: usize,
) -> ComplexMatrix {
    let mut acc = DMatrix::<C64>::zeros(n, n);
    for &(a, b) in spans {
        let h = (b - a) / panels as f64;
        for k in 0..panels {
            let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for &(x, w) in rule.as_node_weight_pairs() {
                acc += f(mid + half * x).as_dmatrix() * C64::new(w * half, 0.0);
            }
        }
    }
    ComplexMatrix::from_dmatrix(acc)
}

/// `∫ b(t) T_t dt` by adaptive composite Gauss–Legendre quadrature over the
/// support of `b`, with norms of the result and of `b`.
pub fn semigroup_convolution(
    b: &KernelFunction,
    source: &SemigroupSource,
    cfg: &ConvolutionConfig,
) -> Result<ConvolutionReport> {
    b.validate()?;
    let n = source.size();
    if let SemigroupSource::Generator { generator } = source {
        generator.check_square()?;
    }
    let (lo, hi) = b.support();
    let checks = cfg.contractivity_samples.max(1);
    for i in 0..checks {
        let t = lo + (hi - lo) * i as f64 / (checks.max(2) - 1) as f64;
        let tt = source.at(t);
        match source {
            SemigroupSource::Schur { .. } => {
                if !is_psd(&tt, PSD_TOL)? {
                    return Err(Error::Precondition(format!("T_{t} is not completely positive")));
                }
            }
            SemigroupSource::Generator { .. } => {
                for &p in &cfg.p {
                    let v = source.operator_norm(&tt, p, &cfg.estimate)?;
                    if v > 1.0 + 1e-8 {
                        return Err(Error::Precondition(format!(
                            "T_t is not contractive at t = {t} for p = {p}: norm {v}"
                        )));
                    }
                }
            }
        }
    }

    let rule = GaussLegendre::new(cfg.quadrature.order.max(2)).expect("order >= 2");
    let spans = pieces(&b.breakpoints(), &[]);
    let integrand = |t: f64| source.at(t).scale_real(b.eval(t));
    let mut panels = 1;
    let mut prev = composite(&rule, &spans, panels, &integrand, n);
    let mut gap = f64::INFINITY;
    for _ in 0..cfg.quadrature.max_doublings {
        panels *= 2;
        let next = composite(&rule, &spans, panels, &integrand, n);
        gap = (next.as_dmatrix() - prev.as_dmatrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prev = next;
        if gap < cfg.quadrature.tol {
            break;
        }
    }
    if !(gap < cfg.quadrature.tol) {
        return Err(Error::Accuracy(format!(
            "quadrature did not settle: last doubling changed entries by {gap:.3e}"
        )));
    }
    let norms = cfg
        .p
        .iter()
        .map(|&p| {
            Ok(NormEntry {
                p,
                value: source.operator_norm(&prev, p, &cfg.estimate)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvolutionReport {
        result: prev,
        l1_norm: b.l1_norm()?,
        norms,
        panels,
        refinement_gap: gap,
    })
}
