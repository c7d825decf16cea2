//! Maximum modulus on the unit circle and the sign-pattern test for
//! polynomials whose norm equals the sum of the absolute coefficients.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Polynomial;
use crate::error::{Error, Result};
use crate::matrix::C64;

const GRID: usize = 1 << 16;
const STRICT_MARGIN: f64 = 1e-6;

fn modulus_at(p: &Polynomial, theta: f64) -> f64 {
    p.eval(C64::from_polar(1.0, theta)).norm()
}

/// `max |P(e^{iθ})|` with the maximizing angle. A `2^16`-point grid locates
/// the peak, then golden-section search polishes it inside the neighbouring
/// grid cells.
pub fn sup_circle_with_angle(p: &Polynomial) -> (f64, f64) {
    if p.is_zero() {
        return (0.0, 0.0);
    }
    let h = 2.0 * PI / GRID as f64;
    let (mut best_k, mut best) = (0, modulus_at(p, 0.0));
    for k in 1..GRID {
        let v = modulus_at(p, k as f64 * h);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let centre = best_k as f64 * h;
    let (mut lo, mut hi) = (centre - h, centre + h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (modulus_at(p, x1), modulus_at(p, x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = modulus_at(p, x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = modulus_at(p, x1);
        }
    }
    let (theta, value) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
    if value > best {
        (value, theta.rem_euclid(2.0 * PI))
    } else {
        (best, centre)
    }
}

/// `sup_{|z|=1} |P(z)|`, which is also the norm of `P(S)` on `l^2`.
pub fn sup_circle(p: &Polynomial) -> f64 {
    sup_circle_with_angle(p).0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    SameSign,
    Alternating,
    Neither,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtremalReport {
    pub verdict: Verdict,
    /// `sum |a_k|` when the verdict predicts that value for every `p`.
    pub predicted: Option<f64>,
    pub abs_sum: f64,
    pub sup_circle: f64,
    /// For `Neither`: whether `sup_circle < sum |a_k| - 1e-6` holds.
    pub strict: bool,
}

/// Sign-pattern verdict for a real polynomial with nonzero coefficients.
/// Same-sign and alternating patterns are exactly those with
/// `||P||_p = sum |a_k|` for one (equivalently all) `1 < p < inf`.
pub fn classify_extremal(p: &Polynomial) -> Result<ExtremalReport> {
    if p.is_zero() {
        return Err(Error::OutOfScope("the zero polynomial has no sign pattern".into()));
    }
    if !p.is_real() {
        return Err(Error::OutOfScope("complex coefficients".into()));
    }
    let a: Vec<f64> = p.coeffs().iter().map(|z| z.re).collect();
    if a.contains(&0.0) {
        return Err(Error::OutOfScope("zero coefficient".into()));
    }
    let same = a.iter().all(|&x| x.signum() == a[0].signum());
    let alternating = a.windows(2).all(|w| w[0] * w[1] < 0.0);
    let verdict = if same {
        Verdict::SameSign
    } else if alternating {
        Verdict::Alternating
    } else {
        Verdict::Neither
    };
    let abs_sum = p.abs_sum();
    let sup = sup_circle(p);
    Ok(ExtremalReport {
        verdict,
        predicted: (verdict != Verdict::Neither).then_some(abs_sum),
        abs_sum,
        sup_circle: sup,
        strict: verdict != Verdict::Neither || sup < abs_sum - STRICT_MARGIN,
    })
}
