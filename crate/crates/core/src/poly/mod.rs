//! Polynomials in shift operators.

mod extremal;
mod norms;
mod search;
mod shift;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{C64, ZERO};

pub use extremal::{classify_extremal, sup_circle, sup_circle_with_angle, ExtremalReport, Verdict};
pub use norms::{
    norm_profile, poly_norm, poly_vector_norm, sigma_norm, NormProfile, ProfileEntry,
    DEFAULT_LADDER,
};
pub use search::{gap_search, GapCandidate, GapSearchConfig, GapSearchReport, HEURISTIC_BANNER};
pub use shift::{
    left_shift, right_shift, sigma_apply, sigma_conjugation_check, sigma_matrix, theta_apply,
    toeplitz_of, ShiftKind, ShiftTruncation, SigmaMap,
};

/// `P(z) = sum_k a_k z^k`, stored low degree first with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite polynomial coefficient".into()));
        }
        while coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        Ok(Polynomial { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = C64::new(1.0, 0.0);
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &a| acc * z + a)
    }

    /// `sum_k |a_k|`, the norm on `l^1` and `l^inf`.
    pub fn abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|z| z.im == 0.0)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect()).expect("finite")
    }
}

impl TryFrom<Vec<[f64; 2]>> for Polynomial {
    type Error = Error;
    fn try_from(raw: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(raw.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

impl From<Polynomial> for Vec<[f64; 2]> {
    fn from(p: Polynomial) -> Self {
        p.coeffs.iter().map(|z| [z.re, z.im]).collect()
    }
}

/// Parses one coefficient: `3`, `-0.5`, `2i`, `-i`, `1+2i`, `1e-3-4.5i`.
pub fn parse_complex(token: &str) -> Result<C64> {
    let s: String = token.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidInput(format!("malformed coefficient {token:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().map(|x| C64::new(x, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not a leading sign or an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(C64::new(re, imag(&body[k..])?))
        }
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    /// Comma-separated coefficients, low degree first.
    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(parse_complex)
            .collect::<Result<Vec<_>>>()?;
        Polynomial::new(coeffs)
    }
}

fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|&z| format_complex(z)).collect();
        write!(f, "{}", parts.join(","))
    }
}
