//! Truncated shifts `S_n`, `S_-,n`, the diagonal shift `σ_n` on `n×n`
//! matrices and the two-sided shift `Θ` on a window of `Z`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Polynomial;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::pnorm::{BlockMap, BlockVector};

/// `S_n`: ones on the first subdiagonal.
pub fn right_shift(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| if i == j + 1 { ONE } else { ZERO })
}

/// `S_-,n = S_n*`.
pub fn left_shift(n: usize) -> ComplexMatrix {
    right_shift(n).adjoint()
}

/// `P(S_n)`: entry `(i, j)` is `a_{i-j}`.
pub fn toeplitz_of(p: &Polynomial, n: usize) -> ComplexMatrix {
    let a = p.coeffs();
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i >= j && i - j < a.len() {
            a[i - j]
        } else {
            ZERO
        }
    })
}

/// `σ(X)_{ij} = X_{i-1,j-1}`, zero first row and column.
pub fn sigma_apply(x: &ComplexMatrix) -> ComplexMatrix {
    let (r, c) = x.shape();
    ComplexMatrix::from_fn(r, c, |i, j| {
        if i > 0 && j > 0 {
            x[(i - 1, j - 1)]
        } else {
            ZERO
        }
    })
}

/// `Θ` restricted to a window: entries that would come from outside the
/// window are left at zero.
pub fn theta_apply(a: &ComplexMatrix) -> ComplexMatrix {
    sigma_apply(a)
}

/// `σ_n` as an `n²×n²` matrix on row-major vectorizations.
pub fn sigma_matrix(n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n * n, n * n);
    for i in 1..n {
        for j in 1..n {
            m[(i * n + j, (i - 1) * n + (j - 1))] = ONE;
        }
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftKind {
    Right,
    Left,
    Sigma,
    Theta,
}

/// A shift of a given kind truncated to size `n`. For `Sigma` and `Theta`
/// the matrix acts on row-major vectorizations of `n×n` matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftTruncation {
    pub n: usize,
    pub kind: ShiftKind,
}

impl ShiftTruncation {
    pub fn matrix(&self) -> ComplexMatrix {
        match self.kind {
            ShiftKind::Right => right_shift(self.n),
            ShiftKind::Left => left_shift(self.n),
            ShiftKind::Sigma | ShiftKind::Theta => sigma_matrix(self.n),
        }
    }
}

/// `||Θ(A) - S A S^{-1}||_F` away from the first row and column of the
/// window. `S A S^{-1}` is formed with a genuinely invertible shift on a
/// padded window, so the two sides are computed independently.
pub fn sigma_conjugation_check(a: &ComplexMatrix) -> Result<f64> {
    a.check_square()?;
    let w = a.rows();
    if w < 3 {
        return Err(Error::InvalidInput(format!("window of size {w} is too small; need at least 3")));
    }
    let big = w + 2;
    // Window index i sits at padded index i + 1.
    let mut padded = ComplexMatrix::zeros(big, big);
    for i in 0..w {
        for j in 0..w {
            padded[(i + 1, j + 1)] = a[(i, j)];
        }
    }
    let cyclic = ComplexMatrix::from_fn(big, big, |i, j| if i == (j + 1) % big { ONE } else { ZERO });
    let inverse = cyclic.transpose();
    let conj = &(&cyclic * &padded) * &inverse;
    let theta = theta_apply(a);
    let mut sq = 0.0;
    for i in 1..w {
        for j in 1..w {
            sq += (theta[(i, j)] - conj[(i + 1, j + 1)]).norm_sqr();
        }
    }
    Ok(sq.sqrt())
}

/// `P(σ_n)` as a map on a single `n×n` block.
#[derive(Clone, Debug)]
pub struct SigmaMap {
    coeffs: Vec<C64>,
    n: usize,
}

impl SigmaMap {
    pub fn new(p: &Polynomial, n: usize) -> Self {
        SigmaMap {
            coeffs: p.coeffs().to_vec(),
            n,
        }
    }

    /// The `n²×n²` matrix `sum_k a_k σ_n^k`.
    pub fn matrix(&self) -> ComplexMatrix {
        let s = sigma_matrix(self.n);
        let mut acc = ComplexMatrix::zeros(self.n * self.n, self.n * self.n);
        let mut power = ComplexMatrix::identity(self.n * self.n);
        for &a in &self.coeffs {
            acc = &acc + &power.scale(a);
            power = &s * &power;
        }
        acc
    }

    fn apply_block(&self, x: &DMatrix<C64>, adjoint: bool) -> DMatrix<C64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |i, j| {
            let mut acc = ZERO;
            for (k, &a) in self.coeffs.iter().enumerate() {
                if adjoint {
                    if i + k < n && j + k < n {
                        acc += a.conj() * x[(i + k, j + k)];
                    }
                } else if i >= k && j >= k {
                    acc += a * x[(i - k, j - k)];
                }
            }
            acc
        })
    }
}

impl BlockMap for SigmaMap {
    fn input_blocks(&self) -> usize {
        1
    }

    fn output_blocks(&self) -> usize {
        1
    }

    fn block_dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &BlockVector) -> BlockVector {
        let y = self.apply_block(&x.raw_blocks()[0], false);
        BlockVector::from_dmatrices(self.n, vec![y])
    }

    fn apply_adjoint(&self, y: &BlockVector) -> BlockVector {
        let x = self.apply_block(&y.raw_blocks()[0], true);
        BlockVector::from_dmatrices(self.n, vec![x])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    #[test]
    fn toeplitz_examples() {
        assert_eq!(toeplitz_of(&Polynomial::monomial(1), 3), right_shift(3));
        assert_eq!(toeplitz_of(&Polynomial::monomial(0), 4), ComplexMatrix::identity(4));
        let p = Polynomial::from_real(&[1.0, 1.0]).unwrap();
        let expect = ComplexMatrix::from_real_row_major(2, 2, &[1.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(toeplitz_of(&p, 2), expect);
        assert_eq!(left_shift(3), right_shift(3).transpose());
    }

    #[test]
    fn toeplitz_is_polynomial_in_shift() {
        let p: Polynomial = "1+i,-2,0.5,3i".parse().unwrap();
        let s = right_shift(6);
        let mut acc = ComplexMatrix::zeros(6, 6);
        for (k, &a) in p.coeffs().iter().enumerate() {
            acc = &acc + &s.pow(k as u32).unwrap().scale(a);
        }
        assert!(acc.distance(&toeplitz_of(&p, 6)).unwrap() < 1e-15);
    }

    #[test]
    fn sigma_matches_its_matrix() {
        let n = 4;
        let x = random(n, 1);
        let vec = x.to_row_major();
        let out = sigma_matrix(n).mul_vec(&vec).unwrap();
        assert_eq!(ComplexMatrix::from_row_major(n, n, &out).unwrap(), sigma_apply(&x));
        let st = ShiftTruncation { n, kind: ShiftKind::Sigma };
        assert_eq!(st.matrix(), sigma_matrix(n));
    }

    #[test]
    fn sigma_map_agrees_with_matrix_form() {
        let p: Polynomial = "1,-0.5+i,2".parse().unwrap();
        let n = 4;
        let map = SigmaMap::new(&p, n);
        let big = map.matrix();
        let x = random(n, 2);
        let y = map.apply(&BlockVector::new(vec![x.clone()]).unwrap()).block(0);
        let via = big.mul_vec(&x.to_row_major()).unwrap();
        assert!(y.distance(&ComplexMatrix::from_row_major(n, n, &via).unwrap()).unwrap() < 1e-14);
        // Adjoint pairing.
        let z = random(n, 3);
        let lhs = crate::matrix::trace_pairing(&z, &y).unwrap();
        let adj = map.apply_adjoint(&BlockVector::new(vec![z]).unwrap()).block(0);
        let rhs = crate::matrix::trace_pairing(&adj, &x).unwrap();
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn conjugation_identity() {
        let w = 5;
        let mut e = ComplexMatrix::zeros(w, w);
        e[(2, 2)] = ONE;
        assert_eq!(sigma_conjugation_check(&e).unwrap(), 0.0);
        let mut expect = ComplexMatrix::zeros(w, w);
        expect[(3, 3)] = ONE;
        assert_eq!(theta_apply(&e), expect);
        for seed in 0..5 {
            assert!(sigma_conjugation_check(&random(6, seed)).unwrap() <= 1e-12);
        }
        assert!(sigma_conjugation_check(&ComplexMatrix::identity(2)).is_err());
    }
}
