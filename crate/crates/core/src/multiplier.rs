//! Schur multipliers on `M_n`, Fourier multipliers on finite groups, Gram
//! factorizations and the Herz–Schur transfer.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{is_psd, ComplexMatrix, C64, ONE, PSD_TOL, ZERO};
use crate::pnorm::{BlockMap, BlockVector};

const UNITAL_TOL: f64 = 1e-12;
/// Eigenvalues below this fraction of the largest one span the kernel.
pub const RANK_CUTOFF: f64 = 1e-10;

fn real_part_checked(a: &ComplexMatrix) -> Result<DMatrix<f64>> {
    if !a.is_real(1e-12) {
        return Err(Error::InvalidInput("Schur symbols must be real".into()));
    }
    Ok(a.real_part())
}

/// `M_A(B) = [a_ij b_ij]`.
pub fn schur_apply(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.hadamard(b)
}

/// A real symbol `A` with its certification flags.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchurMultiplier {
    pub a: ComplexMatrix,
    pub unital: bool,
    pub cp: bool,
    pub selfadjoint: bool,
}

impl SchurMultiplier {
    pub fn new(a: ComplexMatrix) -> Result<Self> {
        a.check_square()?;
        let cert = certify(&a)?;
        Ok(SchurMultiplier {
            a,
            unital: cert.unital,
            cp: cert.cp,
            selfadjoint: cert.selfadjoint,
        })
    }

    pub fn from_real(a: &DMatrix<f64>) -> Result<Self> {
        Self::new(ComplexMatrix::from_real(a))
    }

    pub fn size(&self) -> usize {
        self.a.rows()
    }

    pub fn apply(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        schur_apply(&self.a, b)
    }

    /// `(M_A)^k(B) = [a_ij^k b_ij]`.
    pub fn apply_power(&self, k: u32, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let ak = ComplexMatrix::from_fn(self.size(), self.size(), |i, j| self.a[(i, j)].powu(k));
        schur_apply(&ak, b)
    }

    pub fn real_symbol(&self) -> DMatrix<f64> {
        self.a.real_part()
    }
}

/// Vectors `e_i` in `R^r` with `<e_i, e_j> = a_ij`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GramFactorization {
    pub vectors: Vec<Vec<f64>>,
    pub rank: usize,
    /// `max |<e_i, e_j> - a_ij|`.
    pub residual: f64,
}

impl GramFactorization {
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.vectors.len();
        DMatrix::from_fn(n, n, |i, j| {
            self.vectors[i].iter().zip(&self.vectors[j]).map(|(x, y)| x * y).sum()
        })
    }
}

/// Eigendecomposition-based factor of a real PSD matrix. Eigenvalues below
/// `1e-10 λ_max` are treated as kernel, so `r` is the numerical rank.
pub fn gram_factorize(a: &ComplexMatrix, tol: f64) -> Result<GramFactorization> {
    a.check_square()?;
    let real = real_part_checked(a)?;
    if !is_psd(a, tol)? {
        return Err(Error::Certification("matrix is not positive semidefinite".into()));
    }
    gram_factorize_real(&real)
}

pub(crate) fn gram_factorize_real(a: &DMatrix<f64>) -> Result<GramFactorization> {
    let n = a.nrows();
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, 1e-15, 10_000)
        .ok_or_else(|| Error::Accuracy("symmetric eigensolver did not converge".into()))?;
    let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let mut kept: Vec<usize> = (0..n)
        .filter(|&k| lmax > 0.0 && eig.eigenvalues[k] > RANK_CUTOFF * lmax)
        .collect();
    kept.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let vectors: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            kept.iter()
                .map(|&k| eig.eigenvectors[(i, k)] * eig.eigenvalues[k].sqrt())
                .collect()
        })
        .collect();
    let mut f = GramFactorization {
        rank: kept.len(),
        vectors,
        residual: 0.0,
    };
    f.residual = (f.gram() - a).abs().max();
    Ok(f)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub unital: bool,
    pub cp: bool,
    pub selfadjoint: bool,
    /// For unital CP symbols, unit vectors `e_i` with `a_ij = <e_i, e_j>`.
    pub contractive_witness: Option<GramFactorization>,
}

/// Unital: unit diagonal. CP: `A` positive semidefinite. Self-adjoint: `A`
/// symmetric.
pub fn certify(a: &ComplexMatrix) -> Result<Certificate> {
    a.check_square()?;
    let real = real_part_checked(a)?;
    let n = real.nrows();
    let unital = (0..n).all(|i| (real[(i, i)] - 1.0).abs() <= UNITAL_TOL);
    let selfadjoint = (&real - real.transpose()).abs().max() <= UNITAL_TOL * real.abs().max().max(1.0);
    let cp = is_psd(a, PSD_TOL)?;
    let contractive_witness = if unital && cp {
        Some(gram_factorize_real(&real)?)
    } else {
        None
    };
    Ok(Certificate {
        unital,
        cp,
        selfadjoint,
        contractive_witness,
    })
}

fn real_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The `2n×2n` symbol `[[<h_i,h_j>, <h_i,k_j>], [<k_i,h_j>, <k_i,k_j>]]`.
/// It is unital and CP, and its upper-right block is the contractive symbol
/// `a_ij = <h_i, k_j>`.
pub fn embed_two_by_two(h: &[Vec<f64>], k: &[Vec<f64>]) -> Result<SchurMultiplier> {
    let n = h.len();
    if k.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: k.len(),
        });
    }
    let dim = h.first().map_or(0, Vec::len);
    for v in h.iter().chain(k) {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        let norm = real_dot(v, v).sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Precondition(format!("vector of norm {norm} is not a unit vector")));
        }
    }
    let all: Vec<&Vec<f64>> = h.iter().chain(k).collect();
    let f = DMatrix::from_fn(2 * n, 2 * n, |i, j| real_dot(all[i], all[j]));
    SchurMultiplier::from_real(&f)
}

/// `M_A` acting on a single `n×n` block, for the p-norm engine.
#[derive(Clone, Debug)]
pub struct SchurMap {
    a: DMatrix<C64>,
}

impl SchurMap {
    pub fn new(m: &SchurMultiplier) -> Self {
        SchurMap {
            a: m.a.as_dmatrix().clone(),
        }
    }
}

impl BlockMap for SchurMap {
    fn input_blocks(&self) -> usize {
        1
    }
    fn output_blocks(&self) -> usize {
        1
    }
    fn block_dim(&self) -> usize {
        self.a.nrows()
    }
    fn apply(&self, x: &BlockVector) -> BlockVector {
        BlockVector::from_dmatrices(self.a.nrows(), vec![self.a.component_mul(&x.raw_blocks()[0])])
    }
    fn apply_adjoint(&self, y: &BlockVector) -> BlockVector {
        let conj = self.a.map(|z| z.conj());
        BlockVector::from_dmatrices(self.a.nrows(), vec![conj.component_mul(&y.raw_blocks()[0])])
    }
}

// ── Finite groups ──────────────────────────────────────────────────────

/// A finite group on `0..N` with `0` the identity.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(try_from = "GroupSpec")]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

/// JSON group description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    Cyclic { n: usize },
    Dihedral { n: usize },
    Table { table: Vec<Vec<usize>> },
}

impl TryFrom<GroupSpec> for FiniteGroup {
    type Error = Error;
    fn try_from(spec: GroupSpec) -> Result<Self> {
        make_group(&spec)
    }
}

pub fn make_group(spec: &GroupSpec) -> Result<FiniteGroup> {
    match spec {
        GroupSpec::Cyclic { n } => FiniteGroup::cyclic(*n),
        GroupSpec::Dihedral { n } => FiniteGroup::dihedral(*n),
        GroupSpec::Table { table } => FiniteGroup::from_table(table.clone()),
    }
}

impl FiniteGroup {
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("group order must be positive".into()));
        }
        Self::from_table((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect())
    }

    /// Symmetries of the regular `n`-gon: `r^a s^b` has index `a + n b`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("dihedral parameter must be positive".into()));
        }
        let mul = |x: usize, y: usize| {
            let (a, b) = (x % n, x / n);
            let (c, d) = (y % n, y / n);
            let rot = if b == 0 { (a + c) % n } else { (a + n - c) % n };
            rot + n * ((b + d) % 2)
        };
        Self::from_table((0..2 * n).map(|x| (0..2 * n).map(|y| mul(x, y)).collect()).collect())
    }

    /// Checks closure, identity `0`, inverses and associativity.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        let bad = |msg: &str| Err(Error::InvalidInput(format!("group axioms: {msg}")));
        if n == 0 || table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return bad("table must be square with entries in 0..N");
        }
        if (0..n).any(|g| table[0][g] != g || table[g][0] != g) {
            return bad("element 0 must be the identity");
        }
        let mut inverse = vec![0; n];
        for g in 0..n {
            match (0..n).find(|&h| table[g][h] == 0 && table[h][g] == 0) {
                Some(h) => inverse[g] = h,
                None => return bad("missing inverse"),
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad("not associative");
                    }
                }
            }
        }
        Ok(FiniteGroup { table, inverse })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn spec(&self) -> GroupSpec {
        GroupSpec::Table {
            table: self.table.clone(),
        }
    }
}

impl Serialize for FiniteGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.spec().serialize(s)
    }
}

/// Left regular representation: `λ(g) ε_h = ε_{gh}`.
pub fn regular_rep(g: &FiniteGroup, x: usize) -> ComplexMatrix {
    let n = g.order();
    ComplexMatrix::from_fn(n, n, |r, h| if g.mul(x, h) == r { ONE } else { ZERO })
}

/// `τ(y) = <δ_e, y δ_e>` on the group von Neumann algebra.
pub fn group_trace(y: &ComplexMatrix) -> C64 {
    y[(0, 0)]
}

/// Element `sum_g x_g λ(g)` as an `N×N` matrix.
pub fn group_element(g: &FiniteGroup, coeffs: &[C64]) -> Result<ComplexMatrix> {
    if coeffs.len() != g.order() {
        return Err(Error::DimensionMismatch {
            expected: g.order(),
            found: coeffs.len(),
        });
    }
    let n = g.order();
    Ok(ComplexMatrix::from_fn(n, n, |r, h| coeffs[g.mul(r, g.inv(h))]))
}

/// Coefficients of a group-algebra matrix: its first column.
pub fn group_coefficients(y: &ComplexMatrix) -> Vec<C64> {
    (0..y.rows()).map(|r| y[(r, 0)]).collect()
}

fn check_symbol(g: &FiniteGroup, t: &[f64]) -> Result<()> {
    if t.len() != g.order() {
        return Err(Error::DimensionMismatch {
            expected: g.order(),
            found: t.len(),
        });
    }
    Ok(())
}

/// `M_t(sum x_g λ(g)) = sum t_g x_g λ(g)`.
pub fn fourier_apply(g: &FiniteGroup, t: &[f64], x: &[C64]) -> Result<Vec<C64>> {
    check_symbol(g, t)?;
    if x.len() != g.order() {
        return Err(Error::DimensionMismatch {
            expected: g.order(),
            found: x.len(),
        });
    }
    Ok(x.iter().zip(t).map(|(&z, &s)| z * s).collect())
}

/// The Schur symbol `a_{g,h} = t_{g h^{-1}}`.
pub fn herz_schur_transfer(g: &FiniteGroup, t: &[f64]) -> Result<SchurMultiplier> {
    check_symbol(g, t)?;
    let n = g.order();
    let a = DMatrix::from_fn(n, n, |x, y| t[g.mul(x, g.inv(y))]);
    SchurMultiplier::from_real(&a)
}

/// `[t_{g^{-1} h}]`, whose positivity makes `M_t` completely positive.
pub fn positive_definiteness_matrix(g: &FiniteGroup, t: &[f64]) -> Result<DMatrix<f64>> {
    check_symbol(g, t)?;
    let n = g.order();
    Ok(DMatrix::from_fn(n, n, |x, y| t[g.mul(g.inv(x), y)]))
}

/// A real symbol on a finite group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierSymbol {
    pub t: Vec<f64>,
}

impl FourierSymbol {
    /// `t_e = 1` and `[t_{g^{-1} h}]` positive semidefinite.
    pub fn is_unital_positive_definite(&self, g: &FiniteGroup) -> Result<bool> {
        let m = positive_definiteness_matrix(g, &self.t)?;
        let unital = (self.t[g.identity()] - 1.0).abs() <= UNITAL_TOL;
        Ok(unital && is_psd(&ComplexMatrix::from_real(&m), PSD_TOL)?)
    }
}
