//! Antisymmetric Fock space over `R^d`, field operators, the vacuum trace
//! and the Wick formula.
//!
//! Basis states are subsets of `{0, .., d-1}` stored as bitmasks, in
//! increasing bitmask order; the vacuum is the empty set at index 0. The
//! creation operator `l_i` sends `|S>` to `(-1)^{#{j in S : j < i}} |S ∪ {i}>`,
//! which gives the canonical anticommutation relations.

use std::ops::{AddAssign, Mul};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ZERO};

pub const MAX_GENERATORS: usize = 14;
/// Largest Fock dimension for which dense matrices are produced.
pub const MAX_DENSE_DIM: usize = 1 << 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockSpace {
    d: usize,
}

/// `(-1)^{#{j in S : j < i}}`.
#[inline]
pub(crate) fn sign_below(state: usize, i: usize) -> f64 {
    if (state & ((1 << i) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `l_i |S>` as a signed basis state.
#[inline]
fn create_basis(i: usize, state: usize) -> Option<(usize, f64)> {
    (state & (1 << i) == 0).then(|| (state | (1 << i), sign_below(state, i)))
}

/// `l_i* |S>` as a signed basis state.
#[inline]
fn annihilate_basis(i: usize, state: usize) -> Option<(usize, f64)> {
    (state & (1 << i) != 0).then(|| (state & !(1 << i), sign_below(state, i)))
}

fn compose(
    outer: impl Fn(usize) -> Option<(usize, f64)>,
    inner: impl Fn(usize) -> Option<(usize, f64)>,
    state: usize,
) -> Option<(usize, f64)> {
    let (s1, a) = inner(state)?;
    let (s2, b) = outer(s1)?;
    Some((s2, a * b))
}

/// Sum of two signed basis states, as a map state -> coefficient.
fn add_terms(x: Option<(usize, f64)>, y: Option<(usize, f64)>) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (s, c) in x.into_iter().chain(y) {
        match out.iter_mut().find(|(t, _)| *t == s) {
            Some(entry) => entry.1 += c,
            None => out.push((s, c)),
        }
    }
    out.retain(|&(_, c)| c != 0.0);
    out
}

impl FockSpace {
    /// Builds the space and checks the anticommutation relations on every
    /// basis state.
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 || d > MAX_GENERATORS {
            return Err(Error::Resource(format!(
                "Fock space needs 1 <= d <= {MAX_GENERATORS}, got d = {d}"
            )));
        }
        let f = FockSpace { d };
        f.verify_car()?;
        Ok(f)
    }

    fn verify_car(&self) -> Result<()> {
        for s in 0..self.dim() {
            for i in 0..self.d {
                if annihilate_basis(i, 0).is_some() {
                    return Err(Error::Accuracy("l_i* does not kill the vacuum".into()));
                }
                for j in 0..self.d {
                    let ll = add_terms(
                        compose(|t| create_basis(i, t), |t| create_basis(j, t), s),
                        compose(|t| create_basis(j, t), |t| create_basis(i, t), s),
                    );
                    let la = add_terms(
                        compose(|t| annihilate_basis(i, t), |t| create_basis(j, t), s),
                        compose(|t| create_basis(j, t), |t| annihilate_basis(i, t), s),
                    );
                    let expect_la: Vec<(usize, f64)> = if i == j { vec![(s, 1.0)] } else { vec![] };
                    if !ll.is_empty() || la != expect_la {
                        return Err(Error::Accuracy(format!(
                            "anticommutation relations fail for (i, j) = ({i}, {j}) on state {s:#b}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        1 << self.d
    }

    /// Index of the vacuum state.
    pub fn vacuum(&self) -> usize {
        0
    }

    /// The basis vector `Ω`.
    pub fn vacuum_vector(&self) -> Vec<C64> {
        let mut v = vec![ZERO; self.dim()];
        v[0] = C64::new(1.0, 0.0);
        v
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.d {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.d,
                found: i,
            })
        }
    }

    fn check_dense(&self) -> Result<()> {
        if self.dim() > MAX_DENSE_DIM {
            Err(Error::Resource(format!(
                "dense Fock matrices limited to dimension {MAX_DENSE_DIM}"
            )))
        } else {
            Ok(())
        }
    }

    /// Dense matrix of `l_i`.
    pub fn creation_matrix(&self, i: usize) -> Result<ComplexMatrix> {
        self.check_index(i)?;
        self.check_dense()?;
        let mut m = ComplexMatrix::zeros(self.dim(), self.dim());
        for s in 0..self.dim() {
            if let Some((t, c)) = create_basis(i, s) {
                m[(t, s)] = C64::new(c, 0.0);
            }
        }
        Ok(m)
    }

    /// `y = ω(v) x` with `ω(v) = sum_i v_i (l_i + l_i*)`.
    pub fn field_apply<T>(&self, v: &[f64], x: &[T]) -> Vec<T>
    where
        T: Copy + Default + AddAssign + Mul<f64, Output = T>,
    {
        let mut y = vec![T::default(); x.len()];
        for (s, &xs) in x.iter().enumerate() {
            for (i, &vi) in v.iter().enumerate() {
                if vi != 0.0 {
                    y[s ^ (1 << i)] += xs * (sign_below(s, i) * vi);
                }
            }
        }
        y
    }

    /// `y = l(v) x` with `l(v) = sum_i v_i l_i`.
    pub fn creation_apply<T>(&self, v: &[f64], x: &[T]) -> Vec<T>
    where
        T: Copy + Default + AddAssign + Mul<f64, Output = T>,
    {
        let mut y = vec![T::default(); x.len()];
        for (s, &xs) in x.iter().enumerate() {
            for (i, &vi) in v.iter().enumerate() {
                if vi != 0.0 && s & (1 << i) == 0 {
                    y[s | (1 << i)] += xs * (sign_below(s, i) * vi);
                }
            }
        }
        y
    }
}

/// `build_fock(d)`: the Fock space over `R^d` with verified relations.
pub fn build_fock(d: usize) -> Result<FockSpace> {
    FockSpace::new(d)
}

/// `ω(v) = l(v) + l(v)*`, self-adjoint, with `ω(v)² = |v|² Id`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldOperator {
    pub v: Vec<f64>,
}

impl FieldOperator {
    pub fn apply(&self, f: &FockSpace, x: &[C64]) -> Vec<C64> {
        f.field_apply(&self.v, x)
    }

    /// Real dense matrix of `ω(v)`.
    pub fn real_matrix(&self, f: &FockSpace) -> Result<DMatrix<f64>> {
        f.check_dense()?;
        let n = f.dim();
        let mut m = DMatrix::zeros(n, n);
        for s in 0..n {
            for (i, &vi) in self.v.iter().enumerate() {
                if vi != 0.0 {
                    m[(s ^ (1 << i), s)] += sign_below(s, i) * vi;
                }
            }
        }
        Ok(m)
    }

    pub fn matrix(&self, f: &FockSpace) -> Result<ComplexMatrix> {
        Ok(ComplexMatrix::from_real(&self.real_matrix(f)?))
    }
}

pub fn omega(f: &FockSpace, v: &[f64]) -> Result<FieldOperator> {
    if v.len() != f.d() {
        return Err(Error::DimensionMismatch {
            expected: f.d(),
            found: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite field vector".into()));
    }
    Ok(FieldOperator { v: v.to_vec() })
}

/// `τ(X) = <Ω, X Ω>`, the `(Ω, Ω)` entry.
pub fn vacuum_trace(f: &FockSpace, x: &ComplexMatrix) -> Result<C64> {
    if x.shape() != (f.dim(), f.dim()) {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: x.rows(),
        });
    }
    Ok(x[(0, 0)])
}

// ── Pair partitions ────────────────────────────────────────────────────

pub const MAX_PAIR_POINTS: usize = 16;

/// A pairing of `{1, .., 2k}` into `k` ordered pairs `(i, j)`, `i < j`,
/// listed by increasing first element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairPartition {
    pub pairs: Vec<(u8, u8)>,
    pub crossings: usize,
}

/// Number of pairs `(i, j), (k, l)` with `i < k < j < l`.
pub fn crossing_number(pairs: &[(u8, u8)]) -> usize {
    let mut c = 0;
    for &(i, j) in pairs {
        for &(k, l) in pairs {
            if i < k && k < j && j < l {
                c += 1;
            }
        }
    }
    c
}

fn check_points(points: usize) -> Result<()> {
    if points > MAX_PAIR_POINTS {
        Err(Error::Resource(format!(
            "pair partitions limited to {MAX_PAIR_POINTS} points, got {points}"
        )))
    } else {
        Ok(())
    }
}

/// Calls `visit` on every pairing of `{1, .., 2k}` in lexicographic order.
pub fn for_each_pair_partition(k: usize, mut visit: impl FnMut(&[(u8, u8)])) -> Result<()> {
    check_points(2 * k)?;
    fn rec(free: &mut Vec<u8>, pairs: &mut Vec<(u8, u8)>, visit: &mut dyn FnMut(&[(u8, u8)])) {
        if free.is_empty() {
            visit(pairs);
            return;
        }
        let a = free.remove(0);
        for idx in 0..free.len() {
            let b = free.remove(idx);
            pairs.push((a, b));
            rec(free, pairs, visit);
            pairs.pop();
            free.insert(idx, b);
        }
        free.insert(0, a);
    }
    let mut free: Vec<u8> = (1..=2 * k as u8).collect();
    let mut pairs = Vec::with_capacity(k);
    rec(&mut free, &mut pairs, &mut visit);
    Ok(())
}

/// All `(2k-1)!!` pairings of `{1, .., 2k}` with their crossing numbers.
pub fn enumerate_pair_partitions(k: usize) -> Result<Vec<PairPartition>> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let mut out = Vec::new();
    for_each_pair_partition(k, |pairs| {
        out.push(PairPartition {
            pairs: pairs.to_vec(),
            crossings: crossing_number(pairs),
        })
    })?;
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `τ(ω(f_1) ... ω(f_2k)) = sum_V (-1)^{c(V)} prod_{(i,j) in V} <f_i, f_j>`;
/// odd counts give 0.
pub fn wick_trace(vectors: &[Vec<f64>]) -> Result<f64> {
    let n = vectors.len();
    if let Some(d) = vectors.first().map(Vec::len) {
        if let Some(bad) = vectors.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.len(),
            });
        }
    }
    if n % 2 == 1 {
        return Ok(0.0);
    }
    if n == 0 {
        return Ok(1.0);
    }
    check_points(n)?;
    let gram: Vec<Vec<f64>> = vectors
        .iter()
        .map(|a| vectors.iter().map(|b| dot(a, b)).collect())
        .collect();
    let mut total = 0.0;
    for_each_pair_partition(n / 2, |pairs| {
        let prod: f64 = pairs
            .iter()
            .map(|&(i, j)| gram[i as usize - 1][j as usize - 1])
            .product();
        if crossing_number(pairs) % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    })?;
    Ok(total)
}

/// `<Ω, ω(f_1) ... ω(f_n) Ω>` by applying the field operators to the vacuum.
/// Vectors shorter than `d` are padded with zeros.
pub fn vacuum_moment(f: &FockSpace, vectors: &[Vec<f64>]) -> Result<f64> {
    let mut state = vec![0.0f64; f.dim()];
    state[0] = 1.0;
    for v in vectors.iter().rev() {
        if v.len() > f.d() {
            return Err(Error::DimensionMismatch {
                expected: f.d(),
                found: v.len(),
            });
        }
        state = f.field_apply(v, &state);
    }
    Ok(state[0])
}

/// `|wick_trace - vacuum_moment|`.
pub fn wick_vs_matrix_check(f: &FockSpace, vectors: &[Vec<f64>]) -> Result<f64> {
    let matrix_route = vacuum_moment(f, vectors)?;
    Ok((wick_trace(vectors)? - matrix_route).abs())
}

// ── q-deformed inner products ──────────────────────────────────────────

pub const MAX_Q_TENSOR: usize = 8;

fn check_q(q: f64) -> Result<()> {
    if (-1.0..1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::Rejected(format!("q must lie in [-1, 1), got {q}")))
    }
}

fn inner(h: &[C64], k: &[C64]) -> C64 {
    h.iter().zip(k).map(|(a, b)| a.conj() * b).sum()
}

/// `<h_1 ⊗ .. ⊗ h_n, k_1 ⊗ .. ⊗ k_n>_q = sum_σ q^{inv(σ)} prod_i <h_i, k_σ(i)>`.
pub fn q_inner(h: &[Vec<C64>], k: &[Vec<C64>], q: f64) -> Result<C64> {
    check_q(q)?;
    let n = h.len();
    if k.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: k.len(),
        });
    }
    if n > MAX_Q_TENSOR {
        return Err(Error::Resource(format!("tensor length {n} exceeds {MAX_Q_TENSOR}")));
    }
    let g: Vec<Vec<C64>> = h.iter().map(|a| k.iter().map(|b| inner(a, b)).collect()).collect();
    // Build σ position by position; choosing the r-th smallest unused value
    // adds r inversions.
    fn rec(g: &[Vec<C64>], q: f64, i: usize, used: &mut Vec<bool>, inv: i32, acc: C64) -> C64 {
        if i == g.len() {
            return acc * q.powi(inv);
        }
        let mut total = ZERO;
        let mut smaller_unused = 0;
        for j in 0..g.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            total += rec(g, q, i + 1, used, inv + smaller_unused, acc * g[i][j]);
            used[j] = false;
            smaller_unused += 1;
        }
        total
    }
    Ok(rec(&g, q, 0, &mut vec![false; n], 0, C64::new(1.0, 0.0)))
}

/// Gram matrix of a family of simple tensors under `<., .>_q`.
pub fn q_gram(family: &[Vec<Vec<C64>>], q: f64) -> Result<ComplexMatrix> {
    check_q(q)?;
    let n = family.len();
    let mut g = ComplexMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            g[(a, b)] = q_inner(&family[a], &family[b], q)?;
        }
    }
    Ok(g)
}

// ── Second quantization ────────────────────────────────────────────────

/// `Λ(O)` for an orthogonal `d×d` matrix `O`: the unitary with
/// `Λ(O) l(v) Λ(O)* = l(O v)` and `Λ(O) Ω = Ω`, built column by column from
/// `|S> = l_{s_1} ... l_{s_k} Ω` with `s_1 < .. < s_k`.
pub fn second_quantize(f: &FockSpace, o: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = f.d();
    if o.shape() != (d, d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: o.nrows(),
        });
    }
    let defect = (o.transpose() * o - DMatrix::<f64>::identity(d, d)).abs().max();
    if defect > 1e-10 {
        return Err(Error::Precondition(format!("matrix is not orthogonal (defect {defect:.2e})")));
    }
    f.check_dense()?;
    let n = f.dim();
    let mut lam = DMatrix::<f64>::zeros(n, n);
    lam[(0, 0)] = 1.0;
    for s in 1..n {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        let col: Vec<f64> = lam.column(rest).iter().copied().collect();
        let v: Vec<f64> = o.column(low).iter().copied().collect();
        let new = f.creation_apply(&v, &col);
        lam.set_column(s, &nalgebra::DVector::from_vec(new));
    }
    Ok(lam)
}
