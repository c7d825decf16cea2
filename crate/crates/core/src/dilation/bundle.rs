//! Finite dilation triples `(J, U, E)` for unital completely positive Schur
//! multipliers and for positive-definite Fourier symbols on finite groups.
//!
//! The ambient space is `C^n ⊗ C^F` with `F` the dimension of the fermionic
//! part. `J(x) = x ⊗ I`, `U(Y) = V Y V*` with `V` a sparse unitary (a
//! symmetry composed with a cyclic window shift), and `E` reads vacuum
//! matrix elements. Only `K` window positions are kept; the shift moves the
//! last one back to position 0, which agrees with the infinite shift on
//! everything `U^k J` produces for `k <= K`.
//!
//! `E(U^k(J(x)))` is computed without forming `D×D` matrices: each entry is
//! `<V*^k ξ_a, J(x) V*^k ξ_b>` for vacuum vectors `ξ`.

use nalgebra_sparse::{CooMatrix, CsrMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::sign_below;
use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::multiplier::{
    certify, gram_factorize_real, group_coefficients, group_element, positive_definiteness_matrix,
    FiniteGroup, FourierSymbol, SchurMultiplier,
};

/// Largest ambient dimension a bundle may have.
pub const MAX_AMBIENT_DIM: usize = 1 << 14;
/// Largest ambient dimension for the dense `J`, `U`, `E` matrices.
pub const DENSE_LIMIT: usize = 1 << 12;
const LAW_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const CHECK_SEED: u64 = 0x5eed;

/// The map being dilated.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MultiplierMap {
    Schur { symbol: SchurMultiplier },
    Fourier { group: FiniteGroup, symbol: Vec<f64> },
}

impl MultiplierMap {
    /// Size of the input matrices.
    pub fn input_dim(&self) -> usize {
        match self {
            MultiplierMap::Schur { symbol } => symbol.size(),
            MultiplierMap::Fourier { group, .. } => group.order(),
        }
    }

    pub fn apply_power(&self, k: u32, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        match self {
            MultiplierMap::Schur { symbol } => symbol.apply_power(k, x),
            MultiplierMap::Fourier { group, symbol } => {
                let c = group_coefficients(x);
                let back = group_element(group, &c)?;
                if back.distance(x)? > 1e-12 * x.max_abs().max(1.0) {
                    return Err(Error::InvalidInput(
                        "Fourier multipliers act on the group algebra only".into(),
                    ));
                }
                let scaled: Vec<C64> = c.iter().zip(symbol).map(|(&z, &s)| z * s.powi(k as i32)).collect();
                group_element(group, &scaled)
            }
        }
    }

    /// Matrix units `e_ij` for Schur multipliers, `λ(g)` for Fourier ones.
    pub fn test_set(&self) -> Vec<ComplexMatrix> {
        match self {
            MultiplierMap::Schur { symbol } => {
                let n = symbol.size();
                (0..n * n)
                    .map(|idx| {
                        let mut e = ComplexMatrix::zeros(n, n);
                        e[(idx / n, idx % n)] = ONE;
                        e
                    })
                    .collect()
            }
            MultiplierMap::Fourier { group, .. } => {
                (0..group.order()).map(|g| crate::multiplier::regular_rep(group, g)).collect()
            }
        }
    }
}

/// Residuals of the algebraic laws, measured when the bundle is built.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BundleInvariants {
    /// Freivalds-style test of `J(xy) = J(x)J(y)`, `J(x*) = J(x)*`, `J(1) = 1`.
    pub homomorphism: f64,
    /// `max |V*V - I|`.
    pub unitarity: f64,
    /// `max |d² - I|` for the symmetry factor of `V`.
    pub symmetry: f64,
    /// `max |E(J(x)) - x|` over the test set.
    pub conditional_expectation: f64,
    /// `max |E(I) - I|`.
    pub unital_expectation: f64,
    /// `|tr U(X) - tr X|` on random rank-one `X`.
    pub trace_preservation: f64,
    /// `|tr E(Y) - (n/D) tr Y|` for `Y = U^k J(x)`, `k <= K`.
    pub trace_compatibility: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BundleSummary {
    pub kind: String,
    pub input_dim: usize,
    pub ambient_dim: usize,
    pub fiber_dim: usize,
    pub window: usize,
    pub rank: usize,
    pub invariants: BundleInvariants,
}

#[derive(Clone, Debug)]
pub struct DilationBundle {
    map: MultiplierMap,
    window: usize,
    rank: usize,
    fiber: usize,
    symmetry: CsrMatrix<C64>,
    shift: CsrMatrix<C64>,
    v: CsrMatrix<C64>,
    v_adj: CsrMatrix<C64>,
    invariants: BundleInvariants,
}

fn sparse_apply(m: &CsrMatrix<C64>, x: &[C64]) -> Vec<C64> {
    m.row_iter()
        .map(|row| row.col_indices().iter().zip(row.values()).map(|(&j, &v)| v * x[j]).sum())
        .collect()
}

fn sparse_adjoint(m: &CsrMatrix<C64>) -> CsrMatrix<C64> {
    let mut t = m.transpose();
    t.values_mut().iter_mut().for_each(|z| *z = z.conj());
    t
}

/// `max |M - I|` over all entries.
fn identity_defect(m: &CsrMatrix<C64>) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, row) in m.row_iter().enumerate() {
        let mut diag_seen = false;
        for (&j, &v) in row.col_indices().iter().zip(row.values()) {
            let target = if i == j {
                diag_seen = true;
                ONE
            } else {
                ZERO
            };
            worst = worst.max((v - target).norm());
        }
        if !diag_seen {
            worst = worst.max(1.0);
        }
    }
    worst
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn random_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..len)
        .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / s).collect()
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

fn check_window(window: usize) -> Result<()> {
    if window == 0 {
        Err(Error::InvalidInput("the window must hold at least one position".into()))
    } else {
        Ok(())
    }
}

fn check_resources(n: usize, modes: usize) -> Result<usize> {
    let fits = modes < usize::BITS as usize - 1 && n.checked_mul(1 << modes).is_some_and(|d| d <= MAX_AMBIENT_DIM);
    if !fits {
        return Err(Error::Resource(format!(
            "ambient dimension {n}·2^{modes} exceeds the cap {MAX_AMBIENT_DIM}"
        )));
    }
    Ok(1 << modes)
}

impl DilationBundle {
    fn assemble(
        map: MultiplierMap,
        window: usize,
        rank: usize,
        fiber: usize,
        symmetry: CsrMatrix<C64>,
        shift: CsrMatrix<C64>,
    ) -> Result<Self> {
        let v = &symmetry * &shift;
        let v_adj = sparse_adjoint(&v);
        let mut b = DilationBundle {
            map,
            window,
            rank,
            fiber,
            symmetry,
            shift,
            v,
            v_adj,
            invariants: BundleInvariants::default(),
        };
        b.invariants = b.measure_invariants()?;
        b.enforce()?;
        Ok(b)
    }

    pub fn map(&self) -> &MultiplierMap {
        &self.map
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn input_dim(&self) -> usize {
        self.map.input_dim()
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber
    }

    pub fn ambient_dim(&self) -> usize {
        self.input_dim() * self.fiber
    }

    /// Rank of the Gram factor, i.e. the number of fermionic modes per
    /// window position.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn invariants(&self) -> &BundleInvariants {
        &self.invariants
    }

    pub fn summary(&self) -> BundleSummary {
        BundleSummary {
            kind: match self.map {
                MultiplierMap::Schur { .. } => "schur".into(),
                MultiplierMap::Fourier { .. } => "fourier".into(),
            },
            input_dim: self.input_dim(),
            ambient_dim: self.ambient_dim(),
            fiber_dim: self.fiber,
            window: self.window,
            rank: self.rank,
            invariants: self.invariants.clone(),
        }
    }

    /// `(x ⊗ I) v`.
    fn embed_apply(&self, x: &ComplexMatrix, v: &[C64]) -> Vec<C64> {
        let (n, f) = (self.input_dim(), self.fiber);
        let mut y = vec![ZERO; n * f];
        for r in 0..n {
            for h in 0..n {
                let c = x[(r, h)];
                if c == ZERO {
                    continue;
                }
                let (dst, src) = (&mut y[r * f..(r + 1) * f], &v[h * f..(h + 1) * f]);
                for (a, &b) in dst.iter_mut().zip(src) {
                    *a += c * b;
                }
            }
        }
        y
    }

    fn vacuum(&self, a: usize) -> Vec<C64> {
        let mut v = vec![ZERO; self.ambient_dim()];
        v[a * self.fiber] = ONE;
        v
    }

    fn pull_back(&self, k: usize, mut v: Vec<C64>) -> Vec<C64> {
        for _ in 0..k {
            v = sparse_apply(&self.v_adj, &v);
        }
        v
    }

    fn check_input(&self, x: &ComplexMatrix) -> Result<()> {
        let n = self.input_dim();
        if x.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.rows(),
            });
        }
        Ok(())
    }

    /// `E(U^k(J(x)))`, valid for `k <= K`.
    pub fn compressed_power(&self, k: usize, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if k > self.window {
            return Err(Error::Window {
                requested: k,
                window: self.window,
            });
        }
        self.check_input(x)?;
        let n = self.input_dim();
        let pulled: Vec<Vec<C64>> = (0..n).map(|a| self.pull_back(k, self.vacuum(a))).collect();
        match &self.map {
            MultiplierMap::Schur { .. } => {
                let images: Vec<Vec<C64>> = pulled.iter().map(|w| self.embed_apply(x, w)).collect();
                Ok(ComplexMatrix::from_fn(n, n, |i, j| inner(&pulled[i], &images[j])))
            }
            MultiplierMap::Fourier { group, .. } => {
                let e = &pulled[group.identity()];
                let c: Vec<C64> = (0..n)
                    .map(|g| inner(e, &self.embed_apply(x, &pulled[group.inv(g)])))
                    .collect();
                group_element(group, &c)
            }
        }
    }

    fn check_dense(&self) -> Result<()> {
        if self.ambient_dim() > DENSE_LIMIT {
            Err(Error::Resource(format!(
                "dense ambient matrices limited to dimension {DENSE_LIMIT}"
            )))
        } else {
            Ok(())
        }
    }

    /// `J(x) = x ⊗ I` as a dense matrix.
    pub fn embed(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dense()?;
        self.check_input(x)?;
        Ok(x.kron(&ComplexMatrix::identity(self.fiber)))
    }

    /// `U(Y) = V Y V*` on a dense ambient matrix.
    pub fn automorphism(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dense()?;
        let d = self.ambient_dim();
        if y.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: y.rows(),
            });
        }
        let vy = &self.v * y.as_dmatrix();
        let vyv = &self.v * &vy.adjoint();
        Ok(ComplexMatrix::from_dmatrix(vyv.adjoint()))
    }

    /// `E(Y)`: vacuum matrix elements, assembled into the input algebra.
    pub fn expectation(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.ambient_dim();
        if y.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: y.rows(),
            });
        }
        let (n, f) = (self.input_dim(), self.fiber);
        match &self.map {
            MultiplierMap::Schur { .. } => Ok(ComplexMatrix::from_fn(n, n, |i, j| y[(i * f, j * f)])),
            MultiplierMap::Fourier { group, .. } => {
                let e = group.identity();
                let c: Vec<C64> = (0..n).map(|g| y[(e * f, group.inv(g) * f)]).collect();
                group_element(group, &c)
            }
        }
    }

    /// The unitary `V` implementing `U`.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        self.check_dense()?;
        Ok(ComplexMatrix::from_dmatrix(nalgebra::DMatrix::from(&self.v)))
    }

    /// The symmetry factor of `V` (`d` or `ω(e_G ⊗ e_0)`).
    pub fn symmetry(&self) -> Result<ComplexMatrix> {
        self.check_dense()?;
        Ok(ComplexMatrix::from_dmatrix(nalgebra::DMatrix::from(&self.symmetry)))
    }

    /// The window shift factor of `V`.
    pub fn shift(&self) -> Result<ComplexMatrix> {
        self.check_dense()?;
        Ok(ComplexMatrix::from_dmatrix(nalgebra::DMatrix::from(&self.shift)))
    }

    fn random_input(&self, rng: &mut ChaCha8Rng) -> Result<ComplexMatrix> {
        let n = self.input_dim();
        match &self.map {
            MultiplierMap::Schur { .. } => Ok(random_matrix(rng, n)),
            MultiplierMap::Fourier { group, .. } => group_element(group, &random_vector(rng, n)),
        }
    }

    /// `tr(V^k J(x) V*^k)`, summing `<q_s, J(x) q_s>` over the sparse
    /// columns `q_s` of `V*^k`.
    fn ambient_trace(&self, vk: &CsrMatrix<C64>, x: &ComplexMatrix) -> C64 {
        let f = self.fiber;
        let mut total = ZERO;
        for row in vk.row_iter() {
            let q: Vec<(usize, C64)> = row
                .col_indices()
                .iter()
                .zip(row.values())
                .map(|(&t, &z)| (t, z.conj()))
                .collect();
            for &(a, za) in &q {
                for &(b, zb) in &q {
                    if a % f == b % f {
                        total += za.conj() * x[(a / f, b / f)] * zb;
                    }
                }
            }
        }
        total
    }

    fn measure_invariants(&self) -> Result<BundleInvariants> {
        let mut rng = ChaCha8Rng::seed_from_u64(CHECK_SEED);
        let n = self.input_dim();
        let d = self.ambient_dim();
        let mut inv = BundleInvariants {
            symmetry: identity_defect(&(&self.symmetry * &self.symmetry)),
            unitarity: identity_defect(&(&self.v_adj * &self.v)),
            ..Default::default()
        };

        let (x, y) = (self.random_input(&mut rng)?, self.random_input(&mut rng)?);
        let (u, w) = (random_vector(&mut rng, d), random_vector(&mut rng, d));
        let xy = &x * &y;
        let lhs = self.embed_apply(&xy, &w);
        let rhs = self.embed_apply(&x, &self.embed_apply(&y, &w));
        let mut hom = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let star = inner(&u, &self.embed_apply(&x.adjoint(), &w)) - inner(&w, &self.embed_apply(&x, &u)).conj();
        hom = hom.max(star.norm());
        let one = self.embed_apply(&ComplexMatrix::identity(n), &w);
        hom = hom.max(one.iter().zip(&w).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
        inv.homomorphism = hom;

        let vu = sparse_apply(&self.v, &u);
        let vw = sparse_apply(&self.v, &w);
        inv.trace_preservation = (inner(&vw, &vu) - inner(&w, &u)).norm();

        for x in self.map.test_set() {
            let back = self.compressed_power(0, &x)?;
            inv.conditional_expectation = inv.conditional_expectation.max(back.distance(&x)?);
        }
        let id = ComplexMatrix::identity(n);
        inv.unital_expectation = self.compressed_power(0, &id)?.distance(&id)?;

        let x = self.random_input(&mut rng)?;
        let ratio = n as f64 / d as f64;
        let mut vk = CsrMatrix::identity(d);
        for k in 0..=self.window {
            if k > 0 {
                vk = &self.v * &vk;
            }
            let inside = self.compressed_power(k, &x)?.trace();
            let outside = self.ambient_trace(&vk, &x) * ratio;
            inv.trace_compatibility = inv.trace_compatibility.max((inside - outside).norm());
        }
        Ok(inv)
    }

    fn enforce(&self) -> Result<()> {
        let i = &self.invariants;
        let laws = [
            ("J homomorphism", i.homomorphism, LAW_TOL),
            ("V unitary", i.unitarity, LAW_TOL),
            ("symmetry squares to one", i.symmetry, LAW_TOL),
            ("E∘J = Id", i.conditional_expectation, LAW_TOL),
            ("E unital", i.unital_expectation, LAW_TOL),
            ("U trace preserving", i.trace_preservation, TRACE_TOL),
            ("E trace compatible", i.trace_compatibility, TRACE_TOL),
        ];
        for (name, value, tol) in laws {
            if !(value <= tol) {
                return Err(Error::Accuracy(format!("{name}: defect {value:.3e} above {tol:.0e}")));
            }
        }
        Ok(())
    }
}

/// Dilation of a unital completely positive real Schur multiplier.
///
/// With `A = [<e_i, e_j>]`, `e_i` in `R^r`, the ambient algebra is
/// `M_n ⊗ B(F)^{⊗K}`, `F` the Fock space over `R^r`, leg 0 most significant.
/// `d = sum e_ii ⊗ ω(e_i) ⊗ I` acts on leg 0 and the shift moves leg `l` to
/// `l + 1` cyclically.
pub fn dilate_schur(a: &ComplexMatrix, window: usize) -> Result<DilationBundle> {
    check_window(window)?;
    let cert = certify(a)?;
    if !cert.unital || !cert.cp {
        return Err(Error::Certification(format!(
            "Schur symbol must be unital and completely positive (unital: {}, cp: {})",
            cert.unital, cert.cp
        )));
    }
    let gram = cert
        .contractive_witness
        .ok_or_else(|| Error::Certification("no Gram factorization".into()))?;
    let n = a.rows();
    let r = gram.rank;
    let fiber = check_resources(n, r * window)?;
    let lead = r * (window - 1);
    let low_mask = (1usize << r) - 1;

    let mut shift = CooMatrix::new(n * fiber, n * fiber);
    let mut sym = CooMatrix::new(n * fiber, n * fiber);
    for i in 0..n {
        for s in 0..fiber {
            let moved = (s >> r) | ((s & low_mask) << lead);
            shift.push(i * fiber + moved, i * fiber + s, ONE);
            let s0 = s >> lead;
            for (bit, &c) in gram.vectors[i].iter().enumerate() {
                if c != 0.0 {
                    let target = s ^ (1 << (lead + bit));
                    sym.push(i * fiber + target, i * fiber + s, C64::new(sign_below(s0, bit) * c, 0.0));
                }
            }
        }
    }
    let symbol = SchurMultiplier::new(a.clone())?;
    DilationBundle::assemble(
        MultiplierMap::Schur { symbol },
        window,
        r,
        fiber,
        CsrMatrix::from(&sym),
        CsrMatrix::from(&shift),
    )
}

/// Image of a Fock basis state under the second quantization of the mode
/// permutation `m -> perm[m]`, as `(state, sign)`.
pub(crate) fn permute_modes(state: usize, perm: &[usize]) -> (usize, f64) {
    let images: Vec<usize> = (0..perm.len()).filter(|&m| state & (1 << m) != 0).map(|m| perm[m]).collect();
    let mut inversions = 0;
    for a in 0..images.len() {
        for b in a + 1..images.len() {
            if images[a] > images[b] {
                inversions += 1;
            }
        }
    }
    let target = images.iter().fold(0, |acc, &m| acc | (1 << m));
    (target, if inversions % 2 == 0 { 1.0 } else { -1.0 })
}

/// Dilation of a unital positive-definite Fourier multiplier on a finite
/// group.
///
/// With `t_{g^{-1}h} = <v_g, v_h>`, `v_g` in `R^r`, the ambient space is
/// `ℓ²_G ⊗ F`, `F` the Fock space over `R^r ⊗ R^K` (mode `pos·r + a`). The
/// fermionic algebra acts on the fibre over `h` twisted by `α_{h^{-1}}`, so
/// `ω(v_e ⊗ e_0)` becomes `ω(v_{h^{-1}} ⊗ e_0)` there, and `J(λ(g))` is left
/// translation.
pub fn dilate_fourier_finite(group: &FiniteGroup, t: &[f64], window: usize) -> Result<DilationBundle> {
    check_window(window)?;
    let symbol = FourierSymbol { t: t.to_vec() };
    if !symbol.is_unital_positive_definite(group)? {
        return Err(Error::Certification(
            "Fourier symbol must satisfy t_e = 1 and [t_{g^-1 h}] positive semidefinite".into(),
        ));
    }
    let gram = gram_factorize_real(&positive_definiteness_matrix(group, t)?)?;
    let n = group.order();
    let r = gram.rank;
    let modes = r * window;
    let fiber = check_resources(n, modes)?;
    let perm: Vec<usize> = (0..modes).map(|m| ((m / r + 1) % window) * r + m % r).collect();

    let mut shift = CooMatrix::new(n * fiber, n * fiber);
    let mut sym = CooMatrix::new(n * fiber, n * fiber);
    for h in 0..n {
        let u = &gram.vectors[group.inv(h)];
        for s in 0..fiber {
            let (moved, sign) = permute_modes(s, &perm);
            shift.push(h * fiber + moved, h * fiber + s, C64::new(sign, 0.0));
            for (bit, &c) in u.iter().enumerate() {
                if c != 0.0 {
                    sym.push(h * fiber + (s ^ (1 << bit)), h * fiber + s, C64::new(sign_below(s, bit) * c, 0.0));
                }
            }
        }
    }
    DilationBundle::assemble(
        MultiplierMap::Fourier {
            group: group.clone(),
            symbol: t.to_vec(),
        },
        window,
        r,
        fiber,
        CsrMatrix::from(&sym),
        CsrMatrix::from(&shift),
    )
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualReport {
    pub bundle: BundleSummary,
    pub k_max: usize,
    pub test_elements: usize,
    /// `max_x |M^k(x) - E(U^k(J(x)))|_F` for `k = 0..=k_max`.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Compares `M^k(x)` with `E(U^k(J(x)))` for `k <= k_max` over `tests`.
pub fn verify_dilation(
    bundle: &DilationBundle,
    map: &MultiplierMap,
    k_max: usize,
    tests: &[ComplexMatrix],
) -> Result<ResidualReport> {
    if k_max > bundle.window() {
        return Err(Error::Window {
            requested: k_max,
            window: bundle.window(),
        });
    }
    if map.input_dim() != bundle.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: bundle.input_dim(),
            found: map.input_dim(),
        });
    }
    let rows: Vec<Vec<f64>> = tests
        .par_iter()
        .map(|x| {
            (0..=k_max)
                .map(|k| {
                    let lhs = map.apply_power(k as u32, x)?;
                    let rhs = bundle.compressed_power(k, x)?;
                    lhs.distance(&rhs)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut residuals = vec![0.0f64; k_max + 1];
    for row in &rows {
        for (acc, &r) in residuals.iter_mut().zip(row) {
            *acc = acc.max(r);
        }
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(ResidualReport {
        bundle: bundle.summary(),
        k_max,
        test_elements: tests.len(),
        residuals,
        max_residual,
    })
}

impl DilationBundle {
    /// [`verify_dilation`] against the bundle's own map and test set.
    pub fn verify(&self, k_max: usize) -> Result<ResidualReport> {
        verify_dilation(self, &self.map, k_max, &self.map.test_set())
    }
}
