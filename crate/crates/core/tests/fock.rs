use matsaev_core::fock::{
    build_fock, crossing_number, enumerate_pair_partitions, omega, q_gram, q_inner, second_quantize,
    vacuum_moment, vacuum_trace, wick_trace, wick_vs_matrix_check, FockSpace, MAX_GENERATORS,
};
use matsaev_core::matrix::hermitian_eigenvalues;
use matsaev_core::{ComplexMatrix, Error, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_vectors(seed: u64, count: usize, d: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
        .collect()
}

fn unit(d: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[i] = 1.0;
    e
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn field(f: &FockSpace, v: &[f64]) -> ComplexMatrix {
    omega(f, v).unwrap().matrix(f).unwrap()
}

fn product(f: &FockSpace, vectors: &[Vec<f64>]) -> ComplexMatrix {
    vectors
        .iter()
        .fold(ComplexMatrix::identity(f.dim()), |acc, v| &acc * &field(f, v))
}

// Jordan-Wigner by Kronecker products: Z on the lower modes, `a` on mode i.
fn kron_creation(d: usize, i: usize) -> ComplexMatrix {
    let a = ComplexMatrix::from_real_row_major(2, 2, &[0.0, 0.0, 1.0, 0.0]).unwrap();
    let z = ComplexMatrix::real_diagonal(&[1.0, -1.0]);
    let id = ComplexMatrix::identity(2);
    let mut m = ComplexMatrix::identity(1);
    for mode in (0..d).rev() {
        let factor = match mode.cmp(&i) {
            std::cmp::Ordering::Greater => &id,
            std::cmp::Ordering::Equal => &a,
            std::cmp::Ordering::Less => &z,
        };
        m = m.kron(factor);
    }
    m
}

fn double_factorial(k: usize) -> usize {
    (1..=k).map(|j| 2 * j - 1).product()
}

// Crossings counted over unordered block pairs, each block as a set.
fn crossings_by_definition(pairs: &[(u8, u8)]) -> usize {
    let mut c = 0;
    for x in 0..pairs.len() {
        for y in x + 1..pairs.len() {
            let (a, b) = pairs[x];
            let (c0, d0) = pairs[y];
            let inside = |t: u8| a.min(b) < t && t < a.max(b);
            if inside(c0) != inside(d0) {
                c += 1;
            }
        }
    }
    c
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn inversions(s: &[usize]) -> i32 {
    let mut c = 0;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if s[i] > s[j] {
                c += 1;
            }
        }
    }
    c
}

fn cinner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn q_inner_by_permutations(h: &[Vec<C64>], k: &[Vec<C64>], q: f64) -> C64 {
    permutations(h.len())
        .iter()
        .map(|s| {
            let prod: C64 = (0..h.len()).map(|i| cinner(&h[i], &k[s[i]])).product();
            prod * q.powi(inversions(s))
        })
        .sum()
}

fn random_tensor(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<C64>> {
    (0..n)
        .map(|_| {
            (0..dim)
                .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect()
        })
        .collect()
}

#[test]
fn one_generator_matrix() {
    let f = build_fock(1).unwrap();
    assert_eq!(f.dim(), 2);
    let expect = ComplexMatrix::from_real_row_major(2, 2, &[0.0, 0.0, 1.0, 0.0]).unwrap();
    assert_eq!(f.creation_matrix(0).unwrap(), expect);
}

#[test]
fn build_range() {
    assert!(matches!(build_fock(0), Err(Error::Resource(_))));
    assert!(matches!(build_fock(MAX_GENERATORS + 1), Err(Error::Resource(_))));
    assert!(build_fock(MAX_GENERATORS).is_ok());
}

#[test]
fn creation_matches_kronecker_realization() {
    for d in 1..=4 {
        let f = build_fock(d).unwrap();
        for i in 0..d {
            assert_eq!(f.creation_matrix(i).unwrap(), kron_creation(d, i), "d={d} i={i}");
        }
    }
}

#[test]
fn car_relations_two_generators() {
    let f = build_fock(2).unwrap();
    assert_eq!(f.dim(), 4);
    let id = ComplexMatrix::identity(4);
    let zero = ComplexMatrix::zeros(4, 4);
    let l: Vec<ComplexMatrix> = (0..2).map(|i| f.creation_matrix(i).unwrap()).collect();
    for i in 0..2 {
        for j in 0..2 {
            let anti = &(&l[i] * &l[j]) + &(&l[j] * &l[i]);
            assert!(anti.distance(&zero).unwrap() < 1e-14);
            let mixed = &(&l[i].adjoint() * &l[j]) + &(&l[j] * &l[i].adjoint());
            let expect = if i == j { &id } else { &zero };
            assert!(mixed.distance(expect).unwrap() < 1e-14);
        }
    }
}

#[test]
fn annihilators_kill_the_vacuum() {
    for d in 1..=5 {
        let f = build_fock(d).unwrap();
        let vac = f.vacuum_vector();
        for i in 0..d {
            let out = f.creation_matrix(i).unwrap().adjoint().mul_vec(&vac).unwrap();
            assert!(out.iter().all(|z| z.norm() == 0.0));
        }
    }
}

#[test]
fn field_operator_examples() {
    let f = build_fock(3).unwrap();
    let w = field(&f, &unit(3, 0));
    assert!((&w * &w).distance(&ComplexMatrix::identity(8)).unwrap() < 1e-15);
    assert!(field(&f, &[0.0; 3]).is_zero());
    let [u, v] = [random_vectors(1, 1, 3).remove(0), random_vectors(2, 1, 3).remove(0)];
    let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
    assert!(field(&f, &sum).distance(&(&field(&f, &u) + &field(&f, &v))).unwrap() < 1e-15);
    let wu = field(&f, &u);
    assert_eq!(wu, wu.adjoint());
    assert!(matches!(omega(&f, &[1.0, 0.0]), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn vacuum_trace_examples() {
    let f = build_fock(3).unwrap();
    assert_eq!(vacuum_trace(&f, &ComplexMatrix::identity(8)).unwrap(), C64::new(1.0, 0.0));
    let vs = random_vectors(3, 3, 3);
    let two = vacuum_trace(&f, &(&field(&f, &vs[0]) * &field(&f, &vs[1]))).unwrap();
    assert!((two.re - dot(&vs[0], &vs[1])).abs() < 1e-15 && two.im == 0.0);
    assert_eq!(vacuum_trace(&f, &field(&f, &vs[2])).unwrap().norm(), 0.0);
    assert!(vacuum_trace(&f, &ComplexMatrix::identity(4)).is_err());
}

#[test]
fn pair_partition_examples() {
    let one = enumerate_pair_partitions(1).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!((one[0].pairs.clone(), one[0].crossings), (vec![(1, 2)], 0));

    let two = enumerate_pair_partitions(2).unwrap();
    let got: Vec<_> = two.iter().map(|p| (p.pairs.clone(), p.crossings)).collect();
    assert_eq!(
        got,
        vec![
            (vec![(1, 2), (3, 4)], 0),
            (vec![(1, 3), (2, 4)], 1),
            (vec![(1, 4), (2, 3)], 0),
        ]
    );
    assert_eq!(enumerate_pair_partitions(3).unwrap().len(), 15);
    assert!(matches!(enumerate_pair_partitions(9), Err(Error::Resource(_))));
}

#[test]
fn crossing_numbers_match_definition() {
    for k in 1..=5 {
        let parts = enumerate_pair_partitions(k).unwrap();
        for p in &parts {
            assert_eq!(p.crossings, crossings_by_definition(&p.pairs));
            assert_eq!(p.crossings, crossing_number(&p.pairs));
        }
        let mut sorted = parts.iter().map(|p| p.pairs.clone()).collect::<Vec<_>>();
        sorted.sort();
        assert_eq!(sorted, parts.iter().map(|p| p.pairs.clone()).collect::<Vec<_>>());
    }
}

#[test]
fn wick_examples() {
    let vs = random_vectors(5, 4, 3);
    let g = |i: usize, j: usize| dot(&vs[i], &vs[j]);
    assert!((wick_trace(&vs[..2]).unwrap() - g(0, 1)).abs() < 1e-15);
    let four = g(0, 1) * g(2, 3) - g(0, 2) * g(1, 3) + g(0, 3) * g(1, 2);
    assert!((wick_trace(&vs).unwrap() - four).abs() < 1e-14);
    let (e1, e2) = (unit(2, 0), unit(2, 1));
    assert_eq!(wick_trace(&[e1.clone(), e2.clone(), e1, e2]).unwrap(), -1.0);
    assert_eq!(wick_trace(&vs[..3]).unwrap(), 0.0);
    assert!(wick_trace(&[vec![1.0], vec![1.0, 0.0]]).is_err());
}

#[test]
fn wick_matches_matrix_route() {
    let cases = [(2usize, 3usize, 1e-12), (4, 4, 1e-10), (6, 5, 1e-9)];
    for (count, d, tol) in cases {
        let f = build_fock(d).unwrap();
        for seed in 0..10 {
            let vs = random_vectors(seed, count, d);
            assert!(wick_vs_matrix_check(&f, &vs).unwrap() <= tol);
            let dense = vacuum_trace(&f, &product(&f, &vs)).unwrap();
            assert!((dense.re - vacuum_moment(&f, &vs).unwrap()).abs() < 1e-13);
        }
    }
}

#[test]
fn q_gram_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = random_tensor(&mut rng, 3, 2);
    let k = random_tensor(&mut rng, 3, 2);
    let plain: C64 = (0..3).map(|i| cinner(&h[i], &k[i])).product();
    assert!((q_inner(&h, &k, 0.0).unwrap() - plain).norm() < 1e-15);

    let e = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let ee = vec![e.clone(), e];
    assert!(q_inner(&ee, &ee, -1.0).unwrap().norm() < 1e-15);

    let q = 0.37;
    let explicit = cinner(&h[0], &k[0]) * cinner(&h[1], &k[1]) + cinner(&h[0], &k[1]) * cinner(&h[1], &k[0]) * q;
    assert!((q_inner(&h[..2], &k[..2], q).unwrap() - explicit).norm() < 1e-15);

    assert!(matches!(q_inner(&h, &k, 1.0), Err(Error::Rejected(_))));
    assert!(matches!(q_gram(&[h.clone()], 1.0), Err(Error::Rejected(_))));
}

#[test]
fn q_inner_matches_permutation_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=5 {
        for q in [-1.0, -0.6, 0.0, 0.3, 0.95] {
            let h = random_tensor(&mut rng, n, 3);
            let k = random_tensor(&mut rng, n, 3);
            let got = q_inner(&h, &k, q).unwrap();
            assert!((got - q_inner_by_permutations(&h, &k, q)).norm() < 1e-13);
        }
    }
}

#[test]
fn second_quantization_intertwines_fields() {
    let d = 3;
    let f = build_fock(d).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let o = DMatrix::<f64>::from_fn(d, d, |_, _| rng.random::<f64>() - 0.5).qr().q();
    let lam = ComplexMatrix::from_real(&second_quantize(&f, &o).unwrap());
    assert!((&lam.adjoint() * &lam).distance(&ComplexMatrix::identity(8)).unwrap() < 1e-13);
    for v in random_vectors(14, 3, d) {
        let ov: Vec<f64> = (&o * nalgebra::DVector::from_vec(v.clone())).iter().copied().collect();
        let lhs = &(&lam * &field(&f, &v)) * &lam.adjoint();
        assert!(lhs.distance(&field(&f, &ov)).unwrap() < 1e-13);
    }
    let bad = DMatrix::<f64>::from_element(d, d, 1.0);
    assert!(matches!(second_quantize(&f, &bad), Err(Error::Precondition(_))));
}

fn word() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..3, 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn vacuum_trace_is_tracial(x in word(), y in word()) {
        let f = build_fock(3).unwrap();
        let w = |idx: &[usize]| product(&f, &idx.iter().map(|&i| unit(3, i)).collect::<Vec<_>>());
        let (a, b) = (w(&x), w(&y));
        let lhs = vacuum_trace(&f, &(&a * &b)).unwrap();
        let rhs = vacuum_trace(&f, &(&b * &a)).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn odd_moments_vanish(k in 0usize..4, d in 1usize..5, seed in any::<u64>()) {
        let f = build_fock(d).unwrap();
        let vs = random_vectors(seed, 2 * k + 1, d);
        prop_assert!(vacuum_trace(&f, &product(&f, &vs)).unwrap().norm() <= 1e-12);
    }

    #[test]
    fn q_gram_is_psd(
        n in 1usize..5,
        members in 1usize..6,
        q in prop::sample::select(vec![-0.9, -0.5, 0.0, 0.5, 0.9]),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let family: Vec<_> = (0..members).map(|_| random_tensor(&mut rng, n, 2)).collect();
        let g = q_gram(&family, q).unwrap();
        let lmin = hermitian_eigenvalues(&g).unwrap().into_iter().fold(f64::INFINITY, f64::min);
        prop_assert!(lmin >= -1e-9, "{}", lmin);
    }

    #[test]
    fn pair_partition_count(k in 1usize..7) {
        prop_assert_eq!(enumerate_pair_partitions(k).unwrap().len(), double_factorial(k));
    }

    #[test]
    fn wick_residual(k in 1usize..5, d in 1usize..7, seed in any::<u64>()) {
        let f = build_fock(d).unwrap();
        let vs = random_vectors(seed, 2 * k, d);
        prop_assert!(wick_vs_matrix_check(&f, &vs).unwrap() <= 1e-9);
    }
}
