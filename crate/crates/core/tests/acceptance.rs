//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p matsaev-core --test acceptance`. The process exits
//! nonzero when any criterion fails.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use matsaev_core::dilation::{
    dilate_fourier_finite, dilate_schur, gaussian_semigroup_dilate, schoenberg_check, verify_dilation,
    SchoenbergCertificate, SemigroupSpec,
};
use matsaev_core::fock::{enumerate_pair_partitions, wick_vs_matrix_check, FockSpace};
use matsaev_core::multiplier::{regular_rep, FiniteGroup};
use matsaev_core::pnorm::{
    estimate_pnorm, exact_block_estimate, mixed_norm, sample_lower_bound, BlockMap, BlockOperator,
    EstimateConfig,
};
use matsaev_core::poly::{
    classify_extremal, gap_search, poly_norm, poly_vector_norm, sigma_norm, sup_circle, toeplitz_of,
    GapSearchConfig, Polynomial, Verdict,
};
use matsaev_core::{ComplexMatrix, PExponent, C64};

struct Outcome {
    pass: bool,
    detail: String,
}

fn p(x: f64) -> PExponent {
    PExponent::new(x).unwrap()
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn run(id: usize, name: &str, budget: Duration, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = body();
    let elapsed = start.elapsed();
    let pass = out.pass && elapsed <= budget;
    println!(
        "criterion {id:>2} [{name}] {} ({}; {:.1} s of {} s)",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn degree_one_norms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cfg = EstimateConfig::default();
    let exps = [p(1.3), p(2.0), p(3.0), PExponent::Infinity];
    let mut worst: (f64, String) = (0.0, String::new());
    for _ in 0..20 {
        let a = C64::new(gaussian(&mut rng), gaussian(&mut rng));
        let b = C64::new(gaussian(&mut rng), gaussian(&mut rng));
        let poly = Polynomial::new(vec![a, b]).unwrap();
        let target = a.norm() + b.norm();
        for &q in &exps {
            let v = poly_norm(&poly, q, 64, &cfg).unwrap().value;
            let err = (v - target).abs();
            if err > worst.0 {
                worst = (err, format!("p = {q}, |a| = {:.3}, |b| = {:.3}", a.norm(), b.norm()));
            }
        }
    }
    Outcome {
        pass: worst.0 <= 1e-4,
        detail: format!("max |norm - (|a|+|b|)| = {:.2e} at {}", worst.0, worst.1),
    }
}

fn sign_pattern_corpus() -> Outcome {
    let cfg = EstimateConfig::default();
    let values = [-2.0, -1.0, 1.0, 2.0];
    let mut polys = Vec::new();
    for deg in 0..=3u32 {
        for code in 0..4usize.pow(deg + 1) {
            let coeffs: Vec<f64> = (0..=deg).map(|i| values[(code / 4usize.pow(i)) % 4]).collect();
            polys.push(Polynomial::from_real(&coeffs).unwrap());
        }
    }
    let (mut extremal, mut neither) = (0, 0);
    let (mut worst_ext, mut worst_gap, mut worst_sup) = (0.0f64, f64::INFINITY, 0.0f64);
    let mut mismatched = 0;
    for poly in &polys {
        let rep = classify_extremal(poly).unwrap();
        let abs_sum = poly.abs_sum();
        match rep.verdict {
            Verdict::SameSign | Verdict::Alternating => {
                extremal += 1;
                for q in [p(2.0), p(3.0)] {
                    let v = poly_norm(poly, q, 64, &cfg).unwrap().value;
                    worst_ext = worst_ext.max((v - abs_sum).abs());
                }
                if rep.predicted != Some(abs_sum) {
                    mismatched += 1;
                }
            }
            Verdict::Neither => {
                neither += 1;
                let sup = sup_circle(poly);
                worst_gap = worst_gap.min(abs_sum - sup);
                let v = poly_norm(poly, p(2.0), 64, &cfg).unwrap().value;
                worst_sup = worst_sup.max((v - sup).abs());
            }
        }
    }
    let pass = mismatched == 0 && worst_ext <= 1e-4 && worst_gap > 1e-4 && worst_sup <= 1e-4;
    Outcome {
        pass,
        detail: format!(
            "{} polynomials, {extremal} extremal with max |norm - sum|a_k|| = {worst_ext:.2e}, {neither} neither \
             with min (sum|a_k| - sup) = {worst_gap:.3} and max |norm_2 - sup| = {worst_sup:.2e}",
            polys.len()
        ),
    }
}

fn double_factorial(k: usize) -> usize {
    (1..=k).map(|i| 2 * i - 1).product()
}

fn wick_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let d = rng.random_range(1..=6);
        let len = 2 * rng.random_range(0..=4);
        let f = FockSpace::new(d).unwrap();
        let vectors: Vec<Vec<f64>> = (0..len).map(|_| (0..d).map(|_| gaussian(&mut rng)).collect()).collect();
        worst = worst.max(wick_vs_matrix_check(&f, &vectors).unwrap());
    }
    let counts_ok = (1..=6).all(|k| enumerate_pair_partitions(k).unwrap().len() == double_factorial(k));
    Outcome {
        pass: worst <= 1e-9 && counts_ok,
        detail: format!("max residual {worst:.2e}, (2k-1)!! counts for k <= 6 {}", if counts_ok { "ok" } else { "wrong" }),
    }
}

fn unit_gram(rng: &mut ChaCha8Rng, n: usize, r: usize) -> ComplexMatrix {
    let vs: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let v: Vec<f64> = (0..r).map(|_| gaussian(rng)).collect();
            let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / s).collect()
        })
        .collect();
    ComplexMatrix::from_fn(n, n, |i, j| C64::new(vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum(), 0.0))
}

fn schur_dilation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut residual, mut laws) = (0.0f64, 0.0f64);
    for _ in 0..25 {
        let n = rng.random_range(1..=3);
        let r = rng.random_range(1..=3);
        let a = unit_gram(&mut rng, n, r);
        let bundle = dilate_schur(&a, 3).unwrap();
        let rep = verify_dilation(&bundle, bundle.map(), 3, &bundle.map().test_set()).unwrap();
        residual = residual.max(rep.max_residual);
        let inv = bundle.invariants();
        laws = [
            laws,
            inv.homomorphism,
            inv.unitarity,
            inv.trace_preservation,
            inv.conditional_expectation,
            inv.trace_compatibility,
        ]
        .into_iter()
        .fold(0.0, f64::max);
    }
    Outcome {
        pass: residual <= 1e-10 && laws <= 1e-10,
        detail: format!("max dilation residual {residual:.2e}, max law defect {laws:.2e}"),
    }
}

/// Convex combination of real parts of characters of `Z_n`.
fn random_cyclic_symbol(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let total: f64 = w.iter().sum();
    (0..n)
        .map(|g| {
            (0..n)
                .map(|chi| w[chi] / total * (2.0 * std::f64::consts::PI * (chi * g) as f64 / n as f64).cos())
                .sum()
        })
        .collect()
}

fn fourier_dilation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut residual = 0.0f64;
    for order in [2, 3] {
        let g = FiniteGroup::cyclic(order).unwrap();
        for _ in 0..10 {
            let t = random_cyclic_symbol(&mut rng, order);
            let bundle = dilate_fourier_finite(&g, &t, 2).unwrap();
            let tests: Vec<ComplexMatrix> = (0..order).map(|x| regular_rep(&g, x)).collect();
            residual = residual.max(verify_dilation(&bundle, bundle.map(), 2, &tests).unwrap().max_residual);
        }
    }
    Outcome {
        pass: residual <= 1e-10,
        detail: format!("max residual {residual:.2e} over Z_2 and Z_3"),
    }
}

fn random_poly(rng: &mut ChaCha8Rng) -> Polynomial {
    loop {
        let deg = rng.random_range(1..=4);
        let c: Vec<C64> = (0..=deg).map(|_| C64::new(gaussian(rng), gaussian(rng))).collect();
        if let Ok(poly) = Polynomial::new(c) {
            return poly;
        }
    }
}

fn norm_chain(corpus: &[Polynomial], vector_p3: &mut Vec<f64>) -> Outcome {
    let scalar_cfg = EstimateConfig::default();
    let block_cfg = EstimateConfig {
        restarts: 2,
        ..Default::default()
    };
    let n = 16;
    let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for poly in corpus {
        for q in [p(1.5), p(3.0)] {
            let a = poly_norm(poly, q, n, &scalar_cfg).unwrap().value;
            let s = sigma_norm(poly, q, n, &scalar_cfg).unwrap().value;
            let v = poly_vector_norm(poly, q, n, n, &block_cfg).unwrap().value;
            first = first.max(a - (s + 1e-4));
            second = second.max((s + 1e-4) - (v + 2e-4));
            if q.value() == 3.0 {
                vector_p3.push(v);
            }
        }
    }
    Outcome {
        pass: first <= 0.0 && second <= 0.0,
        detail: format!(
            "max (poly - sigma - 1e-4) = {first:.2e}, max (sigma + 1e-4 - vector - 2e-4) = {second:.2e}"
        ),
    }
}

fn interpolation_bound(corpus: &[Polynomial], vector_p3: &[f64]) -> Outcome {
    let block_cfg = EstimateConfig {
        restarts: 2,
        ..Default::default()
    };
    let mut worst = f64::NEG_INFINITY;
    for (i, poly) in corpus.iter().enumerate() {
        let (l1, sup) = (poly.abs_sum(), sup_circle(poly));
        for q in [3.0, 4.0] {
            let v = if q == 3.0 {
                vector_p3[i]
            } else {
                poly_vector_norm(poly, p(q), 16, 16, &block_cfg).unwrap().value
            };
            let bound = l1.powf(1.0 - 2.0 / q) * sup.powf(2.0 / q);
            worst = worst.max(v - bound - 1e-4);
        }
    }
    Outcome {
        pass: worst <= 0.0,
        detail: format!("max (vector - bound - 1e-4) = {worst:.2e}"),
    }
}

fn schoenberg() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ts: Vec<f64> = (0..20).map(|k| 10f64.powf(-2.0 + 0.2 * k as f64)).collect();
    let (mut cnd_ok, mut recovery) = (0, 0.0f64);
    let (mut rejected, mut certified) = (0, 0);
    for _ in 0..50 {
        let n = rng.random_range(2..=6);
        let alphas: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| gaussian(&mut rng)).collect()).collect();
        let a = SemigroupSpec::new(alphas).unwrap().squared_distances();
        let rep = schoenberg_check(&a, &ts).unwrap();
        if rep.cnd {
            cnd_ok += 1;
        }
        if let SchoenbergCertificate::Embedding { alphas, .. } = &rep.certificate {
            let back = SemigroupSpec::new(alphas.clone()).unwrap().squared_distances();
            recovery = recovery.max((back - &a).abs().max());
        } else {
            recovery = f64::INFINITY;
        }
    }
    for _ in 0..50 {
        let n = rng.random_range(3..=6);
        let alphas: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| gaussian(&mut rng)).collect()).collect();
        let a = SemigroupSpec::new(alphas).unwrap().squared_distances();
        // c ⟂ 1 makes c^T (c c^T - diag(c∘c)) c = |c|^4 - sum c_i^4 > 0 a
        // positive direction on the complement of the constants.
        let raw: Vec<f64> = (0..n).map(|_| gaussian(&mut rng)).collect();
        let mean = raw.iter().sum::<f64>() / n as f64;
        let c: Vec<f64> = raw.iter().map(|x| x - mean).collect();
        let pert = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { c[i] * c[j] });
        let a = &a + pert * (10.0 * a.max());
        let rep = schoenberg_check(&a, &ts).unwrap();
        if !rep.cnd {
            rejected += 1;
        }
        if let SchoenbergCertificate::Violation { t, eigenvalue } = rep.certificate {
            let m = a.map(|x| (-t * x).exp());
            let size = m.max();
            let lmin = m.symmetric_eigenvalues().min();
            if eigenvalue < -1e-9 * size && (lmin - eigenvalue).abs() <= 1e-9 * size.max(1.0) {
                certified += 1;
            }
        }
    }
    Outcome {
        pass: cnd_ok == 50 && recovery <= 1e-9 && rejected == 50 && certified == 50,
        detail: format!(
            "{cnd_ok}/50 distance matrices CND (recovery {recovery:.2e}), {rejected}/50 perturbed rejected, \
             {certified}/50 with a verified (t, eigenvalue) certificate"
        ),
    }
}

/// Residuals observed with seed 9 and 10^6 draws; the run must reproduce
/// them exactly.
const GAUSSIAN_REGRESSION: [(f64, f64); 2] = [(0.1, 0.0013070968772886586), (1.0, 0.008872808642187304)];

fn gaussian_dilation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let alphas: Vec<Vec<f64>> = (0..4).map(|_| (0..3).map(|_| gaussian(&mut rng)).collect()).collect();
    let spec = SemigroupSpec::new(alphas).unwrap();
    let x = ComplexMatrix::from_fn(4, 4, |_, _| C64::new(gaussian(&mut rng), gaussian(&mut rng)));
    let mut pass = true;
    let mut parts = Vec::new();
    for (t, recorded) in GAUSSIAN_REGRESSION {
        let rep = gaussian_semigroup_dilate(&spec, t, &x, 1_000_000, 9).unwrap();
        let reproduced = (rep.residual - recorded).abs() <= 1e-12 * recorded;
        pass &= rep.residual < rep.three_sigma && reproduced;
        parts.push(format!(
            "t = {t}: residual {:.6e} vs 3σ {:.3e}{}",
            rep.residual,
            rep.three_sigma,
            if reproduced { "" } else { " (regression mismatch)" }
        ));
    }
    Outcome {
        pass,
        detail: parts.join(", "),
    }
}

fn engine_cross_validation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let cfg = EstimateConfig::default();
    let (mut e2, mut e1, mut einf, mut e15) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..100 {
        let m = ComplexMatrix::from_fn(4, 4, |_, _| C64::new(gaussian(&mut rng), gaussian(&mut rng)));
        let op = BlockOperator::scalar(m.clone()).unwrap();
        let svd = m.as_dmatrix().clone().svd(false, false).singular_values.max();
        e2 = e2.max((estimate_pnorm(&op, p(2.0), &cfg).unwrap().value - svd).abs());
        let col = (0..4).map(|j| (0..4).map(|r| m[(r, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
        let row = (0..4).map(|r| (0..4).map(|j| m[(r, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
        e1 = e1.max((exact_block_estimate(&op, PExponent::one()).unwrap().value - col).abs());
        einf = einf.max((exact_block_estimate(&op, PExponent::Infinity).unwrap().value - row).abs());
        let est = estimate_pnorm(&op, p(1.5), &cfg).unwrap().value;
        let oracle = sample_lower_bound(&op, p(1.5), 100_000, true, 1000 + i).unwrap().value;
        e15 = e15.max((est - oracle).abs());
    }
    Outcome {
        pass: e2 <= 1e-8 && e1 <= 1e-12 && einf <= 1e-12 && e15 <= 1e-3,
        detail: format!("p=2 vs SVD {e2:.1e}, p=1 {e1:.1e}, p=inf {einf:.1e}, p=1.5 vs sampling {e15:.1e}"),
    }
}

fn gap_search_run() -> Outcome {
    let cfg = GapSearchConfig::default();
    let rep = gap_search(p(4.0), 8, &cfg).unwrap();
    let mut worst = 0.0f64;
    for c in &rep.candidates {
        let op = BlockOperator::new(toeplitz_of(&c.polynomial, c.n), c.m).unwrap();
        let norm = mixed_norm(&c.witness, p(4.0));
        let image = mixed_norm(&op.apply(&c.witness), p(4.0)) / norm;
        worst = worst.max((image - c.vector_value).abs()).max((norm - 1.0).abs());
    }
    let table = rep.table();
    let ranked = rep.candidates.windows(2).all(|w| w[0].gap >= w[1].gap);
    Outcome {
        pass: rep.evaluated == cfg.budget
            && !rep.candidates.is_empty()
            && ranked
            && table.contains("heuristic, not certified")
            && worst <= 1e-8,
        detail: format!(
            "{} evaluated, {} reported, best gap {:.3e}, max witness re-evaluation error {worst:.1e}",
            rep.evaluated,
            rep.candidates.len(),
            rep.candidates.first().map_or(f64::NAN, |c| c.gap)
        ),
    }
}

fn main() {
    let secs = Duration::from_secs;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let corpus: Vec<Polynomial> = (0..10).map(|_| random_poly(&mut rng)).collect();
    let mut vector_p3 = Vec::new();
    let results = [
        run(1, "degree-1 norms", secs(30), degree_one_norms),
        run(2, "sign-pattern corpus", secs(120), sign_pattern_corpus),
        run(3, "Wick consistency", secs(60), wick_consistency),
        run(4, "Schur dilation", secs(120), schur_dilation),
        run(5, "Fourier dilation", secs(120), fourier_dilation),
        run(6, "norm chain", secs(300), || norm_chain(&corpus, &mut vector_p3)),
        run(7, "interpolation bound", secs(300), || interpolation_bound(&corpus, &vector_p3)),
        run(8, "Schoenberg", secs(60), schoenberg),
        run(9, "Gaussian dilation", secs(60), gaussian_dilation),
        run(10, "engine cross-validation", secs(120), engine_cross_validation),
        run(11, "gap search", secs(600), gap_search_run),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
