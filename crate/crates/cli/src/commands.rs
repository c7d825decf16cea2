use std::fmt;
use std::path::PathBuf;

use clap::Args;
use matsaev_core::dilation::{
    dilate_fourier_finite, dilate_schur, discretize_kernel, gaussian_semigroup_dilate, schoenberg_check,
    semigroup_convolution, ConvolutionConfig, KernelFunction, SemigroupSource, SemigroupSpec,
};
use matsaev_core::fock::{vacuum_moment, wick_trace, FockSpace};
use matsaev_core::matrix::hermitian_eigenvalues;
use matsaev_core::multiplier::{make_group, GroupSpec};
use matsaev_core::pnorm::EstimateConfig;
use matsaev_core::poly::{gap_search, norm_profile, poly_norm, sigma_norm, sup_circle, GapSearchConfig, Polynomial};
use matsaev_core::{ComplexMatrix, Error, PExponent, C64};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{self, json_arg};
use crate::record::RunRecord;

/// Largest residual `dilate` accepts.
pub const DILATION_TOL: f64 = 1e-8;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "{s}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    /// 2 usage, 3 certification, 4 resource, 5 accuracy.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::Certification(_) => 3,
                Error::Resource(_) => 4,
                Error::Accuracy(_) | Error::UndefinedDirection => 5,
                _ => 2,
            },
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub struct Outcome {
    pub results: Value,
    pub csv: Option<String>,
    pub summary: Vec<String>,
    /// Set when the run completed but its check failed (exit 5).
    pub failure: Option<String>,
}

impl Outcome {
    fn new(results: Value, summary: Vec<String>) -> Self {
        Outcome {
            results,
            csv: None,
            summary,
            failure: None,
        }
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn exit_code(&self) -> u8 {
        if self.failure.is_some() {
            5
        } else {
            0
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Usage(e.to_string()))
}

fn typed<S: DeserializeOwned>(name: &str, v: &Value) -> Result<S> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::Usage(format!("{name}: {e}")))
}

fn require<T>(value: Option<T>, what: &str) -> Result<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing {what}")))
}

fn estimate_config(restarts: usize, max_iters: usize, tol: f64, seed: u64) -> EstimateConfig {
    EstimateConfig {
        restarts,
        max_iters,
        tol,
        seed,
    }
}

fn parse_p(s: &str) -> std::result::Result<PExponent, String> {
    s.parse::<PExponent>().map_err(|e| e.to_string())
}

fn parse_json(s: &str) -> std::result::Result<JsonArg, String> {
    json_arg(s).map(JsonArg)
}

/// A JSON value given inline or as `@file`.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct JsonArg(Value);

/// Vectors as `1,0;0,1` or JSON.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct VectorList(Vec<Vec<f64>>);

fn parse_vectors(s: &str) -> std::result::Result<VectorList, String> {
    let t = s.trim();
    if t.starts_with('[') || t.starts_with('@') {
        let v = json_arg(t)?;
        return serde_json::from_value(v).map(VectorList).map_err(|e| e.to_string());
    }
    t.split(';')
        .map(|v| {
            v.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| format!("bad entry {x:?}: {e}")))
                .collect()
        })
        .collect::<std::result::Result<Vec<Vec<f64>>, String>>()
        .map(VectorList)
}

/// A matrix as real rows or as `{"rows", "cols", "data": [[re, im], ..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixInput {
    Rows(Vec<Vec<f64>>),
    Full(ComplexMatrix),
}

impl MatrixInput {
    fn matrix(&self) -> Result<ComplexMatrix> {
        match self {
            MatrixInput::Rows(rows) => Ok(ComplexMatrix::from_real_rows(rows)?),
            MatrixInput::Full(m) => Ok(m.clone()),
        }
    }
}

fn real_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    Ok(ComplexMatrix::from_real_rows(rows)?.real_part())
}

fn gaussian_matrix(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(n, n, |_, _| {
        C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
    })
}

// ── norm / cbnorm ──────────────────────────────────────────────────────

#[derive(Args, Debug, Serialize)]
pub struct NormArgs {
    /// Coefficients, low degree first: `1,-2,0.5i,1+2i`.
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// Exponent: a number >= 1 or `inf`.
    #[arg(long, value_parser = parse_p)]
    p: Option<PExponent>,
    /// Truncation sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Schatten block size m.
    #[arg(long)]
    block: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormSettings {
    poly: Option<String>,
    p: PExponent,
    n: Vec<usize>,
    block: usize,
    restarts: usize,
    max_iters: usize,
    tol: f64,
    seed: u64,
}

impl Default for NormSettings {
    fn default() -> Self {
        let e = EstimateConfig::default();
        NormSettings {
            poly: None,
            p: PExponent::new(3.0).expect("valid"),
            n: vec![8, 16, 32, 64],
            block: 1,
            restarts: e.restarts,
            max_iters: e.max_iters,
            tol: e.tol,
            seed: 0,
        }
    }
}

fn run_norm(s: &NormSettings) -> Result<Outcome> {
    let poly: Polynomial = require(s.poly.as_deref(), "--poly")?.parse()?;
    if s.n.is_empty() {
        return Err(CliError::Usage("--n needs at least one size".into()));
    }
    let cfg = estimate_config(s.restarts, s.max_iters, s.tol, s.seed);
    let profile = norm_profile(&poly, s.p, &s.n, s.block, &cfg)?;
    let last = profile.entries.last().expect("nonempty ladder");
    let results = json!({
        "polynomial": poly.to_string(),
        "p": s.p,
        "block": s.block,
        "n": last.n,
        "value": last.value,
        "abs_sum": poly.abs_sum(),
        "sup_circle": sup_circle(&poly),
        "profile": profile.entries,
    });
    let summary = vec![format!(
        "||P(S_n)|| = {:.12} at n = {}, p = {}, block {}",
        last.value, last.n, s.p, s.block
    )];
    Ok(Outcome::new(results, summary).with_csv(profile.to_csv()))
}

// ── sigma ──────────────────────────────────────────────────────────────

#[derive(Args, Debug, Serialize)]
pub struct SigmaArgs {
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    #[arg(long, value_parser = parse_p)]
    p: Option<PExponent>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SigmaSettings {
    poly: Option<String>,
    p: PExponent,
    n: usize,
    restarts: usize,
    max_iters: usize,
    tol: f64,
    seed: u64,
}

impl Default for SigmaSettings {
    fn default() -> Self {
        let e = EstimateConfig::default();
        SigmaSettings {
            poly: None,
            p: PExponent::new(3.0).expect("valid"),
            n: 16,
            restarts: e.restarts,
            max_iters: e.max_iters,
            tol: e.tol,
            seed: 0,
        }
    }
}

fn run_sigma(s: &SigmaSettings) -> Result<Outcome> {
    let poly: Polynomial = require(s.poly.as_deref(), "--poly")?.parse()?;
    let cfg = estimate_config(s.restarts, s.max_iters, s.tol, s.seed);
    let scalar = poly_norm(&poly, s.p, s.n, &cfg)?;
    let sigma = sigma_norm(&poly, s.p, s.n, &cfg)?;
    let results = json!({
        "polynomial": poly.to_string(),
        "p": s.p,
        "n": s.n,
        "scalar": scalar.value,
        "sigma": sigma.value,
        "difference": sigma.value - scalar.value,
        "converged": scalar.converged && sigma.converged,
    });
    let summary = vec![
        format!("||P(S_n)||    = {:.12}", scalar.value),
        format!("||P(σ)||      = {:.12}", sigma.value),
    ];
    Ok(Outcome::new(results, summary))
}

// ── dilate ─────────────────────────────────────────────────────────────

#[derive(Args, Debug)]
pub struct DilateArgs {
    /// `schur` or `fourier`.
    kind: Option<String>,
    /// JSON input: a matrix for `schur` (real rows or the complex matrix
    /// object), `{"group": {..}, "t": [..]}` for `fourier`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Window K.
    #[arg(long)]
    window: Option<usize>,
    /// Largest k checked, at most K (default K).
    #[arg(long)]
    kmax: Option<usize>,
}

impl DilateArgs {
    pub fn flag_map(&self) -> Result<Value> {
        let mut m = serde_json::Map::new();
        if let Some(k) = &self.kind {
            m.insert("kind".into(), Value::from(k.clone()));
        }
        if let Some(path) = &self.input {
            m.insert("input".into(), config::read_json_file(path)?);
        }
        if let Some(w) = self.window {
            m.insert("window".into(), Value::from(w));
        }
        if let Some(k) = self.kmax {
            m.insert("kmax".into(), Value::from(k));
        }
        Ok(Value::Object(m))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DilateInput {
    Fourier { group: GroupSpec, t: Vec<f64> },
    Wrapped { a: MatrixInput },
    Schur(MatrixInput),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DilateSettings {
    kind: Option<String>,
    input: Option<DilateInput>,
    window: usize,
    kmax: Option<usize>,
    seed: u64,
}

impl Default for DilateSettings {
    fn default() -> Self {
        DilateSettings {
            kind: None,
            input: None,
            window: 3,
            kmax: None,
            seed: 0,
        }
    }
}

fn run_dilate(s: &DilateSettings) -> Result<Outcome> {
    let input = require(s.input.as_ref(), "--input")?;
    let bundle = match (require(s.kind.as_deref(), "dilation kind (schur|fourier)")?, input) {
        ("schur", DilateInput::Schur(m) | DilateInput::Wrapped { a: m }) => dilate_schur(&m.matrix()?, s.window)?,
        ("fourier", DilateInput::Fourier { group, t }) => dilate_fourier_finite(&make_group(group)?, t, s.window)?,
        (kind @ ("schur" | "fourier"), _) => {
            return Err(CliError::Usage(format!("input does not describe a {kind} multiplier")))
        }
        (other, _) => return Err(CliError::Usage(format!("unknown dilation kind {other:?}"))),
    };
    let k_max = s.kmax.unwrap_or(s.window);
    let report = bundle.verify(k_max)?;
    let passed = report.max_residual < DILATION_TOL;
    let mut csv = String::from("k,residual\n");
    for (k, r) in report.residuals.iter().enumerate() {
        csv.push_str(&format!("{k},{r:.6e}\n"));
    }
    let mut summary = vec![format!(
        "{} dilation: ambient dimension {}, rank {}, window {}",
        report.bundle.kind, report.bundle.ambient_dim, report.bundle.rank, report.bundle.window
    )];
    for (k, r) in report.residuals.iter().enumerate() {
        summary.push(format!("k = {k}: residual {r:.3e}"));
    }
    let mut results = to_json(&report)?;
    results["passed"] = Value::from(passed);
    let mut out = Outcome::new(results, summary).with_csv(csv);
    if !passed {
        out.failure = Some(format!(
            "max residual {:.3e} is not below {DILATION_TOL:e}",
            report.max_residual
        ));
    }
    Ok(out)
}

// ── wick ───────────────────────────────────────────────────────────────

#[derive(Args, Debug, Serialize)]
pub struct WickArgs {
    /// Vectors f_1, .., f_n as `1,0;0,1` or JSON.
    #[arg(long, value_parser = parse_vectors, allow_hyphen_values = true)]
    vectors: Option<VectorList>,
    /// Number of Fock generators (default: the vector length).
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WickSettings {
    vectors: Vec<Vec<f64>>,
    dim: Option<usize>,
    seed: u64,
}

fn run_wick(s: &WickSettings) -> Result<Outcome> {
    if s.vectors.is_empty() {
        return Err(CliError::Usage("missing --vectors".into()));
    }
    let len = s.vectors.iter().map(Vec::len).max().unwrap_or(0);
    let d = s.dim.unwrap_or(len).max(len).max(1);
    let padded: Vec<Vec<f64>> = s
        .vectors
        .iter()
        .map(|v| {
            let mut w = v.clone();
            w.resize(d, 0.0);
            w
        })
        .collect();
    let wick = wick_trace(&padded)?;
    let f = FockSpace::new(d)?;
    let matrix = vacuum_moment(&f, &padded)?;
    let count = padded.len();
    let pairings: u64 = if count % 2 == 0 {
        (1..=count as u64 / 2).map(|j| 2 * j - 1).product()
    } else {
        0
    };
    let results = json!({
        "count": count,
        "dim": d,
        "pair_partitions": pairings,
        "wick": wick,
        "matrix": matrix,
        "residual": (wick - matrix).abs(),
    });
    let summary = vec![
        format!("τ(ω(f_1)..ω(f_{count})) = {wick}"),
        format!("matrix route residual {:.3e}", (wick - matrix).abs()),
    ];
    Ok(Outcome::new(results, summary))
}

// ── qgram ──────────────────────────────────────────────────────────────

#[derive(Args, Debug, Serialize)]
pub struct QgramArgs {
    /// Deformation q in [-1, 1).
    #[arg(long, allow_hyphen_values = true)]
    q: Option<f64>,
    /// Simple tensors as JSON: `[[h_1, .., h_n], ..]` with real vectors h_i.
    #[arg(long, value_parser = parse_json)]
    family: Option<JsonArg>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QgramSettings {
    q: f64,
    family: Vec<Vec<Vec<f64>>>,
    seed: u64,
}

fn run_qgram(s: &QgramSettings) -> Result<Outcome> {
    if s.family.is_empty() {
        return Err(CliError::Usage("missing --family".into()));
    }
    let family: Vec<Vec<Vec<C64>>> = s
        .family
        .iter()
        .map(|t| t.iter().map(|h| h.iter().map(|&x| C64::new(x, 0.0)).collect()).collect())
        .collect();
    let g = matsaev_core::fock::q_gram(&family, s.q)?;
    let lmin = hermitian_eigenvalues(&g)?.into_iter().fold(f64::INFINITY, f64::min);
    let results = json!({
        "q": s.q,
        "gram": g,
        "min_eigenvalue": lmin,
        "psd": lmin >= -1e-9,
    });
    Ok(Outcome::new(results, vec![format!("q = {}: smallest eigenvalue {lmin:.6e}", s.q)]))
}

// ── schoenberg ─────────────────────────────────────────────────────────

#[derive(Args, Debug, Serialize)]
pub struct SchoenbergArgs {
    /// Real symmetric zero-diagonal matrix as JSON rows.
    #[arg(long, value_parser = parse_json)]
    matrix: Option<JsonArg>,
    /// Points α_i (JSON rows); the matrix becomes |α_i - α_j|².
    #[arg(long, value_parser = parse_json)]
    alphas: Option<JsonArg>,
    /// Sample times for the exp(-tA) spot checks, comma separated.
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchoenbergSettings {
    matrix: Option<Vec<Vec<f64>>>,
    alphas: Option<Vec<Vec<f64>>>,
    t: Vec<f64>,
    seed: u64,
}

impl Default for SchoenbergSettings {
    fn default() -> Self {
        SchoenbergSettings {
            matrix: None,
            alphas: None,
            t: (0..20).map(|k| 10f64.powf(-3.0 + 0.2 * k as f64)).collect(),
            seed: 0,
        }
    }
}

fn run_schoenberg(s: &SchoenbergSettings) -> Result<Outcome> {
    let a = match (&s.matrix, &s.alphas) {
        (Some(m), None) => real_matrix(m)?,
        (None, Some(alphas)) => SemigroupSpec::new(alphas.clone())?.squared_distances(),
        _ => return Err(CliError::Usage("give exactly one of --matrix and --alphas".into())),
    };
    let report = schoenberg_check(&a, &s.t)?;
    let summary = vec![
        format!("CND: {}", report.cnd),
        format!("smallest eigenvalue of -PAP/2: {:.6e}", report.min_eigenvalue),
    ];
    Ok(Outcome::new(to_json(&report)?, summary))
}

// ── semigroup ──────────────────────────────────────────────────────────

#[derive(Args, Debug, Serialize)]
pub struct SemigroupArgs {
    /// Points α_i as JSON rows.
    #[arg(long, value_parser = parse_json)]
    alphas: Option<JsonArg>,
    /// Time t >= 0.
    #[arg(long)]
    t: Option<f64>,
    /// Input matrix (JSON); default a seeded Gaussian matrix.
    #[arg(long, value_parser = parse_json)]
    x: Option<JsonArg>,
    /// Monte-Carlo samples.
    #[arg(long)]
    samples: Option<usize>,
    /// Kernel b for ∫ b(t) T_t dt, e.g. `{"kind": "exp", "rate": 1, "cutoff": 20}`.
    #[arg(long, value_parser = parse_json)]
    kernel: Option<JsonArg>,
    /// Exponents for the norm of the convolution, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_p)]
    p: Option<Vec<PExponent>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemigroupSettings {
    alphas: Vec<Vec<f64>>,
    t: f64,
    x: Option<MatrixInput>,
    samples: usize,
    kernel: Option<KernelFunction>,
    p: Vec<PExponent>,
    seed: u64,
}

impl Default for SemigroupSettings {
    fn default() -> Self {
        SemigroupSettings {
            alphas: Vec::new(),
            t: 1.0,
            x: None,
            samples: 100_000,
            kernel: None,
            p: vec![PExponent::two()],
            seed: 0,
        }
    }
}

fn run_semigroup(s: &SemigroupSettings) -> Result<Outcome> {
    if s.alphas.is_empty() {
        return Err(CliError::Usage("missing --alphas".into()));
    }
    let spec = SemigroupSpec::new(s.alphas.clone())?;
    let x = match &s.x {
        Some(m) => m.matrix()?,
        None => gaussian_matrix(spec.size(), s.seed),
    };
    let g = gaussian_semigroup_dilate(&spec, s.t, &x, s.samples, s.seed)?;
    let mut summary = vec![format!(
        "t = {}: Monte-Carlo residual {:.3e} (3σ = {:.3e}, {} samples)",
        s.t, g.residual, g.three_sigma, s.samples
    )];
    let mut results = json!({ "gaussian": g });
    if let Some(kernel) = &s.kernel {
        let cfg = ConvolutionConfig {
            p: s.p.clone(),
            estimate: EstimateConfig {
                seed: s.seed,
                ..Default::default()
            },
            ..Default::default()
        };
        let conv = semigroup_convolution(kernel, &SemigroupSource::Schur { spec }, &cfg)?;
        for entry in &conv.norms {
            summary.push(format!(
                "||∫ b T_t dt|| on S^{} = {:.10} (||b||_1 = {:.10})",
                entry.p, entry.value, conv.l1_norm
            ));
        }
        results["convolution"] = to_json(&conv)?;
    }
    Ok(Outcome::new(results, summary))
}

// ── discretize ─────────────────────────────────────────────────────────

#[derive(Args, Debug, Serialize)]
pub struct DiscretizeArgs {
    /// Kernel as JSON: indicator, triangle, exp or samples.
    #[arg(long, value_parser = parse_json)]
    kernel: Option<JsonArg>,
    #[arg(long)]
    n: Option<usize>,
    /// Gauss-Legendre order.
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscretizeSettings {
    kernel: Option<KernelFunction>,
    n: usize,
    order: usize,
    seed: u64,
}

impl Default for DiscretizeSettings {
    fn default() -> Self {
        DiscretizeSettings {
            kernel: None,
            n: 1,
            order: 8,
            seed: 0,
        }
    }
}

fn run_discretize(s: &DiscretizeSettings) -> Result<Outcome> {
    let kernel = require(s.kernel.as_ref(), "--kernel")?;
    let a = discretize_kernel(kernel, s.n, s.order)?;
    let mut csv = String::from("k,a\n");
    for (k, v) in a.iter().enumerate() {
        csv.push_str(&format!("{k},{v:.17e}\n"));
    }
    let total: f64 = a.iter().sum();
    let results = json!({
        "n": s.n,
        "coefficients": a,
        "sum": total,
        "mass": kernel.mass()?,
    });
    let summary = vec![format!("{} coefficients, sum {total:.12}", a.len())];
    Ok(Outcome::new(results, summary).with_csv(csv))
}

// ── search ─────────────────────────────────────────────────────────────

#[derive(Args, Debug, Serialize)]
pub struct SearchArgs {
    #[arg(long, value_parser = parse_p)]
    p: Option<PExponent>,
    /// Largest degree tried.
    #[arg(long)]
    degree: Option<usize>,
    /// Number of polynomials evaluated.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    block: Option<usize>,
    /// Candidates kept in the table.
    #[arg(long)]
    top: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSettings {
    p: PExponent,
    degree: usize,
    budget: usize,
    n: usize,
    block: usize,
    top: usize,
    restarts: usize,
    seed: u64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        let c = GapSearchConfig::default();
        SearchSettings {
            p: PExponent::new(4.0).expect("valid"),
            degree: 4,
            budget: c.budget,
            n: c.n,
            block: c.m,
            top: c.top,
            restarts: c.estimate.restarts,
            seed: 0,
        }
    }
}

fn run_search(s: &SearchSettings) -> Result<Outcome> {
    let base = GapSearchConfig::default();
    let cfg = GapSearchConfig {
        budget: s.budget,
        n: s.n,
        m: s.block,
        top: s.top,
        estimate: EstimateConfig {
            restarts: s.restarts,
            seed: s.seed,
            ..base.estimate
        },
        seed: s.seed,
    };
    let report = gap_search(s.p, s.degree, &cfg)?;
    let table = report.table();
    let summary = table.lines().map(str::to_string).collect();
    Ok(Outcome::new(to_json(&report)?, summary).with_csv(table))
}

// ── report ─────────────────────────────────────────────────────────────

#[derive(Args, Debug, Serialize)]
pub struct ReportArgs {
    /// Run-record JSON files.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    files: Vec<PathBuf>,
    /// Re-run each record and compare the results bit for bit.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    replay: bool,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSettings {
    files: Vec<PathBuf>,
    replay: bool,
    seed: u64,
}

fn run_report(s: &ReportSettings) -> Result<Outcome> {
    if s.files.is_empty() {
        return Err(CliError::Usage("no run records given".into()));
    }
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut mismatched = Vec::new();
    for path in &s.files {
        let rec: RunRecord = serde_json::from_value(config::read_json_file(path)?)
            .map_err(|e| CliError::Usage(format!("{} is not a run record: {e}", path.display())))?;
        let reproduced = if s.replay {
            let (_, outcome) = execute(&rec.command, &rec.config)?;
            Some(outcome.results == rec.results)
        } else {
            None
        };
        if reproduced == Some(false) {
            mismatched.push(path.display().to_string());
        }
        summary.push(format!(
            "{}: {} (version {}, seed {}, timestamp {}){}",
            path.display(),
            rec.command,
            rec.version,
            rec.config.get("seed").cloned().unwrap_or(Value::Null),
            rec.timestamp,
            match reproduced {
                Some(true) => ", reproduced",
                Some(false) => ", NOT reproduced",
                None => "",
            }
        ));
        rows.push(json!({
            "file": path.display().to_string(),
            "command": rec.command,
            "version": rec.version,
            "timestamp": rec.timestamp,
            "seed": rec.config.get("seed"),
            "reproduced": reproduced,
        }));
    }
    let mut out = Outcome::new(json!({ "records": rows }), summary);
    if !mismatched.is_empty() {
        out.failure = Some(format!("replay differs for {}", mismatched.join(", ")));
    }
    Ok(out)
}

// ── dispatch ───────────────────────────────────────────────────────────

pub fn defaults(name: &str) -> Result<Value> {
    match name {
        "norm" => to_json(&NormSettings::default()),
        "cbnorm" => to_json(&NormSettings {
            block: 4,
            ..Default::default()
        }),
        "sigma" => to_json(&SigmaSettings::default()),
        "dilate" => to_json(&DilateSettings::default()),
        "wick" => to_json(&WickSettings::default()),
        "qgram" => to_json(&QgramSettings::default()),
        "schoenberg" => to_json(&SchoenbergSettings::default()),
        "semigroup" => to_json(&SemigroupSettings::default()),
        "discretize" => to_json(&DiscretizeSettings::default()),
        "search" => to_json(&SearchSettings::default()),
        "report" => to_json(&ReportSettings::default()),
        other => Err(CliError::Usage(format!("unknown command {other:?}"))),
    }
}

fn step<S, F>(name: &str, config: &Value, run: F) -> Result<(Value, Outcome)>
where
    S: Serialize + DeserializeOwned,
    F: FnOnce(&S) -> Result<Outcome>,
{
    let settings: S = typed(name, config)?;
    let snapshot = to_json(&settings)?;
    Ok((snapshot, run(&settings)?))
}

/// Runs `name` with a complete settings object; returns the resolved
/// settings and the outcome.
pub fn execute(name: &str, config: &Value) -> Result<(Value, Outcome)> {
    match name {
        "norm" | "cbnorm" => step(name, config, run_norm),
        "sigma" => step(name, config, run_sigma),
        "dilate" => step(name, config, run_dilate),
        "wick" => step(name, config, run_wick),
        "qgram" => step(name, config, run_qgram),
        "schoenberg" => step(name, config, run_schoenberg),
        "semigroup" => step(name, config, run_semigroup),
        "discretize" => step(name, config, run_discretize),
        "search" => step(name, config, run_search),
        "report" => step(name, config, run_report),
        other => Err(CliError::Usage(format!("unknown command {other:?}"))),
    }
}
