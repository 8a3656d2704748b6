//! Job specifications and dispatch: one JSON job in, one JSON report out.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use pitensor::attain::{
    caratheodory_reduce, certify_attainment, extract_attainment_pairs, perturb_to_attaining,
    Verdict,
};
use pitensor::linalg::Mat;
use pitensor::pi_property::approx_pipeline;
use pitensor::projnorm::{
    nuclear_norm, operator_norm, proj_norm, proj_norm_colgen, proj_norm_exact_polyhedral,
    proj_norm_oracle_hilbert, proj_norm_oracle_l1, CertStatus, OpNormStatus,
};
use pitensor::tensor::{injective_norm, pairing, InjMethod};
use pitensor::{
    Decomposition64, DualOperator64, Error, SeriesTensor64, SolverConfig, Space64, Tensor64,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ProjNorm,
    InjNorm,
    NuclearNorm,
    OpNorm,
    Certify,
    Reduce,
    ExtractPairs,
    Perturb,
    Pipeline,
    Selftest,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::ProjNorm => "proj-norm",
            Command::InjNorm => "inj-norm",
            Command::NuclearNorm => "nuclear-norm",
            Command::OpNorm => "op-norm",
            Command::Certify => "certify",
            Command::Reduce => "reduce",
            Command::ExtractPairs => "extract-pairs",
            Command::Perturb => "perturb",
            Command::Pipeline => "pipeline",
            Command::Selftest => "selftest",
        }
    }
}

/// Inputs accepted by the commands; unknown fields are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    pub tensor: Option<Tensor64>,
    pub decomposition: Option<Decomposition64>,
    /// Dual operator coefficients, `dim(X) x dim(Y)`.
    pub dual: Option<Vec<Vec<f64>>>,
    #[serde(rename = "X")]
    pub x: Option<Space64>,
    #[serde(rename = "Y")]
    pub y: Option<Space64>,
    /// Operator coefficient matrix for `nuclear-norm`.
    pub matrix: Option<Vec<Vec<f64>>>,
    pub series: Option<SeriesTensor64>,
    pub eta: Option<f64>,
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    #[serde(default)]
    pub inputs: Inputs,
    #[serde(default)]
    pub config: SolverConfig,
}

/// Exit codes: 0 success, 2 inconclusive or heuristic result, 3 refuted
/// certificate, 4 input error, 5 budget exceeded.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub result: Value,
    pub timing_ms: u64,
    pub warnings: Vec<String>,
    pub exit_code: i32,
}

pub fn run(job: &JobSpec) -> Report {
    let mut config = job.config.clone();
    if let Ok(seed) = std::env::var("PITENSOR_SEED") {
        if let Ok(seed) = seed.parse::<u64>() {
            config.seed = seed;
        }
    }
    let start = Instant::now();
    let outcome = dispatch(job.command, &job.inputs, &config);
    let timing_ms = start.elapsed().as_millis() as u64;
    match outcome {
        Ok((result, warnings, exit_code)) => Report {
            command: job.command.name().to_string(),
            result,
            timing_ms,
            warnings,
            exit_code,
        },
        Err(e) => Report {
            command: job.command.name().to_string(),
            result: json!({ "error": e.to_string() }),
            timing_ms,
            warnings: vec![],
            exit_code: e.exit_code(),
        },
    }
}

type Outcome = Result<(Value, Vec<String>, i32), Error>;

fn dispatch(command: Command, inputs: &Inputs, config: &SolverConfig) -> Outcome {
    match command {
        Command::ProjNorm => proj_norm_job(inputs, config),
        Command::InjNorm => inj_norm_job(inputs, config),
        Command::NuclearNorm => nuclear_norm_job(inputs, config),
        Command::OpNorm => op_norm_job(inputs, config),
        Command::Certify => certify_job(inputs, config),
        Command::Reduce => reduce_job(inputs),
        Command::ExtractPairs => extract_pairs_job(inputs, config),
        Command::Perturb => perturb_job(inputs, config),
        Command::Pipeline => pipeline_job(inputs, config),
        Command::Selftest => selftest_job(config),
    }
}

fn need<'a, V>(opt: &'a Option<V>, what: &'static str) -> Result<&'a V, Error> {
    opt.as_ref().ok_or(Error::PreconditionViolated(what))
}

fn dual_from_inputs(
    inputs: &Inputs,
    x: &Space64,
    y: &Space64,
) -> Result<DualOperator64, Error> {
    let rows = need(&inputs.dual, "missing input: dual")?;
    DualOperator64::new(x.clone(), y.clone(), Mat::from_rows(rows))
}

fn spaces_of_tensor(t: &Tensor64) -> (Space64, Space64) {
    (t.x_space().clone(), t.y_space().clone())
}

fn proj_result_flags(r: &pitensor::ProjNormResult64, tol: f64) -> (Vec<String>, i32) {
    let mut warnings = Vec::new();
    let mut code = 0;
    match r.op_norm_status {
        CertStatus::Exact => {}
        CertStatus::UpperBounded => {
            warnings.push("lower bound certified only through a crude norm bound".into());
            code = 2;
        }
        CertStatus::Heuristic => {
            warnings.push("dual operator norm is heuristic; lower bound unverified".into());
            code = 2;
        }
    }
    if let Some(last) = r.iterations.last() {
        if last.priced_value > 1.0 + tol {
            warnings.push(format!(
                "column generation stopped with priced value {:.3e} above 1 + tol",
                last.priced_value
            ));
            code = 5;
        }
    }
    (warnings, code)
}

fn proj_norm_job(inputs: &Inputs, config: &SolverConfig) -> Outcome {
    let t = need(&inputs.tensor, "missing input: tensor")?;
    let r = proj_norm(t, config)?;
    let (warnings, code) = proj_result_flags(&r, config.tol);
    Ok((serde_json::to_value(&r).unwrap(), warnings, code))
}

fn inj_norm_job(inputs: &Inputs, config: &SolverConfig) -> Outcome {
    let t = need(&inputs.tensor, "missing input: tensor")?;
    let r = injective_norm(t, config)?;
    let heuristic = r.method == InjMethod::HeuristicLowerBound;
    let result = json!({
        "value": r.value,
        "method": serde_json::to_value(r.method).unwrap(),
        "x_star": r.x_star.coords,
        "y_star": r.y_star.coords,
    });
    if heuristic {
        Ok((
            result,
            vec!["value is a search lower bound, not certified exact".into()],
            2,
        ))
    } else {
        Ok((result, vec![], 0))
    }
}

fn nuclear_norm_job(inputs: &Inputs, config: &SolverConfig) -> Outcome {
    let x = need(&inputs.x, "missing input: X")?;
    let y = need(&inputs.y, "missing input: Y")?;
    let rows = need(&inputs.matrix, "missing input: matrix")?;
    let r = nuclear_norm(&Mat::from_rows(rows), x, y, config)?;
    let (warnings, code) = proj_result_flags(&r, config.tol);
    Ok((serde_json::to_value(&r).unwrap(), warnings, code))
}

fn op_norm_job(inputs: &Inputs, config: &SolverConfig) -> Outcome {
    let x = need(&inputs.x, "missing input: X")?;
    let y = need(&inputs.y, "missing input: Y")?;
    let g = dual_from_inputs(inputs, x, y)?;
    let r = operator_norm(&g, config)?;
    let code = if r.status == OpNormStatus::Exact { 0 } else { 2 };
    let warnings = if code == 2 {
        vec!["operator norm is a search lower bound".into()]
    } else {
        vec![]
    };
    Ok((serde_json::to_value(&r).unwrap(), warnings, code))
}

fn certify_job(inputs: &Inputs, config: &SolverConfig) -> Outcome {
    let t = need(&inputs.tensor, "missing input: tensor")?;
    let d = need(&inputs.decomposition, "missing input: decomposition")?;
    let (x, y) = spaces_of_tensor(t);
    let g = dual_from_inputs(inputs, &x, &y)?;
    let c = certify_attainment(t, d, &g, config.tol, config)?;
    let code = match c.verdict {
        Verdict::Certified => 0,
        Verdict::Inconclusive => 2,
        Verdict::Refuted => 3,
    };
    Ok((serde_json::to_value(&c).unwrap(), vec![], code))
}

fn reduce_job(inputs: &Inputs) -> Outcome {
    let x = need(&inputs.x, "missing input: X")?;
    let y = need(&inputs.y, "missing input: Y")?;
    let d = need(&inputs.decomposition, "missing input: decomposition")?;
    let r = caratheodory_reduce(d, x, y)?;
    let result = json!({
        "atoms_before": d.len(),
        "atoms_after": r.len(),
        "decomposition": serde_json::to_value(&r).unwrap(),
    });
    Ok((result, vec![], 0))
}

fn extract_pairs_job(inputs: &Inputs, config: &SolverConfig) -> Outcome {
    let t = need(&inputs.tensor, "missing input: tensor")?;
    let d = need(&inputs.decomposition, "missing input: decomposition")?;
    let (x, y) = spaces_of_tensor(t);
    let g = dual_from_inputs(inputs, &x, &y)?;
    let pairs = extract_attainment_pairs(&g, t, d, config.tol, config)?;
    let result = json!({
        "pairs": pairs
            .into_iter()
            .map(|(px, py)| json!({"x": px, "y": py}))
            .collect::<Vec<_>>(),
    });
    Ok((result, vec![], 0))
}

fn perturb_job(inputs: &Inputs, config: &SolverConfig) -> Outcome {
    let x = need(&inputs.x, "missing input: X")?;
    let y = need(&inputs.y, "missing input: Y")?;
    let d = need(&inputs.decomposition, "missing input: decomposition")?;
    let g = dual_from_inputs(inputs, x, y)?;
    let eta = *need(&inputs.eta, "missing input: eta")?;
    let eps = *need(&inputs.eps, "missing input: eps")?;
    let (out, report) = perturb_to_attaining(d, &g, eta, eps, config)?;
    let code = if report.certificate.verdict == Verdict::Certified {
        0
    } else {
        2
    };
    let result = json!({
        "decomposition": serde_json::to_value(&out).unwrap(),
        "report": serde_json::to_value(&report).unwrap(),
    });
    Ok((result, vec![], code))
}

fn pipeline_job(inputs: &Inputs, config: &SolverConfig) -> Outcome {
    let x = need(&inputs.x, "missing input: X")?;
    let y = need(&inputs.y, "missing input: Y")?;
    let u = need(&inputs.series, "missing input: series")?;
    let eps = *need(&inputs.eps, "missing input: eps")?;
    let r = approx_pipeline(u, eps, x, y, config)?;
    let warnings = r.warnings.clone();
    let code = if warnings.is_empty() && r.certificate.verdict == Verdict::Certified {
        0
    } else {
        2
    };
    Ok((serde_json::to_value(&r).unwrap(), warnings, code))
}

/// Compact oracle-equivalence and invariant suite; reports per-check status.
fn selftest_job(config: &SolverConfig) -> Outcome {
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    let mut checks: Vec<(String, bool, String)> = Vec::new();
    let mut check = |name: &str, pass: bool, detail: String| {
        checks.push((name.to_string(), pass, detail));
    };

    let random_tensor = |x: &Space64, y: &Space64, seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = Mat::from_fn(x.dim(), y.dim(), |_, _| rng.gen_range(-1.0..=1.0));
        Tensor64::new(x.clone(), y.clone(), m).unwrap()
    };

    // trace-norm equivalence
    let l2a = Space64::l2(4);
    let l2b = Space64::l2(3);
    for seed in 0..3u64 {
        let t = random_tensor(&l2a, &l2b, 10 + seed);
        let o = proj_norm_oracle_hilbert(&t).unwrap();
        let c = proj_norm_colgen(&t, config).unwrap();
        let rel = (c.upper - o.upper).abs() / o.upper;
        check(
            "hilbert_oracle_equivalence",
            rel <= 1e-5,
            format!("seed {seed}: relative difference {rel:.2e}"),
        );
    }

    // row-sum equivalence
    let l1 = Space64::l1(4);
    let linf = Space64::linf(3);
    for seed in 0..3u64 {
        let t = random_tensor(&l1, &linf, 20 + seed);
        let o = proj_norm_oracle_l1(&t).unwrap();
        let c = proj_norm_colgen(&t, config).unwrap();
        let rel = (c.upper - o.upper).abs() / o.upper;
        check(
            "l1_oracle_equivalence",
            rel <= 1e-6,
            format!("seed {seed}: relative difference {rel:.2e}"),
        );
    }

    // vertex-pair program on the sup-norm identity
    let linf2 = Space64::linf(2);
    let t = Tensor64::new(linf2.clone(), linf2.clone(), Mat::identity(2)).unwrap();
    let r = proj_norm_exact_polyhedral(&t, config).unwrap();
    check(
        "polyhedral_identity",
        (r.upper - 1.0).abs() <= 1e-8 && r.gap().abs() <= 1e-8,
        format!("value {:.12}, gap {:.2e}", r.upper, r.gap()),
    );

    // rank-one law and the cross-norm ordering
    let lp3 = Space64::lp(pitensor::Exponent64::finite(3.0).unwrap(), 3).unwrap();
    let xv = [1.0, -0.5, 0.25];
    let yv = [0.5, 2.0, 1.0];
    let t = Tensor64::rank_one(lp3.clone(), l2b.clone(), &xv, &yv).unwrap();
    let want = lp3.norm_eval(&xv).unwrap() * l2b.norm_eval(&yv).unwrap();
    let pi = proj_norm(&t, config).unwrap();
    let eps_norm = injective_norm(&t, config).unwrap();
    check(
        "rank_one_law",
        (pi.upper - want).abs() <= 1e-8,
        format!("upper {:.12} vs product {want:.12}", pi.upper),
    );
    check(
        "epsilon_below_pi",
        eps_norm.value <= pi.upper + 1e-8,
        format!("epsilon {:.12}, pi {:.12}", eps_norm.value, pi.upper),
    );

    // certificate of the trace-norm decomposition
    let t = random_tensor(&l2a, &l2a, 77);
    let o = proj_norm_oracle_hilbert(&t).unwrap();
    let cert = certify_attainment(&t, &o.decomposition, &o.dual, 1e-6, config).unwrap();
    check(
        "hilbert_certificate",
        cert.verdict == Verdict::Certified,
        format!("verdict {:?}", cert.verdict),
    );

    // weak duality on a dispatched solve
    let t = random_tensor(&l1, &l2b, 88);
    let r = proj_norm(&t, config).unwrap();
    let g_pairing = pairing(&r.dual, &t).unwrap();
    let opn = operator_norm(&r.dual, config).unwrap();
    check(
        "weak_duality",
        g_pairing <= opn.value * r.upper + 1e-9,
        format!("pairing {g_pairing:.12} vs bound {:.12}", opn.value * r.upper),
    );

    let passed = checks.iter().filter(|(_, p, _)| *p).count();
    let failed = checks.len() - passed;
    let result = json!({
        "passed": passed,
        "failed": failed,
        "checks": checks
            .iter()
            .map(|(name, pass, detail)| json!({
                "name": name,
                "pass": pass,
                "detail": detail,
            }))
            .collect::<Vec<_>>(),
    });
    Ok((result, vec![], if failed == 0 { 0 } else { 2 }))
}

/// One-line plain-text summary for the terminal.
pub fn summary(report: &Report) -> String {
    let mut s = format!("{}: exit {}", report.command, report.exit_code);
    for key in ["upper", "lower", "gap", "value", "verdict", "passed", "failed", "k"] {
        if let Some(v) = report.result.get(key) {
            s.push_str(&format!(" {key}={v}"));
        }
    }
    if !report.warnings.is_empty() {
        s.push_str(&format!(" warnings={}", report.warnings.len()));
    }
    s
}
