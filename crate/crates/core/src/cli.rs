//! Command-line front end. `run` returns the exit status and the text for
//! standard output so it can be driven from tests without a subprocess.
//!
//! Exit status: 0 when the condition holds or a certificate was found,
//! 1 when it is violated or no certificate was found, 2 on usage or input
//! errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use crate::cluster::{check_cluster, cluster_bound, find_y, SearchOptions, SearchStatus, WeightVector};
use crate::error::{Error, Result};
use crate::graph::{parse_graph, Graph};
use crate::numeric::{parse_rational, parse_vector_json, Mode, NumericPolicy, Rational, Scalar};
use crate::oracle::{
    check_lopsided_condition, find_cluster_ratio_violation, find_shearer_ratio_violation,
    prob_none, random_product_space, tight_instance, verify_bound, verify_fundamental_inequality,
    Atom, FiniteSpace,
};
use crate::shearer::{check_shearer, ProbVector};
use crate::symmetric::symmetric_thresholds;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    CheckShearer,
    CheckCluster,
    FindY,
    Bound,
    Thresholds,
    TightInstance,
    Verify,
    Compare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Output {
    #[default]
    Json,
    Table,
}

/// Certify Lovász Local Lemma conditions on a dependency graph.
#[derive(Clone, Debug, Parser)]
#[command(name = "lll-certify", version)]
pub struct RunConfig {
    pub command: Command,
    /// Graph file: JSON `{"n":..,"edges":[[i,j],..]}` or an `n <int>` edge list.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Probabilities: a file, inline JSON (`{"uniform":..}` / `{"values":[..]}`),
    /// a comma-separated list, or a single value applied to every vertex.
    #[arg(long = "p", allow_hyphen_values = true)]
    pub prob_spec: Option<String>,
    /// Cluster weights, same forms as --p.
    #[arg(long = "y")]
    pub y_spec: Option<String>,
    /// Degree or inclusive range `LO..HI` for `thresholds`.
    #[arg(long)]
    pub d: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, default_value_t = crate::numeric::DEFAULT_EPSILON)]
    pub eps: f64,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub cap: Option<f64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    #[arg(long, value_enum, default_value_t = Output::Json)]
    pub output: Output,
    /// Seed of a generated product space for `verify`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Probability space JSON for `verify`.
    #[arg(long)]
    pub space: Option<PathBuf>,
}

pub struct Outcome {
    pub status: i32,
    pub stdout: String,
}

/// Parses `args` (including the program name) and runs the command.
/// Usage and input errors are returned as exit status 2 with a message.
pub fn main_with_args<I, T>(args: I) -> (Outcome, Option<String>)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let status = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if status == 0 {
                (Outcome { status, stdout: text }, None)
            } else {
                (Outcome { status, stdout: String::new() }, Some(text))
            };
        }
    };
    match run(&config) {
        Ok(out) => (out, None),
        Err(e) => (
            Outcome {
                status: 2,
                stdout: String::new(),
            },
            Some(format!("error: {e}")),
        ),
    }
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    match config.command {
        Command::CheckShearer => check_shearer_cmd(config),
        Command::CheckCluster => check_cluster_cmd(config),
        Command::FindY => find_y_cmd(config),
        Command::Bound => bound_cmd(config),
        Command::Thresholds => thresholds_cmd(config),
        Command::TightInstance => tight_instance_cmd(config),
        Command::Verify => verify_cmd(config),
        Command::Compare => compare_cmd(config),
    }
}

fn missing(flag: &str, config: &RunConfig) -> Error {
    Error::InvalidArgument(format!(
        "{flag} is required for {}",
        config.command.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    ))
}

fn load_graph(config: &RunConfig) -> Result<Graph> {
    let path = config.graph.as_ref().ok_or_else(|| missing("--graph", config))?;
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::InvalidArgument(format!("cannot read graph {}: {e}", path.display()))
    })?;
    parse_graph(&text)
}

/// Resolves a vector spec to a JSON vector document.
fn vector_document(spec: &str) -> Result<String> {
    let trimmed = spec.trim();
    if trimmed.starts_with('{') {
        return Ok(trimmed.to_string());
    }
    let path = Path::new(trimmed);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        return vector_document_from_text(&text);
    }
    vector_document_from_text(trimmed)
}

fn vector_document_from_text(text: &str) -> Result<String> {
    let t = text.trim();
    if t.starts_with('{') {
        return Ok(t.to_string());
    }
    let parts: Vec<&str> = t.split(',').map(str::trim).collect();
    for part in &parts {
        parse_rational(part)?;
    }
    Ok(if parts.len() == 1 {
        json!({ "uniform": parts[0] }).to_string()
    } else {
        json!({ "values": parts }).to_string()
    })
}

fn load_probs<S: Scalar>(config: &RunConfig, n: usize) -> Result<ProbVector<S>> {
    let spec = config.prob_spec.as_deref().ok_or_else(|| missing("--p", config))?;
    ProbVector::new(parse_vector_json(&vector_document(spec)?, n)?)
}

fn load_weights<S: Scalar>(config: &RunConfig, n: usize) -> Result<Option<WeightVector<S>>> {
    match config.y_spec.as_deref() {
        None => Ok(None),
        Some(spec) => Ok(Some(WeightVector::new(parse_vector_json(&vector_document(spec)?, n)?)?)),
    }
}

fn mode_or(config: &RunConfig, default: Mode) -> Mode {
    match config.mode {
        Some(ModeArg::Exact) => Mode::Exact,
        Some(ModeArg::Float) => Mode::Float,
        None => default,
    }
}

fn policy_for(mode: Mode, config: &RunConfig) -> Result<NumericPolicy> {
    match mode {
        Mode::Exact => Ok(NumericPolicy::exact()),
        Mode::Float => NumericPolicy::float(config.eps),
    }
}

fn search_options(config: &RunConfig) -> Result<SearchOptions> {
    let mut opts = SearchOptions {
        epsilon: config.eps,
        ..SearchOptions::default()
    };
    if let Some(t) = config.tol {
        opts.tol = t;
    }
    if let Some(c) = config.cap {
        opts.cap = c;
    }
    if let Some(m) = config.max_iter {
        opts.max_iter = m;
    }
    opts.validate()?;
    Ok(opts)
}

fn render(config: &RunConfig, value: &Value, table: impl FnOnce() -> String) -> String {
    match config.output {
        Output::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("serializable");
            s.push('\n');
            s
        }
        Output::Table => table(),
    }
}

fn show(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn status(ok: bool) -> i32 {
    if ok {
        0
    } else {
        1
    }
}

fn check_shearer_cmd(config: &RunConfig) -> Result<Outcome> {
    let g = load_graph(config)?;
    let mode = mode_or(config, Mode::Exact);
    let policy = policy_for(mode, config)?;
    let (json, holds) = match mode {
        Mode::Exact => {
            let r = check_shearer(&g, &load_probs::<Rational>(config, g.n())?, &policy)?;
            (r.to_json(), r.holds)
        }
        Mode::Float => {
            let r = check_shearer(&g, &load_probs::<f64>(config, g.n())?, &policy)?;
            (r.to_json(), r.holds)
        }
    };
    let stdout = render(config, &json, || {
        let mut s = String::new();
        let verdict = match (holds, json["degenerate"].as_bool() == Some(true)) {
            (true, true) => "holds (degenerate: bound is 0)",
            (true, false) => "holds",
            (false, _) => "violated",
        };
        let _ = writeln!(s, "shearer condition: {verdict}");
        let _ = writeln!(s, "bound:             {}", show(&json["bound"]));
        let _ = writeln!(s, "violating set:     {}", show(&json["violating_set"]));
        let _ = writeln!(s, "n = {}, mode = {}", json["n"], show(&json["mode"]));
        s
    });
    Ok(Outcome {
        status: status(holds),
        stdout,
    })
}

fn cluster_table(json: &Value) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "cluster condition: {}",
        if json["holds"].as_bool() == Some(true) { "holds" } else { "violated for these weights" }
    );
    let _ = writeln!(s, "bound: {}", show(&json["bound"]));
    let _ = writeln!(s, "{:>6}  {:>24}  {:>24}", "vertex", "y", "slack");
    let ys = json["y"].as_array().cloned().unwrap_or_default();
    let slack = json["slack"].as_array().cloned().unwrap_or_default();
    for (i, (y, sl)) in ys.iter().zip(&slack).enumerate() {
        let _ = writeln!(s, "{:>6}  {:>24}  {:>24}", i + 1, show(y), show(sl));
    }
    s
}

fn check_cluster_cmd(config: &RunConfig) -> Result<Outcome> {
    let g = load_graph(config)?;
    let mode = mode_or(config, Mode::Exact);
    let policy = policy_for(mode, config)?;
    let (json, holds) = match mode {
        Mode::Exact => {
            let p = load_probs::<Rational>(config, g.n())?;
            let y = load_weights(config, g.n())?.ok_or_else(|| missing("--y", config))?;
            let r = check_cluster(&g, &p, &y, &policy)?;
            (r.to_json(), r.holds)
        }
        Mode::Float => {
            let p = load_probs::<f64>(config, g.n())?;
            let y = load_weights(config, g.n())?.ok_or_else(|| missing("--y", config))?;
            let r = check_cluster(&g, &p, &y, &policy)?;
            (r.to_json(), r.holds)
        }
    };
    let stdout = render(config, &json, || cluster_table(&json));
    Ok(Outcome {
        status: status(holds),
        stdout,
    })
}

fn find_y_cmd(config: &RunConfig) -> Result<Outcome> {
    let g = load_graph(config)?;
    let mode = mode_or(config, Mode::Float);
    let p = load_probs::<Rational>(config, g.n())?;
    let cert = find_y(&g, &p, &search_options(config)?)?;
    let ok = match mode {
        Mode::Float => cert.converged,
        Mode::Exact => cert.status == SearchStatus::Certified,
    };
    let json = cert.to_json();
    let stdout = render(config, &json, || {
        let mut s = format!(
            "search: {} after {} iterations\n",
            cert.status.as_str(),
            cert.iterations
        );
        if cert.converged {
            s.push_str(&cluster_table(&json));
        }
        s
    });
    Ok(Outcome {
        status: status(ok),
        stdout,
    })
}

fn bound_cmd(config: &RunConfig) -> Result<Outcome> {
    let g = load_graph(config)?;
    let mode = mode_or(config, Mode::Exact);
    let policy = policy_for(mode, config)?;
    let json = if config.y_spec.is_some() {
        let b = match mode {
            Mode::Exact => cluster_bound(&g, &load_weights::<Rational>(config, g.n())?.expect("y given"))?.to_json(),
            Mode::Float => cluster_bound(&g, &load_weights::<f64>(config, g.n())?.expect("y given"))?.to_json(),
        };
        json!({ "method": "cluster", "bound": b, "n": g.n(), "mode": mode.as_str() })
    } else {
        let r = match mode {
            Mode::Exact => check_shearer(&g, &load_probs::<Rational>(config, g.n())?, &policy)?.to_json(),
            Mode::Float => check_shearer(&g, &load_probs::<f64>(config, g.n())?, &policy)?.to_json(),
        };
        json!({ "method": "shearer", "bound": r["bound"], "n": g.n(), "mode": mode.as_str() })
    };
    let ok = !json["bound"].is_null();
    let stdout = render(config, &json, || {
        format!("{} bound: {}\n", show(&json["method"]), show(&json["bound"]))
    });
    Ok(Outcome {
        status: status(ok),
        stdout,
    })
}

fn parse_degree_range(spec: &str) -> Result<(u64, u64)> {
    let bad = || Error::InvalidArgument(format!("bad --d `{spec}`, expected INT or LO..HI"));
    let (lo, hi) = match spec.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let d = spec.trim().parse().map_err(|_| bad())?;
            (d, d)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn thresholds_cmd(config: &RunConfig) -> Result<Outcome> {
    let spec = config.d.as_deref().ok_or_else(|| missing("--d", config))?;
    let (lo, hi) = parse_degree_range(spec)?;
    let rows = (lo..=hi)
        .map(symmetric_thresholds)
        .collect::<Result<Vec<_>>>()?;
    let json = json!({ "rows": rows.iter().map(|r| r.to_json()).collect::<Vec<_>>() });
    let stdout = render(config, &json, || {
        let mut s = format!(
            "{:>4}  {:>20}  {:>20}  {:>20}  {:>12}\n",
            "d", "1/(4d)", "d^d/(d+1)^(d+1)", "(d-1)^(d-1)/d^d", "1/(ed)"
        );
        for r in &rows {
            let _ = writeln!(
                s,
                "{:>4}  {:>20}  {:>20}  {:>20}  {:>12.8}",
                r.d, r.erdos_lovasz, r.spencer, r.shearer, r.cluster_ed
            );
        }
        s
    });
    Ok(Outcome { status: 0, stdout })
}

fn tight_instance_cmd(config: &RunConfig) -> Result<Outcome> {
    let g = load_graph(config)?;
    let mode = mode_or(config, Mode::Exact);
    let policy = policy_for(mode, config)?;
    let result = match mode {
        Mode::Exact => tight_instance(&g, &load_probs::<Rational>(config, g.n())?, &policy).map(|s| s.to_json()),
        Mode::Float => tight_instance(&g, &load_probs::<f64>(config, g.n())?, &policy).map(|s| s.to_json()),
    };
    match result {
        Ok(json) => {
            let stdout = render(config, &json, || {
                let mut s = format!("{:>24}  events\n", "weight");
                for atom in json["atoms"].as_array().into_iter().flatten() {
                    let _ = writeln!(s, "{:>24}  {}", show(&atom["w"]), atom["events"]);
                }
                s
            });
            Ok(Outcome { status: 0, stdout })
        }
        Err(Error::ShearerFails { violating }) => {
            let json = json!({ "error": "shearer condition fails", "violating_set": violating });
            let stdout = render(config, &json, || {
                format!("shearer condition fails at {violating:?}; no tight instance\n")
            });
            Ok(Outcome { status: 1, stdout })
        }
        Err(e) => Err(e),
    }
}

fn float_space(space: &FiniteSpace<Rational>) -> Result<FiniteSpace<f64>> {
    let atoms = space
        .atoms()
        .iter()
        .map(|a| Atom {
            events: a.events,
            weight: a.weight.to_f64(),
        })
        .collect();
    FiniteSpace::new(space.n(), atoms, &NumericPolicy::float(crate::numeric::DEFAULT_EPSILON)?)
}

fn float_probs(p: &ProbVector<Rational>) -> ProbVector<f64> {
    p.to_float()
}

/// Runs every probability-side check on one space; returns the JSON report
/// and whether all checks that apply passed.
fn verify_suite<S: Scalar>(
    g: &Graph,
    space: &FiniteSpace<S>,
    p: &ProbVector<S>,
    y: Option<&WeightVector<S>>,
    policy: &NumericPolicy,
) -> Result<(Value, bool)> {
    let mut checks = serde_json::Map::new();
    let mut ok = true;
    let mut record = |name: &str, passed: bool, detail: Value| {
        ok &= passed;
        checks.insert(name.into(), json!({ "pass": passed, "detail": detail }));
    };

    let total_ok = policy.eq(&space.total_weight(), &S::one())?;
    record("weights_sum_to_one", total_ok, space.total_weight().to_json());

    let lop = check_lopsided_condition(space, g, p, policy)?;
    record(
        "lopsided_condition",
        lop.holds,
        json!({
            "equality_throughout": lop.equality,
            "checked": lop.checked,
            "skipped_null": lop.skipped_null,
            "witness": lop.witness.map(|(i, j)| json!({ "i": i + 1, "J": j.to_one_based() })),
        }),
    );

    let fund = verify_fundamental_inequality(space, g, p, policy)?;
    record("fundamental_inequality", fund, Value::Null);

    let shearer = check_shearer(g, p, policy)?;
    if shearer.holds {
        let b = verify_bound(space, g, p, policy)?;
        record(
            "shearer_bound",
            b.all_hold,
            json!({ "worst_gap": b.worst_gap.to_json(), "worst_set": b.worst_set.to_one_based() }),
        );
        let ratio = find_shearer_ratio_violation(space, g, p, policy)?;
        record(
            "shearer_ratio_chain",
            ratio.is_none(),
            json!(ratio.map(|(s, a)| json!({ "S": s.to_one_based(), "a": a + 1 }))),
        );
    }

    if let Some(y) = y {
        let cl = check_cluster(g, p, y, policy)?;
        if cl.holds {
            let chain = find_cluster_ratio_violation(space, g, y, policy)?;
            record(
                "cluster_ratio_chain",
                chain.is_none(),
                json!(chain.map(|(s, a)| json!({ "S": s.to_one_based(), "a": a + 1 }))),
            );
            let bound = cl.bound.clone().expect("holds");
            let none_all = prob_none(space, g.vertices());
            record(
                "cluster_bound",
                policy.ge(&none_all, &bound)?,
                json!({ "prob_none": none_all.to_json(), "bound": bound.to_json() }),
            );
        } else {
            record("cluster_condition", false, json!("given y does not satisfy the condition"));
        }
    }

    let report = json!({
        "n": g.n(),
        "mode": S::MODE.as_str(),
        "shearer_holds": shearer.holds,
        "checks": Value::Object(checks),
        "all_pass": ok,
    });
    Ok((report, ok))
}

fn verify_cmd(config: &RunConfig) -> Result<Outcome> {
    let g = load_graph(config)?;
    let mode = mode_or(config, Mode::Exact);
    let policy = policy_for(mode, config)?;
    let exact = NumericPolicy::exact();
    let (space, p, source) = if let Some(path) = &config.space {
        let text = std::fs::read_to_string(path)?;
        let space = FiniteSpace::<Rational>::from_json(&text, &exact)?;
        (space, load_probs::<Rational>(config, g.n())?, "file")
    } else if let Some(seed) = config.seed {
        let (space, p) = random_product_space(&g, seed)?;
        (space, p, "product")
    } else {
        let p = load_probs::<Rational>(config, g.n())?;
        (tight_instance(&g, &p, &exact)?, p, "tight")
    };
    let y = match load_weights::<Rational>(config, g.n())? {
        Some(y) => Some(y),
        None => {
            let cert = find_y(&g, &p, &SearchOptions::default())?;
            cert.exact_y().cloned()
        }
    };
    let (mut json, ok) = match mode {
        Mode::Exact => verify_suite(&g, &space, &p, y.as_ref(), &policy)?,
        Mode::Float => {
            let yf = match &y {
                Some(y) => Some(WeightVector::new(y.as_slice().iter().map(Scalar::to_f64).collect())?),
                None => None,
            };
            verify_suite(&g, &float_space(&space)?, &float_probs(&p), yf.as_ref(), &policy)?
        }
    };
    json["space"] = json!(source);
    let stdout = render(config, &json, || {
        let mut s = format!("space: {source}, n = {}\n", g.n());
        if let Some(obj) = json["checks"].as_object() {
            for (name, c) in obj {
                let pass = c["pass"].as_bool() == Some(true);
                let _ = writeln!(s, "[{}] {name}", if pass { "PASS" } else { "FAIL" });
            }
        }
        s
    });
    Ok(Outcome {
        status: status(ok),
        stdout,
    })
}

fn compare_cmd(config: &RunConfig) -> Result<Outcome> {
    let g = load_graph(config)?;
    let p = load_probs::<Rational>(config, g.n())?;
    let shearer = check_shearer(&g, &p, &NumericPolicy::exact())?;
    let cert = find_y(&g, &p, &search_options(config)?)?;

    let cluster_bound_value = cert
        .exact_report
        .as_ref()
        .and_then(|r| r.bound.clone());
    let ordering_ok = match (&shearer.bound, &cluster_bound_value) {
        (Some(s), Some(c)) => Some(s >= c),
        _ => None,
    };

    let mut rows = vec![
        json!({
            "method": "shearer",
            "status": if shearer.holds { "holds" } else { "violated" },
            "bound": shearer.bound.as_ref().map(Scalar::to_json),
            "degenerate": shearer.degenerate,
        }),
        json!({
            "method": "cluster",
            "status": match cert.status {
                SearchStatus::Certified => "certified",
                SearchStatus::FloatOnly => "certified (float only)",
                _ => "not-certified",
            },
            "detail": cert.status.as_str(),
            "bound": match (&cluster_bound_value, &cert.float_report) {
                (Some(b), _) => b.to_json(),
                (None, Some(r)) => json!(r.bound),
                (None, None) => Value::Null,
            },
        }),
    ];

    let d = g.max_degree() as u64;
    let max_p = p
        .as_slice()
        .iter()
        .max()
        .cloned()
        .unwrap_or_else(|| Rational::from_integer(0.into()));
    if d >= 2 {
        let t = symmetric_thresholds(d)?;
        let within = |thr: &Rational| &max_p <= thr;
        for (name, thr) in [
            ("symmetric 1/(4d)", t.erdos_lovasz.to_json()),
            ("symmetric d^d/(d+1)^(d+1)", t.spencer.to_json()),
            ("symmetric (d-1)^(d-1)/d^d", t.shearer.to_json()),
        ] {
            let thr_r = Rational::from_json(&thr)?;
            rows.push(json!({
                "method": name,
                "status": if within(&thr_r) { "applies" } else { "does not apply" },
                "threshold": thr,
            }));
        }
        rows.push(json!({
            "method": "symmetric 1/(ed)",
            "status": if max_p.to_f64() <= t.cluster_ed { "applies" } else { "does not apply" },
            "threshold": t.cluster_ed,
        }));
    }

    let json = json!({
        "n": g.n(),
        "max_degree": d,
        "max_p": max_p.to_json(),
        "rows": rows,
        "shearer_ge_cluster": ordering_ok,
    });
    let stdout = render(config, &json, || {
        let mut s = format!("{:<30}  {:<24}  {}\n", "method", "status", "bound / threshold");
        for r in json["rows"].as_array().into_iter().flatten() {
            let value = if r["bound"].is_null() { &r["threshold"] } else { &r["bound"] };
            let _ = writeln!(s, "{:<30}  {:<24}  {}", show(&r["method"]), show(&r["status"]), show(value));
        }
        s
    });
    Ok(Outcome {
        status: status(shearer.holds),
        stdout,
    })
}
