//! Commands behind the `avmod` binary, kept in a library so tests can drive
//! them without spawning processes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use avmod::error::Error;
use avmod::module::{
    import_module, lie_map_order, min_annihilating_order, oracle_order, zoo, AVModule, ZooParams,
};
use avmod::poly::{parse_derivation, parse_poly};
use avmod::report::{VerificationReport, Witness};
use avmod::smash::omega;
use avmod::suite::{run_suites, RunConfig};

pub const TOOL: &str = "avmod";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Failures that stop a command before it produces a report (exit code 2).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Core(#[from] Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderSummary {
    pub module: String,
    pub dim: usize,
    pub rank: usize,
    pub order: u32,
    pub oracle: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_diagnostic: Option<String>,
    pub bound: u32,
    pub bound_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnihilatorSummary {
    pub module: String,
    pub f: String,
    pub eta: String,
    pub min_annihilating_order: u32,
    /// Inclusive range of `p` over which `Ω_p(f,η)` was checked to act as zero.
    pub verified_tail: [u32; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportEnvelope {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub results: Vec<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<OrderSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annihilator: Option<AnnihilatorSummary>,
    pub summary: Summary,
    pub exit_status: i32,
}

impl ReportEnvelope {
    fn new(command: &str, config: Value, mut results: Vec<VerificationReport>) -> Self {
        results.sort_by_cached_key(VerificationReport::sort_key);
        let passed = results.iter().filter(|r| r.passed()).count();
        let failed = results.len() - passed;
        ReportEnvelope {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            config,
            summary: Summary { total: results.len(), passed, failed },
            exit_status: i32::from(failed > 0),
            results,
            order: None,
            annihilator: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    /// Plain-text rendering of the JSON form.
    pub fn to_text(&self) -> String {
        render_text(&serde_json::to_value(self).expect("reports always serialize"))
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

fn render_text(v: &Value) -> String {
    let mut out = format!("{} {} {}\n", scalar(&v["tool"]), scalar(&v["version"]), scalar(&v["command"]));
    if let Some(cfg) = v["config"].as_object() {
        let parts: Vec<String> = cfg.iter().map(|(k, x)| format!("{k}={}", scalar(x))).collect();
        out += &format!("config: {}\n", parts.join(" "));
    }
    if let Some(o) = v["order"].as_object() {
        out += &format!(
            "{}: rank {}, order {}, oracle {}, bound {}: {}\n",
            scalar(&o["module"]),
            o["rank"],
            o["order"],
            o["oracle"],
            o["bound"],
            if o["bound_ok"] == Value::Bool(true) { "ok" } else { "violated" }
        );
        if let Some(d) = o.get("oracle_diagnostic") {
            out += &format!("oracle: {}\n", scalar(d));
        }
    }
    if let Some(a) = v["annihilator"].as_object() {
        out += &format!(
            "{}: min annihilating order {} for f = {}, eta = {} (checked p in {}..={})\n",
            scalar(&a["module"]),
            a["min_annihilating_order"],
            scalar(&a["f"]),
            scalar(&a["eta"]),
            a["verified_tail"][0],
            a["verified_tail"][1]
        );
        if let Some(n) = a.get("note") {
            out += &format!("note: {}\n", scalar(n));
        }
    }
    for r in v["results"].as_array().into_iter().flatten() {
        let status = if r["status"] == "pass" { "PASS" } else { "FAIL" };
        let inputs: Vec<String> = r["inputs"]
            .as_object()
            .into_iter()
            .flatten()
            .map(|(k, x)| format!("{k}={}", scalar(x)))
            .collect();
        out += &format!("{status} {} {}\n", scalar(&r["identity"]), inputs.join(" "));
        if let Some(w) = r.get("witness") {
            out += &format!("  witness ({}): {}\n", scalar(&w["kind"]), scalar(&w["value"]));
        }
    }
    let s = &v["summary"];
    out += &format!("summary: {} total, {} passed, {} failed\n", s["total"], s["passed"], s["failed"]);
    out
}

/// Runs the selected suites.
pub fn cmd_verify(config: &RunConfig) -> Result<ReportEnvelope, CliError> {
    let results = run_suites(config)?;
    let echo = serde_json::to_value(config).expect("config serializes");
    Ok(ReportEnvelope::new("verify", echo, results))
}

/// Loads `zoo:<name>` (with `params`) or a module-definition file.
pub fn load_module_spec(spec: &str, params: &ZooParams) -> Result<AVModule, CliError> {
    if let Some(name) = spec.strip_prefix("zoo:") {
        return Ok(zoo(name, params)?);
    }
    let text = std::fs::read_to_string(Path::new(spec))
        .map_err(|e| CliError::Io { path: spec.into(), message: e.to_string() })?;
    Ok(import_module(&text)?)
}

fn module_echo(spec: &str, params: &ZooParams) -> BTreeMap<String, Value> {
    let mut m = BTreeMap::new();
    m.insert("module".to_string(), Value::from(spec));
    if let Some(name) = spec.strip_prefix("zoo:") {
        m.insert("dim".into(), Value::from(params.dim));
        match name {
            "trivial_dmodule" | "dmodule" | "trivial" => {
                m.insert("rank".into(), Value::from(params.rank));
            }
            "jet_module" | "jets" => {
                m.insert("n".into(), Value::from(params.n));
            }
            "twist" => {
                m.insert("lambda".into(), Value::from(params.lambda.to_string()));
            }
            _ => {}
        }
    }
    m
}

/// Rank, Lie-map order, oracle order and the `rank²` bound.
pub fn cmd_order(spec: &str, params: &ZooParams, n_max: Option<u32>) -> Result<ReportEnvelope, CliError> {
    let module = load_module_spec(spec, params)?;
    let rank = module.rank();
    let bound = (rank * rank) as u32;
    let n_max = n_max.unwrap_or(bound);
    let order = lie_map_order(&module)?;
    let oracle = oracle_order(&module, n_max)?;
    let bound_ok = order <= bound;
    let mut inputs = BTreeMap::new();
    inputs.insert("module".to_string(), module.label());
    inputs.insert("rank".into(), rank.to_string());
    let witness = if oracle.order != order {
        Some(Witness::Text(format!("Lie-map order {order} but oracle order {}", oracle.order)))
    } else if !bound_ok {
        Some(Witness::Text(format!("order {order} exceeds rank^2 = {bound}")))
    } else {
        None
    };
    let report = VerificationReport::from_witness("order-bound", inputs, witness);
    let mut echo = module_echo(spec, params);
    echo.insert("n_max".into(), Value::from(n_max));
    let mut env = ReportEnvelope::new("order", serde_json::to_value(echo).expect("echo serializes"), vec![report]);
    env.order = Some(OrderSummary {
        module: module.label(),
        dim: module.dim(),
        rank,
        order,
        oracle: oracle.order,
        oracle_diagnostic: oracle.diagnostic,
        bound,
        bound_ok,
    });
    Ok(env)
}

/// Number of `p` past the minimal annihilating order that are re-checked.
pub const TAIL: u32 = 3;

/// Smallest `N` with `Ω_p(f,η)` acting as zero for `p ≥ N`, re-checked on
/// `N..=N+TAIL` through the full `A#V` action.
pub fn cmd_annihilator(spec: &str, params: &ZooParams, f: &str, eta: &str) -> Result<ReportEnvelope, CliError> {
    let module = load_module_spec(spec, params)?;
    let d = module.dim();
    let (fp, e) = (parse_poly(f, d)?, parse_derivation(eta, d)?);
    let n = min_annihilating_order(&module, &fp, &e)?;
    let mut results = Vec::new();
    for p in n..=n + TAIL {
        let op = module.smash_operator(&omega(p, &fp, &e)?);
        let mut inputs = BTreeMap::new();
        inputs.insert("module".to_string(), module.label());
        inputs.insert("f".into(), fp.to_string());
        inputs.insert("eta".into(), e.to_string());
        inputs.insert("p".into(), p.to_string());
        let witness = (!op.is_zero()).then(|| Witness::Matrix(op.matrix.to_strings()));
        results.push(VerificationReport::from_witness("annihilates", inputs, witness));
    }
    // the step below N must not annihilate, or N was not minimal
    if n > 1 {
        let below = module.smash_operator(&omega(n - 1, &fp, &e)?);
        let mut inputs = BTreeMap::new();
        inputs.insert("module".to_string(), module.label());
        inputs.insert("p".into(), (n - 1).to_string());
        let witness = below.is_zero().then(|| Witness::Text(format!("Ω_{} already acts as zero", n - 1)));
        results.push(VerificationReport::from_witness("minimal", inputs, witness));
    }
    let mut echo = module_echo(spec, params);
    echo.insert("f".into(), Value::from(f));
    echo.insert("eta".into(), Value::from(eta));
    let mut env = ReportEnvelope::new("annihilator", serde_json::to_value(echo).expect("echo serializes"), results);
    env.annihilator = Some(AnnihilatorSummary {
        module: module.label(),
        f: fp.to_string(),
        eta: e.to_string(),
        min_annihilating_order: n,
        verified_tail: [n, n + TAIL],
        note: fp.is_constant().then(|| "Ω_p(const,·)=0".to_string()),
    });
    Ok(env)
}
