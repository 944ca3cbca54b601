//! Batch pipeline: problem files in, structured reports out.
//!
//! A report has a `certified` section, which depends only on the problem and
//! the tool version, and a `diagnostics` section carrying seeds, random draws
//! and cache warnings. Wall-clock timings are included only on request.

pub mod cache;
pub mod problem;
pub mod quick;

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::afcheck::{af_pair_named, cor48_scenario, prop43_check};
use crate::algebra::{store, Field};
use crate::charcycle::{ch, ch_perverse, is_normal_partitioning, phi_support_locus};
use crate::cycles::{Cycle, Variety};
use crate::error::{Error, Result};
use crate::vanishing::{
    betti_transfer, critical_values, exceptional_support, phi_normality_check,
    vanishing_index_check,
};

pub use cache::{CacheStats, DiskCache};
pub use problem::{Instance, Problem, COMMANDS};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub retries: Option<u32>,
    /// Overrides the problem's field mode.
    pub field: Option<Field>,
    pub cache_dir: Option<PathBuf>,
    /// Recompute over the rationals after a modular run and compare.
    /// Defaults to on for modular fields.
    pub confirm_over_rationals: Option<bool>,
    pub timing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleTermOut {
    pub coefficient: i64,
    pub component: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<String>>,
}

pub fn cycle_out(c: &Cycle) -> Vec<CycleTermOut> {
    c.terms()
        .iter()
        .map(|t| CycleTermOut {
            coefficient: t.coefficient,
            component: t.component.generators(),
            base: t.base.as_ref().map(Variety::generators),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub problem: Value,
    pub certified: Map<String, Value>,
    pub diagnostics: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Map<String, Value>>,
    /// First failing command, if any; later commands are not run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub command: String,
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

/// Exit-code contract: 1 for malformed input and unmet preconditions,
/// 2 for exhausted genericity retries (including unlucky primes).
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Genericity { .. } | Error::UnluckyPrime(_) => 2,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } => "parse",
        Error::RingMismatch(_) => "ring-mismatch",
        Error::Validation(_) => "validation",
        Error::Precondition(_) => "precondition",
        Error::Genericity { .. } => "genericity",
        Error::UnluckyPrime(_) => "unlucky-prime",
        Error::Io(_) => "io",
    }
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        self.failure.as_ref().map_or(0, |f| f.exit_code)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Stable three-column text rendering: `command`, `item`, `value`.
    pub fn table(&self) -> String {
        let mut rows: Vec<(String, String, String)> = Vec::new();
        for (cmd, v) in &self.certified {
            flatten(cmd, "", v, &mut rows);
        }
        if let Some(f) = &self.failure {
            rows.push((f.command.clone(), f.kind.clone(), f.message.clone()));
        }
        let w0 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(7);
        let w1 = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max(4);
        let mut out = format!("{:w0$}  {:w1$}  value\n", "command", "item");
        for (a, b, c) in rows {
            out.push_str(&format!("{a:w0$}  {b:w1$}  {c}\n"));
        }
        out
    }
}

fn flatten(cmd: &str, prefix: &str, v: &Value, rows: &mut Vec<(String, String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(cmd, &p, x, rows);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(cmd, &format!("{prefix}[{i}]"), x, rows);
            }
        }
        _ => rows.push((cmd.to_string(), prefix.to_string(), v.to_string())),
    }
}

struct Section {
    certified: Value,
    diagnostics: Option<Value>,
}

fn section(certified: Value) -> Section {
    Section {
        certified,
        diagnostics: None,
    }
}

fn run_command(inst: &Instance, cmd: &str) -> Result<Section> {
    let data = &inst.data;
    let f = &inst.f;
    Ok(match cmd {
        "ch" => section(json!({ "cycle": cycle_out(&ch(data)) })),
        "perverse" => {
            let mut pieces = Vec::new();
            for p in data.all_primes() {
                for i in data.perverse_range() {
                    let c = ch_perverse(data, i, p);
                    if !c.is_zero() {
                        pieces.push(json!({ "i": i, "prime": p.0, "cycle": cycle_out(&c) }));
                    }
                }
            }
            section(json!({ "pieces": pieces }))
        }
        "normality" => {
            let mut closures: Vec<Variety> =
                data.strata.iter().map(|s| s.closure.clone()).collect();
            closures.extend(inst.vf.closures());
            section(json!({
                "sheaf_normal": is_normal_partitioning(data, &closures)?,
                "phi_normal": phi_normality_check(f, data, &inst.vf)?,
            }))
        }
        "support" => {
            let mut exc = Vec::new();
            for a in data.visible_strata() {
                let s = exceptional_support(f, a)?;
                exc.push(json!({
                    "stratum": a.name,
                    "empty": s.is_empty(),
                    "within_vf": s.variety().generators(),
                }));
            }
            let locus = phi_support_locus(data, f)?;
            section(json!({
                "exceptional": exc,
                "phi_support": locus.union.generators(),
                "phi_support_pieces": locus
                    .pieces
                    .iter()
                    .map(|(n, v)| json!({ "stratum": n, "locus": v.generators() }))
                    .collect::<Vec<_>>(),
            }))
        }
        "transfer" => {
            let t = betti_transfer(f, data, &inst.vf, inst.seed, inst.retries)?;
            let matrix: Vec<Value> = t
                .matrix
                .iter()
                .map(|e| {
                    json!({
                        "source": e.source,
                        "target": e.target,
                        "value": e.coefficient.value,
                        "method": e.coefficient.method,
                    })
                })
                .collect();
            let draws: Vec<Value> = t
                .matrix
                .iter()
                .filter(|e| !e.coefficient.draws.is_empty() || !e.coefficient.slices.is_empty())
                .map(|e| {
                    json!({
                        "source": e.source,
                        "target": e.target,
                        "draws": e.coefficient.draws,
                        "slices": e.coefficient.slices,
                    })
                })
                .collect();
            Section {
                certified: json!({ "tables": t.tables, "matrix": matrix }),
                diagnostics: Some(json!({ "draws": draws })),
            }
        }
        "index-check" => {
            let cv = if inst.ring.field().is_rational() {
                let c = critical_values(f, data)?;
                json!({ "rational": c.rational, "has_nonrational": c.has_nonrational, "constant_on": c.constant_on })
            } else {
                Value::Null
            };
            let check = vanishing_index_check(f, data, &inst.vf, inst.seed, inst.retries)?;
            section(json!({ "check": check, "critical_values": cv }))
        }
        "afcheck" => {
            let top = data.strata.iter().max_by_key(|s| s.dim).unwrap();
            let mut direct = Vec::new();
            let mut prop43 = Vec::new();
            for beta in &inst.vf.strata {
                for x in beta.all_points() {
                    for gamma in &data.strata {
                        if gamma.closure == beta.closure || !beta.closure.is_within(&gamma.closure)
                        {
                            continue;
                        }
                        direct.push(af_pair_named(
                            &gamma.name,
                            &gamma.closure,
                            f,
                            &beta.name,
                            &beta.closure,
                            &x,
                        )?);
                    }
                    let out = prop43_check(f, data, &top.closure, &beta.closure, &x)?;
                    prop43.push(json!({
                        "n": beta.name,
                        "point": x.to_string(),
                        "outcome": out,
                        "agree": out.agree(),
                    }));
                }
            }
            section(json!({ "direct": direct, "prop43": prop43 }))
        }
        "cor48" => {
            let rep = cor48_scenario(f, &inst.sheaves, &inst.vf, inst.seed, inst.retries)?;
            section(serde_json::to_value(&rep).expect("serializable"))
        }
        other => return Err(Error::validation(format!("unknown command {other:?}"))),
    })
}

struct Outcome {
    certified: Map<String, Value>,
    diagnostics: Map<String, Value>,
    timing: Map<String, Value>,
    failure: Option<Failure>,
}

fn execute(inst: &Instance) -> Outcome {
    let mut out = Outcome {
        certified: Map::new(),
        diagnostics: Map::new(),
        timing: Map::new(),
        failure: None,
    };
    for cmd in &inst.commands {
        let t0 = Instant::now();
        match run_command(inst, cmd) {
            Ok(s) => {
                out.certified.insert(cmd.clone(), s.certified);
                if let Some(d) = s.diagnostics {
                    out.diagnostics.insert(cmd.clone(), d);
                }
            }
            Err(e) => {
                out.failure = Some(Failure {
                    command: cmd.clone(),
                    kind: error_kind(&e).to_string(),
                    message: e.to_string(),
                    exit_code: exit_code(&e),
                });
                break;
            }
        }
        out.timing
            .insert(cmd.clone(), json!(t0.elapsed().as_secs_f64() * 1000.0));
    }
    out
}

/// Numbers and booleans of a report section in document order. Polynomials
/// print differently over a prime field, so only these are compared.
pub fn integer_skeleton(v: &Value) -> Vec<Value> {
    fn walk(v: &Value, out: &mut Vec<Value>) {
        match v {
            Value::Number(_) | Value::Bool(_) => out.push(v.clone()),
            Value::Array(a) => a.iter().for_each(|x| walk(x, out)),
            Value::Object(m) => m.values().for_each(|x| walk(x, out)),
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk(v, &mut out);
    out
}

/// Critical values are only computed over the rationals.
fn without_critical_values(mut m: Map<String, Value>) -> Value {
    if let Some(Value::Object(ic)) = m.get_mut("index-check") {
        ic.remove("critical_values");
    }
    Value::Object(m)
}

/// Restores the previous thread-local basis store when dropped.
struct StoreGuard(Option<Arc<dyn store::BasisStore>>);

impl Drop for StoreGuard {
    fn drop(&mut self) {
        store::install_store(self.0.take());
    }
}

/// Runs every command of `problem`. Input errors are returned as `Err`;
/// failures inside commands end up in the report's `failure` field.
pub fn run(problem: &Problem, opts: &RunOptions) -> Result<Report> {
    let field = match opts.field {
        Some(f) => f,
        None => problem.field()?,
    };
    let t0 = Instant::now();
    let cache = match &opts.cache_dir {
        Some(dir) => Some(Arc::new(DiskCache::open(dir)?)),
        None => None,
    };
    let _guard = StoreGuard(store::install_store(
        cache.clone().map(|c| c as Arc<dyn store::BasisStore>),
    ));

    let inst = problem.instantiate(field, opts.seed, opts.retries)?;
    let mut outcome = execute(&inst);

    let mut confirmation = Value::Null;
    if let Field::Prime(p) = field {
        if opts.confirm_over_rationals.unwrap_or(true) {
            let rat = problem.instantiate(Field::Rational, opts.seed, opts.retries)?;
            let check = execute(&rat);
            let agree = integer_skeleton(&without_critical_values(check.certified))
                == integer_skeleton(&without_critical_values(outcome.certified.clone()))
                && check.failure.as_ref().map(|f| &f.kind)
                    == outcome.failure.as_ref().map(|f| &f.kind);
            confirmation = json!({ "over_rationals": true, "agree": agree });
            if !agree {
                return Err(Error::UnluckyPrime(p));
            }
        } else {
            confirmation = json!({ "over_rationals": false });
        }
    }

    let mut diagnostics = Map::new();
    diagnostics.insert("seed".into(), json!(inst.seed));
    diagnostics.insert("retries".into(), json!(inst.retries));
    if !confirmation.is_null() {
        diagnostics.insert("modular_confirmation".into(), confirmation);
    }
    if let Some(c) = &cache {
        let w = c.warnings();
        if !w.is_empty() {
            diagnostics.insert("cache_warnings".into(), json!(w));
        }
    }
    diagnostics.append(&mut outcome.diagnostics);

    let timing = opts.timing.then(|| {
        let mut t = outcome.timing;
        t.insert("total".into(), json!(t0.elapsed().as_secs_f64() * 1000.0));
        if let Some(c) = &cache {
            t.insert("cache".into(), json!(c.stats()));
        }
        t
    });

    Ok(Report {
        tool: "vancycles".into(),
        version: VERSION.into(),
        problem: json!({
            "vars": problem.vars,
            "f": inst.f.to_string(),
            "field": field.to_string(),
            "commands": inst.commands,
        }),
        certified: outcome.certified,
        diagnostics,
        timing,
        failure: outcome.failure,
    })
}
