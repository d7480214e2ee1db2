//! Versioned JSON scenarios and the reports produced from them.
//!
//! A scenario is `{version, kind, seed?, params}`. Running one yields a
//! [`Report`] echoing the inputs, the outputs, a list of named checks and
//! the wall time. Malformed documents are [`SchemaError`]s; errors raised
//! while executing are recorded in the report instead.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::acceptance::{run_all, Fixture};
use crate::diagram::{
    check_assignment, check_extension_pair, random_extension_constraints, render_violations, DiagramAssignment,
};
use crate::dyadic_measure::{ClopenSet, Rational};
use crate::name_calculus::{refine_condition, slalom_extract, FiniteName};
use crate::poset::{extend, generic_run, one_bit_growth, Condition, ExtendConfig, ScheduleEntry};
use crate::smz_rapid::{
    cover_translate, density_profile, flatten_heavy_intervals, product_bound, rapidity_check, thin_set_bound_check,
    IntervalSpec,
};

pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Slalom,
    Refine,
    Extend,
    GenericRun,
    Smz,
    Rapid,
    Diagram,
    Selftest,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Slalom => "slalom",
            Kind::Refine => "refine",
            Kind::Extend => "extend",
            Kind::GenericRun => "generic-run",
            Kind::Smz => "smz",
            Kind::Rapid => "rapid",
            Kind::Diagram => "diagram",
            Kind::Selftest => "selftest",
        }
    }

    /// Kinds whose result depends on a seed, which is then mandatory.
    pub fn randomized(self) -> bool {
        matches!(self, Kind::Extend | Kind::GenericRun)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The document could not be turned into a runnable scenario.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct SchemaError(pub String);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub version: u32,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: Value,
}

impl Scenario {
    /// Parse a scenario document. A bare parameter object (no `version`)
    /// is accepted when `kind` is given.
    pub fn parse(text: &str, kind: Option<Kind>) -> Result<Scenario, SchemaError> {
        let value: Value = serde_json::from_str(text).map_err(|e| SchemaError(format!("not JSON: {e}")))?;
        let scenario = if value.get("version").is_some() {
            serde_json::from_value::<Scenario>(value).map_err(|e| SchemaError(format!("bad scenario: {e}")))?
        } else {
            let kind = kind.ok_or_else(|| SchemaError("scenario has no version".into()))?;
            Scenario { version: VERSION, kind, seed: None, params: value }
        };
        if scenario.version != VERSION {
            return Err(SchemaError(format!("unsupported scenario version {}", scenario.version)));
        }
        if let Some(k) = kind {
            if k != scenario.kind {
                return Err(SchemaError(format!("scenario kind is {}, subcommand is {k}", scenario.kind)));
            }
        }
        Ok(scenario)
    }
}

/// Command-line settings that take precedence over the document.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub retry_cap: Option<u32>,
    pub exhaustive_cap: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, pass: bool) -> Self {
        CheckResult { name: name.to_string(), pass, detail: String::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorObject {
    pub module: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub version: u32,
    pub kind: Kind,
    pub seed: Option<u64>,
    pub inputs: Value,
    pub outputs: Value,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorObject>,
    /// Not part of the deterministic body.
    pub wall_time_ms: u64,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    /// The report without its timing, which is all that seeds determine.
    pub fn body(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("wall_time_ms");
        }
        v
    }

    /// Plain-text lines for the terminal: a violation table for diagram
    /// scenarios, the pass/fail matrix for the self-test.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        if let Some(e) = &self.error {
            out.push_str(&format!("error ({}): {}\n", e.module, e.message));
        }
        for c in &self.checks {
            out.push_str(&format!("{:<44} {}", c.name, if c.pass { "PASS" } else { "FAIL" }));
            if !c.detail.is_empty() {
                out.push_str(&format!("  {}", c.detail));
            }
            out.push('\n');
        }
        if let Some(table) = self.outputs.get("violation_table").and_then(Value::as_str) {
            out.push_str(table);
        }
        out
    }
}

struct Outcome {
    inputs: Value,
    outputs: Value,
    checks: Vec<CheckResult>,
}

enum Failure {
    Schema(String),
    Exec { module: &'static str, message: String, inputs: Value },
}

fn params<T: serde::de::DeserializeOwned>(v: &Value, kind: Kind) -> Result<T, Failure> {
    serde_json::from_value(v.clone()).map_err(|e| Failure::Schema(format!("bad {kind} parameters: {e}")))
}

fn exec<'a, E: fmt::Display>(module: &'static str, inputs: &'a Value) -> impl Fn(E) -> Failure + 'a {
    move |e| Failure::Exec { module, message: e.to_string(), inputs: inputs.clone() }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("output serializes")
}

/// Run a scenario. `Err` means the document was unusable; everything else,
/// including module errors, comes back as a report.
pub fn run(scenario: &Scenario, overrides: &Overrides) -> Result<Report, SchemaError> {
    let start = Instant::now();
    let seed = overrides.seed.or(scenario.seed);
    if scenario.kind.randomized() && seed.is_none() {
        return Err(SchemaError(format!("{} scenarios need a seed", scenario.kind)));
    }
    let result = match scenario.kind {
        Kind::Slalom => run_slalom(&scenario.params),
        Kind::Refine => run_refine(&scenario.params),
        Kind::Extend => run_extend(&scenario.params, seed.unwrap_or_default(), overrides),
        Kind::GenericRun => run_generic(&scenario.params, seed.unwrap_or_default(), overrides),
        Kind::Smz => run_smz(&scenario.params),
        Kind::Rapid => run_rapid(&scenario.params),
        Kind::Diagram => run_diagram(&scenario.params),
        Kind::Selftest => run_selftest_value(&scenario.params),
    };
    let wall_time_ms = start.elapsed().as_millis() as u64;
    let base = |inputs, outputs, checks: Vec<CheckResult>, error: Option<ErrorObject>| {
        let passed = error.is_none() && checks.iter().all(|c| c.pass);
        Report { version: VERSION, kind: scenario.kind, seed, inputs, outputs, checks, passed, error, wall_time_ms }
    };
    match result {
        Ok(o) => Ok(base(o.inputs, o.outputs, o.checks, None)),
        Err(Failure::Schema(msg)) => Err(SchemaError(msg)),
        Err(Failure::Exec { module, message, inputs }) => {
            Ok(base(inputs, Value::Null, Vec::new(), Some(ErrorObject { module, message })))
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SlalomParams {
    name: FiniteName,
}

fn run_slalom(v: &Value) -> Result<Outcome, Failure> {
    let p: SlalomParams = params(v, Kind::Slalom)?;
    let s = slalom_extract(&p.name);
    let sizes: Vec<usize> = s.slots().iter().map(BTreeSet::len).collect();
    let strict = sizes.iter().enumerate().all(|(n, &k)| k < (n + 1) * (n + 1));
    Ok(Outcome {
        inputs: v.clone(),
        outputs: json!({ "slalom": s, "sizes": sizes }),
        checks: vec![CheckResult::new("slot_below_(n+1)^2", strict)],
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RefineParams {
    p: ClopenSet,
    name: FiniteName,
    f: Vec<u64>,
    #[serde(rename = "N")]
    big_n: usize,
}

fn run_refine(v: &Value) -> Result<Outcome, Failure> {
    let p: RefineParams = params(v, Kind::Refine)?;
    let r = refine_condition(&p.p, &p.name, &p.f, p.big_n).map_err(exec("name_calculus", v))?;
    let mut removed = ClopenSet::empty();
    for k in r.n..p.name.horizon() {
        removed = removed.union(&p.name.boolean_value(k, p.f[k]).map_err(exec("name_calculus", v))?);
    }
    let mq = r.q.measure();
    Ok(Outcome {
        inputs: v.clone(),
        outputs: json!({ "q": r.q, "n": r.n, "measure_q": mq, "lower_bound": r.lower_bound }),
        checks: vec![
            CheckResult::new("q_has_positive_measure", mq.is_positive()),
            CheckResult::new("q_above_lower_bound", mq >= r.lower_bound),
            CheckResult::new("q_inside_p", r.q.is_subset(&p.p)),
            CheckResult::new("q_disjoint_from_removed_values", r.q.is_disjoint(&removed)),
        ],
    })
}

fn config_with(config: Option<ExtendConfig>, o: &Overrides) -> ExtendConfig {
    let mut c = config.unwrap_or_default();
    if let Some(r) = o.retry_cap {
        c.retry_cap = r;
    }
    if let Some(e) = o.exhaustive_cap {
        c.exhaustive_cap = e;
    }
    c
}

fn with_config(v: &Value, config: &ExtendConfig) -> Value {
    let mut inputs = v.clone();
    if let Some(obj) = inputs.as_object_mut() {
        obj.insert("config".into(), to_value(config));
    }
    inputs
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtendParams {
    condition: Condition,
    #[serde(default)]
    config: Option<ExtendConfig>,
}

fn run_extend(v: &Value, seed: u64, o: &Overrides) -> Result<Outcome, Failure> {
    let p: ExtendParams = params(v, Kind::Extend)?;
    let config = config_with(p.config, o);
    let inputs = with_config(v, &config);
    let (q, report) = extend(&p.condition, seed, &config).map_err(exec("poset", &inputs))?;
    let checks = vec![
        CheckResult::new("output_validates", q.validate().is_ok()),
        CheckResult::new("output_extends_input", q.extends(&p.condition)),
        CheckResult::new("one_bit_growth", one_bit_growth(&p.condition.stem, &q.stem)),
    ];
    Ok(Outcome {
        inputs,
        outputs: json!({ "condition": q, "report": report, "mean_attempts": report.mean_attempts() }),
        checks,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GenericRunParams {
    #[serde(default)]
    schedule: Vec<ScheduleEntry>,
    steps: usize,
    #[serde(default)]
    config: Option<ExtendConfig>,
}

fn run_generic(v: &Value, seed: u64, o: &Overrides) -> Result<Outcome, Failure> {
    let p: GenericRunParams = params(v, Kind::GenericRun)?;
    let config = config_with(p.config, o);
    let inputs = with_config(v, &config);
    let run = generic_run(&p.schedule, p.steps, seed, &config).map_err(exec("poset", &inputs))?;
    let checks = vec![
        CheckResult::new("certificates_above_1-eps", run.all_hold()),
        CheckResult::new("final_condition_validates", run.last.validate().is_ok()),
    ];
    Ok(Outcome {
        inputs,
        outputs: json!({ "final_depth": run.last.depth(), "final": run.last, "trace": run.trace }),
        checks,
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EpsSpec {
    List(Vec<Rational>),
    Geometric { geometric: Rational },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SmzParams {
    eps: EpsSpec,
    horizon: usize,
    #[serde(default)]
    heavy: Option<Vec<Vec<IntervalSpec>>>,
    /// Use the first `(n+1)²−1` grid cells of width `δ′_n` at every level.
    #[serde(default)]
    full_heavy: bool,
}

fn run_smz(v: &Value) -> Result<Outcome, Failure> {
    let p: SmzParams = params(v, Kind::Smz)?;
    let eps: Vec<Rational> = match p.eps {
        EpsSpec::List(l) => l,
        EpsSpec::Geometric { geometric } => {
            if !geometric.in_open_unit() {
                return Err(Failure::Schema("geometric ratio must lie in (0,1)".into()));
            }
            let intervals: usize = (1..=p.horizon).map(|k| k * k - 1).sum();
            let needed = p.horizon.saturating_sub(1).pow(3).max(intervals);
            (0..=needed).map(|n| geometric.pow(n as i32)).collect()
        }
    };
    let scales = cover_translate(&eps, p.horizon).map_err(exec("smz_rapid", v))?;
    let d = &scales.delta;
    let dp = &scales.delta_prime;
    let mut checks = vec![
        CheckResult::new(
            "delta_below_eps_up_to_n^3",
            (0..p.horizon).all(|n| eps[..=n.pow(3)].iter().all(|e| &d[n] < e)),
        ),
        CheckResult::new("delta_non_increasing", d.windows(2).all(|w| w[1] <= w[0])),
        CheckResult::new("delta_prime_below_delta", dp.iter().zip(d).all(|(a, b)| a < b)),
        CheckResult::new("delta_prime_paired", dp.chunks(2).all(|c| c.iter().all(|x| *x == c[0]))),
    ];
    let heavy = if p.full_heavy {
        let levels = (0..p.horizon)
            .map(|n| {
                (0..((n + 1) * (n + 1) - 1) as u64)
                    .map(|k| IntervalSpec::grid(&dp[n], k))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(exec("smz_rapid", v))?;
        Some(levels)
    } else {
        p.heavy
    };
    let mut outputs = json!({ "delta": d, "delta_prime": dp });
    if let Some(heavy) = heavy {
        let j = flatten_heavy_intervals(&heavy, dp, &eps).map_err(exec("smz_rapid", v))?;
        let within = j.iter().zip(&eps).all(|(i, e)| &i.length() <= e) && j.len() <= eps.len();
        checks.push(CheckResult::new("interval_lengths_within_eps", within));
        outputs["intervals"] = to_value(&j);
    }
    Ok(Outcome { inputs: v.clone(), outputs, checks })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProductParams {
    x: BTreeSet<u64>,
    #[serde(default)]
    from: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RapidityParams {
    r: Vec<u64>,
    x: BTreeSet<u64>,
    f: Vec<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RapidParams {
    #[serde(default)]
    set: BTreeSet<u64>,
    /// Use `A = {k³}` instead of `set`.
    #[serde(default)]
    cubes: bool,
    horizon: usize,
    #[serde(default)]
    thin: bool,
    #[serde(default)]
    product: Option<ProductParams>,
    #[serde(default)]
    rapidity: Option<RapidityParams>,
}

fn run_rapid(v: &Value) -> Result<Outcome, Failure> {
    let p: RapidParams = params(v, Kind::Rapid)?;
    let a: BTreeSet<u64> = if p.cubes {
        let reach = (p.horizon as u64 + 1).pow(2);
        (0..).map(|k: u64| k * k * k).take_while(|&c| c < reach).collect()
    } else {
        p.set
    };
    let mut outputs = json!({ "profile": density_profile(&a, p.horizon) });
    let mut checks = Vec::new();
    if p.thin {
        let verdict = thin_set_bound_check(&a, p.horizon).map_err(exec("smz_rapid", v))?;
        checks.push(CheckResult::new("thin_set_bound", verdict.holds));
        outputs["thin"] = to_value(&verdict);
    }
    if let Some(prod) = &p.product {
        let values: Vec<Rational> = (prod.from..=p.horizon).map(|m| product_bound(&a, &prod.x, prod.from, m)).collect();
        checks.push(CheckResult::new("product_antitone_in_horizon", values.windows(2).all(|w| w[1] <= w[0])));
        outputs["product"] = to_value(values.last().expect("nonempty range"));
        outputs["partial_products"] = to_value(&values);
    }
    if let Some(r) = &p.rapidity {
        let verdict = rapidity_check(&r.r, &r.x, &r.f).map_err(exec("smz_rapid", v))?;
        checks.push(CheckResult::new("rapidity", verdict.holds));
        outputs["rapidity"] = to_value(&verdict);
    }
    Ok(Outcome { inputs: v.clone(), outputs, checks })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramParams {
    #[serde(default)]
    assignment: Option<DiagramAssignment>,
    #[serde(default)]
    ground: Option<DiagramAssignment>,
    #[serde(default)]
    ext: Option<DiagramAssignment>,
}

fn run_diagram(v: &Value) -> Result<Outcome, Failure> {
    let p: DiagramParams = params(v, Kind::Diagram)?;
    let mut outputs = json!({});
    let mut checks = Vec::new();
    let mut all_violations = Vec::new();
    if let Some(a) = &p.assignment {
        let violations = check_assignment(a);
        checks.push(CheckResult::new("assignment_respects_diagram", violations.is_empty()));
        outputs["violations"] = to_value(&violations);
        all_violations.extend(violations);
    }
    match (&p.ground, &p.ext) {
        (Some(g), None) => {
            let cs = random_extension_constraints(g).map_err(exec("diagram", v))?;
            outputs["constraints"] = to_value(&cs);
            outputs["constraint_lines"] = to_value(&cs.iter().map(ToString::to_string).collect::<Vec<_>>());
        }
        (Some(g), Some(e)) => {
            let verdict = check_extension_pair(g, e);
            checks.push(CheckResult::new("ground_respects_diagram", verdict.ground.is_empty()));
            checks.push(CheckResult::new("extension_respects_diagram", verdict.ext.is_empty()));
            let mut transfer = CheckResult::new("transfer_rules_hold", verdict.failed.is_empty());
            transfer.detail =
                verdict.failed.iter().map(|(c, got)| format!("{c}, ext has {got}")).collect::<Vec<_>>().join("; ");
            checks.push(transfer);
            all_violations.extend(verdict.ground.iter().cloned());
            all_violations.extend(verdict.ext.iter().cloned());
            outputs["pair"] = to_value(&verdict);
        }
        (None, Some(_)) => return Err(Failure::Schema("ext given without ground".into())),
        (None, None) => {
            if p.assignment.is_none() {
                return Err(Failure::Schema("diagram scenario needs assignment or ground".into()));
            }
        }
    }
    if !all_violations.is_empty() {
        outputs["violation_table"] = Value::String(render_violations(&all_violations));
    }
    Ok(Outcome { inputs: v.clone(), outputs, checks })
}

fn run_selftest_value(v: &Value) -> Result<Outcome, Failure> {
    let fixture: Fixture = if v.is_null() {
        Fixture::bundled()
    } else {
        serde_json::from_value(v.clone()).map_err(|e| Failure::Schema(format!("bad fixture: {e}")))?
    };
    let results = run_all(&fixture);
    let checks = results
        .iter()
        .map(|r| CheckResult {
            name: format!("criterion {:>2} {}", r.id, r.name),
            pass: r.pass,
            detail: r.detail.clone(),
        })
        .collect();
    Ok(Outcome {
        inputs: json!({ "fixture_seed": fixture.seed }),
        outputs: json!({ "criteria": results.len() }),
        checks,
    })
}

/// Run the bundled acceptance suite, or the one in `fixture` if given.
pub fn selftest(fixture: Option<&str>) -> Result<Report, SchemaError> {
    let params = match fixture {
        Some(text) => serde_json::from_str(text).map_err(|e| SchemaError(format!("fixture is not JSON: {e}")))?,
        None => Value::Null,
    };
    run(&Scenario { version: VERSION, kind: Kind::Selftest, seed: None, params }, &Overrides::default())
}
