use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use hybridsim::exec::{with_threads, Execution};
use hybridsim::hybrid_time::HybridArc;
use hybridsim::sets::{BoxSet, Interval};
use hybridsim::signals::parse_signal;
use hybridsim::simulator::{
    classify_termination, solve, solve_all, validate_arc, SimError, Termination, REPORT_SCHEMA,
};
use hybridsim::system::{scenario, scenario_names, HybridSystem, ScenarioParams, SystemConfig};
use hybridsim::viability::{
    self, existence_over_region, inputs_hash, nontrivial_existence, output_form_existence, vc_ball_margin, vc_probe,
    vc_split, vc_tangent_ac, vc_tangent_ac_certified, vc_tangent_continuous, Certificate, RegionOptions,
    TangentGrid, Verdict, ViabilityError,
};
use hybridsim::{Mode, Priority, SimConfig, Signal, SolutionReport, VerdictStatus};

use crate::args::*;

pub const REGION_SCHEMA: &str = "hybridsim.region/1";
pub const VALIDATION_SCHEMA: &str = "hybridsim.validation/1";

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Config = 2,
    DeadOrFails = 3,
    Inconclusive = 4,
    Internal = 10,
}

pub struct Outcome {
    pub summary: String,
    pub status: Status,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn status(&self) -> Status {
        match self {
            CliError::Config(_) => Status::Config,
            CliError::Internal(_) => Status::Internal,
        }
    }
}

fn config(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn sim_error(e: SimError) -> CliError {
    match e {
        SimError::StepUnderflow { .. } | SimError::Arc(_) => internal(e),
        other => config(other),
    }
}

fn viability_error(e: ViabilityError) -> CliError {
    match e {
        ViabilityError::Sim(s) => sim_error(s),
        other => config(other),
    }
}

type Result<T> = std::result::Result<T, CliError>;

struct Loaded {
    label: String,
    system: HybridSystem,
    priority: Priority,
    default_xi: Option<Vec<f64>>,
    default_signal: Option<&'static str>,
    /// What the system was built from, for certificate hashes.
    source: Value,
}

fn load_system(a: &SystemArgs) -> Result<Loaded> {
    match (&a.scenario, &a.system) {
        (Some(key), _) => {
            let s = scenario(key, &ScenarioParams { c: a.c, delta: a.delta }).map_err(config)?;
            Ok(Loaded {
                label: key.clone(),
                source: json!({"scenario": key, "c": a.c, "delta": a.delta}),
                system: s.system,
                priority: s.priority,
                default_xi: Some(s.default_xi),
                default_signal: Some(s.default_signal),
            })
        }
        (None, Some(path)) => {
            if a.c.is_some() || a.delta.is_some() {
                return Err(config("--c and --delta apply to built-in scenarios only"));
            }
            let text = read(path)?;
            let cfg: SystemConfig = serde_json::from_str(&text).map_err(|e| config(format!("{}: {e}", path.display())))?;
            let source = serde_json::to_value(&cfg).map_err(internal)?;
            let system = HybridSystem::from_config(cfg).map_err(config)?;
            Ok(Loaded {
                label: system.name.clone(),
                system,
                priority: Priority::default(),
                default_xi: None,
                default_signal: None,
                source,
            })
        }
        (None, None) => Err(config("give --scenario or --system")),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| config(format!("{}: {e}", path.display())))
}

fn signal_from_text(text: &str, w: &BoxSet) -> Result<Signal> {
    let text = text.trim();
    if text.starts_with('{') {
        let s: Signal = serde_json::from_str(text).map_err(config)?;
        if s.value_set() != w {
            return Err(config(format!("signal values live in {} but the system expects {w}", s.value_set())));
        }
        Ok(s)
    } else {
        parse_signal(text, w).map_err(config)
    }
}

fn load_signal(a: &SignalArgs, w: &BoxSet, default: Option<&str>) -> Result<Signal> {
    match (&a.w, &a.signal, default) {
        (Some(text), _, _) => signal_from_text(text, w),
        (None, Some(path), _) => signal_from_text(&read(path)?, w),
        (None, None, Some(text)) => signal_from_text(text, w),
        (None, None, None) => Err(config("give --w or --signal")),
    }
}

fn initial_state(xi: &Option<Vec<f64>>, loaded: &Loaded) -> Result<Vec<f64>> {
    let xi = xi.clone().or_else(|| loaded.default_xi.clone()).ok_or_else(|| config("give --xi"))?;
    if xi.len() != loaded.system.n_x() {
        return Err(config(format!("--xi has {} components, the state has {}", xi.len(), loaded.system.n_x())));
    }
    Ok(xi)
}

fn parse_box(items: &[String], dim: usize, flag: &str) -> Result<BoxSet> {
    if items.len() != dim {
        return Err(config(format!("{flag} needs {dim} lo:hi items, got {}", items.len())));
    }
    let axes = items
        .iter()
        .map(|s| {
            let (lo, hi) = s.split_once(':').ok_or_else(|| config(format!("{flag} item {s:?} is not lo:hi")))?;
            let lo: f64 = lo.trim().parse().map_err(|_| config(format!("bad bound {lo:?}")))?;
            let hi: f64 = hi.trim().parse().map_err(|_| config(format!("bad bound {hi:?}")))?;
            if lo > hi {
                return Err(config(format!("{flag} item {s:?} is empty")));
            }
            Ok(Interval::closed(lo, hi))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoxSet::new(axes))
}

fn mode(m: ModeArg) -> Mode {
    match m {
        ModeArg::E => Mode::E,
        ModeArg::Ae => Mode::AE,
    }
}

fn priority(p: PriorityArg) -> Priority {
    match p {
        PriorityArg::Jump => Priority::JumpPriority,
        PriorityArg::Flow => Priority::FlowPriority,
        PriorityArg::Both => Priority::EnumerateBoth,
    }
}

fn verdict_status(s: VerdictStatus) -> Status {
    match s {
        VerdictStatus::Holds => Status::Ok,
        VerdictStatus::FailsWithWitness => Status::DeadOrFails,
        VerdictStatus::Inconclusive => Status::Inconclusive,
    }
}

fn termination_status(t: &Termination) -> Status {
    match t {
        Termination::BudgetExhausted { .. } | Termination::EndsWithFlowBlowup { .. } => Status::Ok,
        Termination::DeadState { .. } => Status::DeadOrFails,
        Termination::ZenoSuspected { .. } | Termination::Stalled { .. } => Status::Inconclusive,
    }
}

struct Out<'a> {
    dir: &'a Path,
    written: Vec<String>,
}

impl Out<'_> {
    fn path(&mut self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(self.dir).map_err(|e| internal(format!("{}: {e}", self.dir.display())))?;
        self.written.push(name.to_string());
        Ok(self.dir.join(name))
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.path(name)?;
        let mut text = serde_json::to_string_pretty(value).map_err(internal)?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| internal(format!("{}: {e}", path.display())))
    }

    fn create(&mut self, name: &str) -> Result<fs::File> {
        let path = self.path(name)?;
        fs::File::create(&path).map_err(|e| internal(format!("{}: {e}", path.display())))
    }

    fn list(&self) -> String {
        self.written.join(", ")
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let mut out = Out { dir: &cli.out_dir, written: Vec::new() };
    match &cli.command {
        Command::Simulate(a) => simulate(a, &mut out),
        Command::CheckExistence(a) => check_existence(a, cli.jobs, &mut out),
        Command::CheckViability(a) => check_viability(a, &mut out),
        Command::CheckSetcond(a) => check_setcond(a, &mut out),
        Command::ValidateArc(a) => validate(a, &mut out),
        Command::Scenario { action: ScenarioAction::List } => list_scenarios(&mut out),
    }
}

fn write_report(out: &mut Out, r: &SolutionReport, h: &HybridSystem, w: &Signal, suffix: &str) -> Result<()> {
    let class = classify_termination(r, h, w);
    let json = out.create(&format!("report{suffix}.json"))?;
    r.write_json(json, Some(class)).map_err(internal)?;
    let csv = out.create(&format!("arc{suffix}.csv"))?;
    r.write_csv(csv).map_err(internal)
}

fn describe(r: &SolutionReport, h: &HybridSystem, w: &Signal) -> String {
    let class = classify_termination(r, h, w);
    let at = r.termination.at();
    let what = match &r.termination {
        Termination::BudgetExhausted { budget, .. } => format!("{budget:?} budget exhausted"),
        Termination::EndsWithFlowBlowup { .. } => "blow-up".to_string(),
        Termination::DeadState { cause, .. } => format!("dead state ({cause:?})"),
        Termination::ZenoSuspected { .. } => "Zeno suspected".to_string(),
        Termination::Stalled { .. } => "stalled".to_string(),
    };
    format!("{class:?}, {what} at (t={}, j={})", at.t, at.j)
}

fn simulate(a: &SimulateArgs, out: &mut Out) -> Result<Outcome> {
    let loaded = load_system(&a.system)?;
    let h = &loaded.system;
    let xi = initial_state(&a.xi, &loaded)?;
    let w = load_signal(&a.signal, h.input_set(), loaded.default_signal)?;
    let mut cfg = match &a.sim_config {
        Some(p) => serde_json::from_str::<SimConfig>(&read(p)?).map_err(|e| config(format!("{}: {e}", p.display())))?,
        None => SimConfig { priority: loaded.priority, ..SimConfig::default() },
    };
    if let Some(m) = a.mode {
        cfg.mode = mode(m);
    }
    if let Some(p) = a.priority {
        cfg.priority = priority(p);
    }
    if let Some(t) = a.t_max {
        cfg.t_max = t;
    }
    if let Some(j) = a.j_max {
        cfg.j_max = j;
    }
    cfg.validate().map_err(config)?;

    out.json("signal.json", &w)?;
    if a.all_branches && cfg.priority == Priority::EnumerateBoth {
        let all = solve_all(h, &xi, &w, &cfg).map_err(sim_error)?;
        for (k, r) in all.iter().enumerate() {
            write_report(out, r, h, &w, &format!("_{k}"))?;
        }
        let status = all.iter().map(|r| termination_status(&r.termination)).max_by_key(|s| *s as u8).unwrap_or(Status::Ok);
        let summary = format!("simulate {}: {} branches, first {}; wrote {}", loaded.label, all.len(), describe(&all[0], h, &w), out.list());
        return Ok(Outcome { summary, status });
    }
    let r = solve(h, &xi, &w, &cfg).map_err(sim_error)?;
    write_report(out, &r, h, &w, "")?;
    let summary = format!("simulate {}: {}; wrote {}", loaded.label, describe(&r, h, &w), out.list());
    Ok(Outcome { summary, status: termination_status(&r.termination) })
}

fn certify(out: &mut Out, name: &str, condition: &str, inputs: Value, v: Verdict, params: Value) -> Result<Outcome> {
    let status = verdict_status(v.status);
    let method = serde_json::to_value(v.method).map_err(internal)?;
    let cert = Certificate::new(condition, &inputs, v, params);
    out.json(name, &cert)?;
    let witness = match &cert.witness {
        Some(wt) => format!(", witness {:?} at t={}", wt.point, wt.t),
        None => String::new(),
    };
    let summary = format!(
        "{condition}: {:?} by {}{witness}; wrote {}",
        cert.verdict.status,
        method.as_str().unwrap_or("?"),
        out.list()
    );
    Ok(Outcome { summary, status })
}

fn check_existence(a: &ExistenceArgs, jobs: usize, out: &mut Out) -> Result<Outcome> {
    let loaded = load_system(&a.system)?;
    let h = &loaded.system;
    let m = mode(a.mode);
    if let Some(region) = &a.region {
        let xi0 = parse_box(region, h.n_x(), "--region")?;
        let opts = RegionOptions { per_axis: a.per_axis, exec: Execution::Parallel, ..RegionOptions::default() };
        let report = with_threads(jobs, || existence_over_region(h, &xi0, m, &opts)).map_err(viability_error)?;
        let inputs = json!({"system": loaded.source, "region": xi0, "mode": m, "options": opts});
        let doc = json!({"schema": REGION_SCHEMA, "condition": "existence_over_region", "inputs_hash": inputs_hash(&inputs), "report": report});
        out.json("region.json", &doc)?;
        let summary = format!(
            "existence_over_region {}: {:?} ({} points, {} inconclusive); wrote {}",
            loaded.label,
            report.status,
            report.points,
            report.inconclusive.len(),
            out.list()
        );
        return Ok(Outcome { summary, status: verdict_status(report.status) });
    }
    let xi = initial_state(&a.xi, &loaded)?;
    let w = load_signal(&a.signal, h.input_set(), loaded.default_signal)?;
    let v = nontrivial_existence(h, &xi, &w, m);
    let inputs = json!({"system": loaded.source, "xi": xi, "signal": w, "mode": m});
    certify(out, "existence.json", "nontrivial_existence", inputs, v, json!({"eps_grid": viability::DEFAULT_EPS_GRID}))
}

fn grid(a: &ViabilityArgs) -> TangentGrid {
    let d = TangentGrid::default();
    TangentGrid {
        u_radius: a.radius.unwrap_or(d.u_radius),
        eps: a.eps.unwrap_or(d.eps),
        per_axis: a.per_axis.unwrap_or(d.per_axis),
        ..d
    }
}

fn check_viability(a: &ViabilityArgs, out: &mut Out) -> Result<Outcome> {
    let loaded = load_system(&a.system)?;
    let xi = initial_state(&a.xi, &loaded)?;
    let m = mode(a.mode);
    let g = grid(a);
    let tangent_params = json!({"radius": g.u_radius, "eps": g.eps, "per_axis": g.per_axis});
    let mut inputs = json!({"system": loaded.source, "xi": xi, "mode": m});

    if let CheckId::Split = a.check {
        let n1 = a.split.unwrap_or(0);
        let h = loaded.system.with_split(n1);
        if n1 > h.n_w() {
            return Err(config(format!("--split {n1} exceeds the input dimension {}", h.n_w())));
        }
        let (w1_box, w2_box) = h.input_set().split_at(n1);
        let w1 = if n1 > 0 { Some(load_signal(&a.signal, &w1_box, None)?) } else { None };
        let w2_text = a.w2.as_deref().ok_or_else(|| config("split needs --w2"))?;
        let w2 = signal_from_text(w2_text, &w2_box)?;
        inputs["w1"] = json!(w1);
        inputs["w2"] = json!(w2);
        let v = vc_split(&h, &xi, w1.as_ref(), &w2, &g).map_err(viability_error)?;
        return certify(out, "viability.json", "split", inputs, v, tangent_params);
    }

    let h = &loaded.system;
    let w = load_signal(&a.signal, h.input_set(), loaded.default_signal)?;
    inputs["signal"] = json!(w);
    let (name, v, params) = match a.check {
        CheckId::Probe => {
            let eps = a.grid.clone().unwrap_or_else(|| viability::DEFAULT_EPS_GRID.to_vec());
            ("probe", vc_probe(h, &xi, &w, m, &eps), json!({"eps_grid": eps}))
        }
        CheckId::BallMargin => {
            let deltas = a.grid.clone().unwrap_or_else(|| viability::DEFAULT_DELTA_GRID.to_vec());
            let v = vc_ball_margin(h, &xi, &deltas).map_err(viability_error)?;
            ("ball_margin", v, json!({"delta_grid": deltas}))
        }
        CheckId::TangentAc => ("tangent_ac", vc_tangent_ac(h, &xi, &w, &g).map_err(viability_error)?, tangent_params),
        CheckId::TangentAcCertified => {
            ("tangent_ac_certified", vc_tangent_ac_certified(h, &xi, &w, &g).map_err(viability_error)?, tangent_params)
        }
        CheckId::TangentContinuous => {
            ("tangent_continuous", vc_tangent_continuous(h, &xi, &w, &g).map_err(viability_error)?, tangent_params)
        }
        CheckId::Split => unreachable!("handled above"),
    };
    certify(out, "viability.json", name, inputs, v, params)
}

fn check_setcond(a: &SetcondArgs, out: &mut Out) -> Result<Outcome> {
    let loaded = load_system(&a.system)?;
    let h = &loaded.system;
    let n_y = h.n_w();
    let range = match &a.range {
        Some(items) => parse_box(items, n_y, "--range")?,
        None => BoxSet::whole(n_y),
    };
    let v = output_form_existence(h, &range).map_err(viability_error)?;
    let chain = v
        .evidence
        .set_condition
        .as_ref()
        .map(|r| format!(" ({} ⊆ {} is {})", r.lhs, r.interior_pontryagin, r.holds))
        .unwrap_or_default();
    let inputs = json!({"system": loaded.source, "range": range});
    let mut o = certify(out, "setcond.json", "output_set_condition", inputs, v, json!({}))?;
    o.summary = o.summary.replacen(';', &format!("{chain};"), 1);
    Ok(o)
}

fn load_arc(path: &Path) -> Result<HybridArc> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let file = fs::File::open(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
    if is_csv {
        return HybridArc::read_csv(file).map_err(config);
    }
    let value: Value = serde_json::from_reader(file).map_err(|e| config(format!("{}: {e}", path.display())))?;
    if value.get("schema").and_then(Value::as_str) == Some(REPORT_SCHEMA) {
        let text = value.to_string();
        let (report, _) = SolutionReport::read_json(text.as_bytes()).map_err(config)?;
        return Ok(report.arc);
    }
    HybridArc::read_json(value.to_string().as_bytes()).map_err(config)
}

fn validate(a: &ValidateArgs, out: &mut Out) -> Result<Outcome> {
    let loaded = load_system(&a.system)?;
    let h = &loaded.system;
    let w = load_signal(&a.signal, h.input_set(), loaded.default_signal)?;
    let arc = load_arc(&a.arc)?;
    let m = mode(a.mode);
    let v = validate_arc(h, &arc, &w, m).map_err(sim_error)?;
    out.json("validation.json", &json!({"schema": VALIDATION_SCHEMA, "validation": v}))?;
    let verdict = if v.valid { "valid" } else { "invalid" };
    let first = v
        .violations
        .first()
        .map(|x| format!(", first {:?} at (t={}, j={})", x.kind, x.at.t, x.at.j))
        .unwrap_or_default();
    let summary = format!(
        "validate-arc {}: {verdict} {m:?}-solution, {} points checked, {} violations{first}; wrote {}",
        loaded.label,
        v.checked_points,
        v.violations.len(),
        out.list()
    );
    Ok(Outcome { summary, status: if v.valid { Status::Ok } else { Status::DeadOrFails } })
}

fn list_scenarios(out: &mut Out) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for key in scenario_names() {
        let s = scenario(key, &ScenarioParams::default()).map_err(internal)?;
        lines.push(format!("{key:<8} {}", s.summary));
        rows.push(json!({
            "key": key,
            "summary": s.summary,
            "priority": s.priority,
            "default_xi": s.default_xi,
            "default_signal": s.default_signal,
        }));
    }
    out.json("scenarios.json", &rows)?;
    Ok(Outcome { summary: lines.join("\n"), status: Status::Ok })
}
