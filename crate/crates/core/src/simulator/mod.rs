//! Construction of e- and ae-solutions by event-detecting integration.

mod integrate;
mod report;
mod validate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{map_collect, Execution};
use crate::hybrid_time::{ArcError, HybridArc, HybridTimePoint, Sample, Segment};
use crate::signals::{Signal, SignalError};
use crate::system::{HybridSystem, SystemError};
use crate::viability::{self, Verdict, VerdictStatus};

pub use integrate::{flow_segment, FlowOutcome, SegmentExit};
pub(crate) use integrate::{flow_segment_with, JumpTrigger};
pub use report::{ReportDocument, REPORT_SCHEMA};
pub use validate::{validate_arc, ArcValidation, Violation, ViolationKind};

/// Solution concept: flow-set membership at every interior flow time, or at
/// almost every one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[default]
    E,
    AE,
}

/// How an overlap of `C` and `D` is resolved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Priority {
    #[default]
    JumpPriority,
    FlowPriority,
    /// Branch at every point where both are possible, jumps first.
    EnumerateBoth,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub mode: Mode,
    pub priority: Priority,
    pub t_max: f64,
    pub j_max: usize,
    pub step_init: f64,
    pub step_min: f64,
    /// Width of the bracket around a located event time.
    pub event_tol: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Margin by which a state may sit outside `C` and still count as inside.
    pub membership_tol: f64,
    pub branch_budget: usize,
    pub blowup_threshold: f64,
    pub zeno_jumps: usize,
    pub zeno_window: f64,
    pub max_steps: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            mode: Mode::E,
            priority: Priority::JumpPriority,
            t_max: 10.0,
            j_max: 1000,
            step_init: 1e-2,
            step_min: 1e-14,
            event_tol: 1e-8,
            rtol: 1e-10,
            atol: 1e-12,
            membership_tol: 1e-9,
            branch_budget: 16,
            blowup_threshold: 1e6,
            zeno_jumps: 50,
            zeno_window: 1e-6,
            max_steps: 1_000_000,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidConfig(m.to_string()));
        if !(self.t_max > 0.0) {
            return bad("t_max must be positive");
        }
        if !(self.event_tol > 0.0) {
            return bad("event_tol must be positive");
        }
        if !(self.step_min > 0.0 && self.step_min < self.step_init) {
            return bad("need 0 < step_min < step_init");
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.membership_tol >= 0.0) {
            return bad("membership_tol must be nonnegative");
        }
        if self.branch_budget == 0 {
            return bad("branch_budget must be at least 1");
        }
        if !(self.blowup_threshold > 0.0) {
            return bad("blowup_threshold must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("(x, w) = ({x:?}, {w:?}) at t = {t} is not in the flow set")]
    StartOutsideFlowSet { t: f64, x: Vec<f64>, w: Vec<f64> },
    #[error("step size fell to {h:e} at t = {t}")]
    StepUnderflow { t: f64, h: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("arc reaches t = {arc_t} but the signal ends at {horizon}")]
    HorizonMismatch { arc_t: f64, horizon: f64 },
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Arc(#[from] ArcError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BudgetKind {
    Time,
    Jumps,
    Steps,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeadCause {
    InputDiscontinuity,
    GeometryNoOverlap,
    AfterJump,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Termination {
    BudgetExhausted { budget: BudgetKind, at: HybridTimePoint },
    EndsWithFlowBlowup { at: HybridTimePoint },
    DeadState { jump_possible: bool, flow_possible: bool, at: HybridTimePoint, cause: DeadCause },
    ZenoSuspected { at: HybridTimePoint },
    /// Neither flow nor jump was found, yet a fresh probe flows; an
    /// integrator failure rather than a dead state.
    Stalled { at: HybridTimePoint },
}

impl Termination {
    pub fn at(&self) -> HybridTimePoint {
        match self {
            Termination::BudgetExhausted { at, .. }
            | Termination::EndsWithFlowBlowup { at }
            | Termination::DeadState { at, .. }
            | Termination::ZenoSuspected { at }
            | Termination::Stalled { at } => *at,
        }
    }

    pub fn is_dead(&self) -> bool {
        matches!(self, Termination::DeadState { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    LeftFlowSet,
    EnteredJumpSet,
    SignalBreakpoint,
    OverrideHit,
    Jump,
    Blowup,
    Budget,
    NoFlow,
}

/// One entry of the per-event log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub at: HybridTimePoint,
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    pub flow_margin: f64,
    pub jump_margin: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub events: Vec<Event>,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    /// Probe run before declaring a dead state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dead_state_probe: Option<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub arc: HybridArc,
    pub termination: Termination,
    pub diagnostics: Diagnostics,
    pub config: SimConfig,
}

/// Which way a maximal solution ends, as far as a finite run can tell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// The run reached its budget: evidence of completeness, not proof.
    CompleteEvidence,
    /// Right-open final interval after blow-up.
    EndsWithFlow,
    /// The last interval is a single point after a jump that left `C₀`.
    EndsWithJumpDead,
    /// Flow ended because the input jumps or has an override there.
    EndsAtInputDiscontinuity,
    Undetermined,
}

/// Solver state between flow segments and jumps.
#[derive(Clone)]
struct Partial {
    done: Vec<Segment>,
    cur: Segment,
    t: f64,
    x: Vec<f64>,
    /// Exit of the flow segment that brought us here, if any.
    after_flow: Option<SegmentExit>,
    /// Whether the last thing that happened is a jump.
    after_jump: bool,
    jump_times: Vec<f64>,
    diag: Diagnostics,
}

impl Partial {
    fn j(&self) -> usize {
        self.cur.j
    }

    fn point(&self) -> HybridTimePoint {
        HybridTimePoint::new(self.t, self.j())
    }
}

struct Solver<'a> {
    h: &'a HybridSystem,
    w: &'a Signal,
    cfg: &'a SimConfig,
}

enum Pending {
    Open(Partial),
    Finished(Box<SolutionReport>),
}

enum Step {
    Continue(Partial),
    Branch(Vec<Pending>),
    Done(Box<SolutionReport>),
}

impl Solver<'_> {
    fn event(&self, p: &Partial, kind: EventKind, w: &[f64]) -> Result<Event, SimError> {
        Ok(Event {
            kind,
            at: p.point(),
            x: p.x.clone(),
            w: w.to_vec(),
            flow_margin: self.h.flow_margin(&p.x, w)?,
            jump_margin: self.h.jump_margin(&p.x, w)?,
        })
    }

    fn finish(&self, mut p: Partial, termination: Termination) -> Result<Step, SimError> {
        p.done.push(p.cur);
        let arc = HybridArc::from_segments(self.h.n_x(), p.done)?;
        Ok(Step::Done(Box::new(SolutionReport { arc, termination, diagnostics: p.diag, config: self.cfg.clone() })))
    }

    /// Flow from the current point; `None` when no flow of positive length exists.
    fn try_flow(&self, p: &Partial, trigger: JumpTrigger) -> Result<Option<FlowOutcome>, SimError> {
        match flow_segment_with(self.h, &p.x, self.w, p.t, p.j(), self.cfg, trigger) {
            Ok(out) if out.duration() >= self.cfg.event_tol => Ok(Some(out)),
            Ok(out) if matches!(out.exit, SegmentExit::Budget(_)) => Ok(Some(out)),
            Ok(_) | Err(SimError::StartOutsideFlowSet { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn apply_flow(&self, mut p: Partial, out: FlowOutcome) -> Result<Step, SimError> {
        p.diag.steps_accepted += out.accepted;
        p.diag.steps_rejected += out.rejected;
        let mut samples = out.segment.samples.into_iter();
        let first = samples.next().expect("segment has samples");
        // the continuation may start where the current record ends
        if let Some(last) = p.cur.samples.last_mut() {
            if last.t == first.t {
                last.dx = first.dx;
            }
        }
        p.cur.samples.extend(samples);
        p.cur.open_end = out.segment.open_end;
        let last = p.cur.last().clone();
        p.t = last.t;
        p.x = last.x;
        p.after_flow = Some(out.exit);
        p.after_jump = false;
        let w_here = self.w.eval(p.t)?;
        let kind = match out.exit {
            SegmentExit::LeftFlowSet(_) => EventKind::LeftFlowSet,
            SegmentExit::EnteredJumpSet(_) => EventKind::EnteredJumpSet,
            SegmentExit::SignalBreakpoint(_) if self.w.override_times().contains(&p.t) => EventKind::OverrideHit,
            SegmentExit::SignalBreakpoint(_) => EventKind::SignalBreakpoint,
            SegmentExit::Budget(_) => EventKind::Budget,
            SegmentExit::Blowup(_) => EventKind::Blowup,
        };
        let ev = Event {
            kind,
            at: p.point(),
            x: p.x.clone(),
            w: w_here.clone(),
            flow_margin: self.h.flow_margin(&p.x, &w_here)?,
            jump_margin: self.h.jump_margin(&p.x, &w_here)?,
        };
        p.diag.events.push(ev);
        match out.exit {
            SegmentExit::Budget(_) => {
                let budget = if p.diag.steps_accepted + p.diag.steps_rejected >= self.cfg.max_steps {
                    BudgetKind::Steps
                } else {
                    BudgetKind::Time
                };
                let at = p.point();
                self.finish(p, Termination::BudgetExhausted { budget, at })
            }
            SegmentExit::Blowup(_) => {
                let at = p.point();
                self.finish(p, Termination::EndsWithFlowBlowup { at })
            }
            _ => Ok(Step::Continue(p)),
        }
    }

    fn apply_jump(&self, p: &Partial, x_next: Vec<f64>, w_pt: &[f64]) -> Result<Partial, SimError> {
        let mut q = p.clone();
        q.diag.events.push(self.event(p, EventKind::Jump, w_pt)?);
        let j = q.j() + 1;
        let prev = std::mem::replace(
            &mut q.cur,
            Segment::new(j, Sample::new(q.t, x_next.clone(), self.h.flow_map().select(&x_next, w_pt))),
        );
        q.done.push(prev);
        q.x = x_next;
        q.after_flow = None;
        q.after_jump = true;
        q.jump_times.push(q.t);
        Ok(q)
    }

    fn is_zeno(&self, p: &Partial) -> bool {
        let n = self.cfg.zeno_jumps;
        n > 0 && p.jump_times.len() >= n && p.t - p.jump_times[p.jump_times.len() - n] <= self.cfg.zeno_window
    }

    fn dead(&self, mut p: Partial, w_pt: &[f64]) -> Result<Step, SimError> {
        p.diag.events.push(self.event(&p, EventKind::NoFlow, w_pt)?);
        let at = p.point();
        let cause = match p.after_flow {
            Some(SegmentExit::SignalBreakpoint(_)) => DeadCause::InputDiscontinuity,
            _ if p.after_jump => DeadCause::AfterJump,
            _ => DeadCause::GeometryNoOverlap,
        };
        // an e-solution cannot flow through a point value outside C, even if
        // flow from a fresh start would be possible there
        let e_override_stop = self.cfg.mode == Mode::E
            && cause == DeadCause::InputDiscontinuity
            && self.h.flow_margin(&p.x, w_pt)? > self.cfg.membership_tol;
        if !e_override_stop {
            let shifted = self.w.shift(p.t);
            let probe = viability::vc_probe(self.h, &p.x, &shifted, self.cfg.mode, &viability::DEFAULT_EPS_GRID);
            let flows = probe.status == VerdictStatus::Holds;
            p.diag.dead_state_probe = Some(probe);
            if flows {
                return self.finish(p, Termination::Stalled { at });
            }
        }
        self.finish(p, Termination::DeadState { jump_possible: false, flow_possible: false, at, cause })
    }

    fn advance(&self, p: Partial) -> Result<Step, SimError> {
        let t_budget = self.cfg.t_max.min(self.w.horizon());
        if p.t >= t_budget {
            let at = p.point();
            return self.finish(p, Termination::BudgetExhausted { budget: BudgetKind::Time, at });
        }
        if self.is_zeno(&p) {
            let at = p.point();
            return self.finish(p, Termination::ZenoSuspected { at });
        }
        let w_pt = self.w.eval(p.t)?;
        let jump_ok = self.h.can_jump_tol(&p.x, &w_pt, self.cfg.membership_tol)?;
        let successors = if jump_ok { self.h.jump_successors(&p.x, &w_pt)? } else { Vec::new() };
        let jumps_left = p.j() < self.cfg.j_max;
        let jump_budget = |p: Partial| {
            let at = p.point();
            self.finish(p, Termination::BudgetExhausted { budget: BudgetKind::Jumps, at })
        };

        // after a flow segment only a jump can follow, except that a segment
        // stopped on entering D may continue when both are allowed
        let may_flow = match p.after_flow {
            None => true,
            Some(SegmentExit::EnteredJumpSet(_)) => self.cfg.priority == Priority::EnumerateBoth,
            Some(_) => false,
        };

        match self.cfg.priority {
            Priority::JumpPriority => {
                if jump_ok && !successors.is_empty() {
                    if !jumps_left {
                        return jump_budget(p);
                    }
                    return Ok(Step::Continue(self.apply_jump(&p, successors[0].clone(), &w_pt)?));
                }
                if may_flow {
                    if let Some(out) = self.try_flow(&p, JumpTrigger::Armed)? {
                        return self.apply_flow(p, out);
                    }
                }
                self.dead(p, &w_pt)
            }
            Priority::FlowPriority => {
                if may_flow {
                    if let Some(out) = self.try_flow(&p, JumpTrigger::Off)? {
                        return self.apply_flow(p, out);
                    }
                }
                if jump_ok && !successors.is_empty() {
                    if !jumps_left {
                        return jump_budget(p);
                    }
                    return Ok(Step::Continue(self.apply_jump(&p, successors[0].clone(), &w_pt)?));
                }
                self.dead(p, &w_pt)
            }
            Priority::EnumerateBoth => {
                let mut branches = Vec::new();
                if jump_ok && jumps_left {
                    for s in &successors {
                        branches.push(Pending::Open(self.apply_jump(&p, s.clone(), &w_pt)?));
                    }
                }
                let flow = if may_flow { self.try_flow(&p, JumpTrigger::AfterExit)? } else { None };
                if let Some(out) = flow {
                    match self.apply_flow(p.clone(), out)? {
                        Step::Continue(q) => branches.push(Pending::Open(q)),
                        Step::Done(r) => branches.push(Pending::Finished(r)),
                        Step::Branch(_) => unreachable!("apply_flow does not branch"),
                    }
                }
                match branches.len() {
                    0 if jump_ok && !jumps_left => jump_budget(p),
                    0 => self.dead(p, &w_pt),
                    1 => match branches.pop().expect("one branch") {
                        Pending::Open(q) => Ok(Step::Continue(q)),
                        Pending::Finished(r) => Ok(Step::Done(r)),
                    },
                    _ => Ok(Step::Branch(branches)),
                }
            }
        }
    }
}

fn check_inputs(h: &HybridSystem, xi: &[f64], w: &Signal, cfg: &SimConfig) -> Result<(), SimError> {
    cfg.validate()?;
    if xi.len() != h.n_x() {
        return Err(SimError::DimensionMismatch { expected: h.n_x(), found: xi.len() });
    }
    if w.dim() != h.n_w() {
        return Err(SimError::DimensionMismatch { expected: h.n_w(), found: w.dim() });
    }
    if xi.iter().any(|v| !v.is_finite()) {
        return Err(SimError::InvalidConfig("initial state must be finite".into()));
    }
    Ok(())
}

/// Every solution branch up to `branch_budget`, in deterministic order.
/// Without `EnumerateBoth` there is exactly one.
pub fn solve_all(h: &HybridSystem, xi: &[f64], w: &Signal, cfg: &SimConfig) -> Result<Vec<SolutionReport>, SimError> {
    check_inputs(h, xi, w, cfg)?;
    let solver = Solver { h, w, cfg };
    let w0 = w.right_limit(0.0)?;
    let start = Partial {
        done: Vec::new(),
        cur: Segment::new(0, Sample::new(0.0, xi.to_vec(), h.flow_map().select(xi, &w0))),
        t: 0.0,
        x: xi.to_vec(),
        after_flow: None,
        after_jump: false,
        jump_times: Vec::new(),
        diag: Diagnostics::default(),
    };
    let mut reports = Vec::new();
    let mut stack = vec![Pending::Open(start)];
    while let Some(next) = stack.pop() {
        if reports.len() >= cfg.branch_budget {
            break;
        }
        let mut cur = match next {
            Pending::Open(p) => p,
            Pending::Finished(r) => {
                reports.push(*r);
                continue;
            }
        };
        loop {
            match solver.advance(cur)? {
                Step::Continue(q) => cur = q,
                Step::Done(r) => {
                    reports.push(*r);
                    break;
                }
                Step::Branch(bs) => {
                    // depth first, in declaration order
                    stack.extend(bs.into_iter().rev());
                    break;
                }
            }
        }
    }
    Ok(reports)
}

/// One solution: the only one, or the first branch under `EnumerateBoth`.
pub fn solve(h: &HybridSystem, xi: &[f64], w: &Signal, cfg: &SimConfig) -> Result<SolutionReport, SimError> {
    let mut cfg1 = cfg.clone();
    if cfg.priority == Priority::EnumerateBoth {
        cfg1.branch_budget = 1;
    }
    let mut first = solve_all(h, xi, w, &cfg1)?.remove(0);
    first.config = cfg.clone();
    Ok(first)
}

/// Independent solves from several initial states, in input order.
pub fn solve_batch(
    h: &HybridSystem,
    starts: &[Vec<f64>],
    w: &Signal,
    cfg: &SimConfig,
    exec: Execution,
) -> Vec<Result<SolutionReport, SimError>> {
    map_collect(exec, starts, |xi| solve(h, xi, w, cfg))
}

/// Maps a solver outcome onto the maximal-solution trichotomy.
pub fn classify_termination(report: &SolutionReport, h: &HybridSystem, w: &Signal) -> Classification {
    match &report.termination {
        Termination::BudgetExhausted { .. } => Classification::CompleteEvidence,
        Termination::EndsWithFlowBlowup { .. } if report.arc.segments().last().is_some_and(|s| s.open_end) => {
            Classification::EndsWithFlow
        }
        Termination::DeadState { at, .. } => {
            let last = report.arc.segments().last().expect("nonempty arc");
            let discontinuous = w.is_special_time(at.t)
                && matches!(w.limits(at.t), Ok((Some(l), r)) if l != r)
                || w.override_times().contains(&at.t);
            if discontinuous && !last.is_point() {
                return Classification::EndsAtInputDiscontinuity;
            }
            let outside_c0 = h.c0_contains(report.arc.final_state()).map(|b| !b).unwrap_or(false);
            if at.j > 0 && last.is_point() && outside_c0 {
                Classification::EndsWithJumpDead
            } else {
                Classification::Undetermined
            }
        }
        _ => Classification::Undetermined,
    }
}

#[cfg(test)]
mod tests;
