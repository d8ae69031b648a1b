//! Dormand–Prince 5(4) with event location on the flow and jump sets.

use serde::{Deserialize, Serialize};

use super::{Priority, SimConfig, SimError};
use crate::hybrid_time::{Sample, Segment};
use crate::signals::{Piece, Signal};
use crate::system::HybridSystem;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Why a flow segment stopped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "t")]
pub enum SegmentExit {
    LeftFlowSet(f64),
    EnteredJumpSet(f64),
    Budget(f64),
    Blowup(f64),
    SignalBreakpoint(f64),
}

impl SegmentExit {
    pub fn t(&self) -> f64 {
        match *self {
            SegmentExit::LeftFlowSet(t)
            | SegmentExit::EnteredJumpSet(t)
            | SegmentExit::Budget(t)
            | SegmentExit::Blowup(t)
            | SegmentExit::SignalBreakpoint(t) => t,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowOutcome {
    pub segment: Segment,
    pub exit: SegmentExit,
    pub accepted: usize,
    pub rejected: usize,
}

impl FlowOutcome {
    pub fn duration(&self) -> f64 {
        self.segment.t_end() - self.segment.t_start()
    }
}

/// When the jump set stops a segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum JumpTrigger {
    Off,
    /// Stop on entry; a start inside `D` flows for a moment and stops.
    Armed,
    /// Ignore `D` until the trajectory has left it once.
    AfterExit,
}

impl JumpTrigger {
    fn for_priority(p: Priority) -> Self {
        match p {
            Priority::JumpPriority => JumpTrigger::Armed,
            Priority::FlowPriority => JumpTrigger::Off,
            Priority::EnumerateBoth => JumpTrigger::AfterExit,
        }
    }
}

struct Rhs<'a> {
    h: &'a HybridSystem,
    piece: &'a Piece,
}

impl Rhs<'_> {
    fn eval(&self, t: f64, x: &[f64]) -> Vec<f64> {
        self.h.flow_map().select(x, &self.piece.value(t))
    }

    /// One step of size `dt`; returns the new state, its derivative and the
    /// scaled error norm.
    fn step(&self, t: f64, x: &[f64], k1: &[f64], dt: f64, cfg: &SimConfig) -> (Vec<f64>, Vec<f64>, f64) {
        let n = x.len();
        let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
        k.push(k1.to_vec());
        let mut y = vec![0.0; n];
        for s in 1..7 {
            for i in 0..n {
                y[i] = x[i] + dt * (0..s).map(|r| A[s][r] * k[r][i]).sum::<f64>();
            }
            let ts = if s >= 5 { t + dt } else { t + C[s] * dt };
            k.push(self.eval(ts, &y));
        }
        // stage 7 is evaluated at the fifth-order solution (FSAL)
        let mut err = 0.0f64;
        for i in 0..n {
            let e = dt * (0..7).map(|r| E[r] * k[r][i]).sum::<f64>();
            let scale = cfg.atol + cfg.rtol * x[i].abs().max(y[i].abs());
            err = err.max((e / scale).abs());
        }
        let k7 = k.pop().expect("seven stages");
        (y, k7, if err.is_nan() { f64::INFINITY } else { err })
    }
}

fn hermite(t0: f64, x0: &[f64], f0: &[f64], t1: f64, x1: &[f64], f1: &[f64], t: f64) -> Vec<f64> {
    let h = t1 - t0;
    let u = (t - t0) / h;
    let (u2, u3) = (u * u, u * u * u);
    (0..x0.len())
        .map(|k| {
            (2.0 * u3 - 3.0 * u2 + 1.0) * x0[k]
                + (u3 - 2.0 * u2 + u) * h * f0[k]
                + (-2.0 * u3 + 3.0 * u2) * x1[k]
                + (u3 - u2) * h * f1[k]
        })
        .collect()
}

fn piece_at(w: &Signal, t: f64) -> &Piece {
    let pieces = w.pieces();
    let i = pieces.partition_point(|p| p.start <= t);
    &pieces[i.saturating_sub(1)]
}

fn sup_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Flags that end a step: leaving `C` (beyond the membership tolerance) and,
/// when armed, touching `D`.
struct Detector<'a> {
    h: &'a HybridSystem,
    cfg: &'a SimConfig,
    d_armed: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Flag {
    None,
    OutsideC,
    InD,
}

impl Detector<'_> {
    fn flag(&self, x: &[f64], w: &[f64]) -> Result<Flag, SimError> {
        if self.h.flow_margin(x, w)? > self.cfg.membership_tol {
            return Ok(Flag::OutsideC);
        }
        if self.d_armed && self.h.jump_margin(x, w)? <= 0.0 {
            return Ok(Flag::InD);
        }
        Ok(Flag::None)
    }
}

/// Integrates the flow selection from `(t0, x0)` until the flow set is left,
/// the jump set is entered (depending on the priority), the input forces a
/// stop, the state blows up or the time budget runs out.
pub fn flow_segment(
    h: &HybridSystem,
    x0: &[f64],
    w: &Signal,
    t0: f64,
    j: usize,
    cfg: &SimConfig,
) -> Result<FlowOutcome, SimError> {
    flow_segment_with(h, x0, w, t0, j, cfg, JumpTrigger::for_priority(cfg.priority))
}

pub(crate) fn flow_segment_with(
    h: &HybridSystem,
    x0: &[f64],
    w: &Signal,
    t0: f64,
    j: usize,
    cfg: &SimConfig,
    trigger: JumpTrigger,
) -> Result<FlowOutcome, SimError> {
    if x0.len() != h.n_x() {
        return Err(SimError::DimensionMismatch { expected: h.n_x(), found: x0.len() });
    }
    let w0 = w.right_limit(t0)?;
    if h.flow_margin(x0, &w0)? > cfg.membership_tol {
        return Err(SimError::StartOutsideFlowSet { t: t0, x: x0.to_vec(), w: w0 });
    }
    let t_budget = cfg.t_max.min(w.horizon());
    let start_in_d = h.jump_margin(x0, &w0)? <= 0.0;
    let mut det = Detector {
        h,
        cfg,
        d_armed: match trigger {
            JumpTrigger::Off => false,
            JumpTrigger::Armed => true,
            JumpTrigger::AfterExit => !start_in_d,
        },
    };
    // a right limit inside D under jump priority: step off the point, then stop
    let nudge = trigger == JumpTrigger::Armed && start_in_d;
    if nudge {
        det.d_armed = false;
    }

    let mut t = t0;
    let mut x = x0.to_vec();
    let mut piece = piece_at(w, t);
    let mut f = Rhs { h, piece }.eval(t, &x);
    let mut seg = Segment::new(j, Sample::new(t, x.clone(), f.clone()));
    let mut dt = cfg.step_init;
    let (mut accepted, mut rejected) = (0usize, 0usize);

    let finish = |seg: Segment, exit, accepted, rejected| Ok(FlowOutcome { segment: seg, exit, accepted, rejected });

    if t >= t_budget {
        return finish(seg, SegmentExit::Budget(t), 0, 0);
    }

    loop {
        let te = w.next_special_time(t).map_or(t_budget, |s| s.min(t_budget));
        let rhs = Rhs { h, piece };
        // one stretch on which the input is given by a single smooth piece
        while t < te {
            if accepted + rejected >= cfg.max_steps {
                return finish(seg, SegmentExit::Budget(t), accepted, rejected);
            }
            let mut step = dt.min(te - t);
            if nudge && accepted == 0 {
                step = step.min(2.0 * cfg.event_tol);
            }
            let last = step >= te - t;
            let (y, fy, err) = rhs.step(t, &x, &f, step, cfg);
            if err > 1.0 {
                rejected += 1;
                dt = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                if dt < cfg.step_min {
                    return Err(SimError::StepUnderflow { t, h: dt });
                }
                continue;
            }
            let tn = if last { te } else { t + step };
            accepted += 1;
            let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };

            if nudge && accepted == 1 {
                seg.samples.push(Sample::new(tn, y.clone(), fy.clone()));
                return finish(seg, SegmentExit::EnteredJumpSet(tn), accepted, rejected);
            }

            // probe the step's dense output for a flag
            let mut prev_u = 0.0;
            let mut hit = None;
            for u in [0.25, 0.5, 0.75, 1.0] {
                let tu = t + u * (tn - t);
                let xu = if u == 1.0 { y.clone() } else { hermite(t, &x, &f, tn, &y, &fy, tu) };
                if det.flag(&xu, &piece.value(tu))? != Flag::None {
                    hit = Some((t + prev_u * (tn - t), tu));
                    break;
                }
                prev_u = u;
            }

            if let Some((mut lo, mut hi)) = hit {
                let at = |s: f64| -> Vec<f64> {
                    if s == t {
                        x.clone()
                    } else {
                        rhs.step(t, &x, &f, s - t, cfg).0
                    }
                };
                // the probe can be fooled by interpolation; recheck lo exactly
                while lo > t && det.flag(&at(lo), &piece.value(lo))? != Flag::None {
                    hi = lo;
                    lo = t;
                }
                while hi - lo > cfg.event_tol {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if det.flag(&at(mid), &piece.value(mid))? != Flag::None {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let x_hi = at(hi);
                let w_hi = piece.value(hi);
                let x_lo = at(lo);
                // when C ends where D begins, end on a side from which the jump
                // is available
                let d_at_lo = h.can_jump_tol(&x_lo, &piece.value(lo), cfg.membership_tol)?;
                let d_at_hi = h.jump_margin(&x_hi, &w_hi)? <= 0.0;
                let (t_end, x_end, exit) = if det.d_armed && d_at_hi {
                    (hi, x_hi, SegmentExit::EnteredJumpSet(hi))
                } else if d_at_hi && !d_at_lo {
                    (hi, x_hi, SegmentExit::LeftFlowSet(hi))
                } else {
                    (lo, x_lo, SegmentExit::LeftFlowSet(lo))
                };
                if t_end > t {
                    let f_end = rhs.eval(t_end, &x_end);
                    seg.samples.push(Sample::new(t_end, x_end, f_end));
                }
                return finish(seg, exit, accepted, rejected);
            }

            if !det.d_armed && trigger == JumpTrigger::AfterExit && h.jump_margin(&y, &piece.value(tn))? > 0.0 {
                det.d_armed = true;
            }

            t = tn;
            x = y;
            f = fy;
            seg.samples.push(Sample::new(t, x.clone(), f.clone()));
            // a step cut short by the stretch end does not shrink the next one
            dt = if last { dt.max(step * grow) } else { step * grow };

            if x.iter().any(|v| !v.is_finite()) || sup_norm(&x) > cfg.blowup_threshold {
                seg.open_end = true;
                return finish(seg, SegmentExit::Blowup(t), accepted, rejected);
            }
        }

        if t >= t_budget {
            return finish(seg, SegmentExit::Budget(t), accepted, rejected);
        }

        // t is a breakpoint or override time
        let w_point = w.eval(t)?;
        let w_right = w.right_limit(t)?;
        let point_outside_c = h.flow_margin(&x, &w_point)? > cfg.membership_tol;
        let stop = h.flow_margin(&x, &w_right)? > cfg.membership_tol
            || (cfg.mode == super::Mode::E && point_outside_c)
            || (det.d_armed && h.jump_margin(&x, &w_point)? <= 0.0);
        if stop {
            return finish(seg, SegmentExit::SignalBreakpoint(t), accepted, rejected);
        }
        piece = piece_at(w, t);
        let f_right = Rhs { h, piece }.eval(t, &x);
        if f_right != f {
            let s = seg.samples.last_mut().expect("segment has samples");
            s.dx_left = std::mem::replace(&mut s.dx, f_right.clone());
            f = f_right;
        }
    }
}
