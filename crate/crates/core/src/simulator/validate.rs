//! A-posteriori check of an arc against the solution definition.

use serde::{Deserialize, Serialize};

use super::{Mode, SimError};
use crate::hybrid_time::{HybridArc, HybridTimePoint, Segment};
use crate::signals::Signal;
use crate::system::HybridSystem;

const FLOW_TOL: f64 = 1e-7;
const JUMP_TOL: f64 = 1e-8;
const MAP_TOL: f64 = 1e-9;
const DERIV_REL_TOL: f64 = 1e-3;
/// Extra checkpoints strictly between consecutive samples.
const SUBDIVISIONS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    JumpOutsideJumpSet,
    JumpMapMismatch,
    FlowSetViolation,
    DerivativeOutsideEnclosure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub at: HybridTimePoint,
    /// How far outside, in the units of the check.
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcValidation {
    pub mode: Mode,
    pub valid: bool,
    pub checked_points: usize,
    pub violations: Vec<Violation>,
}

/// Checks jumps exactly at `w(t)`, flow-set membership on a dense grid of each
/// flow interval and the flow derivative against the enclosure of `F`.
pub fn validate_arc(h: &HybridSystem, arc: &HybridArc, w: &Signal, mode: Mode) -> Result<ArcValidation, SimError> {
    let t_end = arc.final_point().t;
    if t_end > w.horizon() {
        return Err(SimError::HorizonMismatch { arc_t: t_end, horizon: w.horizon() });
    }
    if arc.state_dim() != h.n_x() {
        return Err(SimError::DimensionMismatch { expected: h.n_x(), found: arc.state_dim() });
    }
    if w.dim() != h.n_w() {
        return Err(SimError::DimensionMismatch { expected: h.n_w(), found: w.dim() });
    }
    let mut violations = Vec::new();
    let mut checked = 0usize;
    let segs = arc.segments();

    for pair in segs.windows(2) {
        let (before, after) = (&pair[0], &pair[1]);
        let t = after.t_start();
        let x = &before.last().x;
        let w_t = w.eval(t)?;
        let at = HybridTimePoint::new(t, before.j);
        checked += 1;
        let m = h.jump_margin(x, &w_t)?;
        if m > JUMP_TOL {
            violations.push(Violation { kind: ViolationKind::JumpOutsideJumpSet, at, magnitude: m });
            continue;
        }
        let target = &after.first().x;
        let miss = h
            .jump_map()
            .successors(x, &w_t)
            .iter()
            .map(|g| g.iter().zip(target).map(|(a, b)| (a - b).abs() / (1.0 + a.abs())).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        if miss > MAP_TOL {
            violations.push(Violation { kind: ViolationKind::JumpMapMismatch, at, magnitude: miss });
        }
    }

    for seg in segs.iter().filter(|s| !s.is_point()) {
        checked += check_flow(h, seg, w, mode, &mut violations)?;
    }

    Ok(ArcValidation { mode, valid: violations.is_empty(), checked_points: checked, violations })
}

fn check_flow(
    h: &HybridSystem,
    seg: &Segment,
    w: &Signal,
    mode: Mode,
    out: &mut Vec<Violation>,
) -> Result<usize, SimError> {
    let (t0, t1) = (seg.t_start(), seg.t_end());
    let specials: Vec<f64> = w.special_times().into_iter().filter(|s| *s > t0 && *s < t1).collect();
    let mut times: Vec<f64> = Vec::new();
    for p in seg.samples.windows(2) {
        let (a, b) = (p[0].t, p[1].t);
        times.push(a);
        times.extend((1..SUBDIVISIONS).map(|k| a + (b - a) * k as f64 / SUBDIVISIONS as f64));
    }
    times.push(t1);
    times.extend(&specials);
    times.sort_by(f64::total_cmp);
    times.dedup();

    let mut checked = 0;
    for &t in times.iter().filter(|t| **t > t0 && **t < t1) {
        // the measure-zero exemption: overrides and breakpoints
        if mode == Mode::AE && specials.contains(&t) {
            continue;
        }
        let Some(x) = seg.eval(t) else { continue };
        checked += 1;
        let m = h.flow_margin(&x, &w.eval(t)?)?;
        if m > FLOW_TOL {
            out.push(Violation {
                kind: ViolationKind::FlowSetViolation,
                at: HybridTimePoint::new(t, seg.j),
                magnitude: m,
            });
        }
    }

    for p in seg.samples.windows(2) {
        let (a, b) = (p[0].t, p[1].t);
        let tm = 0.5 * (a + b);
        if specials.iter().any(|s| *s > a && *s < b) {
            continue;
        }
        let d = 1e-3 * (b - a);
        let (Some(xm), Some(xl), Some(xr)) = (seg.eval(tm), seg.eval(tm - d), seg.eval(tm + d)) else { continue };
        let slope: Vec<f64> = xr.iter().zip(&xl).map(|(r, l)| (r - l) / (2.0 * d)).collect();
        let enc = h.flow_enclosure(&xm, &w.eval(tm)?);
        let excess = enc
            .axes()
            .iter()
            .zip(&slope)
            .map(|(iv, s)| iv.margin(*s) / (1.0 + s.abs()))
            .fold(f64::NEG_INFINITY, f64::max);
        checked += 1;
        if excess > DERIV_REL_TOL {
            out.push(Violation {
                kind: ViolationKind::DerivativeOutsideEnclosure,
                at: HybridTimePoint::new(tm, seg.j),
                magnitude: excess,
            });
        }
    }
    Ok(checked)
}
