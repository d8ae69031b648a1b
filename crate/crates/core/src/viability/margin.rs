use serde::{Deserialize, Serialize};

use super::{Evidence, Method, Verdict, VerdictStatus, ViabilityError, Witness, DEFAULT_DELTA_GRID};
use crate::exec::{map_collect, Execution};
use crate::sets::{box_grid, output_set_condition, BoxSet, Region, SetExpr};
use crate::simulator::Mode;
use crate::system::HybridSystem;

/// Worst row slack of `B(ξ, δ) × W ⊆ C` for polyhedral `C`; `≤ 0` means the
/// inclusion holds.
fn ball_excess(rows: &[(Vec<f64>, f64, f64)], xi: &[f64], delta: f64) -> f64 {
    rows.iter()
        .map(|(ax, sup_w, b)| {
            let norm = ax.iter().map(|v| v * v).sum::<f64>().sqrt();
            ax.iter().zip(xi).map(|(a, x)| a * x).sum::<f64>() + delta * norm + sup_w - b
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Per row of `C`: state coefficients, `sup_W a_w·ω` and the offset.
fn ball_rows(h: &HybridSystem) -> Result<Vec<(Vec<f64>, f64, f64)>, ViabilityError> {
    let poly = h
        .flow_set()
        .as_polyhedron()
        .ok_or_else(|| ViabilityError::UnsupportedVariant("ball margin needs a polyhedral flow set".into()))?;
    let n_x = h.n_x();
    Ok(poly
        .rows
        .iter()
        .map(|r| {
            let (ax, aw) = r.a.split_at(n_x);
            let sup_w: f64 = aw
                .iter()
                .zip(h.input_set().axes())
                .map(|(a, iv)| match *a {
                    a if a > 0.0 => a * iv.hi,
                    a if a < 0.0 => a * iv.lo,
                    _ => 0.0,
                })
                .sum();
            (ax.to_vec(), sup_w, r.b)
        })
        .collect())
}

/// `B(ξ, δ) × W ⊆ C` for the largest `δ` of the grid that satisfies it.
/// When it holds, flow from `ξ` is possible for every input with values in `W`.
pub fn vc_ball_margin(h: &HybridSystem, xi: &[f64], delta_grid: &[f64]) -> Result<Verdict, ViabilityError> {
    if xi.len() != h.n_x() {
        return Err(ViabilityError::DimensionMismatch { expected: h.n_x(), found: xi.len() });
    }
    let rows = ball_rows(h)?;
    Ok(ball_verdict(&rows, xi, delta_grid, Method::BallMargin))
}

fn ball_verdict(rows: &[(Vec<f64>, f64, f64)], xi: &[f64], delta_grid: &[f64], method: Method) -> Verdict {
    let mut grid: Vec<f64> = delta_grid.iter().copied().filter(|d| *d > 0.0).collect();
    if grid.is_empty() {
        grid = DEFAULT_DELTA_GRID.to_vec();
    }
    grid.sort_by(|a, b| b.total_cmp(a));
    for d in &grid {
        if ball_excess(rows, xi, *d) <= 0.0 {
            let ev = Evidence { points_checked: 1, delta: Some(*d), ..Default::default() };
            return Verdict::new(VerdictStatus::Holds, method, ev);
        }
    }
    let smallest = grid[grid.len() - 1];
    let ev = Evidence { points_checked: 1, delta: Some(smallest), ..Default::default() };
    Verdict::new(VerdictStatus::Inconclusive, method, ev).with_witness(Witness {
        point: xi.to_vec(),
        t: 0.0,
        margin: ball_excess(rows, xi, smallest),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionOptions {
    pub per_axis: usize,
    pub delta_grid: Vec<f64>,
    #[serde(default)]
    pub exec: Execution,
}

impl Default for RegionOptions {
    fn default() -> Self {
        RegionOptions { per_axis: 41, delta_grid: DEFAULT_DELTA_GRID.to_vec(), exec: Execution::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub status: VerdictStatus,
    pub mode: Mode,
    /// `Ξ₀ ∩ Π_x(D^c, W)`.
    pub region: SetExpr,
    pub points: usize,
    pub inconclusive: Vec<Vec<f64>>,
    /// Smallest certified ball radius over the points that hold.
    pub min_delta: Option<f64>,
}

/// Ball-margin check on a grid of `Ξ₀ ∩ Π_x(D^c, W)`, the states from which no
/// jump is available for some input value. The test is independent of `mode`
/// since it covers every input with values in `W`.
pub fn existence_over_region(
    h: &HybridSystem,
    xi0: &BoxSet,
    mode: Mode,
    opts: &RegionOptions,
) -> Result<RegionReport, ViabilityError> {
    if xi0.dim() != h.n_x() {
        return Err(ViabilityError::DimensionMismatch { expected: h.n_x(), found: xi0.dim() });
    }
    let no_jump = h.jump_set().complement().project_x(h.n_x(), h.input_set()).map_err(ViabilityError::from_set)?;
    let (region, candidates) = match &no_jump {
        SetExpr::Box { bounds } => {
            let b = xi0.intersect(bounds);
            let pts = box_grid(&b, opts.per_axis);
            (SetExpr::boxed(b), pts)
        }
        other => {
            let pts = box_grid(xi0, opts.per_axis);
            (SetExpr::Intersection { members: vec![SetExpr::boxed(xi0.clone()), other.clone()] }, pts)
        }
    };
    let points: Vec<Vec<f64>> = candidates
        .into_iter()
        .filter(|p| xi0.contains(p) && region.contains(p).unwrap_or(false))
        .collect();
    let rows = ball_rows(h)?;
    let verdicts = map_collect(opts.exec, &points, |p| ball_verdict(&rows, p, &opts.delta_grid, Method::RegionBallMargin));
    let mut inconclusive = Vec::new();
    let mut min_delta: Option<f64> = None;
    for (p, v) in points.iter().zip(&verdicts) {
        if v.holds() {
            let d = v.evidence.delta.unwrap_or(f64::NAN);
            min_delta = Some(min_delta.map_or(d, |m| m.min(d)));
        } else {
            inconclusive.push(p.clone());
        }
    }
    let status = if inconclusive.is_empty() { VerdictStatus::Holds } else { VerdictStatus::Inconclusive };
    Ok(RegionReport { status, mode, region, points: points.len(), inconclusive, min_delta })
}

/// Output-space test for `C = {h(x) + w ∈ C_y}`, `D = {h(x) + w ∉ B}` with
/// `D_y^c = B`. Sufficient for the ball margin on the no-jump region; with an
/// open `h` a failure is conclusive.
pub fn output_form_existence(h: &HybridSystem, range_h: &BoxSet) -> Result<Verdict, ViabilityError> {
    let SetExpr::OutputForm(c) = h.flow_set() else {
        return Err(ViabilityError::NotOutputForm("flow set".into()));
    };
    let SetExpr::OutputForm(d) = h.jump_set() else {
        return Err(ViabilityError::NotOutputForm("jump set".into()));
    };
    let Region::Inside(c_y) = &c.region else {
        return Err(ViabilityError::NotOutputForm("flow set must be h(x) + w inside a box".into()));
    };
    let Region::Outside(d_y_complement) = &d.region else {
        return Err(ViabilityError::NotOutputForm("jump set must be h(x) + w outside a box".into()));
    };
    if c.map != d.map {
        return Err(ViabilityError::NotOutputForm("flow and jump sets use different output maps".into()));
    }
    if c.input_dim == 0 || d.input_dim != c.input_dim {
        return Err(ViabilityError::NotOutputForm("the input must enter additively".into()));
    }
    let report = output_set_condition(range_h, c_y, d_y_complement, h.input_set())?;
    let witness = report.witness.clone();
    let open = c.map.is_open_map();
    let ev = Evidence { points_checked: 1, set_condition: Some(report.clone()), ..Default::default() };
    if report.holds {
        return Ok(Verdict::new(VerdictStatus::Holds, Method::OutputSetCondition, ev));
    }
    let status = if open { VerdictStatus::FailsWithWitness } else { VerdictStatus::Inconclusive };
    let v = Verdict::new(status, Method::OutputSetCondition, ev);
    Ok(match witness {
        Some(point) => {
            let margin = report.interior_pontryagin.margin(&point);
            v.with_witness(Witness { point, t: 0.0, margin })
        }
        None => v,
    })
}
