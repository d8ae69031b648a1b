//! Tangent-cone conditions checked on finite grids, plus an exact variant for
//! polyhedral flow sets with affine flow.

use super::{Evidence, Method, Verdict, VerdictStatus, ViabilityError, Witness};
use crate::sets::{box_grid, cone_feasible, tangent_cone, BoxSet, Halfspace, Interval, Polyhedron, SetExpr};
use crate::signals::{PieceFn, Regularity, Signal};
use crate::system::HybridSystem;

const IN_SET_TOL: f64 = 1e-12;

/// Neighbourhood radius, horizon, sample times and grid resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentGrid {
    pub u_radius: f64,
    pub eps: f64,
    /// Sample times in `[0, eps]`; empty means four evenly spaced ones.
    pub taus: Vec<f64>,
    /// Points per axis of the neighbourhood grid; odd keeps the centre.
    pub per_axis: usize,
    /// Retry once with a ten times smaller radius when the first pass fails.
    pub refine: bool,
}

impl Default for TangentGrid {
    fn default() -> Self {
        TangentGrid { u_radius: 1e-2, eps: 0.1, taus: Vec::new(), per_axis: 5, refine: true }
    }
}

impl TangentGrid {
    fn taus(&self) -> Vec<f64> {
        if self.taus.is_empty() {
            (0..4).map(|k| self.eps * k as f64 / 4.0).collect()
        } else {
            self.taus.iter().copied().filter(|t| *t >= 0.0 && *t <= self.eps).collect()
        }
    }
}

/// Grid points of `set ∩ B(center, r)`, plus their projections onto the
/// facets of `set` when it is polyhedral.
fn neighbourhood(set: &SetExpr, center: &[f64], r: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let cube = BoxSet::new(center.iter().map(|c| Interval::closed(c - r, c + r)).collect());
    let in_ball = |z: &[f64]| z.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() <= r * (1.0 + 1e-12);
    let in_set = |z: &[f64]| set.contains_tol(z, IN_SET_TOL).unwrap_or(false);
    let grid: Vec<Vec<f64>> = box_grid(&cube, per_axis.max(2)).into_iter().filter(|z| in_ball(z)).collect();
    let mut pts: Vec<Vec<f64>> = Vec::new();
    if in_set(center) {
        pts.push(center.to_vec());
    }
    pts.extend(grid.iter().filter(|z| in_set(z)).cloned());
    if let Some(p) = set.as_polyhedron() {
        for row in &p.rows {
            let nn: f64 = row.a.iter().map(|v| v * v).sum();
            if nn == 0.0 {
                continue;
            }
            for z in std::iter::once(center).chain(grid.iter().map(Vec::as_slice)) {
                let s = (row.value(z) - row.b) / nn;
                let q: Vec<f64> = z.iter().zip(&row.a).map(|(v, a)| v - s * a).collect();
                if in_ball(&q) && in_set(&q) {
                    pts.push(q);
                }
            }
        }
    }
    pts
}

fn require_declared(h: &HybridSystem) -> Result<(), ViabilityError> {
    if h.assumption1.declared() {
        Ok(())
    } else {
        Err(ViabilityError::AssumptionNotDeclared)
    }
}

fn require_ac(w: &Signal) -> Result<(), ViabilityError> {
    if w.classify() >= Regularity::AbsContinuous {
        Ok(())
    } else {
        Err(ViabilityError::NotAbsolutelyContinuous)
    }
}

/// Runs `pass` at the grid radius and, if it is not conclusive, once more at
/// a tenth of it.
fn with_refinement(
    g: &TangentGrid,
    mut pass: impl FnMut(f64) -> Result<Verdict, ViabilityError>,
) -> Result<Verdict, ViabilityError> {
    let v = pass(g.u_radius)?;
    if v.holds() || !g.refine {
        return Ok(v);
    }
    pass(g.u_radius * 0.1)
}

/// `(F(ζ, ω) × {ẇ(τ)}) ∩ T_C(ζ, ω) ≠ ∅` at every grid point of
/// `C ∩ B((ξ, w(0)), r)` and every grid time `τ` where `ẇ` exists.
pub fn vc_tangent_ac(h: &HybridSystem, xi: &[f64], w: &Signal, g: &TangentGrid) -> Result<Verdict, ViabilityError> {
    require_declared(h)?;
    require_ac(w)?;
    let mut center = xi.to_vec();
    center.extend(w.eval(0.0)?);
    let taus: Vec<f64> = g.taus().into_iter().filter(|t| !w.is_special_time(*t)).collect();
    let n_x = h.n_x();
    with_refinement(g, |r| {
        let pts = neighbourhood(h.flow_set(), &center, r, g.per_axis);
        let mut checked = 0;
        for tau in &taus {
            let dw = w.derivative(*tau)?;
            for z in &pts {
                let cone = tangent_cone(h.flow_set(), z).map_err(ViabilityError::from_set)?;
                let enc = h.flow_enclosure(&z[..n_x], &z[n_x..]);
                checked += 1;
                if !cone_feasible(&cone, &enc, &dw).map_err(ViabilityError::from_set)? {
                    let margin = h.flow_margin(&z[..n_x], &z[n_x..])?;
                    let ev = evidence(checked, r, g, &taus);
                    return Ok(Verdict::new(VerdictStatus::Inconclusive, Method::TangentAc, ev)
                        .with_witness(Witness { point: z.clone(), t: *tau, margin }));
                }
            }
        }
        Ok(Verdict::new(VerdictStatus::Holds, Method::TangentAc, evidence(checked, r, g, &taus)))
    })
}

fn evidence(points: usize, r: f64, g: &TangentGrid, taus: &[f64]) -> Evidence {
    Evidence {
        points_checked: points,
        radius: Some(r),
        eps: Some(g.eps),
        per_axis: Some(g.per_axis),
        taus: taus.to_vec(),
        ..Default::default()
    }
}

/// Range of `ẇ` over `[0, eps]`, exact for piecewise-affine inputs.
fn derivative_range(w: &Signal, eps: f64) -> Result<BoxSet, ViabilityError> {
    let mut out: Option<BoxSet> = None;
    let mut add = |d: Vec<f64>| {
        let p = BoxSet::point(&d);
        out = Some(match out.take() {
            None => p,
            Some(b) => BoxSet::new(
                b.axes().iter().zip(p.axes()).map(|(a, c)| Interval::closed(a.lo.min(c.lo), a.hi.max(c.hi))).collect(),
            ),
        });
    };
    for piece in w.pieces().iter().filter(|p| p.start <= eps) {
        match &piece.func {
            PieceFn::Constant { value } => add(vec![0.0; value.len()]),
            PieceFn::Affine { slope, .. } => add(slope.clone()),
            _ => {
                return Err(ViabilityError::UnsupportedSignalShape(
                    "the certified check needs piecewise-affine inputs".into(),
                ))
            }
        }
    }
    Ok(out.unwrap_or_else(|| BoxSet::point(&vec![0.0; w.dim()])))
}

/// Exact version of [`vc_tangent_ac`] for a polyhedral `C` and affine `F`:
/// every facet that meets the neighbourhood box must be entered by the flow
/// selection everywhere on the box.
pub fn vc_tangent_ac_certified(
    h: &HybridSystem,
    xi: &[f64],
    w: &Signal,
    g: &TangentGrid,
) -> Result<Verdict, ViabilityError> {
    require_declared(h)?;
    require_ac(w)?;
    let poly = h
        .flow_set()
        .as_polyhedron()
        .ok_or_else(|| ViabilityError::UnsupportedVariant("certified check needs a polyhedral flow set".into()))?;
    let flow = h
        .flow_map()
        .as_affine()
        .ok_or_else(|| ViabilityError::UnsupportedVariant("certified check needs an affine flow map".into()))?;
    let dw = derivative_range(w, g.eps)?;
    let n_x = h.n_x();
    let mut center = xi.to_vec();
    center.extend(w.eval(0.0)?);
    with_refinement(g, |r| {
        let cube: Vec<Interval> = center.iter().map(|c| Interval::closed(c - r, c + r)).collect();
        let sup = |coef: &[f64], b: &[Interval]| -> f64 {
            coef.iter().zip(b).map(|(a, iv)| if *a >= 0.0 { a * iv.hi } else { a * iv.lo }).sum()
        };
        let mut checked = 0;
        for row in &poly.rows {
            // skip facets that stay away from the neighbourhood
            if sup(&row.a, &cube) < row.b {
                continue;
            }
            checked += 1;
            let (ax, aw) = row.a.split_at(n_x);
            // ax·(A x + B w + c) is affine in z = (x, w)
            let mut coef = vec![0.0; center.len()];
            let mut constant = 0.0;
            for (i, a) in ax.iter().enumerate() {
                for k in 0..n_x {
                    coef[k] += a * flow.a[i][k];
                }
                for k in 0..h.n_w() {
                    coef[n_x + k] += a * flow.b[i][k];
                }
                constant += a * flow.c[i];
            }
            let worst = constant + sup(&coef, &cube) + sup(aw, dw.axes());
            if worst > 0.0 {
                let ev = Evidence { points_checked: checked, radius: Some(r), eps: Some(g.eps), ..Default::default() };
                return Ok(Verdict::new(VerdictStatus::Inconclusive, Method::TangentAcCertified, ev)
                    .with_witness(Witness { point: center.clone(), t: 0.0, margin: worst }));
            }
        }
        let ev = Evidence { points_checked: checked, radius: Some(r), eps: Some(g.eps), ..Default::default() };
        Ok(Verdict::new(VerdictStatus::Holds, Method::TangentAcCertified, ev))
    })
}

/// `({1} × F(ζ, w(τ))) ∩ T_graph(K_w)(τ, ζ) ≠ ∅` near `(0, ξ)` for
/// continuous piecewise-affine `w` and polyhedral `C`.
pub fn vc_tangent_continuous(
    h: &HybridSystem,
    xi: &[f64],
    w: &Signal,
    g: &TangentGrid,
) -> Result<Verdict, ViabilityError> {
    require_declared(h)?;
    if w.classify() < Regularity::Continuous || !w.is_piecewise_affine() {
        return Err(ViabilityError::UnsupportedSignalShape("needs a continuous piecewise-affine input".into()));
    }
    let poly = h
        .flow_set()
        .as_polyhedron()
        .ok_or_else(|| ViabilityError::UnsupportedVariant("needs a polyhedral flow set".into()))?;
    let n_x = h.n_x();

    // K_w(τ) must be nonempty on [0, eps)
    for k in 0..=20 {
        let tau = g.eps * k as f64 / 21.0;
        let wt = w.eval(tau)?;
        let rows = poly
            .rows
            .iter()
            .map(|r| {
                let (ax, aw) = r.a.split_at(n_x);
                Halfspace::new(ax.to_vec(), r.b - aw.iter().zip(&wt).map(|(a, v)| a * v).sum::<f64>())
            })
            .collect();
        if !Polyhedron::new(n_x, rows).is_feasible(1e-12).map_err(|e| ViabilityError::Set(e.into()))? {
            return Err(ViabilityError::EmptyKw { t: tau });
        }
    }

    with_refinement(g, |r| {
        let mut checked = 0;
        for piece in w.pieces().iter().filter(|p| p.start < g.eps) {
            // w(τ) = p + s τ on this piece
            let (p, s) = match &piece.func {
                PieceFn::Constant { value } => (value.clone(), vec![0.0; value.len()]),
                PieceFn::Affine { value, slope } => {
                    (value.iter().zip(slope).map(|(v, m)| v - m * piece.origin).collect(), slope.clone())
                }
                _ => return Err(ViabilityError::UnsupportedSignalShape("non-affine piece".into())),
            };
            // graph polyhedron in (ζ, τ) coordinates
            let mut rows: Vec<Halfspace> = poly
                .rows
                .iter()
                .map(|row| {
                    let (ax, aw) = row.a.split_at(n_x);
                    let mut a = ax.to_vec();
                    a.push(aw.iter().zip(&s).map(|(u, v)| u * v).sum());
                    Halfspace::new(a, row.b - aw.iter().zip(&p).map(|(u, v)| u * v).sum::<f64>())
                })
                .collect();
            let mut lo = vec![0.0; n_x + 1];
            lo[n_x] = -1.0;
            rows.push(Halfspace::new(lo, -piece.start));
            if piece.end.is_finite() {
                let mut hi = vec![0.0; n_x + 1];
                hi[n_x] = 1.0;
                rows.push(Halfspace::new(hi, piece.end));
            }
            let graph = SetExpr::Polyhedron(Polyhedron::new(n_x + 1, rows));
            let mut center = xi.to_vec();
            center.push(piece.start.max(0.0));
            if piece.start > 0.0 && piece.start > r {
                continue;
            }
            for z in neighbourhood(&graph, &center, r, g.per_axis) {
                let tau = z[n_x];
                let cone = tangent_cone(&graph, &z).map_err(ViabilityError::from_set)?;
                let wt: Vec<f64> = p.iter().zip(&s).map(|(a, b)| a + b * tau).collect();
                let enc = h.flow_enclosure(&z[..n_x], &wt);
                checked += 1;
                if !cone_feasible(&cone, &enc, &[1.0]).map_err(ViabilityError::from_set)? {
                    let margin = h.flow_margin(&z[..n_x], &wt)?;
                    let ev = Evidence { points_checked: checked, radius: Some(r), eps: Some(g.eps), ..Default::default() };
                    return Ok(Verdict::new(VerdictStatus::Inconclusive, Method::TangentContinuous, ev)
                        .with_witness(Witness { point: z[..n_x].to_vec(), t: tau, margin }));
                }
            }
        }
        let ev = Evidence { points_checked: checked, radius: Some(r), eps: Some(g.eps), ..Default::default() };
        Ok(Verdict::new(VerdictStatus::Holds, Method::TangentContinuous, ev))
    })
}

/// The factor `C₁` over `(x, w₁)` of a flow set `C = C₁ × ℝ^{n_w − n₁}`.
fn split_factor(c: &SetExpr, lead: usize) -> Option<SetExpr> {
    let n = c.dim();
    match c {
        SetExpr::Box { bounds } => {
            let (a, b) = bounds.split_at(lead);
            b.is_whole().then(|| SetExpr::boxed(a))
        }
        SetExpr::Product { factors } => {
            let mut off = 0;
            let mut head = Vec::new();
            for f in factors {
                if off >= lead {
                    let tail_whole = match f {
                        SetExpr::Box { bounds } => bounds.is_whole(),
                        _ => false,
                    };
                    if !tail_whole {
                        return None;
                    }
                } else if off + f.dim() <= lead {
                    head.push(f.clone());
                } else {
                    return None;
                }
                off += f.dim();
            }
            Some(if head.len() == 1 { head.pop().expect("one factor") } else { SetExpr::Product { factors: head } })
        }
        other => {
            let p = other.as_polyhedron()?;
            if p.rows.iter().any(|r| r.a[lead..n].iter().any(|v| *v != 0.0)) {
                return None;
            }
            let rows = p.rows.iter().map(|r| Halfspace::new(r.a[..lead].to_vec(), r.b)).collect();
            Some(SetExpr::Polyhedron(Polyhedron::new(lead, rows)))
        }
    }
}

/// Cone test in `(ζ, ω₁)`-space with `F` evaluated at the point values of the
/// unconstrained input `w₂`. Pass `None` for `w1` when it has no components.
pub fn vc_split(
    h: &HybridSystem,
    xi: &[f64],
    w1: Option<&Signal>,
    w2: &Signal,
    g: &TangentGrid,
) -> Result<Verdict, ViabilityError> {
    require_declared(h)?;
    let n1 = h.split.ok_or(ViabilityError::FlowSetNotSplit)?;
    let n_x = h.n_x();
    let c1 = split_factor(h.flow_set(), n_x + n1).ok_or(ViabilityError::FlowSetNotSplit)?;
    let w1_dim = w1.map_or(0, Signal::dim);
    if w1_dim != n1 {
        return Err(ViabilityError::DimensionMismatch { expected: n1, found: w1_dim });
    }
    if w2.dim() != h.n_w() - n1 {
        return Err(ViabilityError::DimensionMismatch { expected: h.n_w() - n1, found: w2.dim() });
    }
    if let Some(w1) = w1 {
        require_ac(w1)?;
    }
    let mut center = xi.to_vec();
    if let Some(w1) = w1 {
        center.extend(w1.eval(0.0)?);
    }
    let mut taus = g.taus();
    // the override-laden values of w2 are part of the check
    taus.extend(w2.special_times().into_iter().filter(|t| *t <= g.eps));
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    if let Some(w1) = w1 {
        taus.retain(|t| !w1.is_special_time(*t));
    }
    with_refinement(g, |r| {
        let pts = neighbourhood(&c1, &center, r, g.per_axis);
        let mut checked = 0;
        for tau in &taus {
            let dw1 = match w1 {
                Some(s) => s.derivative(*tau)?,
                None => Vec::new(),
            };
            let w2_t = w2.eval(*tau)?;
            for z in &pts {
                let cone = tangent_cone(&c1, z).map_err(ViabilityError::from_set)?;
                let mut wv = z[n_x..].to_vec();
                wv.extend_from_slice(&w2_t);
                let enc = h.flow_enclosure(&z[..n_x], &wv);
                checked += 1;
                if !cone_feasible(&cone, &enc, &dw1).map_err(ViabilityError::from_set)? {
                    let margin = c1.margin(z).unwrap_or(f64::NAN);
                    return Ok(Verdict::new(VerdictStatus::Inconclusive, Method::Split, evidence(checked, r, g, &taus))
                        .with_witness(Witness { point: z.clone(), t: *tau, margin }));
                }
            }
        }
        Ok(Verdict::new(VerdictStatus::Holds, Method::Split, evidence(checked, r, g, &taus)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{OutputMap, Region};
    use crate::signals::{parse_signal, Piece};
    use crate::system::{scenario, AffineFlow, Assumption1, JumpMap, ScenarioParams};
    use std::sync::Arc;

    fn ex1() -> HybridSystem {
        scenario("ex1", &ScenarioParams::default()).unwrap().system
    }

    /// ex1's sets with `ẋ = −x`.
    fn contracting() -> HybridSystem {
        let h = ex1();
        HybridSystem::new(
            "contracting",
            1,
            h.flow_set().clone(),
            h.jump_set().clone(),
            h.input_set().clone(),
            Arc::new(AffineFlow::scalar(-1.0, 0.0, 0.0)),
            h.jump_map().clone(),
            Assumption1::all(),
        )
        .unwrap()
    }

    #[test]
    fn tangent_ac_examples() {
        let g = TangentGrid::default();
        let w = parse_signal("const:0.2", ex1().input_set()).unwrap();
        assert!(vc_tangent_ac(&ex1(), &[0.0], &w, &g).unwrap().holds());
        let v = vc_tangent_ac(&ex1(), &[1.3], &w, &g).unwrap();
        assert_eq!(v.status, VerdictStatus::Inconclusive);
        assert!(vc_tangent_ac(&contracting(), &[1.3], &w, &g).unwrap().holds());

        let jumpy = parse_signal("steps:0:0.1,0.05:0.2", ex1().input_set()).unwrap();
        assert_eq!(vc_tangent_ac(&ex1(), &[0.0], &jumpy, &g), Err(ViabilityError::NotAbsolutelyContinuous));
    }

    #[test]
    fn certified_agrees_with_grid() {
        let g = TangentGrid::default();
        let w = parse_signal("const:0.2", ex1().input_set()).unwrap();
        assert!(vc_tangent_ac_certified(&ex1(), &[0.0], &w, &g).unwrap().holds());
        assert!(!vc_tangent_ac_certified(&ex1(), &[1.3], &w, &g).unwrap().holds());
        assert!(vc_tangent_ac_certified(&contracting(), &[1.3], &w, &g).unwrap().holds());
    }

    #[test]
    fn continuous_examples() {
        let g = TangentGrid::default();
        let w = parse_signal("affine:0.2,-0.1", &BoxSet::whole(1)).unwrap();
        let h = ex1();
        let h = HybridSystem::new(
            "ex1-free-w",
            1,
            h.flow_set().clone(),
            h.jump_set().clone(),
            BoxSet::whole(1),
            Arc::new(AffineFlow::scalar(1.0, 0.0, 0.0)),
            h.jump_map().clone(),
            Assumption1::all(),
        )
        .unwrap();
        let v = vc_tangent_continuous(&h, &[1.3], &w, &g).unwrap();
        assert_eq!(v.status, VerdictStatus::Inconclusive);
        let c = HybridSystem::new(
            "c",
            1,
            h.flow_set().clone(),
            h.jump_set().clone(),
            BoxSet::whole(1),
            Arc::new(AffineFlow::scalar(-1.0, 0.0, 0.0)),
            h.jump_map().clone(),
            Assumption1::all(),
        )
        .unwrap();
        assert!(vc_tangent_continuous(&c, &[1.3], &w, &g).unwrap().holds());
        let constant = parse_signal("const:0.2", &BoxSet::whole(1)).unwrap();
        assert!(vc_tangent_continuous(&h, &[0.0], &constant, &g).unwrap().holds());
        let step = parse_signal("steps:0:0,1:1", &BoxSet::whole(1)).unwrap();
        assert!(matches!(
            vc_tangent_continuous(&h, &[0.0], &step, &g),
            Err(ViabilityError::UnsupportedSignalShape(_))
        ));
    }

    fn split_system(flow: AffineFlow, c1: BoxSet) -> HybridSystem {
        let w = BoxSet::closed(&[-0.5], &[0.5]);
        HybridSystem::new(
            "split",
            1,
            SetExpr::Product { factors: vec![SetExpr::boxed(c1), SetExpr::boxed(BoxSet::whole(1))] },
            SetExpr::boxed(BoxSet::empty(2)),
            w,
            Arc::new(flow),
            JumpMap { maps: vec![] },
            Assumption1::all(),
        )
        .unwrap()
        .with_split(0)
    }

    #[test]
    fn split_examples() {
        let g = TangentGrid::default();
        let w = BoxSet::closed(&[-0.5], &[0.5]);
        let h = split_system(AffineFlow::scalar(1.0, 0.0, 0.0), BoxSet::closed(&[-1.0], &[1.0]));
        let w2 = parse_signal("const:0.3", &w).unwrap();
        assert!(vc_split(&h, &[0.0], None, &w2, &g).unwrap().holds());

        // x' = -x + w2 on x <= 1, boundary point, overrides everywhere in W
        let h = split_system(
            AffineFlow::scalar(-1.0, 1.0, 0.0),
            BoxSet::new(vec![Interval::new(f64::NEG_INFINITY, 1.0, true, true)]),
        );
        let w2 = parse_signal("const:-0.5; override:0.025=0.5; override:0.05=-0.1; override:0.075=0.5", &w).unwrap();
        assert!(vc_split(&h, &[1.0], None, &w2, &g).unwrap().holds());

        let plain = ex1();
        assert_eq!(
            vc_split(&plain, &[0.0], None, &w2, &g),
            Err(ViabilityError::FlowSetNotSplit)
        );
    }

    #[test]
    fn split_reduces_to_tangent_ac() {
        // C = C1 × R with w1 the constrained input; a constant w2 changes nothing
        let c1 = SetExpr::output_form(
            OutputMap::Identity { dim: 1 },
            1,
            Region::Inside(BoxSet::closed(&[-1.5], &[1.5])),
        );
        let flow = AffineFlow { a: vec![vec![1.0]], b: vec![vec![0.0, 0.0]], c: vec![0.0], spread: vec![] };
        let w_box = BoxSet::closed(&[-0.2, -1.0], &[0.2, 1.0]);
        let h = HybridSystem::new(
            "split-ex1",
            1,
            SetExpr::Product { factors: vec![c1, SetExpr::boxed(BoxSet::whole(1))] },
            SetExpr::boxed(BoxSet::empty(3)),
            w_box,
            Arc::new(flow),
            JumpMap { maps: vec![] },
            Assumption1::all(),
        )
        .unwrap()
        .with_split(1);
        let g = TangentGrid::default();
        let w1 = parse_signal("const:0.2", &BoxSet::closed(&[-0.2], &[0.2])).unwrap();
        let w2 = Signal::new(
            vec![Piece::new(0.0, f64::INFINITY, PieceFn::Constant { value: vec![0.7] })],
            vec![],
            BoxSet::closed(&[-1.0], &[1.0]),
        )
        .unwrap();
        let w_ex1 = parse_signal("const:0.2", ex1().input_set()).unwrap();
        for xi in [0.0, 1.3] {
            let a = vc_split(&h, &[xi], Some(&w1), &w2, &g).unwrap().status;
            let b = vc_tangent_ac(&ex1(), &[xi], &w_ex1, &g).unwrap().status;
            assert_eq!(a, b, "xi = {xi}");
        }
    }
}
