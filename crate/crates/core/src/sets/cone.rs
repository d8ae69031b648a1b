//! Bouligand tangent cones of polyhedral-type sets and the feasibility test
//! `(F × {v}) ∩ K ≠ ∅`.

use serde::{Deserialize, Serialize};

use super::expr::{Region, SetExpr};
use super::interval::BoxSet;
use super::linear::{dot, Halfspace, Polyhedron};
use super::SetError;

/// Relative tolerance for deciding that a constraint is active.
const ACTIVE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisSign {
    Free,
    NonNeg,
    NonPos,
    Zero,
}

impl AxisSign {
    fn allows(self, v: f64, tol: f64) -> bool {
        match self {
            AxisSign::Free => true,
            AxisSign::NonNeg => v >= -tol,
            AxisSign::NonPos => v <= tol,
            AxisSign::Zero => v.abs() <= tol,
        }
    }

    fn row(self, k: usize, n: usize) -> Vec<Vec<f64>> {
        let unit = |s: f64| {
            let mut a = vec![0.0; n];
            a[k] = s;
            a
        };
        match self {
            AxisSign::Free => vec![],
            AxisSign::NonNeg => vec![unit(-1.0)],
            AxisSign::NonPos => vec![unit(1.0)],
            AxisSign::Zero => vec![unit(1.0), unit(-1.0)],
        }
    }
}

/// Closed convex cone. `Polyhedral` rows `a` mean `a·d ≤ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cone {
    WholeSpace { dim: usize },
    Polyhedral { dim: usize, rows: Vec<Vec<f64>> },
    AxisBox { signs: Vec<AxisSign> },
}

impl Cone {
    pub fn dim(&self) -> usize {
        match self {
            Cone::WholeSpace { dim } | Cone::Polyhedral { dim, .. } => *dim,
            Cone::AxisBox { signs } => signs.len(),
        }
    }

    pub fn is_whole_space(&self) -> bool {
        match self {
            Cone::WholeSpace { .. } => true,
            Cone::Polyhedral { rows, .. } => rows.is_empty(),
            Cone::AxisBox { signs } => signs.iter().all(|s| *s == AxisSign::Free),
        }
    }

    pub fn contains(&self, d: &[f64], tol: f64) -> bool {
        match self {
            Cone::WholeSpace { .. } => true,
            Cone::Polyhedral { rows, .. } => {
                rows.iter().all(|a| dot(a, d) <= tol * a.iter().map(|v| v * v).sum::<f64>().sqrt())
            }
            Cone::AxisBox { signs } => signs.iter().zip(d).all(|(s, v)| s.allows(*v, tol)),
        }
    }

    /// Halfspace rows `a·d ≤ 0` describing the cone.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        match self {
            Cone::WholeSpace { .. } => Vec::new(),
            Cone::Polyhedral { rows, .. } => rows.clone(),
            Cone::AxisBox { signs } => {
                let n = signs.len();
                signs.iter().enumerate().flat_map(|(k, s)| s.row(k, n)).collect()
            }
        }
    }

    fn tidy(self) -> Cone {
        if self.is_whole_space() {
            Cone::WholeSpace { dim: self.dim() }
        } else {
            self
        }
    }
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= ACTIVE_TOL * (1.0 + a.abs().max(b.abs()))
}

fn box_cone(b: &BoxSet, x: &[f64]) -> Cone {
    let signs = b
        .axes()
        .iter()
        .zip(x)
        .map(|(iv, v)| {
            let at_lo = iv.lo.is_finite() && near(*v, iv.lo);
            let at_hi = iv.hi.is_finite() && near(*v, iv.hi);
            match (at_lo, at_hi) {
                (true, true) => AxisSign::Zero,
                (true, false) => AxisSign::NonNeg,
                (false, true) => AxisSign::NonPos,
                (false, false) => AxisSign::Free,
            }
        })
        .collect();
    Cone::AxisBox { signs }.tidy()
}

fn polyhedron_cone(p: &Polyhedron, x: &[f64]) -> Cone {
    let rows = p.active_rows(x, ACTIVE_TOL).into_iter().map(|r| r.a.clone()).collect();
    Cone::Polyhedral { dim: p.dim, rows }.tidy()
}

/// `T_S(ξ)` for sets whose cone is computed exactly.
pub fn tangent_cone(s: &SetExpr, xi: &[f64]) -> Result<Cone, SetError> {
    let n = s.dim();
    if xi.len() != n {
        return Err(SetError::DimensionMismatch { expected: n, found: xi.len() });
    }
    if !s.contains_tol(xi, ACTIVE_TOL)? {
        return Err(SetError::PointNotInSet);
    }
    match s {
        SetExpr::Box { bounds } => Ok(box_cone(bounds, xi)),
        SetExpr::Polyhedron(p) => Ok(polyhedron_cone(p, xi)),
        // open sets: every member is interior
        SetExpr::ComplementOpen { .. } => Ok(Cone::WholeSpace { dim: n }),
        SetExpr::OutputForm(f) => match &f.region {
            Region::Inside(_) => match s.as_polyhedron() {
                Some(p) => Ok(polyhedron_cone(&p, xi)),
                None => Err(SetError::UnsupportedVariant("tangent cone of a nonlinear output form".into())),
            },
            Region::Outside(b) => {
                let Some((h, _)) = f.map.affine_parts() else {
                    return Err(SetError::UnsupportedVariant("tangent cone of a nonlinear output form".into()));
                };
                let y = f.output(xi);
                let nx = f.map.input_dim();
                // faces of the excluded box that y sits on
                let mut faces: Vec<Vec<f64>> = Vec::new();
                for (k, iv) in b.axes().iter().enumerate() {
                    let inside_other = b
                        .axes()
                        .iter()
                        .enumerate()
                        .all(|(i, jv)| i == k || jv.closure().contains(y[i]));
                    if !inside_other {
                        continue;
                    }
                    let mut grad = h[k].clone();
                    grad.resize(n, 0.0);
                    if f.input_dim > 0 {
                        grad[nx + k] = 1.0;
                    }
                    if iv.lo.is_finite() && near(y[k], iv.lo) {
                        // stay at y_k ≤ lo: grad·d ≤ 0
                        faces.push(grad.clone());
                    }
                    if iv.hi.is_finite() && near(y[k], iv.hi) {
                        faces.push(grad.iter().map(|v| -v).collect());
                    }
                }
                match faces.len() {
                    0 => Ok(Cone::WholeSpace { dim: n }),
                    1 => Ok(Cone::Polyhedral { dim: n, rows: faces }),
                    _ => Err(SetError::UnsupportedVariant("nonconvex tangent cone at a corner of an excluded box".into())),
                }
            }
        },
        SetExpr::Product { factors } => {
            let mut off = 0;
            let mut cones = Vec::new();
            for f in factors {
                let d = f.dim();
                cones.push(tangent_cone(f, &xi[off..off + d])?);
                off += d;
            }
            if cones.iter().all(|c| matches!(c, Cone::WholeSpace { .. } | Cone::AxisBox { .. })) {
                let signs = cones
                    .iter()
                    .flat_map(|c| match c {
                        Cone::AxisBox { signs } => signs.clone(),
                        other => vec![AxisSign::Free; other.dim()],
                    })
                    .collect();
                return Ok(Cone::AxisBox { signs }.tidy());
            }
            let mut rows = Vec::new();
            let mut off = 0;
            for c in &cones {
                for r in c.rows() {
                    let mut a = vec![0.0; n];
                    a[off..off + c.dim()].copy_from_slice(&r);
                    rows.push(a);
                }
                off += c.dim();
            }
            Ok(Cone::Polyhedral { dim: n, rows }.tidy())
        }
        SetExpr::Intersection { .. } => match s.as_polyhedron() {
            Some(p) => Ok(polyhedron_cone(&p, xi)),
            None => Err(SetError::UnsupportedVariant("tangent cone of a non-polyhedral intersection".into())),
        },
    }
}

/// Whether `(F × {fixed}) ∩ K ≠ ∅`, where `F` is a box over the leading
/// coordinates of the cone's space and `fixed` fills the rest.
pub fn cone_feasible(k: &Cone, f: &BoxSet, fixed: &[f64]) -> Result<bool, SetError> {
    let n = f.dim() + fixed.len();
    if k.dim() != n {
        return Err(SetError::DimensionMismatch { expected: k.dim(), found: n });
    }
    if f.is_empty() {
        return Ok(false);
    }
    const TOL: f64 = 1e-12;
    match k {
        Cone::WholeSpace { .. } => Ok(true),
        Cone::AxisBox { signs } => {
            let free_ok = signs.iter().zip(f.axes()).all(|(s, iv)| {
                let iv = iv.closure();
                match s {
                    AxisSign::Free => true,
                    AxisSign::NonNeg => iv.hi >= -TOL,
                    AxisSign::NonPos => iv.lo <= TOL,
                    AxisSign::Zero => iv.lo <= TOL && iv.hi >= -TOL,
                }
            });
            let fixed_ok = signs[f.dim()..].iter().zip(fixed).all(|(s, v)| s.allows(*v, TOL));
            Ok(free_ok && fixed_ok)
        }
        Cone::Polyhedral { rows, .. } => {
            let m = f.dim();
            let closed = f.closure();
            if closed.is_bounded() && m <= 8 {
                let hit = closed.vertices().iter().any(|u| {
                    let mut d = u.clone();
                    d.extend_from_slice(fixed);
                    k.contains(&d, TOL)
                });
                // a single halfspace attains its minimum at a vertex
                if hit || rows.len() <= 1 {
                    return Ok(hit);
                }
            }
            let mut p = Polyhedron::from_box(&closed);
            for a in rows {
                let rhs = -dot(&a[m..], fixed);
                p.rows.push(Halfspace::new(a[..m].to_vec(), rhs));
            }
            Ok(p.is_feasible(TOL)?)
        }
    }
}
