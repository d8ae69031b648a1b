use serde::{Deserialize, Serialize};

use super::expr::SetExpr;
use super::interval::BoxSet;
use super::SetError;

fn as_box(s: &SetExpr) -> Result<&BoxSet, SetError> {
    match s {
        SetExpr::Box { bounds } => Ok(bounds),
        _ => Err(SetError::UnsupportedVariant("box operand expected".into())),
    }
}

/// `A ⊖ B = {x | x + B ⊆ A}` for boxes.
pub fn pontryagin_diff(a: &SetExpr, b: &SetExpr) -> Result<SetExpr, SetError> {
    let (a, b) = (as_box(a)?, as_box(b)?);
    if a.dim() != b.dim() {
        return Err(SetError::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(SetExpr::boxed(a.pontryagin_diff(b)))
}

/// `A − B = {a − b}` for boxes.
pub fn minkowski_diff(a: &SetExpr, b: &SetExpr) -> Result<SetExpr, SetError> {
    let (a, b) = (as_box(a)?, as_box(b)?);
    if a.dim() != b.dim() {
        return Err(SetError::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(SetExpr::boxed(a.minkowski_diff(b)))
}

/// Every box in the chain of
/// `range(h) ∩ (C_y − W) ∩ (D_y^c − W) ⊆ int(C_y ⊖ W)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetConditionReport {
    pub holds: bool,
    pub c_minus_w: BoxSet,
    pub dc_minus_w: BoxSet,
    pub interior_pontryagin: BoxSet,
    pub lhs: BoxSet,
    /// A point of the left side outside the right side, when the inclusion fails.
    pub witness: Option<Vec<f64>>,
}

/// Decides the output-space inclusion with exact interval arithmetic.
/// `d_y_complement` is the open box `D_y^c`.
pub fn output_set_condition(
    range_h: &BoxSet,
    c_y: &BoxSet,
    d_y_complement: &BoxSet,
    w: &BoxSet,
) -> Result<SetConditionReport, SetError> {
    let n = c_y.dim();
    for b in [range_h, d_y_complement, w] {
        if b.dim() != n {
            return Err(SetError::DimensionMismatch { expected: n, found: b.dim() });
        }
    }
    let c_minus_w = c_y.minkowski_diff(w);
    let dc_minus_w = d_y_complement.minkowski_diff(w);
    let interior_pontryagin = c_y.pontryagin_diff(w).interior();
    let lhs = range_h.intersect(&c_minus_w).intersect(&dc_minus_w);
    let holds = lhs.is_subset_of(&interior_pontryagin);
    let witness = if holds { None } else { lhs.point_outside(&interior_pontryagin) };
    Ok(SetConditionReport { holds, c_minus_w, dc_minus_w, interior_pontryagin, lhs, witness })
}
