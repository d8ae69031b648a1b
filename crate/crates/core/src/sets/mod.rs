//! Set descriptions for `C`, `D`, `W` and the calculus used on them.

mod calculus;
mod cone;
mod expr;
mod interval;
mod linear;

use thiserror::Error;

pub use calculus::{minkowski_diff, output_set_condition, pontryagin_diff, SetConditionReport};
pub use cone::{cone_feasible, tangent_cone, AxisSign, Cone};
pub use expr::{MonotoneComponent, MonotoneFn, OutputForm, OutputMap, Region, SampledProjection, SetExpr};
pub(crate) use expr::box_grid;
pub use interval::{BoxSet, Interval};
pub use linear::{Halfspace, LinearError, Polyhedron};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SetError {
    #[error("expected a point of dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported set variant: {0}")]
    UnsupportedVariant(String),
    #[error("point is not in the set")]
    PointNotInSet,
    #[error(transparent)]
    Linear(LinearError),
}
