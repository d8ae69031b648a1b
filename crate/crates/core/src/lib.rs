//! Simulation and set-valued analysis of hybrid dynamical systems
//!
//! ```text
//!   ẋ  ∈ F(x, w),   (x, w) ∈ C
//!   x⁺ ∈ G(x, w),   (x, w) ∈ D
//! ```
//!
//! driven by a continuous-time exogenous input `w : ℝ≥0 → W`.
//!
//! The crate is organised bottom-up:
//!
//! * [`hybrid_time`]: hybrid time domains and hybrid arcs (the `(t, j)`-indexed
//!   trajectory container, with CSV/JSON export).
//! * [`signals`]: finitely-piecewise input signals with point overrides, one-sided
//!   limits, the left shift and regularity classification.
//! * [`sets`]: interval boxes with open/closed ends, polyhedra, output-form sets,
//!   projections, Minkowski/Pontryagin differences and Bouligand tangent cones.
//! * [`system`]: the hybrid system record and the built-in scenarios.
//! * [`simulator`]: event-detecting construction of e-/ae-solutions, termination
//!   classification and an independent a-posteriori arc validator.
//! * [`viability`]: trajectory probes and trajectory-independent sufficient
//!   conditions for local existence of constrained flow.
//!
//! Region sweeps and batch solves run on rayon when the `parallel` feature is
//! enabled (the default); see [`exec`].

pub mod exec;
pub mod hybrid_time;
pub mod serde_ext;
pub mod sets;
pub mod signals;
pub mod simulator;
pub mod system;
pub mod viability;

pub use hybrid_time::{HybridArc, HybridTimeDomain, HybridTimePoint};
pub use sets::{BoxSet, Cone, Interval, SetExpr};
pub use signals::{Regularity, Signal};
pub use simulator::{Mode, Priority, SimConfig, SolutionReport};
pub use system::HybridSystem;
pub use viability::{Verdict, VerdictStatus};
