//! Local existence of constrained flow: trajectory probes and sufficient
//! conditions that do not depend on a trajectory.
//!
//! Sufficient tests report `Holds` or `Inconclusive`. `FailsWithWitness` comes
//! only from probes whose failure is forced by the geometry, or from the
//! output-space inclusion with an open output map, where it is also necessary.

mod certificate;
mod margin;
mod probe;
mod tangent;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sets::{SetConditionReport, SetError};
use crate::signals::SignalError;
use crate::simulator::SimError;
use crate::system::SystemError;

pub use certificate::{inputs_hash, Certificate, CERTIFICATE_SCHEMA};
pub use margin::{existence_over_region, output_form_existence, vc_ball_margin, RegionOptions, RegionReport};
pub use probe::{nontrivial_existence, vc_probe};
pub use tangent::{vc_split, vc_tangent_ac, vc_tangent_ac_certified, vc_tangent_continuous, TangentGrid};

pub const DEFAULT_EPS_GRID: [f64; 3] = [1e-1, 1e-2, 1e-3];
pub const DEFAULT_DELTA_GRID: [f64; 6] = [0.2, 0.1, 0.05, 0.01, 1e-3, 1e-4];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictStatus {
    Holds,
    Inconclusive,
    FailsWithWitness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Jump,
    Probe,
    TangentAc,
    TangentAcCertified,
    TangentContinuous,
    Split,
    BallMargin,
    RegionBallMargin,
    OutputSetCondition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub t: f64,
    pub margin: f64,
}

/// Parameters a verdict was reached with, so that grid coverage is auditable.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub points_checked: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub taus: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eps_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_condition: Option<SetConditionReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub evidence: Evidence,
}

impl Verdict {
    fn new(status: VerdictStatus, method: Method, evidence: Evidence) -> Self {
        Verdict { status, method, witness: None, evidence }
    }

    fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn holds(&self) -> bool {
        self.status == VerdictStatus::Holds
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ViabilityError {
    #[error("the input must be absolutely continuous")]
    NotAbsolutelyContinuous,
    #[error("unsupported set: {0}")]
    UnsupportedVariant(String),
    #[error("unsupported signal shape: {0}")]
    UnsupportedSignalShape(String),
    #[error("K_w(t) is empty at t = {t}")]
    EmptyKw { t: f64 },
    #[error("the flow set is not declared as a product C1 x R^n")]
    FlowSetNotSplit,
    #[error("not in output form: {0}")]
    NotOutputForm(String),
    #[error("the flow map's regularity assumptions are not declared")]
    AssumptionNotDeclared,
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    System(#[from] SystemError),
}

impl ViabilityError {
    /// Unsupported set kinds surface as their own variant.
    fn from_set(e: SetError) -> Self {
        match e {
            SetError::UnsupportedVariant(s) => ViabilityError::UnsupportedVariant(s),
            other => ViabilityError::Set(other),
        }
    }
}
