//! The data `(C, F, D, G, W)` of a hybrid system with inputs.

mod maps;
mod scenarios;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sets::{BoxSet, SetError, SetExpr};

pub use maps::{AffineFlow, AffineMap, FlowMap, FnFlow, JumpMap};
pub use scenarios::{scenario, scenario_names, Scenario, ScenarioParams};

pub const SYSTEM_SCHEMA: &str = "hybridsim.system/1";

/// Tolerance on jump-set membership when a jump is requested.
const JUMP_TOL: f64 = 1e-9;
/// Slack when checking a selection against its enclosure.
const ENCLOSURE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SystemError {
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{0} must be closed")]
    NotClosed(&'static str),
    #[error("(x, w) = ({x:?}, {w:?}) is not in the jump set")]
    JumpSetViolation { x: Vec<f64>, w: Vec<f64> },
    #[error("selection {selection:?} lies outside the enclosure {enclosure}")]
    SelectionOutsideEnclosure { selection: Vec<f64>, enclosure: BoxSet },
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("invalid system configuration: {0}")]
    Config(String),
}

/// The user's declaration of outer semicontinuity, local boundedness and
/// nonempty convex values of `F`. Recorded, not proven.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assumption1 {
    pub outer_semicontinuous: bool,
    pub locally_bounded: bool,
    pub convex_nonempty: bool,
}

impl Assumption1 {
    pub fn all() -> Self {
        Assumption1 { outer_semicontinuous: true, locally_bounded: true, convex_nonempty: true }
    }

    pub fn declared(&self) -> bool {
        self.outer_semicontinuous && self.locally_bounded && self.convex_nonempty
    }
}

#[derive(Clone)]
pub struct HybridSystem {
    pub name: String,
    n_x: usize,
    n_w: usize,
    flow_set: SetExpr,
    jump_set: SetExpr,
    input_set: BoxSet,
    flow: Arc<dyn FlowMap>,
    jump: JumpMap,
    pub assumption1: Assumption1,
    /// `Some(n1)` when `C = C₁ × ℝ^{n_w − n1}` with `C₁` over `(x, w₁)`.
    pub split: Option<usize>,
    c0: Option<SetExpr>,
}

impl fmt::Debug for HybridSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HybridSystem")
            .field("name", &self.name)
            .field("n_x", &self.n_x)
            .field("n_w", &self.n_w)
            .field("flow_set", &self.flow_set)
            .field("jump_set", &self.jump_set)
            .field("input_set", &self.input_set)
            .field("flow", &self.flow)
            .field("jump", &self.jump)
            .finish()
    }
}

impl HybridSystem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        n_x: usize,
        flow_set: SetExpr,
        jump_set: SetExpr,
        input_set: BoxSet,
        flow: Arc<dyn FlowMap>,
        jump: JumpMap,
        assumption1: Assumption1,
    ) -> Result<Self, SystemError> {
        let n_w = input_set.dim();
        for s in [&flow_set, &jump_set] {
            if s.dim() != n_x + n_w {
                return Err(SystemError::DimensionMismatch { expected: n_x + n_w, found: s.dim() });
            }
        }
        if !flow_set.is_closed() {
            return Err(SystemError::NotClosed("the flow set"));
        }
        if !input_set.is_closed() {
            return Err(SystemError::NotClosed("the input set"));
        }
        jump.check_dims(n_x, n_w)?;
        let c0 = flow_set.project_x(n_x, &input_set).ok();
        Ok(HybridSystem {
            name: name.into(),
            n_x,
            n_w,
            flow_set,
            jump_set,
            input_set,
            flow,
            jump,
            assumption1,
            split: None,
            c0,
        })
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_w(&self) -> usize {
        self.n_w
    }

    pub fn flow_set(&self) -> &SetExpr {
        &self.flow_set
    }

    pub fn jump_set(&self) -> &SetExpr {
        &self.jump_set
    }

    pub fn input_set(&self) -> &BoxSet {
        &self.input_set
    }

    pub fn flow_map(&self) -> &dyn FlowMap {
        self.flow.as_ref()
    }

    pub fn jump_map(&self) -> &JumpMap {
        &self.jump
    }

    /// `C₀ = Π_x(C, W)`, when the projection is exact.
    pub fn c0(&self) -> Option<&SetExpr> {
        self.c0.as_ref()
    }

    fn pair(&self, x: &[f64], w: &[f64]) -> Result<Vec<f64>, SystemError> {
        if x.len() != self.n_x {
            return Err(SystemError::DimensionMismatch { expected: self.n_x, found: x.len() });
        }
        if w.len() != self.n_w {
            return Err(SystemError::DimensionMismatch { expected: self.n_w, found: w.len() });
        }
        let mut z = x.to_vec();
        z.extend_from_slice(w);
        Ok(z)
    }

    pub fn in_flow_set(&self, x: &[f64], w: &[f64]) -> Result<bool, SystemError> {
        Ok(self.flow_set.contains(&self.pair(x, w)?)?)
    }

    pub fn flow_margin(&self, x: &[f64], w: &[f64]) -> Result<f64, SystemError> {
        Ok(self.flow_set.margin(&self.pair(x, w)?)?)
    }

    pub fn jump_margin(&self, x: &[f64], w: &[f64]) -> Result<f64, SystemError> {
        Ok(self.jump_set.margin(&self.pair(x, w)?)?)
    }

    /// `(x, w) ∈ D`, exactly.
    pub fn can_jump(&self, x: &[f64], w: &[f64]) -> Result<bool, SystemError> {
        Ok(self.jump_set.contains(&self.pair(x, w)?)?)
    }

    pub(crate) fn can_jump_tol(&self, x: &[f64], w: &[f64], tol: f64) -> Result<bool, SystemError> {
        Ok(self.jump_set.contains_tol(&self.pair(x, w)?, tol)?)
    }

    /// Every selection of `G(x, w)`, in declaration order.
    pub fn jump_successors(&self, x: &[f64], w: &[f64]) -> Result<Vec<Vec<f64>>, SystemError> {
        if !self.can_jump_tol(x, w, JUMP_TOL)? {
            return Err(SystemError::JumpSetViolation { x: x.to_vec(), w: w.to_vec() });
        }
        Ok(self.jump.successors(x, w))
    }

    /// The flow selection, checked against the enclosure `F(x, w)`.
    pub fn flow_select(&self, x: &[f64], w: &[f64]) -> Result<Vec<f64>, SystemError> {
        self.pair(x, w)?;
        let v = self.flow.select(x, w);
        let enc = self.flow.enclosure(x, w);
        let ok = enc.axes().iter().zip(&v).all(|(iv, s)| iv.margin(*s) <= ENCLOSURE_TOL * (1.0 + s.abs()));
        if !ok {
            return Err(SystemError::SelectionOutsideEnclosure { selection: v, enclosure: enc });
        }
        Ok(v)
    }

    pub fn flow_enclosure(&self, x: &[f64], w: &[f64]) -> BoxSet {
        self.flow.enclosure(x, w)
    }

    /// `x ∈ C₀`.
    pub fn c0_contains(&self, x: &[f64]) -> Result<bool, SystemError> {
        match &self.c0 {
            Some(c0) => Ok(c0.contains(x)?),
            None => Err(self.flow_set.project_x(self.n_x, &self.input_set).err().unwrap_or_else(|| {
                SetError::UnsupportedVariant("projection".into())
            }))?,
        }
    }

    /// Signed margin of `x` with respect to `C₀`.
    pub fn c0_margin(&self, x: &[f64]) -> Result<f64, SystemError> {
        match &self.c0 {
            Some(c0) => Ok(c0.margin(x)?),
            None => Err(SystemError::Set(SetError::UnsupportedVariant("projection".into()))),
        }
    }

    /// Checks the declared selection and enclosure at the given `(x, w)` points.
    pub fn spot_check(&self, points: &[(Vec<f64>, Vec<f64>)]) -> Vec<SystemError> {
        points
            .iter()
            .filter_map(|(x, w)| match self.flow_select(x, w) {
                Ok(_) if self.flow.enclosure(x, w).is_empty() && self.assumption1.declared() => {
                    Some(SystemError::Config(format!("empty F at x={x:?}, w={w:?}")))
                }
                Ok(_) => None,
                Err(e) => Some(e),
            })
            .collect()
    }

    pub fn with_split(mut self, n_w1: usize) -> Self {
        self.split = Some(n_w1);
        self
    }

    pub fn to_config(&self) -> Option<SystemConfig> {
        Some(SystemConfig {
            schema: SYSTEM_SCHEMA.into(),
            name: self.name.clone(),
            n_x: self.n_x,
            flow_set: self.flow_set.clone(),
            jump_set: self.jump_set.clone(),
            input_set: self.input_set.clone(),
            flow: self.flow.as_affine()?.clone(),
            jump: self.jump.clone(),
            assumption1: self.assumption1,
            split: self.split,
        })
    }

    pub fn from_config(cfg: SystemConfig) -> Result<Self, SystemError> {
        if cfg.schema != SYSTEM_SCHEMA {
            return Err(SystemError::Config(format!("unsupported schema {:?}", cfg.schema)));
        }
        cfg.flow.check_dims(cfg.n_x, cfg.input_set.dim())?;
        let mut h = HybridSystem::new(
            cfg.name,
            cfg.n_x,
            cfg.flow_set,
            cfg.jump_set,
            cfg.input_set,
            Arc::new(cfg.flow),
            cfg.jump,
            cfg.assumption1,
        )?;
        h.split = cfg.split;
        Ok(h)
    }
}

/// JSON form of a system with affine flow and jump maps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub schema: String,
    pub name: String,
    pub n_x: usize,
    pub flow_set: SetExpr,
    pub jump_set: SetExpr,
    pub input_set: BoxSet,
    pub flow: AffineFlow,
    pub jump: JumpMap,
    #[serde(default)]
    pub assumption1: Assumption1,
    #[serde(default)]
    pub split: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex1() -> HybridSystem {
        scenario("ex1", &ScenarioParams::default()).unwrap().system
    }

    #[test]
    fn can_jump_examples() {
        assert!(ex1().can_jump(&[1.2], &[0.2]).unwrap());
        let ex2 = scenario("ex2c", &ScenarioParams::default()).unwrap().system;
        assert!(!ex2.can_jump(&[1.0], &[-0.2]).unwrap());
        let r2 = scenario("remark2", &ScenarioParams::default()).unwrap().system;
        assert!(!r2.can_jump(&[1.0], &[2.0]).unwrap());
        assert!(matches!(ex1().can_jump(&[1.0, 2.0], &[0.0]), Err(SystemError::DimensionMismatch { .. })));
    }

    #[test]
    fn jump_successor_examples() {
        assert_eq!(ex1().jump_successors(&[-1.2], &[0.2]).unwrap(), vec![vec![-0.2]]);
        assert_eq!(ex1().jump_successors(&[1.2], &[-0.2]).unwrap(), vec![vec![0.2]]);
        assert!(matches!(ex1().jump_successors(&[0.0], &[0.0]), Err(SystemError::JumpSetViolation { .. })));
        let two = JumpMap {
            maps: vec![
                AffineMap { a: vec![vec![0.0]], b: vec![vec![-1.0]], c: vec![0.0] },
                AffineMap { a: vec![vec![0.0]], b: vec![vec![0.0]], c: vec![0.0] },
            ],
        };
        assert_eq!(two.successors(&[1.2], &[0.2]), vec![vec![-0.2], vec![0.0]]);
    }

    #[test]
    fn flow_select_examples() {
        assert_eq!(ex1().flow_select(&[1.0], &[0.0]).unwrap(), vec![1.0]);
        let r2 = scenario("remark2", &ScenarioParams::default()).unwrap().system;
        assert_eq!(r2.flow_select(&[1.0], &[-1.0]).unwrap(), vec![0.0]);
        let f = AffineFlow { a: vec![vec![0.0]], b: vec![vec![0.0]], c: vec![0.0], spread: vec![1.0] };
        assert!(f.enclosure(&[3.0], &[1.0]).contains(&f.select(&[3.0], &[1.0])));
    }

    #[test]
    fn c0_examples() {
        let h = ex1();
        assert!(h.c0_contains(&[1.6]).unwrap());
        assert!(!h.c0_contains(&[1.8]).unwrap());
        let ex3 = scenario("ex3", &ScenarioParams::default()).unwrap().system;
        for x in [-1e6, 0.0, 37.5] {
            assert!(ex3.c0_contains(&[x]).unwrap());
        }
    }

    #[test]
    fn config_round_trip() {
        let h = ex1();
        let cfg = h.to_config().unwrap();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back = HybridSystem::from_config(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.to_config().unwrap(), cfg);
    }

    #[test]
    fn scenarios_pass_spot_checks() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for name in scenario_names() {
            let h = scenario(name, &ScenarioParams::default()).unwrap().system;
            let pts: Vec<_> = (0..1000)
                .map(|_| {
                    let x: Vec<f64> = (0..h.n_x()).map(|_| rng.gen_range(-3.0..3.0)).collect();
                    let w: Vec<f64> = (0..h.n_w()).map(|_| rng.gen_range(-3.0..3.0)).collect();
                    (x, w)
                })
                .filter(|(x, w)| h.in_flow_set(x, w).unwrap())
                .collect();
            assert!(h.spot_check(&pts).is_empty(), "{name}");
        }
    }

    #[test]
    fn rejects_open_flow_set() {
        let open = SetExpr::boxed(BoxSet::new(vec![crate::Interval::open(-1.0, 1.0), crate::Interval::real_line()]));
        let r = HybridSystem::new(
            "bad",
            1,
            open,
            SetExpr::boxed(BoxSet::empty(2)),
            BoxSet::whole(1),
            Arc::new(AffineFlow::zero(1, 1)),
            JumpMap { maps: vec![] },
            Assumption1::all(),
        );
        assert!(matches!(r, Err(SystemError::NotClosed(_))));
    }
}
