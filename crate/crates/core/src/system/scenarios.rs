//! Built-in example systems.

use std::sync::Arc;

use super::{AffineFlow, AffineMap, Assumption1, FnFlow, HybridSystem, JumpMap, SystemError};
use crate::sets::{BoxSet, Interval, OutputMap, Region, SetExpr};
use crate::simulator::Priority;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ScenarioParams {
    /// Flow-set radius `c` of `|x + w| ≤ c`.
    pub c: Option<f64>,
    /// Half-width `δ` of `W = [−δ, δ]`.
    pub delta: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub key: &'static str,
    pub summary: &'static str,
    pub system: HybridSystem,
    /// Overlap rule the scenario is meant to be run with.
    pub priority: Priority,
    pub default_xi: Vec<f64>,
    pub default_signal: &'static str,
}

const NAMES: [&str; 5] = ["ex1", "ex2c", "ex3", "remark2", "riccati"];

pub fn scenario_names() -> &'static [&'static str] {
    &NAMES
}

fn id1() -> OutputMap {
    OutputMap::Identity { dim: 1 }
}

/// `x⁺ = −w`
fn reset_to_minus_w() -> JumpMap {
    JumpMap { maps: vec![AffineMap { a: vec![vec![0.0]], b: vec![vec![-1.0]], c: vec![0.0] }] }
}

/// `ẋ = x`, `C = {|x + w| ≤ c}`, `D = {|x + w| ≥ 1}`, `x⁺ = −w`.
fn growth_system(name: &str, c: f64, w: BoxSet) -> Result<HybridSystem, SystemError> {
    HybridSystem::new(
        name,
        1,
        SetExpr::output_form(id1(), 1, Region::Inside(BoxSet::closed(&[-c], &[c]))),
        SetExpr::output_form(id1(), 1, Region::Outside(BoxSet::new(vec![Interval::open(-1.0, 1.0)]))),
        w,
        Arc::new(AffineFlow::scalar(1.0, 0.0, 0.0)),
        reset_to_minus_w(),
        Assumption1::all(),
    )
}

fn symmetric(delta: f64) -> Result<BoxSet, SystemError> {
    if !(delta >= 0.0) {
        return Err(SystemError::Config(format!("W half-width must be nonnegative, got {delta}")));
    }
    Ok(BoxSet::closed(&[-delta], &[delta]))
}

pub fn scenario(key: &str, p: &ScenarioParams) -> Result<Scenario, SystemError> {
    let delta = p.delta.unwrap_or(0.2);
    let s = match key {
        "ex1" => Scenario {
            key: "ex1",
            summary: "x' = x on |x+w| <= 1.5, x+ = -w on |x+w| >= 1, W = [-0.2, 0.2]",
            system: growth_system("ex1", p.c.unwrap_or(1.5), symmetric(delta)?)?,
            priority: Priority::JumpPriority,
            default_xi: vec![1.0],
            default_signal: "const:0.2",
        },
        "ex2c" => Scenario {
            key: "ex2c",
            summary: "ex1 with flow set |x+w| <= c, c = 1 by default",
            system: growth_system("ex2c", p.c.unwrap_or(1.0), symmetric(delta)?)?,
            priority: Priority::JumpPriority,
            default_xi: vec![1.0],
            default_signal: "ex2-witness",
        },
        "ex3" => Scenario {
            key: "ex3",
            summary: "ex2c with c = 1 and unrestricted inputs",
            system: growth_system("ex3", p.c.unwrap_or(1.0), BoxSet::whole(1))?,
            priority: Priority::JumpPriority,
            default_xi: vec![1.0],
            default_signal: "const:0.2",
        },
        "remark2" => Scenario {
            key: "remark2",
            summary: "x' = -x-w on x+w <= 1, x+ = -w on -2 <= x+w <= 2, W = R",
            system: HybridSystem::new(
                "remark2",
                1,
                SetExpr::output_form(id1(), 1, Region::Inside(BoxSet::new(vec![Interval::new(
                    f64::NEG_INFINITY,
                    1.0,
                    true,
                    true,
                )]))),
                SetExpr::output_form(id1(), 1, Region::Inside(BoxSet::closed(&[-2.0], &[2.0]))),
                BoxSet::whole(1),
                Arc::new(AffineFlow::scalar(-1.0, -1.0, 0.0)),
                reset_to_minus_w(),
                Assumption1::all(),
            )?,
            // (1, -1) lies in D and jumps back to 1 forever under jump priority
            priority: Priority::FlowPriority,
            default_xi: vec![1.0],
            default_signal: "remark2",
        },
        "riccati" => Scenario {
            key: "riccati",
            summary: "x' = x^2 on R x W, no jumps; escapes at t = 1/x0",
            system: HybridSystem::new(
                "riccati",
                1,
                SetExpr::boxed(BoxSet::whole(1).concat(&symmetric(delta)?)),
                SetExpr::boxed(BoxSet::empty(2)),
                symmetric(delta)?,
                Arc::new(FnFlow::new("x^2", |x, _| vec![x[0] * x[0]])),
                JumpMap { maps: vec![] },
                Assumption1::all(),
            )?,
            priority: Priority::JumpPriority,
            default_xi: vec![1.0],
            default_signal: "const:0",
        },
        _ => return Err(SystemError::UnknownScenario(key.to_string())),
    };
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_complete() {
        for name in scenario_names() {
            let s = scenario(name, &ScenarioParams::default()).unwrap();
            assert_eq!(s.key, *name);
        }
        assert!(matches!(scenario("nope", &ScenarioParams::default()), Err(SystemError::UnknownScenario(_))));
        assert!(scenario("ex2c", &ScenarioParams { c: None, delta: Some(-1.0) }).is_err());
    }

    #[test]
    fn ex2c_parameter() {
        let s = scenario("ex2c", &ScenarioParams { c: Some(1.3), delta: None }).unwrap();
        assert!(s.system.in_flow_set(&[1.1], &[0.2]).unwrap());
        assert!(!s.system.in_flow_set(&[1.2], &[0.2]).unwrap());
    }

    #[test]
    fn membership_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let h = scenario("ex1", &ScenarioParams::default()).unwrap().system;
        for _ in 0..2000 {
            let x: f64 = rng.gen_range(-3.0..3.0);
            let w: f64 = rng.gen_range(-0.2..=0.2);
            assert_eq!(h.can_jump(&[x], &[w]).unwrap(), (x + w).abs() >= 1.0);
            assert_eq!(h.in_flow_set(&[x], &[w]).unwrap(), (x + w).abs() <= 1.5);
            // some w in [-0.2, 0.2] with |x + w| <= 1.5
            let brute = (0..=400).any(|k| (x + (-0.2 + 0.001 * k as f64)).abs() <= 1.5);
            if (x.abs() - 1.7).abs() > 1e-3 {
                assert_eq!(h.c0_contains(&[x]).unwrap(), brute, "x = {x}");
            }
        }
    }
}
