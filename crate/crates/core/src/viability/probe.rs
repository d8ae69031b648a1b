use super::{Evidence, Method, Verdict, VerdictStatus, Witness};
use crate::sets::{cone_feasible, tangent_cone};
use crate::signals::Signal;
use crate::simulator::{flow_segment_with, JumpTrigger, Mode, Priority, SimConfig, SimError};
use crate::system::HybridSystem;

/// Whether the exit from `C` at `(ξ, w(0⁺))` is forced whatever the
/// selection of `F`: a singleton enclosure, or a tangent cone that no
/// direction of the enclosure enters.
fn exit_forced(h: &HybridSystem, xi: &[f64], w: &Signal) -> bool {
    let Ok(w0) = w.right_limit(0.0) else { return false };
    let enc = h.flow_enclosure(xi, &w0);
    if enc.axes().iter().all(|iv| iv.width() == 0.0) {
        return true;
    }
    let dw = w.pieces()[0].derivative(0.0);
    if dw.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let mut z = xi.to_vec();
    z.extend_from_slice(&w0);
    match tangent_cone(h.flow_set(), &z) {
        Ok(k) => matches!(cone_feasible(&k, &enc, &dw), Ok(false)),
        Err(_) => false,
    }
}

/// Runs the flow selection from `ξ` and reports whether it stays in `C`,
/// in the sense of `mode`, for one of the horizons in `eps_grid`.
pub fn vc_probe(h: &HybridSystem, xi: &[f64], w: &Signal, mode: Mode, eps_grid: &[f64]) -> Verdict {
    let mut grid: Vec<f64> = eps_grid.iter().copied().filter(|e| *e > 0.0).collect();
    if grid.is_empty() {
        grid = super::DEFAULT_EPS_GRID.to_vec();
    }
    grid.sort_by(|a, b| b.total_cmp(a));
    let eps_max = grid[0];
    let eps_min = grid[grid.len() - 1];
    let cfg = SimConfig { mode, priority: Priority::FlowPriority, t_max: eps_max, ..SimConfig::default() };
    let mut evidence = Evidence { points_checked: 1, eps_grid: grid.clone(), ..Default::default() };
    let start = || -> (Vec<f64>, f64) {
        let w0 = w.right_limit(0.0).unwrap_or_default();
        let mut z = xi.to_vec();
        z.extend_from_slice(&w0);
        let m = h.flow_margin(xi, &w0).unwrap_or(f64::NAN);
        (z, m)
    };

    match flow_segment_with(h, xi, w, 0.0, 0, &cfg, JumpTrigger::Off) {
        Err(SimError::StartOutsideFlowSet { .. }) => {
            // C is closed and w is right-continuous at 0, so no selection helps
            let (point, margin) = start();
            Verdict::new(VerdictStatus::FailsWithWitness, Method::Probe, evidence)
                .with_witness(Witness { point, t: 0.0, margin })
        }
        Err(_) => Verdict::new(VerdictStatus::Inconclusive, Method::Probe, evidence),
        Ok(out) => {
            let d = out.duration();
            if d + cfg.event_tol >= eps_min {
                evidence.eps = grid.iter().copied().find(|e| d + cfg.event_tol >= *e);
                return Verdict::new(VerdictStatus::Holds, Method::Probe, evidence);
            }
            let last = out.segment.last();
            let w_end = w.right_limit(last.t).unwrap_or_default();
            let mut point = last.x.clone();
            point.extend_from_slice(&w_end);
            let margin = h.flow_margin(&last.x, &w_end).unwrap_or(f64::NAN);
            let witness = Witness { point, t: last.t, margin };
            if d < cfg.event_tol && exit_forced(h, xi, w) {
                Verdict::new(VerdictStatus::FailsWithWitness, Method::Probe, evidence).with_witness(witness)
            } else {
                Verdict::new(VerdictStatus::Inconclusive, Method::Probe, evidence).with_witness(witness)
            }
        }
    }
}

/// A nontrivial solution exists from `ξ` iff `(ξ, w(0)) ∈ D` or flow is
/// possible; the jump test uses the exact point value `w(0)`.
pub fn nontrivial_existence(h: &HybridSystem, xi: &[f64], w: &Signal, mode: Mode) -> Verdict {
    if let Ok(w0) = w.eval(0.0) {
        if h.can_jump(xi, &w0).unwrap_or(false) {
            let mut point = xi.to_vec();
            point.extend_from_slice(&w0);
            let margin = h.jump_margin(xi, &w0).unwrap_or(f64::NAN);
            return Verdict::new(VerdictStatus::Holds, Method::Jump, Evidence { points_checked: 1, ..Default::default() })
                .with_witness(Witness { point, t: 0.0, margin });
        }
    }
    vc_probe(h, xi, w, mode, &super::DEFAULT_EPS_GRID)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::parse_signal;
    use crate::system::{scenario, ScenarioParams};
    use crate::BoxSet;

    fn sys(key: &str) -> HybridSystem {
        scenario(key, &ScenarioParams::default()).unwrap().system
    }

    #[test]
    fn probe_examples() {
        let h = sys("ex1");
        let w = parse_signal("const:0.2", h.input_set()).unwrap();
        assert_eq!(vc_probe(&h, &[1.1], &w, Mode::E, &super::super::DEFAULT_EPS_GRID).status, VerdictStatus::Holds);

        let h2 = sys("ex2c");
        let w = parse_signal("const:0.2", h2.input_set()).unwrap();
        let v = vc_probe(&h2, &[1.0], &w, Mode::AE, &super::super::DEFAULT_EPS_GRID);
        assert_eq!(v.status, VerdictStatus::FailsWithWitness);
        assert_eq!(v.witness.unwrap().t, 0.0);

        let r = sys("riccati");
        let w = parse_signal("const:0", r.input_set()).unwrap();
        assert!(vc_probe(&r, &[0.5], &w, Mode::E, &[0.1]).holds());
    }

    #[test]
    fn existence_examples() {
        let h2 = sys("ex2c");
        let w = parse_signal("ex2-witness", h2.input_set()).unwrap();
        for mode in [Mode::E, Mode::AE] {
            assert_eq!(nontrivial_existence(&h2, &[1.0], &w, mode).status, VerdictStatus::FailsWithWitness);
        }
        let h3 = sys("ex3");
        let w = parse_signal("const:0.2", &BoxSet::whole(1)).unwrap();
        let v = nontrivial_existence(&h3, &[1.0], &w, Mode::E);
        assert_eq!((v.status, v.method), (VerdictStatus::Holds, Method::Jump));
        let h1 = sys("ex1");
        for s in ["const:0.2", "const:-0.2", "steps:0:0.1,0.5:-0.2"] {
            let w = parse_signal(s, h1.input_set()).unwrap();
            let v = nontrivial_existence(&h1, &[0.0], &w, Mode::E);
            assert_eq!((v.status, v.method), (VerdictStatus::Holds, Method::Probe));
        }
    }

    #[test]
    fn outward_drift_on_the_boundary_is_forced() {
        // x + w = 1.5 with x' = x > 0 leaves at once
        let h = sys("ex1");
        let w = parse_signal("const:0.2", h.input_set()).unwrap();
        let v = vc_probe(&h, &[1.3], &w, Mode::E, &super::super::DEFAULT_EPS_GRID);
        assert_eq!(v.status, VerdictStatus::FailsWithWitness);
    }
}
