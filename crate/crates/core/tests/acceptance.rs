//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::time::{Duration, Instant};

use hybridsim::hybrid_time::HybridArc;
use hybridsim::sets::{output_set_condition, tangent_cone, BoxSet, Interval, SetExpr};
use hybridsim::signals::parse_signal;
use hybridsim::simulator::{
    classify_termination, solve, validate_arc, Classification, DeadCause, Mode, Priority, SimConfig, Termination,
};
use hybridsim::system::{scenario, HybridSystem, ScenarioParams};
use hybridsim::viability::{
    nontrivial_existence, output_form_existence, vc_ball_margin, vc_probe, VerdictStatus, DEFAULT_DELTA_GRID,
    DEFAULT_EPS_GRID,
};
use hybridsim::Signal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sys(key: &str, c: Option<f64>) -> HybridSystem {
    scenario(key, &ScenarioParams { c, delta: None }).unwrap().system
}

fn sig(text: &str, h: &HybridSystem) -> Signal {
    parse_signal(text, h.input_set()).unwrap()
}

fn cfg(mode: Mode, priority: Priority, t_max: f64) -> SimConfig {
    SimConfig { mode, priority, t_max, ..SimConfig::default() }
}

/// E-mode arcs collected along the way, for the ordering check.
struct Corpus(Vec<(HybridSystem, HybridArc, Signal)>);

fn ex1_bounded_and_jumping(corpus: &mut Corpus) -> Outcome {
    let h = sys("ex1", None);
    for xi in [-1.0, 0.0, 0.5, 1.0] {
        for text in ["const:0.2", "const:-0.2", "steps:0:0.2,1:-0.2"] {
            let w = sig(text, &h);
            for mode in [Mode::E, Mode::AE] {
                let start = Instant::now();
                let r = solve(&h, &[xi], &w, &cfg(mode, Priority::JumpPriority, 20.0)).map_err(|e| e.to_string())?;
                let took = start.elapsed();
                let tag = format!("xi={xi} w={text} {mode:?}");
                check(took < Duration::from_secs(1), || format!("{tag}: took {took:?}"))?;
                check(!r.termination.is_dead(), || format!("{tag}: {:?}", r.termination))?;
                check(r.arc.max_abs_state() <= 1.7 + 1e-6, || format!("{tag}: max |x| = {}", r.arc.max_abs_state()))?;
                for seg in r.arc.segments().iter().skip(1) {
                    let t = seg.t_start();
                    let expect = -w.eval(t).unwrap()[0];
                    let got = seg.first().x[0];
                    check((got - expect).abs() <= 1e-6, || format!("{tag}: x+ = {got} at t = {t}, want {expect}"))?;
                }
                if mode == Mode::E {
                    corpus.0.push((h.clone(), r.arc.clone(), w.clone()));
                }
            }
        }
    }
    let w = sig("const:0.2", &h);
    let r = solve(&h, &[-0.2], &w, &cfg(Mode::E, Priority::JumpPriority, 20.0)).map_err(|e| e.to_string())?;
    let flows: Vec<f64> =
        r.arc.segments().iter().filter(|s| !s.is_point()).map(|s| s.t_end() - s.t_start()).collect();
    check(flows.len() >= 10, || format!("only {} flow intervals", flows.len()))?;
    // the last interval is cut by the time budget
    for d in &flows[..flows.len() - 1] {
        check((d - 6f64.ln()).abs() <= 1e-6, || format!("flow duration {d}, want ln 6"))?;
    }
    Ok(())
}

fn ex2_nonexistence() -> Outcome {
    let cases = [(None, 1.0), (Some(1.3), 1.15), (Some(1.2), 1.1)];
    for (c, xi) in cases {
        let h = sys("ex2c", c);
        let w = sig("ex2-witness", &h);
        let start = Instant::now();
        for mode in [Mode::E, Mode::AE] {
            let v = nontrivial_existence(&h, &[xi], &w, mode);
            check(v.status == VerdictStatus::FailsWithWitness, || format!("c={c:?} xi={xi} {mode:?}: {:?}", v.status))?;
            let r = solve(&h, &[xi], &w, &cfg(mode, Priority::JumpPriority, 10.0)).map_err(|e| e.to_string())?;
            let ok = matches!(r.termination, Termination::DeadState { at, .. } if at.t == 0.0 && at.j == 0);
            check(ok, || format!("c={c:?} xi={xi} {mode:?}: {:?}", r.termination))?;
        }
        let took = start.elapsed();
        check(took < Duration::from_millis(100), || format!("c={c:?}: took {took:?}"))?;
    }
    Ok(())
}

fn ex3_cadlag_equivalence(corpus: &mut Corpus) -> Outcome {
    let h = sys("ex3", None);
    let signals = ["steps:0:0.3,1:-0.5,2.5:2,4:0", "steps:0:-0.2,0.5:0.7,3:-1.5", "steps:0:0,2:0.9,2.1:-0.9"];
    for xi in [0.0, 0.5, 1.0] {
        for text in signals {
            let w = sig(text, &h);
            let tag = format!("xi={xi} w={text}");
            let e = solve(&h, &[xi], &w, &cfg(Mode::E, Priority::JumpPriority, 10.0)).map_err(|e| e.to_string())?;
            let ae = solve(&h, &[xi], &w, &cfg(Mode::AE, Priority::JumpPriority, 10.0)).map_err(|e| e.to_string())?;
            for r in [&e, &ae] {
                check(classify_termination(r, &h, &w) == Classification::CompleteEvidence, || {
                    format!("{tag}: {:?}", r.termination)
                })?;
            }
            let (je, ja) = (e.arc.jump_times(), ae.arc.jump_times());
            check(je.len() == ja.len(), || format!("{tag}: {} vs {} jumps", je.len(), ja.len()))?;
            for (a, b) in je.iter().zip(&ja) {
                check((a - b).abs() <= 1e-8, || format!("{tag}: jump at {a} vs {b}"))?;
            }
            for (sa, sb) in e.arc.segments().iter().zip(ae.arc.segments()) {
                for s in &sa.samples {
                    if let Some(x) = sb.eval(s.t) {
                        check((x[0] - s.x[0]).abs() <= 1e-6, || format!("{tag}: states differ at t = {}", s.t))?;
                    }
                }
            }
            corpus.0.push((h.clone(), e.arc.clone(), w.clone()));
        }
    }
    Ok(())
}

fn step_input_discontinuity(corpus: &mut Corpus) -> Outcome {
    let h = sys("remark2", None);
    let w = sig("steps:0:-1,1:2", &h);
    let start = Instant::now();
    let r = solve(&h, &[1.0], &w, &cfg(Mode::E, Priority::FlowPriority, 10.0)).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    check(took < Duration::from_millis(100), || format!("took {took:?}"))?;
    let segs = r.arc.segments();
    check(segs.len() == 1 && segs[0].t_start() == 0.0, || "expected a single flow interval from 0".into())?;
    check((segs[0].t_end() - 1.0).abs() <= 1e-9, || format!("interval ends at {}", segs[0].t_end()))?;
    let err = segs[0].samples.iter().map(|s| (s.x[0] - 1.0).abs()).fold(0.0, f64::max);
    check(err <= 1e-9, || format!("sup-norm error {err}"))?;
    match r.termination {
        Termination::DeadState { at, cause: DeadCause::InputDiscontinuity, .. } if at.j == 0 && (at.t - 1.0).abs() <= 1e-9 => {}
        other => return Err(format!("termination {other:?}")),
    }
    let class = classify_termination(&r, &h, &w);
    check(class == Classification::EndsAtInputDiscontinuity, || format!("classified {class:?}"))?;
    let w1 = w.eval(1.0).unwrap();
    let x1 = r.arc.final_state();
    check(!h.in_flow_set(x1, &w1).unwrap() && !h.can_jump(x1, &w1).unwrap(), || "end point is in C or D".into())?;
    corpus.0.push((h, r.arc, w));
    Ok(())
}

fn output_set_condition_chain() -> Outcome {
    let all = BoxSet::whole(1);
    let c_y = BoxSet::closed(&[-1.5], &[1.5]);
    let dc = BoxSet::new(vec![Interval::open(-1.0, 1.0)]);
    let w = BoxSet::closed(&[-0.2], &[0.2]);
    let rep = output_set_condition(&all, &c_y, &dc, &w).map_err(|e| e.to_string())?;
    check(rep.holds, || "inclusion fails on the first data set".into())?;
    // D^c − W is the open interval with the stated endpoints
    check(rep.dc_minus_w == BoxSet::new(vec![Interval::open(-1.2, 1.2)]), || format!("{:?}", rep.dc_minus_w))?;
    check(rep.c_minus_w == BoxSet::closed(&[-1.7], &[1.7]), || format!("{:?}", rep.c_minus_w))?;
    check(rep.interior_pontryagin == BoxSet::new(vec![Interval::open(-1.3, 1.3)]), || {
        format!("{:?}", rep.interior_pontryagin)
    })?;

    let v = output_form_existence(&sys("ex1", None), &all).map_err(|e| e.to_string())?;
    check(v.holds(), || format!("{:?}", v.status))?;
    let cert = serde_json::to_value(&v).unwrap();
    for key in ["c_minus_w", "dc_minus_w", "interior_pontryagin"] {
        check(cert["evidence"]["set_condition"].get(key).is_some(), || format!("certificate lacks {key}"))?;
    }
    let v = output_form_existence(&sys("ex2c", None), &all).map_err(|e| e.to_string())?;
    check(v.status == VerdictStatus::FailsWithWitness, || format!("{:?}", v.status))
}

fn random_signal(rng: &mut ChaCha8Rng, delta: f64) -> String {
    let v = |rng: &mut ChaCha8Rng| rng.gen_range(-delta..=delta);
    let mut s = match rng.gen_range(0..3) {
        0 => format!("const:{}", v(rng)),
        1 => {
            let mut t = 0.0;
            let mut parts = vec![format!("0:{}", v(rng))];
            for _ in 0..rng.gen_range(1..5) {
                t += rng.gen_range(0.1..2.0);
                parts.push(format!("{t}:{}", v(rng)));
            }
            format!("steps:{}", parts.join(","))
        }
        _ => format!("sin:0,{},{},{}", delta, rng.gen_range(0.5..5.0), rng.gen_range(0.0..6.0)),
    };
    for _ in 0..rng.gen_range(0..3) {
        s.push_str(&format!("; override:{}={}", rng.gen_range(0.0..5.0), v(rng)));
    }
    s
}

fn flow_samples_in_c0(corpus: &mut Corpus) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut segments = 0;
    for draw in 0..200 {
        let c = rng.gen_range(1.2..1.8);
        let delta = rng.gen_range(0.05..0.3);
        let key = if draw % 4 == 3 { "ex2c" } else { "ex1" };
        let h = scenario(key, &ScenarioParams { c: Some(c), delta: Some(delta) }).unwrap().system;
        let text = random_signal(&mut rng, delta);
        let w = sig(&text, &h);
        let xi = rng.gen_range(-(c + delta)..=(c + delta));
        let mode = if rng.gen_bool(0.5) { Mode::E } else { Mode::AE };
        let r = solve(&h, &[xi], &w, &cfg(mode, Priority::JumpPriority, 6.0)).map_err(|e| e.to_string())?;
        for seg in r.arc.segments().iter().filter(|s| !s.is_point()) {
            segments += 1;
            for s in &seg.samples {
                // C0 = [-(c + delta), c + delta], computed here independently
                let excess = s.x[0].abs() - (c + delta);
                check(excess <= 1e-6, || format!("draw {draw} ({key}, xi={xi}, w={text}): x = {} at t = {}", s.x[0], s.t))?;
                check(h.c0_margin(&s.x).unwrap() <= 1e-6, || format!("draw {draw}: c0_margin disagrees"))?;
            }
        }
        if mode == Mode::E {
            corpus.0.push((h, r.arc, w));
        }
    }
    check(segments > 200, || format!("only {segments} flow segments"))
}

fn soundness_chain() -> Outcome {
    let h = sys("ex1", None);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut holds = 0;
    for k in 0..100 {
        let xi = rng.gen_range(-1.7..=1.7);
        let text = random_signal(&mut rng, 0.2);
        let w = sig(&text, &h);
        let v = vc_ball_margin(&h, &[xi], &DEFAULT_DELTA_GRID).map_err(|e| e.to_string())?;
        if !v.holds() {
            continue;
        }
        holds += 1;
        for mode in [Mode::E, Mode::AE] {
            let p = vc_probe(&h, &[xi], &w, mode, &DEFAULT_EPS_GRID);
            check(p.holds(), || format!("pair {k}: xi={xi} w={text} {mode:?}: probe {:?}", p.status))?;
        }
    }
    check(holds >= 20, || format!("ball margin held only {holds} times"))?;

    let v = output_form_existence(&h, &BoxSet::whole(1)).map_err(|e| e.to_string())?;
    check(v.holds(), || "set condition does not hold".into())?;
    for k in 1..=50 {
        let xi = -1.2 + 2.4 * k as f64 / 51.0;
        let b = vc_ball_margin(&h, &[xi], &DEFAULT_DELTA_GRID).map_err(|e| e.to_string())?;
        check(b.holds(), || format!("ball margin fails at {xi}"))?;
    }
    Ok(())
}

/// Distance from `p` to a closed box.
fn box_distance(lo: &[f64], hi: &[f64], p: &[f64]) -> f64 {
    p.iter()
        .enumerate()
        .map(|(i, v)| {
            let e = (lo[i] - v).max(v - hi[i]).max(0.0);
            e * e
        })
        .sum::<f64>()
        .sqrt()
}

fn random_box(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    let lo: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..1.0)).collect();
    let hi: Vec<f64> = lo.iter().map(|l| l + rng.gen_range(0.0..3.0)).collect();
    (lo, hi)
}

fn set_calculus_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..1000 {
        let n = rng.gen_range(1..4);
        let (alo, ahi) = random_box(&mut rng, n);
        let blo: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..0.5)).collect();
        let bhi: Vec<f64> = blo.iter().map(|l| l + rng.gen_range(0.0..1.5)).collect();
        let a = BoxSet::closed(&alo, &ahi);
        let b = BoxSet::closed(&blo, &bhi);
        let diff = a.pontryagin_diff(&b);
        if !diff.is_empty() {
            for _ in 0..10 {
                let p: Vec<f64> = diff
                    .axes()
                    .iter()
                    .zip(b.axes())
                    .map(|(d, e)| rng.gen_range(d.lo..=d.hi) + rng.gen_range(e.lo..=e.hi))
                    .collect();
                check(box_distance(&alo, &ahi, &p) <= 1e-12, || format!("pair {k}: {p:?} escapes A"))?;
            }
        }
        let prod = SetExpr::Product { factors: vec![SetExpr::boxed(a.clone()), SetExpr::boxed(b.clone())] };
        let proj = prod.project_x(n, &b).map_err(|e| e.to_string())?;
        check(proj == SetExpr::boxed(a.clone()), || format!("pair {k}: projection {proj:?}"))?;
    }

    let dirs: Vec<[f64; 2]> =
        (0..10).flat_map(|i| (0..10).map(move |j| [-1.0 + 2.0 * i as f64 / 9.0, -1.0 + 2.0 * j as f64 / 9.0])).collect();
    for k in 0..200 {
        let (lo, hi) = random_box(&mut rng, 2);
        let p: Vec<f64> = (0..2)
            .map(|i| match rng.gen_range(0..3) {
                0 => lo[i],
                1 => hi[i],
                _ => rng.gen_range(lo[i]..=hi[i]),
            })
            .collect();
        let s = SetExpr::boxed(BoxSet::closed(&lo, &hi));
        let cone = tangent_cone(&s, &p).map_err(|e| e.to_string())?;
        for d in &dirs {
            // dist(p + τd, S)/τ along τ → 0
            // refined down to the finest step; coarse steps can overshoot thin boxes
            let tau = 1e-4;
            let q: Vec<f64> = p.iter().zip(d).map(|(a, b)| a + tau * b).collect();
            let accepted = box_distance(&lo, &hi, &q) / tau <= 1e-9;
            check(!accepted || cone.contains(d, 1e-9), || format!("point {k}: {p:?}, direction {d:?} rejected"))?;
            check(accepted || !cone.contains(d, 0.0), || format!("point {k}: {p:?}, direction {d:?} wrongly admitted"))?;
        }
    }
    Ok(())
}

fn solution_concept_ordering(corpus: &Corpus) -> Outcome {
    check(corpus.0.len() >= 100, || format!("corpus has {} arcs", corpus.0.len()))?;
    for (i, (h, arc, w)) in corpus.0.iter().enumerate() {
        let v = validate_arc(h, arc, w, Mode::AE).map_err(|e| e.to_string())?;
        check(v.valid, || format!("arc {i} ({}) fails AE validation: {:?}", h.name, v.violations))?;
    }
    // x(t) = e^t passes t = ln 1.4 where the point value w = 0.2 puts x + w at 1.6 > 1.5
    let h = sys("ex1", None);
    let t_star = 1.4f64.ln();
    let w = sig(&format!("const:-0.2; override:{t_star}=0.2"), &h);
    let r = solve(&h, &[1.0], &w, &cfg(Mode::AE, Priority::FlowPriority, 1.0)).map_err(|e| e.to_string())?;
    check(r.arc.segments()[0].t_end() > t_star, || "flow did not pass the override".into())?;
    let ae = validate_arc(&h, &r.arc, &w, Mode::AE).map_err(|e| e.to_string())?;
    let e = validate_arc(&h, &r.arc, &w, Mode::E).map_err(|e| e.to_string())?;
    check(ae.valid, || format!("AE validation: {:?}", ae.violations))?;
    check(!e.valid, || "E validation accepted the arc".into())?;
    check(e.violations.iter().any(|v| (v.at.t - t_star).abs() < 1e-12), || format!("{:?}", e.violations))
}

fn main() {
    let mut corpus = Corpus(Vec::new());
    let results: Vec<(&str, Outcome)> = vec![
        ("1 ex1 bounded and jumping", ex1_bounded_and_jumping(&mut corpus)),
        ("2 ex2c nonexistence", ex2_nonexistence()),
        ("3 cadlag equivalence", ex3_cadlag_equivalence(&mut corpus)),
        ("4 dead by input discontinuity", step_input_discontinuity(&mut corpus)),
        ("5 output set condition", output_set_condition_chain()),
        ("6 flow stays in C0", flow_samples_in_c0(&mut corpus)),
        ("7 viability soundness chain", soundness_chain()),
        ("8 set calculus properties", set_calculus_properties()),
        ("9 solution concept ordering", solution_concept_ordering(&corpus)),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(()) => println!("PASS {name}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
