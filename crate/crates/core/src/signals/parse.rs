//! One-line signal syntax.
//!
//! ```text
//! const:v
//! steps:t0:v0,t1:v1,...
//! affine:a,b                  a + b·t
//! sin:offset,amplitude,omega,phase
//! override:t=v                may repeat, joined with ';'
//! ex2-witness | remark2       named inputs
//! ```
//!
//! Vector values separate components with `/`, e.g. `const:0.1/-0.3`.

use super::{Override, Piece, PieceFn, Signal, SignalError};
use crate::sets::BoxSet;

fn err(msg: impl Into<String>) -> SignalError {
    SignalError::Parse(msg.into())
}

fn num(s: &str) -> Result<f64, SignalError> {
    let s = s.trim();
    match s {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse().map_err(|_| err(format!("not a number: {s:?}"))),
    }
}

fn vector(s: &str) -> Result<Vec<f64>, SignalError> {
    s.split('/').map(num).collect()
}

fn base(kind: &str, body: &str) -> Result<Vec<Piece>, SignalError> {
    let open = |func| vec![Piece::new(0.0, f64::INFINITY, func)];
    match kind {
        "const" => Ok(open(PieceFn::Constant { value: vector(body)? })),
        "affine" => {
            let parts: Vec<&str> = body.split(',').collect();
            let [a, b] = parts.as_slice() else { return Err(err("affine takes a,b")) };
            Ok(open(PieceFn::Affine { value: vector(a)?, slope: vector(b)? }))
        }
        "sin" => {
            let parts: Vec<&str> = body.split(',').collect();
            let [o, a, w, p] = parts.as_slice() else { return Err(err("sin takes offset,amplitude,omega,phase")) };
            Ok(open(PieceFn::Sinusoid { offset: vector(o)?, amplitude: vector(a)?, omega: num(w)?, phase: num(p)? }))
        }
        "steps" => {
            let mut steps = Vec::new();
            for item in body.split(',') {
                let (t, v) = item.split_once(':').ok_or_else(|| err(format!("step {item:?} needs t:v")))?;
                steps.push((num(t)?, vector(v)?));
            }
            if steps.first().map(|s| s.0) != Some(0.0) {
                return Err(err("steps must start at t = 0"));
            }
            Ok(steps
                .iter()
                .enumerate()
                .map(|(k, (t, v))| {
                    let end = steps.get(k + 1).map_or(f64::INFINITY, |s| s.0);
                    Piece::new(*t, end, PieceFn::Constant { value: v.clone() })
                })
                .collect())
        }
        _ => Err(err(format!("unknown signal kind {kind:?}"))),
    }
}

/// Parses the one-line syntax against the value set `w`.
pub fn parse_signal(text: &str, w: &BoxSet) -> Result<Signal, SignalError> {
    let mut pieces = None;
    let mut overrides = Vec::new();
    for term in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        match term {
            "ex2-witness" => {
                pieces = Some(base("const", "0.2")?);
                overrides.push(Override { t: 0.0, value: vec![-0.2] });
                continue;
            }
            "remark2" => {
                pieces = Some(base("steps", "0:-1,1:2")?);
                continue;
            }
            _ => {}
        }
        let (kind, body) = term.split_once(':').ok_or_else(|| err(format!("term {term:?} needs kind:body")))?;
        if kind == "override" {
            let (t, v) = body.split_once('=').ok_or_else(|| err("override takes t=v"))?;
            overrides.push(Override { t: num(t)?, value: vector(v)? });
            continue;
        }
        if pieces.is_some() {
            return Err(err("more than one base signal"));
        }
        pieces = Some(base(kind, body)?);
    }
    let pieces = pieces.ok_or_else(|| err("no base signal"))?;
    Signal::new(pieces, overrides, w.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::Regularity;

    #[test]
    fn named_and_composed() {
        let w = BoxSet::closed(&[-0.2], &[0.2]);
        let a = parse_signal("ex2-witness", &w).unwrap();
        let b = parse_signal("const:0.2; override:0=-0.2", &w).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.regularity(), Regularity::Measurable);

        let r = parse_signal("remark2", &BoxSet::whole(1)).unwrap();
        assert_eq!(r.eval(0.5).unwrap(), vec![-1.0]);
        assert_eq!(r.eval(1.0).unwrap(), vec![2.0]);
    }

    #[test]
    fn affine_and_vector() {
        let s = parse_signal("affine:0.2,-0.1", &BoxSet::whole(1)).unwrap();
        assert!((s.eval(2.0).unwrap()[0] - 0.0).abs() < 1e-15);
        let v = parse_signal("const:0.1/-0.3", &BoxSet::whole(2)).unwrap();
        assert_eq!(v.eval(5.0).unwrap(), vec![0.1, -0.3]);
    }

    #[test]
    fn rejects_garbage() {
        let w = BoxSet::whole(1);
        assert!(parse_signal("const:x", &w).is_err());
        assert!(parse_signal("steps:1:0", &w).is_err());
        assert!(parse_signal("const:1;const:2", &w).is_err());
        assert!(matches!(parse_signal("const:0.5", &BoxSet::closed(&[-0.2], &[0.2])), Err(SignalError::OutsideW { .. })));
    }
}
