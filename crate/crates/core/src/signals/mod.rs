//! Exogenous inputs `w : ℝ≥0 → W`, represented as finitely many continuous
//! pieces plus finitely many point overrides.

mod parse;
mod piece;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sets::BoxSet;

pub use parse::parse_signal;
pub use piece::{Piece, PieceFn};

/// Values closer than this are treated as equal when classifying.
const MATCH_TOL: f64 = 1e-12;

/// Regularity classes, weakest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Regularity {
    Measurable,
    Cadlag,
    Continuous,
    AbsContinuous,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("t = {t} is beyond the signal horizon {horizon}")]
    BeyondHorizon { t: f64, horizon: f64 },
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("pieces must tile [0, horizon): {0}")]
    Tiling(String),
    #[error("value {value:?} at t = {t} is outside W")]
    OutsideW { t: f64, value: Vec<f64> },
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("signal is not absolutely continuous")]
    NotAbsolutelyContinuous,
    #[error("signal is not differentiable at the breakpoint t = {0}")]
    BreakpointNondifferentiable(f64),
    #[error("malformed table: {0}")]
    BadTable(String),
    #[error("declared regularity {declared:?} is stronger than the verifiable {found:?}")]
    RegularityMismatch { declared: Regularity, found: Regularity },
    #[error("cannot parse signal: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Override {
    pub t: f64,
    pub value: Vec<f64>,
}

/// On-disk form of a signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub w: BoxSet,
    pub pieces: Vec<Piece>,
    #[serde(default)]
    pub overrides: Vec<Override>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularity: Option<Regularity>,
}

/// A validated input signal. Pieces cover `[0, horizon)` (and the horizon
/// itself when finite); overrides are sorted by time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SignalSpec", into = "SignalSpec")]
pub struct Signal {
    dim: usize,
    pieces: Vec<Piece>,
    overrides: Vec<Override>,
    w: BoxSet,
    regularity: Regularity,
}

impl TryFrom<SignalSpec> for Signal {
    type Error = SignalError;

    fn try_from(spec: SignalSpec) -> Result<Self, SignalError> {
        let s = Signal::new(spec.pieces, spec.overrides, spec.w)?;
        match spec.regularity {
            Some(tag) => s.declare(tag),
            None => Ok(s),
        }
    }
}

impl From<Signal> for SignalSpec {
    fn from(s: Signal) -> Self {
        SignalSpec { w: s.w, pieces: s.pieces, overrides: s.overrides, regularity: Some(s.regularity) }
    }
}

impl Signal {
    pub fn new(pieces: Vec<Piece>, mut overrides: Vec<Override>, w: BoxSet) -> Result<Self, SignalError> {
        let dim = w.dim();
        let Some(first) = pieces.first() else {
            return Err(SignalError::Tiling("no pieces".into()));
        };
        if first.start != 0.0 {
            return Err(SignalError::Tiling(format!("first piece starts at {}", first.start)));
        }
        for (k, p) in pieces.iter().enumerate() {
            if !(p.end > p.start) {
                return Err(SignalError::Tiling(format!("piece {k} is empty: [{}, {})", p.start, p.end)));
            }
            if p.func.dim() != dim {
                return Err(SignalError::DimensionMismatch { expected: dim, found: p.func.dim() });
            }
            if let Some(next) = pieces.get(k + 1) {
                if next.start != p.end {
                    return Err(SignalError::Tiling(format!("piece {k} ends at {} but the next starts at {}", p.end, next.start)));
                }
            }
            if let PieceFn::Tabulated { times, values } = &p.func {
                if times.is_empty() || times.len() != values.len() {
                    return Err(SignalError::BadTable("times and values differ in length".into()));
                }
                if times.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(SignalError::BadTable("times must increase".into()));
                }
            }
        }
        overrides.sort_by(|a, b| a.t.total_cmp(&b.t));
        let horizon = pieces.last().map(|p| p.end).unwrap_or(0.0);
        for (k, o) in overrides.iter().enumerate() {
            if o.value.len() != dim {
                return Err(SignalError::DimensionMismatch { expected: dim, found: o.value.len() });
            }
            if o.t < 0.0 || o.t > horizon {
                return Err(SignalError::BeyondHorizon { t: o.t, horizon });
            }
            if k > 0 && overrides[k - 1].t == o.t {
                return Err(SignalError::Tiling(format!("two overrides at t = {}", o.t)));
            }
            if !w.contains(&o.value) {
                return Err(SignalError::OutsideW { t: o.t, value: o.value.clone() });
            }
        }
        let mut s = Signal { dim, pieces, overrides, w, regularity: Regularity::Measurable };
        s.check_range()?;
        s.regularity = s.classify();
        Ok(s)
    }

    /// Keeps a declared tag, provided the representation supports it.
    pub fn declare(mut self, tag: Regularity) -> Result<Self, SignalError> {
        let found = self.classify();
        if tag > found {
            return Err(SignalError::RegularityMismatch { declared: tag, found });
        }
        self.regularity = tag;
        Ok(self)
    }

    pub fn constant(value: Vec<f64>, w: BoxSet) -> Result<Self, SignalError> {
        Signal::new(vec![Piece::new(0.0, f64::INFINITY, PieceFn::Constant { value })], Vec::new(), w)
    }

    /// Piecewise constant: `value_k` on `[t_k, t_{k+1})`; `steps[0].0` must be 0.
    pub fn steps(steps: &[(f64, Vec<f64>)], w: BoxSet) -> Result<Self, SignalError> {
        let pieces = steps
            .iter()
            .enumerate()
            .map(|(k, (t, v))| {
                let end = steps.get(k + 1).map_or(f64::INFINITY, |s| s.0);
                Piece::new(*t, end, PieceFn::Constant { value: v.clone() })
            })
            .collect();
        Signal::new(pieces, Vec::new(), w)
    }

    /// Adds (or replaces) a point override.
    pub fn with_override(self, t: f64, value: Vec<f64>) -> Result<Self, SignalError> {
        let mut overrides: Vec<Override> = self.overrides.into_iter().filter(|o| o.t != t).collect();
        overrides.push(Override { t, value });
        Signal::new(self.pieces, overrides, self.w)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn overrides(&self) -> &[Override] {
        &self.overrides
    }

    pub fn value_set(&self) -> &BoxSet {
        &self.w
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }

    pub fn horizon(&self) -> f64 {
        self.pieces.last().map_or(0.0, |p| p.end)
    }

    pub fn override_times(&self) -> Vec<f64> {
        self.overrides.iter().map(|o| o.t).collect()
    }

    /// Interior piece boundaries.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces.iter().skip(1).map(|p| p.start).collect()
    }

    /// Breakpoints and override times, sorted and deduplicated.
    pub fn special_times(&self) -> Vec<f64> {
        let mut v = self.breakpoints();
        v.extend(self.override_times());
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// First special time strictly after `t`.
    pub fn next_special_time(&self, t: f64) -> Option<f64> {
        self.special_times().into_iter().find(|s| *s > t)
    }

    pub fn is_special_time(&self, t: f64) -> bool {
        self.special_times().iter().any(|s| *s == t)
    }

    fn check_time(&self, t: f64) -> Result<(), SignalError> {
        if t < 0.0 || t.is_nan() {
            return Err(SignalError::NegativeTime(t));
        }
        let h = self.horizon();
        if t > h {
            return Err(SignalError::BeyondHorizon { t, horizon: h });
        }
        Ok(())
    }

    fn piece_at(&self, t: f64) -> &Piece {
        let i = self.pieces.partition_point(|p| p.start <= t);
        &self.pieces[i.saturating_sub(1)]
    }

    /// Point value: the override if one sits at `t`, else the piece value.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>, SignalError> {
        self.check_time(t)?;
        if let Some(o) = self.overrides.iter().find(|o| o.t == t) {
            return Ok(o.value.clone());
        }
        Ok(self.piece_at(t).value(t))
    }

    /// Value of the piece covering `[t, t+δ)`; overrides are ignored.
    pub fn right_limit(&self, t: f64) -> Result<Vec<f64>, SignalError> {
        self.check_time(t)?;
        Ok(self.piece_at(t).value(t))
    }

    /// Limit from the left, from the piece covering `(t−δ, t)`; `None` at 0.
    pub fn left_limit(&self, t: f64) -> Result<Option<Vec<f64>>, SignalError> {
        self.check_time(t)?;
        if t == 0.0 {
            return Ok(None);
        }
        let i = self.pieces.partition_point(|p| p.start < t);
        Ok(Some(self.pieces[i - 1].value(t)))
    }

    pub fn limits(&self, t: f64) -> Result<(Option<Vec<f64>>, Vec<f64>), SignalError> {
        Ok((self.left_limit(t)?, self.right_limit(t)?))
    }

    /// `t ↦ w(t + a)`.
    pub fn shift(&self, a: f64) -> Signal {
        assert!(a >= 0.0, "shift amount must be nonnegative");
        if a == 0.0 {
            return self.clone();
        }
        let pieces = self
            .pieces
            .iter()
            .filter(|p| p.end > a)
            .map(|p| Piece {
                start: (p.start - a).max(0.0),
                end: p.end - a,
                origin: p.origin - a,
                func: p.func.clone(),
            })
            .collect::<Vec<_>>();
        let overrides =
            self.overrides.iter().filter(|o| o.t >= a).map(|o| Override { t: o.t - a, value: o.value.clone() }).collect();
        let mut s = Signal { dim: self.dim, pieces, overrides, w: self.w.clone(), regularity: self.regularity };
        if s.pieces.is_empty() {
            // shifted exactly onto a finite horizon: keep the final value
            let last = self.pieces.last().unwrap();
            let v = last.value(last.end);
            s.pieces = vec![Piece::new(0.0, 0.0, PieceFn::Constant { value: v })];
        }
        // shifting only drops features, so the tag stays valid
        s.regularity = self.regularity.min(s.classify());
        s
    }

    fn same(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(p, q)| (p - q).abs() <= MATCH_TOL * (1.0 + p.abs().max(q.abs())))
    }

    /// The strongest class the representation verifiably satisfies.
    pub fn classify(&self) -> Regularity {
        let right_continuous = self.overrides.iter().all(|o| Self::same(&o.value, &self.piece_at(o.t).value(o.t)));
        if !right_continuous {
            return Regularity::Measurable;
        }
        let continuous = self.pieces.windows(2).all(|w| Self::same(&w[0].value(w[1].start), &w[1].value(w[1].start)));
        if !continuous {
            return Regularity::Cadlag;
        }
        if !self.overrides.is_empty() {
            return Regularity::Continuous;
        }
        Regularity::AbsContinuous
    }

    /// `ẇ(t)`, for absolutely continuous signals.
    pub fn derivative(&self, t: f64) -> Result<Vec<f64>, SignalError> {
        if self.regularity < Regularity::AbsContinuous {
            return Err(SignalError::NotAbsolutelyContinuous);
        }
        self.check_time(t)?;
        let right = self.piece_at(t).derivative(t);
        if t > 0.0 && self.breakpoints().contains(&t) {
            let i = self.pieces.partition_point(|p| p.start < t);
            let left = self.pieces[i - 1].derivative(t);
            if !Self::same(&left, &right) {
                return Err(SignalError::BreakpointNondifferentiable(t));
            }
        }
        Ok(right)
    }

    /// Whether every piece is affine in `t`.
    pub fn is_piecewise_affine(&self) -> bool {
        self.pieces.iter().all(|p| p.func.is_affine())
    }

    /// Sampled bound of `|w|_∞` on `[a, b]`, overrides included.
    pub fn sup_norm(&self, a: f64, b: f64) -> f64 {
        let b = b.min(self.horizon());
        let mut m = 0.0f64;
        let mut take = |v: &[f64]| m = v.iter().fold(m, |m, x| m.max(x.abs()));
        for p in &self.pieces {
            let (lo, hi) = (p.start.max(a), p.end.min(b));
            if lo > hi {
                continue;
            }
            for k in 0..=64 {
                take(&p.value(lo + (hi - lo) * k as f64 / 64.0));
            }
            for s in p.func.critical_times(lo - p.origin, hi - p.origin) {
                take(&p.value(s + p.origin));
            }
        }
        for o in self.overrides.iter().filter(|o| o.t >= a && o.t <= b) {
            take(&o.value);
        }
        m
    }

    /// Rejects values outside `W`: piece ends, table nodes, extrema and a
    /// sample grid; unbounded pieces are probed at geometrically growing times.
    fn check_range(&self) -> Result<(), SignalError> {
        for p in &self.pieces {
            let mut times = vec![p.start];
            if p.end.is_finite() {
                let n = 256;
                times.extend((1..=n).map(|k| p.start + (p.end - p.start) * k as f64 / n as f64));
                times.extend(p.func.critical_times(p.start - p.origin, p.end - p.origin).iter().map(|s| s + p.origin));
            } else if !p.func.is_constant() {
                times.extend((0..=256).map(|k| p.start + k as f64 / 16.0));
                times.extend((0..60).map(|k| p.start + 2f64.powi(k)));
                times.extend(p.func.critical_times(p.start - p.origin, p.start - p.origin + 100.0).iter().map(|s| s + p.origin));
            }
            for t in times {
                let v = p.value(t);
                if !self.w.contains(&v) {
                    // the right end of a piece is a left limit; only closedness of W matters there
                    if t == p.end && self.w.closure().contains(&v) {
                        continue;
                    }
                    return Err(SignalError::OutsideW { t, value: v });
                }
            }
        }
        Ok(())
    }
}
