//! Hybrid time domains and hybrid arcs.
//!
//! A compact hybrid time domain is a finite union `⋃_j [t_j, t_{j+1}] × {j}`
//! with consecutive jump counters. The final interval may additionally be
//! right-open (a solution that ends with flow) or unbounded.

mod arc;
mod export;

pub use arc::{ArcError, HybridArc, Interpolation, Sample, Segment};
pub use export::{ArcDocument, ExportError, ARC_SCHEMA};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A point `(t, j)` of a hybrid time domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridTimePoint {
    pub t: f64,
    pub j: usize,
}

impl HybridTimePoint {
    pub fn new(t: f64, j: usize) -> Self {
        HybridTimePoint { t, j }
    }
}

/// Right end of a flow interval `I^j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "t", rename_all = "snake_case")]
pub enum IntervalEnd {
    Closed(f64),
    /// `[t_j, t)`: the supremum is not attained.
    Open(f64),
    Unbounded,
}

impl IntervalEnd {
    pub fn value(&self) -> f64 {
        match *self {
            IntervalEnd::Closed(t) | IntervalEnd::Open(t) => t,
            IntervalEnd::Unbounded => f64::INFINITY,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, IntervalEnd::Closed(_))
    }
}

/// One interval `I^j × {j}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpInterval {
    pub j: usize,
    pub t_start: f64,
    pub end: IntervalEnd,
}

impl JumpInterval {
    pub fn closed(j: usize, t_start: f64, t_end: f64) -> Self {
        JumpInterval { j, t_start, end: IntervalEnd::Closed(t_end) }
    }

    pub fn t_end(&self) -> f64 {
        self.end.value()
    }

    pub fn contains_t(&self, t: f64) -> bool {
        match self.end {
            IntervalEnd::Closed(e) => t >= self.t_start && t <= e,
            IntervalEnd::Open(e) => t >= self.t_start && t < e,
            IntervalEnd::Unbounded => t >= self.t_start,
        }
    }

    /// True when the interval is the single instant `{t_start}`.
    pub fn is_point(&self) -> bool {
        matches!(self.end, IntervalEnd::Closed(e) if e == self.t_start)
    }

    pub fn length(&self) -> f64 {
        self.t_end() - self.t_start
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HybridTimeError {
    #[error("hybrid time domain needs at least one interval")]
    Empty,
    #[error("interval j={j}: t_end {t_end} precedes t_start {t_start}")]
    NonMonotoneTimes { j: usize, t_start: f64, t_end: f64 },
    #[error("gap between jumps: t_end(j={j}) = {t_end} but t_start(j+1) = {next_start}")]
    GapBetweenJumps { j: usize, t_end: f64, next_start: f64 },
    #[error("jump counters must be consecutive from 0; found {found} at position {expected}")]
    NonConsecutiveJ { expected: usize, found: usize },
    #[error("only the final interval may be right-open or unbounded (j={j})")]
    OpenInterior { j: usize },
    #[error("time {t} is negative or not a number")]
    InvalidTime { t: f64 },
}

/// A validated hybrid time domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridTimeDomain {
    intervals: Vec<JumpInterval>,
}

/// Componentwise supremum `(sup_t E, sup_j E)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSup {
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub t: f64,
    pub j: usize,
}

impl HybridTimeDomain {
    /// Validates a raw `(j, t_start, t_end)` list; `t_end = +∞` marks an
    /// unbounded final interval.
    pub fn validate(raw: &[(usize, f64, f64)]) -> Result<Self, HybridTimeError> {
        let intervals = raw
            .iter()
            .map(|&(j, s, e)| JumpInterval {
                j,
                t_start: s,
                end: if e == f64::INFINITY { IntervalEnd::Unbounded } else { IntervalEnd::Closed(e) },
            })
            .collect();
        Self::from_intervals(intervals)
    }

    pub fn from_intervals(intervals: Vec<JumpInterval>) -> Result<Self, HybridTimeError> {
        if intervals.is_empty() {
            return Err(HybridTimeError::Empty);
        }
        let last = intervals.len() - 1;
        for (pos, iv) in intervals.iter().enumerate() {
            if iv.j != pos {
                return Err(HybridTimeError::NonConsecutiveJ { expected: pos, found: iv.j });
            }
            if !(iv.t_start >= 0.0) || !iv.t_start.is_finite() {
                return Err(HybridTimeError::InvalidTime { t: iv.t_start });
            }
            let e = iv.t_end();
            if e.is_nan() {
                return Err(HybridTimeError::InvalidTime { t: e });
            }
            if e < iv.t_start {
                return Err(HybridTimeError::NonMonotoneTimes { j: iv.j, t_start: iv.t_start, t_end: e });
            }
            if let IntervalEnd::Open(e) = iv.end {
                // [s, s) would be empty
                if e <= iv.t_start {
                    return Err(HybridTimeError::NonMonotoneTimes { j: iv.j, t_start: iv.t_start, t_end: e });
                }
            }
            if pos < last {
                if !iv.end.is_closed() {
                    return Err(HybridTimeError::OpenInterior { j: iv.j });
                }
                let next = intervals[pos + 1].t_start;
                if next != e {
                    return Err(HybridTimeError::GapBetweenJumps { j: iv.j, t_end: e, next_start: next });
                }
            }
        }
        if intervals[0].t_start != 0.0 {
            return Err(HybridTimeError::GapBetweenJumps { j: 0, t_end: 0.0, next_start: intervals[0].t_start });
        }
        Ok(HybridTimeDomain { intervals })
    }

    pub fn intervals(&self) -> &[JumpInterval] {
        &self.intervals
    }

    pub fn interval(&self, j: usize) -> Option<&JumpInterval> {
        self.intervals.get(j)
    }

    /// All intervals closed and bounded.
    pub fn is_compact(&self) -> bool {
        self.intervals.iter().all(|iv| iv.end.is_closed())
    }

    pub fn last(&self) -> &JumpInterval {
        self.intervals.last().expect("validated domain is nonempty")
    }

    pub fn sup(&self) -> DomainSup {
        let last = self.last();
        DomainSup { t: last.t_end(), j: last.j }
    }

    pub fn contains(&self, p: HybridTimePoint) -> bool {
        self.intervals.get(p.j).is_some_and(|iv| iv.contains_t(p.t))
    }

    /// At least two points, i.e. a jump or a flow interval of positive length.
    pub fn is_nontrivial(&self) -> bool {
        self.intervals.len() > 1 || self.intervals[0].length() > 0.0
    }

    /// Truncation to `[0, T] × {0, …, J}`; `None` when `(T, J)` is outside the
    /// domain.
    pub fn restrict(&self, t: f64, j: usize) -> Option<HybridTimeDomain> {
        if !self.contains(HybridTimePoint::new(t, j)) {
            return None;
        }
        let mut out: Vec<JumpInterval> = self.intervals[..=j].to_vec();
        let last = out.last_mut().expect("j in range");
        last.end = IntervalEnd::Closed(t);
        Some(HybridTimeDomain { intervals: out })
    }
}
