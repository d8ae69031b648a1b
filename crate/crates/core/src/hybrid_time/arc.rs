use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{HybridTimeDomain, HybridTimeError, HybridTimePoint, IntervalEnd, JumpInterval};

/// Dense-output sample: state and its time derivative at `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: Vec<f64>,
    /// Flow derivative at the sample; empty for arcs imported without one.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dx: Vec<f64>,
    /// Left derivative where the input jumps at `t`; empty when equal to `dx`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dx_left: Vec<f64>,
}

impl Sample {
    pub fn new(t: f64, x: Vec<f64>, dx: Vec<f64>) -> Self {
        Sample { t, x, dx, dx_left: Vec::new() }
    }

    /// Derivative seen by the interval that ends at this sample.
    pub fn incoming_dx(&self) -> &[f64] {
        if self.dx_left.is_empty() {
            &self.dx
        } else {
            &self.dx_left
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Piecewise linear between samples (order 1).
    Linear,
    /// Cubic Hermite from sample values and derivatives (order 3).
    CubicHermite,
}

/// Trajectory record for one jump counter `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub j: usize,
    pub interpolation: Interpolation,
    pub samples: Vec<Sample>,
    /// The final time is a supremum that is not attained.
    #[serde(default)]
    pub open_end: bool,
}

impl Segment {
    pub fn new(j: usize, first: Sample) -> Self {
        Segment { j, interpolation: Interpolation::CubicHermite, samples: vec![first], open_end: false }
    }

    pub fn t_start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn t_end(&self) -> f64 {
        self.samples.last().map(|s| s.t).unwrap_or(f64::NAN)
    }

    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("segments hold at least one sample")
    }

    pub fn is_point(&self) -> bool {
        self.samples.len() == 1 || self.t_end() == self.t_start()
    }

    /// Interpolated state at `t` inside the sampled range.
    pub fn eval(&self, t: f64) -> Option<Vec<f64>> {
        let s = &self.samples;
        if s.is_empty() || t < s[0].t || t > s[s.len() - 1].t {
            return None;
        }
        // first index whose time is >= t
        let i = s.partition_point(|p| p.t < t);
        if i < s.len() && s[i].t == t {
            return Some(s[i].x.clone());
        }
        let (a, b) = (&s[i - 1], &s[i]);
        Some(interpolate(self.interpolation, a, b, t))
    }
}

fn interpolate(kind: Interpolation, a: &Sample, b: &Sample, t: f64) -> Vec<f64> {
    let h = b.t - a.t;
    let u = (t - a.t) / h;
    let bdx = b.incoming_dx();
    let hermite = kind == Interpolation::CubicHermite && a.dx.len() == a.x.len() && bdx.len() == b.x.len();
    if !hermite {
        return a.x.iter().zip(&b.x).map(|(p, q)| p + u * (q - p)).collect();
    }
    let u2 = u * u;
    let u3 = u2 * u;
    let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    let h10 = u3 - 2.0 * u2 + u;
    let h01 = -2.0 * u3 + 3.0 * u2;
    let h11 = u3 - u2;
    (0..a.x.len())
        .map(|k| h00 * a.x[k] + h10 * h * a.dx[k] + h01 * b.x[k] + h11 * h * bdx[k])
        .collect()
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArcError {
    #[error("point (t={t}, j={j}) is outside the arc's domain")]
    PointOutsideDomain { t: f64, j: usize },
    #[error("segment {position} has jump counter {found}")]
    SegmentOrder { position: usize, found: usize },
    #[error("segment j={j} has non-increasing sample times")]
    UnsortedSamples { j: usize },
    #[error("sample dimension {found} differs from state dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("segment j={j} has no samples")]
    EmptySegment { j: usize },
    #[error(transparent)]
    Domain(#[from] HybridTimeError),
}

/// A hybrid arc: a domain together with one dense-output segment per `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridArc {
    domain: HybridTimeDomain,
    segments: Vec<Segment>,
    state_dim: usize,
}

impl HybridArc {
    /// Builds an arc from per-jump segments; the domain is derived from the
    /// sample ranges and checked against the hybrid-time-domain invariants.
    pub fn from_segments(state_dim: usize, segments: Vec<Segment>) -> Result<Self, ArcError> {
        let mut intervals = Vec::with_capacity(segments.len());
        let last = segments.len().saturating_sub(1);
        for (pos, seg) in segments.iter().enumerate() {
            if seg.j != pos {
                return Err(ArcError::SegmentOrder { position: pos, found: seg.j });
            }
            if seg.samples.is_empty() {
                return Err(ArcError::EmptySegment { j: seg.j });
            }
            for w in seg.samples.windows(2) {
                if !(w[1].t > w[0].t) {
                    return Err(ArcError::UnsortedSamples { j: seg.j });
                }
            }
            for s in &seg.samples {
                if s.x.len() != state_dim {
                    return Err(ArcError::DimensionMismatch { expected: state_dim, found: s.x.len() });
                }
                for d in [&s.dx, &s.dx_left] {
                    if !d.is_empty() && d.len() != state_dim {
                        return Err(ArcError::DimensionMismatch { expected: state_dim, found: d.len() });
                    }
                }
            }
            let end = if seg.open_end && pos == last && !seg.is_point() {
                IntervalEnd::Open(seg.t_end())
            } else {
                IntervalEnd::Closed(seg.t_end())
            };
            intervals.push(JumpInterval { j: seg.j, t_start: seg.t_start(), end });
        }
        let domain = HybridTimeDomain::from_intervals(intervals)?;
        Ok(HybridArc { domain, segments, state_dim })
    }

    pub fn domain(&self) -> &HybridTimeDomain {
        &self.domain
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn initial_state(&self) -> &[f64] {
        &self.segments[0].samples[0].x
    }

    /// State at the last sampled point `(T, J)`.
    pub fn final_state(&self) -> &[f64] {
        &self.segments.last().expect("nonempty arc").last().x
    }

    pub fn final_point(&self) -> HybridTimePoint {
        let seg = self.segments.last().expect("nonempty arc");
        HybridTimePoint::new(seg.t_end(), seg.j)
    }

    pub fn eval(&self, p: HybridTimePoint) -> Result<Vec<f64>, ArcError> {
        let outside = ArcError::PointOutsideDomain { t: p.t, j: p.j };
        if !self.domain.contains(p) {
            // the open right end is still sampled, but not part of the domain
            return Err(outside);
        }
        self.segments[p.j].eval(p.t).ok_or(outside)
    }

    pub fn is_nontrivial(&self) -> bool {
        self.domain.is_nontrivial()
    }

    pub fn jump_count(&self) -> usize {
        self.segments.len() - 1
    }

    /// Jump times `t_{j+1}` for `j = 0..J-1`.
    pub fn jump_times(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|s| s.t_start()).collect()
    }

    /// Every stored sample, tagged with its jump counter.
    pub fn samples(&self) -> impl Iterator<Item = (usize, &Sample)> {
        self.segments.iter().flat_map(|s| s.samples.iter().map(move |p| (s.j, p)))
    }

    /// Largest absolute state component over the stored samples.
    pub fn max_abs_state(&self) -> f64 {
        self.samples().flat_map(|(_, s)| s.x.iter()).fold(0.0f64, |m, v| m.max(v.abs()))
    }
}
