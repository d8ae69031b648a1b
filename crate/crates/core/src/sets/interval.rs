use serde::{Deserialize, Serialize};
use std::fmt;

use crate::serde_ext::extended_f64;

fn yes() -> bool {
    true
}

/// A real interval whose ends may be open, closed or infinite.
///
/// Infinite ends are always treated as open; constructors normalize the flags
/// so equality is structural.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "extended_f64")]
    pub lo: f64,
    #[serde(with = "extended_f64")]
    pub hi: f64,
    #[serde(default = "yes")]
    pub lo_closed: bool,
    #[serde(default = "yes")]
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Interval { lo, hi, lo_closed: lo_closed && lo.is_finite(), hi_closed: hi_closed && hi.is_finite() }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn point(v: f64) -> Self {
        Self::closed(v, v)
    }

    pub fn real_line() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Canonical empty interval.
    pub fn empty() -> Self {
        Interval { lo: 1.0, hi: 0.0, lo_closed: true, hi_closed: true }
    }

    /// Symmetric closed interval `[-r, r]`.
    pub fn symmetric(r: f64) -> Self {
        Self::closed(-r, r)
    }

    pub fn normalized(self) -> Self {
        Self::new(self.lo, self.hi, self.lo_closed, self.hi_closed)
    }

    pub fn is_empty(&self) -> bool {
        if self.lo.is_nan() || self.hi.is_nan() || self.lo > self.hi {
            return true;
        }
        if self.lo == self.hi {
            return !(self.lo_closed && self.hi_closed) || !self.lo.is_finite();
        }
        false
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_closed(&self) -> bool {
        self.is_empty() || ((self.lo_closed || !self.lo.is_finite()) && (self.hi_closed || !self.hi.is_finite()))
    }

    pub fn is_open(&self) -> bool {
        self.is_empty() || (!self.lo_closed && !self.hi_closed)
    }

    pub fn contains(&self, v: f64) -> bool {
        if self.is_empty() || v.is_nan() {
            return false;
        }
        let above = if self.lo_closed { v >= self.lo } else { v > self.lo };
        let below = if self.hi_closed { v <= self.hi } else { v < self.hi };
        above && below
    }

    pub fn interior(&self) -> Self {
        Self::new(self.lo, self.hi, false, false)
    }

    pub fn closure(&self) -> Self {
        if self.is_empty() {
            return Self::empty();
        }
        Self::new(self.lo, self.hi, true, true)
    }

    pub fn width(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn midpoint(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (true, false) => self.lo + 1.0,
            (false, true) => self.hi - 1.0,
            (false, false) => 0.0,
        }
    }

    pub fn neg(&self) -> Self {
        Interval::new(-self.hi, -self.lo, self.hi_closed, self.lo_closed)
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval::empty();
        }
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else if other.hi < self.hi {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed && other.hi_closed)
        };
        Interval::new(lo, hi, lo_closed, hi_closed)
    }

    /// `A + B = {a + b}`; an end is attained only when both summands attain it.
    pub fn minkowski_sum(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval::empty();
        }
        Interval::new(
            self.lo + other.lo,
            self.hi + other.hi,
            self.lo_closed && other.lo_closed,
            self.hi_closed && other.hi_closed,
        )
    }

    /// `A − B = {a − b}`.
    pub fn minkowski_diff(&self, other: &Interval) -> Interval {
        self.minkowski_sum(&other.neg())
    }

    /// `A ⊖ B = {x | x + B ⊆ A}`.
    pub fn pontryagin_diff(&self, other: &Interval) -> Interval {
        if other.is_empty() {
            return Interval::real_line();
        }
        if self.is_empty() {
            return Interval::empty();
        }
        let lower = if other.lo == f64::NEG_INFINITY {
            if self.lo == f64::NEG_INFINITY {
                Some((f64::NEG_INFINITY, false))
            } else {
                None
            }
        } else if self.lo == f64::NEG_INFINITY {
            Some((f64::NEG_INFINITY, false))
        } else {
            // x + b ≥ a.lo for every b ∈ B; strict only if A's end is open and B attains its end
            Some((self.lo - other.lo, self.lo_closed || !other.lo_closed))
        };
        let upper = if other.hi == f64::INFINITY {
            if self.hi == f64::INFINITY {
                Some((f64::INFINITY, false))
            } else {
                None
            }
        } else if self.hi == f64::INFINITY {
            Some((f64::INFINITY, false))
        } else {
            Some((self.hi - other.hi, self.hi_closed || !other.hi_closed))
        };
        match (lower, upper) {
            (Some((lo, lc)), Some((hi, hc))) => Interval::new(lo, hi, lc, hc),
            _ => Interval::empty(),
        }
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        if self.is_empty() {
            return true;
        }
        if other.is_empty() {
            return false;
        }
        let lower_ok = if self.lo > other.lo {
            true
        } else if self.lo < other.lo {
            false
        } else {
            !self.lo.is_finite() || !self.lo_closed || other.lo_closed
        };
        let upper_ok = if self.hi < other.hi {
            true
        } else if self.hi > other.hi {
            false
        } else {
            !self.hi.is_finite() || !self.hi_closed || other.hi_closed
        };
        lower_ok && upper_ok
    }

    /// Some point of `self` that is not in `other`, if one exists.
    pub fn point_outside(&self, other: &Interval) -> Option<f64> {
        if self.is_empty() {
            return None;
        }
        let mut candidates = vec![other.lo, other.hi];
        if self.lo.is_finite() {
            candidates.push(self.lo);
        }
        if self.hi.is_finite() {
            candidates.push(self.hi);
        }
        if self.lo.is_finite() && other.lo.is_finite() {
            candidates.push(0.5 * (self.lo + other.lo));
        }
        if self.hi.is_finite() && other.hi.is_finite() {
            candidates.push(0.5 * (self.hi + other.hi));
        }
        candidates.push(self.midpoint());
        if self.lo == f64::NEG_INFINITY {
            candidates.push(other.lo.min(self.hi) - 1.0);
        }
        if self.hi == f64::INFINITY {
            candidates.push(other.hi.max(self.lo) + 1.0);
        }
        candidates.into_iter().find(|&c| c.is_finite() && self.contains(c) && !other.contains(c))
    }

    /// Signed distance to the closure: negative inside, zero on the boundary.
    pub fn margin(&self, v: f64) -> f64 {
        if self.is_empty() {
            return f64::INFINITY;
        }
        if v < self.lo {
            self.lo - v
        } else if v > self.hi {
            v - self.hi
        } else {
            -((v - self.lo).min(self.hi - v))
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Cartesian product of intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoxSet(pub Vec<Interval>);

impl BoxSet {
    pub fn new(axes: Vec<Interval>) -> Self {
        BoxSet(axes.into_iter().map(Interval::normalized).collect())
    }

    pub fn closed(lo: &[f64], hi: &[f64]) -> Self {
        BoxSet(lo.iter().zip(hi).map(|(a, b)| Interval::closed(*a, *b)).collect())
    }

    pub fn point(p: &[f64]) -> Self {
        BoxSet(p.iter().map(|v| Interval::point(*v)).collect())
    }

    pub fn whole(dim: usize) -> Self {
        BoxSet(vec![Interval::real_line(); dim])
    }

    pub fn empty(dim: usize) -> Self {
        BoxSet(vec![Interval::empty(); dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn axes(&self) -> &[Interval] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().any(Interval::is_empty)
    }

    pub fn is_closed(&self) -> bool {
        self.is_empty() || self.0.iter().all(Interval::is_closed)
    }

    pub fn is_bounded(&self) -> bool {
        self.0.iter().all(Interval::is_bounded)
    }

    pub fn is_whole(&self) -> bool {
        self.0.iter().all(|i| i.lo == f64::NEG_INFINITY && i.hi == f64::INFINITY)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.0.iter().zip(x).all(|(i, v)| i.contains(*v))
    }

    fn zip_with(&self, other: &BoxSet, f: impl Fn(&Interval, &Interval) -> Interval) -> BoxSet {
        assert_eq!(self.dim(), other.dim(), "box dimensions differ");
        BoxSet(self.0.iter().zip(&other.0).map(|(a, b)| f(a, b)).collect())
    }

    pub fn intersect(&self, other: &BoxSet) -> BoxSet {
        self.zip_with(other, Interval::intersect)
    }

    pub fn minkowski_sum(&self, other: &BoxSet) -> BoxSet {
        self.zip_with(other, Interval::minkowski_sum)
    }

    pub fn minkowski_diff(&self, other: &BoxSet) -> BoxSet {
        self.zip_with(other, Interval::minkowski_diff)
    }

    pub fn pontryagin_diff(&self, other: &BoxSet) -> BoxSet {
        if other.is_empty() {
            return BoxSet::whole(self.dim());
        }
        self.zip_with(other, Interval::pontryagin_diff)
    }

    pub fn interior(&self) -> BoxSet {
        BoxSet(self.0.iter().map(Interval::interior).collect())
    }

    pub fn closure(&self) -> BoxSet {
        BoxSet(self.0.iter().map(Interval::closure).collect())
    }

    pub fn is_subset_of(&self, other: &BoxSet) -> bool {
        self.is_empty() || (self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a.is_subset_of(b)))
    }

    /// A point of `self` outside `other`, when `self ⊄ other`.
    pub fn point_outside(&self, other: &BoxSet) -> Option<Vec<f64>> {
        if self.is_empty() || self.dim() != other.dim() {
            return None;
        }
        let axis = (0..self.dim()).find(|&k| !self.0[k].is_subset_of(&other.0[k]))?;
        let mut p = self.representative()?;
        p[axis] = self.0[axis].point_outside(&other.0[axis])?;
        Some(p)
    }

    /// A finite point of the box.
    pub fn representative(&self) -> Option<Vec<f64>> {
        if self.is_empty() {
            return None;
        }
        Some(self.0.iter().map(Interval::midpoint).collect())
    }

    /// Signed Euclidean distance to the closed box: exact distance outside,
    /// minus the distance to the nearest face inside.
    pub fn margin(&self, x: &[f64]) -> f64 {
        if self.is_empty() {
            return f64::INFINITY;
        }
        let mut outside = 0.0f64;
        let mut inside = f64::INFINITY;
        for (i, v) in self.0.iter().zip(x) {
            let excess = (i.lo - v).max(v - i.hi);
            if excess > 0.0 {
                outside += excess * excess;
            } else {
                inside = inside.min(-excess);
            }
        }
        if outside > 0.0 {
            outside.sqrt()
        } else {
            -inside
        }
    }

    /// Vertices of a bounded box, in binary-counter order.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| (0..n).map(|k| if mask >> k & 1 == 1 { self.0[k].hi } else { self.0[k].lo }).collect())
            .collect()
    }

    pub fn concat(&self, other: &BoxSet) -> BoxSet {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BoxSet(v)
    }

    pub fn split_at(&self, k: usize) -> (BoxSet, BoxSet) {
        (BoxSet(self.0[..k].to_vec()), BoxSet(self.0[k..].to_vec()))
    }

    /// Largest absolute coordinate over the box (∞ when unbounded).
    pub fn sup_abs(&self) -> f64 {
        self.0.iter().map(|i| i.lo.abs().max(i.hi.abs())).fold(0.0, f64::max)
    }
}

impl fmt::Display for BoxSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" × ")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}
