use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::SystemError;
use crate::sets::{BoxSet, Interval};

/// A set-valued flow map carried as a box enclosure plus one selection.
pub trait FlowMap: Send + Sync + fmt::Debug {
    fn select(&self, x: &[f64], w: &[f64]) -> Vec<f64>;

    fn enclosure(&self, x: &[f64], w: &[f64]) -> BoxSet;

    /// Enclosure of `F` over a whole box of `(x, w)`, when it can be bounded.
    fn enclosure_over(&self, _x: &BoxSet, _w: &BoxSet) -> Option<BoxSet> {
        None
    }

    fn as_affine(&self) -> Option<&AffineFlow> {
        None
    }
}

fn matvec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Interval image of a box under a linear map.
fn matbox(m: &[Vec<f64>], b: &BoxSet) -> Vec<Interval> {
    m.iter()
        .map(|row| {
            row.iter().zip(b.axes()).fold(Interval::point(0.0), |acc, (a, iv)| {
                let iv = iv.closure();
                let term = if *a == 0.0 {
                    Interval::point(0.0)
                } else if *a > 0.0 {
                    Interval::closed(a * iv.lo, a * iv.hi)
                } else {
                    Interval::closed(a * iv.hi, a * iv.lo)
                };
                acc.minkowski_sum(&term)
            })
        })
        .collect()
}

/// `ẋ ∈ A x + B w + c + [−spread, spread]`, selection at the centre.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineFlow {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spread: Vec<f64>,
}

impl AffineFlow {
    pub fn zero(n_x: usize, n_w: usize) -> Self {
        AffineFlow { a: vec![vec![0.0; n_x]; n_x], b: vec![vec![0.0; n_w]; n_x], c: vec![0.0; n_x], spread: vec![] }
    }

    /// Scalar `ẋ = a x + b w + c`.
    pub fn scalar(a: f64, b: f64, c: f64) -> Self {
        AffineFlow { a: vec![vec![a]], b: vec![vec![b]], c: vec![c], spread: vec![] }
    }

    pub(crate) fn check_dims(&self, n_x: usize, n_w: usize) -> Result<(), SystemError> {
        let bad = self.a.len() != n_x
            || self.b.len() != n_x
            || self.c.len() != n_x
            || self.a.iter().any(|r| r.len() != n_x)
            || self.b.iter().any(|r| r.len() != n_w)
            || !(self.spread.is_empty() || self.spread.len() == n_x);
        if bad {
            return Err(SystemError::Config("affine flow dimensions do not match (n_x, n_w)".into()));
        }
        Ok(())
    }

    fn spread(&self, k: usize) -> f64 {
        self.spread.get(k).copied().unwrap_or(0.0)
    }
}

impl FlowMap for AffineFlow {
    fn select(&self, x: &[f64], w: &[f64]) -> Vec<f64> {
        let ax = matvec(&self.a, x);
        let bw = matvec(&self.b, w);
        (0..self.c.len()).map(|k| ax[k] + bw[k] + self.c[k]).collect()
    }

    fn enclosure(&self, x: &[f64], w: &[f64]) -> BoxSet {
        let v = self.select(x, w);
        BoxSet(v.iter().enumerate().map(|(k, m)| Interval::closed(m - self.spread(k), m + self.spread(k))).collect())
    }

    fn enclosure_over(&self, x: &BoxSet, w: &BoxSet) -> Option<BoxSet> {
        let ax = matbox(&self.a, x);
        let bw = matbox(&self.b, w);
        Some(BoxSet(
            (0..self.c.len())
                .map(|k| {
                    let s = self.spread(k);
                    ax[k].minkowski_sum(&bw[k]).minkowski_sum(&Interval::closed(self.c[k] - s, self.c[k] + s))
                })
                .collect(),
        ))
    }

    fn as_affine(&self) -> Option<&AffineFlow> {
        Some(self)
    }
}

type SelectFn = dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync;

/// Single-valued flow from a closure.
#[derive(Clone)]
pub struct FnFlow {
    pub name: String,
    f: Arc<SelectFn>,
}

impl FnFlow {
    pub fn new(name: impl Into<String>, f: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        FnFlow { name: name.into(), f: Arc::new(f) }
    }
}

impl fmt::Debug for FnFlow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnFlow({})", self.name)
    }
}

impl FlowMap for FnFlow {
    fn select(&self, x: &[f64], w: &[f64]) -> Vec<f64> {
        (self.f)(x, w)
    }

    fn enclosure(&self, x: &[f64], w: &[f64]) -> BoxSet {
        BoxSet::point(&(self.f)(x, w))
    }
}

/// `x⁺ = A x + B w + c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<f64>,
}

impl AffineMap {
    pub fn apply(&self, x: &[f64], w: &[f64]) -> Vec<f64> {
        let ax = matvec(&self.a, x);
        let bw = matvec(&self.b, w);
        (0..self.c.len()).map(|k| ax[k] + bw[k] + self.c[k]).collect()
    }
}

/// Finite list of jump selections.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpMap {
    pub maps: Vec<AffineMap>,
}

impl JumpMap {
    pub fn successors(&self, x: &[f64], w: &[f64]) -> Vec<Vec<f64>> {
        self.maps.iter().map(|m| m.apply(x, w)).collect()
    }

    pub(crate) fn check_dims(&self, n_x: usize, n_w: usize) -> Result<(), SystemError> {
        for m in &self.maps {
            let bad = m.a.len() != n_x
                || m.b.len() != n_x
                || m.c.len() != n_x
                || m.a.iter().any(|r| r.len() != n_x)
                || m.b.iter().any(|r| r.len() != n_w);
            if bad {
                return Err(SystemError::Config("jump map dimensions do not match (n_x, n_w)".into()));
            }
        }
        Ok(())
    }
}
