//! Halfspace systems `a·x ≤ b`: membership, Fourier–Motzkin projection and
//! feasibility.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::interval::BoxSet;

const ROW_LIMIT: usize = 20_000;
const COEF_EPS: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinearError {
    #[error("Fourier–Motzkin elimination exceeded {limit} rows")]
    TooComplex { limit: usize },
}

/// `a·x ≤ b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub a: Vec<f64>,
    pub b: f64,
}

impl Halfspace {
    pub fn new(a: Vec<f64>, b: f64) -> Self {
        Halfspace { a, b }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        dot(&self.a, x) - self.b
    }

    pub fn norm(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn scaled(&self) -> Option<Halfspace> {
        let m = self.a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if m == 0.0 {
            return None;
        }
        Some(Halfspace { a: self.a.iter().map(|v| v / m).collect(), b: self.b / m })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// A closed convex polyhedron `{x | a_i·x ≤ b_i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyhedron {
    pub dim: usize,
    pub rows: Vec<Halfspace>,
}

impl Polyhedron {
    pub fn new(dim: usize, rows: Vec<Halfspace>) -> Self {
        Polyhedron { dim, rows }
    }

    /// Rows for the finite ends of a box (openness is dropped: the result is
    /// the closure).
    pub fn from_box(b: &BoxSet) -> Self {
        let n = b.dim();
        let mut rows = Vec::new();
        for (k, iv) in b.axes().iter().enumerate() {
            if iv.is_empty() {
                // 0·x ≤ -1
                return Polyhedron { dim: n, rows: vec![Halfspace::new(vec![0.0; n], -1.0)] };
            }
            if iv.lo.is_finite() {
                let mut a = vec![0.0; n];
                a[k] = -1.0;
                rows.push(Halfspace::new(a, -iv.lo));
            }
            if iv.hi.is_finite() {
                let mut a = vec![0.0; n];
                a[k] = 1.0;
                rows.push(Halfspace::new(a, iv.hi));
            }
        }
        Polyhedron { dim: n, rows }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.rows.iter().all(|r| dot(&r.a, x) <= r.b)
    }

    /// Largest normalized violation `max_i (a_i·x − b_i)/‖a_i‖`.
    pub fn margin(&self, x: &[f64]) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for r in &self.rows {
            let n = r.norm();
            let v = if n == 0.0 {
                if r.b >= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            } else {
                r.value(x) / n
            };
            m = m.max(v);
        }
        m
    }

    pub fn intersect(&self, other: &Polyhedron) -> Polyhedron {
        assert_eq!(self.dim, other.dim);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Polyhedron { dim: self.dim, rows }
    }

    /// Embeds into a larger space, placing these coordinates at `offset`.
    pub fn embed(&self, total_dim: usize, offset: usize) -> Polyhedron {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut a = vec![0.0; total_dim];
                a[offset..offset + self.dim].copy_from_slice(&r.a);
                Halfspace::new(a, r.b)
            })
            .collect();
        Polyhedron { dim: total_dim, rows }
    }

    /// Projects out the trailing `count` coordinates.
    pub fn eliminate_trailing(&self, count: usize) -> Result<Polyhedron, LinearError> {
        let mut rows: Vec<Halfspace> = self.rows.clone();
        for k in (self.dim - count..self.dim).rev() {
            rows = eliminate(rows, k)?;
        }
        Ok(Polyhedron { dim: self.dim - count, rows })
    }

    pub fn is_feasible(&self, tol: f64) -> Result<bool, LinearError> {
        let mut rows = self.rows.clone();
        for k in (0..self.dim).rev() {
            if rows.iter().any(|r| r.a.iter().all(|v| *v == 0.0) && r.b < -tol) {
                return Ok(false);
            }
            rows = eliminate(rows, k)?;
        }
        Ok(rows.iter().all(|r| r.b >= -tol))
    }

    /// Rows active (within `tol`, scaled by the row norm) at `x`.
    pub fn active_rows(&self, x: &[f64], tol: f64) -> Vec<&Halfspace> {
        self.rows
            .iter()
            .filter(|r| {
                let n = r.norm();
                n > 0.0 && r.value(x) >= -tol * (n + r.b.abs())
            })
            .collect()
    }
}

/// Eliminates coordinate `k` and drops its column.
fn eliminate(rows: Vec<Halfspace>, k: usize) -> Result<Vec<Halfspace>, LinearError> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    for r in rows {
        let Some(r) = r.scaled() else {
            // constant row 0 ≤ b: keep in reduced dimension
            let mut a = r.a.clone();
            a.remove(k);
            out.push(Halfspace::new(a, r.b));
            continue;
        };
        let c = r.a[k];
        if c > COEF_EPS {
            pos.push(r);
        } else if c < -COEF_EPS {
            neg.push(r);
        } else {
            let mut a = r.a;
            a.remove(k);
            out.push(Halfspace::new(a, r.b));
        }
    }
    if out.len() + pos.len() * neg.len() > ROW_LIMIT {
        return Err(LinearError::TooComplex { limit: ROW_LIMIT });
    }
    for p in &pos {
        for n in &neg {
            let cp = p.a[k];
            let cn = -n.a[k];
            let mut a: Vec<f64> = p.a.iter().zip(&n.a).map(|(x, y)| x / cp + y / cn).collect();
            a.remove(k);
            out.push(Halfspace::new(a, p.b / cp + n.b / cn));
        }
    }
    dedupe(&mut out);
    Ok(out)
}

fn dedupe(rows: &mut Vec<Halfspace>) {
    let mut kept: Vec<Halfspace> = Vec::with_capacity(rows.len());
    for r in rows.drain(..) {
        let r = r.scaled().unwrap_or(r);
        let dup = kept.iter_mut().find(|q| q.a.iter().zip(&r.a).all(|(x, y)| (x - y).abs() <= 1e-12));
        match dup {
            Some(q) => q.b = q.b.min(r.b),
            None => kept.push(r),
        }
    }
    *rows = kept;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_of_strip() {
        // |x + w| ≤ 1.5 with w ∈ [-0.2, 0.2]  →  |x| ≤ 1.7
        let p = Polyhedron::new(
            2,
            vec![
                Halfspace::new(vec![1.0, 1.0], 1.5),
                Halfspace::new(vec![-1.0, -1.0], 1.5),
                Halfspace::new(vec![0.0, 1.0], 0.2),
                Halfspace::new(vec![0.0, -1.0], 0.2),
            ],
        );
        let q = p.eliminate_trailing(1).unwrap();
        assert!(q.contains(&[1.7]) && q.contains(&[-1.7]));
        assert!(!q.contains(&[1.7000001]) && !q.contains(&[-1.71]));
    }

    #[test]
    fn feasibility() {
        let tri = Polyhedron::new(
            2,
            vec![
                Halfspace::new(vec![-1.0, 0.0], 0.0),
                Halfspace::new(vec![0.0, -1.0], 0.0),
                Halfspace::new(vec![1.0, 1.0], 1.0),
            ],
        );
        assert!(tri.is_feasible(0.0).unwrap());
        let bad = tri.intersect(&Polyhedron::new(2, vec![Halfspace::new(vec![-1.0, -1.0], -1.5)]));
        assert!(!bad.is_feasible(1e-12).unwrap());
    }

    #[test]
    fn margin_is_normalized() {
        let p = Polyhedron::new(2, vec![Halfspace::new(vec![3.0, 4.0], 0.0)]);
        assert!((p.margin(&[3.0, 4.0]) - 5.0).abs() < 1e-12);
    }
}
