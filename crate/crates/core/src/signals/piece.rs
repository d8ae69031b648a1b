use serde::{Deserialize, Serialize};

use crate::serde_ext::extended_f64;

/// A function of local time `s = t − origin`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PieceFn {
    Constant { value: Vec<f64> },
    /// `value + slope·s`
    Affine { value: Vec<f64>, slope: Vec<f64> },
    /// Per component, ascending powers of `s`.
    Polynomial { coeffs: Vec<Vec<f64>> },
    /// Monotone cubic through `(times[i], values[i])`, flat outside the table.
    Tabulated { times: Vec<f64>, values: Vec<Vec<f64>> },
    /// `offset + amplitude·sin(omega·s + phase)`
    Sinusoid { offset: Vec<f64>, amplitude: Vec<f64>, omega: f64, phase: f64 },
}

impl PieceFn {
    pub fn dim(&self) -> usize {
        match self {
            PieceFn::Constant { value } | PieceFn::Affine { value, .. } => value.len(),
            PieceFn::Polynomial { coeffs } => coeffs.len(),
            PieceFn::Tabulated { values, .. } => values.first().map_or(0, Vec::len),
            PieceFn::Sinusoid { offset, .. } => offset.len(),
        }
    }

    pub fn eval(&self, s: f64) -> Vec<f64> {
        match self {
            PieceFn::Constant { value } => value.clone(),
            PieceFn::Affine { value, slope } => value.iter().zip(slope).map(|(v, m)| v + m * s).collect(),
            PieceFn::Polynomial { coeffs } => {
                coeffs.iter().map(|c| c.iter().rev().fold(0.0, |acc, a| acc * s + a)).collect()
            }
            PieceFn::Tabulated { times, values } => tabulated(times, values, s).0,
            PieceFn::Sinusoid { offset, amplitude, omega, phase } => {
                let v = (omega * s + phase).sin();
                offset.iter().zip(amplitude).map(|(o, a)| o + a * v).collect()
            }
        }
    }

    pub fn derivative(&self, s: f64) -> Vec<f64> {
        match self {
            PieceFn::Constant { value } => vec![0.0; value.len()],
            PieceFn::Affine { slope, .. } => slope.clone(),
            PieceFn::Polynomial { coeffs } => coeffs
                .iter()
                .map(|c| {
                    c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, a)| acc * s + k as f64 * a)
                })
                .collect(),
            PieceFn::Tabulated { times, values } => tabulated(times, values, s).1,
            PieceFn::Sinusoid { amplitude, omega, phase, .. } => {
                let v = omega * (omega * s + phase).cos();
                amplitude.iter().map(|a| a * v).collect()
            }
        }
    }

    pub fn is_affine(&self) -> bool {
        match self {
            PieceFn::Constant { .. } | PieceFn::Affine { .. } => true,
            PieceFn::Polynomial { coeffs } => coeffs.iter().all(|c| c.iter().skip(2).all(|a| *a == 0.0)),
            PieceFn::Sinusoid { amplitude, .. } => amplitude.iter().all(|a| *a == 0.0),
            PieceFn::Tabulated { .. } => false,
        }
    }

    /// Whether the value can keep changing as `s → ∞`.
    pub(crate) fn is_constant(&self) -> bool {
        match self {
            PieceFn::Constant { .. } => true,
            PieceFn::Affine { slope, .. } => slope.iter().all(|m| *m == 0.0),
            PieceFn::Polynomial { coeffs } => coeffs.iter().all(|c| c.iter().skip(1).all(|a| *a == 0.0)),
            PieceFn::Tabulated { values, .. } => values.windows(2).all(|w| w[0] == w[1]),
            PieceFn::Sinusoid { amplitude, .. } => amplitude.iter().all(|a| *a == 0.0),
        }
    }

    /// Local times, in `[a, b]`, worth checking against a value set.
    pub(crate) fn critical_times(&self, a: f64, b: f64) -> Vec<f64> {
        match self {
            PieceFn::Tabulated { times, .. } => times.iter().copied().filter(|t| *t > a && *t < b).collect(),
            PieceFn::Sinusoid { omega, phase, .. } if *omega != 0.0 && b.is_finite() => {
                // extrema at omega·s + phase = π/2 + kπ
                let half = std::f64::consts::FRAC_PI_2;
                let pi = std::f64::consts::PI;
                let (lo, hi) = if *omega > 0.0 { (a, b) } else { (b, a) };
                let k0 = ((omega * lo + phase - half) / pi).ceil() as i64;
                let k1 = ((omega * hi + phase - half) / pi).floor() as i64;
                (k0..=k1.min(k0 + 10_000)).map(|k| (half + k as f64 * pi - phase) / omega).collect()
            }
            _ => Vec::new(),
        }
    }
}

/// Fritsch–Carlson monotone cubic: value and derivative.
fn tabulated(times: &[f64], values: &[Vec<f64>], s: f64) -> (Vec<f64>, Vec<f64>) {
    let n = times.len();
    let dim = values[0].len();
    if n == 1 || s <= times[0] {
        return (values[0].clone(), vec![0.0; dim]);
    }
    if s >= times[n - 1] {
        return (values[n - 1].clone(), vec![0.0; dim]);
    }
    let i = times.partition_point(|t| *t <= s) - 1;
    let h = times[i + 1] - times[i];
    let u = (s - times[i]) / h;
    let mut val = Vec::with_capacity(dim);
    let mut der = Vec::with_capacity(dim);
    for k in 0..dim {
        let m0 = node_slope(times, values, i, k);
        let m1 = node_slope(times, values, i + 1, k);
        let (y0, y1) = (values[i][k], values[i + 1][k]);
        let u2 = u * u;
        let u3 = u2 * u;
        val.push(
            (2.0 * u3 - 3.0 * u2 + 1.0) * y0
                + (u3 - 2.0 * u2 + u) * h * m0
                + (-2.0 * u3 + 3.0 * u2) * y1
                + (u3 - u2) * h * m1,
        );
        der.push(
            ((6.0 * u2 - 6.0 * u) * y0 + (6.0 * u2 - 6.0 * u) * -y1) / h
                + (3.0 * u2 - 4.0 * u + 1.0) * m0
                + (3.0 * u2 - 2.0 * u) * m1,
        );
    }
    (val, der)
}

fn secant(times: &[f64], values: &[Vec<f64>], i: usize, k: usize) -> f64 {
    (values[i + 1][k] - values[i][k]) / (times[i + 1] - times[i])
}

fn node_slope(times: &[f64], values: &[Vec<f64>], i: usize, k: usize) -> f64 {
    let n = times.len();
    let m = if i == 0 {
        secant(times, values, 0, k)
    } else if i == n - 1 {
        secant(times, values, n - 2, k)
    } else {
        let (a, b) = (secant(times, values, i - 1, k), secant(times, values, i, k));
        if a * b <= 0.0 {
            0.0
        } else {
            // harmonic mean keeps the interpolant monotone on each interval
            2.0 * a * b / (a + b)
        }
    };
    // endpoints: zero slope if the neighbouring secant changes sign
    if (i == 0 || i == n - 1) && n > 2 {
        let inner = if i == 0 { secant(times, values, 1, k) } else { secant(times, values, n - 3, k) };
        if m * inner <= 0.0 {
            return 0.0;
        }
    }
    m
}

/// One piece on `[start, end)`; `end` may be `+∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub start: f64,
    #[serde(with = "extended_f64")]
    pub end: f64,
    /// The function is evaluated at `t − origin`.
    #[serde(default)]
    pub origin: f64,
    #[serde(flatten)]
    pub func: PieceFn,
}

impl Piece {
    pub fn new(start: f64, end: f64, func: PieceFn) -> Self {
        Piece { start, end, origin: 0.0, func }
    }

    pub fn value(&self, t: f64) -> Vec<f64> {
        self.func.eval(t - self.origin)
    }

    pub fn derivative(&self, t: f64) -> Vec<f64> {
        self.func.derivative(t - self.origin)
    }
}
