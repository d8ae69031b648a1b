use serde::{Deserialize, Serialize};

use super::interval::{BoxSet, Interval};
use super::linear::{dot, Halfspace, LinearError, Polyhedron};
use super::SetError;

/// Scalar strictly monotone function used by [`OutputMap::Monotone`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonotoneFn {
    /// `scale·z + shift`
    Linear { scale: f64, shift: f64 },
    /// `scale·z³`
    Cubic { scale: f64 },
    /// `scale·tanh(z)`
    Tanh { scale: f64 },
}

impl MonotoneFn {
    pub fn eval(&self, z: f64) -> f64 {
        match *self {
            MonotoneFn::Linear { scale, shift } => scale * z + shift,
            MonotoneFn::Cubic { scale } => scale * z * z * z,
            MonotoneFn::Tanh { scale } => scale * z.tanh(),
        }
    }

    fn scale(&self) -> f64 {
        match *self {
            MonotoneFn::Linear { scale, .. } | MonotoneFn::Cubic { scale } | MonotoneFn::Tanh { scale } => scale,
        }
    }

    /// Inverse on the extended line; values outside the range saturate to ±∞.
    fn inverse(&self, y: f64) -> f64 {
        match *self {
            MonotoneFn::Linear { scale, shift } => (y - shift) / scale,
            MonotoneFn::Cubic { scale } => (y / scale).cbrt(),
            MonotoneFn::Tanh { scale } => {
                let r = y / scale;
                if r >= 1.0 {
                    f64::INFINITY
                } else if r <= -1.0 {
                    f64::NEG_INFINITY
                } else {
                    r.atanh()
                }
            }
        }
    }

    /// Preimage of an interval. Strict monotonicity maps ends to ends, so
    /// open/closed flags carry over (swapped for decreasing functions).
    fn preimage(&self, iv: &Interval) -> Interval {
        if iv.is_empty() {
            return Interval::empty();
        }
        let (a, b) = (self.inverse(iv.lo), self.inverse(iv.hi));
        let r = if self.scale() > 0.0 {
            Interval::new(a, b, iv.lo_closed, iv.hi_closed)
        } else {
            Interval::new(b, a, iv.hi_closed, iv.lo_closed)
        };
        if r.lo > r.hi || (r.lo == r.hi && !(r.lo_closed && r.hi_closed)) {
            Interval::empty()
        } else {
            r
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneComponent {
    /// State coordinate the component reads.
    pub input: usize,
    pub func: MonotoneFn,
}

/// The output map `h : ℝ^{n_x} → ℝ^{n_y}` of an output-form set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutputMap {
    Identity { dim: usize },
    Affine { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    Monotone { input_dim: usize, components: Vec<MonotoneComponent> },
}

impl OutputMap {
    pub fn input_dim(&self) -> usize {
        match self {
            OutputMap::Identity { dim } => *dim,
            OutputMap::Affine { matrix, .. } => matrix.first().map_or(0, Vec::len),
            OutputMap::Monotone { input_dim, .. } => *input_dim,
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            OutputMap::Identity { dim } => *dim,
            OutputMap::Affine { matrix, .. } => matrix.len(),
            OutputMap::Monotone { components, .. } => components.len(),
        }
    }

    pub fn eval(&self, z: &[f64]) -> Vec<f64> {
        match self {
            OutputMap::Identity { .. } => z.to_vec(),
            OutputMap::Affine { matrix, offset } => {
                matrix.iter().zip(offset).map(|(row, c)| dot(row, z) + c).collect()
            }
            OutputMap::Monotone { components, .. } => {
                components.iter().map(|c| c.func.eval(z[c.input])).collect()
            }
        }
    }

    /// `(H, c)` with `h(z) = H z + c`, when `h` is affine.
    pub fn affine_parts(&self) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
        match self {
            OutputMap::Identity { dim } => {
                let m = (0..*dim).map(|i| (0..*dim).map(|k| if i == k { 1.0 } else { 0.0 }).collect()).collect();
                Some((m, vec![0.0; *dim]))
            }
            OutputMap::Affine { matrix, offset } => Some((matrix.clone(), offset.clone())),
            OutputMap::Monotone { input_dim, components } => {
                let mut m = Vec::new();
                let mut c = Vec::new();
                for comp in components {
                    let MonotoneFn::Linear { scale, shift } = comp.func else { return None };
                    let mut row = vec![0.0; *input_dim];
                    row[comp.input] = scale;
                    m.push(row);
                    c.push(shift);
                }
                Some((m, c))
            }
        }
    }

    /// Whether `h` maps open sets to open sets.
    pub fn is_open_map(&self) -> bool {
        match self {
            OutputMap::Identity { .. } => true,
            OutputMap::Affine { matrix, .. } => full_row_rank(matrix),
            OutputMap::Monotone { components, .. } => {
                // each output must read its own coordinate
                let mut seen: Vec<usize> = components.iter().map(|c| c.input).collect();
                seen.sort_unstable();
                seen.dedup();
                seen.len() == components.len() && components.iter().all(|c| c.func.scale() != 0.0)
            }
        }
    }

    /// `h⁻¹(B)` as a box, for identity and monotone maps.
    pub fn preimage_box(&self, b: &BoxSet) -> Option<BoxSet> {
        match self {
            OutputMap::Identity { .. } => Some(b.clone()),
            OutputMap::Monotone { input_dim, components } => {
                let mut axes = vec![Interval::real_line(); *input_dim];
                for (comp, iv) in components.iter().zip(b.axes()) {
                    let pre = comp.func.preimage(iv);
                    axes[comp.input] = axes[comp.input].intersect(&pre);
                }
                Some(BoxSet(axes))
            }
            OutputMap::Affine { .. } => None,
        }
    }
}

fn full_row_rank(m: &[Vec<f64>]) -> bool {
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).max_by(|&i, &k| a[i][c].abs().total_cmp(&a[k][c].abs())) else { break };
        if a[p][c].abs() < 1e-12 {
            continue;
        }
        a.swap(rank, p);
        for i in 0..rows {
            if i != rank {
                let f = a[i][c] / a[rank][c];
                for k in 0..cols {
                    a[i][k] -= f * a[rank][k];
                }
            }
        }
        rank += 1;
    }
    rank == rows
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "box", rename_all = "snake_case")]
pub enum Region {
    /// `y ∈ B`
    Inside(BoxSet),
    /// `y ∉ B`
    Outside(BoxSet),
}

impl Region {
    pub fn boxed(&self) -> &BoxSet {
        match self {
            Region::Inside(b) | Region::Outside(b) => b,
        }
    }
}

/// `{(ζ, ω) | h(ζ) + ω ∈ S_y}`; with `input_dim = 0` simply `{ζ | h(ζ) ∈ S_y}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputForm {
    pub map: OutputMap,
    /// Dimension of the additive input; either 0 or the output dimension.
    #[serde(default)]
    pub input_dim: usize,
    pub region: Region,
}

impl OutputForm {
    pub fn dim(&self) -> usize {
        self.map.input_dim() + self.input_dim
    }

    pub fn output(&self, x: &[f64]) -> Vec<f64> {
        let n = self.map.input_dim();
        let mut y = self.map.eval(&x[..n]);
        for (k, w) in x[n..].iter().enumerate() {
            y[k] += w;
        }
        y
    }

    fn is_closed(&self) -> bool {
        match &self.region {
            Region::Inside(b) => b.is_closed(),
            Region::Outside(b) => b.is_empty() || b.axes().iter().all(Interval::is_open),
        }
    }
}

/// Structured subset of `ℝⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetExpr {
    Box { bounds: BoxSet },
    Polyhedron(Polyhedron),
    OutputForm(OutputForm),
    Product { factors: Vec<SetExpr> },
    Intersection { members: Vec<SetExpr> },
    /// Open complement of a closed set.
    ComplementOpen { of: std::boxed::Box<SetExpr> },
}

impl SetExpr {
    pub fn boxed(b: BoxSet) -> Self {
        SetExpr::Box { bounds: b }
    }

    pub fn output_form(map: OutputMap, input_dim: usize, region: Region) -> Self {
        SetExpr::OutputForm(OutputForm { map, input_dim, region })
    }

    pub fn dim(&self) -> usize {
        match self {
            SetExpr::Box { bounds } => bounds.dim(),
            SetExpr::Polyhedron(p) => p.dim,
            SetExpr::OutputForm(f) => f.dim(),
            SetExpr::Product { factors } => factors.iter().map(SetExpr::dim).sum(),
            SetExpr::Intersection { members } => members.first().map_or(0, SetExpr::dim),
            SetExpr::ComplementOpen { of } => of.dim(),
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), SetError> {
        if x.len() != self.dim() {
            return Err(SetError::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        match self {
            SetExpr::Box { bounds } => bounds.is_closed(),
            SetExpr::Polyhedron(_) => true,
            SetExpr::OutputForm(f) => f.is_closed(),
            SetExpr::Product { factors } => factors.iter().all(SetExpr::is_closed),
            SetExpr::Intersection { members } => members.iter().all(SetExpr::is_closed),
            SetExpr::ComplementOpen { .. } => false,
        }
    }

    /// Exact structural membership.
    pub fn contains(&self, x: &[f64]) -> Result<bool, SetError> {
        self.check_dim(x)?;
        Ok(self.contains_unchecked(x))
    }

    fn contains_unchecked(&self, x: &[f64]) -> bool {
        match self {
            SetExpr::Box { bounds } => bounds.contains(x),
            SetExpr::Polyhedron(p) => p.contains(x),
            SetExpr::OutputForm(f) => {
                let y = f.output(x);
                match &f.region {
                    Region::Inside(b) => b.contains(&y),
                    Region::Outside(b) => !b.contains(&y),
                }
            }
            SetExpr::Product { factors } => {
                let mut off = 0;
                factors.iter().all(|s| {
                    let d = s.dim();
                    let r = s.contains_unchecked(&x[off..off + d]);
                    off += d;
                    r
                })
            }
            SetExpr::Intersection { members } => members.iter().all(|s| s.contains_unchecked(x)),
            SetExpr::ComplementOpen { of } => !of.contains_unchecked(x),
        }
    }

    /// Membership of the `tol`-inflation, via the margin where one exists.
    pub fn contains_tol(&self, x: &[f64], tol: f64) -> Result<bool, SetError> {
        match self.margin(x) {
            Ok(m) => Ok(m <= tol),
            Err(SetError::UnsupportedVariant(_)) => self.contains(x),
            Err(e) => Err(e),
        }
    }

    /// Signed margin: `≤ 0` exactly on the closure, positive outside.
    pub fn margin(&self, x: &[f64]) -> Result<f64, SetError> {
        self.check_dim(x)?;
        self.margin_unchecked(x)
    }

    fn margin_unchecked(&self, x: &[f64]) -> Result<f64, SetError> {
        Ok(match self {
            SetExpr::Box { bounds } => bounds.margin(x),
            SetExpr::Polyhedron(p) => p.margin(x),
            SetExpr::OutputForm(f) => {
                let y = f.output(x);
                match &f.region {
                    Region::Inside(b) => b.margin(&y),
                    Region::Outside(b) => {
                        if b.is_empty() {
                            f64::NEG_INFINITY
                        } else {
                            -b.margin(&y)
                        }
                    }
                }
            }
            SetExpr::Product { factors } => {
                let mut off = 0;
                let mut m = f64::NEG_INFINITY;
                for s in factors {
                    let d = s.dim();
                    m = m.max(s.margin_unchecked(&x[off..off + d])?);
                    off += d;
                }
                m
            }
            SetExpr::Intersection { members } => {
                let mut m = f64::NEG_INFINITY;
                for s in members {
                    m = m.max(s.margin_unchecked(x)?);
                }
                m
            }
            SetExpr::ComplementOpen { .. } => {
                return Err(SetError::UnsupportedVariant("margin of an open complement".into()))
            }
        })
    }

    /// The complement, kept in structured form where possible.
    pub fn complement(&self) -> SetExpr {
        match self {
            SetExpr::OutputForm(f) => {
                let region = match &f.region {
                    Region::Inside(b) => Region::Outside(b.clone()),
                    Region::Outside(b) => Region::Inside(b.clone()),
                };
                SetExpr::OutputForm(OutputForm { region, ..f.clone() })
            }
            SetExpr::ComplementOpen { of } => (**of).clone(),
            other => SetExpr::ComplementOpen { of: std::boxed::Box::new(other.clone()) },
        }
    }

    /// Halfspace form (of the closure), when the set is polyhedral.
    pub fn as_polyhedron(&self) -> Option<Polyhedron> {
        match self {
            SetExpr::Box { bounds } => Some(Polyhedron::from_box(bounds)),
            SetExpr::Polyhedron(p) => Some(p.clone()),
            SetExpr::OutputForm(f) => {
                let Region::Inside(b) = &f.region else { return None };
                let (h, c) = f.map.affine_parts()?;
                let n = f.dim();
                let nx = f.map.input_dim();
                let mut rows = Vec::new();
                for (k, iv) in b.axes().iter().enumerate() {
                    if iv.is_empty() {
                        return Some(Polyhedron::new(n, vec![Halfspace::new(vec![0.0; n], -1.0)]));
                    }
                    let mut a = h[k].clone();
                    a.resize(n, 0.0);
                    if f.input_dim > 0 {
                        a[nx + k] = 1.0;
                    }
                    if iv.hi.is_finite() {
                        rows.push(Halfspace::new(a.clone(), iv.hi - c[k]));
                    }
                    if iv.lo.is_finite() {
                        rows.push(Halfspace::new(a.iter().map(|v| -v).collect(), c[k] - iv.lo));
                    }
                }
                Some(Polyhedron::new(n, rows))
            }
            SetExpr::Product { factors } => {
                let n = self.dim();
                let mut out = Polyhedron::new(n, Vec::new());
                let mut off = 0;
                for s in factors {
                    let p = s.as_polyhedron()?;
                    out = out.intersect(&p.embed(n, off));
                    off += s.dim();
                }
                Some(out)
            }
            SetExpr::Intersection { members } => {
                let mut it = members.iter();
                let mut out = it.next()?.as_polyhedron()?;
                for s in it {
                    out = out.intersect(&s.as_polyhedron()?);
                }
                Some(out)
            }
            SetExpr::ComplementOpen { .. } => None,
        }
    }

    /// Tidies trivial output forms into boxes.
    pub fn simplified(self) -> SetExpr {
        match self {
            SetExpr::OutputForm(f) if f.input_dim == 0 => match (&f.map, &f.region) {
                (OutputMap::Identity { .. } | OutputMap::Monotone { .. }, Region::Inside(b)) => {
                    match f.map.preimage_box(b) {
                        Some(p) => SetExpr::boxed(p),
                        None => SetExpr::OutputForm(f),
                    }
                }
                _ => SetExpr::OutputForm(f),
            },
            other => other,
        }
    }

    /// `Π_x(M, W) = {ξ | ∃ω ∈ W, (ξ, ω) ∈ M}` for `M ⊆ ℝ^{n_x} × ℝ^{n_w}`.
    pub fn project_x(&self, n_x: usize, w: &BoxSet) -> Result<SetExpr, SetError> {
        let n_w = w.dim();
        if self.dim() != n_x + n_w {
            return Err(SetError::DimensionMismatch { expected: self.dim(), found: n_x + n_w });
        }
        if n_w == 0 {
            return Ok(self.clone());
        }
        if w.is_empty() {
            return Ok(SetExpr::boxed(BoxSet::empty(n_x)));
        }
        match self {
            SetExpr::Box { bounds } => {
                let (bx, bw) = bounds.split_at(n_x);
                if bw.intersect(w).is_empty() {
                    Ok(SetExpr::boxed(BoxSet::empty(n_x)))
                } else {
                    Ok(SetExpr::boxed(bx))
                }
            }
            SetExpr::Polyhedron(p) => {
                if !w.is_closed() {
                    return Err(SetError::UnsupportedVariant("polyhedral projection over a non-closed W".into()));
                }
                let with_w = p.intersect(&Polyhedron::from_box(w).embed(n_x + n_w, n_x));
                Ok(SetExpr::Polyhedron(with_w.eliminate_trailing(n_w)?))
            }
            SetExpr::OutputForm(f) if f.input_dim == n_w && f.map.input_dim() == n_x => {
                let region = match &f.region {
                    // h(ξ) + ω ∈ B for some ω ∈ W  ⇔  h(ξ) ∈ B − W
                    Region::Inside(b) => Region::Inside(b.minkowski_diff(w)),
                    // h(ξ) + ω ∉ B for some ω ∈ W  ⇔  h(ξ) ∉ B ⊖ W
                    Region::Outside(b) => Region::Outside(b.pontryagin_diff(w)),
                };
                Ok(SetExpr::OutputForm(OutputForm { map: f.map.clone(), input_dim: 0, region }).simplified())
            }
            SetExpr::Product { factors } => {
                let mut off = 0;
                let mut split = None;
                for (i, s) in factors.iter().enumerate() {
                    if off == n_x {
                        split = Some(i);
                        break;
                    }
                    off += s.dim();
                }
                let split = split.ok_or_else(|| SetError::UnsupportedVariant("product does not split at n_x".into()))?;
                let mut w_off = 0;
                for s in &factors[split..] {
                    let d = s.dim();
                    let SetExpr::Box { bounds } = s else {
                        return Err(SetError::UnsupportedVariant("non-box input factor".into()));
                    };
                    let part = BoxSet(w.axes()[w_off..w_off + d].to_vec());
                    if bounds.intersect(&part).is_empty() {
                        return Ok(SetExpr::boxed(BoxSet::empty(n_x)));
                    }
                    w_off += d;
                }
                let xs = factors[..split].to_vec();
                Ok(if xs.len() == 1 { xs.into_iter().next().unwrap() } else { SetExpr::Product { factors: xs } })
            }
            SetExpr::ComplementOpen { of } => match of.as_ref() {
                SetExpr::Box { bounds } => {
                    let (bx, bw) = bounds.split_at(n_x);
                    if !w.is_subset_of(&bw) {
                        Ok(SetExpr::boxed(BoxSet::whole(n_x)))
                    } else {
                        Ok(SetExpr::boxed(bx).complement())
                    }
                }
                SetExpr::OutputForm(_) => of.complement().project_x(n_x, w),
                _ => Err(SetError::UnsupportedVariant("projection of a general complement".into())),
            },
            _ => Err(SetError::UnsupportedVariant("projection of this set kind".into())),
        }
    }

    /// Grid-sampled inner/outer approximations of `Π_x(M, W)` at the given
    /// state points, for variants without an exact projection.
    pub fn project_x_sampled(&self, w: &BoxSet, points: &[Vec<f64>], per_axis: usize) -> SampledProjection {
        let grid = box_grid(w, per_axis.max(2));
        let spacing = w
            .axes()
            .iter()
            .map(|iv| if iv.is_bounded() { iv.width() / (per_axis.max(2) - 1) as f64 } else { f64::INFINITY })
            .fold(0.0f64, |a, b| a.hypot(b));
        let mut inner = Vec::with_capacity(points.len());
        let mut outer = Vec::with_capacity(points.len());
        for xi in points {
            let mut hit = false;
            let mut near = false;
            for om in &grid {
                let mut z = xi.clone();
                z.extend_from_slice(om);
                if self.contains(&z).unwrap_or(false) {
                    hit = true;
                    near = true;
                    break;
                }
                if let Ok(m) = self.margin(&z) {
                    near |= m <= spacing;
                }
            }
            inner.push(hit);
            outer.push(near);
        }
        SampledProjection { inner, outer, approximate: true }
    }
}

/// Per-point verdicts of [`SetExpr::project_x_sampled`]. `inner[i]` implies
/// membership; `!outer[i]` suggests non-membership.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledProjection {
    pub inner: Vec<bool>,
    pub outer: Vec<bool>,
    pub approximate: bool,
}

/// Tensor grid over a box; unbounded axes are sampled on `[-10, 10]`
/// clipped to the axis.
pub(crate) fn box_grid(b: &BoxSet, per_axis: usize) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = b
        .axes()
        .iter()
        .map(|iv| {
            if iv.is_empty() {
                return Vec::new();
            }
            let lo = if iv.lo.is_finite() { iv.lo } else { iv.hi.min(10.0) - 20.0 };
            let hi = if iv.hi.is_finite() { iv.hi } else { iv.lo.max(-10.0) + 20.0 };
            if lo == hi || per_axis < 2 {
                return vec![0.5 * (lo + hi)];
            }
            (0..per_axis)
                .map(|k| lo + (hi - lo) * k as f64 / (per_axis - 1) as f64)
                .filter(|v| iv.contains(*v))
                .collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for a in &axes {
        out = out.into_iter().flat_map(|p| a.iter().map(move |v| { let mut q = p.clone(); q.push(*v); q })).collect();
    }
    out
}

impl From<LinearError> for SetError {
    fn from(e: LinearError) -> Self {
        SetError::Linear(e)
    }
}
