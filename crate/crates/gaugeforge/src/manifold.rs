//! Circle geometry: arcs, closed covers with enlargements, sampled maps,
//! partitions of unity and near-identity diffeomorphisms.
//!
//! All per-arc data is sampled on one global uniform grid of the circle
//! (points j/N). An arc-domain map stores the contiguous index window of
//! grid points inside the arc, so overlapping arcs share sample points
//! bit-exactly: gluing and restriction are index operations, and overlap
//! agreement can be checked without interpolation error.
//!
//! Interpolation is 4-point Lagrange cubic (exact on polynomials of degree
//! ≤ 3); differentiation is 4th-order, with one-sided stencils near window
//! ends. Near-identity diffeomorphisms are stored as periodic displacement
//! fields u with g(x) = x + u(x) and sup|u'| ≤ 1/2, which makes Newton
//! inversion globally convergent.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{re, Mat};
use crate::tol;

/// Canonical representative in [0, 1).
pub fn wrap(x: f64) -> f64 {
    let y = x - x.floor();
    if y >= 1.0 {
        y - 1.0
    } else {
        y
    }
}

/// Signed distance from x to y along the circle, in (-1/2, 1/2].
pub fn signed_dist(from: f64, to: f64) -> f64 {
    let d = wrap(to - from);
    if d > 0.5 {
        d - 1.0
    } else {
        d
    }
}

/// A point on the circle of circumference 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub fn new(x: f64) -> Self {
        CirclePoint(wrap(x))
    }

    pub fn coord(&self) -> f64 {
        self.0
    }
}

/// A proper closed arc of the circle, diffeomorphic to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    start: f64,
    length: f64,
}

impl Arc {
    pub fn new(start: f64, length: f64) -> Result<Self> {
        if !(length > 0.0 && length < 1.0) {
            return Err(Error::Cover(format!(
                "arc length {length} must lie strictly between 0 and 1"
            )));
        }
        Ok(Arc {
            start: wrap(start),
            length,
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Unwrapped end coordinate (start + length, possibly ≥ 1).
    pub fn end(&self) -> f64 {
        self.start + self.length
    }

    pub fn midpoint(&self) -> f64 {
        wrap(self.start + self.length / 2.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        let d = wrap(x - self.start);
        d <= self.length + 1e-12 || d >= 1.0 - 1e-12
    }

    pub fn interior_contains(&self, x: f64) -> bool {
        let d = wrap(x - self.start);
        d > 1e-12 && d < self.length - 1e-12
    }

    /// Arc grown by `margin` on both sides.
    pub fn grown(&self, margin: f64) -> Result<Arc> {
        Arc::new(self.start - margin, self.length + 2.0 * margin)
    }

    /// Connected components of the intersection with another arc, sorted by
    /// start. Two arcs on the circle can meet in up to two components.
    pub fn overlap(&self, other: &Arc) -> Vec<Arc> {
        let mut out = Vec::new();
        let (a0, a1) = (self.start, self.end());
        for shift in [-1.0, 0.0, 1.0] {
            let b0 = other.start + shift;
            let b1 = other.end() + shift;
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if hi - lo > 1e-9 {
                let cand = Arc {
                    start: wrap(lo),
                    length: hi - lo,
                };
                if !out
                    .iter()
                    .any(|c: &Arc| signed_dist(c.start, cand.start).abs() < 1e-12)
                {
                    out.push(cand);
                }
            }
        }
        out.sort_by(|p, q| p.start.partial_cmp(&q.start).unwrap());
        out
    }
}

/// Domain of a trivializing chart: a proper arc, or the whole circle for the
/// degenerate single-chart cover of a trivial bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChartDomain {
    Full,
    Arc(Arc),
}

impl ChartDomain {
    pub fn contains(&self, x: f64) -> bool {
        match self {
            ChartDomain::Full => true,
            ChartDomain::Arc(a) => a.contains(x),
        }
    }

    pub fn interior_contains(&self, x: f64) -> bool {
        match self {
            ChartDomain::Full => true,
            ChartDomain::Arc(a) => a.interior_contains(x),
        }
    }

    pub fn as_arc(&self) -> Option<&Arc> {
        match self {
            ChartDomain::Full => None,
            ChartDomain::Arc(a) => Some(a),
        }
    }
}

/// One chart of a closed trivializing cover: the closed arc V̄ and its
/// enlargement Ū ⊇ V̄ on which sections and transition data extend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverChart {
    pub arc: ChartDomain,
    pub enlarged: ChartDomain,
}

/// Closed cover of the circle by arcs with enlargements, with all pairwise
/// and triple overlaps recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCover {
    charts: Vec<CoverChart>,
    margin: f64,
    pair_overlaps: BTreeMap<(usize, usize), Vec<Arc>>,
    enlarged_overlaps: BTreeMap<(usize, usize), Vec<Arc>>,
    triple_overlaps: Vec<(usize, usize, usize, Arc)>,
}

/// Equally spaced cover with the default margin.
pub fn build_cover(n_arcs: usize, arc_length: f64) -> Result<ClosedCover> {
    build_cover_with_margin(n_arcs, arc_length, tol::DEFAULT_MARGIN)
}

pub fn build_cover_with_margin(n_arcs: usize, arc_length: f64, margin: f64) -> Result<ClosedCover> {
    if n_arcs < 2 {
        return Err(Error::Cover(format!(
            "{n_arcs} arc(s) of length {arc_length} cannot cover the circle"
        )));
    }
    if !(arc_length > 0.0 && arc_length < 1.0) {
        return Err(Error::Cover(format!("arc length {arc_length} not in (0,1)")));
    }
    if n_arcs as f64 * arc_length <= 1.0 + 1e-12 {
        return Err(Error::Cover(format!(
            "{n_arcs} arcs of length {arc_length} do not cover: total {} <= 1",
            n_arcs as f64 * arc_length
        )));
    }
    let arcs: Vec<Arc> = (0..n_arcs)
        .map(|i| Arc::new(i as f64 / n_arcs as f64 - arc_length / 2.0, arc_length))
        .collect::<Result<_>>()?;
    ClosedCover::from_arcs(&arcs, margin)
}

impl ClosedCover {
    /// Cover from explicit arcs. Validates covering and the margin rule.
    pub fn from_arcs(arcs: &[Arc], margin: f64) -> Result<Self> {
        if margin <= 0.0 {
            return Err(Error::Cover(format!("margin {margin} must be positive")));
        }
        let charts: Vec<CoverChart> = arcs
            .iter()
            .map(|a| {
                Ok(CoverChart {
                    arc: ChartDomain::Arc(*a),
                    enlarged: ChartDomain::Arc(a.grown(margin).map_err(|_| {
                        Error::Cover(format!(
                            "arc of length {} with margin {margin} no longer proper",
                            a.length()
                        ))
                    })?),
                })
            })
            .collect::<Result<_>>()?;
        let cover = ClosedCover::assemble(charts, margin)?;
        cover.check_interiors_cover()?;
        Ok(cover)
    }

    /// The degenerate one-chart cover by the full circle. Only trivial
    /// bundles live over it; it exists so the exact single-chart cases of
    /// the extension construction can be exercised.
    pub fn single_chart() -> Self {
        ClosedCover {
            charts: vec![CoverChart {
                arc: ChartDomain::Full,
                enlarged: ChartDomain::Full,
            }],
            margin: tol::DEFAULT_MARGIN,
            pair_overlaps: BTreeMap::new(),
            enlarged_overlaps: BTreeMap::new(),
            triple_overlaps: Vec::new(),
        }
    }

    fn assemble(charts: Vec<CoverChart>, margin: f64) -> Result<Self> {
        let n = charts.len();
        let mut pair_overlaps = BTreeMap::new();
        let mut enlarged_overlaps = BTreeMap::new();
        let mut triple_overlaps = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let (ai, aj) = match (charts[i].arc.as_arc(), charts[j].arc.as_arc()) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(Error::Cover("full-circle chart in a multi-chart cover".into())),
                };
                let ov = ai.overlap(aj);
                if !ov.is_empty() {
                    pair_overlaps.insert((i, j), ov);
                }
                let (ei, ej) = (
                    charts[i].enlarged.as_arc().unwrap(),
                    charts[j].enlarged.as_arc().unwrap(),
                );
                let eov = ei.overlap(ej);
                if !eov.is_empty() {
                    enlarged_overlaps.insert((i, j), eov);
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                for l in (j + 1)..n {
                    if let (Some(ov_ij), Some(al)) =
                        (pair_overlaps.get(&(i, j)), charts[l].arc.as_arc())
                    {
                        for seg in ov_ij {
                            for t in seg.overlap(al) {
                                triple_overlaps.push((i, j, l, t));
                            }
                        }
                    }
                }
            }
        }
        Ok(ClosedCover {
            charts,
            margin,
            pair_overlaps,
            enlarged_overlaps,
            triple_overlaps,
        })
    }

    fn check_interiors_cover(&self) -> Result<()> {
        let probes = 4096;
        for j in 0..probes {
            let x = (j as f64 + 0.5) / probes as f64;
            if !self.charts.iter().any(|c| c.arc.interior_contains(x)) {
                return Err(Error::Cover(format!(
                    "open interiors do not cover the circle near x = {x:.5}"
                )));
            }
        }
        Ok(())
    }

    pub fn n_charts(&self) -> usize {
        self.charts.len()
    }

    pub fn chart(&self, i: usize) -> &CoverChart {
        &self.charts[i]
    }

    pub fn charts(&self) -> &[CoverChart] {
        &self.charts
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn is_single_chart(&self) -> bool {
        self.charts.len() == 1
    }

    /// V̄ᵢ ∩ V̄ⱼ components for i < j.
    pub fn pair_overlap(&self, i: usize, j: usize) -> &[Arc] {
        let key = if i < j { (i, j) } else { (j, i) };
        self.pair_overlaps.get(&key).map(|v| &v[..]).unwrap_or(&[])
    }

    /// Ūᵢ ∩ Ūⱼ components for i < j.
    pub fn enlarged_overlap(&self, i: usize, j: usize) -> &[Arc] {
        let key = if i < j { (i, j) } else { (j, i) };
        self.enlarged_overlaps
            .get(&key)
            .map(|v| &v[..])
            .unwrap_or(&[])
    }

    pub fn triple_overlaps(&self) -> &[(usize, usize, usize, Arc)] {
        &self.triple_overlaps
    }

    /// Lowest chart index whose closed arc contains x.
    pub fn canonical_chart(&self, x: f64) -> usize {
        self.charts
            .iter()
            .position(|c| c.arc.contains(x))
            .expect("closed arcs cover the circle")
    }

    /// Charts traversed once around the circle in increasing order of arc
    /// start, with the crossing point from each chart into the next. The
    /// crossing lies in the overlap segment where the current arc ends and
    /// the next has begun.
    pub fn loop_traversal(&self) -> Result<Vec<(usize, f64)>> {
        if self.is_single_chart() {
            return Ok(vec![(0, 0.0)]);
        }
        let mut order: Vec<usize> = (0..self.charts.len()).collect();
        order.sort_by(|&a, &b| {
            let sa = self.charts[a].arc.as_arc().unwrap().start();
            let sb = self.charts[b].arc.as_arc().unwrap().start();
            sa.partial_cmp(&sb).unwrap()
        });
        let mut out = Vec::with_capacity(order.len());
        for (pos, &i) in order.iter().enumerate() {
            let j = order[(pos + 1) % order.len()];
            let ai = self.charts[i].arc.as_arc().unwrap();
            let aj = self.charts[j].arc.as_arc().unwrap();
            let mut next_start = aj.start();
            let mut end_i = ai.end();
            if pos + 1 == order.len() {
                next_start += 1.0;
            }
            if end_i < next_start {
                end_i += 1.0;
            }
            if end_i < next_start {
                return Err(Error::Cover(format!(
                    "gap between arcs {i} and {j}: no crossing segment"
                )));
            }
            let crossing = wrap((next_start + end_i) / 2.0);
            out.push((i, crossing));
        }
        Ok(out)
    }

    /// Bisect every arc into two overlapping halves contained in the parent.
    /// Returns the refined cover and the child → parent map.
    pub fn bisect(&self) -> Result<(ClosedCover, Vec<usize>)> {
        if self.is_single_chart() {
            return Err(Error::Cover("cannot bisect the single-chart cover".into()));
        }
        let mut arcs = Vec::new();
        let mut parents = Vec::new();
        let mut child_margin = self.margin;
        for (i, c) in self.charts.iter().enumerate() {
            let a = c.arc.as_arc().unwrap();
            let d = a.length();
            arcs.push(Arc::new(a.start(), 0.55 * d)?);
            parents.push(i);
            arcs.push(Arc::new(a.start() + 0.45 * d, 0.55 * d)?);
            parents.push(i);
            child_margin = child_margin.min(0.1 * d);
        }
        let cover = ClosedCover::from_arcs(&arcs, child_margin)?;
        Ok((cover, parents))
    }
}

/// Values that can enter linear combinations: sample types for maps.
pub trait Value: Clone {
    fn lin_comb(terms: &[(f64, &Self)]) -> Self;
}

impl Value for f64 {
    fn lin_comb(terms: &[(f64, &Self)]) -> Self {
        terms.iter().map(|(c, v)| c * **v).sum()
    }
}

impl Value for Mat {
    fn lin_comb(terms: &[(f64, &Self)]) -> Self {
        let mut acc = terms[0].1 * re(terms[0].0);
        for (c, v) in &terms[1..] {
            acc += *v * re(*c);
        }
        acc
    }
}

/// Sampling domain of a map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// The full circle on the global grid: samples at j/n, periodic.
    Circle { n: usize },
    /// A contiguous window of the global circle grid: samples at
    /// (first + j)/n mod 1 for j = 0..len.
    Window { n: usize, first: usize, len: usize },
    /// A real interval with its own uniform sampling including endpoints
    /// (used for time paths).
    Interval { a: f64, b: f64, len: usize },
}

/// A sampled smooth map with cubic interpolation and 4th-order
/// differentiation.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledMap<T: Value> {
    domain: Domain,
    samples: Vec<T>,
}

/// Lagrange cubic weights for nodes {0, 1, 2, 3} evaluated at u.
fn lagrange4(u: f64) -> [f64; 4] {
    let mut w = [0.0; 4];
    for (k, wk) in w.iter_mut().enumerate() {
        let mut num = 1.0;
        let mut den = 1.0;
        for m in 0..4 {
            if m != k {
                num *= u - m as f64;
                den *= k as f64 - m as f64;
            }
        }
        *wk = num / den;
    }
    w
}

/// 4th-order finite-difference weights: derivative at 0 from nodes
/// offsets[k]·h.
fn fd5_weights(offsets: [i64; 5], h: f64) -> [f64; 5] {
    let x: Vec<f64> = offsets.iter().map(|&o| o as f64 * h).collect();
    let mut w = [0.0; 5];
    for (k, wk) in w.iter_mut().enumerate() {
        let mut den = 1.0;
        for j in 0..5 {
            if j != k {
                den *= x[k] - x[j];
            }
        }
        // L_k'(0) = sum over m != k of prod over j != k, m of (0 - x_j),
        // divided by the common denominator.
        let mut num = 0.0;
        for m in 0..5 {
            if m == k {
                continue;
            }
            let mut p = 1.0;
            for j in 0..5 {
                if j != k && j != m {
                    p *= -x[j];
                }
            }
            num += p;
        }
        *wk = num / den;
    }
    w
}

impl<T: Value> SampledMap<T> {
    pub fn on_circle(samples: Vec<T>) -> Result<Self> {
        if samples.len() < 32 {
            return Err(Error::GridTooCoarse(format!(
                "circle map needs at least 32 samples, got {}",
                samples.len()
            )));
        }
        Ok(SampledMap {
            domain: Domain::Circle { n: samples.len() },
            samples,
        })
    }

    pub fn on_window(n: usize, first: usize, samples: Vec<T>) -> Result<Self> {
        if n < 32 {
            return Err(Error::GridTooCoarse(format!(
                "global grid needs at least 32 points, got {n}"
            )));
        }
        if samples.len() < 8 {
            return Err(Error::GridTooCoarse(format!(
                "window map needs at least 8 samples, got {} (raise the grid size)",
                samples.len()
            )));
        }
        if samples.len() > n {
            return Err(Error::Invariant("window longer than the grid".into()));
        }
        Ok(SampledMap {
            domain: Domain::Window {
                n,
                first: first % n,
                len: samples.len(),
            },
            samples,
        })
    }

    pub fn on_interval(a: f64, b: f64, samples: Vec<T>) -> Result<Self> {
        if !(b > a) {
            return Err(Error::Invariant(format!("empty interval [{a}, {b}]")));
        }
        if samples.len() < 4 {
            return Err(Error::GridTooCoarse(format!(
                "interval map needs at least 4 samples, got {}",
                samples.len()
            )));
        }
        Ok(SampledMap {
            domain: Domain::Interval {
                a,
                b,
                len: samples.len(),
            },
            samples,
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn sample(&self, j: usize) -> &T {
        &self.samples[j]
    }

    /// Grid spacing.
    pub fn spacing(&self) -> f64 {
        match self.domain {
            Domain::Circle { n } | Domain::Window { n, .. } => 1.0 / n as f64,
            Domain::Interval { a, b, len } => (b - a) / (len - 1) as f64,
        }
    }

    /// Coordinate of sample j.
    pub fn position(&self, j: usize) -> f64 {
        match self.domain {
            Domain::Circle { n } => j as f64 / n as f64,
            Domain::Window { n, first, .. } => wrap((first + j) as f64 / n as f64),
            Domain::Interval { a, b, len } => a + (b - a) * j as f64 / (len - 1) as f64,
        }
    }

    /// Map position in fractional index units (samples at integers 0..len).
    fn index_coord(&self, x: f64) -> f64 {
        match self.domain {
            Domain::Circle { n } => wrap(x) * n as f64,
            Domain::Window { n, first, len } => {
                let d = wrap(x - first as f64 / n as f64) * n as f64;
                // Allow a whisker of extrapolation beyond the window for
                // evaluation between the arc boundary and the closest grid
                // point, and tolerate wrap-around dust at the left end.
                if d > len as f64 {
                    let back = d - n as f64;
                    debug_assert!(
                        back > -1.5,
                        "evaluation {back:.3} cells left of window start"
                    );
                    back
                } else {
                    d
                }
            }
            Domain::Interval { a, b, len } => (x - a) / (b - a) * (len - 1) as f64,
        }
    }

    fn periodic(&self) -> bool {
        matches!(self.domain, Domain::Circle { .. })
    }

    /// Cubic Lagrange interpolation.
    pub fn eval(&self, x: f64) -> T {
        let len = self.samples.len();
        let d = self.index_coord(x);
        if self.periodic() {
            let j = d.floor() as i64;
            let base = j - 1;
            let u = d - base as f64;
            let w = lagrange4(u);
            let n = len as i64;
            let idx = |k: i64| (((base + k) % n + n) % n) as usize;
            let terms: Vec<(f64, &T)> = (0..4).map(|k| (w[k as usize], &self.samples[idx(k)])).collect();
            T::lin_comb(&terms)
        } else {
            let base = ((d.floor() as i64) - 1).clamp(0, len as i64 - 4) as usize;
            let u = d - base as f64;
            let w = lagrange4(u);
            let terms: Vec<(f64, &T)> =
                (0..4).map(|k| (w[k], &self.samples[base + k])).collect();
            T::lin_comb(&terms)
        }
    }

    /// Derivative at sample j by a 4th-order stencil on raw samples.
    fn derivative_sample(&self, j: usize) -> T {
        let len = self.samples.len() as i64;
        let h = self.spacing();
        let jj = j as i64;
        if self.periodic() {
            let offsets = [-2i64, -1, 1, 2];
            let coeff = [1.0, -8.0, 8.0, -1.0];
            let terms: Vec<(f64, &T)> = offsets
                .iter()
                .zip(coeff.iter())
                .map(|(&o, &c)| {
                    let idx = (((jj + o) % len + len) % len) as usize;
                    (c / (12.0 * h), &self.samples[idx])
                })
                .collect();
            T::lin_comb(&terms)
        } else {
            let shift = if jj < 2 {
                -jj
            } else if jj > len - 3 {
                len - 1 - jj - 4
            } else {
                -2
            };
            let offsets = [shift, shift + 1, shift + 2, shift + 3, shift + 4];
            let w = fd5_weights(offsets, h);
            let terms: Vec<(f64, &T)> = offsets
                .iter()
                .zip(w.iter())
                .map(|(&o, &c)| (c, &self.samples[(jj + o) as usize]))
                .collect();
            T::lin_comb(&terms)
        }
    }

    /// Derivative map on the same domain.
    pub fn derivative(&self) -> SampledMap<T> {
        let samples = (0..self.samples.len())
            .map(|j| self.derivative_sample(j))
            .collect();
        SampledMap {
            domain: self.domain,
            samples,
        }
    }

    /// Derivative at an arbitrary point: 4th-order finite differences of the
    /// interpolant, the stencil shifted inward near window/interval ends.
    pub fn derivative_at(&self, x: f64) -> T {
        let h = self.spacing();
        let len = self.samples.len() as f64;
        let d = self.index_coord(x);
        let shift: i64 = if self.periodic() {
            -2
        } else if d < 2.0 {
            -(d.floor().max(0.0) as i64)
        } else if d > len - 3.0 {
            ((len - 1.0 - d).floor() as i64) - 4
        } else {
            -2
        };
        let offsets = [shift, shift + 1, shift + 2, shift + 3, shift + 4];
        let w = fd5_weights(offsets, h);
        let vals: Vec<T> = offsets
            .iter()
            .map(|&o| self.eval(x + o as f64 * h))
            .collect();
        let terms: Vec<(f64, &T)> = w.iter().copied().zip(vals.iter()).collect();
        T::lin_comb(&terms)
    }

    pub fn map<U: Value>(&self, f: impl Fn(&T) -> U) -> SampledMap<U> {
        SampledMap {
            domain: self.domain,
            samples: self.samples.iter().map(f).collect(),
        }
    }

    pub fn map_indexed<U: Value>(&self, f: impl Fn(usize, f64, &T) -> U) -> SampledMap<U> {
        SampledMap {
            domain: self.domain,
            samples: self
                .samples
                .iter()
                .enumerate()
                .map(|(j, v)| f(j, self.position(j), v))
                .collect(),
        }
    }

    pub fn zip<U: Value, V: Value>(
        &self,
        other: &SampledMap<U>,
        f: impl Fn(&T, &U) -> V,
    ) -> Result<SampledMap<V>> {
        if self.domain != other.domain {
            return Err(Error::Mismatch("zip of maps on different domains".into()));
        }
        Ok(SampledMap {
            domain: self.domain,
            samples: self
                .samples
                .iter()
                .zip(other.samples.iter())
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    /// Extract a sub-window (grid indices must be contained in this map's
    /// window); exact, no interpolation.
    pub fn subwindow(&self, first: usize, len: usize) -> Result<SampledMap<T>> {
        let (n, my_first, my_len) = match self.domain {
            Domain::Window { n, first, len } => (n, first, len),
            Domain::Circle { n } => (n, 0, n),
            Domain::Interval { .. } => {
                return Err(Error::Mismatch("subwindow of an interval map".into()))
            }
        };
        let offset = ((first + n) - my_first) % n;
        if matches!(self.domain, Domain::Window { .. }) && offset + len > my_len {
            return Err(Error::Mismatch(format!(
                "subwindow [{first}, +{len}) not contained in [{my_first}, +{my_len})"
            )));
        }
        let samples = (0..len)
            .map(|j| self.samples[(offset + j) % self.samples.len()].clone())
            .collect();
        SampledMap::on_window(n, first, samples)
    }
}

impl SampledMap<f64> {
    pub fn sup_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Grid index window of the points of the global grid lying in an arc.
/// Returns (first index, count); indices run modulo n.
pub fn window_for_arc(n: usize, arc: &Arc) -> (usize, usize) {
    let nf = n as f64;
    let jmin = ((arc.start() - 1e-12) * nf).ceil() as i64;
    let jmax = ((arc.end() + 1e-12) * nf).floor() as i64;
    let len = ((jmax - jmin + 1).max(0) as usize).min(n);
    let first = ((jmin % n as i64 + n as i64) % n as i64) as usize;
    (first, len)
}

/// Window for a chart domain: the full grid for `ChartDomain::Full`.
pub fn window_for_domain(n: usize, dom: &ChartDomain) -> (usize, usize) {
    match dom {
        ChartDomain::Full => (0, n),
        ChartDomain::Arc(a) => window_for_arc(n, a),
    }
}

/// Sample a function on the grid points of a chart domain.
pub fn sample_domain<T: Value>(
    n: usize,
    dom: &ChartDomain,
    f: impl Fn(f64) -> T,
) -> Result<SampledMap<T>> {
    let (first, len) = window_for_domain(n, dom);
    let samples: Vec<T> = (0..len)
        .map(|j| f(wrap((first + j) as f64 / n as f64)))
        .collect();
    match dom {
        ChartDomain::Full => SampledMap::on_circle(samples),
        ChartDomain::Arc(_) => SampledMap::on_window(n, first, samples),
    }
}

/// Smooth partition of unity subordinate to the open cover: plateau bumps
/// exp(-1/(t(1-t))) per arc, renormalized by their sum. Supports are exactly
/// inside the open arcs; the sum is 1 at every grid point up to rounding.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    bumps: Vec<SampledMap<f64>>,
}

fn plateau(t: f64) -> f64 {
    if t > 0.0 && t < 1.0 {
        (-1.0 / (t * (1.0 - t))).exp()
    } else {
        0.0
    }
}

pub fn partition_of_unity(cover: &ClosedCover, n: usize) -> Result<PartitionOfUnity> {
    if cover.is_single_chart() {
        let ones = vec![1.0; n];
        return Ok(PartitionOfUnity {
            bumps: vec![SampledMap::on_circle(ones)?],
        });
    }
    let raw: Vec<Vec<f64>> = cover
        .charts()
        .iter()
        .map(|c| {
            let a = c.arc.as_arc().unwrap();
            (0..n)
                .map(|j| {
                    let x = j as f64 / n as f64;
                    plateau(wrap(x - a.start()) / a.length())
                })
                .collect()
        })
        .collect();
    let mut bumps = Vec::with_capacity(raw.len());
    for i in 0..raw.len() {
        let mut vals = Vec::with_capacity(n);
        for j in 0..n {
            let total: f64 = raw.iter().map(|b| b[j]).sum();
            if total <= 0.0 {
                return Err(Error::Cover(format!(
                    "partition of unity undefined at grid point {j}: interiors do not cover"
                )));
            }
            vals.push(raw[i][j] / total);
        }
        bumps.push(SampledMap::on_circle(vals)?);
    }
    Ok(PartitionOfUnity { bumps })
}

impl PartitionOfUnity {
    pub fn n_bumps(&self) -> usize {
        self.bumps.len()
    }

    pub fn bump(&self, i: usize) -> &SampledMap<f64> {
        &self.bumps[i]
    }

    pub fn grid_n(&self) -> usize {
        self.bumps[0].len()
    }
}

/// Near-identity circle diffeomorphism g(x) = x + u(x), stored by its
/// periodic displacement field. sup|u'| ≤ 1/2 guarantees bijectivity.
#[derive(Debug, Clone, PartialEq)]
pub struct Diffeo {
    displacement: SampledMap<f64>,
}

impl Diffeo {
    pub fn identity(n: usize) -> Self {
        Diffeo {
            displacement: SampledMap::on_circle(vec![0.0; n]).expect("n >= 32"),
        }
    }

    pub fn rotation(n: usize, c: f64) -> Self {
        Diffeo {
            displacement: SampledMap::on_circle(vec![c; n]).expect("n >= 32"),
        }
    }

    pub fn field(&self) -> &SampledMap<f64> {
        &self.displacement
    }

    pub fn grid_n(&self) -> usize {
        self.displacement.len()
    }

    pub fn sup_displacement(&self) -> f64 {
        self.displacement.sup_abs()
    }

    pub fn sup_slope(&self) -> f64 {
        self.displacement.derivative().sup_abs()
    }

    pub fn apply(&self, x: f64) -> f64 {
        wrap(x + self.displacement.eval(x))
    }

    /// Exact at grid points: no interpolation.
    pub fn apply_grid(&self, j: usize) -> f64 {
        wrap(self.displacement.position(j) + self.displacement.samples()[j])
    }
}

/// Chart of the diffeomorphism group near the identity: a displacement field
/// X becomes the diffeomorphism x ↦ x + X(x) (the exponential of the flat
/// metric is addition). Fails if the bijectivity bound is violated.
pub fn diffeo_from_field(field: SampledMap<f64>) -> Result<Diffeo> {
    if !matches!(field.domain(), Domain::Circle { .. }) {
        return Err(Error::Mismatch(
            "diffeomorphism field must live on the full circle".into(),
        ));
    }
    let slope = field.derivative().sup_abs();
    if slope > tol::SUP_SLOPE {
        return Err(Error::Bijectivity(format!(
            "sup|u'| = {slope:.4} exceeds {}",
            tol::SUP_SLOPE
        )));
    }
    Ok(Diffeo {
        displacement: field,
    })
}

/// Inverse of the chart: the displacement field of a near-identity
/// diffeomorphism.
pub fn field_from_diffeo(g: &Diffeo) -> SampledMap<f64> {
    g.displacement.clone()
}

/// Composition (g ∘ h)(x) = g(h(x)), resampled on the grid.
pub fn compose(g: &Diffeo, h: &Diffeo) -> Result<Diffeo> {
    if g.grid_n() != h.grid_n() {
        return Err(Error::Mismatch("composition across grids".into()));
    }
    let n = g.grid_n();
    let samples: Vec<f64> = (0..n)
        .map(|j| {
            let x = j as f64 / n as f64;
            let hu = h.displacement.samples()[j];
            hu + g.displacement.eval(x + hu)
        })
        .collect();
    diffeo_from_field(SampledMap::on_circle(samples)?)
}

/// Numerical inverse by per-grid-point Newton iteration. The bijectivity
/// bound makes the iteration globally convergent; failure to converge is
/// reported, never silently accepted.
pub fn invert(g: &Diffeo) -> Result<Diffeo> {
    let n = g.grid_n();
    let du = g.displacement.derivative();
    let samples: Vec<f64> = (0..n)
        .map(|j| {
            let x = j as f64 / n as f64;
            newton_preimage(g, &du, x).map(|z| z - x)
        })
        .collect::<Result<_>>()?;
    diffeo_from_field(SampledMap::on_circle(samples)?)
}

/// Solve z + u(z) = x for z (unwrapped, near x).
fn newton_preimage(g: &Diffeo, du: &SampledMap<f64>, x: f64) -> Result<f64> {
    let mut z = x - g.displacement.eval(x);
    for _ in 0..60 {
        let r = z + g.displacement.eval(z) - x;
        if r.abs() < 1e-15 {
            return Ok(z);
        }
        z -= r / (1.0 + du.eval(z));
    }
    let r = z + g.displacement.eval(z) - x;
    if r.abs() < 1e-12 {
        Ok(z)
    } else {
        Err(Error::Newton(format!(
            "residual {r:.3e} at x = {x:.6} after 60 iterations"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sin_field(n: usize, amp: f64, freq: f64, phase: f64) -> SampledMap<f64> {
        let samples = (0..n)
            .map(|j| {
                let x = j as f64 / n as f64;
                amp * (2.0 * std::f64::consts::PI * (freq * x + phase)).sin()
            })
            .collect();
        SampledMap::on_circle(samples).unwrap()
    }

    #[test]
    fn build_cover_three_arcs_overlap_lengths() {
        let cover = build_cover(3, 0.45).unwrap();
        assert_eq!(cover.n_charts(), 3);
        // Interval arithmetic oracle: consecutive overlap length is
        // arc_length - 1/3.
        let expected = 0.45 - 1.0 / 3.0;
        for (i, j) in [(0usize, 1usize), (1, 2), (0, 2)] {
            let ov = cover.pair_overlap(i, j);
            assert_eq!(ov.len(), 1, "({i},{j})");
            assert!((ov[0].length() - expected).abs() < 1e-12);
        }
        assert!(cover.triple_overlaps().is_empty());
    }

    #[test]
    fn build_cover_two_arcs_has_two_overlap_components() {
        let cover = build_cover(2, 0.6).unwrap();
        let ov = cover.pair_overlap(0, 1);
        assert_eq!(ov.len(), 2);
        for seg in ov {
            assert!((seg.length() - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn build_cover_rejects_impossible_parameters() {
        assert!(matches!(build_cover(1, 0.5), Err(Error::Cover(_))));
        assert!(matches!(build_cover(2, 0.4), Err(Error::Cover(_))));
        assert!(matches!(build_cover(3, 1.2), Err(Error::Cover(_))));
    }

    #[test]
    fn partition_of_unity_sums_to_one_and_respects_supports() {
        let n = 512;
        let cover = build_cover(2, 0.6).unwrap();
        let pou = partition_of_unity(&cover, n).unwrap();
        for j in 0..n {
            let x = j as f64 / n as f64;
            let total: f64 = (0..2).map(|i| pou.bump(i).samples()[j]).sum();
            assert!((total - 1.0).abs() <= tol::POU_SUM);
            for i in 0..2 {
                let f = pou.bump(i).samples()[j];
                assert!(f >= 0.0);
                let arc = cover.chart(i).arc.as_arc().unwrap();
                if !arc.interior_contains(x) {
                    assert_eq!(f, 0.0, "bump {i} nonzero outside its arc at {x}");
                }
                // Interior to exactly one arc: that bump is 1.
                let other = cover.chart(1 - i).arc.as_arc().unwrap();
                if arc.interior_contains(x) && !other.contains(x) {
                    assert!((f - 1.0).abs() <= tol::POU_SUM);
                }
            }
        }
    }

    #[test]
    fn cubic_interpolation_reproduces_cubics_on_a_window() {
        let n = 64;
        let arc = Arc::new(0.37, 0.4).unwrap();
        let p = |x: f64| 1.0 + 2.0 * x - 3.0 * x * x + 0.5 * x * x * x;
        let m = sample_domain(n, &ChartDomain::Arc(arc), p).unwrap();
        // The arc [0.37, 0.77] does not wrap, so p can be compared directly.
        for k in 0..200 {
            let x = arc.start() + arc.length() * (k as f64 + 0.31) / 200.0;
            assert!((m.eval(x) - p(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_of_sine_is_accurate_at_512() {
        let n = 512;
        let f = sin_field(n, 1.0, 1.0, 0.0);
        let df = f.derivative();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            let x = j as f64 / n as f64;
            let exact = 2.0 * std::f64::consts::PI * (2.0 * std::f64::consts::PI * x).cos();
            worst = worst.max((df.samples()[j] - exact).abs());
        }
        assert!(worst <= 1e-8, "max derivative error {worst:.3e}");
    }

    #[test]
    fn compose_with_identity_and_rotations() {
        let n = 128;
        let h = diffeo_from_field(sin_field(n, 0.01, 1.0, 0.3)).unwrap();
        let id = Diffeo::identity(n);
        let c = compose(&id, &h).unwrap();
        for j in 0..n {
            assert!((c.field().samples()[j] - h.field().samples()[j]).abs() < 1e-12);
        }
        let ra = Diffeo::rotation(n, 0.05);
        let rb = Diffeo::rotation(n, 0.08);
        let rc = compose(&ra, &rb).unwrap();
        for j in 0..n {
            assert!((rc.field().samples()[j] - 0.13).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_undoes_sine_perturbation() {
        let n = 512;
        let g = diffeo_from_field(sin_field(n, 0.01, 1.0, 0.0)).unwrap();
        let ginv = invert(&g).unwrap();
        let comp = compose(&g, &ginv).unwrap();
        assert!(comp.sup_displacement() <= tol::DIFFEO);
        // Per-point Newton oracle on off-grid points.
        for k in 0..37 {
            let x = (k as f64 + 0.21) / 37.0;
            let y = g.apply(ginv.apply(x));
            assert!(signed_dist(x, y).abs() <= tol::DIFFEO);
        }
        assert!(invert(&Diffeo::identity(n)).unwrap().sup_displacement() < 1e-14);
        let r = invert(&Diffeo::rotation(n, 0.2)).unwrap();
        for j in 0..n {
            assert!((r.field().samples()[j] + 0.2).abs() < 1e-10);
        }
    }

    #[test]
    fn chart_bijection_between_fields_and_diffeos() {
        let n = 128;
        let x0 = sin_field(n, 0.0, 1.0, 0.0);
        let id = diffeo_from_field(x0).unwrap();
        assert_eq!(id.sup_displacement(), 0.0);

        let xc = SampledMap::on_circle(vec![0.2; n]).unwrap();
        let rot = diffeo_from_field(xc).unwrap();
        for j in 0..n {
            assert_eq!(rot.field().samples()[j], 0.2);
        }

        let f = sin_field(n, 0.02, 2.0, 0.11);
        let g = diffeo_from_field(f.clone()).unwrap();
        let back = field_from_diffeo(&g);
        for j in 0..n {
            assert_eq!(back.samples()[j], f.samples()[j]);
        }
        // Fixed points exactly where the field vanishes on the grid.
        for j in 0..n {
            if f.samples()[j] == 0.0 {
                assert_eq!(g.apply_grid(j), wrap(j as f64 / n as f64));
            }
        }
        // Bound violation rejected.
        let steep = sin_field(n, 0.2, 1.0, 0.0);
        assert!(matches!(
            diffeo_from_field(steep),
            Err(Error::Bijectivity(_))
        ));
    }

    #[test]
    fn loop_traversal_visits_every_chart_once() {
        for (n_arcs, len) in [(2usize, 0.6), (3, 0.45), (4, 0.3), (3, 0.72)] {
            let cover = build_cover(n_arcs, len).unwrap();
            let trav = cover.loop_traversal().unwrap();
            assert_eq!(trav.len(), n_arcs);
            let mut seen: Vec<usize> = trav.iter().map(|(i, _)| *i).collect();
            seen.sort_unstable();
            assert_eq!(seen, (0..n_arcs).collect::<Vec<_>>());
            for (pos, (i, c)) in trav.iter().enumerate() {
                let j = trav[(pos + 1) % trav.len()].0;
                assert!(cover.chart(*i).arc.contains(*c));
                assert!(cover.chart(j).arc.contains(*c));
            }
        }
    }

    #[test]
    fn bisect_children_stay_inside_parents() {
        let cover = build_cover(3, 0.6).unwrap();
        let (fine, parents) = cover.bisect().unwrap();
        assert_eq!(fine.n_charts(), 6);
        for (child, &p) in parents.iter().enumerate() {
            let ca = fine.chart(child).arc.as_arc().unwrap();
            let pa = cover.chart(p).arc.as_arc().unwrap();
            assert!(pa.contains(ca.start()));
            assert!(pa.contains(wrap(ca.end())));
            let ce = fine.chart(child).enlarged.as_arc().unwrap();
            let pe = cover.chart(p).enlarged.as_arc().unwrap();
            assert!(pe.contains(ce.start()));
            assert!(pe.contains(wrap(ce.end())));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        /// Composition of near-identity diffeomorphisms is associative on
        /// the grid to interpolation accuracy.
        #[test]
        fn compose_is_associative(
            a1 in -0.004f64..0.004, p1 in 0.0f64..1.0,
            a2 in -0.004f64..0.004, p2 in 0.0f64..1.0,
            a3 in -0.004f64..0.004, p3 in 0.0f64..1.0,
        ) {
            let n = 256;
            let g = diffeo_from_field(sin_field(n, a1, 1.0, p1)).unwrap();
            let h = diffeo_from_field(sin_field(n, a2, 2.0, p2)).unwrap();
            let k = diffeo_from_field(sin_field(n, a3, 1.0, p3)).unwrap();
            let lhs = compose(&compose(&g, &h).unwrap(), &k).unwrap();
            let rhs = compose(&g, &compose(&h, &k).unwrap()).unwrap();
            let mut worst: f64 = 0.0;
            for j in 0..n {
                worst = worst.max(
                    (lhs.field().samples()[j] - rhs.field().samples()[j]).abs(),
                );
            }
            prop_assert!(worst <= 1e-7, "associativity defect {worst:.3e}");
        }

        /// Round trip diffeo -> field -> diffeo is the identity on samples.
        #[test]
        fn field_roundtrip_is_exact(a in -0.01f64..0.01, p in 0.0f64..1.0) {
            let n = 128;
            let f = sin_field(n, a, 1.0, p);
            let g = diffeo_from_field(f.clone()).unwrap();
            let f2 = field_from_diffeo(&g);
            for j in 0..n {
                prop_assert_eq!(f.samples()[j], f2.samples()[j]);
            }
        }
    }
}
