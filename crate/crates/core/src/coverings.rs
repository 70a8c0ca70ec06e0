//! Greedy coverings by metric balls, disjointly supported partitions and
//! `l_p(L_q)` decomposition norms.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use statrs::function::gamma::gamma;

use crate::error::{invalid, Error, Result};

/// Homogeneous spaces with a left-invariant metric satisfying
/// `|B(x, r)| = |B(e, 1)| r^delta` for Lebesgue measure.
#[derive(Debug, Clone, PartialEq)]
pub enum CoverSpace {
    /// `R^d` with the Euclidean metric.
    Euclidean(usize),
    /// `R^d` with dilation weights `w` and metric `sum_j |x_j - y_j|^{1/w_j}`.
    Graded(Vec<u32>),
    /// First Heisenberg group in exponential coordinates with the
    /// Cygan-Koranyi metric `((x^2 + y^2)^2 + 16 t^2)^{1/4}` of `a^{-1} b`.
    Heisenberg,
}

impl CoverSpace {
    pub fn dim(&self) -> usize {
        match self {
            CoverSpace::Euclidean(d) => *d,
            CoverSpace::Graded(w) => w.len(),
            CoverSpace::Heisenberg => 3,
        }
    }

    /// Exponent of the ball-volume power law.
    pub fn delta(&self) -> f64 {
        match self {
            CoverSpace::Euclidean(d) => *d as f64,
            CoverSpace::Graded(w) => w.iter().sum::<u32>() as f64,
            CoverSpace::Heisenberg => 4.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CoverSpace::Euclidean(0) => invalid("dimension must be positive"),
            CoverSpace::Graded(w) if w.is_empty() || w.contains(&0) => invalid("weights must be positive"),
            CoverSpace::Graded(w) if !w.contains(&1) => invalid("at least one coordinate needs weight 1"),
            _ => Ok(()),
        }
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            CoverSpace::Euclidean(_) => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
            CoverSpace::Graded(w) => a.iter().zip(b).zip(w).map(|((x, y), &wj)| (x - y).abs().powf(1.0 / wj as f64)).sum(),
            CoverSpace::Heisenberg => {
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let dt = b[2] - a[2] - 0.5 * (a[0] * b[1] - a[1] * b[0]);
                let r2 = dx * dx + dy * dy;
                (r2 * r2 + 16.0 * dt * dt).sqrt().sqrt()
            }
        }
    }

    /// Lebesgue volume of the unit ball.
    pub fn unit_ball_volume(&self) -> f64 {
        match self {
            CoverSpace::Euclidean(d) => PI.powf(*d as f64 / 2.0) / gamma(*d as f64 / 2.0 + 1.0),
            CoverSpace::Graded(w) => {
                let n = w.len() as i32;
                2f64.powi(n) * w.iter().map(|&wj| gamma(wj as f64 + 1.0)).product::<f64>() / gamma(self.delta() + 1.0)
            }
            CoverSpace::Heisenberg => PI * PI / 8.0,
        }
    }

    /// Factor turning Lebesgue measure into the measure with `mu(B(x, r)) = r^delta`.
    pub fn haar_constant(&self) -> f64 {
        1.0 / self.unit_ball_volume()
    }

    /// Homogeneous degree of coordinate `axis`.
    pub fn axis_degree(&self, axis: usize) -> i32 {
        match self {
            CoverSpace::Euclidean(_) => 1,
            CoverSpace::Graded(w) => w[axis] as i32,
            CoverSpace::Heisenberg => if axis == 2 { 2 } else { 1 },
        }
    }

    /// Coordinates with `|a_j - b_j| <= d(a, b)`, used for bucketing.
    fn bucket_axes(&self) -> Vec<usize> {
        match self {
            CoverSpace::Euclidean(d) => (0..(*d).min(2)).collect(),
            CoverSpace::Graded(w) => w.iter().enumerate().filter(|(_, &wj)| wj == 1).map(|(j, _)| j).take(2).collect(),
            CoverSpace::Heisenberg => vec![0, 1],
        }
    }
}

/// Bucket index over the degree-one coordinates for radius queries.
struct NeighborIndex<'a> {
    space: &'a CoverSpace,
    axes: Vec<usize>,
    cell: f64,
    points: Vec<&'a [f64]>,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

impl<'a> NeighborIndex<'a> {
    fn new(space: &'a CoverSpace, cell: f64) -> Self {
        NeighborIndex { space, axes: space.bucket_axes(), cell, points: Vec::new(), buckets: HashMap::new() }
    }

    fn key(&self, x: &[f64]) -> Vec<i64> {
        self.axes.iter().map(|&j| (x[j] / self.cell).floor() as i64).collect()
    }

    fn insert(&mut self, x: &'a [f64]) {
        let k = self.key(x);
        self.buckets.entry(k).or_default().push(self.points.len());
        self.points.push(x);
    }

    /// Indices with `d(x, p) < r` for `r <= cell`, with their distances.
    fn within(&self, x: &[f64], r: f64) -> Vec<(usize, f64)> {
        let base = self.key(x);
        let mut out = Vec::new();
        let mut offset = vec![-1i64; base.len()];
        loop {
            let k: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
            if let Some(ids) = self.buckets.get(&k) {
                for &i in ids {
                    let d = self.space.distance(self.points[i], x);
                    if d < r {
                        out.push((i, d));
                    }
                }
            }
            let mut j = 0;
            while j < offset.len() {
                offset[j] += 1;
                if offset[j] <= 1 {
                    break;
                }
                offset[j] = -1;
                j += 1;
            }
            if j == offset.len() {
                break;
            }
        }
        out.sort_by_key(|p| p.0);
        out
    }
}

/// `f` over the covering centers, in parallel when available.
fn map_centers<T: Send>(centers: &[Vec<f64>], f: impl Fn(&Vec<f64>) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        centers.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        centers.iter().map(f).collect()
    }
}

/// Tensor grid of cell midpoints on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub n: Vec<usize>,
}

impl SampleGrid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, n: Vec<usize>) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() != n.len() || lo.is_empty() {
            return invalid("grid bounds and sizes must have matching dimensions");
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) || n.contains(&0) {
            return invalid("grid needs lo < hi and at least one point per axis");
        }
        Ok(SampleGrid { lo, hi, n })
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / self.n[axis] as f64
    }

    pub fn max_spacing(&self) -> f64 {
        (0..self.n.len()).map(|j| self.spacing(j)).fold(0.0, f64::max)
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.n.len()).map(|j| self.spacing(j)).product()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        let total: usize = self.n.iter().product();
        (0..total)
            .map(|mut idx| {
                (0..self.n.len())
                    .map(|j| {
                        let k = idx % self.n[j];
                        idx /= self.n[j];
                        self.lo[j] + (k as f64 + 0.5) * self.spacing(j)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Bounded subsets of coordinate space.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Union(Vec<Region>),
}

impl Region {
    pub fn empty() -> Self {
        Region::Union(Vec::new())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *a <= *v && *v <= *b),
            Region::Union(parts) => parts.iter().any(|r| r.contains(x)),
        }
    }

    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            Region::Box { lo, hi } => Some((lo.clone(), hi.clone())),
            Region::Union(parts) => parts.iter().filter_map(|r| r.bounding_box()).reduce(|(l1, h1), (l2, h2)| {
                (l1.iter().zip(&l2).map(|(a, b)| a.min(*b)).collect(), h1.iter().zip(&h2).map(|(a, b)| a.max(*b)).collect())
            }),
        }
    }

    /// Union of one to three random boxes inside `[0, extent]^dim`.
    pub fn random<R: Rng>(dim: usize, extent: f64, rng: &mut R) -> Self {
        let parts = rng.random_range(1..=3);
        Region::Union(
            (0..parts)
                .map(|_| {
                    let mut lo = Vec::with_capacity(dim);
                    let mut hi = Vec::with_capacity(dim);
                    for _ in 0..dim {
                        let a = rng.random_range(0.0..0.6 * extent);
                        let b = rng.random_range(a + 0.2 * extent..=extent);
                        lo.push(a);
                        hi.push(b);
                    }
                    Region::Box { lo, hi }
                })
                .collect(),
        )
    }

    /// Grid midpoints of the bounding box that lie in the region.
    pub fn sample(&self, per_axis: usize) -> Vec<Vec<f64>> {
        match self.bounding_box() {
            None => Vec::new(),
            Some((lo, hi)) => {
                let d = lo.len();
                let hi = hi.iter().zip(&lo).map(|(h, l)| if h > l { *h } else { l + 1e-9 }).collect();
                match SampleGrid::new(lo, hi, vec![per_axis.max(1); d]) {
                    Ok(g) => g.points().into_iter().filter(|x| self.contains(x)).collect(),
                    Err(_) => Vec::new(),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Covering {
    pub space: CoverSpace,
    pub centers: Vec<Vec<f64>>,
    pub radius: f64,
    pub delta: f64,
    pub haar_constant: f64,
}

/// Maximal `eps`-separated subset of `points` taken in order. Every point
/// lies within `eps` of a center and the balls `B(x_i, eps/2)` are disjoint.
pub fn greedy_cover(space: &CoverSpace, points: &[Vec<f64>], eps: f64) -> Result<Covering> {
    space.validate()?;
    if !(eps > 0.0) || !eps.is_finite() {
        return invalid("covering radius must be positive");
    }
    if points.iter().any(|p| p.len() != space.dim()) {
        return invalid("sample points do not match the space dimension");
    }
    let mut index = NeighborIndex::new(space, eps);
    let mut chosen = Vec::new();
    for p in points {
        if index.within(p, eps).is_empty() {
            index.insert(p);
            chosen.push(p.clone());
        }
    }
    Ok(Covering { space: space.clone(), centers: chosen, radius: eps, delta: space.delta(), haar_constant: space.haar_constant() })
}

/// Greedy cover of a region sampled on `per_axis` points per axis.
pub fn greedy_cover_region(space: &CoverSpace, region: &Region, eps: f64, per_axis: usize) -> Result<Covering> {
    greedy_cover(space, &region.sample(per_axis), eps)
}

impl Covering {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// `true` if every point lies in some ball.
    pub fn covers(&self, points: &[Vec<f64>]) -> bool {
        let mut index = NeighborIndex::new(&self.space, self.radius);
        for c in &self.centers {
            index.insert(c);
        }
        points.iter().all(|p| !index.within(p, self.radius).is_empty())
    }

    /// For each center, the number of centers `x_j` with
    /// `d(x_i, x_j) < 2 n eps`, which contains every ball `B(x_j, n eps)`
    /// meeting `B(x_i, n eps)`.
    pub fn multiplicity(&self, n: u32) -> Vec<usize> {
        let r = 2.0 * n as f64 * self.radius;
        let mut index = NeighborIndex::new(&self.space, r);
        for c in &self.centers {
            index.insert(c);
        }
        map_centers(&self.centers, |c| index.within(c, r).len())
    }

    pub fn max_multiplicity(&self, n: u32) -> usize {
        self.multiplicity(n).into_iter().max().unwrap_or(0)
    }

    /// `(4n + 1)^delta`.
    pub fn multiplicity_bound(&self, n: u32) -> f64 {
        (4.0 * n as f64 + 1.0).powf(self.delta)
    }

    /// `hist[k]` is the number of centers with multiplicity `k`.
    pub fn multiplicity_histogram(&self, n: u32) -> Vec<usize> {
        let m = self.multiplicity(n);
        let mut hist = vec![0; m.iter().max().map_or(0, |v| v + 1)];
        for v in m {
            hist[v] += 1;
        }
        hist
    }

    pub fn to_csv(&self) -> String {
        let d = self.space.dim();
        let mut s = String::from("index");
        for j in 0..d {
            s.push_str(&format!(",x{j}"));
        }
        s.push_str(",radius\n");
        for (i, c) in self.centers.iter().enumerate() {
            s.push_str(&i.to_string());
            for v in c {
                s.push_str(&format!(",{v:e}"));
            }
            s.push_str(&format!(",{:e}\n", self.radius));
        }
        s
    }
}

/// `t^3 (10 - 15 t + 6 t^2)` on `[0, 1]`, flat to second order at both ends.
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

/// Functions `phi_n` supported in the cells
/// `B(x_n, r) \ closure(union_{m<n} B(x_m, r))` with `r` the covering radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub level: u32,
    pub radius: f64,
    pub centers: Vec<Vec<f64>>,
    /// Transition width per cell, relative to `r`.
    pub eta: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    /// Normalized measure of one sample cell.
    pub cell_measure: f64,
    /// Nonzero samples `(point index, value)` of each function.
    pub values: Vec<Vec<(usize, f64)>>,
}

/// Normalized measures of the sample points where `sum phi^2 != 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassDefect {
    /// Points inside a cell where its function is below one.
    pub transition: f64,
    /// Points on cell boundaries, in no open cell.
    pub boundary: f64,
}

impl MassDefect {
    pub fn total(&self) -> f64 {
        self.transition + self.boundary
    }
}

/// Cells of diameter at most `2^{-level}` from a covering of radius
/// `2^{-level-1}`. Each `phi_n = smoothstep(min(1, s_n / eta_n))` with
/// `s_n(x) = min((r - d(x_n, x)) / r, min_{m<n} (d(x_m, x) - r) / r)`, and
/// `eta_n` is halved until the transition band has normalized measure at
/// most `2^{-level} / N`.
pub fn partition_functions(cover: &Covering, level: u32, grid: &SampleGrid) -> Result<Partition> {
    let r = cover.radius;
    if r > 0.5f64.powi(level as i32 + 1) * (1.0 + 1e-12) {
        return invalid(format!("covering radius {r} exceeds 2^-{} ", level + 1));
    }
    if grid.lo.len() != cover.space.dim() {
        return invalid("grid does not match the space dimension");
    }
    for j in 0..grid.n.len() {
        let h = grid.spacing(j);
        if h > (r / 4.0).powi(cover.space.axis_degree(j)) {
            return Err(Error::GridTooCoarse(format!("spacing {h} on axis {j} does not resolve cells of radius {r}")));
        }
    }
    let points = grid.points();
    let cell_measure = grid.cell_volume() * cover.haar_constant;
    let n_cells = cover.len();
    let mut index = NeighborIndex::new(&cover.space, 2.0 * r);
    for c in &cover.centers {
        index.insert(c);
    }
    let mut inside: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_cells];
    for (pi, x) in points.iter().enumerate() {
        let near = index.within(x, 2.0 * r);
        for (pos, &(n, dn)) in near.iter().enumerate() {
            if dn >= r {
                continue;
            }
            let mut s = (r - dn) / r;
            for &(_, dm) in &near[..pos] {
                s = s.min((dm - r) / r);
            }
            if s > 0.0 {
                inside[n].push((pi, s));
            }
            // earlier balls containing x make every later s negative
            break;
        }
    }
    let target = if n_cells == 0 { 0.0 } else { 0.5f64.powi(level as i32) / n_cells as f64 };
    let mut eta = Vec::with_capacity(n_cells);
    let mut values = Vec::with_capacity(n_cells);
    for cell in &inside {
        let mut e = 0.5;
        while e > 1e-12 && cell.iter().filter(|(_, s)| *s < e).count() as f64 * cell_measure > target {
            e *= 0.5;
        }
        eta.push(e);
        values.push(cell.iter().map(|&(pi, s)| (pi, smoothstep((s / e).min(1.0)))).collect());
    }
    Ok(Partition { level, radius: r, centers: cover.centers.clone(), eta, points, cell_measure, values })
}

impl Partition {
    pub fn sum_of_squares(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.points.len()];
        for f in &self.values {
            for &(pi, v) in f {
                s[pi] += v * v;
            }
        }
        s
    }

    /// Number of functions nonzero at each sample point.
    pub fn overlap(&self) -> Vec<usize> {
        let mut c = vec![0; self.points.len()];
        for f in &self.values {
            for &(pi, v) in f {
                if v != 0.0 {
                    c[pi] += 1;
                }
            }
        }
        c
    }

    pub fn pairwise_disjoint(&self) -> bool {
        self.overlap().iter().all(|&c| c <= 1)
    }

    pub fn values_in_unit_interval(&self) -> bool {
        self.values.iter().flatten().all(|&(_, v)| (0.0..=1.0).contains(&v))
    }

    /// Largest distance between nonzero samples of one function.
    pub fn max_support_diameter(&self, space: &CoverSpace) -> f64 {
        let mut best = 0.0f64;
        for f in &self.values {
            let pts: Vec<&[f64]> = f.iter().filter(|(_, v)| *v != 0.0).map(|(pi, _)| self.points[*pi].as_slice()).collect();
            for (i, a) in pts.iter().enumerate() {
                for b in &pts[i + 1..] {
                    best = best.max(space.distance(a, b));
                }
            }
        }
        best
    }

    /// Measure of `{sum phi^2 != 1}` restricted to `region`.
    pub fn mass_defect(&self, region: &Region) -> MassDefect {
        let s = self.sum_of_squares();
        let mut in_cell = vec![false; self.points.len()];
        for f in &self.values {
            for &(pi, _) in f {
                in_cell[pi] = true;
            }
        }
        let mut d = MassDefect { transition: 0.0, boundary: 0.0 };
        for (pi, x) in self.points.iter().enumerate() {
            if !region.contains(x) || s[pi] == 1.0 {
                continue;
            }
            if in_cell[pi] {
                d.transition += self.cell_measure;
            } else {
                d.boundary += self.cell_measure;
            }
        }
        d
    }
}

/// `(sum_i ||f chi_{B(x_i, eps)}||_{L_p}^q)^{1/q}` over the covering balls,
/// with the `L_p` norms as weighted sums over the samples. `p` or `q`
/// infinite selects the maximum.
pub fn lplq_norm(points: &[Vec<f64>], values: &[f64], weights: &[f64], p: f64, q: f64, cover: &Covering) -> Result<f64> {
    if !(p > 0.0) || !(q > 0.0) {
        return invalid("exponents must be positive");
    }
    if points.len() != values.len() || points.len() != weights.len() {
        return invalid("points, values and weights must have equal length");
    }
    let mut index = NeighborIndex::new(&cover.space, cover.radius);
    for x in points {
        index.insert(x);
    }
    let tile_norms = map_centers(&cover.centers, |c| {
        let members = index.within(c, cover.radius);
        if p.is_infinite() {
            members.iter().map(|(i, _)| values[*i].abs()).fold(0.0, f64::max)
        } else {
            members.iter().map(|(i, _)| weights[*i] * values[*i].abs().powf(p)).sum::<f64>().powf(1.0 / p)
        }
    })
    .into_iter();
    Ok(if q.is_infinite() { tile_norms.fold(0.0, f64::max) } else { tile_norms.map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q) })
}
