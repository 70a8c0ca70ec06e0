//! Discretizations of `M_f (1 + P)^{-gamma/m}`: periodic Fourier grids for
//! abelian groups and finite differences for the Heisenberg group.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rustfft::FftPlanner;

use crate::error::{invalid, Error, Result};
use crate::linalg::{conjugate_gradient, lanczos_extremes, sym_eigen, CsrMatrix};
use crate::operators::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    FourierPeriodic,
    FiniteDifferenceDirichlet,
}

/// Tensor grid on `prod [-L_j, L_j]`. Nodes are ordered with axis 0 fastest.
/// Periodic grids use `x_k = -L + 2Lk/n`; Dirichlet grids use the `n`
/// interior nodes `x_k = -L + 2L(k+1)/(n+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    half_widths: Vec<f64>,
    points: Vec<usize>,
    mode: GridMode,
}

impl Grid {
    pub fn new(half_widths: Vec<f64>, points: Vec<usize>, mode: GridMode) -> Result<Self> {
        if half_widths.is_empty() || half_widths.len() != points.len() {
            return invalid("grid needs one half-width and one point count per axis");
        }
        if half_widths.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
            return invalid("grid half-widths must be positive");
        }
        if points.iter().any(|&n| n < 2) {
            return invalid("grid needs at least two points per axis");
        }
        Ok(Grid { half_widths, points, mode })
    }

    pub fn periodic(half_widths: Vec<f64>, points: Vec<usize>) -> Result<Self> {
        Grid::new(half_widths, points, GridMode::FourierPeriodic)
    }

    pub fn dirichlet(half_widths: Vec<f64>, points: Vec<usize>) -> Result<Self> {
        Grid::new(half_widths, points, GridMode::FiniteDifferenceDirichlet)
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn half_widths(&self) -> &[f64] {
        &self.half_widths
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let l = self.half_widths[axis];
        let n = self.points[axis] as f64;
        match self.mode {
            GridMode::FourierPeriodic => 2.0 * l / n,
            GridMode::FiniteDifferenceDirichlet => 2.0 * l / (n + 1.0),
        }
    }

    pub fn node(&self, axis: usize, k: usize) -> f64 {
        let off = match self.mode {
            GridMode::FourierPeriodic => 0.0,
            GridMode::FiniteDifferenceDirichlet => 1.0,
        };
        -self.half_widths[axis] + (k as f64 + off) * self.spacing(axis)
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|j| self.spacing(j)).product()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.points[..axis].iter().product()
    }

    pub fn multi_index(&self, idx: usize) -> Vec<usize> {
        let mut r = idx;
        self.points
            .iter()
            .map(|&n| {
                let k = r % n;
                r /= n;
                k
            })
            .collect()
    }

    pub fn coords(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx).iter().enumerate().map(|(j, &k)| self.node(j, k)).collect()
    }

    pub fn sample(&self, f: &dyn Fn(&[f64]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(&self.coords(i))).collect()
    }

    /// Frequency `pi k / L` of FFT bin `k` on a periodic axis, with bins at
    /// and above `n/2` mapped to negative frequencies.
    pub fn frequency(&self, axis: usize, k: usize) -> f64 {
        let n = self.points[axis] as i64;
        let s = if (k as i64) < n / 2 { k as i64 } else { k as i64 - n };
        PI * s as f64 / self.half_widths[axis]
    }

    /// Largest represented frequency per axis.
    pub fn nyquist(&self, axis: usize) -> f64 {
        PI * (self.points[axis] / 2) as f64 / self.half_widths[axis]
    }

    /// `true` if `idx` lies on the outermost layer of nodes.
    pub fn on_boundary(&self, idx: usize) -> bool {
        self.multi_index(idx).iter().zip(&self.points).any(|(&k, &n)| k == 0 || k + 1 == n)
    }
}

pub type Action = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;

/// A linear map with optional explicit storage.
#[derive(Clone)]
pub struct MatrixOperator {
    size: usize,
    action: Action,
    adjoint: Option<Action>,
    pub dense: Option<Mat<f64>>,
    pub sparse: Option<CsrMatrix>,
    pub symmetric: bool,
}

impl fmt::Debug for MatrixOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixOperator")
            .field("size", &self.size)
            .field("dense", &self.dense.is_some())
            .field("sparse", &self.sparse.is_some())
            .field("symmetric", &self.symmetric)
            .finish()
    }
}

impl MatrixOperator {
    pub fn from_action(size: usize, action: Action, symmetric: bool) -> Self {
        MatrixOperator { size, action, adjoint: None, dense: None, sparse: None, symmetric }
    }

    pub fn from_dense(m: Mat<f64>) -> Self {
        let size = m.nrows();
        let symmetric = crate::linalg::symmetry_defect(&m) == 0.0;
        let mc = m.clone();
        let action: Action = Arc::new(move |x: &[f64]| {
            Ok((0..mc.nrows()).map(|i| (0..mc.ncols()).map(|j| mc[(i, j)] * x[j]).sum()).collect())
        });
        MatrixOperator { size, action, adjoint: None, dense: Some(m), sparse: None, symmetric }
    }

    pub fn from_sparse(m: CsrMatrix) -> Self {
        let size = m.nrows;
        let symmetric = m.symmetry_defect() == 0.0;
        let mc = m.clone();
        let action: Action = Arc::new(move |x: &[f64]| Ok(mc.apply(x)));
        MatrixOperator { size, action, adjoint: None, dense: None, sparse: Some(m), symmetric }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.size {
            return invalid(format!("vector of length {} applied to operator of size {}", x.len(), self.size));
        }
        (self.action)(x)
    }

    pub fn with_adjoint(mut self, adjoint: Action) -> Self {
        self.adjoint = Some(adjoint);
        self
    }

    /// Transpose action: the action itself for symmetric operators, then an
    /// explicit adjoint, then explicit storage.
    pub fn apply_adjoint(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.size {
            return invalid(format!("vector of length {} applied to operator of size {}", x.len(), self.size));
        }
        if self.symmetric {
            return (self.action)(x);
        }
        if let Some(a) = &self.adjoint {
            return a(x);
        }
        if let Some(s) = &self.sparse {
            return Ok(s.transpose().apply(x));
        }
        if let Some(d) = &self.dense {
            return Ok((0..self.size).map(|j| (0..self.size).map(|i| d[(i, j)] * x[i]).sum()).collect());
        }
        Err(Error::Unsupported("operator has no adjoint action".into()))
    }

    pub fn has_storage(&self) -> bool {
        self.dense.is_some() || self.sparse.is_some()
    }

    /// Dense matrix from storage, or assembled column by column from the action.
    pub fn to_dense(&self) -> Result<Mat<f64>> {
        if let Some(d) = &self.dense {
            return Ok(d.clone());
        }
        if let Some(s) = &self.sparse {
            return Ok(s.to_dense());
        }
        let n = self.size;
        let mut m = Mat::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = self.apply(&e)?;
            for i in 0..n {
                m[(i, j)] = col[i];
            }
            e[j] = 0.0;
        }
        Ok(m)
    }

    /// Largest relative discrepancy between the action and explicit storage
    /// on random vectors.
    pub fn spot_check(&self, trials: usize, seed: u64) -> Result<f64> {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let x: Vec<f64> = (0..self.size).map(|_| rng.random_range(-1.0..1.0)).collect();
            let a = self.apply(&x)?;
            let stored = if let Some(d) = &self.dense {
                (0..self.size).map(|i| (0..self.size).map(|j| d[(i, j)] * x[j]).sum()).collect::<Vec<f64>>()
            } else if let Some(s) = &self.sparse {
                s.apply(&x)
            } else {
                return Ok(0.0);
            };
            let num: f64 = a.iter().zip(&stored).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
            let den: f64 = stored.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
            worst = worst.max(num / den);
        }
        Ok(worst)
    }
}

/// Forward or inverse FFT over every axis of a grid-shaped buffer.
fn fft_nd(data: &mut [C64], dims: &[usize], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let mut stride = 1;
    let total: usize = dims.iter().product();
    for &n in dims {
        let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        let mut line = vec![C64::new(0.0, 0.0); n];
        let block = stride * n;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for k in 0..n {
                    line[k] = data[base + k * stride];
                }
                fft.process(&mut line);
                for k in 0..n {
                    data[base + k * stride] = line[k];
                }
            }
        }
        stride *= n;
    }
    if inverse {
        let s = 1.0 / total as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }
}

/// `M_f (1 + p(D))^{-q}` on a periodic grid. The Fourier transform is the
/// unnormalized DFT with `1/N` on the inverse, so the operator equals
/// `M_f F^{-1} diag(d) F` exactly.
#[derive(Debug, Clone)]
pub struct FourierOperator {
    grid: Grid,
    f: Vec<f64>,
    multiplier: Vec<f64>,
    exponent: f64,
}

/// Relative size of `f` on the outermost nodes above which the support is
/// considered to leak out of the box.
pub const SUPPORT_LEAK_TOL: f64 = 1e-10;

/// `(1 + p(xi_k))^{-q}` over all frequency bins. `p` must be real, even and
/// nonnegative on the lattice.
pub fn fourier_multiplier(p: &Symbol, grid: &Grid, exponent: f64) -> Result<Vec<f64>> {
    if grid.mode() != GridMode::FourierPeriodic {
        return invalid("Fourier discretization needs a periodic grid");
    }
    if p.dim() != grid.dim() {
        return invalid("symbol and grid dimensions differ");
    }
    let mut out = Vec::with_capacity(grid.len());
    for idx in 0..grid.len() {
        let k = grid.multi_index(idx);
        let xi: Vec<f64> = k.iter().enumerate().map(|(j, &kj)| grid.frequency(j, kj)).collect();
        let v = p.eval(&xi);
        let neg: Vec<f64> = xi.iter().map(|x| -x).collect();
        let w = p.eval(&neg);
        let scale = 1.0 + v.norm();
        if v.im.abs() > 1e-12 * scale || (v - w).norm() > 1e-12 * scale {
            return Err(Error::Unsupported("symbol must be real and even on lattice frequencies".into()));
        }
        if v.re < -1e-12 * scale {
            return Err(Error::NonPositiveSymbol { value: v.re });
        }
        out.push((1.0 + v.re.max(0.0)).powf(-exponent));
    }
    Ok(out)
}

/// Rejects `f` that does not decay to the box boundary. Constant samples
/// are exact torus functions and pass.
pub fn check_support(grid: &Grid, f: &[f64]) -> Result<()> {
    if f.iter().all(|v| *v == f[0]) {
        return Ok(());
    }
    let max = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let edge = (0..grid.len()).filter(|&i| grid.on_boundary(i)).fold(0.0f64, |m, i| m.max(f[i].abs()));
    if edge > SUPPORT_LEAK_TOL * max {
        return Err(Error::SupportLeak(format!("|f| reaches {edge:e} on the box boundary (max {max:e})")));
    }
    Ok(())
}

/// Builds `M_f (1 + p(D))^{-exponent}` for `exponent = gamma/m`.
pub fn fourier_operator(p: &Symbol, grid: &Grid, exponent: f64, f: &dyn Fn(&[f64]) -> f64) -> Result<FourierOperator> {
    let samples = grid.sample(f);
    fourier_operator_from_samples(p, grid, exponent, samples)
}

pub fn fourier_operator_from_samples(p: &Symbol, grid: &Grid, exponent: f64, f: Vec<f64>) -> Result<FourierOperator> {
    if !exponent.is_finite() || exponent < 0.0 {
        return invalid("exponent must be nonnegative");
    }
    if f.len() != grid.len() {
        return invalid("sample count does not match the grid");
    }
    check_support(grid, &f)?;
    let multiplier = fourier_multiplier(p, grid, exponent)?;
    Ok(FourierOperator { grid: grid.clone(), f, multiplier, exponent })
}

impl FourierOperator {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.f
    }

    pub fn multiplier(&self) -> &[f64] {
        &self.multiplier
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn size(&self) -> usize {
        self.f.len()
    }

    /// `F^{-1} diag(d) F x`.
    pub fn apply_multiplier(&self, x: &[f64]) -> Vec<f64> {
        let mut buf: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
        fft_nd(&mut buf, self.grid.points(), false);
        buf.iter_mut().zip(&self.multiplier).for_each(|(z, d)| *z *= d);
        fft_nd(&mut buf, self.grid.points(), true);
        buf.iter().map(|z| z.re).collect()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.apply_multiplier(x).iter().zip(&self.f).map(|(y, f)| y * f).collect()
    }

    /// Convolution kernel of `F^{-1} diag(d^power) F`, indexed by the
    /// periodic node difference.
    pub fn kernel(&self, power: f64) -> Vec<f64> {
        let mut buf: Vec<C64> = self.multiplier.iter().map(|d| C64::new(d.powf(power), 0.0)).collect();
        fft_nd(&mut buf, self.grid.points(), true);
        buf.iter().map(|z| z.re).collect()
    }

    fn difference_index(&self, a: usize, b: usize) -> usize {
        let ka = self.grid.multi_index(a);
        let kb = self.grid.multi_index(b);
        let mut idx = 0;
        let mut stride = 1;
        for (j, &n) in self.grid.points().iter().enumerate() {
            idx += ((ka[j] + n - kb[j]) % n) * stride;
            stride *= n;
        }
        idx
    }

    /// Nodes where `|w| > rel_threshold max|w|` and the matrix
    /// `w_a w_b c(a - b)` over them, with `c` the kernel of `d^power`.
    pub fn support_gram(&self, w: &[f64], power: f64, rel_threshold: f64) -> (Vec<usize>, Mat<f64>) {
        let max = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let support: Vec<usize> = (0..w.len()).filter(|&i| w[i].abs() > rel_threshold * max).collect();
        let c = self.kernel(power);
        let s = support.len();
        let g = Mat::from_fn(s, s, |i, j| {
            let (a, b) = (support[i], support[j]);
            w[a] * w[b] * c[self.difference_index(a, b)]
        });
        (support, g)
    }

    /// Explicit `M_f C`.
    pub fn dense(&self) -> Mat<f64> {
        let c = self.kernel(1.0);
        let n = self.size();
        Mat::from_fn(n, n, |i, j| self.f[i] * c[self.difference_index(i, j)])
    }

    pub fn to_matrix_operator(&self) -> MatrixOperator {
        let me = self.clone();
        let action: Action = Arc::new(move |x: &[f64]| Ok(me.apply(x)));
        let me = self.clone();
        let adjoint: Action = Arc::new(move |x: &[f64]| {
            let fx: Vec<f64> = x.iter().zip(&me.f).map(|(a, b)| a * b).collect();
            Ok(me.apply_multiplier(&fx))
        });
        MatrixOperator::from_action(self.size(), action, false).with_adjoint(adjoint)
    }
}

/// Discrete fields `X = d_x - (y/2) d_z` and `Y = d_y + (x/2) d_z` with
/// centered differences and zero Dirichlet data.
pub fn heisenberg_fields(grid: &Grid) -> Result<(CsrMatrix, CsrMatrix)> {
    check_fd_grid(grid)?;
    let n = grid.len();
    let h: Vec<f64> = (0..3).map(|j| grid.spacing(j)).collect();
    let mut tx = Vec::new();
    let mut ty = Vec::new();
    for idx in 0..n {
        let k = grid.multi_index(idx);
        let x = grid.node(0, k[0]);
        let y = grid.node(1, k[1]);
        let push = |t: &mut Vec<(usize, usize, f64)>, axis: usize, c: f64| {
            let s = grid.stride(axis);
            if k[axis] + 1 < grid.points()[axis] {
                t.push((idx, idx + s, c / (2.0 * h[axis])));
            }
            if k[axis] > 0 {
                t.push((idx, idx - s, -c / (2.0 * h[axis])));
            }
        };
        push(&mut tx, 0, 1.0);
        push(&mut tx, 2, -y / 2.0);
        push(&mut ty, 1, 1.0);
        push(&mut ty, 2, x / 2.0);
    }
    Ok((CsrMatrix::from_triplets(n, n, tx), CsrMatrix::from_triplets(n, n, ty)))
}

pub const MIN_FD_POINTS: usize = 16;

fn check_fd_grid(grid: &Grid) -> Result<()> {
    if grid.mode() != GridMode::FiniteDifferenceDirichlet || grid.dim() != 3 {
        return invalid("Heisenberg finite differences need a three-dimensional Dirichlet grid");
    }
    if grid.points().iter().any(|&n| n < MIN_FD_POINTS) {
        return Err(Error::GridTooCoarse(format!("need at least {MIN_FD_POINTS} points per axis, got {:?}", grid.points())));
    }
    Ok(())
}

/// `P = -(X^2 + Y^2) = -d_x^2 - d_y^2 - ((x^2+y^2)/4) d_z^2 + y d_x d_z - x d_y d_z`
/// with three-point second differences and four-point mixed differences.
pub fn heisenberg_sublaplacian_fd(grid: &Grid) -> Result<CsrMatrix> {
    check_fd_grid(grid)?;
    let n = grid.len();
    let h: Vec<f64> = (0..3).map(|j| grid.spacing(j)).collect();
    let pts = grid.points().to_vec();
    let mut t = Vec::with_capacity(15 * n);
    for idx in 0..n {
        let k = grid.multi_index(idx);
        let x = grid.node(0, k[0]);
        let y = grid.node(1, k[1]);
        let second = [1.0, 1.0, (x * x + y * y) / 4.0];
        for axis in 0..3 {
            let c = second[axis] / (h[axis] * h[axis]);
            let s = grid.stride(axis);
            t.push((idx, idx, 2.0 * c));
            if k[axis] + 1 < pts[axis] {
                t.push((idx, idx + s, -c));
            }
            if k[axis] > 0 {
                t.push((idx, idx - s, -c));
            }
        }
        for (axis, coef) in [(0usize, y), (1usize, -x)] {
            let c = coef / (4.0 * h[axis] * h[2]);
            let (sa, sz) = (grid.stride(axis) as i64, grid.stride(2) as i64);
            for (da, dz, sign) in [(1i64, 1i64, 1.0), (1, -1, -1.0), (-1, 1, -1.0), (-1, -1, 1.0)] {
                let ka = k[axis] as i64 + da;
                let kz = k[2] as i64 + dz;
                if ka >= 0 && ka < pts[axis] as i64 && kz >= 0 && kz < pts[2] as i64 {
                    t.push((idx, (idx as i64 + da * sa + dz * sz) as usize, sign * c));
                }
            }
        }
    }
    Ok(CsrMatrix::from_triplets(n, n, t))
}

/// `M_f (1 + P)^{-q}` for the finite-difference sub-Laplacian.
#[derive(Debug, Clone)]
pub struct FdHeisenbergOperator {
    pub grid: Grid,
    pub p: CsrMatrix,
    pub f: Vec<f64>,
    pub exponent: f64,
}

/// Requires `supp f` inside the inner half of the box.
pub fn fd_heisenberg_operator(grid: &Grid, f: &dyn Fn(&[f64]) -> f64, exponent: f64) -> Result<FdHeisenbergOperator> {
    if !(exponent > 0.0) {
        return invalid("exponent must be positive");
    }
    let p = heisenberg_sublaplacian_fd(grid)?;
    let samples = grid.sample(f);
    for (i, v) in samples.iter().enumerate() {
        if *v != 0.0 {
            let x = grid.coords(i);
            if x.iter().zip(grid.half_widths()).any(|(c, l)| c.abs() > 0.5 * l) {
                return Err(Error::SupportLeak("f must vanish outside the inner half of the box".into()));
            }
        }
    }
    Ok(FdHeisenbergOperator { grid: grid.clone(), p, f: samples, exponent })
}

impl FdHeisenbergOperator {
    pub fn to_matrix_operator(&self, opts: &FractionalOptions) -> Result<MatrixOperator> {
        let r = apply_fractional_resolvent(&MatrixOperator::from_sparse(self.p.clone()), self.exponent, opts)?;
        let f = self.f.clone();
        let r2 = r.clone();
        let action: Action = Arc::new(move |x: &[f64]| Ok(r.apply(x)?.iter().zip(&f).map(|(y, v)| y * v).collect()));
        let f = self.f.clone();
        let adjoint: Action = Arc::new(move |x: &[f64]| {
            let fx: Vec<f64> = x.iter().zip(&f).map(|(a, b)| a * b).collect();
            r2.apply(&fx)
        });
        Ok(MatrixOperator::from_action(self.f.len(), action, false).with_adjoint(adjoint))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOptions {
    /// Largest size handled by full eigendecomposition.
    pub dense_limit: usize,
    /// Target relative accuracy of the iterative path.
    pub rel_tol: f64,
}

impl Default for FractionalOptions {
    fn default() -> Self {
        FractionalOptions { dense_limit: 6000, rel_tol: 1e-8 }
    }
}

/// `(1 + P)^{-q}` for symmetric positive semidefinite `P`.
///
/// Small operators use a full eigendecomposition. Larger ones use
/// `(1+P)^{-n}` by repeated conjugate gradient solves times
/// `(1+P)^{-r} = sin(pi r)/pi int_R e^{(1-r)u} (e^u + 1 + P)^{-1} du`
/// for the fractional part `r`, discretized by the trapezoid rule in `u`.
pub fn apply_fractional_resolvent(p: &MatrixOperator, q: f64, opts: &FractionalOptions) -> Result<MatrixOperator> {
    if !(q > 0.0) || !q.is_finite() {
        return invalid("exponent must be positive");
    }
    let n = p.size();
    if n <= opts.dense_limit {
        let m = p.to_dense()?;
        let (ev, u) = sym_eigen(&m)?;
        let scale = ev.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        if ev[0] < -1e-10 * scale {
            return Err(Error::Indefinite { eigenvalue: ev[0] });
        }
        let d: Vec<f64> = ev.iter().map(|l| (1.0 + l.max(0.0)).powf(-q)).collect();
        let r = Mat::from_fn(n, n, |i, j| (0..n).map(|k| u[(i, k)] * d[k] * u[(j, k)]).sum::<f64>());
        let mut op = MatrixOperator::from_dense(r);
        op.symmetric = true;
        return Ok(op);
    }
    let pa = p.clone();
    let apply_p = move |x: &[f64], y: &mut [f64]| {
        let v = pa.apply(x).expect("operator action");
        y.copy_from_slice(&v);
    };
    let (lmin, lmax) = lanczos_extremes(&apply_p, n, 80, 7)?;
    if lmin < -1e-8 * lmax.abs().max(1.0) {
        return Err(Error::Indefinite { eigenvalue: lmin });
    }
    let diag: Vec<f64> = match &p.sparse {
        Some(s) => (0..n).map(|i| s.get(i, i)).collect(),
        None => vec![0.0; n],
    };
    let whole = q.floor() as usize;
    let frac = q - whole as f64;
    let tol = opts.rel_tol;
    let pc = p.clone();
    let lmax = lmax * 1.05 + 1.0;
    let action: Action = Arc::new(move |x: &[f64]| {
        let shifted = |shift: f64, b: &[f64]| -> Result<Vec<f64>> {
            let apply = |v: &[f64], out: &mut [f64]| {
                let pv = pc.apply(v).expect("operator action");
                for i in 0..v.len() {
                    out[i] = pv[i] + shift * v[i];
                }
            };
            let dg: Vec<f64> = diag.iter().map(|d| d + shift).collect();
            Ok(conjugate_gradient(&apply, &dg, b, tol * 1e-3, 20 * n + 100)?.0)
        };
        let mut v = x.to_vec();
        for _ in 0..whole {
            v = shifted(1.0, &v)?;
        }
        if frac == 0.0 {
            return Ok(v);
        }
        // trapezoid in u = log t; the integrand is analytic in |Im u| < pi
        let h = 0.5;
        let eps = tol * 1e-2;
        let lo = eps.ln() / (1.0 - frac);
        let hi = ((1.0 / eps).ln() + frac * (1.0 + lmax).ln().max(0.0)) / frac;
        let steps = ((hi - lo) / h).ceil() as usize;
        let mut acc = vec![0.0; n];
        for k in 0..=steps {
            let u = lo + k as f64 * h;
            let t = u.exp();
            let w = h * ((1.0 - frac) * u).exp();
            let y = shifted(1.0 + t, &v)?;
            acc.iter_mut().zip(&y).for_each(|(a, b)| *a += w * b);
        }
        let c = (PI * frac).sin() / PI;
        Ok(acc.iter().map(|a| c * a).collect())
    });
    Ok(MatrixOperator::from_action(n, action, true))
}

/// Symmetric `B M_f B` with `B = C^{1/2}` and `C` the operator of
/// `d = (1 + p)^{-q}`, written through `W = |f|^{1/2}` as
/// `(W B)^T S (W B)` with `S = sgn f`. Its nonzero spectrum is that of
/// `G^{1/2} S G^{1/2}` with `G = W C W` restricted to the support.
pub fn symmetrized_signed_matrix(op: &FourierOperator, rel_threshold: f64) -> Result<Mat<f64>> {
    let w: Vec<f64> = op.samples().iter().map(|v| v.abs().sqrt()).collect();
    let (support, g) = op.support_gram(&w, 1.0, rel_threshold.sqrt());
    let (ev, u) = sym_eigen(&g)?;
    let s = support.len();
    let root = Mat::from_fn(s, s, |i, j| (0..s).map(|k| u[(i, k)] * ev[k].max(0.0).sqrt() * u[(j, k)]).sum::<f64>());
    let sign: Vec<f64> = support.iter().map(|&a| op.samples()[a].signum()).collect();
    let mid = Mat::from_fn(s, s, |i, j| root[(i, j)] * sign[j]);
    Ok(&mid * &root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{singular_values, sym_eigenvalues};
    use approx::assert_relative_eq;
    use num_complex::Complex64 as C;

    fn lap1() -> Symbol {
        Symbol::laplacian(1)
    }

    #[test]
    fn grid_geometry() {
        let g = Grid::periodic(vec![2.0, 1.0], vec![4, 2]).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g.coords(5), vec![-1.0, 0.0]);
        assert_relative_eq!(g.frequency(0, 3), -PI / 2.0);
        let d = Grid::dirichlet(vec![1.0], vec![3]).unwrap();
        assert_relative_eq!(d.node(0, 0), -0.5);
        assert!(Grid::periodic(vec![1.0], vec![1]).is_err());
    }

    #[test]
    fn unit_f_gives_multiplier_values() {
        let g = Grid::periodic(vec![4.0], vec![32]).unwrap();
        let op = FourierOperator { grid: g.clone(), f: vec![1.0; 32], multiplier: fourier_multiplier(&lap1(), &g, 0.5).unwrap(), exponent: 0.5 };
        let sv = singular_values(&op.dense()).unwrap();
        let mut d = op.multiplier().to_vec();
        d.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in sv.iter().zip(&d) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_exponent_norm() {
        let g = Grid::periodic(vec![8.0], vec![64]).unwrap();
        let op = fourier_operator(&lap1(), &g, 0.0, &|x: &[f64]| (-x[0] * x[0]).exp() * 3.0).unwrap();
        let sv = singular_values(&op.dense()).unwrap();
        let max = op.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert_relative_eq!(sv[0], max, epsilon = 1e-12);
    }

    #[test]
    fn support_leak_detected() {
        let g = Grid::periodic(vec![2.0], vec![32]).unwrap();
        let r = fourier_operator(&lap1(), &g, 1.0, &|x: &[f64]| (-x[0] * x[0]).exp());
        assert!(matches!(r, Err(Error::SupportLeak(_))));
    }

    #[test]
    fn odd_symbol_rejected() {
        let g = Grid::periodic(vec![2.0], vec![8]).unwrap();
        let p = Symbol::from_terms(1, &[(vec![1], C::new(1.0, 0.0))]);
        assert!(fourier_multiplier(&p, &g, 1.0).is_err());
    }

    #[test]
    fn action_matches_dense_and_gram() {
        let g = Grid::periodic(vec![7.0, 6.0], vec![12, 10]).unwrap();
        let p = Symbol::from_terms(2, &[(vec![4, 0], C::new(1.0, 0.0)), (vec![0, 2], C::new(1.0, 0.0))]);
        let op = fourier_operator(&p, &g, 1.0, &|x: &[f64]| (-x[0] * x[0] - x[1] * x[1]).exp()).unwrap();
        let mut m = op.to_matrix_operator();
        m.dense = Some(op.dense());
        assert!(m.spot_check(5, 1).unwrap() < 1e-10);
        let (_, gram) = op.support_gram(op.samples(), 2.0, 0.0);
        let dense = op.dense();
        let mmt = &dense * dense.transpose();
        for i in 0..op.size() {
            for j in 0..op.size() {
                assert!((gram[(i, j)] - mmt[(i, j)]).abs() < 1e-12);
            }
        }
    }

    fn fd_grid(n: usize) -> Grid {
        Grid::dirichlet(vec![2.0, 2.0, 2.0], vec![n, n, n]).unwrap()
    }

    #[test]
    fn fd_commutator_on_polynomials() {
        let g = fd_grid(16);
        let (x, y) = heisenberg_fields(&g).unwrap();
        let interior = |i: usize| g.multi_index(i).iter().all(|&k| (2..14).contains(&k));
        let comm = |u: &[f64]| -> Vec<f64> {
            let a = x.apply(&y.apply(u));
            let b = y.apply(&x.apply(u));
            a.iter().zip(&b).map(|(p, q)| p - q).collect()
        };
        let xy = g.sample(&|p: &[f64]| p[0] * p[1]);
        let z = g.sample(&|p: &[f64]| p[2]);
        let cxy = comm(&xy);
        let cz = comm(&z);
        for i in (0..g.len()).filter(|&i| interior(i)) {
            assert!(cxy[i].abs() < 1e-10);
            assert!((cz[i] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn fd_sublaplacian_symmetric_and_coarse_rejected() {
        let p = heisenberg_sublaplacian_fd(&fd_grid(16)).unwrap();
        assert!(p.symmetry_defect() < 1e-12);
        assert!(matches!(heisenberg_sublaplacian_fd(&fd_grid(12)), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn fractional_dense_path() {
        let small = CsrMatrix::from_triplets(3, 3, vec![(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0), (2, 2, 1.0)]);
        let r = apply_fractional_resolvent(&MatrixOperator::from_sparse(small.clone()), 1.0, &FractionalOptions::default()).unwrap();
        let x = vec![1.0, -2.0, 0.5];
        let y = r.apply(&x).unwrap();
        let back = small.shifted(1.0).apply(&y);
        for (a, b) in back.iter().zip(&x) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        let ev = sym_eigenvalues(&r.dense.clone().unwrap()).unwrap();
        let pe = sym_eigenvalues(&small.to_dense()).unwrap();
        for (a, l) in ev.iter().rev().zip(&pe) {
            assert_relative_eq!(*a, 1.0 / (1.0 + l), epsilon = 1e-12);
        }
        let indefinite = CsrMatrix::from_triplets(2, 2, vec![(0, 0, -1.0), (1, 1, 1.0)]);
        assert!(apply_fractional_resolvent(&MatrixOperator::from_sparse(indefinite), 0.5, &FractionalOptions::default()).is_err());
    }

    #[test]
    fn fractional_iterative_path_matches_dense() {
        let p = heisenberg_sublaplacian_fd(&Grid::dirichlet(vec![1.5; 3], vec![16; 3]).unwrap()).unwrap();
        let n = p.nrows;
        let op = MatrixOperator::from_sparse(p.clone());
        let iter = FractionalOptions { dense_limit: 0, rel_tol: 1e-8 };
        let mut rng = StdRng::seed_from_u64(3);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        // q = 1 against a direct solve
        let one = apply_fractional_resolvent(&op, 1.0, &iter).unwrap().apply(&x).unwrap();
        let chol = crate::linalg::SparseCholesky::new(&p.shifted(1.0)).unwrap();
        let direct = chol.solve(&x);
        let d: Vec<f64> = one.iter().zip(&direct).map(|(a, b)| a - b).collect();
        assert!(norm(&d) < 1e-10 * norm(&direct));
        // half power squared
        let half = apply_fractional_resolvent(&op, 0.5, &iter).unwrap();
        let hh = half.apply(&half.apply(&x).unwrap()).unwrap();
        let d: Vec<f64> = hh.iter().zip(&direct).map(|(a, b)| a - b).collect();
        assert!(norm(&d) < 1e-8 * norm(&direct));
        let indefinite = MatrixOperator::from_sparse(p.shifted(-50.0));
        assert!(matches!(apply_fractional_resolvent(&indefinite, 0.5, &iter), Err(Error::Indefinite { .. })));
    }

    #[test]
    fn signed_matrix_spectrum() {
        let g = Grid::periodic(vec![6.0], vec![48]).unwrap();
        let op = fourier_operator(&lap1(), &g, 1.0, &|x: &[f64]| x[0] * (-x[0] * x[0]).exp()).unwrap();
        let s = symmetrized_signed_matrix(&op, 0.0).unwrap();
        let mut a = sym_eigenvalues(&s).unwrap();
        // oracle: B M_f B with B from a dense eigendecomposition of the circulant
        let c = Mat::from_fn(48, 48, |i, j| op.kernel(1.0)[op.difference_index(i, j)]);
        let (ev, u) = sym_eigen(&c).unwrap();
        let b = Mat::from_fn(48, 48, |i, j| (0..48).map(|k| u[(i, k)] * ev[k].max(0.0).sqrt() * u[(j, k)]).sum::<f64>());
        let mf = Mat::from_fn(48, 48, |i, j| if i == j { op.samples()[i] } else { 0.0 });
        let full = &b * &mf * &b;
        let mut e = sym_eigenvalues(&full).unwrap();
        a.retain(|v| v.abs() > 1e-10);
        e.retain(|v| v.abs() > 1e-10);
        assert_eq!(a.len(), e.len());
        for (x, y) in a.iter().zip(&e) {
            assert_relative_eq!(x, y, epsilon = 1e-10);
        }
    }
}
