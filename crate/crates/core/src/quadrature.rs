//! Adaptive Gauss-Kronrod quadrature on finite intervals, half-lines, the
//! real line, products of lines and spheres.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and limits for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of subintervals per adaptive run.
    pub max_intervals: usize,
    /// Maximum number of doubling pieces on an unbounded interval.
    pub max_pieces: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 4000, max_pieces: 64 }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadOptions { abs_tol, rel_tol, ..Default::default() }
    }
}

/// Value, error estimate and number of function evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl Quad {
    /// Turns an unconverged result into an error.
    pub fn require(self, stage: &'static str) -> Result<Quad> {
        if self.converged && self.value.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonConvergence {
                stage,
                detail: format!("value {:e}, error estimate {:e}", self.value, self.error),
            })
        }
    }
}

/// One 15-point Kronrod rule with its embedded 7-point Gauss estimate.
pub fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

#[derive(Debug)]
struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive bisection of `[a, b]`, always splitting the interval with the
/// largest error estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Quad {
    if a == b {
        return Quad { value: 0.0, error: 0.0, evaluations: 0, converged: true };
    }
    let (sign, lo, hi) = if a < b { (1.0, a, b) } else { (-1.0, b, a) };
    let (v, e) = gauss_kronrod_15(&f, lo, hi);
    let mut heap = BinaryHeap::new();
    heap.push(Interval { a: lo, b: hi, value: v, error: e });
    let mut total = v;
    let mut err = e;
    let mut evals = 15;
    let mut converged = false;
    while heap.len() < opts.max_intervals {
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            converged = true;
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval at machine resolution
            heap.push(worst);
            break;
        }
        let (v1, e1) = gauss_kronrod_15(&f, worst.a, mid);
        let (v2, e2) = gauss_kronrod_15(&f, mid, worst.b);
        evals += 30;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Interval { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Interval { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // Recompute sums to remove drift from incremental updates.
    let value: f64 = heap.iter().map(|i| i.value).sum();
    let error: f64 = heap.iter().map(|i| i.error).sum();
    if !converged {
        converged = error <= opts.abs_tol.max(opts.rel_tol * value.abs());
    }
    Quad { value: sign * value, error, evaluations: evals, converged }
}

/// `int_a^inf f` by integrating pieces of doubling width until two
/// consecutive pieces fall below the tolerance relative to the running value.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, opts: &QuadOptions) -> Quad {
    integrate_doubling(&f, a, 1.0, opts)
}

/// `int_{-inf}^b f`.
pub fn integrate_from_neg_infinity<F: Fn(f64) -> f64>(f: F, b: f64, opts: &QuadOptions) -> Quad {
    integrate_doubling(&|x| f(-x), -b, 1.0, opts)
}

/// `int_R f`, split at `center`.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, center: f64, opts: &QuadOptions) -> Quad {
    let right = integrate_doubling(&f, center, 1.0, opts);
    let left = integrate_doubling(&|x| f(2.0 * center - x), center, 1.0, opts);
    Quad {
        value: left.value + right.value,
        error: left.error + right.error,
        evaluations: left.evaluations + right.evaluations,
        converged: left.converged && right.converged,
    }
}

fn integrate_doubling<F: Fn(f64) -> f64>(f: &F, a: f64, width: f64, opts: &QuadOptions) -> Quad {
    let mut total = 0.0;
    let mut error = 0.0;
    let mut evals = 0;
    let mut lo = a;
    let mut w = width;
    let mut small_run = 0;
    let mut all_converged = true;
    for _ in 0..opts.max_pieces {
        let hi = lo + w;
        let piece = integrate(f, lo, hi, opts);
        if !piece.value.is_finite() {
            return Quad { value: f64::INFINITY, error: f64::INFINITY, evaluations: evals, converged: false };
        }
        total += piece.value;
        error += piece.error;
        evals += piece.evaluations;
        all_converged &= piece.converged;
        let threshold = opts.abs_tol.max(1e-3 * opts.rel_tol * total.abs());
        if piece.value.abs() <= threshold && piece.error <= threshold.max(opts.abs_tol) {
            small_run += 1;
            if small_run >= 2 {
                return Quad { value: total, error: error + piece.value.abs(), evaluations: evals, converged: all_converged };
            }
        } else {
            small_run = 0;
        }
        lo = hi;
        w *= 2.0;
    }
    Quad { value: total, error: f64::INFINITY, evaluations: evals, converged: false }
}

/// Like [`integrate_to_infinity`] but returns [`Error::Divergent`] when the
/// tail does not decay.
pub fn integrate_to_infinity_checked<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    opts: &QuadOptions,
    what: &str,
) -> Result<Quad> {
    let q = integrate_to_infinity(f, a, opts);
    if !q.error.is_finite() || !q.value.is_finite() {
        return Err(Error::Divergent(what.to_string()));
    }
    Ok(q)
}

/// `int_0^inf x^{beta-1} f(x) dx` through the substitution `x = e^u`,
/// which handles both the algebraic endpoint behaviour and slowly decaying
/// tails.
pub fn mellin_integral<F: Fn(f64) -> f64>(f: F, beta: f64, opts: &QuadOptions) -> Result<Quad> {
    let g = |u: f64| {
        let x = u.exp();
        if x == 0.0 || !x.is_finite() {
            // exp over/underflow: rely on the log-space factor going to zero
            let w = (beta * u).exp();
            if w == 0.0 {
                return 0.0;
            }
        }
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            (beta * u).exp() * v
        }
    };
    let q = integrate_real_line(g, 0.0, opts);
    if !q.value.is_finite() || !q.error.is_finite() {
        return Err(Error::Divergent(format!("weighted integral with exponent {beta}")));
    }
    Ok(q)
}

/// Nested adaptive integration of `f` over `R^d`.
pub fn integrate_whole_space(f: &(dyn Fn(&[f64]) -> f64 + Sync), d: usize, opts: &QuadOptions) -> Quad {
    fn rec(f: &(dyn Fn(&[f64]) -> f64 + Sync), d: usize, prefix: &[f64], opts: &QuadOptions) -> Quad {
        let last = prefix.len() + 1 == d;
        let inner_opts = QuadOptions { rel_tol: opts.rel_tol * 0.1, abs_tol: opts.abs_tol * 0.1, ..*opts };
        let g = |x: f64| {
            let mut p = prefix.to_vec();
            p.push(x);
            if last {
                f(&p)
            } else {
                rec(f, d, &p, &inner_opts).value
            }
        };
        integrate_real_line(g, 0.0, opts)
    }
    if d == 0 {
        return Quad { value: f(&[]), error: 0.0, evaluations: 1, converged: true };
    }
    rec(f, d, &[], opts)
}

/// Integral over the unit sphere `S^{d-1}` against surface measure, in
/// hyperspherical coordinates. Angular ranges are split at multiples of
/// `pi/2`, so integrable singularities where a coordinate vanishes sit at
/// subinterval endpoints.
pub fn integrate_sphere(f: &(dyn Fn(&[f64]) -> f64 + Sync), d: usize, opts: &QuadOptions) -> Quad {
    assert!(d >= 1, "sphere dimension must be at least 1");
    if d == 1 {
        let v = f(&[1.0]) + f(&[-1.0]);
        return Quad { value: v, error: 0.0, evaluations: 2, converged: true };
    }
    let angles = Vec::with_capacity(d - 1);
    sphere_rec(f, d, angles, opts)
}

fn sphere_point(angles: &[f64], d: usize) -> Vec<f64> {
    let mut x = vec![0.0; d];
    let mut s = 1.0;
    for (k, &phi) in angles.iter().enumerate() {
        x[k] = s * phi.cos();
        s *= phi.sin();
    }
    x[d - 1] = s;
    x
}

fn sphere_rec(f: &(dyn Fn(&[f64]) -> f64 + Sync), d: usize, angles: Vec<f64>, opts: &QuadOptions) -> Quad {
    let k = angles.len();
    let last = k + 2 == d;
    let (hi, pieces) = if last { (2.0 * PI, 4) } else { (PI, 2) };
    let power = (d - 2 - k) as i32;
    let inner_opts = QuadOptions { rel_tol: opts.rel_tol * 0.1, abs_tol: opts.abs_tol * 0.1, ..*opts };
    let g = |phi: f64| {
        let mut a = angles.clone();
        a.push(phi);
        let weight = phi.sin().powi(power);
        if last {
            weight * f(&sphere_point(&a, d))
        } else {
            weight * sphere_rec(f, d, a, &inner_opts).value
        }
    };
    let mut out = Quad { value: 0.0, error: 0.0, evaluations: 0, converged: true };
    for p in 0..pieces {
        let lo = hi * p as f64 / pieces as f64;
        let up = hi * (p + 1) as f64 / pieces as f64;
        let q = integrate(&g, lo, up, opts);
        out.value += q.value;
        out.error += q.error;
        out.evaluations += q.evaluations;
        out.converged &= q.converged;
    }
    out
}

/// Surface area of `S^{d-1}`.
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / statrs::function::gamma::gamma(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, &QuadOptions::default());
        assert_relative_eq!(q.value, 3.75 - 3.0 + 3.0, epsilon = 1e-14);
        assert!(q.converged);
    }

    #[test]
    fn reversed_limits() {
        let o = QuadOptions::default();
        let a = integrate(f64::sin, 0.0, 1.0, &o).value;
        let b = integrate(f64::sin, 1.0, 0.0, &o).value;
        assert_relative_eq!(a, -b, epsilon = 1e-15);
    }

    #[test]
    fn endpoint_singularity() {
        let q = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, &QuadOptions::with_tol(1e-12, 1e-12));
        assert_relative_eq!(q.value, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn gaussian_line() {
        let q = integrate_real_line(|x: f64| (-x * x).exp(), 0.0, &QuadOptions::default());
        assert_relative_eq!(q.value, PI.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn half_line_and_mellin() {
        let o = QuadOptions::default();
        let q = integrate_to_infinity(|x: f64| (-x).exp(), 0.0, &o);
        assert_relative_eq!(q.value, 1.0, epsilon = 1e-13);
        // int_0^inf x^{-1/2} e^{-x} = sqrt(pi)
        let m = mellin_integral(|x: f64| (-x).exp(), 0.5, &o).unwrap();
        assert_relative_eq!(m.value, PI.sqrt(), epsilon = 1e-11);
        // algebraic tail: int_0^inf x^{0.5-1} (1+x)^{-1} = pi
        let m = mellin_integral(|x: f64| 1.0 / (1.0 + x), 0.5, &o).unwrap();
        assert_relative_eq!(m.value, PI, epsilon = 1e-10);
    }

    #[test]
    fn divergence_reported() {
        let o = QuadOptions::default();
        assert!(mellin_integral(|_x: f64| 1.0, 0.5, &o).is_err());
        assert!(integrate_to_infinity_checked(|x: f64| 1.0 / (1.0 + x), 0.0, &o, "test").is_err());
    }

    #[test]
    fn whole_space_gaussian() {
        for d in 1..=3 {
            let q = integrate_whole_space(
                &|x: &[f64]| (-x.iter().map(|v| v * v).sum::<f64>()).exp(),
                d,
                &QuadOptions::with_tol(1e-13, 1e-10),
            );
            assert_relative_eq!(q.value, PI.powf(d as f64 / 2.0), max_relative = 1e-9);
        }
    }

    #[test]
    fn sphere_areas() {
        for d in 1..=4 {
            let q = integrate_sphere(&|_x: &[f64]| 1.0, d, &QuadOptions::default());
            assert_relative_eq!(q.value, sphere_area(d), max_relative = 1e-12);
        }
        // second moment: int_{S^2} x_1^2 = 4 pi / 3
        let q = integrate_sphere(&|x: &[f64]| x[0] * x[0], 3, &QuadOptions::default());
        assert_relative_eq!(q.value, 4.0 * PI / 3.0, max_relative = 1e-12);
    }
}
