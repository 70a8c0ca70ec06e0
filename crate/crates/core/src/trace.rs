//! Traces `tau(f(P))` of homogeneous operators on graded groups.

use std::sync::atomic::{AtomicU64, Ordering};
use std::f64::consts::PI;

use faer::Mat;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use statrs::function::gamma::gamma;

use crate::error::{invalid, Error, Result};
use crate::linalg::{det, expm, herm_eigenvalues, sym_eigen};
use crate::operators::Symbol;
use crate::quadrature::{integrate_real_line, integrate_sphere, integrate_to_infinity, integrate_whole_space, mellin_integral, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceMethod {
    Sphere,
    Gaussian,
    DirectQuadrature,
    Anisotropic,
    HeisenbergClosed,
    HeisenbergPlancherel,
}

impl TraceMethod {
    pub fn name(&self) -> &'static str {
        match self {
            TraceMethod::Sphere => "sphere",
            TraceMethod::Gaussian => "gaussian",
            TraceMethod::DirectQuadrature => "direct_quadrature",
            TraceMethod::Anisotropic => "anisotropic",
            TraceMethod::HeisenbergClosed => "heisenberg_closed",
            TraceMethod::HeisenbergPlancherel => "heisenberg_plancherel",
        }
    }
}

impl std::fmt::Display for TraceMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceResult {
    pub value: f64,
    pub method: TraceMethod,
    pub error_estimate: f64,
}

impl TraceResult {
    /// `group,operator,method,value,error_estimate`.
    pub fn csv_row(&self, group: &str, operator_digest: &str) -> String {
        format!("{group},{operator_digest},{},{:e},{:e}", self.method, self.value, self.error_estimate)
    }
}

pub const TRACE_CSV_HEADER: &str = "group,operator,method,value,error_estimate";

fn default_opts() -> QuadOptions {
    QuadOptions::with_tol(1e-15, 1e-11)
}

/// `Gamma(d/m) / (m (2 pi)^d) int_{S^{d-1}} p^{-d/m} dsigma` for `p`
/// homogeneous of degree `m` under the isotropic dilations.
pub fn tau_exp_sphere(p: &Symbol) -> Result<TraceResult> {
    let d = p.dim();
    let ones = vec![1; d];
    let m = p.weighted_degree(&ones);
    if m == 0 || !p.is_homogeneous(&ones, m) {
        return invalid("symbol must be homogeneous of positive degree");
    }
    let e = d as f64 / m as f64;
    let min_seen = MinTracker::new();
    let f = |w: &[f64]| {
        let v = p.eval_re(w);
        min_seen.update(v);
        if v > 0.0 { v.powf(-e) } else { f64::NAN }
    };
    let q = integrate_sphere(&f, d, &default_opts());
    if min_seen.get() <= 0.0 {
        return Err(Error::NonPositiveSymbol { value: min_seen.get() });
    }
    let q = q.require("sphere quadrature")?;
    let c = gamma(e) / (m as f64 * (2.0 * PI).powi(d as i32));
    Ok(TraceResult { value: c * q.value, method: TraceMethod::Sphere, error_estimate: c * q.error })
}

/// Running minimum shared with integrands.
struct MinTracker(AtomicU64);

impl MinTracker {
    fn new() -> Self {
        MinTracker(AtomicU64::new(f64::INFINITY.to_bits()))
    }

    fn update(&self, v: f64) {
        let _ = self.0.fetch_update(Ordering::Relaxed, Ordering::Relaxed, |b| (v < f64::from_bits(b)).then_some(v.to_bits()));
    }

    fn get(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }
}

/// `(4 pi)^{-d/2} det(A)^{-1/2}` for `p(xi) = xi^T A xi`.
pub fn tau_exp_gaussian(a: &[Vec<f64>]) -> Result<TraceResult> {
    let m = square(a)?;
    let d = m.nrows();
    let (ev, _) = sym_eigen(&m)?;
    if ev[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: ev[0] });
    }
    let det: f64 = ev.iter().product();
    let value = (4.0 * PI).powf(-(d as f64) / 2.0) / det.sqrt();
    Ok(TraceResult { value, method: TraceMethod::Gaussian, error_estimate: value * 1e-15 * d as f64 })
}

fn square(a: &[Vec<f64>]) -> Result<Mat<f64>> {
    let d = a.len();
    if d == 0 || a.iter().any(|r| r.len() != d) {
        return invalid("matrix must be square and nonempty");
    }
    let m = Mat::from_fn(d, d, |i, j| a[i][j]);
    for i in 0..d {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * (1.0 + m[(i, j)].abs()) {
                return invalid("matrix must be symmetric");
            }
        }
    }
    Ok(m)
}

/// `(2 pi)^{-d} int_{R^d} e^{-p(xi)} dxi` by nested adaptive quadrature.
pub fn tau_exp_direct(p: &Symbol) -> Result<TraceResult> {
    let d = p.dim();
    let f = |xi: &[f64]| (-p.eval_re(xi)).exp();
    let q = integrate_whole_space(&f, d, &default_opts());
    if !q.value.is_finite() || !q.converged {
        return Err(Error::Divergent("e^{-p} is not integrable".into()));
    }
    let c = (2.0 * PI).powi(-(d as i32));
    Ok(TraceResult { value: c * q.value, method: TraceMethod::DirectQuadrature, error_estimate: c * q.error })
}

/// `tau(f(P)) = Gamma(d_hom/m)^{-1} int_0^inf x^{d_hom/m - 1} f(x) dx tau(e^{-P})`.
pub fn tau_f_homogeneous<F: Fn(f64) -> f64>(f: F, d_hom: u32, m: u32, tau_exp: &TraceResult) -> Result<TraceResult> {
    if m == 0 || d_hom == 0 {
        return invalid("order and homogeneous dimension must be positive");
    }
    let b = d_hom as f64 / m as f64;
    let q = mellin_integral(f, b, &default_opts())?.require("Mellin integral")?;
    let g = gamma(b);
    let value = q.value / g * tau_exp.value;
    let error_estimate = q.error / g * tau_exp.value.abs() + (q.value / g).abs() * tau_exp.error_estimate;
    Ok(TraceResult { value, method: tau_exp.method, error_estimate })
}

/// Weights `a_j = v_j / v` and `v = lcm(v_j)` of the anisotropic sphere.
fn sphere_exponents(weights: &[u32]) -> Result<(u32, Vec<f64>)> {
    if weights.is_empty() || weights.contains(&0) {
        return invalid("weights must be positive");
    }
    let v = weights.iter().fold(1u32, |l, &w| lcm(l, w));
    Ok((v, weights.iter().map(|&w| w as f64 / v as f64).collect()))
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

/// Anisotropic gauge `rho(xi) = (sum xi_j^{2v/v_j})^{1/(2v)}`.
pub fn anisotropic_gauge(weights: &[u32], xi: &[f64]) -> f64 {
    let v = weights.iter().fold(1u32, |l, &w| lcm(l, w));
    let s: f64 = xi.iter().zip(weights).map(|(x, &w)| x.abs().powi((2 * v / w) as i32)).sum();
    s.powf(1.0 / (2.0 * v as f64))
}

/// `int_{S_v} F dmu_v` by pulling back to the round sphere: with
/// `s_j = sgn(w_j)|w_j|^{a_j}` the measure is
/// `v prod a_j prod |w_j|^{a_j - 1} dsigma(w)`.
pub fn aniso_sphere_integral(f: &(dyn Fn(&[f64]) -> f64 + Sync), weights: &[u32], opts: &QuadOptions) -> Result<(f64, f64)> {
    let (v, a) = sphere_exponents(weights)?;
    let d = weights.len();
    let pref = v as f64 * a.iter().product::<f64>();
    let g = |w: &[f64]| {
        let mut s = vec![0.0; d];
        let mut dens = 1.0;
        for j in 0..d {
            let aw = w[j].abs();
            if aw == 0.0 && a[j] < 1.0 {
                return 0.0;
            }
            s[j] = w[j].signum() * aw.powf(a[j]);
            dens *= aw.powf(a[j] - 1.0);
        }
        dens * f(&s)
    };
    let q = integrate_sphere(&g, d, opts).require("anisotropic sphere quadrature")?;
    Ok((pref * q.value, pref * q.error))
}

/// `mu_v(A)` through the cubature of [`aniso_sphere_integral`] applied to
/// the indicator of `A`.
pub fn aniso_sphere_measure_cubature(weights: &[u32], region: &(dyn Fn(&[f64]) -> bool + Sync)) -> Result<f64> {
    let f = |s: &[f64]| if region(s) { 1.0 } else { 0.0 };
    Ok(aniso_sphere_integral(&f, weights, &QuadOptions::with_tol(1e-10, 1e-8))?.0)
}

/// Default sample count for the Monte Carlo route.
pub const MC_SAMPLES: usize = 1_000_000;
pub const MC_SEED: u64 = 0x5eed_0f_a115;

/// `mu_v(A) = d_hom |{xi : rho(xi) <= 1, xi / rho(xi) in A}|` estimated from
/// uniform samples of `[-1, 1]^d`. Returns the estimate and its standard error.
pub fn aniso_sphere_measure_mc(weights: &[u32], region: &dyn Fn(&[f64]) -> bool, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let (v, _) = sphere_exponents(weights)?;
    if samples == 0 {
        return invalid("sample count must be positive");
    }
    let d = weights.len();
    let d_hom: u32 = weights.iter().sum();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut hits = 0usize;
    let mut xi = vec![0.0; d];
    let mut s = vec![0.0; d];
    for _ in 0..samples {
        for x in xi.iter_mut() {
            *x = rng.random_range(-1.0..1.0);
        }
        let r = anisotropic_gauge(weights, &xi);
        if r <= 1.0 && r > 0.0 {
            for j in 0..d {
                s[j] = xi[j] / r.powi((weights[j]) as i32);
            }
            if region(&s) {
                hits += 1;
            }
        }
    }
    let _ = v;
    let frac = hits as f64 / samples as f64;
    let vol = 2f64.powi(d as i32);
    let est = d_hom as f64 * vol * frac;
    let se = d_hom as f64 * vol * (frac * (1.0 - frac) / samples as f64).sqrt();
    Ok((est, se))
}

/// `Gamma(d_hom/m) / (m (2 pi)^d) int_{S_v} p^{-d_hom/m} dmu_v` for `p`
/// homogeneous of weighted degree `m` with respect to `weights`.
pub fn tau_exp_aniso(p: &Symbol, weights: &[u32]) -> Result<TraceResult> {
    let d = p.dim();
    if weights.len() != d {
        return invalid("weights do not match the symbol dimension");
    }
    let m = p.weighted_degree(weights);
    if m == 0 || !p.is_homogeneous(weights, m) {
        return invalid("symbol must be homogeneous of positive weighted degree");
    }
    let d_hom: u32 = weights.iter().sum();
    let e = d_hom as f64 / m as f64;
    let min_seen = MinTracker::new();
    let f = |s: &[f64]| {
        let v = p.eval_re(s);
        min_seen.update(v);
        if v > 0.0 { v.powf(-e) } else { f64::NAN }
    };
    let res = aniso_sphere_integral(&f, weights, &default_opts());
    if min_seen.get() <= 0.0 {
        return Err(Error::NonPositiveSymbol { value: min_seen.get() });
    }
    let (val, err) = res?;
    let c = gamma(e) / (m as f64 * (2.0 * PI).powi(d as i32));
    Ok(TraceResult { value: c * val, method: TraceMethod::Anisotropic, error_estimate: c * err })
}

/// Standard symplectic form `[[0, I], [-I, 0]]` of size `2n`.
pub fn symplectic_form(n: usize) -> Mat<f64> {
    Mat::from_fn(2 * n, 2 * n, |i, j| {
        if j == i + n {
            1.0
        } else if i == j + n {
            -1.0
        } else {
            0.0
        }
    })
}

fn check_pd(a: &[Vec<f64>]) -> Result<(Mat<f64>, usize)> {
    let m = square(a)?;
    if m.nrows() % 2 != 0 {
        return invalid("matrix dimension must be even");
    }
    let (ev, _) = sym_eigen(&m)?;
    if ev[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: ev[0] });
    }
    let n = m.nrows() / 2;
    Ok((m, n))
}

/// Positive eigenvalues `lambda_1 <= .. <= lambda_n` of `i Omega A`,
/// computed from the Hermitian matrix `A^{1/2} (i Omega) A^{1/2}`.
pub fn williamson_eigenvalues(a: &[Vec<f64>]) -> Result<Vec<f64>> {
    let (m, n) = check_pd(a)?;
    let (ev, u) = sym_eigen(&m)?;
    let d = 2 * n;
    let root = Mat::from_fn(d, d, |i, j| (0..d).map(|k| u[(i, k)] * ev[k].sqrt() * u[(j, k)]).sum::<f64>());
    let om = symplectic_form(n);
    let inner = &root * &om * &root;
    let h = Mat::from_fn(d, d, |i, j| faer::c64::new(0.0, inner[(i, j)]));
    let all = herm_eigenvalues(&h)?;
    Ok(all[n..].to_vec())
}

/// `1 / (2 sinh x)` without overflow.
fn inv_two_sinh(x: f64) -> f64 {
    (-x).exp() / -(-2.0 * x).exp_m1()
}

/// `(2 pi)^{-(3n+1)} 2 int_0^inf s^n prod_k (2 sinh(lambda_k s))^{-1} ds`
/// for the sub-Laplacian `-sum a_jk X_j X_k` on the Heisenberg group.
pub fn tau_exp_heisenberg(a: &[Vec<f64>]) -> Result<TraceResult> {
    let lam = williamson_eigenvalues(a)?;
    let n = lam.len();
    let f = |s: f64| {
        if s == 0.0 {
            return if n == 0 { 0.5 } else { 0.0 };
        }
        let mut v = s.powi(n as i32);
        for l in &lam {
            v *= inv_two_sinh(l * s);
        }
        v
    };
    // limit at 0 is prod (2 lambda_k)^{-1}, attained by the formula away from 0
    let q = integrate_to_infinity(f, 0.0, &default_opts()).require("Heisenberg quadrature")?;
    let c = 2.0 * (2.0 * PI).powi(-(3 * n as i32 + 1));
    Ok(TraceResult { value: c * q.value, method: TraceMethod::HeisenbergClosed, error_estimate: c * q.error })
}

/// The same trace from `2^{-n} (2 pi)^{-(3n+1)} det(A)^{-1/2}
/// int_R det(i Omega A s / sinh(i Omega A s))^{1/2} ds`. The determinant is
/// `det(g(Y))^{-1}` with `Y = -(Omega A s)^2` and `g(Y) = sinh(sqrt Y)/sqrt Y`,
/// read off the upper right block of `exp([[0, I], [Y, 0]])`.
pub fn tau_exp_heisenberg_det(a: &[Vec<f64>]) -> Result<TraceResult> {
    let (m, n) = check_pd(a)?;
    let d = 2 * n;
    let om = symplectic_form(n);
    let oa = &om * &m;
    let det_a = det(&m);
    let f = |s: f64| {
        let x = &oa * s;
        let y = -(&x * &x);
        let big = Mat::from_fn(2 * d, 2 * d, |i, j| {
            if i < d && j >= d {
                if i == j - d { 1.0 } else { 0.0 }
            } else if i >= d && j < d {
                y[(i - d, j)]
            } else {
                0.0
            }
        });
        let e = expm(&big);
        let g = Mat::from_fn(d, d, |i, j| e[(i, j + d)]);
        let dg = det(&g);
        if dg.is_finite() && dg > 0.0 { dg.powf(-0.5) } else { 0.0 }
    };
    let opts = QuadOptions::with_tol(1e-15, 1e-11);
    let q = integrate_real_line(f, 0.0, &opts).require("determinant quadrature")?;
    let c = 2f64.powi(-(n as i32)) * (2.0 * PI).powi(-(3 * n as i32 + 1)) / det_a.sqrt();
    Ok(TraceResult { value: c * q.value, method: TraceMethod::HeisenbergClosed, error_estimate: c * q.error })
}

/// A function sampled at quadrature nodes with weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledFunction {
    /// Tensor trapezoid rule with `n` nodes per axis on `prod [lo_j, hi_j]`.
    pub fn on_box(f: &dyn Fn(&[f64]) -> f64, lo: &[f64], hi: &[f64], n: usize) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || n < 2 {
            return invalid("box needs matching bounds and at least two nodes per axis");
        }
        let d = lo.len();
        let total = n.pow(d as u32);
        let mut points = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut values = Vec::with_capacity(total);
        for idx in 0..total {
            let mut x = vec![0.0; d];
            let mut w = 1.0;
            let mut r = idx;
            for j in 0..d {
                let k = r % n;
                r /= n;
                let h = (hi[j] - lo[j]) / (n - 1) as f64;
                x[j] = lo[j] + k as f64 * h;
                w *= if k == 0 || k == n - 1 { 0.5 * h } else { h };
            }
            values.push(f(&x));
            points.push(x);
            weights.push(w);
        }
        Ok(SampledFunction { points, weights, values })
    }
}

/// Predicted Weyl constant together with the exponent `gamma / d_hom`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylConstant {
    pub value: f64,
    pub exponent: f64,
}

/// `(Gamma(d_hom/m + 1)^{-1} int |f|^{d_hom/gamma} tau(e^{-P_g^top}) dg)^{gamma/d_hom}`,
/// with `tau_field(g) = tau(e^{-P_g^top})` evaluated where `f != 0`.
pub fn weyl_constant(
    f: &SampledFunction,
    gamma_exp: f64,
    m: u32,
    d_hom: u32,
    tau_field: &dyn Fn(&[f64]) -> Result<f64>,
) -> Result<WeylConstant> {
    if gamma_exp <= 0.0 || !gamma_exp.is_finite() {
        return invalid("gamma must be positive");
    }
    if m == 0 || d_hom == 0 {
        return invalid("order and homogeneous dimension must be positive");
    }
    let q = d_hom as f64 / gamma_exp;
    let mut acc = 0.0;
    for ((x, w), v) in f.points.iter().zip(&f.weights).zip(&f.values) {
        if *v == 0.0 {
            continue;
        }
        let t = tau_field(x)?;
        if !(t > 0.0) {
            return Err(Error::NonPositiveSymbol { value: t });
        }
        acc += w * v.abs().powf(q) * t;
    }
    let inner = acc / gamma(d_hom as f64 / m as f64 + 1.0);
    Ok(WeylConstant { value: inner.powf(gamma_exp / d_hom as f64), exponent: gamma_exp / d_hom as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Symbol;
    use approx::assert_relative_eq;
    use num_complex::Complex64 as C64;

    fn sym(d: usize, terms: &[(Vec<u32>, f64)]) -> Symbol {
        let t: Vec<(Vec<u32>, C64)> = terms.iter().map(|(e, c)| (e.clone(), C64::new(*c, 0.0))).collect();
        Symbol::from_terms(d, &t)
    }

    #[test]
    fn sphere_examples() {
        let t = tau_exp_sphere(&sym(1, &[(vec![2], 1.0)])).unwrap();
        assert_relative_eq!(t.value, 0.5 / PI.sqrt(), max_relative = 1e-12);
        let t = tau_exp_sphere(&sym(1, &[(vec![4], 1.0)])).unwrap();
        assert_relative_eq!(t.value, gamma(0.25) / (4.0 * PI), max_relative = 1e-12);
        let lap = Symbol::laplacian(3);
        let t = tau_exp_sphere(&lap).unwrap();
        assert_relative_eq!(t.value, (4.0 * PI).powf(-1.5), max_relative = 1e-9);
        assert!(matches!(tau_exp_sphere(&sym(2, &[(vec![2, 0], 1.0), (vec![0, 2], -1.0)])), Err(Error::NonPositiveSymbol { .. })));
    }

    #[test]
    fn gaussian_examples() {
        let t = tau_exp_gaussian(&[vec![4.0]]).unwrap();
        assert_relative_eq!(t.value, 0.5 / (4.0 * PI).sqrt(), max_relative = 1e-14);
        assert!(tau_exp_gaussian(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
    }

    #[test]
    fn direct_quartic() {
        let p = sym(2, &[(vec![4, 0], 1.0), (vec![0, 2], 1.0)]);
        let t = tau_exp_direct(&p).unwrap();
        let expected = gamma(1.25) * PI.sqrt() / (2.0 * PI * PI);
        assert_relative_eq!(t.value, expected, max_relative = 1e-9);
        let a = tau_exp_aniso(&p, &[1, 2]).unwrap();
        assert_relative_eq!(a.value, expected, max_relative = 1e-8);
    }

    #[test]
    fn functional_calculus() {
        let t = tau_exp_sphere(&sym(1, &[(vec![2], 1.0)])).unwrap();
        let r = tau_f_homogeneous(|x| (-2.0 * x).exp(), 1, 2, &t).unwrap();
        assert_relative_eq!(r.value, 2f64.powf(-0.5) * t.value, max_relative = 1e-10);
        let z = 3.0;
        let r = tau_f_homogeneous(|x| (1.0 + x).powf(-z / 2.0), 1, 2, &t).unwrap();
        assert_relative_eq!(r.value, gamma((z - 1.0) / 2.0) / gamma(z / 2.0) * t.value, max_relative = 1e-10);
    }

    #[test]
    fn aniso_total_measure() {
        let all = |_: &[f64]| true;
        let c = aniso_sphere_measure_cubature(&[1, 2], &all).unwrap();
        let beta = gamma(0.25) * gamma(0.5) / gamma(0.75);
        assert_relative_eq!(c, 2.0 * beta, max_relative = 1e-7);
        let (mc, se) = aniso_sphere_measure_mc(&[1, 2], &all, 200_000, MC_SEED).unwrap();
        assert!((mc - c).abs() < 5.0 * se + 1e-3);
        let half = |s: &[f64]| s[0] > 0.0;
        let ch = aniso_sphere_measure_cubature(&[1, 2], &half).unwrap();
        assert_relative_eq!(ch, beta, max_relative = 1e-6);
    }

    #[test]
    fn williamson_examples() {
        let l = williamson_eigenvalues(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_relative_eq!(l[0], 1.0, epsilon = 1e-13);
        let l = williamson_eigenvalues(&[vec![2.0, 0.0], vec![0.0, 8.0]]).unwrap();
        assert_relative_eq!(l[0], 4.0, epsilon = 1e-12);
        assert!(williamson_eigenvalues(&[vec![1.0]]).is_err());
    }

    #[test]
    fn heisenberg_sublaplacian() {
        let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let t = tau_exp_heisenberg(&id).unwrap();
        assert_relative_eq!(t.value, 1.0 / (64.0 * PI * PI), max_relative = 1e-11);
        let t3 = tau_exp_heisenberg(&[vec![3.0, 0.0], vec![0.0, 3.0]]).unwrap();
        assert_relative_eq!(t3.value, t.value / 9.0, max_relative = 1e-11);
        let d = tau_exp_heisenberg_det(&id).unwrap();
        assert_relative_eq!(d.value, t.value, max_relative = 1e-9);
    }

    #[test]
    fn weyl_constant_gaussian() {
        let f = SampledFunction::on_box(&|x: &[f64]| (-x[0] * x[0]).exp(), &[-12.0], &[12.0], 2001).unwrap();
        let tau = |_: &[f64]| Ok(0.5 / PI.sqrt());
        let w = weyl_constant(&f, 2.0, 2, 1, &tau).unwrap();
        assert_relative_eq!(w.value, 2.0 / PI, max_relative = 1e-12);
        assert_relative_eq!(w.exponent, 2.0);
        assert!(weyl_constant(&f, 0.0, 2, 1, &tau).is_err());
    }
}
