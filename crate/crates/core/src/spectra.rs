//! Singular values, Weyl-law fits and end-to-end experiments.

use std::f64::consts::PI;

use faer::Mat;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use statrs::function::gamma::gamma;

use crate::discretize::{
    check_support, fourier_operator_from_samples, symmetrized_signed_matrix, FdHeisenbergOperator, FourierOperator, Grid, GridMode, MatrixOperator,
};
use crate::error::{invalid, Error, Result};
use crate::linalg::{singular_values as dense_singular_values, sym_eigen, sym_eigenvalues, SparseCholesky};
use crate::operators::{Coefficient, Symbol};
use crate::quadrature::{integrate_to_infinity, QuadOptions};
use crate::trace::{tau_exp_aniso, tau_exp_gaussian, weyl_constant, SampledFunction, WeylConstant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvMethod {
    DenseSvd,
    SupportGram,
    Lanczos,
    Eigen,
}

/// Nonincreasing, nonnegative singular values.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularValues {
    values: Vec<f64>,
    pub method: SvMethod,
}

impl SingularValues {
    /// Sorts and clamps tiny negative round-off to zero.
    pub fn new(mut values: Vec<f64>, method: SvMethod) -> Self {
        values.iter_mut().for_each(|v| *v = v.max(0.0));
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        SingularValues { values, method }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,mu\n");
        for (k, v) in self.values.iter().enumerate() {
            s.push_str(&format!("{k},{v:e}\n"));
        }
        s
    }
}

pub const DENSE_LIMIT: usize = 6000;

/// Top `k` singular values of `m`.
pub fn singular_values(m: &MatrixOperator, k: usize) -> Result<SingularValues> {
    let n = m.size();
    if k > n {
        return invalid(format!("requested {k} singular values of a size {n} operator"));
    }
    if m.has_storage() && n <= DENSE_LIMIT {
        let mut sv = dense_singular_values(&m.to_dense()?)?;
        sv.truncate(k);
        return Ok(SingularValues::new(sv, SvMethod::DenseSvd));
    }
    let apply = |x: &[f64]| -> Result<Vec<f64>> { m.apply_adjoint(&m.apply(x)?) };
    let ev = lanczos_top(&apply, n, k)?;
    Ok(SingularValues::new(ev.iter().map(|v| v.max(0.0).sqrt()).collect(), SvMethod::Lanczos))
}

/// Top `k` eigenvalues of a positive semidefinite operator by Lanczos with
/// full reorthogonalization, growing the Krylov space until the residual
/// bounds of the wanted Ritz pairs fall below `1e-10` relative.
fn lanczos_top(apply: &dyn Fn(&[f64]) -> Result<Vec<f64>>, n: usize, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut rng = StdRng::seed_from_u64(11);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= nv);
    let mut basis = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut target = (2 * k + 20).min(n);
    loop {
        while alpha.len() < target {
            let j = alpha.len();
            let mut w = apply(&basis[j])?;
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&w, b);
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let nb = dot(&w, &w).sqrt();
            if alpha.len() == n || nb < 1e-14 * a.abs().max(1e-300) {
                beta.push(0.0);
                target = alpha.len();
                break;
            }
            beta.push(nb);
            basis.push(w.iter().map(|x| x / nb).collect());
        }
        let m = alpha.len();
        let t = Mat::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let (ev, s) = sym_eigen(&t)?;
        let top = ev[m - 1].abs().max(1e-300);
        let last_beta = beta[m - 1];
        let converged = (0..k.min(m)).all(|i| (last_beta * s[(m - 1, m - 1 - i)]).abs() <= 1e-10 * top);
        if converged || m == n || target == alpha.len() && last_beta == 0.0 {
            if m < k {
                return Err(Error::NonConvergence { stage: "Lanczos", detail: format!("Krylov space exhausted at {m}") });
            }
            return Ok((0..k).map(|i| ev[m - 1 - i]).collect());
        }
        if m >= n {
            return Err(Error::NonConvergence { stage: "Lanczos", detail: "residuals above tolerance".into() });
        }
        target = ((m * 3) / 2).min(n);
    }
}

/// Singular values of `M_f C` from `f_S C^2_{SS} f_S` on the support `S`
/// of `f`. Rows where `|f| <= rel_threshold max|f|` are dropped, which moves
/// each singular value by at most `rel_threshold max|f| |C|`.
pub fn fourier_singular_values(op: &FourierOperator, rel_threshold: f64) -> Result<SingularValues> {
    let (_, g) = op.support_gram(op.samples(), 2.0, rel_threshold);
    let ev = sym_eigenvalues(&g)?;
    Ok(SingularValues::new(ev.iter().map(|v| v.max(0.0).sqrt()).collect(), SvMethod::SupportGram))
}

const GRAM_CHUNK: usize = 256;

/// Singular values of `M_f (1 + P)^{-q}` for integer `q` from the support
/// Gram matrix `f_a f_b [(1 + P)^{-2q}]_{ab}`, built column block by column
/// block with a sparse Cholesky factor of `1 + P`.
pub fn fd_heisenberg_singular_values(op: &FdHeisenbergOperator, rel_threshold: f64) -> Result<SingularValues> {
    let q = op.exponent.round();
    if (op.exponent - q).abs() > 1e-12 || q < 1.0 {
        return Err(Error::Unsupported("support Gram path needs an integer exponent".into()));
    }
    let fmax = op.f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let support: Vec<usize> = (0..op.f.len()).filter(|&i| op.f[i].abs() > rel_threshold * fmax).collect();
    let s = support.len();
    if s == 0 {
        return Ok(SingularValues::new(Vec::new(), SvMethod::SupportGram));
    }
    let chol = SparseCholesky::new(&op.p.shifted(1.0))?;
    let n = op.f.len();
    let mut g = Mat::<f64>::zeros(s, s);
    for start in (0..s).step_by(GRAM_CHUNK) {
        let end = (start + GRAM_CHUNK).min(s);
        let mut w = Mat::<f64>::zeros(n, end - start);
        for (j, &a) in support[start..end].iter().enumerate() {
            w[(a, j)] = op.f[a];
        }
        for _ in 0..2 * q as usize {
            chol.solve_in_place(&mut w);
        }
        for (i, &a) in support.iter().enumerate() {
            for j in 0..end - start {
                g[(i, start + j)] = op.f[a] * w[(a, j)];
            }
        }
    }
    let g = Mat::from_fn(s, s, |i, j| 0.5 * (g[(i, j)] + g[(j, i)]));
    let ev = sym_eigenvalues(&g)?;
    Ok(SingularValues::new(ev.iter().map(|v| v.max(0.0).sqrt()).collect(), SvMethod::SupportGram))
}

/// Fitted `mu(k) ~ constant (k+1)^{-exponent}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticFit {
    pub exponent: f64,
    pub constant: f64,
    pub window: (usize, usize),
    /// Spread of the estimate over the window: the standard deviation of
    /// the trimmed products for a fixed exponent, the delta-method error of
    /// the intercept for a joint fit.
    pub stderr: f64,
}

/// Fraction trimmed from each end of the window.
pub const TRIM: f64 = 0.1;
pub const MIN_WINDOW: usize = 50;

/// `[5%, 50%]` of the available values.
pub fn default_window(k: usize) -> (usize, usize) {
    ((k as f64 * 0.05).floor() as usize, ((k as f64 * 0.5).floor() as usize).saturating_sub(1))
}

/// `[10%, 100%]` of the values resolved by the grid.
pub fn resolved_window(resolved: usize) -> (usize, usize) {
    (resolved / 10, resolved.saturating_sub(1))
}

/// With `p` given, the constant is the trimmed mean of `(k+1)^{1/p} mu(k)`
/// over the inclusive window; otherwise a least-squares line through
/// `(log(k+1), log mu(k))`.
pub fn fit_weyl(sv: &SingularValues, p: Option<f64>, window: Option<(usize, usize)>) -> Result<AsymptoticFit> {
    let (lo, hi) = window.unwrap_or_else(|| default_window(sv.len()));
    if hi < lo || hi >= sv.len() {
        return invalid(format!("window [{lo}, {hi}] outside a sequence of length {}", sv.len()));
    }
    if hi - lo + 1 < MIN_WINDOW {
        return invalid(format!("window [{lo}, {hi}] shorter than {MIN_WINDOW}"));
    }
    let pts: Vec<(f64, f64)> = (lo..=hi).filter(|&k| sv.values[k] > 0.0).map(|k| ((k + 1) as f64, sv.values[k])).collect();
    if pts.is_empty() {
        return invalid("window contains only zeros");
    }
    match p {
        Some(p) => {
            if !(p > 0.0) {
                return invalid("exponent must be positive");
            }
            let mut prod: Vec<f64> = pts.iter().map(|(k, m)| k.powf(1.0 / p) * m).collect();
            prod.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let cut = (prod.len() as f64 * TRIM).floor() as usize;
            let kept = &prod[cut..prod.len() - cut];
            if kept.is_empty() {
                return invalid("window empty after trimming");
            }
            let mean = kept.iter().sum::<f64>() / kept.len() as f64;
            let var = kept.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (kept.len().max(2) - 1) as f64;
            Ok(AsymptoticFit { exponent: 1.0 / p, constant: mean, window: (lo, hi), stderr: var.sqrt() })
        }
        None => {
            let n = pts.len() as f64;
            if pts.len() < 3 {
                return invalid("joint fit needs at least three nonzero values");
            }
            let xs: Vec<f64> = pts.iter().map(|(k, _)| k.ln()).collect();
            let ys: Vec<f64> = pts.iter().map(|(_, m)| m.ln()).collect();
            let mx = xs.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let slope = sxy / sxx;
            let icpt = my - slope * mx;
            let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
            let s2 = rss / (n - 2.0);
            let se_icpt = (s2 * (1.0 / n + mx * mx / sxx)).sqrt();
            let c = icpt.exp();
            Ok(AsymptoticFit { exponent: -slope, constant: c, window: (lo, hi), stderr: c * se_icpt })
        }
    }
}

/// Number of singular values above `floor` times the largest, the range
/// the default window is taken from.
pub fn numerical_rank(sv: &SingularValues, floor: f64) -> usize {
    let top = sv.values.first().copied().unwrap_or(0.0);
    sv.values.iter().take_while(|&&v| v > floor * top).count()
}

pub const RANK_FLOOR: f64 = 1e-8;

/// The operator part of a Weyl experiment on an abelian group.
#[derive(Debug, Clone)]
pub enum OperatorModel {
    /// Constant-coefficient `P` with the given full symbol.
    Constant(Symbol),
    /// `P = -d/dx (a d/dx)` in one dimension.
    DivergenceForm(Coefficient),
}

#[derive(Debug, Clone)]
pub struct WeylConfig {
    /// Dilation weights of the coordinates.
    pub weights: Vec<u32>,
    pub operator: OperatorModel,
    pub f: Coefficient,
    pub gamma: f64,
    pub grid: Grid,
    /// Explicit inclusive fit window; `[10%, 100%]` of the resolved values otherwise.
    pub window: Option<(usize, usize)>,
    /// Second grid for the self-convergence estimate.
    pub refinement: Option<Grid>,
    /// Relative size of `f` below which nodes are dropped.
    pub support_threshold: f64,
}

impl WeylConfig {
    pub fn new(weights: Vec<u32>, operator: OperatorModel, f: Coefficient, gamma: f64, grid: Grid) -> Self {
        WeylConfig { weights, operator, f, gamma, grid, window: None, refinement: None, support_threshold: 1e-10 }
    }

    pub fn order(&self) -> Result<u32> {
        match &self.operator {
            OperatorModel::Constant(p) => {
                let m = p.weighted_degree(&self.weights);
                if m == 0 {
                    return invalid("operator has order zero");
                }
                Ok(m)
            }
            OperatorModel::DivergenceForm(_) => Ok(2),
        }
    }

    pub fn homogeneous_dimension(&self) -> u32 {
        self.weights.iter().sum()
    }

    fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return invalid("gamma must be positive");
        }
        if self.weights.len() != self.grid.dim() {
            return invalid("weights do not match the grid dimension");
        }
        if self.grid.mode() != GridMode::FourierPeriodic {
            return invalid("abelian experiments use periodic grids");
        }
        if let OperatorModel::DivergenceForm(_) = self.operator {
            if self.grid.dim() != 1 {
                return Err(Error::Unsupported("divergence-form operators are one-dimensional".into()));
            }
        }
        Ok(())
    }

    /// `max|f| (1 + p_edge)^{-gamma/m}` where `p_edge` is the smallest value
    /// of the symbol on the boundary of the frequency box of `grid`.
    /// Singular values below it are shaped by the frequency cutoff.
    pub fn resolution_floor(&self, grid: &Grid) -> Result<f64> {
        let fmax = grid.sample(&|x| self.f.eval(x).norm()).into_iter().fold(0.0, f64::max);
        let p_edge = match &self.operator {
            OperatorModel::Constant(p) => {
                let d = grid.dim();
                let mut best = f64::INFINITY;
                let mut xi = vec![0.0; d];
                for axis in 0..d {
                    let others: usize = (0..d).filter(|&j| j != axis).map(|j| grid.points()[j]).product();
                    for sign in [-1.0, 1.0] {
                        for mut r in 0..others {
                            for j in 0..d {
                                if j == axis {
                                    xi[j] = sign * grid.nyquist(j);
                                } else {
                                    let n = grid.points()[j];
                                    xi[j] = grid.frequency(j, r % n);
                                    r /= n;
                                }
                            }
                            best = best.min(p.eval_re(&xi));
                        }
                    }
                }
                best
            }
            OperatorModel::DivergenceForm(a) => {
                let amin = grid.sample(&|x| a.eval(x).re).into_iter().fold(f64::INFINITY, f64::min);
                amin * grid.nyquist(0).powi(2)
            }
        };
        Ok(fmax * (1.0 + p_edge.max(0.0)).powf(-self.exponent()?))
    }

    /// `tau(e^{-P_g^top})` at `x`.
    pub fn tau_field(&self) -> Result<Box<dyn Fn(&[f64]) -> Result<f64> + '_>> {
        match &self.operator {
            OperatorModel::Constant(p) => {
                let top = p.principal(&self.weights);
                let t = tau_exp_aniso(&top, &self.weights)?.value;
                Ok(Box::new(move |_| Ok(t)))
            }
            OperatorModel::DivergenceForm(a) => Ok(Box::new(move |x| {
                let v = a.eval(x).re;
                Ok(tau_exp_gaussian(&[vec![v]])?.value)
            })),
        }
    }

    /// Predicted limit of `k^{gamma/d_hom} mu(k)` for `f` replaced by `g`.
    pub fn predicted_for(&self, g: &dyn Fn(&[f64]) -> f64) -> Result<WeylConstant> {
        let grid = &self.grid;
        let samples = SampledFunction {
            points: (0..grid.len()).map(|i| grid.coords(i)).collect(),
            weights: vec![grid.cell_volume(); grid.len()],
            values: grid.sample(g),
        };
        let field = self.tau_field()?;
        weyl_constant(&samples, self.gamma, self.order()?, self.homogeneous_dimension(), &*field)
    }

    pub fn predicted(&self) -> Result<WeylConstant> {
        let f = |x: &[f64]| self.f.eval(x).re;
        self.predicted_for(&f)
    }

    fn exponent(&self) -> Result<f64> {
        Ok(self.gamma / self.order()? as f64)
    }
}

/// Singular values of the discretized `M_f (1 + P)^{-gamma/m}` on `grid`.
pub fn experiment_singular_values(cfg: &WeylConfig, grid: &Grid) -> Result<SingularValues> {
    let q = cfg.exponent()?;
    let f = grid.sample(&|x| cfg.f.eval(x).re);
    match &cfg.operator {
        OperatorModel::Constant(p) => {
            let op = fourier_operator_from_samples(p, grid, q, f)?;
            fourier_singular_values(&op, cfg.support_threshold)
        }
        OperatorModel::DivergenceForm(a) => {
            check_support(grid, &f)?;
            let p = divergence_form_matrix(a, grid)?;
            let (ev, u) = sym_eigen(&p)?;
            if ev[0] < -1e-9 * ev[ev.len() - 1].abs().max(1.0) {
                return Err(Error::Indefinite { eigenvalue: ev[0] });
            }
            let max = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let s: Vec<usize> = (0..f.len()).filter(|&i| f[i].abs() > cfg.support_threshold * max).collect();
            let n = ev.len();
            let d: Vec<f64> = ev.iter().map(|l| (1.0 + l.max(0.0)).powf(-q)).collect();
            // (M_f R)(M_f R)^T restricted to S, R = U diag(d) U^T
            let us = Mat::from_fn(s.len(), n, |i, k| u[(s[i], k)] * d[k] * f[s[i]]);
            let g = &us * us.transpose();
            let ev = sym_eigenvalues(&g)?;
            Ok(SingularValues::new(ev.iter().map(|v| v.max(0.0).sqrt()).collect(), SvMethod::Eigen))
        }
    }
}

/// Dense `D^T M_a D` with the spectral derivative `D` on a periodic grid,
/// Nyquist mode removed so that `D` is real.
pub fn divergence_form_matrix(a: &Coefficient, grid: &Grid) -> Result<Mat<f64>> {
    if grid.dim() != 1 || grid.mode() != GridMode::FourierPeriodic {
        return invalid("divergence form needs a one-dimensional periodic grid");
    }
    let n = grid.len();
    let av = grid.sample(&|x| a.eval(x).re);
    if av.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::NonPositiveSymbol { value: av.iter().cloned().fold(f64::INFINITY, f64::min) });
    }
    // D_{jk} = c(j - k) with c = inverse DFT of i xi
    let c: Vec<f64> = (0..n)
        .map(|r| {
            let mut s = 0.0;
            for k in 0..n {
                if 2 * k == n {
                    continue;
                }
                let xi = grid.frequency(0, k);
                let phase = 2.0 * PI * (k * r % n) as f64 / n as f64;
                s -= xi * phase.sin();
            }
            s / n as f64
        })
        .collect();
    let d = Mat::from_fn(n, n, |j, k| c[(j + n - k) % n]);
    let da = Mat::from_fn(n, n, |j, k| av[j] * d[(j, k)]);
    Ok(d.transpose() * &da)
}

#[derive(Debug, Clone)]
pub struct WeylExperiment {
    pub singular_values: SingularValues,
    pub measured: AsymptoticFit,
    pub predicted: WeylConstant,
    pub relative_error: f64,
    /// Relative difference of the fitted constants on the main and
    /// refinement grids.
    pub self_convergence: Option<f64>,
}

/// Values above both the rank floor and the resolution floor.
fn resolved_count(cfg: &WeylConfig, grid: &Grid, sv: &SingularValues) -> Result<usize> {
    let floor = cfg.resolution_floor(grid)?;
    Ok(numerical_rank(sv, RANK_FLOOR).min(sv.values().iter().filter(|v| **v > floor).count()))
}

fn fit_for(cfg: &WeylConfig, grid: &Grid, sv: &SingularValues) -> Result<AsymptoticFit> {
    let p = cfg.homogeneous_dimension() as f64 / cfg.gamma;
    let window = match cfg.window {
        Some(w) => w,
        None => resolved_window(resolved_count(cfg, grid, sv)?),
    };
    fit_weyl(sv, Some(p), Some(window))
}

/// Discretize, compute singular values, fit, and compare with the predicted constant.
pub fn weyl_experiment(cfg: &WeylConfig) -> Result<WeylExperiment> {
    cfg.validate()?;
    let sv = experiment_singular_values(cfg, &cfg.grid)?;
    let measured = fit_for(cfg, &cfg.grid, &sv)?;
    let predicted = cfg.predicted()?;
    let self_convergence = match &cfg.refinement {
        Some(g) => {
            let sv2 = experiment_singular_values(cfg, g)?;
            let fit2 = fit_for(cfg, g, &sv2)?;
            Some((fit2.constant - measured.constant).abs() / measured.constant.abs().max(1e-300))
        }
        None => None,
    };
    Ok(WeylExperiment {
        relative_error: (measured.constant - predicted.value).abs() / predicted.value,
        singular_values: sv,
        measured,
        predicted,
        self_convergence,
    })
}

#[derive(Debug, Clone)]
pub struct SignedPart {
    pub singular_values: SingularValues,
    pub measured: AsymptoticFit,
    pub predicted: WeylConstant,
}

#[derive(Debug, Clone)]
pub struct SignedExperiment {
    pub positive: SignedPart,
    pub negative: SignedPart,
}

/// Splits the spectrum of `(1+P)^{-gamma/2m} M_f (1+P)^{-gamma/2m}` into
/// positive and negative parts and fits each against the constant built
/// from `f_+` or `f_-`. Both parts are fitted on the same window; a part
/// with no nonzero values in it gets constant zero.
pub fn signed_experiment(cfg: &WeylConfig) -> Result<SignedExperiment> {
    cfg.validate()?;
    let p = match &cfg.operator {
        OperatorModel::Constant(p) => p,
        OperatorModel::DivergenceForm(_) => return Err(Error::Unsupported("signed experiments use constant coefficients".into())),
    };
    let f = cfg.grid.sample(&|x| cfg.f.eval(x).re);
    let op = fourier_operator_from_samples(p, &cfg.grid, cfg.exponent()?, f)?;
    let h = symmetrized_signed_matrix(&op, cfg.support_threshold)?;
    let ev = sym_eigenvalues(&h)?;
    let (pos, neg) = split_spectrum(&ev);
    let pos_sv = SingularValues::new(pos, SvMethod::Eigen);
    let neg_sv = SingularValues::new(neg, SvMethod::Eigen);
    let window = match cfg.window {
        Some(w) => w,
        None => resolved_window(resolved_count(cfg, &cfg.grid, &pos_sv)?.max(resolved_count(cfg, &cfg.grid, &neg_sv)?)),
    };
    let pexp = cfg.homogeneous_dimension() as f64 / cfg.gamma;
    let fit = |sv: &SingularValues| -> Result<AsymptoticFit> {
        if sv.len() <= window.1 {
            let mut padded = sv.values().to_vec();
            padded.resize(window.1 + 1, 0.0);
            return fit_or_zero(&SingularValues::new(padded, sv.method), pexp, window);
        }
        fit_or_zero(sv, pexp, window)
    };
    let fp = |x: &[f64]| cfg.f.eval(x).re.max(0.0);
    let fm = |x: &[f64]| (-cfg.f.eval(x).re).max(0.0);
    Ok(SignedExperiment {
        positive: SignedPart { measured: fit(&pos_sv)?, predicted: cfg.predicted_for(&fp)?, singular_values: pos_sv },
        negative: SignedPart { measured: fit(&neg_sv)?, predicted: cfg.predicted_for(&fm)?, singular_values: neg_sv },
    })
}

fn fit_or_zero(sv: &SingularValues, p: f64, window: (usize, usize)) -> Result<AsymptoticFit> {
    if sv.values()[window.0..=window.1].iter().all(|v| *v == 0.0) {
        return Ok(AsymptoticFit { exponent: 1.0 / p, constant: 0.0, window, stderr: 0.0 });
    }
    fit_weyl(sv, Some(p), Some(window))
}

/// Positive eigenvalues and absolute values of negative ones.
pub fn split_spectrum(ev: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let pos = ev.iter().filter(|v| **v > 0.0).cloned().collect();
    let neg = ev.iter().filter(|v| **v < 0.0).map(|v| -v).collect();
    (pos, neg)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaRow {
    pub z: f64,
    /// Trace of the grid matrix.
    pub discrete: f64,
    /// Trace of the torus operator: the grid sum completed by the
    /// frequencies above the grid's Nyquist limit.
    pub torus: f64,
    pub predicted: f64,
    pub relative_error: f64,
}

/// `Tr(M_{f^{2z}} (1+P)^{-z/m})` against
/// `Gamma((z - d_hom)/m) / Gamma(z/m) int f^{2z} tau(e^{-P})` in one dimension.
/// `relative_error` compares the torus trace with the prediction.
pub fn zeta_trace_check(p: &Symbol, grid: &Grid, f: &dyn Fn(&[f64]) -> f64, zs: &[f64]) -> Result<Vec<ZetaRow>> {
    if grid.dim() != 1 || p.dim() != 1 || grid.mode() != GridMode::FourierPeriodic {
        return invalid("zeta trace check runs on a one-dimensional periodic grid");
    }
    let m = p.weighted_degree(&[1]);
    if m == 0 || !p.is_homogeneous(&[1], m) {
        return invalid("zeta trace check needs a homogeneous symbol");
    }
    let d_hom = 1.0;
    let tau = tau_exp_aniso(p, &[1])?.value;
    let n = grid.len();
    let samples = grid.sample(f);
    check_support(grid, &samples)?;
    let l = grid.half_widths()[0];
    let h = grid.cell_volume();
    let mut rows = Vec::with_capacity(zs.len());
    for &z in zs {
        if !(z > d_hom) {
            return invalid(format!("z = {z} must exceed the homogeneous dimension"));
        }
        let e = z / m as f64;
        let d = |xi: f64| (1.0 + p.eval_re(&[xi]).max(0.0)).powf(-e);
        let grid_sum: f64 = (0..n).map(|k| d(grid.frequency(0, k))).sum();
        let first_missing = (n / 2) as f64;
        let tail = lattice_tail(&|k: f64| d(PI * k / l), first_missing)? + lattice_tail(&|k: f64| d(PI * k / l), first_missing + 1.0)?;
        let g_sum: f64 = samples.iter().map(|v| v.abs().powf(2.0 * z)).sum();
        let discrete = g_sum * grid_sum / n as f64;
        let torus = g_sum * (grid_sum + tail) / n as f64;
        let integral = g_sum * h;
        let predicted = gamma((z - d_hom) / m as f64) / gamma(e) * integral * tau;
        rows.push(ZetaRow { z, discrete, torus, predicted, relative_error: (torus - predicted).abs() / predicted.abs() });
    }
    Ok(rows)
}

/// `sum_{k >= k0} g(k)` for a smooth decreasing `g`: explicit terms up to
/// `k0 + 10^6`, then the integral with the trapezoid end correction.
fn lattice_tail(g: &dyn Fn(f64) -> f64, k0: f64) -> Result<f64> {
    let explicit = 1_000_000usize;
    let mut s = 0.0;
    for j in 0..explicit {
        s += g(k0 + j as f64);
    }
    let k1 = k0 + explicit as f64;
    // t = k1 e^u keeps slowly decaying power tails integrable by doubling
    let h = |u: f64| {
        let t = k1 * u.exp();
        if t.is_finite() { t * g(t) } else { 0.0 }
    };
    let q = integrate_to_infinity(h, 0.0, &QuadOptions::with_tol(1e-300, 1e-12)).require("lattice tail")?;
    Ok(s + q.value + 0.5 * g(k1))
}

/// Predicted-constant line and `(k+1)^{gamma/d_hom} mu(k)` on log axes.
pub fn weyl_plot_svg(sv: &SingularValues, exponent: f64, predicted: f64, window: (usize, usize)) -> String {
    let pts: Vec<(f64, f64)> = sv
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0)
        .map(|(k, v)| (((k + 1) as f64).log10(), ((k + 1) as f64).powf(exponent) * v))
        .collect();
    let (w, hgt, pad) = (640.0, 400.0, 50.0);
    let xmax = pts.iter().map(|p| p.0).fold(1.0, f64::max);
    let ymax = pts.iter().map(|p| p.1).fold(predicted, f64::max) * 1.2;
    let sx = |x: f64| pad + x / xmax * (w - 2.0 * pad);
    let sy = |y: f64| hgt - pad - (y / ymax).clamp(0.0, 1.0) * (hgt - 2.0 * pad);
    let mut path = String::new();
    for (i, (x, y)) in pts.iter().enumerate() {
        path.push_str(&format!("{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, sx(*x), sy(*y)));
    }
    let wx0 = sx(((window.0 + 1) as f64).log10());
    let wx1 = sx(((window.1 + 1) as f64).log10());
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{hgt}\" viewBox=\"0 0 {w} {hgt}\">\n\
         <rect x=\"{wx0:.2}\" y=\"{pad}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#eef\"/>\n\
         <line x1=\"{pad}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#c00\" stroke-dasharray=\"6 4\"/>\n\
         <path d=\"{path}\" fill=\"none\" stroke=\"#036\"/>\n\
         <line x1=\"{pad}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#000\"/>\n\
         <line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{:.2}\" stroke=\"#000\"/>\n\
         <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">log10(k+1)</text>\n\
         <text x=\"4\" y=\"{:.2}\" font-size=\"12\">k^a mu(k)</text>\n\
         <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"#c00\">predicted {predicted:.6}</text>\n</svg>\n",
        (wx1 - wx0).max(0.0),
        hgt - 2.0 * pad,
        sy(predicted),
        w - pad,
        sy(predicted),
        hgt - pad,
        w - pad,
        hgt - pad,
        hgt - pad,
        w / 2.0,
        hgt - 10.0,
        pad - 10.0,
        w - pad - 160.0,
        sy(predicted) - 6.0,
    )
}
