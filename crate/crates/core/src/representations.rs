//! Schrödinger representations of the Heisenberg group on truncated
//! Hermite bases, and representation-side traces.

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::lie::{GradedLieAlgebra, PreferredGenerators};
use crate::linalg::{hermitian_defect, herm_eigenvalues};
use crate::operators::{ConstDiffOp, Homogeneity};
use crate::quadrature::{mellin_integral, QuadOptions};
use crate::trace::{TraceMethod, TraceResult};

/// Fraction of the truncated spectrum kept when forming traces.
pub const RETAINED_FRACTION: f64 = 0.8;

/// Default truncation per mode.
pub const DEFAULT_TRUNCATION: usize = 60;

/// Tensor product Hermite basis with levels `0..N` in each of `n` modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OscillatorBasis {
    pub modes: usize,
    pub truncation: usize,
}

impl OscillatorBasis {
    pub fn new(modes: usize, truncation: usize) -> Result<Self> {
        if truncation < 2 {
            return invalid("truncation must be at least 2");
        }
        if modes == 0 {
            return invalid("at least one mode is required");
        }
        Ok(OscillatorBasis { modes, truncation })
    }

    pub fn size(&self) -> usize {
        self.truncation.pow(self.modes as u32)
    }
}

/// Position and momentum matrices `q = (a + a^*)/sqrt 2`,
/// `p = i(a^* - a)/sqrt 2` with `a|l> = sqrt(l)|l-1>`.
pub fn ladder_matrices(n: usize) -> (Mat<C64>, Mat<C64>) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut q = Mat::<C64>::zeros(n, n);
    let mut p = Mat::<C64>::zeros(n, n);
    for l in 0..n.saturating_sub(1) {
        let v = ((l + 1) as f64).sqrt() * s;
        q[(l, l + 1)] = C64::new(v, 0.0);
        q[(l + 1, l)] = C64::new(v, 0.0);
        // a^* has entry (l+1, l), a has entry (l, l+1)
        p[(l + 1, l)] = C64::new(0.0, v);
        p[(l, l + 1)] = C64::new(0.0, -v);
    }
    (q, p)
}

/// Sparse matrix as a list of `(row, col, value)`.
type Sparse = Vec<(usize, usize, C64)>;

fn ladder_sparse(n: usize, mode: usize, basis: &OscillatorBasis, momentum: bool, scale: C64) -> Sparse {
    let stride = n.pow(mode as u32);
    let size = basis.size();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(2 * size);
    for idx in 0..size {
        let l = (idx / stride) % n;
        if l + 1 < n {
            let v = ((l + 1) as f64).sqrt() * s;
            let up = idx + stride;
            if momentum {
                out.push((up, idx, scale * C64::new(0.0, v)));
                out.push((idx, up, scale * C64::new(0.0, -v)));
            } else {
                out.push((up, idx, scale * v));
                out.push((idx, up, scale * v));
            }
        }
    }
    out
}

/// Number of modes `n` if `alg` is the Heisenberg algebra of dimension
/// `2n + 1` in the standard basis.
pub fn heisenberg_modes(alg: &GradedLieAlgebra) -> Option<usize> {
    let d = alg.dim();
    if d < 3 || d % 2 == 0 {
        return None;
    }
    let n = (d - 1) / 2;
    let h = GradedLieAlgebra::heisenberg(n);
    let same = h.layers() == alg.layers()
        && (0..d).all(|i| (0..d).all(|j| (0..d).all(|k| h.structure_constant(i, j, k) == alg.structure_constant(i, j, k))));
    same.then_some(n)
}

/// The matrix of `pi_s(D)` on a truncated basis.
#[derive(Debug, Clone)]
pub struct RepMatrix {
    pub matrix: Mat<C64>,
    pub s: f64,
}

/// `Tr e^{-M}` on the retained part of the spectrum with a tail estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceExp {
    pub value: f64,
    pub error_estimate: f64,
    pub retained: usize,
}

impl RepMatrix {
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.matrix)
    }

    /// Ascending eigenvalues; fails for non-Hermitian input.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let scale = (0..self.size()).map(|i| self.matrix[(i, i)].norm()).fold(1.0, f64::max);
        let defect = self.hermitian_defect();
        if defect > 1e-10 * scale {
            return Err(Error::NotHermitian { defect });
        }
        herm_eigenvalues(&self.matrix)
    }

    /// Lowest `ceil(0.8 size)` eigenvalues, the part unaffected by truncation.
    pub fn retained_eigenvalues(&self) -> Result<Vec<f64>> {
        let mut ev = self.eigenvalues()?;
        ev.truncate(retained_count(ev.len()));
        Ok(ev)
    }
}

fn retained_count(size: usize) -> usize {
    ((size as f64 * RETAINED_FRACTION).ceil() as usize).clamp(1, size)
}

/// Substitutes `pi_s(X_j) = i sqrt|s| p_j`, `pi_s(X_{j+n}) = i sgn(s) sqrt|s| q_j`,
/// `pi_s(T) = i s` into every word of `d` and compresses to the span of the
/// basis.
pub fn rep_heisenberg(
    d: &ConstDiffOp,
    alg: &GradedLieAlgebra,
    gens: &PreferredGenerators,
    s: f64,
    basis: &OscillatorBasis,
) -> Result<RepMatrix> {
    if s == 0.0 || !s.is_finite() {
        return invalid("representation parameter s must be nonzero and finite");
    }
    let n = heisenberg_modes(alg).ok_or_else(|| Error::Unsupported("not a Heisenberg algebra".into()))?;
    if basis.modes != n {
        return invalid(format!("basis has {} modes, algebra needs {n}", basis.modes));
    }
    d.validate(gens)?;
    // Build on a padded basis so the kept block is the exact compression.
    let pad = d.terms().map(|(w, _)| w.len()).max().unwrap_or(0);
    let ext = OscillatorBasis::new(n, basis.truncation + pad)?;
    let size = ext.size();
    let nt = ext.truncation;
    let rs = s.abs().sqrt();
    let i = C64::new(0.0, 1.0);
    // letter matrices indexed by generator position
    let letters: Vec<Option<Sparse>> = gens
        .indices()
        .iter()
        .map(|&b| {
            if b < n {
                Some(ladder_sparse(nt, b, &ext, true, i * rs))
            } else if b < 2 * n {
                Some(ladder_sparse(nt, b - n, &ext, false, i * s.signum() * rs))
            } else {
                None // central: scalar i s
            }
        })
        .collect();
    let mut out = Mat::<C64>::zeros(size, size);
    for (w, c) in d.terms() {
        let mut acc = Mat::<C64>::zeros(size, size);
        let mut scalar = *c;
        for k in 0..size {
            acc[(k, k)] = C64::new(1.0, 0.0);
        }
        for &l in w.letters().iter().rev() {
            match &letters[l] {
                None => scalar *= i * s,
                Some(sp) => {
                    let mut next = Mat::<C64>::zeros(size, size);
                    for &(r, col, v) in sp {
                        for j in 0..size {
                            let a = acc[(col, j)];
                            if a != C64::new(0.0, 0.0) {
                                next[(r, j)] += v * a;
                            }
                        }
                    }
                    acc = next;
                }
            }
        }
        for jj in 0..size {
            for ii in 0..size {
                out[(ii, jj)] += scalar * acc[(ii, jj)];
            }
        }
    }
    let keep: Vec<usize> = (0..size)
        .filter(|&idx| (0..n).all(|j| (idx / nt.pow(j as u32)) % nt < basis.truncation))
        .collect();
    let matrix = Mat::from_fn(keep.len(), keep.len(), |a, b| out[(keep[a], keep[b])]);
    Ok(RepMatrix { matrix, s })
}

/// `Tr e^{-M}` from the retained eigenvalues. The tail estimate assumes the
/// discarded levels continue with the mean spacing of the top retained ones.
pub fn trace_exp_rep(m: &RepMatrix) -> Result<TraceExp> {
    let ev = m.eigenvalues()?;
    let k = retained_count(ev.len());
    let kept = &ev[..k];
    let value: f64 = kept.iter().map(|l| (-l).exp()).sum();
    let last = kept[k - 1];
    let w = (k - 1).min(10);
    let spacing = if w > 0 { ((last - kept[k - 1 - w]) / w as f64).max(1e-12) } else { 1.0 };
    let ratio = (-spacing).exp();
    let error_estimate = (-last).exp() * ratio / (1.0 - ratio);
    Ok(TraceExp { value, error_estimate, retained: k })
}

/// Options for the Plancherel-side trace.
#[derive(Debug, Clone, PartialEq)]
pub struct PlancherelOptions {
    /// Truncations per mode. Three levels in ratio two trigger Richardson
    /// extrapolation in `1/N`.
    pub truncations: Vec<usize>,
    pub quad: QuadOptions,
}

impl Default for PlancherelOptions {
    fn default() -> Self {
        PlancherelOptions {
            truncations: vec![DEFAULT_TRUNCATION, 2 * DEFAULT_TRUNCATION, 4 * DEFAULT_TRUNCATION],
            quad: QuadOptions::with_tol(1e-15, 1e-11),
        }
    }
}

impl PlancherelOptions {
    pub fn single(truncation: usize) -> Self {
        PlancherelOptions { truncations: vec![truncation], ..Default::default() }
    }
}

fn homogeneous_order(d: &ConstDiffOp, gens: &PreferredGenerators) -> Result<Option<u32>> {
    Ok(match d.check_homogeneity(gens)? {
        Homogeneity::Homogeneous(m) => Some(m),
        Homogeneity::Zero => return invalid("zero operator has no trace"),
        Homogeneity::Inhomogeneous { .. } => None,
    })
}

/// `(2 pi)^{-(3n+1)} int |s|^n Tr e^{-pi_s(D)} ds` by quadrature in `s`.
/// Homogeneous `D` of even order is reduced to the two half-line integrals
/// over `pi_{+1}` and `pi_{-1}`; otherwise the representation is rebuilt at
/// every quadrature node.
pub fn tau_heisenberg_plancherel(
    d: &ConstDiffOp,
    alg: &GradedLieAlgebra,
    gens: &PreferredGenerators,
    opts: &PlancherelOptions,
) -> Result<TraceResult> {
    let n = heisenberg_modes(alg).ok_or_else(|| Error::Unsupported("not a Heisenberg algebra".into()))?;
    let order = homogeneous_order(d, gens)?;
    let norm = (2.0 * std::f64::consts::PI).powi(-(3 * n as i32 + 1));
    let mut values = Vec::with_capacity(opts.truncations.len());
    for &nt in &opts.truncations {
        let basis = OscillatorBasis::new(n, nt)?;
        let v = match order {
            Some(m) if m % 2 == 0 => {
                let mut total = 0.0;
                for sign in [1.0, -1.0] {
                    let ev = rep_heisenberg(d, alg, gens, sign, &basis)?.retained_eigenvalues()?;
                    if ev[0] <= 0.0 {
                        return Err(Error::NotPositiveDefinite { min_eigenvalue: ev[0] });
                    }
                    let half = m as f64 / 2.0;
                    let g = |s: f64| ev.iter().map(|l| (-s.powf(half) * l).exp()).sum::<f64>();
                    total += mellin_integral(g, n as f64 + 1.0, &opts.quad)?.require("Plancherel quadrature")?.value;
                }
                total
            }
            _ => {
                let mut total = 0.0;
                for sign in [1.0, -1.0] {
                    let g = |s: f64| -> f64 {
                        rep_heisenberg(d, alg, gens, sign * s, &basis)
                            .and_then(|r| r.retained_eigenvalues())
                            .map(|ev| ev.iter().map(|l| (-l).exp()).sum())
                            .unwrap_or(f64::NAN)
                    };
                    let q = mellin_integral(g, n as f64 + 1.0, &opts.quad)?;
                    total += q.require("Plancherel quadrature")?.value;
                }
                total
            }
        };
        values.push(norm * v);
    }
    let (value, error_estimate) = extrapolate(&values, &opts.truncations);
    Ok(TraceResult { value, method: TraceMethod::HeisenbergPlancherel, error_estimate })
}

/// Richardson extrapolation in `1/N` for three truncations in ratio two;
/// otherwise the finest value with the last difference as error.
pub fn extrapolate(values: &[f64], truncations: &[usize]) -> (f64, f64) {
    let k = values.len();
    if k == 3 && truncations[1] == 2 * truncations[0] && truncations[2] == 2 * truncations[1] {
        let r1 = 2.0 * values[1] - values[0];
        let r2 = 2.0 * values[2] - values[1];
        let r = (4.0 * r2 - r1) / 3.0;
        return (r, (r - r2).abs());
    }
    if k >= 2 {
        return (values[k - 1], (values[k - 1] - values[k - 2]).abs());
    }
    (values[0], f64::NAN)
}

/// `(2 pi)^{-(3n+1)} (2/m) Gamma((2n+2)/m) sum_{s = +-1} Tr pi_s(D)^{-(2n+2)/m}`
/// for homogeneous `D` of even order `m`, with the same truncation handling
/// as [`tau_heisenberg_plancherel`].
pub fn tau_heisenberg_two_point(
    d: &ConstDiffOp,
    alg: &GradedLieAlgebra,
    gens: &PreferredGenerators,
    truncations: &[usize],
) -> Result<TraceResult> {
    let n = heisenberg_modes(alg).ok_or_else(|| Error::Unsupported("not a Heisenberg algebra".into()))?;
    let m = match homogeneous_order(d, gens)? {
        Some(m) if m % 2 == 0 => m as f64,
        _ => return Err(Error::Unsupported("two-point reduction needs homogeneous even order".into())),
    };
    let e = (2 * n + 2) as f64 / m;
    let pref = (2.0 * std::f64::consts::PI).powi(-(3 * n as i32 + 1)) * 2.0 / m * statrs::function::gamma::gamma(e);
    let mut values = Vec::new();
    for &nt in truncations {
        let basis = OscillatorBasis::new(n, nt)?;
        let mut total = 0.0;
        for sign in [1.0, -1.0] {
            let ev = rep_heisenberg(d, alg, gens, sign, &basis)?.retained_eigenvalues()?;
            if ev[0] <= 0.0 {
                return Err(Error::NotPositiveDefinite { min_eigenvalue: ev[0] });
            }
            total += ev.iter().map(|l| l.powf(-e)).sum::<f64>();
        }
        values.push(pref * total);
    }
    let (value, error_estimate) = extrapolate(&values, truncations);
    Ok(TraceResult { value, method: TraceMethod::HeisenbergPlancherel, error_estimate })
}

/// `-sum_{jk} a_{jk} X_j X_k` over the generators `X_1..X_{2n}`.
pub fn quadratic_operator(a: &[Vec<f64>]) -> ConstDiffOp {
    let mut terms = Vec::new();
    for (j, row) in a.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            if v != 0.0 {
                terms.push((vec![j, k], C64::new(-v, 0.0)));
            }
        }
    }
    ConstDiffOp::from_terms(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mul(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
        a * b
    }

    #[test]
    fn ladder_commutator() {
        for n in [2, 5, 12] {
            let (q, p) = ladder_matrices(n);
            let c = &mul(&q, &p) - &mul(&p, &q);
            for i in 0..n - 1 {
                for j in 0..n - 1 {
                    let expected = if i == j { C64::new(0.0, 1.0) } else { C64::new(0.0, 0.0) };
                    assert!((c[(i, j)] - expected).norm() < 1e-14);
                }
            }
            assert_relative_eq!(q[(2.min(n - 2), 2.min(n - 2) + 1)].re, ((2.min(n - 2) + 1) as f64).sqrt() / 2f64.sqrt());
        }
        let (q, p) = ladder_matrices(2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(q[(0, 1)], C64::new(h, 0.0));
        assert_eq!(q[(1, 0)], C64::new(h, 0.0));
        assert_eq!(p[(0, 1)], C64::new(0.0, -h));
        assert_eq!(p[(1, 0)], C64::new(0.0, h));
        assert_eq!(q[(0, 0)], C64::new(0.0, 0.0));
    }

    fn setup(n: usize) -> (GradedLieAlgebra, PreferredGenerators) {
        let h = GradedLieAlgebra::heisenberg(n);
        let all: Vec<usize> = (0..2 * n + 1).collect();
        let g = PreferredGenerators::new(&h, all).unwrap();
        (h, g)
    }

    #[test]
    fn central_element_is_scalar() {
        let (h, g) = setup(1);
        let t = ConstDiffOp::from_real_terms(&[(&[2], 1.0)]);
        let b = OscillatorBasis::new(1, 6).unwrap();
        let r = rep_heisenberg(&t, &h, &g, -2.5, &b).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let e = if i == j { C64::new(0.0, -2.5) } else { C64::new(0.0, 0.0) };
                assert_eq!(r.matrix[(i, j)], e);
            }
        }
        assert!(rep_heisenberg(&t, &h, &g, 0.0, &b).is_err());
    }

    #[test]
    fn sublaplacian_spectrum() {
        let (h, g) = setup(1);
        let d = quadratic_operator(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let b = OscillatorBasis::new(1, 30).unwrap();
        let r = rep_heisenberg(&d, &h, &g, 1.0, &b).unwrap();
        let ev = r.retained_eigenvalues().unwrap();
        for (l, e) in ev.iter().enumerate() {
            assert_relative_eq!(*e, (2 * l + 1) as f64, epsilon = 1e-10);
        }
    }

    #[test]
    fn commutator_word_matches_central_letter() {
        let (h, g) = setup(1);
        let comm = ConstDiffOp::from_real_terms(&[(&[0, 1], 1.0), (&[1, 0], -1.0)]);
        let t = ConstDiffOp::from_real_terms(&[(&[2], 1.0)]);
        let b = OscillatorBasis::new(1, 8).unwrap();
        for s in [1.0, -0.7] {
            let a = rep_heisenberg(&comm, &h, &g, s, &b).unwrap().matrix;
            let c = rep_heisenberg(&t, &h, &g, s, &b).unwrap().matrix;
            for i in 0..7 {
                for j in 0..7 {
                    assert!((a[(i, j)] - c[(i, j)]).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn homogeneity_in_s() {
        let (h, g) = setup(1);
        let d = ConstDiffOp::from_real_terms(&[(&[0, 0, 0, 0], 1.0), (&[1, 1, 1, 1], 1.0), (&[2, 2], -0.5)]);
        let b = OscillatorBasis::new(1, 10).unwrap();
        for s in [3.0, -0.4] {
            let a = rep_heisenberg(&d, &h, &g, s, &b).unwrap().matrix;
            let u = rep_heisenberg(&d, &h, &g, s.signum(), &b).unwrap().matrix;
            let f = s.abs().powi(2);
            for i in 0..10 {
                for j in 0..10 {
                    assert!((a[(i, j)] - u[(i, j)] * f).norm() < 1e-12 * (1.0 + a[(i, j)].norm()));
                }
            }
        }
    }

    #[test]
    fn oscillator_trace() {
        let (h, g) = setup(1);
        let d = quadratic_operator(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let b = OscillatorBasis::new(1, 60).unwrap();
        let t = trace_exp_rep(&rep_heisenberg(&d, &h, &g, 1.0, &b).unwrap()).unwrap();
        let e = std::f64::consts::E;
        assert_relative_eq!(t.value, 1.0 / (e - 1.0 / e), epsilon = 1e-12);
        let d2 = d.scale(2.0);
        let t2 = trace_exp_rep(&rep_heisenberg(&d2, &h, &g, 1.0, &b).unwrap()).unwrap();
        assert_relative_eq!(t2.value, 1.0 / (e * e - 1.0 / (e * e)), epsilon = 1e-12);
        let mut last = f64::INFINITY;
        for nt in [10, 20, 40, 80] {
            let b = OscillatorBasis::new(1, nt).unwrap();
            let t = trace_exp_rep(&rep_heisenberg(&d, &h, &g, 1.0, &b).unwrap()).unwrap();
            assert!(t.error_estimate < last);
            last = t.error_estimate;
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let (h, g) = setup(1);
        let d = ConstDiffOp::from_real_terms(&[(&[0], 1.0), (&[1, 1], -1.0)]);
        let b = OscillatorBasis::new(1, 6).unwrap();
        let r = rep_heisenberg(&d, &h, &g, 1.0, &b).unwrap();
        assert!(matches!(trace_exp_rep(&r), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn plancherel_sublaplacian() {
        let (h, g) = setup(1);
        let d = quadratic_operator(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let t = tau_heisenberg_plancherel(&d, &h, &g, &PlancherelOptions::default()).unwrap();
        let expected = 1.0 / (64.0 * std::f64::consts::PI.powi(2));
        assert_relative_eq!(t.value, expected, max_relative = 1e-5);
        let t2 = tau_heisenberg_plancherel(&d.scale(2.0), &h, &g, &PlancherelOptions::default()).unwrap();
        assert_relative_eq!(t2.value, expected / 4.0, max_relative = 1e-5);
    }

    #[test]
    fn two_point_matches_plancherel_quartic() {
        let (h, g) = setup(1);
        let d = ConstDiffOp::from_real_terms(&[(&[0, 0, 0, 0], 1.0), (&[1, 1, 1, 1], 1.0), (&[2, 2], -0.5)]);
        let opts = PlancherelOptions::single(40);
        let a = tau_heisenberg_plancherel(&d, &h, &g, &opts).unwrap();
        let b = tau_heisenberg_two_point(&d, &h, &g, &[40]).unwrap();
        assert_relative_eq!(a.value, b.value, max_relative = 1e-9);
    }

    #[test]
    fn general_path_matches_homogeneous_path() {
        let (h, g) = setup(1);
        let d = quadratic_operator(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        // A zero-order perturbation forces the s-by-s path: tau(e^{-(D + 1)}) = e^{-1} tau(e^{-D}).
        let shifted = d.add(&ConstDiffOp::scalar(1.0));
        let opts = PlancherelOptions { truncations: vec![16], quad: QuadOptions::with_tol(1e-14, 1e-9) };
        let a = tau_heisenberg_plancherel(&shifted, &h, &g, &opts).unwrap();
        let b = tau_heisenberg_plancherel(&d, &h, &g, &opts).unwrap();
        assert_relative_eq!(a.value, b.value * (-1f64).exp(), max_relative = 1e-7);
    }

    #[test]
    fn two_modes() {
        let (h, g) = setup(2);
        let id: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let d = quadratic_operator(&id);
        let b = OscillatorBasis::new(2, 8).unwrap();
        let r = rep_heisenberg(&d, &h, &g, 1.0, &b).unwrap();
        let ev = r.eigenvalues().unwrap();
        assert_relative_eq!(ev[0], 2.0, epsilon = 1e-10);
        assert_relative_eq!(ev[1], 4.0, epsilon = 1e-10);
        assert_relative_eq!(ev[2], 4.0, epsilon = 1e-10);
    }
}
