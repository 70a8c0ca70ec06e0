//! Differential operators as linear combinations of words in preferred
//! generators, their formal adjoints, frozen top parts and abelian symbols.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::lie::{GradedLieAlgebra, GroupPoint, PreferredGenerators};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A word `alpha_1 ... alpha_k` in generator positions, standing for
/// `X_{alpha_1} ... X_{alpha_k}` (the rightmost letter acts first).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut l = self.0.clone();
        l.extend_from_slice(&other.0);
        Word(l)
    }

    pub fn power(letter: usize, k: usize) -> Word {
        Word(vec![letter; k])
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

/// `len(alpha) = sum_j v_{alpha_j}`.
pub fn weighted_length(gens: &PreferredGenerators, w: &Word) -> Result<u32> {
    let deg = gens.degrees();
    w.0.iter().try_fold(0u32, |acc, &l| {
        deg.get(l)
            .map(|d| acc + d)
            .ok_or_else(|| Error::InvalidInput(format!("letter {l} is not a generator position")))
    })
}

fn check_word(gens: &PreferredGenerators, w: &Word) -> Result<()> {
    weighted_length(gens, w).map(|_| ())
}

/// Result of a homogeneity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogeneity {
    Homogeneous(u32),
    Inhomogeneous { min_order: u32, max_order: u32 },
    /// The zero operator, given order 0 by convention.
    Zero,
}

impl Homogeneity {
    pub fn order(&self) -> Option<u32> {
        match self {
            Homogeneity::Homogeneous(m) => Some(*m),
            Homogeneity::Zero => Some(0),
            Homogeneity::Inhomogeneous { .. } => None,
        }
    }
}

/// A constant coefficient operator `sum_alpha a_alpha X^alpha`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstDiffOp {
    terms: BTreeMap<Word, C64>,
}

impl ConstDiffOp {
    pub fn zero() -> Self {
        ConstDiffOp::default()
    }

    pub fn scalar(c: impl Into<C64>) -> Self {
        let mut op = ConstDiffOp::zero();
        op.add_term(Word::empty(), c.into());
        op
    }

    pub fn from_terms<W: Into<Word>>(terms: impl IntoIterator<Item = (W, C64)>) -> Self {
        let mut op = ConstDiffOp::zero();
        for (w, c) in terms {
            op.add_term(w.into(), c);
        }
        op
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real_terms(terms: &[(&[usize], f64)]) -> Self {
        ConstDiffOp::from_terms(terms.iter().map(|(w, c)| (Word(w.to_vec()), C64::new(*c, 0.0))))
    }

    pub fn add_term(&mut self, w: Word, c: C64) {
        let e = self.terms.entry(w.clone()).or_insert(ZERO);
        *e += c;
        if *e == ZERO {
            self.terms.remove(&w);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, w: &Word) -> C64 {
        self.terms.get(w).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| *c == ZERO)
    }

    pub fn validate(&self, gens: &PreferredGenerators) -> Result<()> {
        self.terms.keys().try_for_each(|w| check_word(gens, w))
    }

    /// Maximal weighted length over nonzero terms (0 for the zero operator).
    pub fn order(&self, gens: &PreferredGenerators) -> Result<u32> {
        let mut m = 0;
        for (w, c) in &self.terms {
            if *c != ZERO {
                m = m.max(weighted_length(gens, w)?);
            }
        }
        Ok(m)
    }

    pub fn check_homogeneity(&self, gens: &PreferredGenerators) -> Result<Homogeneity> {
        let mut lo = u32::MAX;
        let mut hi = 0;
        for (w, c) in &self.terms {
            if *c != ZERO {
                let l = weighted_length(gens, w)?;
                lo = lo.min(l);
                hi = hi.max(l);
            }
        }
        Ok(if lo == u32::MAX {
            Homogeneity::Zero
        } else if lo == hi {
            Homogeneity::Homogeneous(hi)
        } else {
            Homogeneity::Inhomogeneous { min_order: lo, max_order: hi }
        })
    }

    /// Terms of maximal weighted length.
    pub fn top_part(&self, gens: &PreferredGenerators) -> Result<ConstDiffOp> {
        let m = self.order(gens)?;
        let mut out = ConstDiffOp::zero();
        for (w, c) in &self.terms {
            if weighted_length(gens, w)? == m {
                out.add_term(w.clone(), *c);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: impl Into<C64>) -> ConstDiffOp {
        let s = s.into();
        ConstDiffOp::from_terms(self.terms.iter().map(|(w, c)| (w.clone(), c * s)))
    }

    pub fn add(&self, other: &ConstDiffOp) -> ConstDiffOp {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), *c);
        }
        out
    }

    pub fn neg(&self) -> ConstDiffOp {
        self.scale(-1.0)
    }

    /// Operator product `self ∘ other`.
    pub fn compose(&self, other: &ConstDiffOp) -> ConstDiffOp {
        let mut out = ConstDiffOp::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                out.add_term(w1.concat(w2), c1 * c2);
            }
        }
        out
    }

    /// `(c X^alpha)^dagger = (-1)^{|alpha|} conj(c) X^{reversed alpha}`.
    pub fn adjoint(&self) -> ConstDiffOp {
        ConstDiffOp::from_terms(self.terms.iter().map(|(w, c)| {
            let sign = if w.len() % 2 == 0 { 1.0 } else { -1.0 };
            (w.reversed(), c.conj() * sign)
        }))
    }

    /// Largest coefficient difference to another operator.
    pub fn distance(&self, other: &ConstDiffOp) -> f64 {
        let diff = self.add(&other.neg());
        diff.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sorts letters using commutation relations. Supported for abelian
    /// algebras, and for step-two algebras whose generator brackets lie in
    /// the span of the generators.
    pub fn normal_form(&self, alg: &GradedLieAlgebra, gens: &PreferredGenerators) -> Result<ConstDiffOp> {
        self.validate(gens)?;
        if alg.is_abelian() {
            return Ok(ConstDiffOp::from_terms(self.terms.iter().map(|(w, c)| {
                let mut l = w.0.clone();
                l.sort_unstable();
                (Word(l), *c)
            })));
        }
        if alg.step() != 2 {
            return Err(Error::Unsupported("normal form beyond step two".into()));
        }
        // bracket of generator positions as a combination of generator positions
        let idx = gens.indices();
        let mut table = vec![vec![Vec::<(usize, f64)>::new(); idx.len()]; idx.len()];
        for (a, &ia) in idx.iter().enumerate() {
            for (b, &ib) in idx.iter().enumerate() {
                for k in 0..alg.dim() {
                    let c = alg.structure_constant(ia, ib, k);
                    if c == 0.0 {
                        continue;
                    }
                    let pos = idx.iter().position(|&g| g == k).ok_or_else(|| {
                        Error::Unsupported(format!(
                            "bracket of generators {a}, {b} leaves the generator span"
                        ))
                    })?;
                    table[a][b].push((pos, c));
                }
            }
        }
        let mut pending: Vec<(Vec<usize>, C64)> = self.terms.iter().map(|(w, c)| (w.0.clone(), *c)).collect();
        let mut out = ConstDiffOp::zero();
        while let Some((w, c)) = pending.pop() {
            match w.windows(2).position(|p| p[0] > p[1]) {
                None => out.add_term(Word(w), c),
                Some(i) => {
                    let (a, b) = (w[i], w[i + 1]);
                    let mut swapped = w.clone();
                    swapped.swap(i, i + 1);
                    pending.push((swapped, c));
                    for &(k, s) in &table[a][b] {
                        let mut shorter = w[..i].to_vec();
                        shorter.push(k);
                        shorter.extend_from_slice(&w[i + 2..]);
                        pending.push((shorter, c * s));
                    }
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for ConstDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            for l in &w.0 {
                write!(f, "·X{}", l + 1)?;
            }
        }
        Ok(())
    }
}

/// `Delta_G = -sum_j (-1)^{v/v_j} X_j^{2v/v_j}`. The operator `-Delta_G`
/// is positive, homogeneous of order `2v`.
pub fn canonical_laplacian(gens: &PreferredGenerators) -> ConstDiffOp {
    let v = gens.lcm_degree();
    let mut op = ConstDiffOp::zero();
    for (j, &vj) in gens.degrees().iter().enumerate() {
        let ratio = v / vj;
        let sign = if ratio % 2 == 0 { 1.0 } else { -1.0 };
        op.add_term(Word::power(j, 2 * ratio as usize), C64::new(-sign, 0.0));
    }
    op
}

/// Polynomial in dual variables `xi_1..xi_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    dim: usize,
    terms: BTreeMap<Vec<u32>, C64>,
}

impl Symbol {
    pub fn new(dim: usize) -> Self {
        Symbol { dim, terms: BTreeMap::new() }
    }

    pub fn from_terms(dim: usize, terms: &[(Vec<u32>, C64)]) -> Self {
        let mut s = Symbol::new(dim);
        for (e, c) in terms {
            s.add_term(e.clone(), *c);
        }
        s
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: C64) {
        assert_eq!(exponents.len(), self.dim, "exponent vector has wrong length");
        let e = self.terms.entry(exponents.clone()).or_insert(ZERO);
        *e += c;
        if *e == ZERO {
            self.terms.remove(&exponents);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C64)> {
        self.terms.iter()
    }

    pub fn eval(&self, xi: &[f64]) -> C64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mono: f64 = e.iter().zip(xi).map(|(&k, &x)| x.powi(k as i32)).product();
                c * mono
            })
            .sum()
    }

    /// Real part at `xi`.
    pub fn eval_re(&self, xi: &[f64]) -> f64 {
        self.eval(xi).re
    }

    /// Weighted degree of a monomial.
    fn degree(e: &[u32], weights: &[u32]) -> u32 {
        e.iter().zip(weights).map(|(k, w)| k * w).sum()
    }

    /// Highest weighted degree among the terms.
    pub fn weighted_degree(&self, weights: &[u32]) -> u32 {
        self.terms.keys().map(|e| Self::degree(e, weights)).max().unwrap_or(0)
    }

    /// Terms of top weighted degree.
    pub fn principal(&self, weights: &[u32]) -> Symbol {
        let m = self.weighted_degree(weights);
        let mut s = Symbol::new(self.dim);
        for (e, c) in &self.terms {
            if Self::degree(e, weights) == m {
                s.add_term(e.clone(), *c);
            }
        }
        s
    }

    /// `true` if every term has weighted degree `m`.
    pub fn is_homogeneous(&self, weights: &[u32], m: u32) -> bool {
        self.terms.keys().all(|e| Self::degree(e, weights) == m)
    }

    pub fn conj(&self) -> Symbol {
        let mut s = Symbol::new(self.dim);
        for (e, c) in &self.terms {
            s.add_term(e.clone(), c.conj());
        }
        s
    }

    /// `true` if all coefficients are real.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im == 0.0)
    }

    /// Scales by `c`.
    pub fn scale(&self, c: f64) -> Symbol {
        let mut s = Symbol::new(self.dim);
        for (e, v) in &self.terms {
            s.add_term(e.clone(), v * c);
        }
        s
    }

    /// `|xi|^2` in `d` variables.
    pub fn laplacian(d: usize) -> Symbol {
        let mut s = Symbol::new(d);
        for j in 0..d {
            let mut e = vec![0; d];
            e[j] = 2;
            s.add_term(e, C64::new(1.0, 0.0));
        }
        s
    }

    /// `xi^T A xi` for a symmetric matrix given row-major.
    pub fn quadratic(a: &[Vec<f64>]) -> Symbol {
        let d = a.len();
        let mut s = Symbol::new(d);
        for i in 0..d {
            for j in 0..d {
                let mut e = vec![0; d];
                e[i] += 1;
                e[j] += 1;
                s.add_term(e, C64::new(a[i][j], 0.0));
            }
        }
        s
    }
}

/// Full symbol `sum_alpha i^{|alpha|} a_alpha xi^alpha` on an abelian group.
pub fn abelian_symbol(op: &ConstDiffOp, alg: &GradedLieAlgebra, gens: &PreferredGenerators) -> Result<Symbol> {
    if !alg.is_abelian() {
        return Err(Error::Unsupported("abelian symbol of an operator on a non-abelian group".into()));
    }
    let d = alg.dim();
    let mut s = Symbol::new(d);
    for (w, c) in op.terms() {
        check_word(gens, w)?;
        let mut e = vec![0u32; d];
        for &l in &w.0 {
            e[gens.indices()[l]] += 1;
        }
        s.add_term(e, c * I.powu(w.len() as u32));
    }
    Ok(s)
}

/// A coefficient function with declared support and sup-norm bounds.
#[derive(Clone)]
pub struct Coefficient {
    kind: CoefficientKind,
    /// Radius of a centered ball containing the support, if compact.
    pub support_radius: Option<f64>,
    pub sup_bound: f64,
    pub label: String,
}

pub type CustomFn = Arc<dyn Fn(&[f64]) -> C64 + Send + Sync>;

#[derive(Clone)]
pub enum CoefficientKind {
    Constant(C64),
    /// `sum_k a_k exp(i omega_k . x)`.
    TrigPolynomial(Vec<(C64, Vec<f64>)>),
    /// `q(x) exp(-sum_j (x_j - c_j)^2 / w_j^2)` with polynomial `q`.
    PolyGaussian { poly: Vec<(C64, Vec<u32>)>, center: Vec<f64>, widths: Vec<f64> },
    /// `a exp(1 - 1/(1 - r^2))` for `r = |x - c| / R < 1`, zero outside.
    CompactBump { amplitude: f64, center: Vec<f64>, radius: f64 },
    Custom(CustomFn),
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Coefficient")
            .field("label", &self.label)
            .field("support_radius", &self.support_radius)
            .field("sup_bound", &self.sup_bound)
            .finish()
    }
}

impl Coefficient {
    pub fn constant(c: impl Into<C64>) -> Self {
        let c = c.into();
        Coefficient {
            kind: CoefficientKind::Constant(c),
            support_radius: if c == ZERO { Some(0.0) } else { None },
            sup_bound: c.norm(),
            label: format!("const({c})"),
        }
    }

    /// `c0 + sum_k (a_k cos(omega_k . x) + b_k sin(omega_k . x))`.
    pub fn trig(c0: f64, terms: &[(f64, f64, Vec<f64>)]) -> Self {
        let d = terms.first().map(|t| t.2.len()).unwrap_or(1);
        let mut t = vec![(C64::new(c0, 0.0), vec![0.0; d])];
        let mut bound = c0.abs();
        for (a, b, w) in terms {
            // a cos + b sin = (a - ib)/2 e^{iwx} + (a + ib)/2 e^{-iwx}
            t.push((C64::new(*a, -*b) * 0.5, w.clone()));
            t.push((C64::new(*a, *b) * 0.5, w.iter().map(|x| -x).collect()));
            bound += a.hypot(*b);
        }
        Coefficient {
            kind: CoefficientKind::TrigPolynomial(t),
            support_radius: None,
            sup_bound: bound,
            label: "trig".into(),
        }
    }

    /// `amplitude * exp(-sum_j (x_j - c_j)^2 / w_j^2)`.
    pub fn gaussian(amplitude: f64, center: Vec<f64>, widths: Vec<f64>) -> Self {
        let d = center.len();
        Coefficient {
            kind: CoefficientKind::PolyGaussian {
                poly: vec![(C64::new(amplitude, 0.0), vec![0; d])],
                center,
                widths,
            },
            support_radius: None,
            sup_bound: amplitude.abs(),
            label: "gaussian".into(),
        }
    }

    /// `q(x) * exp(-sum_j (x_j - c_j)^2 / w_j^2)`.
    pub fn poly_gaussian(poly: Vec<(f64, Vec<u32>)>, center: Vec<f64>, widths: Vec<f64>) -> Self {
        let mut c = Coefficient::gaussian(1.0, center, widths);
        let bound: f64 = poly.iter().map(|(a, _)| a.abs()).sum();
        if let CoefficientKind::PolyGaussian { poly: p, .. } = &mut c.kind {
            *p = poly.into_iter().map(|(a, e)| (C64::new(a, 0.0), e)).collect();
        }
        // crude bound: the gaussian beats any polynomial, sample for a bound
        c.sup_bound = bound.max(c.sample_sup(4.0));
        c.label = "poly_gaussian".into();
        c
    }

    pub fn compact_bump(amplitude: f64, center: Vec<f64>, radius: f64) -> Self {
        let r0 = center.iter().map(|c| c * c).sum::<f64>().sqrt();
        Coefficient {
            kind: CoefficientKind::CompactBump { amplitude, center, radius },
            support_radius: Some(r0 + radius),
            sup_bound: amplitude.abs(),
            label: "compact_bump".into(),
        }
    }

    pub fn custom(f: CustomFn, support_radius: Option<f64>, sup_bound: f64, label: &str) -> Self {
        Coefficient { kind: CoefficientKind::Custom(f), support_radius, sup_bound, label: label.into() }
    }

    pub fn kind(&self) -> &CoefficientKind {
        &self.kind
    }

    fn sample_sup(&self, extent: f64) -> f64 {
        if let CoefficientKind::PolyGaussian { center, widths, .. } = &self.kind {
            let d = center.len();
            let n = 41usize;
            let total = n.pow(d as u32);
            (0..total)
                .map(|mut k| {
                    let x: Vec<f64> = (0..d)
                        .map(|j| {
                            let t = (k % n) as f64 / (n - 1) as f64;
                            k /= n;
                            center[j] + widths[j] * extent * (2.0 * t - 1.0)
                        })
                        .collect();
                    self.eval(&x).norm()
                })
                .fold(0.0, f64::max)
        } else {
            self.sup_bound
        }
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        match &self.kind {
            CoefficientKind::Constant(c) => *c,
            CoefficientKind::TrigPolynomial(t) => t
                .iter()
                .map(|(a, w)| {
                    let ph: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
                    a * C64::from_polar(1.0, ph)
                })
                .sum(),
            CoefficientKind::PolyGaussian { poly, center, widths } => {
                let q: f64 = center
                    .iter()
                    .zip(widths)
                    .zip(x)
                    .map(|((c, w), xi)| ((xi - c) / w).powi(2))
                    .sum();
                let g = (-q).exp();
                let p: C64 = poly
                    .iter()
                    .map(|(a, e)| a * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
                    .sum();
                p * g
            }
            CoefficientKind::CompactBump { amplitude, center, radius } => {
                let r2: f64 = center.iter().zip(x).map(|(c, xi)| (xi - c).powi(2)).sum::<f64>() / radius.powi(2);
                if r2 >= 1.0 {
                    ZERO
                } else {
                    C64::new(amplitude * (1.0 - 1.0 / (1.0 - r2)).exp(), 0.0)
                }
            }
            CoefficientKind::Custom(f) => f(x),
        }
    }

    pub fn eval_point(&self, g: &GroupPoint) -> C64 {
        self.eval(g.coords())
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, CoefficientKind::Constant(_))
    }

    pub fn is_identically_zero(&self) -> bool {
        matches!(self.kind, CoefficientKind::Constant(c) if c == ZERO)
    }

    pub fn conj(&self) -> Coefficient {
        let kind = match &self.kind {
            CoefficientKind::Constant(c) => CoefficientKind::Constant(c.conj()),
            CoefficientKind::TrigPolynomial(t) => CoefficientKind::TrigPolynomial(
                t.iter().map(|(a, w)| (a.conj(), w.iter().map(|x| -x).collect())).collect(),
            ),
            CoefficientKind::PolyGaussian { poly, center, widths } => CoefficientKind::PolyGaussian {
                poly: poly.iter().map(|(a, e)| (a.conj(), e.clone())).collect(),
                center: center.clone(),
                widths: widths.clone(),
            },
            CoefficientKind::CompactBump { .. } => self.kind.clone(),
            CoefficientKind::Custom(f) => {
                let f = f.clone();
                CoefficientKind::Custom(Arc::new(move |x| f(x).conj()))
            }
        };
        Coefficient { kind, label: format!("conj({})", self.label), ..self.clone() }
    }

    pub fn scale(&self, s: C64) -> Coefficient {
        let kind = match &self.kind {
            CoefficientKind::Constant(c) => CoefficientKind::Constant(c * s),
            CoefficientKind::TrigPolynomial(t) => {
                CoefficientKind::TrigPolynomial(t.iter().map(|(a, w)| (a * s, w.clone())).collect())
            }
            CoefficientKind::PolyGaussian { poly, center, widths } => CoefficientKind::PolyGaussian {
                poly: poly.iter().map(|(a, e)| (a * s, e.clone())).collect(),
                center: center.clone(),
                widths: widths.clone(),
            },
            _ => {
                let me = self.clone();
                CoefficientKind::Custom(Arc::new(move |x| me.eval(x) * s))
            }
        };
        Coefficient { kind, sup_bound: self.sup_bound * s.norm(), ..self.clone() }
    }

    /// Partial derivative along coordinate `axis`, when available in closed form.
    pub fn derivative(&self, axis: usize) -> Option<Coefficient> {
        let kind = match &self.kind {
            CoefficientKind::Constant(_) => CoefficientKind::Constant(ZERO),
            CoefficientKind::TrigPolynomial(t) => CoefficientKind::TrigPolynomial(
                t.iter()
                    .filter(|(_, w)| w.get(axis).copied().unwrap_or(0.0) != 0.0)
                    .map(|(a, w)| (a * I * w[axis], w.clone()))
                    .collect(),
            ),
            CoefficientKind::PolyGaussian { poly, center, widths } => {
                // d/dx (q g) = (dq/dx) g - 2 (x - c)/w^2 q g
                let mut out: Vec<(C64, Vec<u32>)> = Vec::new();
                let w2 = widths[axis] * widths[axis];
                for (a, e) in poly {
                    if e[axis] > 0 {
                        let mut de = e.clone();
                        de[axis] -= 1;
                        out.push((a * e[axis] as f64, de));
                    }
                    let mut up = e.clone();
                    up[axis] += 1;
                    out.push((a * (-2.0 / w2), up));
                    out.push((a * (2.0 * center[axis] / w2), e.clone()));
                }
                CoefficientKind::PolyGaussian { poly: out, center: center.clone(), widths: widths.clone() }
            }
            CoefficientKind::CompactBump { .. } | CoefficientKind::Custom(_) => return None,
        };
        let mut c = Coefficient {
            kind,
            support_radius: self.support_radius,
            sup_bound: f64::NAN,
            label: format!("d{axis}({})", self.label),
        };
        c.sup_bound = match &c.kind {
            CoefficientKind::Constant(v) => v.norm(),
            CoefficientKind::TrigPolynomial(t) => t.iter().map(|(a, _)| a.norm()).sum(),
            _ => c.sample_sup(4.0),
        };
        Some(c)
    }

    /// Product of two coefficients.
    pub fn mul(&self, other: &Coefficient) -> Coefficient {
        match (&self.kind, &other.kind) {
            (CoefficientKind::Constant(a), _) => other.scale(*a),
            (_, CoefficientKind::Constant(b)) => self.scale(*b),
            _ => {
                let (a, b) = (self.clone(), other.clone());
                let support = match (self.support_radius, other.support_radius) {
                    (Some(r), Some(s)) => Some(r.min(s)),
                    (r, s) => r.or(s),
                };
                Coefficient::custom(
                    Arc::new(move |x| a.eval(x) * b.eval(x)),
                    support,
                    self.sup_bound * other.sup_bound,
                    &format!("{}*{}", self.label, other.label),
                )
            }
        }
    }
}

/// Where the multiplication operator sits relative to the word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// `M_a X^alpha` (standard form).
    Left,
    /// `X^alpha M_a` (adjoint normal form).
    Right,
}

#[derive(Debug, Clone)]
pub struct Term {
    pub word: Word,
    pub coeff: Coefficient,
    pub placement: Placement,
}

/// A variable coefficient operator `sum_alpha a_alpha X^alpha`.
#[derive(Debug, Clone, Default)]
pub struct DiffOp {
    terms: Vec<Term>,
}

/// Frozen top-order part together with a degeneracy flag.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenTop {
    pub op: ConstDiffOp,
    /// All top-order coefficients vanish at the point.
    pub degenerate: bool,
}

impl DiffOp {
    pub fn new() -> Self {
        DiffOp::default()
    }

    pub fn from_const(op: &ConstDiffOp) -> Self {
        let mut d = DiffOp::new();
        for (w, c) in op.terms() {
            d.push(w.clone(), Coefficient::constant(*c));
        }
        d
    }

    /// Adds `M_a X^alpha`.
    pub fn push(&mut self, word: Word, coeff: Coefficient) {
        self.terms.push(Term { word, coeff, placement: Placement::Left });
    }

    /// Adds `X^alpha M_a`.
    pub fn push_right(&mut self, word: Word, coeff: Coefficient) {
        self.terms.push(Term { word, coeff, placement: Placement::Right });
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_standard(&self) -> bool {
        self.terms.iter().all(|t| t.placement == Placement::Left)
    }

    pub fn order(&self, gens: &PreferredGenerators) -> Result<u32> {
        let mut m = 0;
        for t in &self.terms {
            if !t.coeff.is_identically_zero() {
                m = m.max(weighted_length(gens, &t.word)?);
            }
        }
        Ok(m)
    }

    /// `P_g^top = sum_{len(alpha) = m} a_alpha(g) X^alpha`. Right-placed terms
    /// contribute the same top part as their standard form.
    pub fn freeze_top(&self, gens: &PreferredGenerators, g: &GroupPoint) -> Result<FrozenTop> {
        let m = self.order(gens)?;
        let mut op = ConstDiffOp::zero();
        for t in &self.terms {
            if weighted_length(gens, &t.word)? == m {
                op.add_term(t.word.clone(), t.coeff.eval_point(g));
            }
        }
        let degenerate = op.is_zero();
        Ok(FrozenTop { op, degenerate })
    }

    /// `(M_a X^alpha)^dagger = (-1)^{|alpha|} X^{reversed alpha} M_{conj a}`.
    pub fn formal_adjoint(&self) -> DiffOp {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let sign = if t.word.len() % 2 == 0 { 1.0 } else { -1.0 };
                Term {
                    word: t.word.reversed(),
                    coeff: t.coeff.conj().scale(C64::new(sign, 0.0)),
                    placement: match t.placement {
                        Placement::Left => Placement::Right,
                        Placement::Right => Placement::Left,
                    },
                }
            })
            .collect();
        DiffOp { terms }
    }

    /// Rewrites right-placed terms in standard form with the Leibniz rule
    /// `X^beta M_b = sum_S M_{X^{beta_S} b} X^{beta_{S^c}}`. Needs closed-form
    /// coefficient derivatives, available for constant coefficients and for
    /// built-in coefficients on abelian groups.
    pub fn expand_standard(&self, alg: &GradedLieAlgebra, gens: &PreferredGenerators) -> Result<DiffOp> {
        let mut out = DiffOp::new();
        for t in &self.terms {
            check_word(gens, &t.word)?;
            if t.placement == Placement::Left {
                out.terms.push(t.clone());
                continue;
            }
            if t.coeff.is_constant() {
                out.push(t.word.clone(), t.coeff.clone());
                continue;
            }
            if !alg.is_abelian() {
                return Err(Error::Unsupported(
                    "coefficient derivatives along non-abelian vector fields".into(),
                ));
            }
            let k = t.word.len();
            for mask in 0u64..(1u64 << k) {
                let mut c = t.coeff.clone();
                let mut rest = Vec::new();
                for (pos, &l) in t.word.0.iter().enumerate() {
                    if mask & (1 << pos) != 0 {
                        c = c.derivative(gens.indices()[l]).ok_or_else(|| {
                            Error::Unsupported(format!("derivative of coefficient '{}'", t.coeff.label))
                        })?;
                    } else {
                        rest.push(l);
                    }
                }
                if !c.is_identically_zero() {
                    out.push(Word(rest), c);
                }
            }
        }
        Ok(out)
    }

    /// Applies each coefficient at `g` and sums, placement ignored. Only
    /// meaningful for constant coefficient operators.
    pub fn to_const(&self, g: &GroupPoint) -> ConstDiffOp {
        let mut op = ConstDiffOp::zero();
        for t in &self.terms {
            op.add_term(t.word.clone(), t.coeff.eval_point(g));
        }
        op
    }
}

/// How positivity of the frozen top part is probed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RocklandMode {
    /// Sample the principal symbol on the anisotropic unit sphere.
    Abelian { samples: usize },
    /// Smallest eigenvalue of the truncated representations `pi_{+1}, pi_{-1}`.
    Heisenberg { truncation: usize },
}

impl RocklandMode {
    /// Default sample count for a `d`-dimensional abelian group.
    pub fn abelian_default(d: usize) -> Self {
        RocklandMode::Abelian { samples: if d <= 2 { 10_000 } else { 100_000 } }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocklandReport {
    /// Minimum of the sampled quantity, an estimate of `c_P`.
    pub lower_bound: f64,
    pub passed: bool,
    pub samples: usize,
}

/// Threshold above which a sampled minimum counts as a positivity certificate.
pub const ROCKLAND_TOL: f64 = 1e-9;

/// Points of the anisotropic sphere `sum_j s_j^{2v/v_j} = 1`, obtained from
/// quasi-uniform points `omega` of the round sphere through
/// `s_j = sgn(omega_j) |omega_j|^{v_j / v}`.
pub fn anisotropic_sphere_samples(layers: &[u32], count: usize) -> Vec<Vec<f64>> {
    let d = layers.len();
    let v = layers.iter().copied().fold(1, |a, b| a / gcd(a, b) * b) as f64;
    round_sphere_samples(d, count)
        .into_iter()
        .map(|w| {
            w.iter()
                .zip(layers)
                .map(|(x, &vj)| x.signum() * x.abs().powf(vj as f64 / v))
                .collect()
        })
        .collect()
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Quasi-uniform points on `S^{d-1}`: equispaced angles for `d = 2`, a
/// Fibonacci lattice for `d = 3`, seeded normal samples otherwise.
pub fn round_sphere_samples(d: usize, count: usize) -> Vec<Vec<f64>> {
    match d {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
        _ => {
            use rand::SeedableRng;
            use rand_distr::{Distribution, StandardNormal};
            let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
            (0..count)
                .map(|_| {
                    let x: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    x.into_iter().map(|v| v / n).collect()
                })
                .collect()
        }
    }
}

/// Sufficient positivity check for the top part of `op`.
pub fn rockland_check(
    op: &ConstDiffOp,
    alg: &GradedLieAlgebra,
    gens: &PreferredGenerators,
    mode: RocklandMode,
) -> Result<RocklandReport> {
    let top = op.top_part(gens)?;
    match mode {
        RocklandMode::Abelian { samples } => {
            let sym = abelian_symbol(&top, alg, gens)?;
            let pts = anisotropic_sphere_samples(alg.layers(), samples);
            let min = pts.iter().map(|s| sym.eval_re(s)).fold(f64::INFINITY, f64::min);
            Ok(RocklandReport { lower_bound: min, passed: min > ROCKLAND_TOL, samples: pts.len() })
        }
        RocklandMode::Heisenberg { truncation } => {
            let n = crate::representations::heisenberg_modes(alg)
                .ok_or_else(|| Error::Unsupported("Heisenberg mode on a non-Heisenberg algebra".into()))?;
            let basis = crate::representations::OscillatorBasis::new(n, truncation)?;
            let mut min = f64::INFINITY;
            for s in [1.0, -1.0] {
                let m = crate::representations::rep_heisenberg(&top, alg, gens, s, &basis)?;
                let ev = m.eigenvalues()?;
                min = min.min(ev[0]);
            }
            Ok(RocklandReport { lower_bound: min, passed: min > ROCKLAND_TOL, samples: 2 })
        }
    }
}

/// Parses the textual description of an operator term, e.g. `"X1 X1"`
/// or `"1 1"`, into a word, resolving labels through the algebra.
pub fn parse_word(text: &str, alg: &GradedLieAlgebra, gens: &PreferredGenerators) -> Result<Word> {
    let mut letters = Vec::new();
    for tok in text.split(|c: char| c.is_whitespace() || c == '*' || c == ',').filter(|t| !t.is_empty()) {
        let basis = alg.labels().iter().position(|l| l == tok);
        let pos = match basis {
            Some(b) => gens.indices().iter().position(|&g| g == b),
            None => None,
        };
        match pos {
            Some(p) => letters.push(p),
            None => return invalid(format!("'{tok}' is not a preferred generator label")),
        }
    }
    Ok(Word(letters))
}
