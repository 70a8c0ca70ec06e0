//! Graded nilpotent Lie algebras in exponential coordinates.
//!
//! A [`GradedLieAlgebra`] stores structure constants `c[i][j][k]` for
//! `[X_i, X_j] = sum_k c[i][j][k] X_k` together with the layer of every
//! basis vector. The simply connected group is identified with the algebra
//! through the exponential map, so group points are coordinate vectors and
//! the product is given by the Baker-Campbell-Hausdorff series, which
//! terminates for nilpotent algebras.

use std::fmt;

use serde::Deserialize;

use crate::error::{invalid, Error, Result};

const JACOBI_TOL: f64 = 1e-12;
const RANK_TOL: f64 = 1e-10;
/// Highest nilpotency step for which [`GradedLieAlgebra::group_mult`] is exact.
pub const MAX_BCH_STEP: usize = 4;

/// A point of the group in exponential coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPoint(pub Vec<f64>);

impl GroupPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        GroupPoint(coords)
    }

    pub fn identity(dim: usize) -> Self {
        GroupPoint(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Group inverse. In exponential coordinates this is negation.
    pub fn inverse(&self) -> GroupPoint {
        GroupPoint(self.0.iter().map(|x| -x).collect())
    }
}

impl From<Vec<f64>> for GroupPoint {
    fn from(v: Vec<f64>) -> Self {
        GroupPoint(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradedLieAlgebra {
    dim: usize,
    labels: Vec<String>,
    structure: Vec<f64>,
    layers: Vec<u32>,
}

/// The invariants checked by [`GradedLieAlgebra::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    Antisymmetry,
    Jacobi,
    Grading,
    Nilpotency,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantCheck {
    pub invariant: Invariant,
    pub passed: bool,
    /// First index triple at which the invariant fails.
    pub first_violation: Option<[usize; 3]>,
    pub max_defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<InvariantCheck>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, invariant: Invariant) -> &InvariantCheck {
        self.checks
            .iter()
            .find(|c| c.invariant == invariant)
            .expect("every invariant is checked")
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            write!(f, "{:?}: {status} (max defect {:.3e})", c.invariant, c.max_defect)?;
            if let Some([i, j, k]) = c.first_violation {
                write!(f, " first violation at ({i}, {j}, {k})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    algebra: AlgebraSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraSection {
    dim: usize,
    #[serde(default)]
    labels: Option<Vec<String>>,
    layers: Vec<u32>,
    #[serde(default)]
    brackets: Vec<(usize, usize, usize, f64)>,
}

impl GradedLieAlgebra {
    /// Builds an algebra from nonzero brackets `(i, j, k, c)` meaning
    /// `[X_i, X_j]` has coefficient `c` along `X_k`. The antisymmetric partner
    /// `[X_j, X_i]` is filled in automatically.
    pub fn new(
        labels: Vec<String>,
        layers: Vec<u32>,
        brackets: &[(usize, usize, usize, f64)],
    ) -> Result<Self> {
        let dim = layers.len();
        if dim == 0 {
            return invalid("algebra dimension must be positive");
        }
        if labels.len() != dim {
            return invalid(format!("{} labels for dimension {dim}", labels.len()));
        }
        if let Some(i) = layers.iter().position(|&w| w == 0) {
            return invalid(format!("layer of basis vector {i} must be positive"));
        }
        let mut structure = vec![0.0; dim * dim * dim];
        let mut seen = vec![false; dim * dim * dim];
        for &(i, j, k, c) in brackets {
            if i >= dim || j >= dim || k >= dim {
                return invalid(format!("bracket index ({i}, {j}, {k}) out of range"));
            }
            if !c.is_finite() {
                return invalid(format!("non-finite structure constant at ({i}, {j}, {k})"));
            }
            if i == j {
                if c != 0.0 {
                    return invalid(format!("[X_{i}, X_{i}] must vanish"));
                }
                continue;
            }
            let a = (i * dim + j) * dim + k;
            let b = (j * dim + i) * dim + k;
            if (seen[a] && structure[a] != c) || (seen[b] && structure[b] != -c) {
                return invalid(format!("conflicting entries for bracket ({i}, {j}, {k})"));
            }
            structure[a] = c;
            structure[b] = -c;
            seen[a] = true;
            seen[b] = true;
        }
        Ok(GradedLieAlgebra { dim, labels, structure, layers })
    }

    /// Builds an algebra from a full dense tensor without symmetrising.
    /// Used to load externally computed constants that are then validated.
    pub fn from_dense(labels: Vec<String>, layers: Vec<u32>, structure: Vec<f64>) -> Result<Self> {
        let dim = layers.len();
        if dim == 0 || labels.len() != dim || structure.len() != dim * dim * dim {
            return invalid("inconsistent dimensions for dense structure tensor");
        }
        if structure.iter().any(|c| !c.is_finite()) {
            return invalid("structure constants must be finite");
        }
        if layers.iter().any(|&w| w == 0) {
            return invalid("layers must be positive");
        }
        Ok(GradedLieAlgebra { dim, labels, structure, layers })
    }

    fn default_labels(dim: usize) -> Vec<String> {
        (0..dim).map(|i| format!("X{}", i + 1)).collect()
    }

    /// R^d with the trivial grading.
    pub fn abelian(dim: usize) -> Self {
        Self::abelian_graded(vec![1; dim])
    }

    /// R^d with anisotropic dilations `t^{w_i}` along the coordinate axes.
    pub fn abelian_graded(layers: Vec<u32>) -> Self {
        let dim = layers.len();
        GradedLieAlgebra::new(Self::default_labels(dim), layers, &[])
            .expect("abelian algebra is always well formed")
    }

    /// The Heisenberg algebra of dimension `2n + 1` with basis
    /// `X_1..X_n, Y_1..Y_n, T` and `[X_j, Y_j] = T`.
    pub fn heisenberg(n: usize) -> Self {
        assert!(n >= 1, "heisenberg algebra needs n >= 1");
        let dim = 2 * n + 1;
        let mut labels = Vec::with_capacity(dim);
        labels.extend((1..=n).map(|j| format!("X{j}")));
        labels.extend((1..=n).map(|j| format!("Y{j}")));
        labels.push("T".to_string());
        let mut layers = vec![1; 2 * n];
        layers.push(2);
        let brackets: Vec<_> = (0..n).map(|j| (j, n + j, 2 * n, 1.0)).collect();
        GradedLieAlgebra::new(labels, layers, &brackets).expect("heisenberg algebra is well formed")
    }

    /// The model filiform algebra spanned by `X, Y, Z_1..Z_n` with
    /// `[X, Y] = Z_1` and `[X, Z_j] = Z_{j+1}`, graded with `Z_j` in layer
    /// `j + 1`. Its homogeneous dimension is `1 + (n+1)(n+2)/2`.
    pub fn model_filiform(n: usize) -> Self {
        let mut labels = vec!["X".to_string(), "Y".to_string()];
        labels.extend((1..=n).map(|j| format!("Z{j}")));
        let mut layers = vec![1, 1];
        layers.extend((1..=n).map(|j| j as u32 + 1));
        let brackets: Vec<_> = (0..n).map(|j| (0, j + 1, j + 2, 1.0)).collect();
        GradedLieAlgebra::new(labels, layers, &brackets).expect("filiform algebra is well formed")
    }

    /// Parses the key-value algebra format:
    ///
    /// ```toml
    /// [algebra]
    /// dim = 3
    /// labels = ["X", "Y", "T"]
    /// layers = [1, 1, 2]
    /// brackets = [[0, 1, 2, 1.0]]
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let file: AlgebraFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_section(file.algebra)
    }

    fn from_section(s: AlgebraSection) -> Result<Self> {
        if s.layers.len() != s.dim {
            return Err(Error::Parse(format!(
                "dim = {} but {} layers given",
                s.dim,
                s.layers.len()
            )));
        }
        let labels = s.labels.unwrap_or_else(|| Self::default_labels(s.dim));
        GradedLieAlgebra::new(labels, s.layers, &s.brackets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn layers(&self) -> &[u32] {
        &self.layers
    }

    pub fn layer(&self, i: usize) -> u32 {
        self.layers[i]
    }

    pub fn max_layer(&self) -> u32 {
        self.layers.iter().copied().max().unwrap_or(0)
    }

    #[inline]
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.structure[(i * self.dim + j) * self.dim + k]
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.iter().all(|&c| c == 0.0)
    }

    /// Lie bracket of two vectors given in basis coordinates.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d];
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                let row = &self.structure[(i * d + j) * d..(i * d + j + 1) * d];
                for (o, c) in out.iter_mut().zip(row) {
                    *o += xy * c;
                }
            }
        }
        out
    }

    fn unit(&self, i: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.dim];
        e[i] = 1.0;
        e
    }

    pub fn validate(&self) -> ValidationReport {
        let d = self.dim;
        let mut checks = Vec::with_capacity(4);

        let mut anti = InvariantCheck {
            invariant: Invariant::Antisymmetry,
            passed: true,
            first_violation: None,
            max_defect: 0.0,
        };
        let mut grading = InvariantCheck { invariant: Invariant::Grading, ..anti.clone() };
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let c = self.structure_constant(i, j, k);
                    let defect = (c + self.structure_constant(j, i, k)).abs();
                    anti.max_defect = anti.max_defect.max(defect);
                    if defect > 0.0 && anti.first_violation.is_none() {
                        anti.passed = false;
                        anti.first_violation = Some([i, j, k]);
                    }
                    if c != 0.0 && self.layers[k] != self.layers[i] + self.layers[j] {
                        grading.max_defect = grading.max_defect.max(c.abs());
                        if grading.first_violation.is_none() {
                            grading.passed = false;
                            grading.first_violation = Some([i, j, k]);
                        }
                    }
                }
            }
        }

        let mut jacobi = InvariantCheck {
            invariant: Invariant::Jacobi,
            passed: true,
            first_violation: None,
            max_defect: 0.0,
        };
        for i in 0..d {
            let ei = self.unit(i);
            for j in 0..d {
                let ej = self.unit(j);
                for l in 0..d {
                    let el = self.unit(l);
                    let a = self.bracket(&ei, &self.bracket(&ej, &el));
                    let b = self.bracket(&ej, &self.bracket(&el, &ei));
                    let c = self.bracket(&el, &self.bracket(&ei, &ej));
                    let defect = (0..d).map(|k| (a[k] + b[k] + c[k]).abs()).fold(0.0, f64::max);
                    jacobi.max_defect = jacobi.max_defect.max(defect);
                    if defect > JACOBI_TOL && jacobi.first_violation.is_none() {
                        jacobi.passed = false;
                        jacobi.first_violation = Some([i, j, l]);
                    }
                }
            }
        }

        // Iterated brackets must die after max_layer steps.
        let s = self.max_layer() as usize;
        let series = self.lower_central_series(s + 1);
        let tail_dim = series.last().map(|b| b.len()).unwrap_or(0);
        let nil = InvariantCheck {
            invariant: Invariant::Nilpotency,
            passed: tail_dim == 0,
            first_violation: None,
            max_defect: tail_dim as f64,
        };

        checks.push(anti);
        checks.push(jacobi);
        checks.push(grading);
        checks.push(nil);
        ValidationReport { checks }
    }

    /// Bases of `g^1 = g, g^{k+1} = [g, g^k]` up to `g^{max_terms}`.
    fn lower_central_series(&self, max_terms: usize) -> Vec<Vec<Vec<f64>>> {
        let d = self.dim;
        let mut series = vec![(0..d).map(|i| self.unit(i)).collect::<Vec<_>>()];
        while series.len() < max_terms {
            let prev = series.last().unwrap();
            let mut gens = Vec::new();
            for i in 0..d {
                let ei = self.unit(i);
                for v in prev {
                    gens.push(self.bracket(&ei, v));
                }
            }
            let basis = independent_subset(&gens);
            let empty = basis.is_empty();
            series.push(basis);
            if empty {
                break;
            }
        }
        series
    }

    /// Nilpotency step: the smallest `s` with all `(s+1)`-fold brackets zero.
    pub fn step(&self) -> usize {
        let series = self.lower_central_series(self.dim + 2);
        series.iter().position(|b| b.is_empty()).unwrap_or(series.len()).max(1)
    }

    /// `d_hom = sum_k k dim(V_k)`.
    pub fn homogeneous_dimension(&self) -> u32 {
        self.layers.iter().sum()
    }

    /// Dimension of each layer `V_1, ..., V_s`.
    pub fn layer_dimensions(&self) -> Vec<usize> {
        let s = self.max_layer() as usize;
        let mut dims = vec![0; s];
        for &w in &self.layers {
            dims[w as usize - 1] += 1;
        }
        dims
    }

    /// The dilation `delta_t`, scaling coordinate `i` by `t^{w_i}`.
    pub fn dilate(&self, p: &GroupPoint, t: f64) -> Result<GroupPoint> {
        if !(t > 0.0) || !t.is_finite() {
            return invalid(format!("dilation parameter must be positive, got {t}"));
        }
        self.check_point(p)?;
        Ok(GroupPoint(
            p.0.iter().zip(&self.layers).map(|(x, &w)| x * t.powi(w as i32)).collect(),
        ))
    }

    /// Homogeneous quasi-norm `max_i |x_i|^{1/w_i}`.
    pub fn quasi_norm(&self, p: &GroupPoint) -> f64 {
        p.0.iter()
            .zip(&self.layers)
            .map(|(x, &w)| if w == 1 { x.abs() } else { x.abs().powf(1.0 / w as f64) })
            .fold(0.0, f64::max)
    }

    /// Left-invariant quasi-distance `|p^{-1} q|`.
    pub fn distance(&self, p: &GroupPoint, q: &GroupPoint) -> Result<f64> {
        if self.is_abelian() {
            return Ok(p
                .0
                .iter()
                .zip(&q.0)
                .zip(&self.layers)
                .map(|((a, b), &w)| (b - a).abs().powf(1.0 / w as f64))
                .fold(0.0, f64::max));
        }
        Ok(self.quasi_norm(&self.group_mult(&p.inverse(), q)?))
    }

    fn check_point(&self, p: &GroupPoint) -> Result<()> {
        if p.dim() != self.dim {
            return invalid(format!("point has {} coordinates, algebra has dimension {}", p.dim(), self.dim));
        }
        Ok(())
    }

    /// Group product via the Baker-Campbell-Hausdorff series, truncated at
    /// the nilpotency step (exact for step at most four).
    pub fn group_mult(&self, p: &GroupPoint, q: &GroupPoint) -> Result<GroupPoint> {
        self.check_point(p)?;
        self.check_point(q)?;
        let x = &p.0;
        let y = &q.0;
        let mut z: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        if self.is_abelian() {
            return Ok(GroupPoint(z));
        }
        let step = self.step();
        if step > MAX_BCH_STEP {
            return Err(Error::Unsupported(format!(
                "group product for nilpotency step {step} (at most {MAX_BCH_STEP} supported)"
            )));
        }
        let xy = self.bracket(x, y);
        axpy(&mut z, 0.5, &xy);
        if step >= 3 {
            let x_xy = self.bracket(x, &xy);
            let y_xy = self.bracket(y, &xy);
            axpy(&mut z, 1.0 / 12.0, &x_xy);
            axpy(&mut z, -1.0 / 12.0, &y_xy);
            if step >= 4 {
                let y_x_xy = self.bracket(y, &x_xy);
                axpy(&mut z, -1.0 / 24.0, &y_x_xy);
            }
        }
        Ok(GroupPoint(z))
    }
}

fn axpy(z: &mut [f64], a: f64, x: &[f64]) {
    for (zi, xi) in z.iter_mut().zip(x) {
        *zi += a * xi;
    }
}

/// Greedy selection of a linearly independent subset, orthogonalised.
pub(crate) fn independent_subset(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for b in &basis {
            let dot: f64 = r.iter().zip(b).map(|(a, c)| a * c).sum();
            axpy(&mut r, -dot, b);
        }
        let norm = r.iter().map(|a| a * a).sum::<f64>().sqrt();
        let scale = v.iter().map(|a| a * a).sum::<f64>().sqrt().max(1.0);
        if norm > RANK_TOL * scale {
            basis.push(r.into_iter().map(|a| a / norm).collect());
        }
    }
    basis
}

/// A set of homogeneous basis vectors that generates the algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferredGenerators {
    indices: Vec<usize>,
    degrees: Vec<u32>,
    lcm_degree: u32,
}

/// A nested commutator `[X_{a_1}, [X_{a_2}, ... X_{a_k}]]` of generators,
/// stored by generator positions.
type NestedBracket = Vec<usize>;

impl PreferredGenerators {
    /// Uses the basis vectors with the given indices as generators.
    pub fn new(alg: &GradedLieAlgebra, indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return invalid("at least one generator is required");
        }
        for (a, &i) in indices.iter().enumerate() {
            if i >= alg.dim() {
                return invalid(format!("generator index {i} out of range"));
            }
            if indices[..a].contains(&i) {
                return invalid(format!("generator index {i} repeated"));
            }
        }
        let degrees: Vec<u32> = indices.iter().map(|&i| alg.layer(i)).collect();
        let lcm_degree = degrees.iter().copied().fold(1, lcm);
        let gens = PreferredGenerators { indices, degrees, lcm_degree };
        let span = independent_subset(
            &gens.nested_brackets(alg).into_iter().map(|(_, v)| v).collect::<Vec<_>>(),
        );
        if span.len() != alg.dim() {
            return invalid(format!(
                "generators span a subalgebra of dimension {} < {}",
                span.len(),
                alg.dim()
            ));
        }
        Ok(gens)
    }

    /// Picks, layer by layer, the basis vectors not already reached by
    /// brackets of lower layers.
    pub fn minimal(alg: &GradedLieAlgebra) -> Self {
        let mut chosen: Vec<usize> = Vec::new();
        for layer in 1..=alg.max_layer() {
            for i in (0..alg.dim()).filter(|&i| alg.layer(i) == layer) {
                let trial = PreferredGenerators {
                    indices: chosen.clone(),
                    degrees: chosen.iter().map(|&c| alg.layer(c)).collect(),
                    lcm_degree: 1,
                };
                let reached: Vec<Vec<f64>> =
                    trial.nested_brackets(alg).into_iter().map(|(_, v)| v).collect();
                let before = independent_subset(&reached).len();
                let mut with = reached;
                with.push(alg.unit(i));
                if independent_subset(&with).len() > before {
                    chosen.push(i);
                }
            }
        }
        PreferredGenerators::new(alg, chosen).expect("layer-wise choice generates the algebra")
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Basis index of each generator.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Degree `v_j` of each generator.
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// `v = lcm(v_j)`.
    pub fn lcm_degree(&self) -> u32 {
        self.lcm_degree
    }

    /// All right-nested brackets of generators with total degree at most
    /// the top layer, paired with their coordinate vectors.
    fn nested_brackets(&self, alg: &GradedLieAlgebra) -> Vec<(NestedBracket, Vec<f64>)> {
        let top = alg.max_layer();
        let mut out: Vec<(NestedBracket, Vec<f64>, u32)> = self
            .indices
            .iter()
            .enumerate()
            .map(|(g, &i)| (vec![g], alg.unit(i), alg.layer(i)))
            .collect();
        let mut frontier = out.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (word, v, deg) in &frontier {
                for (g, &i) in self.indices.iter().enumerate() {
                    let d = deg + alg.layer(i);
                    if d > top {
                        continue;
                    }
                    let w = alg.bracket(&alg.unit(i), v);
                    if w.iter().all(|c| c.abs() < RANK_TOL) {
                        continue;
                    }
                    let mut nw = vec![g];
                    nw.extend_from_slice(word);
                    next.push((nw, w, d));
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out.into_iter().map(|(w, v, _)| (w, v)).collect()
    }

    /// Writes every basis vector as a polynomial in the generators: a list of
    /// `(word over generator positions, coefficient)` for each basis index.
    /// Nested brackets are expanded with `[A, B] = AB - BA`.
    pub fn basis_expansions(&self, alg: &GradedLieAlgebra) -> Result<Vec<Vec<(Vec<usize>, f64)>>> {
        let brackets = self.nested_brackets(alg);
        let d = alg.dim();
        // Pick an independent set of brackets and solve for each unit vector.
        let mut chosen: Vec<usize> = Vec::new();
        let mut orth: Vec<Vec<f64>> = Vec::new();
        for (idx, (_, v)) in brackets.iter().enumerate() {
            let mut test = orth.clone();
            test.push(v.clone());
            let basis = independent_subset(&test);
            if basis.len() > orth.len() {
                orth = basis;
                chosen.push(idx);
            }
            if chosen.len() == d {
                break;
            }
        }
        if chosen.len() != d {
            return invalid("generators do not span the algebra");
        }
        // Square system: columns are the chosen bracket vectors.
        let mut mat = vec![vec![0.0; d]; d];
        for (col, &idx) in chosen.iter().enumerate() {
            for row in 0..d {
                mat[row][col] = brackets[idx].1[row];
            }
        }
        let inv = invert_small(&mat).ok_or_else(|| Error::InvalidInput("singular bracket basis".into()))?;
        let mut result = Vec::with_capacity(d);
        for basis_index in 0..d {
            let mut poly: Vec<(Vec<usize>, f64)> = Vec::new();
            for (col, &idx) in chosen.iter().enumerate() {
                let coeff = inv[col][basis_index];
                if coeff.abs() < 1e-14 {
                    continue;
                }
                for (word, sign) in expand_nested(&brackets[idx].0) {
                    poly.push((word, sign * coeff));
                }
            }
            result.push(merge_terms(poly));
        }
        Ok(result)
    }
}

fn merge_terms(mut terms: Vec<(Vec<usize>, f64)>) -> Vec<(Vec<usize>, f64)> {
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(Vec<usize>, f64)> = Vec::new();
    for (w, c) in terms {
        match out.last_mut() {
            Some((lw, lc)) if *lw == w => *lc += c,
            _ => out.push((w, c)),
        }
    }
    out.retain(|(_, c)| c.abs() > 1e-14);
    out
}

/// `[a_1, [a_2, ..., a_k]]` as a signed sum of words.
fn expand_nested(word: &[usize]) -> Vec<(Vec<usize>, f64)> {
    if word.len() == 1 {
        return vec![(word.to_vec(), 1.0)];
    }
    let inner = expand_nested(&word[1..]);
    let a = word[0];
    let mut out = Vec::with_capacity(2 * inner.len());
    for (w, s) in &inner {
        let mut left = vec![a];
        left.extend_from_slice(w);
        out.push((left, *s));
        let mut right = w.clone();
        right.push(a);
        out.push((right, -*s));
    }
    out
}

fn invert_small(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        let p = a[col][col];
        for v in a[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    let pivot_row = a[col].clone();
                    for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                        *x -= f * y;
                    }
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_is_valid() {
        for layers in [vec![1, 1, 1], vec![1, 2], vec![3, 1, 2]] {
            let alg = GradedLieAlgebra::abelian_graded(layers);
            assert!(alg.validate().is_valid());
            assert_eq!(alg.step(), 1);
        }
    }

    #[test]
    fn heisenberg_is_valid() {
        for n in 1..=3 {
            let alg = GradedLieAlgebra::heisenberg(n);
            let report = alg.validate();
            assert!(report.is_valid(), "{report}");
            assert_eq!(alg.step(), 2);
        }
    }

    #[test]
    fn misgraded_heisenberg_fails_grading() {
        let alg = GradedLieAlgebra::new(
            vec!["X".into(), "Y".into(), "T".into()],
            vec![1, 1, 1],
            &[(0, 1, 2, 1.0)],
        )
        .unwrap();
        let report = alg.validate();
        let g = report.check(Invariant::Grading);
        assert!(!g.passed);
        assert_eq!(g.first_violation, Some([0, 1, 2]));
        assert!(report.check(Invariant::Antisymmetry).passed);
        assert!(report.check(Invariant::Jacobi).passed);
    }

    #[test]
    fn dense_constants_report_antisymmetry_and_jacobi() {
        let mut c = vec![0.0; 27];
        c[(0 * 3 + 1) * 3 + 2] = 1.0; // [X0, X1] = X2 without the partner entry
        let alg = GradedLieAlgebra::from_dense(
            GradedLieAlgebra::default_labels(3),
            vec![1, 1, 2],
            c,
        )
        .unwrap();
        let report = alg.validate();
        assert_eq!(report.check(Invariant::Antisymmetry).first_violation, Some([0, 1, 2]));

        // so(3)-like constants violate grading and nilpotency
        let so3 = GradedLieAlgebra::new(
            GradedLieAlgebra::default_labels(3),
            vec![1, 1, 1],
            &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)],
        )
        .unwrap();
        let report = so3.validate();
        assert!(report.check(Invariant::Jacobi).passed);
        assert!(!report.check(Invariant::Nilpotency).passed);
    }

    #[test]
    fn jacobi_violation_detected() {
        // free step-2 brackets on three generators plus one inconsistent
        // step-3 bracket
        let alg = GradedLieAlgebra::new(
            GradedLieAlgebra::default_labels(7),
            vec![1, 1, 1, 2, 2, 2, 3],
            &[(0, 1, 3, 1.0), (1, 2, 4, 1.0), (2, 0, 5, 1.0), (2, 3, 6, 1.0)],
        )
        .unwrap();
        let report = alg.validate();
        let j = report.check(Invariant::Jacobi);
        assert!(!j.passed);
        assert_eq!(j.first_violation, Some([0, 1, 2]));
        assert!(report.check(Invariant::Grading).passed);
        assert!(report.check(Invariant::Antisymmetry).passed);
    }

    #[test]
    fn homogeneous_dimensions() {
        assert_eq!(GradedLieAlgebra::abelian(5).homogeneous_dimension(), 5);
        for n in 1..=4 {
            assert_eq!(GradedLieAlgebra::heisenberg(n).homogeneous_dimension(), 2 * n as u32 + 2);
        }
        for n in 1..=6u32 {
            let alg = GradedLieAlgebra::model_filiform(n as usize);
            assert!(alg.validate().is_valid());
            let expected = 1 + (n + 1) * (n + 2) / 2;
            assert_eq!(alg.homogeneous_dimension(), expected);
            let by_layers: usize =
                alg.layer_dimensions().iter().enumerate().map(|(k, d)| (k + 1) * d).sum();
            assert_eq!(by_layers as u32, expected);
        }
    }

    #[test]
    fn dilation_examples() {
        let alg = GradedLieAlgebra::abelian_graded(vec![1, 2]);
        let p = GroupPoint::new(vec![1.0, 1.0]);
        assert_eq!(alg.dilate(&p, 1.0).unwrap(), p);
        assert_eq!(alg.dilate(&p, 2.0).unwrap().0, vec![2.0, 4.0]);
        assert!(alg.dilate(&p, 0.0).is_err());
        assert!(alg.dilate(&p, -1.0).is_err());
        let q = GroupPoint::new(vec![0.3, -1.7]);
        let a = alg.dilate(&alg.dilate(&q, 1.3).unwrap(), 0.7).unwrap();
        let b = alg.dilate(&q, 1.3 * 0.7).unwrap();
        for (x, y) in a.0.iter().zip(&b.0) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn quasi_norm_examples() {
        let alg = GradedLieAlgebra::abelian_graded(vec![1, 2]);
        assert_eq!(alg.quasi_norm(&GroupPoint::identity(2)), 0.0);
        assert_eq!(alg.quasi_norm(&GroupPoint::new(vec![0.0, 4.0])), 2.0);
        let p = GroupPoint::new(vec![0.5, -2.0]);
        let n = alg.quasi_norm(&p);
        let n3 = alg.quasi_norm(&alg.dilate(&p, 3.0).unwrap());
        assert!((n3 - 3.0 * n).abs() < 1e-14);
    }

    #[test]
    fn heisenberg_product_formula() {
        let alg = GradedLieAlgebra::heisenberg(1);
        let p = GroupPoint::new(vec![1.0, 2.0, 3.0]);
        let q = GroupPoint::new(vec![-0.5, 4.0, 1.0]);
        let r = alg.group_mult(&p, &q).unwrap();
        let expected = [0.5, 6.0, 4.0 + 0.5 * (1.0 * 4.0 - 2.0 * -0.5)];
        for (a, b) in r.0.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        let e = alg.group_mult(&p, &p.inverse()).unwrap();
        assert!(e.0.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn abelian_product_adds() {
        let alg = GradedLieAlgebra::abelian_graded(vec![1, 2, 3]);
        let p = GroupPoint::new(vec![1.0, 2.0, 3.0]);
        let q = GroupPoint::new(vec![0.5, -1.0, 0.25]);
        assert_eq!(alg.group_mult(&p, &q).unwrap().0, vec![1.5, 1.0, 3.25]);
    }

    #[test]
    fn high_step_rejected() {
        let alg = GradedLieAlgebra::model_filiform(4);
        assert_eq!(alg.step(), 5);
        let p = GroupPoint::identity(alg.dim());
        assert!(matches!(alg.group_mult(&p, &p), Err(Error::Unsupported(_))));
        let alg3 = GradedLieAlgebra::model_filiform(3);
        assert!(alg3.group_mult(&GroupPoint::identity(5), &GroupPoint::identity(5)).is_ok());
    }

    #[test]
    fn parse_algebra_file() {
        let text = r#"
[algebra]
dim = 3
labels = ["X", "Y", "T"]
layers = [1, 1, 2]
brackets = [[0, 1, 2, 1.0]]
"#;
        let alg = GradedLieAlgebra::parse(text).unwrap();
        assert_eq!(alg, GradedLieAlgebra::new(
            vec!["X".into(), "Y".into(), "T".into()],
            vec![1, 1, 2],
            &[(0, 1, 2, 1.0)]
        ).unwrap());
        assert!(GradedLieAlgebra::parse("[algebra]\ndim = 2\nlayers = [1]\n").is_err());
        assert!(GradedLieAlgebra::parse("[algebra]\ndim = 1\nlayers = [1]\nextra = 3\n").is_err());
    }

    #[test]
    fn preferred_generators() {
        let h = GradedLieAlgebra::heisenberg(1);
        let gens = PreferredGenerators::minimal(&h);
        assert_eq!(gens.indices(), &[0, 1]);
        assert_eq!(gens.lcm_degree(), 1);
        assert!(PreferredGenerators::new(&h, vec![0]).is_err());

        let a = GradedLieAlgebra::abelian_graded(vec![1, 2]);
        let gens = PreferredGenerators::minimal(&a);
        assert_eq!(gens.indices(), &[0, 1]);
        assert_eq!(gens.degrees(), &[1, 2]);
        assert_eq!(gens.lcm_degree(), 2);

        let f = GradedLieAlgebra::model_filiform(3);
        assert_eq!(PreferredGenerators::minimal(&f).indices(), &[0, 1]);
    }

    #[test]
    fn basis_expansion_of_central_element() {
        let h = GradedLieAlgebra::heisenberg(1);
        let gens = PreferredGenerators::minimal(&h);
        let exp = gens.basis_expansions(&h).unwrap();
        assert_eq!(exp[0], vec![(vec![0], 1.0)]);
        // T = XY - YX
        assert_eq!(exp[2], vec![(vec![0, 1], 1.0), (vec![1, 0], -1.0)]);
    }
}
