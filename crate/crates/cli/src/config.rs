use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Trace,
    Weyl,
    Residue,
    Spectrum,
    Cover,
    Zeta,
    Signed,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Trace => "trace",
            Command::Weyl => "weyl",
            Command::Residue => "residue",
            Command::Spectrum => "spectrum",
            Command::Cover => "cover",
            Command::Zeta => "zeta",
            Command::Signed => "signed",
        }
    }
}

/// A schema violation with the dotted path of the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn schema<T>(path: &str, message: impl Into<String>) -> Result<T, SchemaError> {
    Err(SchemaError { path: path.into(), message: message.into() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub group: GroupSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionSpec>,
    #[serde(default)]
    pub numeric: NumericSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    #[default]
    Abelian,
    Heisenberg,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    #[serde(default)]
    pub kind: GroupKind,
    /// Dilation weights of the abelian coordinates; all ones by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    /// `-sum_j d_j^2` in `dim` variables.
    Laplacian,
    /// Constant coefficients, given by the terms of the symbol.
    Polynomial,
    /// `-d/dx (a d/dx)` with a trigonometric conductivity `a`.
    Divergence,
    /// `-sum a_jk X_j X_k` on the Heisenberg group.
    Sublaplacian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolTerm {
    pub powers: Vec<u32>,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
    pub frequency: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<SymbolTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trig: Vec<TrigTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionKind {
    Gaussian,
    PolyGaussian,
    Bump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub kind: FunctionKind,
    #[serde(default = "one")]
    pub amplitude: f64,
    pub center: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub widths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub monomials: Vec<SymbolTerm>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericSpec {
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_widths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement_points: Option<Vec<usize>>,
    #[serde(default = "default_support_threshold")]
    pub support_threshold: f64,
    #[serde(default = "default_zs")]
    pub zs: Vec<f64>,
    #[serde(default = "default_dilations")]
    pub dilations: Vec<f64>,
    #[serde(default = "default_truncations")]
    pub truncations: Vec<usize>,
    #[serde(default = "default_top")]
    pub top: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_gamma() -> f64 {
    2.0
}

fn default_support_threshold() -> f64 {
    1e-10
}

fn default_zs() -> Vec<f64> {
    vec![3.0, 1.1]
}

fn default_dilations() -> Vec<f64> {
    graded_weyl::residue::DEFAULT_DILATIONS.to_vec()
}

fn default_truncations() -> Vec<usize> {
    graded_weyl::representations::PlancherelOptions::default().truncations
}

fn default_top() -> usize {
    800
}

impl Default for NumericSpec {
    fn default() -> Self {
        NumericSpec {
            gamma: default_gamma(),
            half_widths: None,
            points: None,
            window: None,
            refinement_points: None,
            support_threshold: default_support_threshold(),
            zs: default_zs(),
            dilations: default_dilations(),
            truncations: default_truncations(),
            top: default_top(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Euclidean,
    Graded,
    Heisenberg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverSpec {
    pub space: SpaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u32>>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub radius: f64,
    #[serde(default = "default_samples")]
    pub samples_per_axis: usize,
    #[serde(default = "default_dilation")]
    pub dilation: u32,
}

fn default_samples() -> usize {
    64
}

fn default_dilation() -> u32 {
    1
}

impl ExperimentConfig {
    /// Parses strict TOML: unknown keys and type mismatches are reported
    /// with their field path.
    pub fn parse(text: &str) -> Result<Self, SchemaError> {
        let de = toml::Deserializer::new(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            SchemaError { path: if path == "." { "<root>".into() } else { path }, message: inner.message().trim().to_string() }
        })?;
        Ok(cfg)
    }

    /// Canonical text: every field with its resolved default, in schema order.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Abelian weights, defaulting to ones in the operator dimension.
    pub fn weights(&self) -> Result<Vec<u32>, SchemaError> {
        if let Some(w) = &self.group.weights {
            return Ok(w.clone());
        }
        let op = self.operator()?;
        let dim = match op.kind {
            OperatorKind::Laplacian => op.dim.unwrap_or(1),
            OperatorKind::Polynomial => op.terms.first().map_or(1, |t| t.powers.len()),
            OperatorKind::Divergence => 1,
            OperatorKind::Sublaplacian => 3,
        };
        Ok(vec![1; dim])
    }

    pub fn operator(&self) -> Result<&OperatorSpec, SchemaError> {
        self.operator.as_ref().map_or_else(|| schema("operator", "missing table"), Ok)
    }

    pub fn function(&self) -> Result<&FunctionSpec, SchemaError> {
        self.function.as_ref().map_or_else(|| schema("function", "missing table"), Ok)
    }

    pub fn cover(&self) -> Result<&CoverSpec, SchemaError> {
        self.cover.as_ref().map_or_else(|| schema("cover", "missing table"), Ok)
    }

    /// Checks the fields `command` reads.
    pub fn validate(&self, command: Command) -> Result<(), SchemaError> {
        let n = &self.numeric;
        if !(n.gamma > 0.0) || !n.gamma.is_finite() {
            return schema("numeric.gamma", format!("must be positive, got {}", n.gamma));
        }
        if !(n.support_threshold >= 0.0) {
            return schema("numeric.support_threshold", "must be nonnegative");
        }
        if let Some([lo, hi]) = n.window {
            if hi < lo {
                return schema("numeric.window", "upper index below lower index");
            }
        }
        if n.dilations.iter().any(|s| !(*s > 0.0) || *s == 1.0) {
            return schema("numeric.dilations", "dilations must be positive and different from 1");
        }
        if n.truncations.is_empty() || n.truncations.contains(&0) {
            return schema("numeric.truncations", "need at least one positive truncation");
        }
        if command == Command::Cover {
            return self.validate_cover();
        }
        self.validate_operator()?;
        if matches!(command, Command::Weyl | Command::Spectrum | Command::Signed | Command::Zeta) {
            self.validate_function()?;
            self.validate_grid()?;
        }
        if command == Command::Zeta && n.zs.iter().any(|z| !(*z > 1.0)) {
            return schema("numeric.zs", "the zeta trace needs z above the dimension 1");
        }
        Ok(())
    }

    fn validate_operator(&self) -> Result<(), SchemaError> {
        let op = self.operator()?;
        let heis = self.group.kind == GroupKind::Heisenberg;
        if heis != (op.kind == OperatorKind::Sublaplacian) {
            return schema("operator.kind", "sublaplacian operators go with the heisenberg group and only there");
        }
        match op.kind {
            OperatorKind::Laplacian => {
                if op.dim == Some(0) {
                    return schema("operator.dim", "must be positive");
                }
            }
            OperatorKind::Polynomial => {
                if op.terms.is_empty() {
                    return schema("operator.terms", "need at least one term");
                }
                let d = op.terms[0].powers.len();
                if let Some(i) = op.terms.iter().position(|t| t.powers.len() != d || d == 0) {
                    return schema(&format!("operator.terms[{i}].powers"), "all terms need the same positive length");
                }
            }
            OperatorKind::Divergence => {
                if op.constant.is_none() {
                    return schema("operator.constant", "missing constant part of the conductivity");
                }
                if let Some(i) = op.trig.iter().position(|t| t.frequency.len() != 1) {
                    return schema(&format!("operator.trig[{i}].frequency"), "one frequency per term in one dimension");
                }
            }
            OperatorKind::Sublaplacian => match &op.matrix {
                Some(m) if m.len() == 2 && m.iter().all(|r| r.len() == 2) => {}
                Some(_) => return schema("operator.matrix", "need a 2x2 matrix"),
                None => return schema("operator.matrix", "missing"),
            },
        }
        let w = self.weights()?;
        if w.is_empty() || w.contains(&0) {
            return schema("group.weights", "weights must be positive");
        }
        let dim = match op.kind {
            OperatorKind::Laplacian => op.dim.unwrap_or(1),
            OperatorKind::Polynomial => op.terms[0].powers.len(),
            OperatorKind::Divergence => 1,
            OperatorKind::Sublaplacian => 3,
        };
        if !heis && w.len() != dim {
            return schema("group.weights", format!("{} weights for an operator in {dim} variables", w.len()));
        }
        Ok(())
    }

    fn validate_function(&self) -> Result<(), SchemaError> {
        let f = self.function()?;
        match f.kind {
            FunctionKind::Gaussian | FunctionKind::PolyGaussian => match &f.widths {
                Some(w) if w.len() == f.center.len() && w.iter().all(|v| *v > 0.0) => {}
                Some(_) => return schema("function.widths", "need one positive width per center coordinate"),
                None => return schema("function.widths", "missing"),
            },
            FunctionKind::Bump => match f.radius {
                Some(r) if r > 0.0 => {}
                _ => return schema("function.radius", "need a positive radius"),
            },
        }
        if f.kind == FunctionKind::PolyGaussian && f.monomials.is_empty() {
            return schema("function.monomials", "need at least one monomial");
        }
        if let Some(i) = f.monomials.iter().position(|m| m.powers.len() != f.center.len()) {
            return schema(&format!("function.monomials[{i}].powers"), "length must match the center");
        }
        Ok(())
    }

    fn validate_grid(&self) -> Result<(), SchemaError> {
        let n = &self.numeric;
        let dim = if self.group.kind == GroupKind::Heisenberg { 3 } else { self.weights()?.len() };
        match &n.half_widths {
            Some(h) if h.len() == dim && h.iter().all(|v| *v > 0.0) => {}
            Some(_) => return schema("numeric.half_widths", format!("need {dim} positive half widths")),
            None => return schema("numeric.half_widths", "missing"),
        }
        match &n.points {
            Some(p) if p.len() == dim && p.iter().all(|v| *v > 1) => {}
            Some(_) => return schema("numeric.points", format!("need {dim} point counts above 1")),
            None => return schema("numeric.points", "missing"),
        }
        if let Some(r) = &n.refinement_points {
            if r.len() != dim || r.contains(&0) {
                return schema("numeric.refinement_points", format!("need {dim} positive point counts"));
            }
        }
        if self.function()?.center.len() != dim {
            return schema("function.center", format!("need {dim} coordinates"));
        }
        Ok(())
    }

    fn validate_cover(&self) -> Result<(), SchemaError> {
        let c = self.cover()?;
        let dim = match c.space {
            SpaceKind::Euclidean => match c.dim {
                Some(d) if d > 0 => d,
                _ => return schema("cover.dim", "need a positive dimension"),
            },
            SpaceKind::Graded => match &c.weights {
                Some(w) if !w.is_empty() && !w.contains(&0) && w.contains(&1) => w.len(),
                _ => return schema("cover.weights", "need positive weights including a 1"),
            },
            SpaceKind::Heisenberg => 3,
        };
        if c.lo.len() != dim {
            return schema("cover.lo", format!("need {dim} coordinates"));
        }
        if c.hi.len() != dim || c.lo.iter().zip(&c.hi).any(|(a, b)| !(a < b)) {
            return schema("cover.hi", format!("need {dim} coordinates above cover.lo"));
        }
        if !(c.radius > 0.0) || !c.radius.is_finite() {
            return schema("cover.radius", "must be positive");
        }
        if c.samples_per_axis == 0 {
            return schema("cover.samples_per_axis", "must be positive");
        }
        if c.dilation == 0 {
            return schema("cover.dilation", "must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[operator]\nkind = \"laplacian\"\n";

    #[test]
    fn defaults_are_filled_and_echoed() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.numeric.gamma, 2.0);
        assert_eq!(c.weights().unwrap(), vec![1]);
        let text = c.canonical();
        assert!(text.contains("gamma = 2.0"));
        assert_eq!(ExperimentConfig::parse(&text).unwrap(), c);
    }

    #[test]
    fn unknown_keys_report_their_path() {
        let e = ExperimentConfig::parse("[numeric]\ngama = 2.0\n").unwrap_err();
        assert_eq!(e.path, "numeric.gama");
        assert!(e.message.contains("gama"));
        let e = ExperimentConfig::parse("[numeric]\ngamma = \"two\"\n").unwrap_err();
        assert_eq!(e.path, "numeric.gamma");
    }

    #[test]
    fn nonpositive_gamma_is_a_schema_error() {
        let c = ExperimentConfig::parse(&format!("{MINIMAL}[numeric]\ngamma = -1.0\n")).unwrap();
        assert_eq!(c.validate(Command::Trace).unwrap_err().path, "numeric.gamma");
    }

    #[test]
    fn grid_fields_are_required_for_experiments() {
        let c = ExperimentConfig::parse(&format!("{MINIMAL}[function]\nkind = \"gaussian\"\ncenter = [0.0]\nwidths = [1.0]\n")).unwrap();
        assert!(c.validate(Command::Trace).is_ok());
        assert_eq!(c.validate(Command::Weyl).unwrap_err().path, "numeric.half_widths");
    }
}
