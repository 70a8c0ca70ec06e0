use std::fmt;

use graded_weyl::coverings::{greedy_cover_region, CoverSpace, Region};
use graded_weyl::discretize::{fd_heisenberg_operator, Grid};
use graded_weyl::lie::{GradedLieAlgebra, PreferredGenerators};
use graded_weyl::operators::{Coefficient, Symbol};
use graded_weyl::representations::{quadratic_operator, tau_heisenberg_plancherel, PlancherelOptions};
use graded_weyl::residue::{residue_closed_form, residue_via_definition};
use graded_weyl::spectra::{
    experiment_singular_values, fd_heisenberg_singular_values, fit_weyl, signed_experiment, weyl_experiment, weyl_plot_svg, zeta_trace_check,
    OperatorModel, SingularValues, WeylConfig,
};
use graded_weyl::trace::{
    tau_exp_aniso, tau_exp_direct, tau_exp_gaussian, tau_exp_heisenberg, tau_exp_heisenberg_det, tau_exp_sphere, weyl_constant, SampledFunction,
    TraceResult,
};
use graded_weyl::Error;
use num_complex::Complex64 as C64;

use crate::config::{Command, ExperimentConfig, FunctionKind, GroupKind, OperatorKind, SchemaError, SpaceKind};

#[derive(Debug)]
pub enum RunError {
    Schema(SchemaError),
    Numeric { stage: &'static str, error: Error },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Schema(e) => write!(f, "schema error at {e}"),
            RunError::Numeric { stage, error } => write!(f, "numeric failure in stage {stage}: {error}"),
        }
    }
}

impl From<SchemaError> for RunError {
    fn from(e: SchemaError) -> Self {
        RunError::Schema(e)
    }
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, RunError>;
}

impl<T> Stage<T> for graded_weyl::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, RunError> {
        self.map_err(|error| RunError::Numeric { stage, error })
    }
}

/// Rows of `summary.csv` plus the other artifact files.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub rows: Vec<(String, f64, f64)>,
    pub singular_values: Option<String>,
    pub plot: Option<String>,
    pub extra: Vec<(String, String)>,
}

impl Artifacts {
    fn row(&mut self, quantity: impl Into<String>, value: f64, uncertainty: f64) {
        self.rows.push((quantity.into(), value, uncertainty));
    }
}

pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    cfg.validate(command)?;
    match command {
        Command::Trace => trace(cfg),
        Command::Residue => residue(cfg),
        Command::Weyl => weyl(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::Signed => signed(cfg),
        Command::Zeta => zeta(cfg),
        Command::Cover => cover(cfg),
    }
}

fn symbol(cfg: &ExperimentConfig) -> Result<Symbol, SchemaError> {
    let op = cfg.operator()?;
    match op.kind {
        OperatorKind::Laplacian => Ok(Symbol::laplacian(op.dim.unwrap_or(1))),
        OperatorKind::Polynomial => {
            let terms: Vec<(Vec<u32>, C64)> = op.terms.iter().map(|t| (t.powers.clone(), C64::new(t.coefficient, 0.0))).collect();
            Ok(Symbol::from_terms(terms[0].0.len(), &terms))
        }
        _ => Err(SchemaError { path: "operator.kind".into(), message: "needs a constant-coefficient operator".into() }),
    }
}

fn quadratic_matrix(cfg: &ExperimentConfig) -> Result<Vec<Vec<f64>>, SchemaError> {
    Ok(cfg.operator()?.matrix.clone().expect("validated"))
}

fn model(cfg: &ExperimentConfig) -> Result<OperatorModel, SchemaError> {
    let op = cfg.operator()?;
    if op.kind == OperatorKind::Divergence {
        let terms: Vec<(f64, f64, Vec<f64>)> = op.trig.iter().map(|t| (t.cos, t.sin, t.frequency.clone())).collect();
        return Ok(OperatorModel::DivergenceForm(Coefficient::trig(op.constant.expect("validated"), &terms)));
    }
    Ok(OperatorModel::Constant(symbol(cfg)?))
}

fn coefficient(cfg: &ExperimentConfig) -> Result<Coefficient, SchemaError> {
    let f = cfg.function()?;
    Ok(match f.kind {
        FunctionKind::Gaussian => Coefficient::gaussian(f.amplitude, f.center.clone(), f.widths.clone().expect("validated")),
        FunctionKind::PolyGaussian => {
            let poly = f.monomials.iter().map(|m| (f.amplitude * m.coefficient, m.powers.clone())).collect();
            Coefficient::poly_gaussian(poly, f.center.clone(), f.widths.clone().expect("validated"))
        }
        FunctionKind::Bump => Coefficient::compact_bump(f.amplitude, f.center.clone(), f.radius.expect("validated")),
    })
}

fn weyl_config(cfg: &ExperimentConfig) -> Result<WeylConfig, RunError> {
    let n = &cfg.numeric;
    let half = n.half_widths.clone().expect("validated");
    let grid = Grid::periodic(half.clone(), n.points.clone().expect("validated")).stage("grid")?;
    let mut wc = WeylConfig::new(cfg.weights()?, model(cfg)?, coefficient(cfg)?, n.gamma, grid);
    wc.window = n.window.map(|[a, b]| (a, b));
    wc.support_threshold = n.support_threshold;
    if let Some(r) = &n.refinement_points {
        wc.refinement = Some(Grid::periodic(half, r.clone()).stage("grid")?);
    }
    Ok(wc)
}

fn heisenberg() -> (GradedLieAlgebra, PreferredGenerators) {
    let h = GradedLieAlgebra::heisenberg(1);
    let g = PreferredGenerators::new(&h, vec![0, 1, 2]).expect("Heisenberg generators");
    (h, g)
}

/// Labelled values of `tau(e^{-P})` from each applicable method.
fn traces(cfg: &ExperimentConfig) -> Result<Vec<(&'static str, TraceResult)>, RunError> {
    if cfg.group.kind == GroupKind::Heisenberg {
        let a = quadratic_matrix(cfg)?;
        let (h, g) = heisenberg();
        let opts = PlancherelOptions { truncations: cfg.numeric.truncations.clone(), ..PlancherelOptions::default() };
        return Ok(vec![
            ("sinh_product", tau_exp_heisenberg(&a).stage("heisenberg_closed_form")?),
            ("determinant", tau_exp_heisenberg_det(&a).stage("heisenberg_determinant")?),
            ("plancherel", tau_heisenberg_plancherel(&quadratic_operator(&a), &h, &g, &opts).stage("plancherel")?),
        ]);
    }
    let p = symbol(cfg)?;
    let w = cfg.weights()?;
    let mut out = Vec::new();
    if w.iter().all(|v| *v == w[0]) {
        out.push(("sphere", tau_exp_sphere(&p).stage("sphere_trace")?));
        if let Some(a) = quadratic_form(&p) {
            out.push(("gaussian", tau_exp_gaussian(&a).stage("gaussian_trace")?));
        }
    } else {
        out.push(("anisotropic", tau_exp_aniso(&p, &w).stage("anisotropic_trace")?));
    }
    out.push(("direct", tau_exp_direct(&p).stage("direct_trace")?));
    Ok(out)
}

/// `A` with `p(xi) = xi^T A xi` when `p` is a real quadratic form.
fn quadratic_form(p: &Symbol) -> Option<Vec<Vec<f64>>> {
    let d = p.dim();
    let mut a = vec![vec![0.0; d]; d];
    for (e, c) in p.terms() {
        if c.im != 0.0 || e.iter().sum::<u32>() != 2 {
            return None;
        }
        let idx: Vec<usize> = e.iter().enumerate().flat_map(|(j, &k)| std::iter::repeat_n(j, k as usize)).collect();
        let (j, k) = (idx[0], idx[1]);
        if j == k {
            a[j][j] = c.re;
        } else {
            a[j][k] = 0.5 * c.re;
            a[k][j] = 0.5 * c.re;
        }
    }
    Some(a)
}

fn trace(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let mut a = Artifacts::default();
    for (label, t) in traces(cfg)? {
        a.row(format!("tau_exp[{label}]"), t.value, t.error_estimate);
    }
    Ok(a)
}

/// `(d_hom, m)` of the configured operator.
fn dimensions(cfg: &ExperimentConfig) -> Result<(u32, u32), RunError> {
    if cfg.group.kind == GroupKind::Heisenberg {
        return Ok((4, 2));
    }
    let w = cfg.weights()?;
    let m = match model(cfg)? {
        OperatorModel::Constant(p) => p.weighted_degree(&w),
        OperatorModel::DivergenceForm(_) => 2,
    };
    if m == 0 {
        return Err(SchemaError { path: "operator.terms".into(), message: "operator has order zero".into() }.into());
    }
    Ok((w.iter().sum(), m))
}

fn residue(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let (d, m) = dimensions(cfg)?;
    let (label, t) = traces(cfg)?[0];
    let closed = residue_closed_form(d, m, &t).stage("residue_closed_form")?;
    let est = residue_via_definition(d, m, &t, &cfg.numeric.dilations).stage("residue_definition")?;
    let mut a = Artifacts::default();
    a.row(format!("tau_exp[{label}]"), t.value, t.error_estimate);
    a.row("residue[closed_form]", closed, 0.0);
    a.row("residue[definition]", est.value, est.spread);
    for (s, v) in &est.per_s {
        a.row(format!("residue[s={s}]"), *v, 0.0);
    }
    Ok(a)
}

fn require_standard_sublaplacian(cfg: &ExperimentConfig) -> Result<(), SchemaError> {
    let a = quadratic_matrix(cfg)?;
    if a != vec![vec![1.0, 0.0], vec![0.0, 1.0]] {
        return Err(SchemaError { path: "operator.matrix".into(), message: "finite-difference experiments use the identity matrix".into() });
    }
    if cfg.function()?.kind != FunctionKind::Bump {
        return Err(SchemaError { path: "function.kind".into(), message: "finite-difference experiments need a compactly supported bump".into() });
    }
    Ok(())
}

fn heisenberg_singular_values(cfg: &ExperimentConfig) -> Result<SingularValues, RunError> {
    require_standard_sublaplacian(cfg)?;
    let n = &cfg.numeric;
    let grid = Grid::dirichlet(n.half_widths.clone().expect("validated"), n.points.clone().expect("validated")).stage("grid")?;
    let f = coefficient(cfg)?;
    let fr = |x: &[f64]| f.eval(x).re;
    let op = fd_heisenberg_operator(&grid, &fr, n.gamma / 2.0).stage("discretize")?;
    fd_heisenberg_singular_values(&op, n.support_threshold).stage("singular_values")
}

fn weyl(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let mut a = Artifacts::default();
    let (sv, exponent, predicted, window, measured) = if cfg.group.kind == GroupKind::Heisenberg {
        let sv = heisenberg_singular_values(cfg)?;
        let top = SingularValues::new(sv.values()[..cfg.numeric.top.min(sv.len())].to_vec(), sv.method);
        let p = 4.0 / cfg.numeric.gamma;
        let fit = fit_weyl(&top, Some(p), cfg.numeric.window.map(|[l, h]| (l, h))).stage("fit")?;
        let f = coefficient(cfg)?;
        let r = cfg.function()?.radius.expect("validated");
        let c = &cfg.function()?.center;
        let lo: Vec<f64> = c.iter().map(|v| v - r).collect();
        let hi: Vec<f64> = c.iter().map(|v| v + r).collect();
        let sampled = SampledFunction::on_box(&|x: &[f64]| f.eval(x).re, &lo, &hi, 81).stage("prediction")?;
        let tau = tau_exp_heisenberg(&quadratic_matrix(cfg)?).stage("prediction")?.value;
        let pred = weyl_constant(&sampled, cfg.numeric.gamma, 2, 4, &|_| Ok(tau)).stage("prediction")?;
        (top, pred.exponent, pred.value, fit.window, fit)
    } else {
        let wc = weyl_config(cfg)?;
        let e = weyl_experiment(&wc).stage("weyl_experiment")?;
        if let Some(s) = e.self_convergence {
            a.row("self_convergence", s, 0.0);
        }
        (e.singular_values, e.predicted.exponent, e.predicted.value, e.measured.window, e.measured)
    };
    a.row("predicted_constant", predicted, 0.0);
    a.row("measured_constant", measured.constant, measured.stderr);
    a.row("relative_error", (measured.constant - predicted).abs() / predicted, 0.0);
    a.row("exponent", exponent, 0.0);
    a.row("window_lo", window.0 as f64, 0.0);
    a.row("window_hi", window.1 as f64, 0.0);
    a.row("values", sv.len() as f64, 0.0);
    a.plot = Some(weyl_plot_svg(&sv, exponent, predicted, window));
    a.singular_values = Some(sv.to_csv());
    Ok(a)
}

fn spectrum(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let sv = if cfg.group.kind == GroupKind::Heisenberg {
        heisenberg_singular_values(cfg)?
    } else {
        let wc = weyl_config(cfg)?;
        experiment_singular_values(&wc, &wc.grid).stage("singular_values")?
    };
    let mut a = Artifacts::default();
    a.row("values", sv.len() as f64, 0.0);
    a.row("largest", sv.values().first().copied().unwrap_or(0.0), 0.0);
    a.singular_values = Some(sv.to_csv());
    Ok(a)
}

fn signed(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    if cfg.group.kind == GroupKind::Heisenberg {
        return Err(SchemaError { path: "group.kind".into(), message: "signed experiments run on abelian groups".into() }.into());
    }
    let e = signed_experiment(&weyl_config(cfg)?).stage("signed_experiment")?;
    let mut a = Artifacts::default();
    for (name, part) in [("positive", &e.positive), ("negative", &e.negative)] {
        a.row(format!("{name}[predicted_constant]"), part.predicted.value, 0.0);
        a.row(format!("{name}[measured_constant]"), part.measured.constant, part.measured.stderr);
        a.row(format!("{name}[values]"), part.singular_values.len() as f64, 0.0);
    }
    a.row("window_lo", e.positive.measured.window.0 as f64, 0.0);
    a.row("window_hi", e.positive.measured.window.1 as f64, 0.0);
    a.singular_values = Some(e.positive.singular_values.to_csv());
    a.extra.push(("negative_singular_values.csv".into(), e.negative.singular_values.to_csv()));
    Ok(a)
}

fn zeta(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    if cfg.group.kind == GroupKind::Heisenberg || cfg.weights()?.len() != 1 {
        return Err(SchemaError { path: "group".into(), message: "the zeta trace check runs on the real line".into() }.into());
    }
    let p = symbol(cfg)?;
    let wc = weyl_config(cfg)?;
    let f = coefficient(cfg)?;
    let rows = zeta_trace_check(&p, &wc.grid, &|x: &[f64]| f.eval(x).re, &cfg.numeric.zs).stage("zeta_trace")?;
    let mut a = Artifacts::default();
    for r in rows {
        a.row(format!("zeta[z={}][discrete]", r.z), r.discrete, 0.0);
        a.row(format!("zeta[z={}][torus]", r.z), r.torus, 0.0);
        a.row(format!("zeta[z={}][predicted]", r.z), r.predicted, 0.0);
        a.row(format!("zeta[z={}][relative_error]", r.z), r.relative_error, 0.0);
    }
    Ok(a)
}

fn cover(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let c = cfg.cover()?;
    let space = match c.space {
        SpaceKind::Euclidean => CoverSpace::Euclidean(c.dim.expect("validated")),
        SpaceKind::Graded => CoverSpace::Graded(c.weights.clone().expect("validated")),
        SpaceKind::Heisenberg => CoverSpace::Heisenberg,
    };
    let region = Region::Box { lo: c.lo.clone(), hi: c.hi.clone() };
    let cover = greedy_cover_region(&space, &region, c.radius, c.samples_per_axis).stage("greedy_cover")?;
    let mut a = Artifacts::default();
    a.row("centers", cover.len() as f64, 0.0);
    a.row("radius", cover.radius, 0.0);
    a.row("delta", cover.delta, 0.0);
    a.row("haar_constant", cover.haar_constant, 0.0);
    a.row("covers_sample", if cover.covers(&region.sample(2 * c.samples_per_axis)) { 1.0 } else { 0.0 }, 0.0);
    a.row("max_multiplicity", cover.max_multiplicity(c.dilation) as f64, 0.0);
    a.row("multiplicity_bound", cover.multiplicity_bound(c.dilation), 0.0);
    let mut hist = String::from("multiplicity,count\n");
    for (k, n) in cover.multiplicity_histogram(c.dilation).iter().enumerate().filter(|(_, n)| **n > 0) {
        hist.push_str(&format!("{k},{n}\n"));
    }
    a.extra.push(("cover.csv".into(), cover.to_csv()));
    a.extra.push(("multiplicity.csv".into(), hist));
    Ok(a)
}
