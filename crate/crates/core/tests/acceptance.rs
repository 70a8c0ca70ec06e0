use std::f64::consts::{E, PI};
use std::time::Instant;

use graded_weyl::coverings::{greedy_cover, greedy_cover_region, partition_functions, CoverSpace, Region, SampleGrid};
use graded_weyl::discretize::{fd_heisenberg_operator, fourier_operator, Grid};
use graded_weyl::lie::{GradedLieAlgebra, PreferredGenerators};
use graded_weyl::operators::{Coefficient, Symbol};
use graded_weyl::representations::{quadratic_operator, rep_heisenberg, tau_heisenberg_plancherel, trace_exp_rep, OscillatorBasis, PlancherelOptions};
use graded_weyl::residue::{frullani_check, residue_closed_form, residue_via_definition, DEFAULT_DILATIONS};
use graded_weyl::spectra::{
    fd_heisenberg_singular_values, fit_weyl, fourier_singular_values, signed_experiment, weyl_experiment, zeta_trace_check, OperatorModel, SingularValues,
    WeylConfig,
};
use graded_weyl::trace::{
    aniso_sphere_measure_cubature, aniso_sphere_measure_mc, tau_exp_aniso, tau_exp_direct, tau_exp_gaussian, tau_exp_heisenberg, tau_exp_heisenberg_det,
    tau_exp_sphere, weyl_constant, SampledFunction,
};
use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Report {
    required_failures: Vec<String>,
}

impl Report {
    /// Criteria marked informational print FAIL without failing the run.
    fn line(&mut self, id: &str, ok: bool, informational: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        let note = if informational && !ok { " (informational)" } else { "" };
        println!("criterion {id:<4} {tag}{note}  {detail}");
        if !ok && !informational {
            self.required_failures.push(id.to_string());
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn sym(d: usize, terms: &[(Vec<u32>, f64)]) -> Symbol {
    let t: Vec<(Vec<u32>, C64)> = terms.iter().map(|(e, c)| (e.clone(), C64::new(*c, 0.0))).collect();
    Symbol::from_terms(d, &t)
}

fn quadratic_symbol(a: &[Vec<f64>]) -> Symbol {
    sym(2, &[(vec![2, 0], a[0][0]), (vec![1, 1], 2.0 * a[0][1]), (vec![0, 2], a[1][1])])
}

fn random_pd(rng: &mut StdRng) -> Vec<Vec<f64>> {
    let m: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
    let a00 = m[0] * m[0] + m[1] * m[1] + 0.5;
    let a01 = m[0] * m[2] + m[1] * m[3];
    let a11 = m[2] * m[2] + m[3] * m[3] + 0.5;
    vec![vec![a00, a01], vec![a01, a11]]
}

fn one_d_grid() -> Grid {
    Grid::periodic(vec![16.0 * PI], vec![4096]).unwrap()
}

fn gaussian_1d() -> Coefficient {
    Coefficient::gaussian(1.0, vec![0.0], vec![1.0])
}

fn frullani(r: &mut Report) {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for a in [0.5, 1.0, 2.0] {
        for m in [1, 2, 4] {
            for s in [2.0, E, 10.0] {
                let c = frullani_check(a, m, s).unwrap();
                worst = worst.max((c.lhs - m as f64 * s.ln()).abs());
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    r.line("1", worst < 1e-8 && secs < 1.0, false, format!("max error {worst:.2e}, {secs:.3} s"));
}

fn euclidean_traces(r: &mut Report) {
    let mut worst = 0.0f64;
    let mut check = |p: &Symbol, gaussian: Option<&[Vec<f64>]>, exact: Option<f64>| {
        let direct = tau_exp_direct(p).unwrap().value;
        worst = worst.max(rel(tau_exp_sphere(p).unwrap().value, direct));
        if let Some(a) = gaussian {
            worst = worst.max(rel(tau_exp_gaussian(a).unwrap().value, direct));
        }
        if let Some(e) = exact {
            worst = worst.max(rel(direct, e));
        }
    };
    let gauss = |a: &[Vec<f64>], d: usize| {
        let det = if d == 1 { a[0][0] } else { a[0][0] * a[1][1] - a[0][1] * a[1][0] };
        (4.0 * PI).powf(-(d as f64) / 2.0) / det.sqrt()
    };
    let one = vec![vec![1.0]];
    check(&Symbol::laplacian(1), Some(&one), Some(gauss(&one, 1)));
    check(&sym(1, &[(vec![4], 1.0)]), None, None);
    for d in [2, 3] {
        let id: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        check(&Symbol::laplacian(d), Some(&id), Some((4.0 * PI).powf(-(d as f64) / 2.0)));
    }
    let mut rng = StdRng::seed_from_u64(21);
    for _ in 0..3 {
        let a = random_pd(&mut rng);
        check(&quadratic_symbol(&a), Some(&a), Some(gauss(&a, 2)));
    }
    r.line("2", worst < 1e-6, false, format!("max relative disagreement {worst:.2e}"));
}

fn anisotropic_trace(r: &mut Report) {
    let p = sym(2, &[(vec![4, 0], 1.0), (vec![0, 2], 1.0)]);
    let a = tau_exp_aniso(&p, &[1, 2]).unwrap().value;
    let d = tau_exp_direct(&p).unwrap().value;
    let all = |_: &[f64]| true;
    let cub = aniso_sphere_measure_cubature(&[1, 2], &all).unwrap();
    let (mc, _) = aniso_sphere_measure_mc(&[1, 2], &all, 4_000_000, 17).unwrap();
    let ok = rel(a, d) < 1e-4 && rel(mc, cub) < 1e-3;
    r.line("3", ok, false, format!("aniso {a:.7} direct {d:.7} (rel {:.1e}); measure {cub:.6} vs {mc:.6} (rel {:.1e})", rel(a, d), rel(mc, cub)));
}

fn heisenberg_traces(r: &mut Report) {
    let h = GradedLieAlgebra::heisenberg(1);
    let g = PreferredGenerators::new(&h, vec![0, 1, 2]).unwrap();
    let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    let basis = OscillatorBasis::new(1, 60).unwrap();
    let osc = trace_exp_rep(&rep_heisenberg(&quadratic_operator(&id), &h, &g, 1.0, &basis).unwrap()).unwrap().value;
    let osc_err = (osc - 1.0 / (E - 1.0 / E)).abs();
    let mut rng = StdRng::seed_from_u64(4);
    let mut plan = 0.0f64;
    let mut forms = 0.0f64;
    for a in [id.clone(), vec![vec![1.0, 0.0], vec![0.0, 4.0]], random_pd(&mut rng)] {
        let closed = tau_exp_heisenberg(&a).unwrap().value;
        let p = tau_heisenberg_plancherel(&quadratic_operator(&a), &h, &g, &PlancherelOptions::default()).unwrap().value;
        plan = plan.max(rel(p, closed));
        forms = forms.max(rel(tau_exp_heisenberg_det(&a).unwrap().value, closed));
    }
    let ok = osc_err < 1e-6 && plan < 1e-4 && forms < 1e-8;
    r.line("4", ok, false, format!("oscillator error {osc_err:.1e}; Plancherel vs closed form {plan:.1e}; sinh vs determinant {forms:.1e}"));
}

fn residues(r: &mut Report) {
    let mut worst = 0.0f64;
    let mut spread = 0.0f64;
    let line = tau_exp_sphere(&Symbol::laplacian(1)).unwrap();
    let est = residue_via_definition(1, 2, &line, &DEFAULT_DILATIONS).unwrap();
    worst = worst.max(rel(est.value, 1.0 / PI)).max(rel(est.value, residue_closed_form(1, 2, &line).unwrap()));
    spread = spread.max(est.spread);
    let aniso = tau_exp_aniso(&sym(2, &[(vec![4, 0], 1.0), (vec![0, 2], 1.0)]), &[1, 2]).unwrap();
    let est = residue_via_definition(3, 4, &aniso, &DEFAULT_DILATIONS).unwrap();
    worst = worst.max(rel(est.value, residue_closed_form(3, 4, &aniso).unwrap()));
    spread = spread.max(est.spread);
    let heis = residue_closed_form(4, 2, &tau_exp_heisenberg(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()).unwrap();
    let heis_err = rel(heis, 1.0 / (32.0 * PI * PI));
    let ok = worst < 1e-5 && spread < 1e-5 && heis_err < 1e-10;
    r.line("5", ok, false, format!("definition vs closed form {worst:.1e}, spread {spread:.1e}, Heisenberg {heis_err:.1e}"));
}

fn weyl_1d(r: &mut Report) {
    let lap = Symbol::laplacian(1);
    let t = Instant::now();
    let mut cfg = WeylConfig::new(vec![1], OperatorModel::Constant(lap), gaussian_1d(), 2.0, one_d_grid());
    cfg.window = Some((100, 1000));
    cfg.support_threshold = 0.0;
    match weyl_experiment(&cfg) {
        Ok(e) => r.line(
            "6",
            e.relative_error < 0.05,
            true,
            format!("window [100,1000]: {:.5} vs 2/pi {:.5} (rel {:.3})", e.measured.constant, 2.0 / PI, e.relative_error),
        ),
        Err(err) => r.line("6", false, true, format!("window [100,1000]: {err}")),
    }
    cfg.window = None;
    cfg.support_threshold = 1e-10;
    let e = weyl_experiment(&cfg).unwrap();
    r.line(
        "6r",
        e.relative_error < 0.05,
        false,
        format!("resolved window {:?}: {:.5} vs {:.5} (rel {:.3}), {:.1} s", e.measured.window, e.measured.constant, e.predicted.value, e.relative_error, t.elapsed().as_secs_f64()),
    );
}

fn grid_doubling(r: &mut Report) {
    let f = |x: &[f64]| (-x[0] * x[0]).exp();
    let p = Symbol::laplacian(1);
    let at = |n: usize| {
        let grid = Grid::periodic(vec![16.0 * PI], vec![n]).unwrap();
        fourier_singular_values(&fourier_operator(&p, &grid, 1.0, &f).unwrap(), 1e-10).unwrap()
    };
    let (a, b) = (at(4096), at(8192));
    let first_bad = (0..200).find(|&k| rel(a.values()[k], b.values()[k]) > 1e-3);
    let detail = match first_bad {
        None => "top 200 values within 0.1% under grid doubling".to_string(),
        Some(k) => format!("top 200 under grid doubling: first change above 0.1% at k = {k}"),
    };
    r.line("6d", first_bad.is_none(), true, detail);
}

fn weyl_variable(r: &mut Report) {
    let t = Instant::now();
    let a = Coefficient::trig(2.0, &[(0.0, 1.0, vec![1.0])]);
    let cfg = WeylConfig::new(vec![1], OperatorModel::DivergenceForm(a), gaussian_1d(), 2.0, one_d_grid());
    let e = weyl_experiment(&cfg).unwrap();
    r.line(
        "7",
        e.relative_error < 0.10,
        false,
        format!(
            "window {:?}: {:.5} vs {:.5} (rel {:.3}), {:.1} s",
            e.measured.window,
            e.measured.constant,
            e.predicted.value,
            e.relative_error,
            t.elapsed().as_secs_f64()
        ),
    );
}

fn weyl_anisotropic(r: &mut Report) {
    let t = Instant::now();
    let p = sym(2, &[(vec![4, 0], 1.0), (vec![0, 2], 1.0)]);
    let f = Coefficient::gaussian(1.0, vec![0.0, 0.0], vec![3.0, 0.5]);
    let mut cfg = WeylConfig::new(vec![1, 2], OperatorModel::Constant(p), f, 4.0, Grid::periodic(vec![16.0, 3.0], vec![96, 96]).unwrap());
    cfg.refinement = Some(Grid::periodic(vec![16.0, 3.0], vec![64, 64]).unwrap());
    let e = weyl_experiment(&cfg).unwrap();
    let spread = e.self_convergence.unwrap_or(f64::NAN);
    r.line(
        "8",
        e.relative_error < 0.15 && spread < 0.10,
        false,
        format!(
            "96x96 window {:?}: {:.5} vs {:.5} (rel {:.3}), spread vs 64x64 {:.3}, {:.1} s",
            e.measured.window,
            e.measured.constant,
            e.predicted.value,
            e.relative_error,
            spread,
            t.elapsed().as_secs_f64()
        ),
    );
}

fn signed_parts(r: &mut Report) {
    let lap = Symbol::laplacian(1);
    let f = Coefficient::poly_gaussian(vec![(1.0, vec![1])], vec![0.0], vec![1.0]);
    let e = signed_experiment(&WeylConfig::new(vec![1], OperatorModel::Constant(lap.clone()), f, 2.0, one_d_grid())).unwrap();
    let rp = rel(e.positive.measured.constant, e.positive.predicted.value);
    let rn = rel(e.negative.measured.constant, e.negative.predicted.value);
    let e0 = signed_experiment(&WeylConfig::new(vec![1], OperatorModel::Constant(lap), gaussian_1d(), 2.0, one_d_grid())).unwrap();
    let neg = e0.negative.measured.constant;
    r.line(
        "9",
        rp < 0.10 && rn < 0.10 && neg < 1e-3,
        false,
        format!(
            "+ {:.5} vs {:.5} (rel {rp:.3}), - {:.5} vs {:.5} (rel {rn:.3}), f >= 0 negative part {neg:.1e}",
            e.positive.measured.constant, e.positive.predicted.value, e.negative.measured.constant, e.negative.predicted.value
        ),
    );
}

fn zeta_traces(r: &mut Report) {
    let rows = zeta_trace_check(&Symbol::laplacian(1), &one_d_grid(), &|x: &[f64]| (-x[0] * x[0]).exp(), &[3.0, 1.1]).unwrap();
    let raw = |i: usize| rel(rows[i].discrete, rows[i].predicted);
    let (t3, t11) = (rows[0].relative_error, rows[1].relative_error);
    r.line("10", t3 < 0.02 && t11 < 0.10, false, format!("torus trace: z=3 rel {t3:.1e}, z=1.1 rel {t11:.1e}"));
    r.line(
        "10g",
        raw(0) < 0.02 && raw(1) < 0.10,
        true,
        format!("grid-matrix trace: z=3 {:.6} vs {:.6} (rel {:.1e}), z=1.1 {:.4} vs {:.4} (rel {:.2})", rows[0].discrete, rows[0].predicted, raw(0), rows[1].discrete, rows[1].predicted, raw(1)),
    );
}

fn coverings(r: &mut Report) {
    let mut rng = StdRng::seed_from_u64(11);
    let mut ok = true;
    let mut worst = Vec::new();
    for (space, extent, per_axis) in [(CoverSpace::Euclidean(1), 10.0, 400), (CoverSpace::Euclidean(2), 6.0, 60), (CoverSpace::Graded(vec![1, 2]), 4.0, 60)] {
        let bound = 5f64.powf(space.delta());
        let mut m_max = 0;
        for _ in 0..100 {
            let region = Region::random(space.dim(), extent, &mut rng);
            let cover = greedy_cover_region(&space, &region, rng.random_range(0.3..0.6), per_axis).unwrap();
            let m = cover.max_multiplicity(1);
            ok &= cover.covers(&region.sample(per_axis)) && m as f64 <= bound;
            m_max = m_max.max(m);
        }
        worst.push(format!("delta {}: {m_max} <= {bound}", space.delta()));
    }
    let space = CoverSpace::Euclidean(2);
    let unit = Region::Box { lo: vec![0.0, 0.0], hi: vec![1.0, 1.0] };
    for level in [3u32, 4, 5] {
        let rad = 0.5f64.powi(level as i32 + 1);
        let n = (4.0 / rad).ceil() as usize + 3;
        let grid = SampleGrid::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![n, n]).unwrap();
        let cover = greedy_cover(&space, &grid.points(), rad).unwrap();
        let part = partition_functions(&cover, level, &grid).unwrap();
        let d = part.mass_defect(&unit).total();
        let slack = cover.len() as f64 * part.cell_measure;
        ok &= part.pairwise_disjoint() && part.values_in_unit_interval() && d <= 0.5f64.powi(level as i32) + slack;
        worst.push(format!("l={level}: defect {d:.4}"));
    }
    r.line("11", ok, false, worst.join(", "));
}

fn heisenberg_weyl(r: &mut Report) {
    let t = Instant::now();
    let (half, radius) = (4.0, 2.0);
    let grid = Grid::dirichlet(vec![half; 3], vec![32; 3]).unwrap();
    let bump = Coefficient::compact_bump(1.0, vec![0.0; 3], radius);
    let f = |x: &[f64]| bump.eval(x).re;
    let op = fd_heisenberg_operator(&grid, &f, 1.0).unwrap();
    let sv = fd_heisenberg_singular_values(&op, 0.0).unwrap();
    let top = SingularValues::new(sv.values()[..800].to_vec(), sv.method);
    let fit = fit_weyl(&top, Some(2.0), Some((80, 799))).unwrap();
    let sampled = SampledFunction::on_box(&f, &[-radius; 3], &[radius; 3], 81).unwrap();
    let predict = |tau: f64| weyl_constant(&sampled, 2.0, 2, 4, &|_| Ok(tau)).unwrap().value;
    let (plancherel_tau, lebesgue_tau) = (1.0 / (64.0 * PI * PI), 1.0 / 16.0);
    let (pp, pl) = (predict(plancherel_tau), predict(lebesgue_tau));
    r.line(
        "12",
        rel(fit.constant, pp) < 0.25,
        true,
        format!(
            "32^3 top 800: {:.4} vs {pp:.4} from tau = 1/(64 pi^2) (rel {:.2}); Lebesgue-Haar tau = 1/16 gives {pl:.4}; {:.1} s",
            fit.constant,
            rel(fit.constant, pp),
            t.elapsed().as_secs_f64()
        ),
    );
}

fn main() {
    let mut r = Report { required_failures: Vec::new() };
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let checks: [(&str, fn(&mut Report)); 13] = [
        ("1", frullani),
        ("2", euclidean_traces),
        ("3", anisotropic_trace),
        ("4", heisenberg_traces),
        ("5", residues),
        ("6", weyl_1d),
        ("6d", grid_doubling),
        ("7", weyl_variable),
        ("8", weyl_anisotropic),
        ("9", signed_parts),
        ("10", zeta_traces),
        ("11", coverings),
        ("12", heisenberg_weyl),
    ];
    for (id, check) in checks {
        if only.is_empty() || only.iter().any(|o| o == id) {
            check(&mut r);
        }
    }
    if !r.required_failures.is_empty() {
        eprintln!("required criteria failed: {}", r.required_failures.join(", "));
        std::process::exit(1);
    }
}
