//! WebAssembly bindings for the browser demo.

use graded_weyl::coverings::{greedy_cover_region, CoverSpace, Region};
use graded_weyl::discretize::Grid;
use graded_weyl::operators::{Coefficient, Symbol};
use graded_weyl::residue::residue_closed_form;
use graded_weyl::spectra::{weyl_experiment, OperatorModel, WeylConfig};
use graded_weyl::trace::{tau_exp_aniso, tau_exp_direct};
use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::SeedableRng;
use wasm_bindgen::prelude::*;

fn js_error(e: graded_weyl::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone)]
pub struct TraceReport {
    pub weights: Vec<u32>,
    pub order: u32,
    pub homogeneous_dimension: u32,
    pub anisotropic: f64,
    pub direct: f64,
    pub direct_error: f64,
    pub residue: f64,
}

/// `tau(e^{-P})` and the residue of `P = xi_1^{2a} + xi_2^{2b}` on `R^2`
/// with the dilation weights that make `P` homogeneous.
#[wasm_bindgen]
pub fn trace_diagonal(a: u32, b: u32) -> Result<TraceReport, JsError> {
    if a == 0 || b == 0 || a > 4 || b > 4 {
        return Err(JsError::new("exponents must lie in 1..=4"));
    }
    let l = a * b / gcd(a, b);
    let weights = vec![l / a, l / b];
    let order = 2 * l;
    let p = Symbol::from_terms(2, &[(vec![2 * a, 0], C64::new(1.0, 0.0)), (vec![0, 2 * b], C64::new(1.0, 0.0))]);
    let aniso = tau_exp_aniso(&p, &weights).map_err(js_error)?;
    let direct = tau_exp_direct(&p).map_err(js_error)?;
    let d_hom = weights.iter().sum();
    let residue = residue_closed_form(d_hom, order, &aniso).map_err(js_error)?;
    Ok(TraceReport {
        weights,
        order,
        homogeneous_dimension: d_hom,
        anisotropic: aniso.value,
        direct: direct.value,
        direct_error: direct.error_estimate,
        residue,
    })
}

#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone)]
pub struct WeylReport {
    pub predicted: f64,
    pub measured: f64,
    pub stderr: f64,
    pub exponent: f64,
    pub window_lo: usize,
    pub window_hi: usize,
    pub values: Vec<f64>,
}

/// Singular values of `f(x) (-d^2/dx^2)^{-gamma/2} f(x)` on a periodic grid
/// and the fitted and predicted Weyl constants, for a Gaussian `f`.
#[wasm_bindgen]
pub fn weyl_line(gamma: f64, width: f64, points: usize) -> Result<WeylReport, JsError> {
    if !(points.is_power_of_two() && (256..=8192).contains(&points)) {
        return Err(JsError::new("points must be a power of two in 256..=8192"));
    }
    let half = points as f64 * std::f64::consts::PI / 256.0;
    let grid = Grid::periodic(vec![half], vec![points]).map_err(js_error)?;
    let f = Coefficient::gaussian(1.0, vec![0.0], vec![width]);
    let cfg = WeylConfig::new(vec![1], OperatorModel::Constant(Symbol::laplacian(1)), f, gamma, grid);
    let e = weyl_experiment(&cfg).map_err(js_error)?;
    let shown = e.singular_values.len().min(2 * e.measured.window.1.max(1));
    Ok(WeylReport {
        predicted: e.predicted.value,
        measured: e.measured.constant,
        stderr: e.measured.stderr,
        exponent: e.predicted.exponent,
        window_lo: e.measured.window.0,
        window_hi: e.measured.window.1,
        values: e.singular_values.values()[..shown].to_vec(),
    })
}

#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone)]
pub struct CoverReport {
    /// Flattened `[x0, y0, x1, y1, ...]`.
    pub centers: Vec<f64>,
    /// Flattened `[lo_x, lo_y, hi_x, hi_y, ...]` of the region's boxes.
    pub boxes: Vec<f64>,
    /// For each center, the number of centers within `2 * scale * eps`.
    pub multiplicity: Vec<u32>,
    pub max_multiplicity: u32,
    pub bound: f64,
}

/// Greedy `eps`-cover of a random union of boxes in `[0, 10]^2` and the
/// overlap multiplicity of the balls `B(x_i, scale * eps)`.
#[wasm_bindgen]
pub fn cover_plane(eps: f64, seed: u32, scale: u32) -> Result<CoverReport, JsError> {
    if !(0.1..=5.0).contains(&eps) || !(1..=4).contains(&scale) {
        return Err(JsError::new("need 0.1 <= eps <= 5 and 1 <= scale <= 4"));
    }
    let mut rng = StdRng::seed_from_u64(seed as u64);
    let region = Region::random(2, 10.0, &mut rng);
    let cover = greedy_cover_region(&CoverSpace::Euclidean(2), &region, eps, 120).map_err(js_error)?;
    let mut boxes = Vec::new();
    if let Region::Union(parts) = &region {
        for part in parts {
            if let Region::Box { lo, hi } = part {
                boxes.extend([lo[0], lo[1], hi[0], hi[1]]);
            }
        }
    }
    let multiplicity: Vec<u32> = cover.multiplicity(scale).into_iter().map(|m| m as u32).collect();
    Ok(CoverReport {
        centers: cover.centers.iter().flatten().copied().collect(),
        boxes,
        max_multiplicity: multiplicity.iter().copied().max().unwrap_or(0),
        multiplicity,
        bound: cover.multiplicity_bound(scale),
    })
}
