//! The residue trace on homogeneous operators and Frullani integrals.

use statrs::function::gamma::gamma;

use crate::error::{invalid, Result};
use crate::quadrature::{integrate_real_line, QuadOptions};
use crate::trace::{tau_f_homogeneous, TraceResult};

/// `d_hom / Gamma(d_hom/m + 1) tau(e^{-P})`.
pub fn residue_closed_form(d_hom: u32, m: u32, tau_exp: &TraceResult) -> Result<f64> {
    if d_hom == 0 || m == 0 {
        return invalid("order and homogeneous dimension must be positive");
    }
    Ok(d_hom as f64 / gamma(d_hom as f64 / m as f64 + 1.0) * tau_exp.value)
}

/// `f_s(x) = s^{d_hom}(1 + s^m x)^{-d_hom/m} - (1 + x)^{-d_hom/m}` written
/// as `(x + s^{-m})^{-q} - (x + 1)^{-q}` and evaluated without cancellation.
pub fn residue_test_function(d_hom: u32, m: u32, s: f64) -> impl Fn(f64) -> f64 {
    let q = d_hom as f64 / m as f64;
    let c = s.powi(-(m as i32)) - 1.0;
    move |x: f64| {
        let base = (x + 1.0).powf(-q);
        base * (-q * (c / (x + 1.0)).ln_1p()).exp_m1()
    }
}

/// `a(s) = tau(s^{d_hom} alpha_s(T) - T)` for `T = (1 + P)^{-d_hom/m}`,
/// which is additive in `log s`.
pub fn residue_functional(d_hom: u32, m: u32, s: f64, tau_exp: &TraceResult) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return invalid("dilation parameter must be positive");
    }
    Ok(tau_f_homogeneous(residue_test_function(d_hom, m, s), d_hom, m, tau_exp)?.value)
}

/// Residue from its definition at several dilation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueEstimate {
    pub per_s: Vec<(f64, f64)>,
    pub value: f64,
    pub spread: f64,
}

pub const DEFAULT_DILATIONS: [f64; 3] = [2.0, std::f64::consts::E, 10.0];

/// `a(s) / log s` for each `s`, their mean and spread.
pub fn residue_via_definition(d_hom: u32, m: u32, tau_exp: &TraceResult, dilations: &[f64]) -> Result<ResidueEstimate> {
    if dilations.is_empty() {
        return invalid("at least one dilation parameter is required");
    }
    let mut per_s = Vec::with_capacity(dilations.len());
    for &s in dilations {
        if s == 1.0 {
            return invalid("dilation parameter 1 carries no information");
        }
        per_s.push((s, residue_functional(d_hom, m, s, tau_exp)? / s.ln()));
    }
    let vals: Vec<f64> = per_s.iter().map(|p| p.1).collect();
    let value = vals.iter().sum::<f64>() / vals.len() as f64;
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(ResidueEstimate { per_s, value, spread: hi - lo })
}

pub const RESIDUE_CSV_HEADER: &str = "group,operator,closed_form,definition_value,spread";

pub fn residue_csv_row(group: &str, operator_digest: &str, closed_form: f64, est: &ResidueEstimate) -> String {
    format!("{group},{operator_digest},{closed_form:e},{:e},{:e}", est.value, est.spread)
}

/// Both sides of `int_0^inf (g(s^m x) - g(x)) dx/x = m log s` for
/// `g(x) = x^a (1 + x)^{-a}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrullaniCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_error: f64,
}

/// `log(1 + e^{-u})` without overflow.
fn softplus_neg(u: f64) -> f64 {
    if u > 0.0 { (-u).exp().ln_1p() } else { -u + u.exp().ln_1p() }
}

/// Left side by quadrature in `u = log x`. The difference `g(s^m x) - g(x)`
/// is formed as `g(x) expm1(-a (L(u + m log s) - L(u)))` with
/// `L(u) = log(1 + e^{-u})`, so neither tail suffers cancellation.
pub fn frullani_check(a: f64, m: u32, s: f64) -> Result<FrullaniCheck> {
    if !(a > 0.0) || m == 0 || !(s > 0.0) || !s.is_finite() {
        return invalid("Frullani check needs a > 0, m > 0 and s > 0");
    }
    let shift = m as f64 * s.ln();
    let diff = move |u: f64| {
        let v = u + shift;
        let dl = if u > 0.0 && v > 0.0 {
            (-v).exp().ln_1p() - (-u).exp().ln_1p()
        } else if u <= 0.0 && v <= 0.0 {
            (u - v) + v.exp().ln_1p() - u.exp().ln_1p()
        } else {
            softplus_neg(v) - softplus_neg(u)
        };
        (-a * softplus_neg(u)).exp() * (-a * dl).exp_m1()
    };
    let opts = QuadOptions::with_tol(1e-15, 1e-13);
    let q = integrate_real_line(diff, -0.5 * shift, &opts).require("Frullani quadrature")?;
    let rhs = shift;
    Ok(FrullaniCheck { lhs: q.value, rhs, abs_error: (q.value - rhs).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{tau_exp_sphere, TraceMethod};
    use crate::operators::Symbol;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn tau_r1() -> TraceResult {
        tau_exp_sphere(&Symbol::laplacian(1)).unwrap()
    }

    #[test]
    fn closed_forms() {
        assert_relative_eq!(residue_closed_form(1, 2, &tau_r1()).unwrap(), 1.0 / PI, max_relative = 1e-12);
        let th = TraceResult { value: 1.0 / (64.0 * PI * PI), method: TraceMethod::HeisenbergClosed, error_estimate: 0.0 };
        assert_relative_eq!(residue_closed_form(4, 2, &th).unwrap(), 1.0 / (32.0 * PI * PI), max_relative = 1e-12);
    }

    #[test]
    fn definition_matches_closed_form() {
        let t = tau_r1();
        let r = residue_via_definition(1, 2, &t, &DEFAULT_DILATIONS).unwrap();
        assert!(r.spread < 1e-8);
        assert_relative_eq!(r.value, 1.0 / PI, epsilon = 1e-8);
    }

    #[test]
    fn additivity() {
        let t = tau_r1();
        let a = |s| residue_functional(1, 2, s, &t).unwrap();
        assert_relative_eq!(a(6.0), a(2.0) + a(3.0), epsilon = 1e-9);
        assert!(residue_functional(1, 2, -1.0, &t).is_err());
    }

    #[test]
    fn test_function_matches_naive_form() {
        let f = residue_test_function(3, 2, 2.5);
        for x in [0.0, 0.3, 4.0, 50.0] {
            let naive = 2.5f64.powi(3) * (1.0 + 2.5f64.powi(2) * x).powf(-1.5) - (1.0 + x).powf(-1.5);
            assert_relative_eq!(f(x), naive, max_relative = 1e-10);
        }
    }

    #[test]
    fn frullani_basic() {
        let c = frullani_check(0.5, 2, 2.0).unwrap();
        assert_relative_eq!(c.lhs, 2.0 * 2f64.ln(), epsilon = 1e-10);
        let inv = frullani_check(0.5, 2, 0.5).unwrap();
        assert_relative_eq!(inv.lhs, -c.lhs, epsilon = 1e-10);
        assert!(frullani_check(0.0, 2, 2.0).is_err());
    }
}
