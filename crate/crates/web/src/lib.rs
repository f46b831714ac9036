//! Browser bindings: the fiber and monodromy of a curve, its characteristic
//! function, and the Jacobi comparison for a curvature profile.
//!
//! Each operation takes plain strings and numbers and returns a JSON string.

use algebroid::continuation::{monodromy, solve_fiber};
use algebroid::covering::build_covering;
use algebroid::curvature::{comparison_check, KappaProfile};
use algebroid::defining::{AlgebroidCurve, DefiningPolynomial};
use algebroid::field::{parse_complex, AnalyticExpr, Backend};
use algebroid::nevanlinna::{branch_counting, log_grid, Functionals};
use algebroid::NumericSettings;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn fail(e: algebroid::Error) -> String {
    format!("{}: {e}", e.name())
}

/// `A_0; A_1; …; A_ν`, coefficients in `z` separated by semicolons.
fn parse_curve(coeffs: &str) -> Result<AlgebroidCurve, String> {
    let parts: Vec<&str> = coeffs.split(';').map(str::trim).filter(|s| !s.is_empty()).collect();
    let mut transcendental = false;
    for p in &parts {
        transcendental |= AnalyticExpr::parse(p).map_err(fail)?.is_transcendental();
    }
    let backend = if transcendental { Backend::Numeric } else { Backend::Exact };
    let p = DefiningPolynomial::parse(&parts, backend).map_err(fail)?;
    Ok(AlgebroidCurve::single(p))
}

/// Fiber over `at` and the monodromy of the circle of `radius` around `around`.
pub fn sheets_json(coeffs: &str, at: &str, around: &str, radius: f64) -> Result<String, String> {
    let curve = parse_curve(coeffs)?;
    let s = NumericSettings::default();
    let z = parse_complex(at).map_err(fail)?;
    let fiber = solve_fiber(&curve, z, &s).map_err(fail)?;
    let center = parse_complex(around).map_err(fail)?;
    let m = monodromy(&curve, center, radius, None, &s).map_err(fail)?;
    let values: Vec<[f64; 2]> = fiber.values.iter().map(|v| [v[0].re, v[0].im]).collect();
    Ok(json!({
        "values": values,
        "permutation": m.permutation.0.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "cycles": m.permutation.to_string(),
        "cycle_type": m.permutation.cycle_type(),
    })
    .to_string())
}

/// `T(r)` and `N_bran(r)` on a log-spaced grid; `n_bran` is null if it is undefined.
pub fn characteristic_json(coeffs: &str, rmin: f64, rmax: f64, steps: usize) -> Result<String, String> {
    let curve = parse_curve(coeffs)?;
    let grid = log_grid(rmin, rmax, steps).map_err(fail)?;
    let model = build_covering(&curve, rmax * 1.25, &NumericSettings::default()).map_err(fail)?;
    let t = Functionals::new(&model).characteristic_grid(&grid).map_err(fail)?;
    // undefined when a branch point sits at the origin; reported as null
    let n_bran = grid.iter().map(|&r| branch_counting(&model, r)).collect::<Result<Vec<_>, _>>().ok();
    Ok(json!({"sheets": model.sheet_count(), "r": grid, "t": t, "n_bran": n_bran}).to_string())
}

/// `G(t)` with its bounds `t` and `χ(√-κ(t), t)` for `κ` given as an expression in `t`.
pub fn jacobi_json(kappa: &str, tmax: f64, steps: usize) -> Result<String, String> {
    if !(tmax > 0.0) || steps < 2 {
        return Err("need tmax > 0 and at least two points".into());
    }
    let profile = KappaProfile::expression(kappa).map_err(fail)?;
    let grid: Vec<f64> = (0..steps).map(|k| tmax * k as f64 / (steps - 1) as f64).collect();
    let r = comparison_check(&profile, &grid, 1e-6).map_err(fail)?;
    Ok(serde_json::to_string(&r).expect("plain data"))
}

#[wasm_bindgen]
pub fn sheets(coeffs: &str, at: &str, around: &str, radius: f64) -> Result<String, JsValue> {
    sheets_json(coeffs, at, around, radius).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn characteristic(coeffs: &str, rmin: f64, rmax: f64, steps: usize) -> Result<String, JsValue> {
    characteristic_json(coeffs, rmin, rmax, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn jacobi(kappa: &str, tmax: f64, steps: usize) -> Result<String, JsValue> {
    jacobi_json(kappa, tmax, steps).map_err(|e| JsValue::from_str(&e))
}
