//! Browser bindings: asymptotic Delta F curves, permittivity and reflection
//! curves, and a quick double-precision Delta F. Each call returns a JSON
//! string; the plain functions are also usable natively.

use casimir::asymptotics::{te_asymptotics, tm_asymptotics, AsymptoticResult};
use casimir::dielectric::{reflection_coeffs, DielectricModel, PermittivityModel};
use casimir::lifshitz::{delta_f_direct, Numerics, PlateSystem, Polarization};
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 2000;

fn grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must be in 2..={MAX_POINTS}, got {points}"));
    }
    if !(min > 0.0) || !(max > min) {
        return Err(format!("need 0 < min < max, got [{min}, {max}]"));
    }
    Ok((0..points).map(|i| min * (max / min).powf(i as f64 / (points - 1) as f64)).collect())
}

fn terms_json(r: &AsymptoticResult) -> serde_json::Value {
    serde_json::to_value(&r.terms).unwrap_or_default()
}

/// Asymptotic Delta F^TM and Delta F^TE (J/m^2) on a log grid in T.
/// `sigma` is sigma_SI/eps0 in 1/s, `a_um` the separation in micrometres.
pub fn asymptotic_curves_json(sigma: f64, a_um: f64, t_min: f64, t_max: f64, points: usize) -> Result<String, String> {
    let a = a_um * 1e-6;
    let temps = grid(t_min, t_max, points)?;
    let tm = tm_asymptotics(sigma, a).map_err(|e| e.to_string())?;
    let te = te_asymptotics(sigma, a).map_err(|e| e.to_string())?;
    let warnings = tm.warnings(t_max);
    Ok(json!({
        "T_K": temps,
        "dF_TM": temps.iter().map(|&t| tm.evaluate(t)).collect::<Vec<_>>(),
        "dF_TE": temps.iter().map(|&t| te.evaluate(t)).collect::<Vec<_>>(),
        "terms": { "TM": terms_json(&tm), "TE": terms_json(&te) },
        "alpha": tm.alpha,
        "warnings": warnings,
    })
    .to_string())
}

/// eps(i zeta) and the TE/TM reflection coefficients at kappa = ratio * zeta,
/// on a log grid in zeta (1/s).
pub fn reflection_curves_json(
    eps_bar: f64,
    omega0: f64,
    sigma: f64,
    kappa_ratio: f64,
    zeta_min: f64,
    zeta_max: f64,
    points: usize,
) -> Result<String, String> {
    let model = DielectricModel::new(eps_bar, omega0, sigma, PermittivityModel::FullOscillator).map_err(|e| e.to_string())?;
    if !(kappa_ratio >= 1.0) || !kappa_ratio.is_finite() {
        return Err(format!("kappa/zeta must be finite and >= 1, got {kappa_ratio}"));
    }
    let zetas = grid(zeta_min, zeta_max, points)?;
    let mut eps = Vec::with_capacity(points);
    let mut r_tm = Vec::with_capacity(points);
    let mut r_te = Vec::with_capacity(points);
    for &z in &zetas {
        let e = model.permittivity(z).map_err(|e| e.to_string())?;
        let r = reflection_coeffs(e, kappa_ratio * z, z).map_err(|e| e.to_string())?;
        eps.push(e);
        r_tm.push(r.r_tm);
        r_te.push(r.r_te);
    }
    Ok(json!({ "zeta": zetas, "eps": eps, "r_TM": r_tm, "r_TE": r_te }).to_string())
}

/// Delta F = F(T) - F(0) by direct numerics in double precision, next to the
/// asymptotic value, for each polarization.
pub fn delta_f_quick_json(eps_bar: f64, sigma: f64, a_um: f64, t_kelvin: f64) -> Result<String, String> {
    if !(t_kelvin > 0.0) || t_kelvin > 10.0 {
        return Err(format!("temperature must be in (0, 10] K, got {t_kelvin}"));
    }
    let material = DielectricModel::new(eps_bar, 8e15, sigma, PermittivityModel::FullOscillator).map_err(|e| e.to_string())?;
    let system = PlateSystem::new(a_um * 1e-6, t_kelvin, material, Polarization::Both).map_err(|e| e.to_string())?;
    let num = delta_f_direct(&system, Numerics::double()).map_err(|e| e.to_string())?;
    let a = a_um * 1e-6;
    let th_tm = tm_asymptotics(sigma, a).ok().map(|r| r.evaluate(t_kelvin));
    let th_te = te_asymptotics(sigma, a).ok().map(|r| r.evaluate(t_kelvin));
    Ok(json!({
        "T_K": t_kelvin,
        "dF_TM": num[0].value,
        "dF_TE": num[1].value,
        "dF_TM_asym": th_tm,
        "dF_TE_asym": th_te,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn asymptotic_curves(sigma: f64, a_um: f64, t_min: f64, t_max: f64, points: usize) -> Result<String, JsError> {
    asymptotic_curves_json(sigma, a_um, t_min, t_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn reflection_curves(
    eps_bar: f64,
    omega0: f64,
    sigma: f64,
    kappa_ratio: f64,
    zeta_min: f64,
    zeta_max: f64,
    points: usize,
) -> Result<String, JsError> {
    reflection_curves_json(eps_bar, omega0, sigma, kappa_ratio, zeta_min, zeta_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn delta_f_quick(eps_bar: f64, sigma: f64, a_um: f64, t_kelvin: f64) -> Result<String, JsError> {
    delta_f_quick_json(eps_bar, sigma, a_um, t_kelvin).map_err(|e| JsError::new(&e))
}
