//! Checks of the asymptotic forms against direct numerics: R curves,
//! coefficient fits and the TE cubic comparison.

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::Serialize;

use crate::asymptotics::{delta_f_te, delta_f_tm, te_coefficients};
use crate::dielectric::Mode;
use crate::error::{domain, Error, Result};
use crate::lifshitz::{delta_f_sweep, zero_temperature_energy, Numerics, PlateSystem, Polarization};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    #[serde(rename = "T_K")]
    pub t_k: f64,
    #[serde(rename = "F_num")]
    pub f_num: f64,
    #[serde(rename = "F_asym")]
    pub f_asym: f64,
    #[serde(rename = "dF_num")]
    pub df_num: f64,
    #[serde(rename = "dF_th")]
    pub df_th: f64,
    /// (dF_th - dF_num) / dF_th; `None` when dF_th = 0.
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub pol: Mode,
}

/// sigma_SI / eps0 of the system's material.
pub fn sigma_si_over_eps0(system: &PlateSystem) -> f64 {
    // 4 pi sigma (Gaussian units) equals sigma_SI / eps0 in SI.
    system.material.four_pi_sigma
}

/// Asymptotic Delta F used on the theory side of R: the two leading TM
/// terms, or the TE terms through T^3.
pub fn theory_delta_f(system: &PlateSystem, mode: Mode, t_kelvin: f64) -> Result<f64> {
    let s = sigma_si_over_eps0(system);
    match mode {
        Mode::TM => delta_f_tm(s, system.separation_a, t_kelvin),
        Mode::TE => delta_f_te(s, system.separation_a, t_kelvin),
    }
}

fn check_grid(temps: &[f64]) -> Result<()> {
    if temps.is_empty() {
        return Err(domain("empty temperature grid"));
    }
    if temps.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err(domain("grid temperatures must be finite and > 0"));
    }
    if temps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("temperature grid must be strictly ascending"));
    }
    Ok(())
}

/// Records from already computed numerics: `df_num[i]` at `temps[i]`,
/// zero-temperature energy `f0`, and a theory curve.
pub fn records_from<F>(temps: &[f64], mode: Mode, df_num: &[f64], f0: f64, theory: F) -> Result<Vec<SweepRecord>>
where
    F: Fn(f64) -> Result<f64>,
{
    check_grid(temps)?;
    if df_num.len() != temps.len() {
        return Err(domain("numerics and grid lengths differ"));
    }
    temps
        .iter()
        .zip(df_num)
        .map(|(&t, &dn)| {
            let th = theory(t)?;
            let r = if th != 0.0 { Some((th - dn) / th) } else { None };
            Ok(SweepRecord { t_k: t, f_num: f0 + dn, f_asym: f0 + th, df_num: dn, df_th: th, r, pol: mode })
        })
        .collect()
}

/// R curve for each selected polarization, in grid order (TM block first).
pub fn r_curve(system: &PlateSystem, temps: &[f64], numerics: Numerics) -> Result<Vec<SweepRecord>> {
    r_curve_with(system, temps, numerics, |mode, t| theory_delta_f(system, mode, t))
}

/// As [`r_curve`] with a caller-supplied theory curve.
pub fn r_curve_with<F>(system: &PlateSystem, temps: &[f64], numerics: Numerics, theory: F) -> Result<Vec<SweepRecord>>
where
    F: Fn(Mode, f64) -> Result<f64>,
{
    check_grid(temps)?;
    let num = delta_f_sweep(system, temps, numerics)?;
    let f0 = zero_temperature_energy(&system.at_temperature(0.0), numerics)?;
    let mut out = Vec::new();
    for (k, &mode) in system.polarization.modes().iter().enumerate() {
        let df: Vec<f64> = num.iter().map(|row| row[k].value).collect();
        let f0m = match mode {
            Mode::TM => f0.tm,
            Mode::TE => f0.te,
        }
        .expect("mode evaluated");
        out.extend(records_from(temps, mode, &df, f0m, |t| theory(mode, t))?);
    }
    Ok(out)
}

/// dR/dT at the first record from the 3-point one-sided stencil
/// (exact for quadratics on an uneven grid).
pub fn r_slope_at_start(records: &[SweepRecord]) -> Result<f64> {
    if records.len() < 3 {
        return Err(domain("slope needs three records"));
    }
    let (t0, t1, t2) = (records[0].t_k, records[1].t_k, records[2].t_k);
    let r = |i: usize| records[i].r.ok_or_else(|| domain("R undefined where theory vanishes"));
    let (r0, r1, r2) = (r(0)?, r(1)?, r(2)?);
    let (h1, h2) = (t1 - t0, t2 - t0);
    Ok(-r0 * (h1 + h2) / (h1 * h2) + r1 * h2 / (h1 * (h2 - h1)) - r2 * h1 / (h2 * (h2 - h1)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    /// J/(K^2 m^2).
    #[serde(rename = "D")]
    pub d: f64,
    /// 1/K.
    #[serde(rename = "D1")]
    pub d1: f64,
    /// 1/K^2.
    #[serde(rename = "D2")]
    pub d2: f64,
    /// Covariance of (D, D1, D2).
    pub covariance: [[f64; 3]; 3],
    pub t_range: [f64; 2],
    /// Number of polynomial terms used.
    pub terms: usize,
    /// RMS of the relative residuals.
    pub rms: f64,
}

pub const FIT_MIN_TERMS: usize = 3;
pub const FIT_MAX_TERMS: usize = 8;
const FIT_MAX_CONDITION: f64 = 1e13;

struct PolyFit {
    coeffs: DVector<f64>,
    cov: DMatrix<f64>,
    rms: f64,
}

/// Weighted fit of y = sum p_k x^k with weights 1/|y|.
fn poly_fit(x: &[f64], y: &[f64], terms: usize) -> Result<PolyFit> {
    let n = x.len();
    let a = DMatrix::from_fn(n, terms, |i, k| x[i].powi(k as i32) / y[i].abs());
    let b = DVector::from_fn(n, |i, _| y[i].signum());
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let cond = sv.max() / sv.min();
    if !(cond < FIT_MAX_CONDITION) {
        return Err(Error::IllConditioned(cond));
    }
    let coeffs = svd.solve(&b, 0.0).map_err(|e| domain(format!("fit failed: {e}")))?;
    let resid = &a * &coeffs - &b;
    let dof = (n - terms).max(1) as f64;
    let s2 = resid.norm_squared() / dof;
    let ata = a.transpose() * &a;
    let inv = ata.try_inverse().ok_or(Error::IllConditioned(cond))?;
    Ok(PolyFit { coeffs, cov: inv * s2, rms: (resid.norm_squared() / n as f64).sqrt() })
}

/// Fits Delta F_num = -D T^2 (1 - D1 T + D2 T^2 + ...) by relative least
/// squares on Delta F / T^2 as a polynomial in T. The polynomial order grows
/// from three terms while each extra term cuts the RMS residual by more than
/// half.
pub fn fit_expansion(records: &[SweepRecord]) -> Result<FitResult> {
    let n = records.len();
    if n < 6 {
        return Err(domain(format!("fit needs at least 6 records, got {n}")));
    }
    let t: Vec<f64> = records.iter().map(|r| r.t_k).collect();
    let (tmin, tmax) = t.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if tmax / tmin < 10.0 * (1.0 - 1e-12) {
        return Err(domain(format!("fit needs a decade in T, got [{tmin}, {tmax}]")));
    }
    if records.iter().any(|r| r.df_num == 0.0 || !r.df_num.is_finite()) {
        return Err(domain("fit needs finite non-zero Delta F"));
    }
    let x: Vec<f64> = t.iter().map(|v| v / tmax).collect();
    let y: Vec<f64> = records.iter().map(|r| r.df_num / (r.t_k * r.t_k)).collect();

    let max_terms = FIT_MAX_TERMS.min(n - 2);
    let mut best = poly_fit(&x, &y, FIT_MIN_TERMS)?;
    let mut terms = FIT_MIN_TERMS;
    while terms < max_terms {
        let next = match poly_fit(&x, &y, terms + 1) {
            Ok(f) => f,
            Err(Error::IllConditioned(_)) => break,
            Err(e) => return Err(e),
        };
        if next.rms < 0.5 * best.rms {
            best = next;
            terms += 1;
        } else {
            break;
        }
    }

    // Back to kelvin: p_k(T) = q_k / tmax^k.
    let p0 = best.coeffs[0];
    let p1 = best.coeffs[1] / tmax;
    let p2 = best.coeffs[2] / (tmax * tmax);
    let d = -p0;
    let d1 = -p1 / p0;
    let d2 = p2 / p0;
    // Jacobian of (D, D1, D2) with respect to (q0, q1, q2).
    let j = Matrix3::new(-1.0, 0.0, 0.0, p1 / (p0 * p0), -1.0 / (p0 * tmax), 0.0, -p2 / (p0 * p0), 0.0, 1.0 / (p0 * tmax * tmax));
    let c = best.cov.fixed_view::<3, 3>(0, 0).into_owned();
    let cov = j * c * j.transpose();
    let mut covariance = [[0.0; 3]; 3];
    for (i, row) in covariance.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = cov[(i, k)];
        }
    }
    Ok(FitResult { d, d1, d2, covariance, t_range: [tmin, tmax], terms, rms: best.rms })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TeCubeRow {
    #[serde(rename = "T_K")]
    pub t_k: f64,
    /// Delta F_num - C2 T^2.
    pub residual: f64,
    /// |C3| T^3.
    pub cube: f64,
    /// residual / (-C3 T^3): 1 when the cubic term alone explains the residual.
    pub ratio: f64,
}

pub const TE_CUBE_RATIO_RANGE: (f64, f64) = (0.2, 5.0);

/// Compares the TE numerics, minus their T^2 part, with the T^3 term.
pub fn te_cube_comparison(system: &PlateSystem, temps: &[f64], numerics: Numerics) -> Result<Vec<TeCubeRow>> {
    let te = PlateSystem { polarization: Polarization::TE, ..*system };
    check_grid(temps)?;
    let num: Vec<f64> = delta_f_sweep(&te, temps, numerics)?.iter().map(|row| row[0].value).collect();
    te_cube_rows(system, temps, &num)
}

/// As [`te_cube_comparison`] on given numerics.
pub fn te_cube_rows(system: &PlateSystem, temps: &[f64], df_num: &[f64]) -> Result<Vec<TeCubeRow>> {
    let c = te_coefficients(sigma_si_over_eps0(system), system.separation_a)?;
    Ok(temps
        .iter()
        .zip(df_num)
        .map(|(&t, &dn)| {
            let residual = dn - c.c2 * t * t;
            let cube = c.c3 * t.powi(3);
            TeCubeRow { t_k: t, residual, cube, ratio: if cube > 0.0 { -residual / cube } else { f64::NAN } }
        })
        .collect())
}

/// True when every row's ratio lies in [`TE_CUBE_RATIO_RANGE`].
pub fn te_cube_same_order(rows: &[TeCubeRow]) -> bool {
    let (lo, hi) = TE_CUBE_RATIO_RANGE;
    rows.iter().all(|r| r.ratio >= lo && r.ratio <= hi)
}

/// Points `per_decade` per factor of ten from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(min > 0.0) || !(max > min) || per_decade == 0 {
        return Err(domain(format!("bad grid [{min}, {max}] with {per_decade} per decade")));
    }
    let decades = (max / min).log10();
    let steps = (decades * per_decade as f64).round().max(1.0) as usize;
    Ok((0..=steps).map(|i| min * (max / min).powf(i as f64 / steps as f64)).collect())
}

pub const DEFAULT_POINTS_PER_DECADE: usize = 25;

/// Default sweep ranges: TM 0.02-1 K, TE 0.1-2 K.
pub fn default_grid(mode: Mode) -> Vec<f64> {
    let (lo, hi) = match mode {
        Mode::TM => (0.02, 1.0),
        Mode::TE => (0.1, 2.0),
    };
    log_grid(lo, hi, DEFAULT_POINTS_PER_DECADE).expect("valid default grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::tm_coefficients;
    use proptest::prelude::*;

    fn synthetic(d: f64, d1: f64, d2: f64, temps: &[f64]) -> Vec<SweepRecord> {
        let df: Vec<f64> = temps.iter().map(|t| -d * t * t * (1.0 - d1 * t + d2 * t * t)).collect();
        records_from(temps, Mode::TM, &df, -1.0, |t| Ok(-d * t * t)).unwrap()
    }

    #[test]
    fn fit_recovers_synthetic_model() {
        let temps = log_grid(0.02, 0.3, 12).unwrap();
        let f = fit_expansion(&synthetic(2.53e-17, 0.366, -0.5, &temps)).unwrap();
        assert!(((f.d - 2.53e-17) / 2.53e-17).abs() < 1e-6);
        assert!(((f.d1 - 0.366) / 0.366).abs() < 1e-6);
        assert!(((f.d2 + 0.5) / 0.5).abs() < 1e-6);
        assert_eq!(f.t_range, [temps[0], *temps.last().unwrap()]);
        assert!(f.covariance[0][0] >= 0.0);
    }

    #[test]
    fn fit_rejects_short_or_narrow_data() {
        let few = log_grid(0.02, 0.3, 2).unwrap();
        assert!(fit_expansion(&synthetic(1.0, 0.3, 0.0, &few)).is_err());
        let narrow: Vec<f64> = (0..10).map(|i| 0.1 + 0.01 * i as f64).collect();
        assert!(fit_expansion(&synthetic(1.0, 0.3, 0.0, &narrow)).is_err());
    }

    #[test]
    fn identical_theory_gives_zero_r() {
        let temps = [0.1, 0.2, 0.4];
        let df = [-1.0, -4.0, -16.0];
        let recs = records_from(&temps, Mode::TM, &df, 0.0, |t| Ok(-100.0 * t * t)).unwrap();
        assert!(recs.iter().all(|r| r.r == Some(0.0)));
        assert_eq!(r_slope_at_start(&recs).unwrap(), 0.0);
    }

    #[test]
    fn zero_theory_leaves_r_empty() {
        let recs = records_from(&[0.1, 0.2], Mode::TE, &[1.0, 2.0], 0.0, |_| Ok(0.0)).unwrap();
        assert!(recs.iter().all(|r| r.r.is_none()));
    }

    #[test]
    fn slope_stencil_exact_on_quadratic() {
        let temps = [0.02, 0.025, 0.0331];
        let recs: Vec<SweepRecord> = temps
            .iter()
            .map(|&t| SweepRecord {
                t_k: t,
                f_num: 0.0,
                f_asym: 0.0,
                df_num: 0.0,
                df_th: 1.0,
                r: Some(0.3 + 2.0 * t - 7.0 * t * t),
                pol: Mode::TM,
            })
            .collect();
        let s = r_slope_at_start(&recs).unwrap();
        assert!((s - (2.0 - 14.0 * 0.02)).abs() < 1e-12, "{s}");
    }

    #[test]
    fn wrong_next_order_coefficient_shows_as_slope() {
        // R = (C - D)/C - (D/C)(C1 - D1) T + ...: a wrong C1 gives a slope.
        let c = tm_coefficients(1e12, 1e-6).unwrap();
        let temps = log_grid(0.02, 0.3, 12).unwrap();
        let df: Vec<f64> = temps.iter().map(|t| -c.d * t * t * (1.0 - c.d1 * t)).collect();
        let good = records_from(&temps, Mode::TM, &df, 0.0, |t| Ok(-c.d * t * t * (1.0 - c.d1 * t))).unwrap();
        assert!(r_slope_at_start(&good).unwrap().abs() < 1e-12);
        let bad = records_from(&temps, Mode::TM, &df, 0.0, |t| Ok(-c.d * t * t * (1.0 - 1.5 * c.d1 * t))).unwrap();
        assert!(r_slope_at_start(&bad).unwrap().abs() > 0.1);
    }

    #[test]
    fn te_cube_ratio_is_one_for_exact_cubic() {
        let sys = PlateSystem::silicon(1.0, Polarization::TE);
        let c = te_coefficients(1e12, 1e-6).unwrap();
        let temps = [0.5, 1.0, 2.0];
        let df: Vec<f64> = temps.iter().map(|t| c.c2 * t * t - c.c3 * t.powi(3)).collect();
        let rows = te_cube_rows(&sys, &temps, &df).unwrap();
        assert!(rows.iter().all(|r| (r.ratio - 1.0).abs() < 1e-12));
        assert!(te_cube_same_order(&rows));
        let zero = te_cube_rows(&sys, &[1e-9], &[c.c2 * 1e-18]).unwrap();
        assert!(zero[0].residual.abs() < 1e-40 && zero[0].cube < 1e-40);
    }

    #[test]
    fn grids() {
        let g = log_grid(0.02, 0.2, 25).unwrap();
        assert_eq!(g.len(), 26);
        assert!((g[25] - 0.2).abs() < 1e-15);
        assert!(default_grid(Mode::TM)[0] == 0.02 && (default_grid(Mode::TE).last().unwrap() - 2.0).abs() < 1e-12);
        assert!(log_grid(1.0, 0.5, 3).is_err());
        assert!(records_from(&[], Mode::TM, &[], 0.0, |_| Ok(1.0)).is_err());
        assert!(records_from(&[0.2, 0.1], Mode::TM, &[1.0, 1.0], 0.0, |_| Ok(1.0)).is_err());
    }

    #[test]
    fn tm_r_curve_small_at_low_temperature() {
        let sys = PlateSystem::silicon(0.0, Polarization::TM);
        let recs = r_curve(&sys, &[0.02, 0.03, 0.04], Numerics::double()).unwrap();
        let r0 = recs[0].r.unwrap();
        assert!(r0.abs() < 0.05 && r0 > 0.0, "{r0}");
        assert!(recs.iter().all(|r| r.df_num < 0.0 && r.f_num < r.df_num));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn fit_scales_with_data(k in 1e-3f64..1e3, d1 in 0.1f64..1.0, d2 in -2.0f64..2.0) {
            let temps = log_grid(0.02, 0.3, 10).unwrap();
            let base = synthetic(1e-13, d1, d2, &temps);
            let scaled: Vec<SweepRecord> = base.iter().map(|r| SweepRecord { df_num: k * r.df_num, ..r.clone() }).collect();
            let a = fit_expansion(&base).unwrap();
            let b = fit_expansion(&scaled).unwrap();
            prop_assert!(((b.d - k * a.d) / (k * a.d)).abs() < 1e-9);
            prop_assert!(((b.d1 - a.d1) / a.d1).abs() < 1e-9);
            prop_assert!((b.d2 - a.d2).abs() < 1e-9 * a.d2.abs().max(1.0));
        }

        #[test]
        fn fit_is_deterministic(d1 in 0.1f64..1.0) {
            let temps = log_grid(0.05, 1.0, 8).unwrap();
            let recs = synthetic(3.0, d1, 0.1, &temps);
            prop_assert_eq!(fit_expansion(&recs).unwrap(), fit_expansion(&recs).unwrap());
        }
    }
}
