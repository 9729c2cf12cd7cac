//! Closed-form low-temperature corrections.
//!
//! The Euler-Maclaurin difference sum'_m g(m) - int g dm is governed by the
//! small-m behaviour of g. Writing
//!
//!   g(m) ~ c0 + c1 m + c_{3/2} m^{3/2} + c_{2l} m^2 ln m + c2 m^2,
//!
//! the difference is -c1/12 + Psi c_{2l} + Phi c_{3/2} + ..., with c0 and c2
//! dropping out. In reduced variables t = zeta_1 / (4 pi sigma) and
//! mu = m t, so x_l = alpha mu. SI values follow from
//! Delta F = k_B T / (8 pi a^2) * Gamma.
//!
//! TM expansions use the same g as [`crate::lifshitz`]. TE expansions are
//! quoted for g / alpha^2, the natural size of the TE kernel.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::special::{phi_constant, polylog, psi_constant, zeta_int};
use crate::units::{alpha_param, reduced_temperature, sigma_si_to_reduced, C, HBAR, K_B};

use std::f64::consts::{LN_2, PI};

/// Threshold on t and alpha above which the expansions are flagged.
pub const SMALL_PARAMETER_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SmallMExpansion {
    pub c0: f64,
    pub c1: f64,
    pub c_3_2: f64,
    pub c_2l: f64,
    pub c2: f64,
}

impl SmallMExpansion {
    /// g(m) from the truncated expansion.
    pub fn evaluate(&self, m: f64) -> f64 {
        let ln = if m > 0.0 { m.ln() } else { 0.0 };
        self.c0 + self.c1 * m + self.c_3_2 * m.powf(1.5) + (self.c_2l * ln + self.c2) * m * m
    }

    pub fn scaled(&self, k: f64) -> SmallMExpansion {
        SmallMExpansion { c0: k * self.c0, c1: k * self.c1, c_3_2: k * self.c_3_2, c_2l: k * self.c_2l, c2: k * self.c2 }
    }
}

/// The three contributions -c1/12, Psi c_{2l}, Phi c_{3/2}.
pub fn em_gamma_parts(exp: &SmallMExpansion) -> [f64; 3] {
    [-exp.c1 / 12.0, psi_constant::<f64>() * exp.c_2l, phi_constant::<f64>() * exp.c_3_2]
}

/// sum'_m g(m) - int_0^inf g dm to the orders the expansion carries.
pub fn em_gamma(exp: &SmallMExpansion) -> f64 {
    em_gamma_parts(exp).iter().sum()
}

fn zeta3() -> f64 {
    zeta_int::<f64>(3).expect("zeta(3)")
}

/// TM: g(m) with g'(m) = 2 pi^2 t/3 - 4 m t^2 (eps_bar pi^2/3 + 4) + 16 m t^2 ln(4 mu).
pub fn tm_small_m_expansion(eps_bar: f64, t: f64) -> Result<SmallMExpansion> {
    if !(t > 0.0) || !(eps_bar >= 1.0) {
        return Err(domain(format!("need t > 0 and eps_bar >= 1, got t = {t}, eps_bar = {eps_bar}")));
    }
    let t2 = t * t;
    Ok(SmallMExpansion {
        c0: -zeta3(),
        c1: 2.0 * PI * PI * t / 3.0,
        c_3_2: 0.0,
        c_2l: 8.0 * t2,
        c2: -2.0 * t2 * (eps_bar * PI * PI / 3.0 + 4.0) + 8.0 * t2 * (4.0 * t).ln() - 4.0 * t2,
    })
}

/// TE, first part (per alpha^2):
/// g_I = -(mu/4)(2 ln 2 - 1) - (mu^2/4)[ln 4 mu + eps_bar (2 ln 2 - 1)] + O(mu^{5/2}).
pub fn te_g1_expansion(eps_bar: f64, t: f64) -> Result<SmallMExpansion> {
    if !(t > 0.0) || !(eps_bar >= 1.0) {
        return Err(domain(format!("need t > 0 and eps_bar >= 1, got t = {t}, eps_bar = {eps_bar}")));
    }
    let k = 2.0 * LN_2 - 1.0;
    let t2 = t * t;
    Ok(SmallMExpansion { c0: 0.0, c1: -t * k / 4.0, c_3_2: 0.0, c_2l: -t2 / 4.0, c2: -(t2 / 4.0) * ((4.0 * t).ln() + eps_bar * k) })
}

/// TE, second part (per alpha^2): g_II = (alpha/8)(2/3 mu^{3/2} - (2 - eps_bar) mu^{5/2} + ...).
/// Only the mu^{3/2} term reaches the correction at this order.
pub fn te_g2_expansion(eps_bar: f64, t: f64, alpha: f64) -> Result<SmallMExpansion> {
    if !(t > 0.0) || !(alpha >= 0.0) || !(eps_bar >= 1.0) {
        return Err(domain(format!("need t > 0, alpha >= 0, eps_bar >= 1, got t = {t}, alpha = {alpha}")));
    }
    Ok(SmallMExpansion { c_3_2: alpha * t.powf(1.5) / 12.0, ..SmallMExpansion::default() })
}

/// Closed form of g_I(m) / alpha^2 with chi = sqrt(mu + (eps_bar - 1) mu^2),
/// u0 = arsinh(mu/chi), y0 = e^{-2 u0}:
/// -(chi^2/8)[(1/y0 + y0) ln(1 - y0^2) - 2 y0 + 2 ln((1 + y0)/(1 - y0))].
pub fn te_closed_form_g1(mu: f64, eps_bar: f64) -> Result<f64> {
    if !(mu >= 0.0) || !(eps_bar >= 1.0) {
        return Err(domain(format!("need mu >= 0 and eps_bar >= 1, got mu = {mu}, eps_bar = {eps_bar}")));
    }
    if mu == 0.0 {
        return Ok(0.0);
    }
    let chi2 = mu + (eps_bar - 1.0) * mu * mu;
    let u0 = (mu / chi2.sqrt()).asinh();
    let y0 = (-2.0 * u0).exp();
    let one_minus_y2 = -(-4.0 * u0).exp_m1();
    let one_minus_y = -(-2.0 * u0).exp_m1();
    let bracket = (1.0 / y0 + y0) * one_minus_y2.ln() - 2.0 * y0 + 2.0 * (y0.ln_1p() - one_minus_y.ln());
    Ok(-chi2 / 8.0 * bracket)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TermSource {
    #[serde(rename = "TM_I")]
    TmI,
    #[serde(rename = "TM_delta")]
    TmDelta,
    #[serde(rename = "TE_I")]
    TeI,
    #[serde(rename = "TE_II")]
    TeII,
    LinearAnomaly,
}

/// Rational exponent of T.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Power {
    pub num: i32,
    pub den: i32,
}

impl Power {
    pub const fn new(num: i32, den: i32) -> Self {
        Power { num, den }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for Power {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticTerm {
    pub power_of_t: Power,
    /// J / (m^2 K^power).
    pub coefficient: f64,
    pub source: TermSource,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticResult {
    pub terms: Vec<AsymptoticTerm>,
    /// t at 1 K and alpha, for the validity check.
    pub t_per_kelvin: f64,
    pub alpha: f64,
}

impl AsymptoticResult {
    /// J/m^2.
    pub fn evaluate(&self, t_kelvin: f64) -> f64 {
        self.terms.iter().map(|term| term.coefficient * t_kelvin.powf(term.power_of_t.as_f64())).sum()
    }

    pub fn evaluate_source(&self, t_kelvin: f64, source: TermSource) -> f64 {
        self.terms.iter().filter(|term| term.source == source).map(|term| term.coefficient * t_kelvin.powf(term.power_of_t.as_f64())).sum()
    }

    pub fn coefficient(&self, source: TermSource, power: Power) -> Option<f64> {
        self.terms.iter().find(|x| x.source == source && x.power_of_t == power).map(|x| x.coefficient)
    }

    /// Warnings when the expansion parameters are not small at this T.
    pub fn warnings(&self, t_kelvin: f64) -> Vec<String> {
        let mut w = Vec::new();
        let t = self.t_per_kelvin * t_kelvin;
        if t > SMALL_PARAMETER_LIMIT {
            w.push(format!("t = {t:.3e} > {SMALL_PARAMETER_LIMIT}: low-temperature expansion not reliable"));
        }
        if self.alpha > SMALL_PARAMETER_LIMIT {
            w.push(format!("alpha = {:.3e} > {SMALL_PARAMETER_LIMIT}: weak-conductivity expansion not reliable", self.alpha));
        }
        w
    }
}

/// Converts Gamma contributions, each proportional to t^p, into SI T^{p+1} terms.
struct Converter {
    pref: f64,
    t1: f64,
    alpha: f64,
}

impl Converter {
    fn new(sigma_si_over_eps0: f64, a_m: f64) -> Result<Self> {
        if !(a_m > 0.0) {
            return Err(domain(format!("separation must be > 0, got {a_m}")));
        }
        let four_pi_sigma = sigma_si_to_reduced(sigma_si_over_eps0)?;
        Ok(Converter {
            pref: K_B / (8.0 * PI * a_m * a_m),
            t1: reduced_temperature(1.0, four_pi_sigma)?,
            alpha: alpha_param(a_m, four_pi_sigma)?,
        })
    }

    fn term(&self, gamma_at_t1: f64, power: Power, source: TermSource) -> AsymptoticTerm {
        AsymptoticTerm { power_of_t: power, coefficient: self.pref * gamma_at_t1, source }
    }
}

fn tm_pole_error() -> Error {
    Error::Pole("TM asymptotics require sigma>0 (expression diverges)".into())
}

/// TM correction: the two leading terms and the alpha^2 correction.
/// The TM coefficients do not depend on eps_bar at this order.
pub fn tm_asymptotics(sigma_si_over_eps0: f64, a_m: f64) -> Result<AsymptoticResult> {
    if sigma_si_over_eps0 == 0.0 {
        return Err(tm_pole_error());
    }
    let cv = Converter::new(sigma_si_over_eps0, a_m)?;
    let exp = tm_small_m_expansion(1.0, cv.t1)?;
    let [p1, p2l, _] = em_gamma_parts(&exp);
    let delta = psi_constant::<f64>() * cv.alpha * cv.alpha * cv.t1 * cv.t1 / 2.0;
    Ok(AsymptoticResult {
        terms: vec![
            cv.term(p1, Power::new(2, 1), TermSource::TmI),
            cv.term(p2l, Power::new(3, 1), TermSource::TmI),
            cv.term(delta, Power::new(3, 1), TermSource::TmDelta),
        ],
        t_per_kelvin: cv.t1,
        alpha: cv.alpha,
    })
}

/// -pi^2 (k_B T)^2 / (72 hbar (sigma/eps0) a^2) (1 - 72 zeta(3) k_B T / (pi^3 hbar sigma/eps0)).
pub fn delta_f_tm(sigma_si_over_eps0: f64, a_m: f64, t_kelvin: f64) -> Result<f64> {
    if !(t_kelvin >= 0.0) {
        return Err(domain(format!("temperature must be >= 0, got {t_kelvin}")));
    }
    Ok(tm_asymptotics(sigma_si_over_eps0, a_m)?.evaluate_source(t_kelvin, TermSource::TmI))
}

/// D and D1 in Delta F^TM = -D T^2 (1 - D1 T).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TmCoefficients {
    pub d: f64,
    pub d1: f64,
}

pub fn tm_coefficients(sigma_si_over_eps0: f64, a_m: f64) -> Result<TmCoefficients> {
    let r = tm_asymptotics(sigma_si_over_eps0, a_m)?;
    let c2 = r.coefficient(TermSource::TmI, Power::new(2, 1)).expect("T^2 term");
    let c3 = r.coefficient(TermSource::TmI, Power::new(3, 1)).expect("T^3 term");
    Ok(TmCoefficients { d: -c2, d1: c3 / -c2 })
}

/// The alpha-independent correction zeta(3)(k_B T)^3/(4 pi hbar^2 c^2).
pub fn delta_f_tm_correction(t_kelvin: f64) -> f64 {
    let kt = K_B * t_kelvin;
    zeta3() * kt * kt * kt / (4.0 * PI * HBAR * HBAR * C * C)
}

/// Size of the correction relative to the T^3 TM term, (sigma/eps0)^2 a^2 / (4 c^2).
pub fn tm_correction_ratio(sigma_si_over_eps0: f64, a_m: f64) -> f64 {
    (sigma_si_over_eps0 * a_m / C).powi(2) / 4.0
}

/// TE correction C2 T^2 - C_{5/2} T^{5/2} - C3 T^3. With sigma = 0 only the
/// T^3 term remains.
pub fn te_asymptotics(sigma_si_over_eps0: f64, a_m: f64) -> Result<AsymptoticResult> {
    if sigma_si_over_eps0 == 0.0 {
        if !(a_m > 0.0) {
            return Err(domain(format!("separation must be > 0, got {a_m}")));
        }
        // alpha^2 t^2 is finite as sigma -> 0; take the limit explicitly.
        let a2t2 = (4.0 * PI * a_m * K_B / (HBAR * C)).powi(2);
        let pref = K_B / (8.0 * PI * a_m * a_m);
        return Ok(AsymptoticResult {
            terms: vec![AsymptoticTerm {
                power_of_t: Power::new(3, 1),
                coefficient: pref * a2t2 * -psi_constant::<f64>() / 4.0,
                source: TermSource::TeI,
            }],
            t_per_kelvin: f64::INFINITY,
            alpha: 0.0,
        });
    }
    let cv = Converter::new(sigma_si_over_eps0, a_m)?;
    let a2 = cv.alpha * cv.alpha;
    let g1 = te_g1_expansion(1.0, cv.t1)?.scaled(a2);
    let g2 = te_g2_expansion(1.0, cv.t1, cv.alpha)?.scaled(a2);
    let [p1, p2l, _] = em_gamma_parts(&g1);
    let [_, _, p32] = em_gamma_parts(&g2);
    Ok(AsymptoticResult {
        terms: vec![
            cv.term(p1, Power::new(2, 1), TermSource::TeI),
            cv.term(p2l, Power::new(3, 1), TermSource::TeI),
            cv.term(p32, Power::new(5, 2), TermSource::TeII),
        ],
        t_per_kelvin: cv.t1,
        alpha: cv.alpha,
    })
}

pub fn delta_f_te(sigma_si_over_eps0: f64, a_m: f64, t_kelvin: f64) -> Result<f64> {
    if !(t_kelvin >= 0.0) {
        return Err(domain(format!("temperature must be >= 0, got {t_kelvin}")));
    }
    Ok(te_asymptotics(sigma_si_over_eps0, a_m)?.evaluate(t_kelvin))
}

/// Magnitudes in Delta F^TE = C2 T^2 - C_{5/2} T^{5/2} - C3 T^3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TeCoefficients {
    pub c2: f64,
    pub c5_2: f64,
    pub c3: f64,
}

pub fn te_coefficients(sigma_si_over_eps0: f64, a_m: f64) -> Result<TeCoefficients> {
    let r = te_asymptotics(sigma_si_over_eps0, a_m)?;
    let get = |s, p| r.coefficient(s, p).unwrap_or(0.0);
    Ok(TeCoefficients {
        c2: get(TermSource::TeI, Power::new(2, 1)),
        c5_2: -get(TermSource::TeII, Power::new(5, 2)),
        c3: -get(TermSource::TeI, Power::new(3, 1)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnomalyResult {
    /// J/m^2.
    pub free_energy: f64,
    /// J/(K m^2).
    pub entropy: f64,
}

/// The term linear in T that appears when sigma = 0:
/// F = k_B T/(16 pi a^2)[Li_3(A0) - zeta(3)], A0 = ((eps_bar-1)/(eps_bar+1))^2,
/// and S = -dF/dT. eps_bar = inf gives A0 = 1 and no anomaly.
pub fn linear_anomaly(eps_bar: f64, a_m: f64, t_kelvin: f64) -> Result<AnomalyResult> {
    if !(eps_bar >= 1.0) || !(a_m > 0.0) || !(t_kelvin >= 0.0) {
        return Err(domain(format!("need eps_bar >= 1, a > 0, T >= 0; got {eps_bar}, {a_m}, {t_kelvin}")));
    }
    let a0 = if eps_bar.is_infinite() { 1.0 } else { ((eps_bar - 1.0) / (eps_bar + 1.0)).powi(2) };
    let bracket = polylog(3, a0)? - zeta3();
    let k = K_B / (16.0 * PI * a_m * a_m);
    Ok(AnomalyResult { free_energy: k * t_kelvin * bracket, entropy: -k * bracket })
}
