//! Permittivity on the imaginary frequency axis and Fresnel reflection
//! coefficients for the two polarizations.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::real::Real;
use crate::units::C;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PermittivityModel {
    /// 1 + (eps_bar - 1)/(1 + zeta^2/omega0^2) + 4 pi sigma/zeta.
    FullOscillator,
    /// eps_bar + 4 pi sigma/zeta, the zeta << omega0 form.
    LowFreqApprox,
    /// Perfect reflector, r^2 = 1 in both polarizations.
    IdealConductor,
}

impl std::str::FromStr for PermittivityModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" | "full-oscillator" | "oscillator" => Ok(PermittivityModel::FullOscillator),
            "low-freq" | "low-freq-approx" | "drude" => Ok(PermittivityModel::LowFreqApprox),
            "ideal" | "ideal-conductor" => Ok(PermittivityModel::IdealConductor),
            other => Err(domain(format!("unknown permittivity model '{other}'"))),
        }
    }
}

impl std::fmt::Display for PermittivityModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PermittivityModel::FullOscillator => "full-oscillator",
            PermittivityModel::LowFreqApprox => "low-freq-approx",
            PermittivityModel::IdealConductor => "ideal-conductor",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DielectricModel {
    pub eps_bar: f64,
    /// Oscillator frequency, 1/s.
    pub omega0: f64,
    /// 4 pi sigma = sigma_SI / epsilon0, 1/s.
    pub four_pi_sigma: f64,
    pub model: PermittivityModel,
}

impl DielectricModel {
    pub fn new(eps_bar: f64, omega0: f64, four_pi_sigma: f64, model: PermittivityModel) -> Result<Self> {
        let m = DielectricModel { eps_bar, omega0, four_pi_sigma, model };
        m.validate()?;
        Ok(m)
    }

    /// Intrinsic silicon: eps_bar = 11.67, omega0 = 8e15/s, 4 pi sigma = 1e12/s.
    pub fn silicon() -> Self {
        DielectricModel { eps_bar: 11.67, omega0: 8e15, four_pi_sigma: 1e12, model: PermittivityModel::FullOscillator }
    }

    pub fn ideal_conductor() -> Self {
        DielectricModel {
            eps_bar: f64::INFINITY,
            omega0: f64::INFINITY,
            four_pi_sigma: f64::INFINITY,
            model: PermittivityModel::IdealConductor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.model == PermittivityModel::IdealConductor {
            return Ok(());
        }
        if !(self.eps_bar >= 1.0) || !self.eps_bar.is_finite() {
            return Err(domain(format!("eps_bar must be finite and >= 1, got {}", self.eps_bar)));
        }
        if !(self.omega0 > 0.0) {
            return Err(domain(format!("omega0 must be > 0, got {}", self.omega0)));
        }
        if !(self.four_pi_sigma >= 0.0) || !self.four_pi_sigma.is_finite() {
            return Err(domain(format!("4 pi sigma must be finite and >= 0, got {}", self.four_pi_sigma)));
        }
        Ok(())
    }

    pub fn is_conducting(&self) -> bool {
        self.four_pi_sigma > 0.0
    }

    /// eps(i zeta) for zeta in 1/s.
    pub fn permittivity(&self, zeta: f64) -> Result<f64> {
        if !(zeta >= 0.0) {
            return Err(domain(format!("frequency must be >= 0, got {zeta}")));
        }
        if self.model == PermittivityModel::IdealConductor {
            return Ok(f64::INFINITY);
        }
        if zeta == 0.0 {
            if self.is_conducting() {
                return Err(Error::Pole("eps diverges at zero frequency".into()));
            }
            return Ok(self.eps_bar);
        }
        Ok(match self.model {
            PermittivityModel::FullOscillator => {
                let r = zeta / self.omega0;
                1.0 + (self.eps_bar - 1.0) / (1.0 + r * r) + self.four_pi_sigma / zeta
            }
            _ => self.eps_bar + self.four_pi_sigma / zeta,
        })
    }

    /// The same permittivity in the dimensionless frequency x_l = 2 a zeta / c
    /// of plates a metres apart.
    pub fn reduced<R: Real>(&self, a_m: f64) -> ReducedDielectric<R> {
        ReducedDielectric {
            eps_bar: R::from_f64(self.eps_bar),
            x0: R::from_f64(2.0 * a_m * self.omega0 / C),
            alpha: R::from_f64(2.0 * a_m * self.four_pi_sigma / C),
            model: self.model,
        }
    }
}

/// Permittivity as a function of x_l = 2 a zeta / c:
/// eps = 1 + (eps_bar - 1)/(1 + (x_l/x0)^2) + alpha/x_l.
#[derive(Debug, Clone, Copy)]
pub struct ReducedDielectric<R> {
    pub eps_bar: R,
    pub x0: R,
    pub alpha: R,
    pub model: PermittivityModel,
}

impl<R: Real> ReducedDielectric<R> {
    /// Valid for x_l > 0; `None` means a perfect reflector.
    pub fn eps(&self, xl: R) -> Option<R> {
        match self.model {
            PermittivityModel::IdealConductor => None,
            PermittivityModel::FullOscillator => {
                let r = xl / self.x0;
                Some(R::one() + (self.eps_bar - R::one()) / (R::one() + r * r) + self.alpha / xl)
            }
            PermittivityModel::LowFreqApprox => Some(self.eps_bar + self.alpha / xl),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReflectionPair {
    pub r_te: f64,
    pub r_tm: f64,
}

/// Fresnel coefficients on the imaginary axis,
/// r_TE = (kappa - s)/(kappa + s), r_TM = (eps kappa - s)/(eps kappa + s),
/// s = sqrt(kappa^2 + zeta^2 (eps - 1)), evaluated as kappa sqrt(1 + q (eps-1)).
pub fn reflection_coeffs(eps: f64, kappa: f64, zeta: f64) -> Result<ReflectionPair> {
    if !(zeta >= 0.0) || !(kappa >= zeta) {
        return Err(domain(format!("need kappa >= zeta >= 0, got kappa = {kappa}, zeta = {zeta}")));
    }
    if !(eps >= 1.0) {
        return Err(domain(format!("need eps >= 1, got {eps}")));
    }
    if eps.is_infinite() {
        return Ok(ReflectionPair { r_te: -1.0, r_tm: 1.0 });
    }
    if kappa == 0.0 {
        return Ok(ReflectionPair { r_te: 0.0, r_tm: (eps - 1.0) / (eps + 1.0) });
    }
    let q = (zeta / kappa) * (zeta / kappa);
    let s = (1.0 + q * (eps - 1.0)).sqrt();
    Ok(ReflectionPair { r_te: (1.0 - s) / (1.0 + s), r_tm: (eps - s) / (eps + s) })
}

/// 1 - r_TM without cancellation: 2 s / (eps + s).
pub fn one_minus_r_tm(eps: f64, kappa: f64, zeta: f64) -> f64 {
    if eps.is_infinite() {
        return 0.0;
    }
    let q = if kappa == 0.0 { 0.0 } else { (zeta / kappa) * (zeta / kappa) };
    let s = (1.0 + q * (eps - 1.0)).sqrt();
    2.0 * s / (eps + s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    TM,
    TE,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::TM => "TM",
            Mode::TE => "TE",
        }
    }
}

/// (r^2, 1 - r^2) for q = (zeta/kappa)^2 in [0, 1]; `eps = None` is a
/// perfect reflector. Both parts are formed without cancellation:
/// 1 - r_TM^2 = 4 eps s/(eps + s)^2, 1 - r_TE^2 = 4 s/(1 + s)^2.
pub fn reflection_squared<R: Real>(mode: Mode, eps: Option<R>, q: R) -> (R, R) {
    let Some(eps) = eps else {
        return (R::one(), R::zero());
    };
    let s = (R::one() + q * (eps - R::one())).sqrt();
    let four = R::from_f64(4.0);
    match mode {
        Mode::TM => {
            let d = eps + s;
            let r = (eps - s) / d;
            (r * r, four * eps * s / (d * d))
        }
        Mode::TE => {
            let d = R::one() + s;
            let r = (R::one() - s) / d;
            (r * r, four * s / (d * d))
        }
    }
}

/// A_mu = [(1 + (eps_bar - 1) mu)/(1 + (eps_bar + 1) mu)]^2.
pub fn a_mu(eps_bar: f64, mu: f64) -> Result<f64> {
    if !(mu >= 0.0) || !(eps_bar >= 1.0) {
        return Err(domain(format!("need mu >= 0 and eps_bar >= 1, got mu = {mu}, eps_bar = {eps_bar}")));
    }
    if mu.is_infinite() {
        let r = (eps_bar - 1.0) / (eps_bar + 1.0);
        return Ok(r * r);
    }
    let r = (1.0 + (eps_bar - 1.0) * mu) / (1.0 + (eps_bar + 1.0) * mu);
    Ok(r * r)
}

/// B = (x - sqrt(x^2 + 1))^4, computed as (x + sqrt(x^2 + 1))^-4.
pub fn b_coefficient(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain(format!("need x >= 0, got {x}")));
    }
    let d = x + x.hypot(1.0);
    Ok(d.powi(-4))
}
