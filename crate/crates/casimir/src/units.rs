//! SI constants and the conversions between SI and the natural units
//! (hbar = c = k_B = 1, frequencies in 1/s) used by the physics modules.

use crate::error::{domain, Error, Result};

pub const HBAR: f64 = 1.054_571_817e-34; // J s
pub const C: f64 = 299_792_458.0; // m/s
pub const K_B: f64 = 1.380_649e-23; // J/K
pub const EPSILON0: f64 = 8.854_187_812_8e-12; // F/m
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19; // C

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub k_b: f64,
    pub epsilon0: f64,
    /// hbar c in eV cm.
    pub hbar_c: f64,
}

impl PhysicalConstants {
    pub fn codata2018() -> Self {
        PhysicalConstants { hbar: HBAR, c: C, k_b: K_B, epsilon0: EPSILON0, hbar_c: HBAR * C / ELEMENTARY_CHARGE * 100.0 }
    }
}

/// 4 pi sigma in Gaussian frequency units from sigma_SI / epsilon0.
pub fn sigma_si_to_reduced(sigma_si_over_eps0: f64) -> Result<f64> {
    if !(sigma_si_over_eps0 >= 0.0) || !sigma_si_over_eps0.is_finite() {
        return Err(domain(format!("conductivity must be finite and >= 0, got {sigma_si_over_eps0}")));
    }
    Ok(sigma_si_over_eps0)
}

/// t = 2 pi k_B T / (hbar 4 pi sigma).
pub fn reduced_temperature(t_kelvin: f64, four_pi_sigma: f64) -> Result<f64> {
    if !(t_kelvin >= 0.0) {
        return Err(domain(format!("temperature must be >= 0, got {t_kelvin}")));
    }
    if four_pi_sigma == 0.0 {
        return Err(Error::Pole("zero conductivity: t undefined".into()));
    }
    if !(four_pi_sigma > 0.0) {
        return Err(domain(format!("conductivity must be > 0, got {four_pi_sigma}")));
    }
    Ok(2.0 * std::f64::consts::PI * K_B * t_kelvin / (HBAR * four_pi_sigma))
}

/// alpha = 2 a (4 pi sigma) / c.
pub fn alpha_param(a_m: f64, four_pi_sigma: f64) -> Result<f64> {
    if !(a_m > 0.0) {
        return Err(domain(format!("separation must be > 0, got {a_m}")));
    }
    sigma_si_to_reduced(four_pi_sigma)?;
    Ok(2.0 * a_m * four_pi_sigma / C)
}

/// Step in x_l = 2 a zeta_m / c between consecutive Matsubara frequencies.
pub fn matsubara_step(a_m: f64, t_kelvin: f64) -> f64 {
    4.0 * std::f64::consts::PI * a_m * K_B * t_kelvin / (HBAR * C)
}

/// x0 = 2 a omega0 / c, the oscillator frequency in the same scale.
pub fn oscillator_scale(a_m: f64, omega0: f64) -> f64 {
    2.0 * a_m * omega0 / C
}

/// Temperature as a frequency, k_B T / hbar.
pub fn temperature_to_natural(t_kelvin: f64) -> f64 {
    K_B * t_kelvin / HBAR
}

/// Length as a time, a / c.
pub fn length_to_natural(a_m: f64) -> f64 {
    a_m / C
}

/// Energy per area in 1/s^3 from J/m^2.
pub fn energy_density_to_natural(f_si: f64) -> f64 {
    f_si * (C * C / HBAR)
}

/// Energy per area in J/m^2 from 1/s^3.
pub fn energy_density_to_si(f_nat: f64) -> f64 {
    f_nat * (HBAR / (C * C))
}

/// Entropy per area in J/(K m^2) from the natural-unit value (1/s^2).
pub fn entropy_density_to_si(s_nat: f64) -> f64 {
    s_nat * K_B / (C * C)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hbar_c_matches_quoted_conversion() {
        let k = PhysicalConstants::codata2018();
        assert!((k.hbar_c - 1.97e-5).abs() < 0.005e-5);
        assert!(k.hbar > 0.0 && k.c > 0.0 && k.k_b > 0.0 && k.epsilon0 > 0.0);
    }

    #[test]
    fn sigma_conversion_is_identity() {
        assert_eq!(sigma_si_to_reduced(1e12).unwrap(), 1e12);
        assert_eq!(sigma_si_to_reduced(0.0).unwrap(), 0.0);
        assert_eq!(sigma_si_to_reduced(3.5e22).unwrap(), 3.5e22);
        assert!(matches!(sigma_si_to_reduced(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn reduced_temperature_values() {
        let t1 = reduced_temperature(1.0, 1e12).unwrap();
        assert!((t1 - 0.8227).abs() < 5e-3);
        assert!((t1 - 0.822_596_75).abs() < 1e-8);
        assert_eq!(reduced_temperature(0.0, 1e12).unwrap(), 0.0);
        let oracle = 2.0 * std::f64::consts::PI * 1.380_649e-23 * 0.1 / (1.054_571_817e-34 * 1e12);
        assert!((reduced_temperature(0.1, 1e12).unwrap() - oracle).abs() < 1e-15);
        assert!((oracle - 0.08227).abs() < 1e-4);
        let e = reduced_temperature(1.0, 0.0).unwrap_err();
        assert_eq!(e.to_string(), "pole: zero conductivity: t undefined");
    }

    #[test]
    fn alpha_values() {
        assert!((alpha_param(1e-6, 1e12).unwrap() - 6.7e-3).abs() < 0.05e-3);
        assert_eq!(alpha_param(3e-6, 0.0).unwrap(), 0.0);
        assert!((alpha_param(2e-6, 1e12).unwrap() - 1.334e-2).abs() < 1e-5);
        assert!(alpha_param(0.0, 1e12).is_err());
    }

    proptest! {
        #[test]
        fn energy_round_trip(f in -1e3f64..1e3) {
            let back = energy_density_to_si(energy_density_to_natural(f));
            prop_assert!((back - f).abs() <= 1e-14 * f.abs());
        }

        #[test]
        fn reduced_temperature_linear(t in 0.0f64..100.0, k in 0.0f64..10.0) {
            let a = reduced_temperature(k * t, 1e12).unwrap();
            let b = k * reduced_temperature(t, 1e12).unwrap();
            prop_assert!((a - b).abs() <= 1e-13 * b.abs().max(1e-300));
        }

        #[test]
        fn alpha_linear(a in 1e-8f64..1e-4, s in 0.0f64..1e14, k in 0.1f64..10.0) {
            let base = alpha_param(a, s).unwrap();
            prop_assert!((alpha_param(k * a, s).unwrap() - k * base).abs() <= 1e-13 * k * base.max(1e-300));
            prop_assert!((alpha_param(a, k * s).unwrap() - k * base).abs() <= 1e-13 * k * base.max(1e-300));
        }
    }
}
