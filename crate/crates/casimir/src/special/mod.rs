//! Bernoulli numbers, zeta, polylogarithms and the divergent Bernoulli
//! series behind the constants Psi and Phi.

pub mod bernoulli;
pub mod borel;
pub mod levin;
pub mod polylog;
pub mod zeta;

pub use bernoulli::{bernoulli, BernoulliTable};
pub use borel::borel_sum_psi_tilde;
pub use levin::{levin_u_sum, LevinSum, LEVIN_MAX_ORDER, LEVIN_TOL};
pub use polylog::polylog;
pub use zeta::{riemann_zeta, zeta_int};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::Result;
use crate::real::Real;

/// Number of nonzero terms handed to the Levin transform.
pub const SERIES_TERMS: usize = 15;

/// Which derivative weights the Bernoulli series carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergentSeriesKind {
    /// phi_{2n}: odd derivatives of m^{3/2} at m = 1.
    HalfPower,
    /// psi_{2n}: odd derivatives of m^2 ln m at m = 1.
    LogPower,
}

/// psi_{2n} = 2 (2n-4)!, n >= 2.
pub fn psi_weight(n: usize) -> BigRational {
    assert!(n >= 2);
    BigRational::from_integer(BigInt::from(2) * factorial(2 * n - 4))
}

/// phi_{2n} = -3 (4n-7)! / (2^{4n-5} (2n-4)!), n >= 2.
pub fn phi_weight(n: usize) -> BigRational {
    assert!(n >= 2);
    let num = BigInt::from(-3) * factorial(4 * n - 7);
    let den = (BigInt::from(1) << (4 * n - 5)) * factorial(2 * n - 4);
    BigRational::new(num, den)
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, k| acc * BigInt::from(k))
}

/// Leading constant and the first `count - 1` Bernoulli-weighted terms:
/// Psi = 1/9 - B_2/2 - sum B_{2n} psi_{2n}/(2n)!,
/// Phi = 1/2 - 2/5 - 3B_2/4 - sum B_{2n} phi_{2n}/(2n)!.
pub fn divergent_series_terms<R: Real>(kind: DivergentSeriesKind, table: &BernoulliTable, count: usize) -> Vec<R> {
    let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let b2 = table.b2n(1).cloned().unwrap_or_else(|| r(1, 6));
    let head = match kind {
        DivergentSeriesKind::LogPower => r(1, 9) - b2 / r(2, 1),
        DivergentSeriesKind::HalfPower => r(1, 2) - r(2, 5) - b2 * r(3, 4),
    };
    let mut out = vec![head];
    let mut n = 2;
    while out.len() < count {
        let weight = match kind {
            DivergentSeriesKind::LogPower => psi_weight(n),
            DivergentSeriesKind::HalfPower => phi_weight(n),
        };
        let b = table.b2n(n).expect("Bernoulli table too short").clone();
        out.push(-(b * weight) / BigRational::from_integer(factorial(2 * n)));
        n += 1;
    }
    out.iter().map(|q| R::from_ratio(q.numer(), q.denom())).collect()
}

/// Psi = zeta(3) / (4 pi^2).
pub fn psi_constant<R: Real>() -> R {
    let pi = R::pi();
    zeta_int::<R>(3).expect("zeta(3)") / (R::from_f64(4.0) * pi * pi)
}

/// Phi = zeta(-3/2).
pub fn phi_constant<R: Real>() -> R {
    riemann_zeta(R::from_f64(-1.5)).expect("zeta(-3/2)")
}

/// Psi from its Borel sum: Psi = 1/36 - 2 Psi~.
pub fn psi_from_borel<R: Real>() -> Result<R> {
    Ok(R::one() / R::from_f64(36.0) - borel_sum_psi_tilde::<R>()?.ldexp(1))
}

/// Psi via zeta regularisation: -zeta'(-2), by a central difference.
pub fn psi_from_zeta_derivative<R: Real>() -> Result<R> {
    let h = R::from_f64(if R::DIGITS > 20 { 1e-12 } else { 1e-5 });
    let two = R::from_f64(2.0);
    let up = riemann_zeta(-two + h)?;
    let down = riemann_zeta(-two - h)?;
    Ok(-(up - down) / (h + h))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantRow {
    pub constant: &'static str,
    pub method: &'static str,
    pub value: f64,
    /// Full-precision decimal rendering.
    pub digits: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsReport {
    pub rows: Vec<ConstantRow>,
    /// Largest pairwise difference per constant.
    pub psi_spread: f64,
    pub phi_spread: f64,
    pub tolerance: f64,
}

impl ConstantsReport {
    pub fn passed(&self) -> bool {
        self.psi_spread < self.tolerance && self.phi_spread < self.tolerance
    }
}

/// Psi and Phi by closed form, Levin and (Psi only) Borel, in quad-double.
pub fn verify_constants(table: &BernoulliTable) -> Result<ConstantsReport> {
    use crate::qd::Qd;
    let tol = Qd::from_f64(LEVIN_TOL);
    let psi_terms = divergent_series_terms::<Qd>(DivergentSeriesKind::LogPower, table, SERIES_TERMS);
    let phi_terms = divergent_series_terms::<Qd>(DivergentSeriesKind::HalfPower, table, SERIES_TERMS);
    let psi_levin = levin_u_sum(&psi_terms, tol)?.value;
    let phi_levin = levin_u_sum(&phi_terms, tol)?.value;
    let psi_closed = psi_constant::<Qd>();
    let phi_closed = phi_constant::<Qd>();
    let psi_borel = psi_from_borel::<Qd>()?;

    let row = |constant, method, v: Qd| ConstantRow { constant, method, value: v.to_f64(), digits: v.to_decimal(32) };
    let rows = vec![
        row("Psi", "closed form zeta(3)/(4 pi^2)", psi_closed),
        row("Psi", "Levin u-transform", psi_levin),
        row("Psi", "Borel integral", psi_borel),
        row("Phi", "closed form zeta(-3/2)", phi_closed),
        row("Phi", "Levin u-transform", phi_levin),
    ];
    let spread = |vals: &[Qd]| {
        let mut m = 0.0f64;
        for a in vals {
            for b in vals {
                m = m.max((*a - *b).abs().to_f64());
            }
        }
        m
    };
    Ok(ConstantsReport {
        psi_spread: spread(&[psi_closed, psi_levin, psi_borel]),
        phi_spread: spread(&[phi_closed, phi_levin]),
        rows,
        tolerance: 1e-9,
    })
}
