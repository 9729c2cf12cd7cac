use crate::error::{Error, Result};
use crate::real::Real;
use crate::special::bernoulli;

/// Riemann zeta for real s != 1.
///
/// Non-positive integers come straight from the Bernoulli numbers; every
/// other argument uses Euler–Maclaurin with the remainder series carried
/// until it drops below working precision, which is the analytic
/// continuation for s < 1 as well.
pub fn riemann_zeta<R: Real>(s: R) -> Result<R> {
    if s == R::one() {
        return Err(Error::Pole("zeta has a pole at s = 1".into()));
    }
    if !s.is_finite() {
        return Err(Error::Domain(format!("zeta argument must be finite, got {s}")));
    }
    let sf = s.to_f64();
    if sf <= 0.0 && s == s.floor() {
        let m = (-sf) as usize;
        return zeta_nonpositive_integer(m);
    }

    // The remainder series bottoms out near e^{-2 pi N}; a larger N only
    // adds cancellation in the partial sum when s < 0.
    let big_n = (0.4 * R::DIGITS as f64).ceil() as usize + 5;
    let eps = R::epsilon();
    let mut sum = R::zero();
    for n in 1..big_n {
        sum += n_pow_neg(n, s);
    }
    let nr = R::from_f64(big_n as f64);
    let n_neg_s = n_pow_neg(big_n, s);
    sum += nr * n_neg_s / (s - R::one()) + n_neg_s.ldexp(-1);

    // Correction k: B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}.
    let table = bernoulli();
    let inv_n2 = (nr * nr).recip();
    let mut rising = s; // s(s+1)...(s+2k-2)
    let mut npow = n_neg_s / nr; // N^{-s-2k+1}
    let mut fact = R::from_f64(2.0); // (2k)!
    let mut prev = R::from_f64(f64::INFINITY);
    for k in 1..=table.max_index() / 2 {
        let term = table.real::<R>(2 * k) / fact * rising * npow;
        sum += term;
        if term.abs() <= eps * sum.abs() || term == R::zero() {
            return Ok(sum);
        }
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        let kk = R::from_f64(2.0 * k as f64);
        rising = rising * (s + kk - R::one()) * (s + kk);
        npow *= inv_n2;
        fact = fact * (kk + R::one()) * (kk + R::from_f64(2.0));
    }
    Err(Error::Convergence { best: sum.to_f64(), steps: table.max_index() / 2 })
}

fn n_pow_neg<R: Real>(n: usize, s: R) -> R {
    (-s * R::from_f64(n as f64).ln()).exp()
}

/// zeta(-m) = (-1)^m B_{m+1}/(m+1).
fn zeta_nonpositive_integer<R: Real>(m: usize) -> Result<R> {
    let table = bernoulli();
    if m + 1 > table.max_index() {
        return Err(Error::Domain(format!("zeta(-{m}) beyond the Bernoulli table")));
    }
    let v = table.real::<R>(m + 1) / R::from_f64((m + 1) as f64);
    Ok(if m % 2 == 1 { -v } else { v })
}

/// zeta at an integer argument, exact for n <= 0.
pub fn zeta_int<R: Real>(n: i64) -> Result<R> {
    if n <= 0 {
        zeta_nonpositive_integer((-n) as usize)
    } else {
        riemann_zeta(R::from_f64(n as f64))
    }
}
