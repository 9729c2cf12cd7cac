use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevinSum<R> {
    pub value: R,
    /// Difference between the last two transform orders.
    pub error: R,
    pub order: usize,
    pub converged: bool,
}

pub const LEVIN_TOL: f64 = 1e-11;
pub const LEVIN_MAX_ORDER: usize = 30;

/// Levin u-transform (beta = 1) of the series with the given terms.
///
/// Orders k = 1, 2, ... are tried until two successive estimates agree to
/// `tol` or the order limit is hit; a non-converged result still carries the
/// best estimate.
pub fn levin_u_sum<R: Real>(terms: &[R], tol: R) -> Result<LevinSum<R>> {
    if terms.len() < 5 {
        return Err(Error::Domain(format!("Levin transform needs at least 5 terms, got {}", terms.len())));
    }
    if let Some(i) = terms.iter().position(|t| !t.is_finite()) {
        return Err(Error::Domain(format!("non-finite series term at index {i}")));
    }
    let beta = R::one();
    let mut partial = Vec::with_capacity(terms.len());
    let mut s = R::zero();
    for t in terms {
        s += *t;
        partial.push(s);
    }
    let max_order = (terms.len() - 1).min(LEVIN_MAX_ORDER);
    let mut prev: Option<R> = None;
    let mut best = partial[partial.len() - 1];
    let mut last_err = R::from_f64(f64::INFINITY);
    for k in 1..=max_order {
        let kf = R::from_f64(k as f64);
        let mut num = R::zero();
        let mut den = R::zero();
        let mut binom = R::one();
        for j in 0..=k {
            let jf = R::from_f64(j as f64);
            if terms[j] == R::zero() {
                return Err(Error::Domain(format!("zero series term at index {j}")));
            }
            let omega = (jf + beta) * terms[j];
            let ratio = ((jf + beta) / (kf + beta)).powi(k as i32 - 1);
            let mut c = binom * ratio / omega;
            if j % 2 == 1 {
                c = -c;
            }
            num += c * partial[j];
            den += c;
            binom = binom * (kf - jf) / (jf + R::one());
        }
        let est = num / den;
        if let Some(p) = prev {
            let err = (est - p).abs();
            best = est;
            last_err = err;
            if err <= tol {
                return Ok(LevinSum { value: est, error: err, order: k, converged: true });
            }
        }
        prev = Some(est);
    }
    Ok(LevinSum { value: best, error: last_err, order: max_order, converged: false })
}
