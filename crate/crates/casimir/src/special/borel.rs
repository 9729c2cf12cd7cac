use crate::error::Result;
use crate::quad::GaussLegendre;
use crate::real::Real;
use crate::special::bernoulli;

/// Below this the bracket cancels catastrophically; use its Taylor series.
pub const SMALL_T: f64 = 0.1;

/// e^{-t} t^{-4} [t/(e^t - 1) - 1 + t/2 - t^2/12].
pub fn borel_integrand<R: Real>(t: R) -> R {
    if t < R::from_f64(SMALL_T) {
        return (-t).exp() * bracket_series(t);
    }
    let t2 = t * t;
    let bracket = t / t.exp_m1() - R::one() + t.ldexp(-1) - t2 / R::from_f64(12.0);
    (-t).exp() * bracket / (t2 * t2)
}

/// sum_{n>=0} B_{n+4} t^n / (n+4)!, the small-t form of bracket / t^4.
pub fn bracket_series<R: Real>(t: R) -> R {
    let table = bernoulli();
    let eps = R::epsilon();
    let t2 = t * t;
    let mut fact = R::from_f64(24.0); // (n+4)!
    let mut pow = R::one();
    let mut sum = R::zero();
    let mut n = 0usize;
    loop {
        let term = table.real::<R>(n + 4) / fact * pow;
        sum += term;
        if term.abs() <= eps * sum.abs() || n + 6 > table.max_index() {
            return sum;
        }
        pow *= t2;
        let m = R::from_f64((n + 5) as f64);
        fact = fact * m * (m + R::one());
        n += 2;
    }
}

/// The Borel sum of sum_{n>=2} B_{2n}(2n-4)!/(2n)!, by panelled quadrature:
/// [0, 0.1] with the series form, then unit panels until e^{-t} is below
/// working precision. Each panel is checked adaptively.
pub fn borel_sum_psi_tilde<R: Real>() -> Result<R> {
    let gl = GaussLegendre::<R>::new(if R::DIGITS > 20 { 32 } else { 16 });
    let eps = R::epsilon();
    let t_max = -(eps.to_f64().ln()) + 10.0;
    let tol = eps.ldexp(4);
    let mut total = gl.adaptive(R::zero(), R::from_f64(SMALL_T), tol, 30, borel_integrand)?;
    let mut a = SMALL_T;
    while a < t_max {
        let b = if a < 1.0 { 1.0 } else { a + 1.0 };
        total += gl.adaptive(R::from_f64(a), R::from_f64(b), tol, 30, borel_integrand)?;
        a = b;
    }
    Ok(total)
}
