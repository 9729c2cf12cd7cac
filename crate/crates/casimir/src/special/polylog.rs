use crate::error::{Error, Result};
use crate::real::Real;
use crate::special::zeta::zeta_int;

/// Li_n(x) for integer order and real x <= 1.
///
/// |x| <= 1/2 sums the defining series. Near 1 the expansion in
/// mu = ln x keeps full relative accuracy; x < -1/2 goes through the
/// duplication formula. Orders n <= 1 are elementary.
pub fn polylog<R: Real>(n: i32, x: R) -> Result<R> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("polylog argument must be finite, got {x}")));
    }
    let one = R::one();
    if n <= 1 {
        if x >= one {
            return Err(Error::Pole(format!("Li_{n} diverges at x = 1")));
        }
        if x < -one {
            return Err(Error::Domain(format!("Li_{n} needs |x| < 1, got {x}")));
        }
        return Ok(elementary(n, x));
    }
    if x > one || x < -one {
        return Err(Error::Domain(format!("Li_{n} needs |x| <= 1, got {x}")));
    }
    let half = R::from_f64(0.5);
    if x == R::zero() {
        return Ok(R::zero());
    }
    if x == one {
        return zeta_int(n as i64);
    }
    if x.abs() <= half {
        return Ok(series(n, x));
    }
    if x > half {
        return near_one(n, x);
    }
    // Li_n(x) = 2^{1-n} Li_n(x^2) - Li_n(-x)
    let x2 = polylog(n, x * x)?;
    let neg = polylog(n, -x)?;
    Ok(x2.ldexp(1 - n) - neg)
}

fn series<R: Real>(n: i32, x: R) -> R {
    let eps = R::epsilon();
    let mut sum = R::zero();
    let mut xk = x;
    for k in 1..100_000u32 {
        let term = xk / R::from_f64(k as f64).powi(n);
        sum += term;
        if term.abs() <= eps * sum.abs() {
            break;
        }
        xk *= x;
    }
    sum
}

/// Li_n(e^mu) = sum_{k != n-1} zeta(n-k) mu^k/k! + mu^{n-1}/(n-1)! [H_{n-1} - ln(-mu)].
fn near_one<R: Real>(n: i32, x: R) -> Result<R> {
    let mu = x.ln();
    let eps = R::epsilon();
    let mut sum = R::zero();
    let mut pow = R::one(); // mu^k / k!
    let mut k = 0i32;
    let mut quiet = 0;
    loop {
        let term = if k == n - 1 {
            let mut h = R::zero();
            for j in 1..n {
                h += R::from_f64(j as f64).recip();
            }
            pow * (h - (-mu).ln())
        } else {
            let z = zeta_int::<R>((n - k) as i64)?;
            pow * z
        };
        sum += term;
        // Odd negative zeta values vanish, so wait for two quiet terms.
        if k > n && term.abs() <= eps * sum.abs() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
        k += 1;
        if k > 220 {
            return Err(Error::Convergence { best: sum.to_f64(), steps: k as usize });
        }
        pow = pow * mu / R::from_f64(k as f64);
    }
}

fn elementary<R: Real>(n: i32, x: R) -> R {
    let one = R::one();
    match n {
        1 => -(-x).ln_1p(),
        0 => x / (one - x),
        _ => {
            // Li_{-k}(x) = x A_k(x) / (1-x)^{k+1}, A_k the Eulerian polynomial.
            let k = (-n) as usize;
            let coeffs = eulerian_row(k);
            let mut p = R::zero();
            for c in coeffs.iter().rev() {
                p = p * x + R::from_f64(*c);
            }
            x * p / (one - x).powi(k as i32 + 1)
        }
    }
}

/// Eulerian numbers A(k, j), j = 0..k-1.
fn eulerian_row(k: usize) -> Vec<f64> {
    let mut row = vec![1.0f64];
    for m in 2..=k {
        let mut next = vec![0.0; m];
        for j in 0..m {
            let a = if j < row.len() { (j + 1) as f64 * row[j] } else { 0.0 };
            let b = if j >= 1 && j - 1 < row.len() { (m - j) as f64 * row[j - 1] } else { 0.0 };
            next[j] = a + b;
        }
        row = next;
    }
    row
}
