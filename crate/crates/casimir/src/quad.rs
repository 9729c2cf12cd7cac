//! Gauss–Legendre rules in any working precision, plus a simple adaptive
//! bisection driver.

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone)]
pub struct GaussLegendre<R> {
    nodes: Vec<R>,
    weights: Vec<R>,
}

impl<R: Real> GaussLegendre<R> {
    /// n-point rule on [-1, 1]; nodes by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![R::zero(); n];
        let mut weights = vec![R::zero(); n];
        let tol = R::epsilon().ldexp(3);
        for i in 0..n.div_ceil(2) {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut x = R::from_f64(guess);
            let mut dp = R::one();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= tol {
                    let (_, d) = legendre(n, x);
                    dp = d;
                    break;
                }
            }
            let w = R::from_f64(2.0) / ((R::one() - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = R::zero();
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(R) -> R>(&self, a: R, b: R, mut f: F) -> R {
        let half = (b - a).ldexp(-1);
        let mid = (a + b).ldexp(-1);
        let mut acc = R::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += *w * f(mid + half * *x);
        }
        acc * half
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: R, b: R) -> impl Iterator<Item = (R, R)> + '_ {
        let half = (b - a).ldexp(-1);
        let mid = (a + b).ldexp(-1);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (mid + half * *x, *w * half))
    }

    /// Integral over consecutive breakpoints.
    pub fn integrate_panels<F: FnMut(R) -> R>(&self, breaks: &[R], mut f: F) -> R {
        let mut acc = R::zero();
        for w in breaks.windows(2) {
            acc += self.integrate(w[0], w[1], &mut f);
        }
        acc
    }

    /// Adaptive bisection until each panel agrees with its two halves to
    /// `tol` (absolute). Fails after `max_depth` levels.
    pub fn adaptive<F: FnMut(R) -> R>(&self, a: R, b: R, tol: R, max_depth: u32, mut f: F) -> Result<R> {
        let whole = self.integrate(a, b, &mut f);
        self.adaptive_rec(a, b, whole, tol, max_depth, &mut f)
    }

    fn adaptive_rec<F: FnMut(R) -> R>(&self, a: R, b: R, whole: R, tol: R, depth: u32, f: &mut F) -> Result<R> {
        let m = (a + b).ldexp(-1);
        let left = self.integrate(a, m, &mut *f);
        let right = self.integrate(m, b, &mut *f);
        let err = (left + right - whole).abs();
        if err <= tol {
            return Ok(left + right);
        }
        if depth == 0 {
            return Err(Error::Numerical {
                message: "adaptive quadrature did not converge".into(),
                partial: (left + right).to_f64(),
                bound: err.to_f64(),
            });
        }
        let half_tol = tol.ldexp(-1);
        Ok(self.adaptive_rec(a, m, left, half_tol, depth - 1, f)? + self.adaptive_rec(m, b, right, half_tol, depth - 1, f)?)
    }
}

fn legendre<R: Real>(n: usize, x: R) -> (R, R) {
    let mut p0 = R::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = R::from_f64(k as f64);
        let p2 = ((kf + kf - R::one()) * x * p1 - (kf - R::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = R::from_f64(n as f64) * (x * p1 - p0) / (x * x - R::one());
    (p1, d)
}
