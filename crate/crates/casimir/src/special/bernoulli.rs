use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::real::Real;

/// Exact Bernoulli numbers B_0..=B_max (convention B_1 = -1/2).
#[derive(Debug, Clone)]
pub struct BernoulliTable {
    values: Vec<BigRational>,
}

impl BernoulliTable {
    pub fn new(max_index: usize) -> Self {
        let mut b: Vec<BigRational> = Vec::with_capacity(max_index + 1);
        b.push(BigRational::one());
        for m in 1..=max_index {
            if m > 1 && m % 2 == 1 {
                b.push(BigRational::zero());
                continue;
            }
            // sum_{k=0}^{m} C(m+1, k) B_k = 0
            let mut binom = BigInt::one();
            let mut acc = BigRational::zero();
            for (k, bk) in b.iter().enumerate() {
                if !bk.is_zero() {
                    acc += bk * BigRational::from_integer(binom.clone());
                }
                binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
            }
            b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
        }
        BernoulliTable { values: b }
    }

    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    /// B_n, or `None` beyond the table.
    pub fn b(&self, n: usize) -> Option<&BigRational> {
        self.values.get(n)
    }

    /// B_{2n} for n >= 1.
    pub fn b2n(&self, n: usize) -> Option<&BigRational> {
        self.values.get(2 * n)
    }

    pub fn real<R: Real>(&self, n: usize) -> R {
        let v = &self.values[n];
        R::from_ratio(v.numer(), v.denom())
    }

    /// Copy with one entry replaced, for fault-injection tests.
    pub fn with_override(&self, n: usize, value: BigRational) -> Self {
        let mut t = self.clone();
        t.values[n] = value;
        t
    }
}

/// Shared table large enough for every routine in this crate.
pub fn bernoulli() -> &'static BernoulliTable {
    static TABLE: OnceLock<BernoulliTable> = OnceLock::new();
    TABLE.get_or_init(|| BernoulliTable::new(240))
}
