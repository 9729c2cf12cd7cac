//! Working-precision abstraction.
//!
//! Everything numerically delicate is generic over [`Real`], implemented by
//! `f64` and by the quad-double [`Qd`](crate::qd::Qd) (about 62 decimal digits).

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

pub trait Real:
    Copy
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    /// Decimal digits carried by the representation.
    const DIGITS: u32;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn pi() -> Self;
    fn ln2() -> Self;
    /// Unit roundoff.
    fn epsilon() -> Self;

    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn exp_m1(self) -> Self;
    fn ln(self) -> Self;
    fn ln_1p(self) -> Self;
    fn floor(self) -> Self;
    /// Multiplication by 2^k, exact.
    fn ldexp(self, k: i32) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn from_i64(n: i64) -> Self {
        // Split so integers beyond 2^53 stay exact.
        let hi = (n >> 26) << 26;
        Self::from_f64(hi as f64) + Self::from_f64((n - hi) as f64)
    }

    fn from_bigint(n: &BigInt) -> Self {
        let base = BigInt::from(1u64 << 52);
        let mut digits = Vec::new();
        let mut rest = n.abs();
        while !rest.is_zero() {
            digits.push((&rest % &base).to_f64().unwrap_or(0.0));
            rest /= &base;
        }
        let mut acc = Self::zero();
        for d in digits.iter().rev() {
            acc = acc.ldexp(52) + Self::from_f64(*d);
        }
        if n.is_negative() {
            -acc
        } else {
            acc
        }
    }

    fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        Self::from_bigint(num) / Self::from_bigint(den)
    }

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    fn powf(self, y: Self) -> Self {
        (y * self.ln()).exp()
    }

    fn recip(self) -> Self {
        Self::one() / self
    }

    fn is_finite(self) -> bool {
        self.to_f64().is_finite()
    }
}

impl Real for f64 {
    const DIGITS: u32 = 15;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn ln2() -> Self {
        std::f64::consts::LN_2
    }
    fn epsilon() -> Self {
        f64::EPSILON / 2.0
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn exp_m1(self) -> Self {
        f64::exp_m1(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn ln_1p(self) -> Self {
        f64::ln_1p(self)
    }
    fn floor(self) -> Self {
        f64::floor(self)
    }
    fn ldexp(self, k: i32) -> Self {
        self * 2f64.powi(k)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powf(self, y: Self) -> Self {
        f64::powf(self, y)
    }
}

/// Working precision chosen at run time from a requested digit count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Double,
    QuadDouble,
}

impl Precision {
    pub const DEFAULT_DIGITS: u32 = 33;
    pub const MAX_DIGITS: u32 = 62;

    pub fn from_digits(digits: u32) -> Option<Precision> {
        match digits {
            0 => None,
            1..=15 => Some(Precision::Double),
            16..=Self::MAX_DIGITS => Some(Precision::QuadDouble),
            _ => None,
        }
    }

    pub fn digits(self) -> u32 {
        match self {
            Precision::Double => f64::DIGITS,
            Precision::QuadDouble => crate::qd::Qd::DIGITS,
        }
    }
}
