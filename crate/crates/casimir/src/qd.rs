//! Quad-double arithmetic: an unevaluated sum of four non-overlapping f64
//! limbs, good for about 62 significant decimal digits.
//!
//! Algorithms follow Hida, Li and Bailey's QD library: error-free
//! transformations (`two_sum`, fma-based `two_prod`) plus renormalisation.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use crate::real::Real;

#[derive(Clone, Copy, Default)]
pub struct Qd(pub [f64; 4]);

const PI: Qd = Qd([std::f64::consts::PI, 1.2246467991473532e-16, -2.9947698097183397e-33, 1.1124542208633653e-49]);
const LN2: Qd = Qd([std::f64::consts::LN_2, 2.3190468138462996e-17, 5.707708438416212e-34, -3.5824322106018114e-50]);
const EPS: f64 = 1.2154326714572542e-63; // 2^-209

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[inline]
fn three_sum(a: f64, b: f64, c: f64) -> (f64, f64, f64) {
    let (t1, t2) = two_sum(a, b);
    let (a, t3) = two_sum(c, t1);
    let (b, c) = two_sum(t2, t3);
    (a, b, c)
}

#[inline]
fn three_sum2(a: f64, b: f64, c: f64) -> (f64, f64) {
    let (t1, t2) = two_sum(a, b);
    let (a, t3) = two_sum(c, t1);
    (a, t2 + t3)
}

fn renorm(c0: f64, c1: f64, c2: f64, c3: f64, c4: f64) -> Qd {
    if !c0.is_finite() {
        return Qd([c0, 0.0, 0.0, 0.0]);
    }
    let (s0, c4) = quick_two_sum(c3, c4);
    let (s0, c3) = quick_two_sum(c2, s0);
    let (s0, c2) = quick_two_sum(c1, s0);
    let (c0, c1) = quick_two_sum(c0, s0);

    let (mut s0, mut s1, mut s2, mut s3) = (c0, c1, 0.0, 0.0);
    if s1 != 0.0 {
        (s1, s2) = quick_two_sum(s1, c2);
        if s2 != 0.0 {
            (s2, s3) = quick_two_sum(s2, c3);
            if s3 != 0.0 {
                s3 += c4;
            } else {
                (s2, s3) = quick_two_sum(s2, c4);
            }
        } else {
            (s1, s2) = quick_two_sum(s1, c3);
            if s2 != 0.0 {
                (s2, s3) = quick_two_sum(s2, c4);
            } else {
                (s1, s2) = quick_two_sum(s1, c4);
            }
        }
    } else {
        (s0, s1) = quick_two_sum(s0, c2);
        if s1 != 0.0 {
            (s1, s2) = quick_two_sum(s1, c3);
            if s2 != 0.0 {
                (s2, s3) = quick_two_sum(s2, c4);
            } else {
                (s1, s2) = quick_two_sum(s1, c4);
            }
        } else {
            (s0, s1) = quick_two_sum(s0, c3);
            if s1 != 0.0 {
                (s1, s2) = quick_two_sum(s1, c4);
            } else {
                (s0, s1) = quick_two_sum(s0, c4);
            }
        }
    }
    Qd([s0, s1, s2, s3])
}

impl Qd {
    pub const fn new(x: f64) -> Qd {
        Qd([x, 0.0, 0.0, 0.0])
    }

    pub fn hi(self) -> f64 {
        self.0[0]
    }

    fn mul_f64(self, b: f64) -> Qd {
        let a = self.0;
        let (p0, q0) = two_prod(a[0], b);
        let (p1, q1) = two_prod(a[1], b);
        let (p2, q2) = two_prod(a[2], b);
        let p3 = a[3] * b;
        let (s1, s2) = two_sum(q0, p1);
        let (s2, q1, p2) = three_sum(s2, q1, p2);
        let (q1, q2) = three_sum2(q1, q2, p3);
        renorm(p0, s1, s2, q1, q2 + p2)
    }

    fn sqr(self) -> Qd {
        self * self
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(self, digits: usize) -> String {
        if self.0[0] == 0.0 {
            return "0".into();
        }
        if !self.0[0].is_finite() {
            return format!("{}", self.0[0]);
        }
        let neg = self.0[0] < 0.0;
        let mut x = Real::abs(self);
        let mut e = x.0[0].log10().floor() as i32;
        x /= Qd::new(10.0).powi(e);
        if x.0[0] >= 10.0 {
            x /= Qd::new(10.0);
            e += 1;
        } else if x.0[0] < 1.0 {
            x *= Qd::new(10.0);
            e -= 1;
        }
        let mut ds = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = x.0[0].floor().clamp(0.0, 9.0);
            ds.push(d as u8);
            x = (x - Qd::new(d)) * Qd::new(10.0);
        }
        // Round half up on the guard digit.
        if ds[digits] >= 5 {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    e += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        ds.truncate(digits);
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        s.push((b'0' + ds[0]) as char);
        if digits > 1 {
            s.push('.');
            for d in &ds[1..] {
                s.push((b'0' + d) as char);
            }
        }
        s.push_str(&format!("e{e}"));
        s
    }
}

impl fmt::Debug for Qd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Qd({})", self.to_decimal(64))
    }
}

impl fmt::Display for Qd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(Self::DIGITS as usize).max(1);
        f.write_str(&self.to_decimal(digits))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseQdError(String);

impl fmt::Display for ParseQdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid quad-double literal: {}", self.0)
    }
}

impl std::error::Error for ParseQdError {}

impl FromStr for Qd {
    type Err = ParseQdError;

    fn from_str(s: &str) -> Result<Qd, ParseQdError> {
        let err = || ParseQdError(s.to_string());
        let t = s.trim();
        let (neg, t) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let (mant, exp) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
            None => (t, 0),
        };
        let mut acc = Qd::zero();
        let mut scale = exp;
        let mut seen_dot = false;
        let mut any = false;
        for ch in mant.chars() {
            match ch {
                '0'..='9' => {
                    acc = acc * Qd::new(10.0) + Qd::new((ch as u8 - b'0') as f64);
                    if seen_dot {
                        scale -= 1;
                    }
                    any = true;
                }
                '.' if !seen_dot => seen_dot = true,
                '_' => {}
                _ => return Err(err()),
            }
        }
        if !any {
            return Err(err());
        }
        let ten = Qd::new(10.0);
        let v = if scale >= 0 { acc * ten.powi(scale) } else { acc / ten.powi(-scale) };
        Ok(if neg { -v } else { v })
    }
}

impl PartialEq for Qd {
    fn eq(&self, other: &Qd) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Qd {
    fn partial_cmp(&self, other: &Qd) -> Option<Ordering> {
        for i in 0..4 {
            match self.0[i].partial_cmp(&other.0[i])? {
                Ordering::Equal => continue,
                o => return Some(o),
            }
        }
        Some(Ordering::Equal)
    }
}

impl Neg for Qd {
    type Output = Qd;
    fn neg(self) -> Qd {
        Qd([-self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }
}

impl Add for Qd {
    type Output = Qd;
    fn add(self, b: Qd) -> Qd {
        let (a, b) = (self.0, b.0);
        let (s0, t0) = two_sum(a[0], b[0]);
        let (s1, t1) = two_sum(a[1], b[1]);
        let (s2, t2) = two_sum(a[2], b[2]);
        let (s3, t3) = two_sum(a[3], b[3]);
        let (s1, t0) = two_sum(s1, t0);
        let (s2, t0, t1) = three_sum(s2, t0, t1);
        let (s3, t0) = three_sum2(s3, t0, t2);
        renorm(s0, s1, s2, s3, t0 + t1 + t3)
    }
}

impl Sub for Qd {
    type Output = Qd;
    fn sub(self, b: Qd) -> Qd {
        self + (-b)
    }
}

impl Mul for Qd {
    type Output = Qd;
    fn mul(self, b: Qd) -> Qd {
        let (a, b) = (self.0, b.0);
        let (p0, q0) = two_prod(a[0], b[0]);
        let (p1, q1) = two_prod(a[0], b[1]);
        let (p2, q2) = two_prod(a[1], b[0]);
        let (p3, q3) = two_prod(a[0], b[2]);
        let (p4, q4) = two_prod(a[1], b[1]);
        let (p5, q5) = two_prod(a[2], b[0]);

        let (p1, p2, q0) = three_sum(p1, p2, q0);
        let (p2, q1, q2) = three_sum(p2, q1, q2);
        let (p3, p4, p5) = three_sum(p3, p4, p5);

        let (s0, t0) = two_sum(p2, p3);
        let (s1, t1) = two_sum(q1, p4);
        let mut s2 = q2 + p5;
        let (mut s1, t0) = two_sum(s1, t0);
        s2 += t0 + t1;

        s1 += a[0] * b[3] + a[1] * b[2] + a[2] * b[1] + a[3] * b[0] + q0 + q3 + q4 + q5;
        renorm(p0, p1, s0, s1, s2)
    }
}

impl Div for Qd {
    type Output = Qd;
    fn div(self, b: Qd) -> Qd {
        let q0 = self.0[0] / b.0[0];
        let mut r = self - b.mul_f64(q0);
        let q1 = r.0[0] / b.0[0];
        r -= b.mul_f64(q1);
        let q2 = r.0[0] / b.0[0];
        r -= b.mul_f64(q2);
        let q3 = r.0[0] / b.0[0];
        r -= b.mul_f64(q3);
        let q4 = r.0[0] / b.0[0];
        renorm(q0, q1, q2, q3, q4)
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for Qd {
            fn $m(&mut self, b: Qd) {
                *self = *self $op b;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl Real for Qd {
    const DIGITS: u32 = 62;

    fn from_f64(x: f64) -> Qd {
        Qd::new(x)
    }

    fn to_f64(self) -> f64 {
        self.0[0] + self.0[1]
    }

    fn pi() -> Qd {
        PI
    }

    fn ln2() -> Qd {
        LN2
    }

    fn epsilon() -> Qd {
        Qd::new(EPS)
    }

    fn sqrt(self) -> Qd {
        if self.0[0] == 0.0 {
            return Qd::zero();
        }
        if self.0[0] < 0.0 {
            return Qd::new(f64::NAN);
        }
        // Newton on 1/sqrt(a), then one multiplication.
        let mut r = Qd::new(1.0 / self.0[0].sqrt());
        let h = self.ldexp(-1);
        let half = Qd::new(0.5);
        for _ in 0..2 {
            r += (half - h * r.sqr()) * r;
        }
        r * self
    }

    fn exp(self) -> Qd {
        let a = self.0[0];
        if a > 709.0 {
            return Qd::new(f64::INFINITY);
        }
        if a < -745.0 {
            return Qd::zero();
        }
        if a == 0.0 {
            return Qd::one();
        }
        let m = (a / std::f64::consts::LN_2 + 0.5).floor();
        let r = self - LN2.mul_f64(m);
        (expm1_reduced(r) + Qd::one()).ldexp(m as i32)
    }

    fn exp_m1(self) -> Qd {
        if self.0[0].abs() < 0.5 * std::f64::consts::LN_2 {
            expm1_reduced(self)
        } else {
            self.exp() - Qd::one()
        }
    }

    fn ln(self) -> Qd {
        if self.0[0] <= 0.0 {
            return Qd::new(if self.0[0] == 0.0 { f64::NEG_INFINITY } else { f64::NAN });
        }
        if self == Qd::one() {
            return Qd::zero();
        }
        // Newton: x <- x + a e^{-x} - 1, quadratic from a double seed.
        let mut x = Qd::new(self.0[0].ln());
        for _ in 0..2 {
            x = x + self * (-x).exp() - Qd::one();
        }
        x
    }

    fn ln_1p(self) -> Qd {
        let y = self.0[0];
        if y.abs() > 0.5 {
            return (Qd::one() + self).ln();
        }
        if y == 0.0 {
            return Qd::zero();
        }
        // Newton on expm1 keeps full relative accuracy for tiny arguments.
        let mut x = Qd::new(y.ln_1p());
        for _ in 0..2 {
            let e = x.exp_m1();
            x += (self - e) / (Qd::one() + e);
        }
        x
    }

    fn floor(self) -> Qd {
        let mut x = [self.0[0].floor(), 0.0, 0.0, 0.0];
        if x[0] == self.0[0] {
            x[1] = self.0[1].floor();
            if x[1] == self.0[1] {
                x[2] = self.0[2].floor();
                if x[2] == self.0[2] {
                    x[3] = self.0[3].floor();
                }
            }
            return renorm(x[0], x[1], x[2], x[3], 0.0);
        }
        Qd(x)
    }

    fn ldexp(self, k: i32) -> Qd {
        let s = 2f64.powi(k);
        Qd([self.0[0] * s, self.0[1] * s, self.0[2] * s, self.0[3] * s])
    }

    fn abs(self) -> Qd {
        if self.0[0] < 0.0 {
            -self
        } else {
            self
        }
    }
}

/// exp(r) - 1 for |r| <= ln2/2: scale down by 2^16, Taylor, then undo with
/// (1+s)^2 - 1 = s(2+s), which never adds 1 and so keeps relative accuracy.
fn expm1_reduced(r: Qd) -> Qd {
    const K: i32 = 16;
    let r = r.ldexp(-K);
    let thresh = EPS * r.0[0].abs();
    let mut s = r;
    let mut p = r;
    let mut n = 1.0;
    loop {
        n += 1.0;
        p = p * r / Qd::new(n);
        s += p;
        if p.0[0].abs() <= thresh || n > 40.0 {
            break;
        }
    }
    let two = Qd::new(2.0);
    for _ in 0..K {
        s = s * (two + s);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Qd {
        s.parse().unwrap()
    }

    fn rel(a: Qd, b: Qd) -> f64 {
        ((a - b) / b).abs().to_f64()
    }

    // Reference digits from an independent 90-digit evaluation.
    const SQRT2: &str = "1.41421356237309504880168872420969807856967187537694807317667973799";
    const E: &str = "2.71828182845904523536028747135266249775724709369995957496696762772";
    const LN10: &str = "2.30258509299404568401799145468436420760110148862877297603332790097";
    const EXPM1_TINY: &str = "1.0000000000000000000050000000000000000000166666666666666666667e-20";

    #[test]
    fn basic_arithmetic_is_exact_on_small_integers() {
        let a = Qd::new(3.0);
        let b = Qd::new(7.0);
        assert_eq!((a * b).0[0], 21.0);
        assert!(((a / b) * b - a).abs() < Qd::new(1e-62));
    }

    #[test]
    fn one_third_has_62_digits() {
        let third = Qd::one() / Qd::new(3.0);
        assert_eq!(third.to_decimal(60), format!("3.{}e-1", "3".repeat(59)));
    }

    #[test]
    fn sqrt_exp_ln_against_reference() {
        assert!(rel(Qd::new(2.0).sqrt(), q(SQRT2)) < 1e-61);
        assert!(rel(Qd::one().exp(), q(E)) < 1e-61);
        assert!(rel(Qd::new(10.0).ln(), q(LN10)) < 1e-61);
        assert!(rel(q("1e-20").exp_m1(), q(EXPM1_TINY)) < 1e-60);
    }

    #[test]
    fn ln_1p_keeps_relative_accuracy() {
        let y = q("1e-40");
        let l = y.ln_1p();
        // ln(1+y) = y - y^2/2 + ...
        assert!(rel(l, y - y * y.ldexp(-1)) < 1e-60);
        assert!(rel(q("0.25").ln_1p(), q("1.25").ln()) < 1e-61);
    }

    #[test]
    fn exp_ln_round_trip_wide_range() {
        // Beyond ~|300| the trailing limbs of e^x leave the normal range.
        for &x in &[-300.0, -30.5, -1e-3, 0.3, 5.0, 123.25, 300.0] {
            let v = Qd::new(x);
            assert!(rel(v.exp().ln(), v) < 1e-59, "x = {x}");
        }
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(q("-1.5e3").to_f64(), -1500.0);
        assert_eq!(q("0.000125").to_decimal(3), "1.25e-4");
        assert!("abc".parse::<Qd>().is_err());
        assert_eq!(Qd::new(9.9999).to_decimal(2), "1.0e1");
    }

    #[test]
    fn pi_matches_machin() {
        // pi = 16 atan(1/5) - 4 atan(1/239), summed in quad-double.
        fn atan_inv(n: f64) -> Qd {
            let x = Qd::one() / Qd::new(n);
            let x2 = x * x;
            let mut term = x;
            let mut sum = x;
            let mut k = 1.0;
            loop {
                term = -term * x2;
                k += 2.0;
                let t = term / Qd::new(k);
                sum += t;
                if t.0[0].abs() < 1e-66 {
                    return sum;
                }
            }
        }
        let machin = atan_inv(5.0) * Qd::new(16.0) - atan_inv(239.0) * Qd::new(4.0);
        assert!(rel(machin, Qd::pi()) < 1e-62);
    }

    #[test]
    fn floor_and_ordering() {
        assert_eq!(q("2.5").floor().to_f64(), 2.0);
        assert_eq!(q("-2.5").floor().to_f64(), -3.0);
        assert!(q("1.0000000000000000000000000000001") > Qd::one());
    }
}
