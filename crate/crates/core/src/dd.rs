//! Double-double arithmetic.
//!
//! A [`Dd`] is an unevaluated sum `hi + lo` of two `f64` with `|lo| <= ulp(hi)/2`,
//! giving roughly 106 bits (about 31 decimal digits) of significand. The error-free
//! transformations follow Dekker and Knuth; products use fused multiply-add, which
//! is correctly rounded on every platform Rust supports, so results are bit-for-bit
//! reproducible.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Double-double value `hi + lo`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

/// ln 2 to double-double precision.
const LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    /// Builds a value from two components, renormalising them.
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (h, l) = two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    /// Nearest `f64`.
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn from_u64(x: u64) -> Dd {
        let hi = x as f64;
        // hi may have rounded; the residual is exact in i128 and fits an f64.
        let lo = (x as i128 - hi as i128) as f64;
        Dd::new(hi, lo)
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn is_nan(self) -> bool {
        self.hi.is_nan()
    }

    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    pub fn is_sign_negative(self) -> bool {
        self.hi < 0.0
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    /// `true` when the value is an integer (both limbs integral).
    pub fn is_integer(self) -> bool {
        self.hi.fract() == 0.0 && self.lo.fract() == 0.0
    }

    /// Multiplies by `2^k` exactly.
    pub fn ldexp(self, k: i32) -> Dd {
        // Two factors so that 2^k itself never overflows near the exponent range ends.
        let a = 2f64.powi(k / 2);
        let b = 2f64.powi(k - k / 2);
        Dd { hi: self.hi * a * b, lo: self.lo * a * b }
    }

    pub fn sqr(self) -> Dd {
        let (p, e) = two_prod(self.hi, self.hi);
        let e = e + 2.0 * self.hi * self.lo;
        let (hi, lo) = quick_two_sum(p, e + self.lo * self.lo);
        Dd { hi, lo }
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Dd::ZERO } else { Dd::new(f64::NAN, 0.0) };
        }
        // One Newton step on the f64 root doubles the precision.
        let x = 1.0 / self.hi.sqrt();
        let ax = Dd::new(self.hi * x, 0.0);
        let corr = (self - ax.sqr()).hi * (x * 0.5);
        ax + Dd::new(corr, 0.0)
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, k: i64) -> Dd {
        if k == 0 {
            return Dd::ONE;
        }
        // inverting first lets large negative powers underflow instead of overflowing
        let mut base = if k < 0 { self.recip() } else { self };
        let mut e = k.unsigned_abs();
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.78 {
            return Dd::new(f64::INFINITY, 0.0);
        }
        if self.hi < -745.2 {
            return Dd::ZERO;
        }
        if self.is_zero() {
            return Dd::ONE;
        }
        // x = k ln2 + r, |r| <= ln2/2; then r is scaled by 2^-10 so the Taylor
        // tail is tiny, and the result is squared back up ten times.
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * Dd::new(k, 0.0)).ldexp(-10);
        let r2 = r.sqr();
        // expm1(r) = r + r^2/2 + r^3/3! + ...
        let mut s = r + r2.ldexp(-1);
        let mut p = r2 * r;
        let mut fact = 2.0;
        for i in 3..=18 {
            // i! is exact in f64 for i <= 18.
            fact *= i as f64;
            let t = p / Dd::from(fact);
            s += t;
            if t.hi.abs() <= 1e-34 * s.hi.abs() {
                break;
            }
            p = p * r;
        }
        for _ in 0..10 {
            // (1 + s)^2 - 1 = 2s + s^2
            s = s.ldexp(1) + s.sqr();
        }
        (s + Dd::ONE).ldexp(k as i32)
    }

    /// Natural logarithm; NaN for negative input and -inf at zero.
    pub fn ln(self) -> Dd {
        if self.hi < 0.0 || self.is_nan() {
            return Dd::new(f64::NAN, 0.0);
        }
        if self.hi == 0.0 {
            return Dd::new(f64::NEG_INFINITY, 0.0);
        }
        if self.hi == 1.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        // x = m 2^e with m near 1, then Newton on exp: y <- y + m exp(-y) - 1.
        let e = self.hi.log2().round() as i32;
        let m = self.ldexp(-e);
        let y = Dd::new(m.hi.ln(), 0.0);
        y + m * (-y).exp() - Dd::ONE + LN2 * Dd::from(e as f64)
    }

    /// Real power `self^y` for positive `self`.
    pub fn powf(self, y: Dd) -> Dd {
        (y * self.ln()).exp()
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }
}

impl From<u64> for Dd {
    fn from(x: u64) -> Dd {
        Dd::from_u64(x)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        // Long division: three quotient digits.
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::from(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::from(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from(q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}
