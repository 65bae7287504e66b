//! Overflow-safe reals stored as a mantissa in `[1, 2)` and a binary exponent.
//!
//! Quantities such as `h(n) ~ s^n` or `p_n(0)^2` leave the `f64` range long
//! before the recurrences that produce them become inaccurate, so they are
//! carried as `mantissa * 2^exponent` with a 64-bit exponent.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, PartialEq)]
pub struct ScaledReal {
    mantissa: f64,
    exponent: i64,
}

/// Splits a finite non-zero `v` into `(m, e)` with `v = m * 2^e`, `1 <= |m| < 2`.
fn frexp(v: f64) -> (f64, i64) {
    let bits = v.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        // subnormal
        let (m, e) = frexp(v * 2f64.powi(64));
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1023u64 << 52));
    (m, biased - 1023)
}

/// `x * 2^e` without intermediate overflow.
pub(crate) fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1023 {
        x *= f64::from_bits(2046u64 << 52); // 2^1023
        e -= 1023;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1022 {
        x *= f64::from_bits(1u64 << 52); // 2^-1022
        e += 1022;
        if x == 0.0 {
            return x;
        }
    }
    x * f64::from_bits(((e + 1023) as u64) << 52)
}

impl ScaledReal {
    pub const ZERO: ScaledReal = ScaledReal {
        mantissa: 0.0,
        exponent: 0,
    };
    pub const ONE: ScaledReal = ScaledReal {
        mantissa: 1.0,
        exponent: 0,
    };

    /// Builds `value * 2^exponent`, renormalizing the mantissa.
    pub fn new(value: f64, exponent: i64) -> Self {
        if value == 0.0 {
            return Self::ZERO;
        }
        if !value.is_finite() {
            return ScaledReal {
                mantissa: value,
                exponent: 0,
            };
        }
        let (m, e) = frexp(value);
        ScaledReal {
            mantissa: m,
            exponent: e + exponent,
        }
    }

    pub fn from_f64(value: f64) -> Self {
        Self::new(value, 0)
    }

    /// Nearest `f64`; saturates to `±inf` or `0` outside the representable range.
    pub fn to_f64(self) -> f64 {
        if self.mantissa == 0.0 || !self.mantissa.is_finite() {
            return self.mantissa;
        }
        ldexp(self.mantissa, self.exponent)
    }

    pub fn mantissa(self) -> f64 {
        self.mantissa
    }

    pub fn exponent(self) -> i64 {
        self.exponent
    }

    pub fn is_zero(self) -> bool {
        self.mantissa == 0.0
    }

    pub fn is_finite(self) -> bool {
        self.mantissa.is_finite()
    }

    pub fn is_sign_negative(self) -> bool {
        self.mantissa < 0.0
    }

    pub fn abs(self) -> Self {
        ScaledReal {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    pub fn square(self) -> Self {
        self * self
    }

    /// Square root of a non-negative value.
    pub fn sqrt(self) -> Self {
        if self.mantissa <= 0.0 || !self.is_finite() {
            return Self::new(self.mantissa.sqrt(), 0);
        }
        let (m, e) = if self.exponent.rem_euclid(2) == 0 {
            (self.mantissa, self.exponent)
        } else {
            (self.mantissa * 2.0, self.exponent - 1)
        };
        Self::new(m.sqrt(), e / 2)
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    /// Natural logarithm of a positive value.
    pub fn ln(self) -> f64 {
        self.mantissa.ln() + self.exponent as f64 * std::f64::consts::LN_2
    }

    pub fn log2(self) -> f64 {
        self.mantissa.log2() + self.exponent as f64
    }

    /// Multiplies by `2^k` exactly.
    pub fn scale_pow2(self, k: i64) -> Self {
        if self.is_zero() || !self.is_finite() {
            return self;
        }
        ScaledReal {
            mantissa: self.mantissa,
            exponent: self.exponent + k,
        }
    }

    /// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
    pub fn rel_diff(self, other: Self) -> f64 {
        let scale = if self.abs() > other.abs() {
            self.abs()
        } else {
            other.abs()
        };
        if scale.is_zero() {
            return 0.0;
        }
        ((self - other).abs() / scale).to_f64()
    }
}

impl Default for ScaledReal {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<f64> for ScaledReal {
    fn from(v: f64) -> Self {
        Self::from_f64(v)
    }
}

impl fmt::Debug for ScaledReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl fmt::Display for ScaledReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() || !self.is_finite() {
            return write!(f, "{}", self.mantissa);
        }
        let log10 = self.log2() * std::f64::consts::LOG10_2;
        let e10 = log10.floor();
        let m10 = 10f64.powf(log10 - e10) * self.mantissa.signum();
        write!(f, "{m10:.15}e{e10}")
    }
}

impl Mul for ScaledReal {
    type Output = ScaledReal;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Div for ScaledReal {
    type Output = ScaledReal;
    fn div(self, rhs: Self) -> Self {
        Self::new(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }
}

impl Neg for ScaledReal {
    type Output = ScaledReal;
    fn neg(self) -> Self {
        if self.is_zero() {
            return self;
        }
        ScaledReal {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Add for ScaledReal {
    type Output = ScaledReal;
    fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        if !self.is_finite() || !rhs.is_finite() {
            return Self::from_f64(self.mantissa + rhs.mantissa);
        }
        let (big, small) = if self.exponent >= rhs.exponent {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let shift = big.exponent - small.exponent;
        if shift > 80 {
            return big;
        }
        Self::new(big.mantissa + ldexp(small.mantissa, -shift), big.exponent)
    }
}

impl Sub for ScaledReal {
    type Output = ScaledReal;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl std::iter::Sum for ScaledReal {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |acc, v| acc + v)
    }
}

impl PartialOrd for ScaledReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if !self.is_finite() || !other.is_finite() {
            return self.to_f64().partial_cmp(&other.to_f64());
        }
        let sa = self.mantissa.partial_cmp(&0.0)?;
        let sb = other.mantissa.partial_cmp(&0.0)?;
        if sa != sb {
            return Some(sa.cmp(&sb));
        }
        if sa == Ordering::Equal {
            return Some(Ordering::Equal);
        }
        let magnitude = self
            .exponent
            .cmp(&other.exponent)
            .then(self.mantissa.abs().partial_cmp(&other.mantissa.abs())?);
        Some(if sa == Ordering::Less {
            magnitude.reverse()
        } else {
            magnitude
        })
    }
}
