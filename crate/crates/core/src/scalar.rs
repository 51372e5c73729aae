//! Numeric field abstraction shared by the exact and floating-point paths.

use core::fmt::Debug;
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_rational::Ratio;
use num_traits::{Signed, Zero};

/// Exact rational scalar.
pub type Rational = Ratio<i128>;

/// An ordered field the LP, elimination and order routines run over.
///
/// Floating-point scalars compare with tolerances; exact scalars use zero tolerance.
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Nearest representable value (exact scalars use a continued-fraction approximation).
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    /// The tolerance `t` in this field: `t` for floats, zero for exact arithmetic.
    fn tol(t: f64) -> Self;
    fn is_exact() -> bool;

    fn is_zero_tol(&self, tol: &Self) -> bool {
        self.abs() <= *tol
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        libm::fabs(*self)
    }
    fn tol(t: f64) -> Self {
        t
    }
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        <Ratio<i128> as Zero>::zero()
    }
    fn one() -> Self {
        Ratio::from_integer(1)
    }
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num as i128, den as i128)
    }
    fn from_f64(v: f64) -> Self {
        Ratio::<i128>::approximate_float(v).unwrap_or_else(<Ratio<i128> as Zero>::zero)
    }
    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn tol(_t: f64) -> Self {
        <Ratio<i128> as Zero>::zero()
    }
    fn is_exact() -> bool {
        true
    }
}

/// Parse a decimal literal such as `-12.375` or `3e-2` into an exact rational.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(pos) => (&digits[..pos], &digits[pos + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let mut num: i128 = 0;
    for ch in int_part.chars().chain(frac_part.chars()) {
        let d = ch.to_digit(10)? as i128;
        num = num.checked_mul(10)?.checked_add(d)?;
    }
    let scale = exponent - frac_part.len() as i32;
    let pow = 10i128.checked_pow(scale.unsigned_abs())?;
    let value = if scale >= 0 {
        Ratio::from_integer(num.checked_mul(pow)?)
    } else {
        Ratio::new(num, pow)
    };
    Some(if negative { -value } else { value })
}
