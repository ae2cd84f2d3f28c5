//! Double-double scalar.
//!
//! Addition, multiplication and square roots come from `twofloat`. Its
//! double-double quotient forms the reciprocal residual without a fused
//! multiply-add and loses the low word, so division is redone here with a
//! residual correction. Trigonometric functions use the full-precision
//! routines in [`super::scalar`].

use std::cmp::Ordering;
use std::fmt;
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};
use twofloat::TwoFloat;

/// About 31 significant decimal digits, stored as an unevaluated sum of two f64.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct DoubleDouble(pub TwoFloat);

impl DoubleDouble {
    pub fn new(x: f64) -> Self {
        Self(TwoFloat::from_f64(x))
    }

    pub fn hi(self) -> f64 {
        self.0.hi()
    }

    pub fn lo(self) -> f64 {
        self.0.lo()
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self(TwoFloat::from_f64(x))
    }
}

impl From<TwoFloat> for DoubleDouble {
    fn from(x: TwoFloat) -> Self {
        Self(x)
    }
}

fn quotient(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q0 = a / b.hi();
    let r = a - q0 * b;
    let q1 = q0 + r / b.hi();
    let r = a - q1 * b;
    q1 + r / b.hi()
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $body:expr) => {
        impl $tr for DoubleDouble {
            type Output = Self;
            #[inline]
            fn $m(self, rhs: Self) -> Self {
                let f: fn(TwoFloat, TwoFloat) -> TwoFloat = $body;
                Self(f(self.0, rhs.0))
            }
        }
        impl $atr for DoubleDouble {
            #[inline]
            fn $am(&mut self, rhs: Self) {
                *self = $tr::$m(*self, rhs);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, |a, b| a + b);
binop!(Sub, sub, SubAssign, sub_assign, |a, b| a - b);
binop!(Mul, mul, MulAssign, mul_assign, |a, b| a * b);
binop!(Div, div, DivAssign, div_assign, quotient);
binop!(Rem, rem, RemAssign, rem_assign, |a, b| a - (quotient(a, b)).trunc() * b);

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(32);
        f.write_str(&super::scalar::decimal_string(*self, digits))
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self(TwoFloat::from_f64(0.0))
    }
    fn is_zero(&self) -> bool {
        self.0 == TwoFloat::from_f64(0.0)
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self(TwoFloat::from_f64(1.0))
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = <f64 as Num>::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(Self::new)
    }
}

impl ToPrimitive for DoubleDouble {
    fn to_i64(&self) -> Option<i64> {
        self.0.to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi() + self.lo())
    }
}

impl FromPrimitive for DoubleDouble {
    fn from_i64(n: i64) -> Option<Self> {
        TwoFloat::from_i64(n).map(Self)
    }
    fn from_u64(n: u64) -> Option<Self> {
        TwoFloat::from_u64(n).map(Self)
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(Self::new(x))
    }
}

impl NumCast for DoubleDouble {
    fn from<N: ToPrimitive>(n: N) -> Option<Self> {
        <TwoFloat as NumCast>::from(n).map(Self)
    }
}

macro_rules! consts {
    ($($name:ident),*) => {
        $(fn $name() -> Self { Self(TwoFloat::$name()) })*
    };
}

impl FloatConst for DoubleDouble {
    consts!(
        E, FRAC_1_PI, FRAC_1_SQRT_2, FRAC_2_PI, FRAC_2_SQRT_PI, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4,
        FRAC_PI_6, FRAC_PI_8, LN_10, LN_2, LOG10_E, LOG2_E, PI, SQRT_2
    );
}

macro_rules! unary {
    ($($name:ident),*) => {
        $(fn $name(self) -> Self { Self(self.0.$name()) })*
    };
}

macro_rules! predicate {
    ($($name:ident),*) => {
        $(fn $name(self) -> bool { self.0.$name() })*
    };
}

impl Float for DoubleDouble {
    fn nan() -> Self {
        Self(TwoFloat::NAN)
    }
    fn infinity() -> Self {
        Self(TwoFloat::INFINITY)
    }
    fn neg_infinity() -> Self {
        Self(TwoFloat::NEG_INFINITY)
    }
    fn neg_zero() -> Self {
        Self(-TwoFloat::from_f64(0.0))
    }
    fn min_value() -> Self {
        Self(TwoFloat::MIN)
    }
    fn min_positive_value() -> Self {
        Self(TwoFloat::MIN_POSITIVE)
    }
    fn max_value() -> Self {
        Self(TwoFloat::MAX)
    }
    fn epsilon() -> Self {
        Self(TwoFloat::EPSILON)
    }
    fn classify(self) -> FpCategory {
        self.hi().classify()
    }
    predicate!(is_nan, is_infinite, is_finite, is_normal, is_sign_positive, is_sign_negative);
    unary!(floor, ceil, round, trunc, fract, abs, signum, sqrt, cbrt, exp, exp2, ln, log2, log10);
    unary!(exp_m1, ln_1p, sinh, cosh, tanh, asinh, acosh, atanh, tan, asin, acos);
    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }
    fn recip(self) -> Self {
        Self::one() / self
    }
    fn powi(self, n: i32) -> Self {
        let p = Self(self.0.powi(n.abs()));
        if n < 0 {
            p.recip()
        } else {
            p
        }
    }
    fn powf(self, n: Self) -> Self {
        Self(self.0.powf(n.0))
    }
    fn log(self, base: Self) -> Self {
        self.ln() / base.ln()
    }
    fn max(self, other: Self) -> Self {
        if self >= other || other.is_nan() {
            self
        } else {
            other
        }
    }
    fn min(self, other: Self) -> Self {
        if self <= other || other.is_nan() {
            self
        } else {
            other
        }
    }
    fn abs_sub(self, other: Self) -> Self {
        if self > other {
            self - other
        } else {
            Self::zero()
        }
    }
    fn hypot(self, other: Self) -> Self {
        (self * self + other * other).sqrt()
    }
    fn sin(self) -> Self {
        super::scalar::dd_sin(self)
    }
    fn cos(self) -> Self {
        super::scalar::dd_cos(self)
    }
    fn atan(self) -> Self {
        super::scalar::dd_atan2(self, Self::one())
    }
    fn atan2(self, other: Self) -> Self {
        super::scalar::dd_atan2(self, other)
    }
    fn sin_cos(self) -> (Self, Self) {
        (self.sin(), self.cos())
    }
    fn integer_decode(self) -> (u64, i16, i8) {
        self.hi().integer_decode()
    }
}

impl DoubleDouble {
    /// Total order for sorting; NaN sorts last.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or_else(|| self.is_nan().cmp(&other.is_nan()))
    }
}
