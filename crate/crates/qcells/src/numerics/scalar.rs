//! The scalar abstraction shared by every numeric routine.
//!
//! Arithmetic and square roots come from [`num_traits::Float`]. Trigonometric
//! functions are routed through this trait instead, because the double-double
//! type only ships binary64-accurate transcendentals.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, One, ToPrimitive, Zero};
use super::dd::DoubleDouble;

/// Real scalar usable at any precision tier.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Significant decimal digits carried by the type.
    const DIGITS: u32;

    /// Lossy conversion from binary64.
    fn of(x: f64) -> Self;

    /// Lossy conversion to binary64.
    fn to_f64_lossy(self) -> f64;

    /// Exact small integer.
    fn int(n: i64) -> Self {
        Self::of(n as f64)
    }

    /// `sin(x)` at full working precision.
    fn sin_full(self) -> Self;

    /// `cos(x)` at full working precision.
    fn cos_full(self) -> Self;

    /// `atan2(self, x)` at full working precision.
    fn atan2_full(self, x: Self) -> Self;

    /// `sin(π num / den)` with the argument reduced exactly in integers.
    fn sin_pi_ratio(num: i64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let period = 2 * den as i64;
        let mut m = num.rem_euclid(period);
        let mut sign = Self::one();
        if m >= den as i64 {
            m -= den as i64;
            sign = -sign;
        }
        if 2 * m > den as i64 {
            m = den as i64 - m;
        }
        if m == 0 {
            return Self::zero();
        }
        if 2 * m == den as i64 {
            return sign;
        }
        let x = Self::PI() * Self::int(m) / Self::int(den as i64);
        sign * x.sin_full()
    }

    /// Decimal rendering with `digits` significant digits.
    fn to_decimal(self, digits: usize) -> String {
        decimal_string(self, digits)
    }
}

impl Scalar for f64 {
    const DIGITS: u32 = 15;
    fn of(x: f64) -> Self {
        x
    }
    fn to_f64_lossy(self) -> f64 {
        self
    }
    fn sin_full(self) -> Self {
        self.sin()
    }
    fn cos_full(self) -> Self {
        self.cos()
    }
    fn atan2_full(self, x: Self) -> Self {
        self.atan2(x)
    }
    fn to_decimal(self, digits: usize) -> String {
        format!("{:.*e}", digits.saturating_sub(1), self)
    }
}

impl Scalar for f32 {
    const DIGITS: u32 = 6;
    fn of(x: f64) -> Self {
        x as f32
    }
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
    fn sin_full(self) -> Self {
        self.sin()
    }
    fn cos_full(self) -> Self {
        self.cos()
    }
    fn atan2_full(self, x: Self) -> Self {
        self.atan2(x)
    }
    fn to_decimal(self, digits: usize) -> String {
        format!("{:.*e}", digits.saturating_sub(1), self)
    }
}

impl Scalar for DoubleDouble {
    const DIGITS: u32 = 31;
    fn of(x: f64) -> Self {
        DoubleDouble::new(x)
    }
    fn to_f64_lossy(self) -> f64 {
        self.hi() + self.lo()
    }
    fn sin_full(self) -> Self {
        dd_sin(self)
    }
    fn cos_full(self) -> Self {
        dd_cos(self)
    }
    fn atan2_full(self, x: Self) -> Self {
        dd_atan2(self, x)
    }
}

pub(super) fn dd_sin(x: DoubleDouble) -> DoubleDouble {
    let (r, quadrant) = reduce_half_pi(x);
    match quadrant {
        0 => sin_taylor(r),
        1 => cos_taylor(r),
        2 => -sin_taylor(r),
        _ => -cos_taylor(r),
    }
}

pub(super) fn dd_cos(x: DoubleDouble) -> DoubleDouble {
    let (r, quadrant) = reduce_half_pi(x);
    match quadrant {
        0 => cos_taylor(r),
        1 => -sin_taylor(r),
        2 => -cos_taylor(r),
        _ => sin_taylor(r),
    }
}

pub(super) fn dd_atan2(y: DoubleDouble, x: DoubleDouble) -> DoubleDouble {
    if x.is_zero() && y.is_zero() {
        return DoubleDouble::zero();
    }
    // Each Newton step on the binary64 seed doubles the number of correct digits.
    let mut t = DoubleDouble::new(y.to_f64_lossy().atan2(x.to_f64_lossy()));
    for _ in 0..2 {
        let (s, c) = (dd_sin(t), dd_cos(t));
        t += (y * c - x * s) / (x * c + y * s);
    }
    t
}

/// Reduce `x` to `r ∈ [-π/4, π/4]` with `x = r + quadrant·π/2 (mod 2π)`.
fn reduce_half_pi(x: DoubleDouble) -> (DoubleDouble, u8) {
    let half_pi = DoubleDouble::FRAC_PI_2();
    let k = (x / half_pi).round();
    let r = x - k * half_pi;
    let q = k.to_f64_lossy().rem_euclid(4.0) as u8;
    (r, q)
}

fn sin_taylor(x: DoubleDouble) -> DoubleDouble {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 1.0;
    loop {
        term = -term * x2 / DoubleDouble::new((n + 1.0) * (n + 2.0));
        n += 2.0;
        sum += term;
        if term.abs().to_f64_lossy() < 1e-36 {
            return sum;
        }
    }
}

fn cos_taylor(x: DoubleDouble) -> DoubleDouble {
    let x2 = x * x;
    let mut term = DoubleDouble::one();
    let mut sum = term;
    let mut n = 0.0;
    loop {
        term = -term * x2 / DoubleDouble::new((n + 1.0) * (n + 2.0));
        n += 2.0;
        sum += term;
        if term.abs().to_f64_lossy() < 1e-36 {
            return sum;
        }
    }
}

/// Scientific notation with `digits` significant digits, produced by digit
/// extraction in the scalar's own arithmetic.
pub(super) fn decimal_string<T: Scalar>(x: T, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x == T::zero() {
        return format!("{:.*e}", digits.saturating_sub(1), 0.0);
    }
    let neg = x < T::zero();
    let mut m = x.abs();
    let ten = T::int(10);
    let mut exp = m.to_f64_lossy().log10().floor() as i32;
    m /= ten.powi(exp);
    while m >= ten {
        m /= ten;
        exp += 1;
    }
    while m < T::one() {
        m *= ten;
        exp -= 1;
    }
    let mut ds: Vec<u8> = Vec::with_capacity(digits + 1);
    for _ in 0..=digits {
        let d = m.floor().to_f64_lossy().clamp(0.0, 9.0) as u8;
        ds.push(d);
        m = (m - T::int(d as i64)) * ten;
    }
    // Round half up on the guard digit, carrying leftwards.
    let guard = ds.pop().unwrap_or(0);
    if guard >= 5 {
        let mut i = ds.len();
        loop {
            if i == 0 {
                ds.insert(0, 1);
                ds.pop();
                exp += 1;
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
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    s.push((b'0' + ds[0]) as char);
    if ds.len() > 1 {
        s.push('.');
        for d in &ds[1..] {
            s.push((b'0' + d) as char);
        }
    }
    s.push_str(&format!("e{exp}"));
    s
}
