//! Analytic infeasibility certificate for Z9.
//!
//! The Type I equations fix `b_j + c_j = √((2+√3)/3)` and the doubly
//! degenerate Type II equations fix `b_j² + √3 c_j² = (1+√3)/3`. Each `j`
//! then has two roots. The remaining pair of equations
//! `a + b_1 + b_2 + b_3 = √(2+√3)` and `a² + √3 (b_1² + b_2² + b_3²) = 2`
//! cannot both hold for any of the eight root choices.

use serde::Serialize;

use crate::numerics::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchAssignment {
    /// `true` picks the `+` root for `b_j`.
    pub plus: [bool; 3],
    pub a: String,
    pub violation: String,
    pub violation_f64: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Z9Certificate {
    pub digits: u32,
    pub b_plus: String,
    pub b_minus: String,
    pub c_plus: String,
    pub c_minus: String,
    pub assignments: Vec<BranchAssignment>,
    /// Smallest `|a² + √3 Σ b_j² − 2|` over all assignments.
    pub min_violation: String,
    pub min_violation_f64: f64,
}

/// Roots `(b, c)` of `b + c = s`, `b² + √3 c² = r`, `+` root first.
pub fn z9_roots<T: Scalar>() -> [(T, T); 2] {
    let three = T::int(3);
    let r3 = three.sqrt();
    let s = ((T::int(2) + r3) / three).sqrt();
    let r = (T::one() + r3) / three;
    // (1+√3) b² − 2√3 s b + (√3 s² − r) = 0 after eliminating c = s − b.
    let qa = T::one() + r3;
    let qb = -T::int(2) * r3 * s;
    let qc = r3 * s * s - r;
    let disc = (qb * qb - T::int(4) * qa * qc).sqrt();
    let plus = (-qb + disc) / (T::int(2) * qa);
    let minus = (-qb - disc) / (T::int(2) * qa);
    [(plus, s - plus), (minus, s - minus)]
}

pub fn certify_infeasible_z9<T: Scalar>() -> Z9Certificate {
    let digits = T::DIGITS;
    let show = |x: T| x.to_decimal(digits as usize);
    let r3 = T::int(3).sqrt();
    let [(bp, cp), (bm, cm)] = z9_roots::<T>();
    let total = (T::int(2) + r3).sqrt();
    let mut assignments = Vec::with_capacity(8);
    let mut min = T::infinity();
    for mask in 0..8u32 {
        let plus = [mask & 1 != 0, mask & 2 != 0, mask & 4 != 0];
        let bs = plus.map(|p| if p { bp } else { bm });
        let a = total - bs[0] - bs[1] - bs[2];
        let sq = bs.iter().fold(T::zero(), |s, b| s + *b * *b);
        let v = (a * a + r3 * sq - T::int(2)).abs();
        min = min.min(v);
        assignments.push(BranchAssignment { plus, a: show(a), violation: show(v), violation_f64: v.to_f64_lossy() });
    }
    Z9Certificate {
        digits,
        b_plus: show(bp),
        b_minus: show(bm),
        c_plus: show(cp),
        c_minus: show(cm),
        assignments,
        min_violation: show(min),
        min_violation_f64: min.to_f64_lossy(),
    }
}
