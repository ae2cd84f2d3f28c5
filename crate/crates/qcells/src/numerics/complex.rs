use super::{QComplex, Scalar};

/// `e^{iθ}` at full working precision.
pub fn cis<T: Scalar>(theta: T) -> QComplex<T> {
    QComplex::new(theta.cos_full(), theta.sin_full())
}

/// `|z|`, computed as the square root of the squared norm.
pub fn modulus<T: Scalar>(z: QComplex<T>) -> T {
    z.norm_sqr().sqrt()
}

/// Argument of `z` in `(−π, π]`.
pub fn phase<T: Scalar>(z: QComplex<T>) -> T {
    z.im.atan2_full(z.re)
}
