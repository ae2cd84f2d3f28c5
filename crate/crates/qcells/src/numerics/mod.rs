//! Quantum integers and quantum dimensions at a root of unity.

mod complex;
mod dd;
pub mod linalg;
mod scalar;

use std::fmt;
use std::marker::PhantomData;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use complex::{cis, modulus, phase};
pub use dd::DoubleDouble;
pub use scalar::Scalar;

/// Complex number at the working precision.
pub type QComplex<T> = num_complex::Complex<T>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("altitude {0} is below the minimum of 4")]
    AltitudeTooSmall(u32),
    #[error("weight ({k},{l}) lies outside the alcove at altitude {altitude}")]
    WeightOutsideAlcove { k: u32, l: u32, altitude: u32 },
    #[error("precision of {requested} digits is not available (supported: up to {max})")]
    PrecisionUnsupported { requested: u32, max: u32 },
    #[error("precision of {0} digits is below the 15-digit floor")]
    PrecisionTooLow(u32),
}

/// Altitude κ of the root of unity `q = exp(iπ/κ)`, or the classical limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Altitude {
    Finite(u32),
    Infinite,
}

impl Altitude {
    /// Level `k = κ − 3`, if finite.
    pub fn level(self) -> Option<u32> {
        match self {
            Altitude::Finite(k) => Some(k - 3),
            Altitude::Infinite => None,
        }
    }

    pub fn for_level(k: u32) -> Self {
        Altitude::Finite(k + 3)
    }
}

impl fmt::Display for Altitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Altitude::Finite(k) => write!(f, "{k}"),
            Altitude::Infinite => write!(f, "infinity"),
        }
    }
}

/// Runtime precision tier, selected from a requested number of digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// binary64, about 15 significant digits.
    Double,
    /// double-double, about 31 significant digits.
    DoubleDouble,
}

impl Precision {
    pub fn from_digits(digits: u32) -> Result<Self, NumericsError> {
        if digits < 15 {
            Err(NumericsError::PrecisionTooLow(digits))
        } else if digits <= f64::DIGITS {
            Ok(Precision::Double)
        } else if digits <= DoubleDouble::DIGITS {
            Ok(Precision::DoubleDouble)
        } else {
            Err(NumericsError::PrecisionUnsupported {
                requested: digits,
                max: DoubleDouble::DIGITS,
            })
        }
    }

    pub fn digits(self) -> u32 {
        match self {
            Precision::Double => f64::DIGITS,
            Precision::DoubleDouble => DoubleDouble::DIGITS,
        }
    }
}

/// Altitude plus the numeric policy used to evaluate q-numbers.
///
/// The working precision is the scalar type `T`; the tolerance ε is the
/// verification threshold handed to downstream checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOfUnityContext<T> {
    altitude: Altitude,
    tolerance: T,
    _scalar: PhantomData<T>,
}

impl<T: Scalar> RootOfUnityContext<T> {
    /// Context at finite altitude κ ≥ 4 with the default tolerance 1e-9.
    pub fn new(altitude: u32) -> Result<Self, NumericsError> {
        if altitude < 4 {
            return Err(NumericsError::AltitudeTooSmall(altitude));
        }
        Ok(Self::from_altitude(Altitude::Finite(altitude)))
    }

    /// The classical limit q = 1.
    pub fn classical() -> Self {
        Self::from_altitude(Altitude::Infinite)
    }

    /// Context for an altitude value; panics on finite altitudes below 4.
    pub fn from_altitude(altitude: Altitude) -> Self {
        if let Altitude::Finite(k) = altitude {
            assert!(k >= 4, "altitude {k} is below the minimum of 4");
        }
        Self {
            altitude,
            tolerance: T::of(1e-9),
            _scalar: PhantomData,
        }
    }

    pub fn with_tolerance(mut self, eps: T) -> Self {
        self.tolerance = eps;
        self
    }

    /// Same altitude and tolerance, evaluated in another scalar type.
    pub fn with_precision<U: Scalar>(&self) -> RootOfUnityContext<U> {
        RootOfUnityContext {
            altitude: self.altitude,
            tolerance: U::of(self.tolerance.to_f64_lossy()),
            _scalar: PhantomData,
        }
    }

    pub fn altitude(&self) -> Altitude {
        self.altitude
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    pub fn precision_digits(&self) -> u32 {
        T::DIGITS
    }

    /// Quantum integer `[n] = sin(nπ/κ)/sin(π/κ)`; `n` itself in the classical limit.
    pub fn qint(&self, n: i64) -> T {
        match self.altitude {
            Altitude::Infinite => T::int(n),
            Altitude::Finite(k) => {
                T::sin_pi_ratio(n, k as u64) / T::sin_pi_ratio(1, k as u64)
            }
        }
    }

    /// Quantum dimension `μ_{k,l} = [k+1][l+1][k+l+2]/[2]` of the weight (k,l).
    pub fn qdim_weight(&self, k: u32, l: u32) -> Result<T, NumericsError> {
        if let Altitude::Finite(kappa) = self.altitude {
            if k + l + 3 > kappa {
                return Err(NumericsError::WeightOutsideAlcove { k, l, altitude: kappa });
            }
        }
        let (k, l) = (k as i64, l as i64);
        Ok(self.qint(k + 1) * self.qint(l + 1) * self.qint(k + l + 2) / self.qint(2))
    }
}

/// Quantum integer at a context; free-function form of [`RootOfUnityContext::qint`].
pub fn qint<T: Scalar>(n: i64, ctx: &RootOfUnityContext<T>) -> T {
    ctx.qint(n)
}

/// Free-function form of [`RootOfUnityContext::qdim_weight`].
pub fn qdim_weight<T: Scalar>(k: u32, l: u32, ctx: &RootOfUnityContext<T>) -> Result<T, NumericsError> {
    ctx.qdim_weight(k, l)
}
