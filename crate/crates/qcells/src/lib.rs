//! Triangular cell systems on SU(3) fusion graphs: q-number arithmetic,
//! graph enumeration, fusion rings, coherence equations, a numerical solver
//! and Hecke representation checks.
//!
//! Numeric code is generic over [`numerics::Scalar`]; the aliases below fix
//! binary64 and double-double instantiations.

pub mod cell_system;
pub mod fusion_graph;
pub mod fusion_ring;
pub mod hecke;
pub mod numerics;
pub mod solver;

pub use numerics::{Altitude, DoubleDouble, NumericsError, Precision, QComplex, RootOfUnityContext, Scalar};

/// Real scalar at the default precision.
pub type QReal = f64;
/// Real scalar at double-double precision.
pub type QRealDD = DoubleDouble;
/// Context at the default precision.
pub type Context = RootOfUnityContext<f64>;
/// Context at double-double precision.
pub type ContextDD = RootOfUnityContext<DoubleDouble>;
