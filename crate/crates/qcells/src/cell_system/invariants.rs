//! Gauge invariants: single-edge moduli, the E5 octahedron product and the
//! E9 double-edge family.

use num_complex::Complex;
use serde::Serialize;

use super::{CellError, CellSystem};
use crate::numerics::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl ComplexValue {
    pub fn norm(&self) -> f64 {
        self.re.hypot(self.im)
    }
    pub fn arg(&self) -> f64 {
        self.im.atan2(self.re)
    }
    pub fn conj(&self) -> Self {
        Self { re: self.re, im: -self.im }
    }
    pub fn to_complex(self) -> Complex<f64> {
        Complex::new(self.re, self.im)
    }
}

impl<T: Scalar> From<Complex<T>> for ComplexValue {
    fn from(z: Complex<T>) -> Self {
        Self { re: z.re.to_f64_lossy(), im: z.im.to_f64_lossy() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellModulus {
    pub cell: String,
    pub modulus: f64,
}

/// Invariants of three 2-vectors `v^0, v^1, v^2` that share a double edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VectorInvariants {
    /// `(v^j)† v^j`.
    pub norms: [f64; 3],
    /// `|(v^i)† v^j|²` for `(i, j) = (0,1), (1,2), (2,0)`.
    pub overlaps: [f64; 3],
    /// `((v^0)† v^1)((v^1)† v^2)((v^2)† v^0)`.
    pub triple_product: ComplexValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoubleEdgeInvariants {
    /// `Det(M†M)` for `M = [[e11, e12], [e21, e22]]`.
    pub det: f64,
    /// `Tr(M†M)`.
    pub trace: f64,
    pub c: VectorInvariants,
    pub d: VectorInvariants,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub graph: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moduli: Option<Vec<CellModulus>>,
    /// Alternating product over the inner octahedron of E5.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub octahedron: Option<ComplexValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub double_edge: Option<DoubleEdgeInvariants>,
}

/// Compute every documented invariant that applies to the graph.
pub fn gauge_invariants<T: Scalar>(cells: &CellSystem<T>) -> Result<InvariantReport, CellError> {
    let g = cells.graph();
    let moduli = g.is_single_edged().then(|| {
        (0..g.triangles().len())
            .map(|t| CellModulus { cell: g.triangle_label(t), modulus: cells.get(t).norm().to_f64_lossy() })
            .collect()
    });
    let octahedron = octahedron_product(cells);
    let double_edge = double_edge_invariants(cells);
    if moduli.is_none() && double_edge.is_none() {
        return Err(CellError::UnsupportedGraph(g.name().to_string()));
    }
    Ok(InvariantReport { graph: g.name().to_string(), moduli, octahedron, double_edge })
}

/// `ν_0 μ_1 μ_3 μ_5 · conj(ν_1 μ_0 μ_2 μ_4)`: every inner edge lies on one
/// factor of each kind, so all edge phases cancel. On a real solution this
/// is `μ⁶ ν_0 ν_1`.
fn octahedron_product<T: Scalar>(cells: &CellSystem<T>) -> Option<ComplexValue> {
    let black = ["nu0", "mu1", "mu3", "mu5"];
    let white = ["nu1", "mu0", "mu2", "mu4"];
    let mut p = Complex::new(T::one(), T::zero());
    for n in black {
        p *= cells.named(n)?;
    }
    for n in white {
        p *= cells.named(n)?.conj();
    }
    Some(p.into())
}

fn double_edge_invariants<T: Scalar>(cells: &CellSystem<T>) -> Option<DoubleEdgeInvariants> {
    let e = |k: usize, l: usize| cells.named(&format!("e{k}{l}"));
    let m = [[e(1, 1)?, e(1, 2)?], [e(2, 1)?, e(2, 2)?]];
    // M†M is Hermitian; Det and Tr are real.
    let mut h = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for (i, row) in h.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            for mk in &m {
                *x += mk[i].conj() * mk[j];
            }
        }
    }
    let det = (h[0][0] * h[1][1] - h[0][1] * h[1][0]).re.to_f64_lossy();
    let trace = (h[0][0] + h[1][1]).re.to_f64_lossy();
    let vectors = |prefix: char| -> Option<[[Complex<T>; 2]; 3]> {
        let v = |k: usize, j: usize| cells.named(&format!("{prefix}{k}^{j}"));
        Some([[v(1, 0)?, v(2, 0)?], [v(1, 1)?, v(2, 1)?], [v(1, 2)?, v(2, 2)?]])
    };
    Some(DoubleEdgeInvariants { det, trace, c: vector_invariants(&vectors('c')?), d: vector_invariants(&vectors('d')?) })
}

fn inner<T: Scalar>(u: &[Complex<T>; 2], v: &[Complex<T>; 2]) -> Complex<T> {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

fn vector_invariants<T: Scalar>(v: &[[Complex<T>; 2]; 3]) -> VectorInvariants {
    let norms = [0, 1, 2].map(|j| inner(&v[j], &v[j]).re.to_f64_lossy());
    let pairs = [(0, 1), (1, 2), (2, 0)];
    let overlaps = pairs.map(|(i, j)| inner(&v[i], &v[j]).norm_sqr().to_f64_lossy());
    let triple = pairs.iter().fold(Complex::new(T::one(), T::zero()), |acc, &(i, j)| acc * inner(&v[i], &v[j]));
    VectorInvariants { norms, overlaps, triple_product: triple.into() }
}
