//! Coherence equations compiled to sparse polynomials in the cell values.
//!
//! Every residual has the form `Σ coef · Π f(T_t) − rhs`, where each factor is
//! a cell or its conjugate. Compiling once lets the solver evaluate residuals
//! and Wirtinger derivatives without re-walking the graph.

use num_complex::Complex;
use serde::Serialize;

use super::CellError;
use crate::fusion_graph::{Degeneracy, FusionGraph, TypeIFrame, TypeIIFrame};
use crate::numerics::Scalar;

/// One factor `T_t` or `conj(T_t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Factor {
    pub tri: u32,
    pub conj: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term<T> {
    pub coef: T,
    pub factors: Vec<Factor>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EquationKind {
    TypeI { diagonal: bool },
    TypeII(#[serde(serialize_with = "ser_degeneracy")] Degeneracy),
}

fn ser_degeneracy<S: serde::Serializer>(d: &Degeneracy, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(match d {
        Degeneracy::Doubly => "doubly",
        Degeneracy::Singly => "singly",
        Degeneracy::NonDegenerate => "non-degenerate",
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equation<T> {
    pub kind: EquationKind,
    /// Index into the frame list the equation was built from.
    pub frame: usize,
    pub rhs: T,
    pub terms: Vec<Term<T>>,
}

impl<T: Scalar> Equation<T> {
    /// `Σ coef · Π f(T_t) − rhs`.
    pub fn residual(&self, cells: &[Complex<T>]) -> Complex<T> {
        let mut s = Complex::new(-self.rhs, T::zero());
        for term in &self.terms {
            let mut p = Complex::new(term.coef, T::zero());
            for f in &term.factors {
                let v = cells[f.tri as usize];
                p *= if f.conj { v.conj() } else { v };
            }
            s += p;
        }
        s
    }

    /// Call `f(t, ∂r/∂T_t, ∂r/∂conj T_t)` once per factor occurrence, treating
    /// `T` and `conj T` as independent variables.
    pub fn wirtinger(&self, cells: &[Complex<T>], mut f: impl FnMut(usize, Complex<T>, Complex<T>)) {
        let zero = Complex::new(T::zero(), T::zero());
        for term in &self.terms {
            let vals: Vec<Complex<T>> = term
                .factors
                .iter()
                .map(|f| {
                    let v = cells[f.tri as usize];
                    if f.conj {
                        v.conj()
                    } else {
                        v
                    }
                })
                .collect();
            for (k, fac) in term.factors.iter().enumerate() {
                let mut p = Complex::new(term.coef, T::zero());
                for (j, v) in vals.iter().enumerate() {
                    if j != k {
                        p *= *v;
                    }
                }
                if fac.conj {
                    f(fac.tri as usize, zero, p);
                } else {
                    f(fac.tri as usize, p, zero);
                }
            }
        }
    }

    pub fn touches(&self, tri: usize) -> bool {
        self.terms.iter().any(|t| t.factors.iter().any(|f| f.tri as usize == tri))
    }
}

/// Which Type II frames to include.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Type2Selection {
    pub doubly: bool,
    pub singly: bool,
    pub non_degenerate: bool,
}

impl Type2Selection {
    pub const ALL: Self = Self { doubly: true, singly: true, non_degenerate: true };
    pub const DEGENERATE: Self = Self { doubly: true, singly: true, non_degenerate: false };
    pub const NONE: Self = Self { doubly: false, singly: false, non_degenerate: false };

    fn admits(&self, d: Degeneracy) -> bool {
        match d {
            Degeneracy::Doubly => self.doubly,
            Degeneracy::Singly => self.singly,
            Degeneracy::NonDegenerate => self.non_degenerate,
        }
    }
}

/// Subset of the coherence system to compile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub type1_off_diagonal: bool,
    pub type2: Type2Selection,
}

impl Selection {
    /// Every Type I frame and every deduplicated Type II frame.
    pub const FULL: Self = Self { type1_off_diagonal: true, type2: Type2Selection::ALL };
    /// The equations that only involve squared moduli on single-edge graphs.
    pub const MODULI: Self = Self { type1_off_diagonal: false, type2: Type2Selection::DEGENERATE };
}

/// Type I equation `Σ_{c,β,γ} T_{abc}^{αβγ} conj(T_{abc}^{α′βγ}) = [2] δ μ_a μ_b`.
pub fn type1_equation<T: Scalar>(
    graph: &FusionGraph,
    dims: &[T],
    q2: T,
    frame: &TypeIFrame,
    index: usize,
) -> Result<Equation<T>, CellError> {
    let mut terms = Vec::new();
    for &beta in graph.out_edges(frame.b) {
        let c = graph.edges()[beta].to;
        for &gamma in graph.edges_between(c, frame.a) {
            let t1 = tri(graph, [frame.alpha, beta, gamma])?;
            let t2 = tri(graph, [frame.alpha_prime, beta, gamma])?;
            terms.push(Term {
                coef: T::one(),
                factors: vec![Factor { tri: t1, conj: false }, Factor { tri: t2, conj: true }],
            });
        }
    }
    let rhs = if frame.is_diagonal() { q2 * dims[frame.a] * dims[frame.b] } else { T::zero() };
    Ok(Equation { kind: EquationKind::TypeI { diagonal: frame.is_diagonal() }, frame: index, rhs, terms })
}

/// Type II equation with apex sum
/// `Σ (1/μ_c) T(a1,a2,c) conj T(a3,a2,c) T(a3,a4,c) conj T(a1,a4,c)` and
/// right side `μ1μ2μ3 δ(α1,α4)δ(α2,α3) + μ1μ2μ4 δ(α1,α2)δ(α3,α4)`.
pub fn type2_equation<T: Scalar>(
    graph: &FusionGraph,
    dims: &[T],
    frame: &TypeIIFrame,
    index: usize,
) -> Result<Equation<T>, CellError> {
    let [a1, a2, a3, a4] = frame.vertices;
    let [x1, x2, x3, x4] = frame.edges;
    let mut terms = Vec::with_capacity(frame.apexes.len());
    for apex in &frame.apexes {
        let [b1, b2, b3, b4] = apex.beta;
        let factors = vec![
            Factor { tri: tri(graph, [x1, b2, b1])?, conj: false },
            Factor { tri: tri(graph, [x2, b2, b3])?, conj: true },
            Factor { tri: tri(graph, [x3, b4, b3])?, conj: false },
            Factor { tri: tri(graph, [x4, b4, b1])?, conj: true },
        ];
        terms.push(Term { coef: T::one() / dims[apex.c], factors });
    }
    let mut rhs = T::zero();
    if x1 == x4 && x2 == x3 {
        rhs += dims[a1] * dims[a2] * dims[a3];
    }
    if x1 == x2 && x3 == x4 {
        rhs += dims[a1] * dims[a2] * dims[a4];
    }
    Ok(Equation { kind: EquationKind::TypeII(frame.degeneracy()), frame: index, rhs, terms })
}

fn tri(graph: &FusionGraph, edges: [usize; 3]) -> Result<u32, CellError> {
    graph
        .triangle_of_edges(edges)
        .map(|t| t as u32)
        .ok_or_else(|| CellError::MissingCell(format!("edges {edges:?}")))
}

/// A compiled system together with the frames it came from.
#[derive(Debug, Clone)]
pub struct EquationSet<T> {
    pub equations: Vec<Equation<T>>,
    pub type1_frames: Vec<TypeIFrame>,
    pub type2_frames: Vec<TypeIIFrame>,
}

impl<T: Scalar> EquationSet<T> {
    pub fn build(graph: &FusionGraph, dims: &[T], q2: T, sel: Selection) -> Result<Self, CellError> {
        let type1_frames: Vec<_> = graph
            .type1_frames()
            .into_iter()
            .filter(|f| sel.type1_off_diagonal || f.is_diagonal())
            .collect();
        let type2_frames: Vec<_> = graph
            .type2_frames(true)
            .into_iter()
            .filter(|f| sel.type2.admits(f.degeneracy()))
            .collect();
        let mut equations = Vec::with_capacity(type1_frames.len() + type2_frames.len());
        for (i, f) in type1_frames.iter().enumerate() {
            equations.push(type1_equation(graph, dims, q2, f, i)?);
        }
        for (i, f) in type2_frames.iter().enumerate() {
            equations.push(type2_equation(graph, dims, f, i)?);
        }
        Ok(Self { equations, type1_frames, type2_frames })
    }

    pub fn residuals(&self, cells: &[Complex<T>]) -> Vec<Complex<T>> {
        self.equations.iter().map(|e| e.residual(cells)).collect()
    }

    /// Largest residual modulus, or zero for an empty system.
    pub fn max_residual(&self, cells: &[Complex<T>]) -> T {
        self.equations
            .iter()
            .map(|e| e.residual(cells).norm())
            .fold(T::zero(), |m, r| if r > m || r.is_nan() { r } else { m })
    }
}
