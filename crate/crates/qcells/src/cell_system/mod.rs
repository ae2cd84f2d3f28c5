//! Cell systems: one complex value per oriented triangle, the Type I and
//! Type II residuals, gauge transformations and gauge invariants.

pub mod equations;
mod gauge;
mod invariants;
mod io;

use std::sync::Arc;

use num_complex::Complex;
use thiserror::Error;

use crate::fusion_graph::{FusionGraph, GraphError, TypeIFrame, TypeIIFrame};
use crate::numerics::{RootOfUnityContext, Scalar};

pub use equations::{EquationKind, EquationSet, Selection};
pub use gauge::{apply_gauge, GaugeChoice};
pub use invariants::{gauge_invariants, CellModulus, ComplexValue, DoubleEdgeInvariants, InvariantReport, VectorInvariants};
pub use io::{parse_cells, serialize_cells, CellFile, CellRecord, GraphRef};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CellError {
    #[error("no value for the cell on {0}")]
    MissingCell(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invariant family not defined on graph `{0}`")]
    UnsupportedGraph(String),
    #[error("cell file error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("cell file refers to {0}")]
    Unknown(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Assignment of a complex value to every canonical triangle of a graph,
/// together with the dimensions that enter the coherence equations.
#[derive(Debug, Clone)]
pub struct CellSystem<T> {
    graph: Arc<FusionGraph>,
    ctx: RootOfUnityContext<T>,
    dims: Arc<Vec<T>>,
    values: Vec<Complex<T>>,
}

impl<T: Scalar> CellSystem<T> {
    /// Cells in triangle order; the length must match the triangle count.
    pub fn new(
        graph: Arc<FusionGraph>,
        ctx: RootOfUnityContext<T>,
        values: Vec<Complex<T>>,
    ) -> Result<Self, CellError> {
        if values.len() != graph.triangles().len() {
            return Err(CellError::ShapeMismatch(format!(
                "{} values for {} triangles",
                values.len(),
                graph.triangles().len()
            )));
        }
        let dims = Arc::new(graph.dimensions(&ctx)?.values);
        Ok(Self { graph, ctx, dims, values })
    }

    /// Cells over explicitly supplied dimensions.
    pub(crate) fn with_dims(
        graph: Arc<FusionGraph>,
        ctx: RootOfUnityContext<T>,
        dims: Vec<T>,
        values: Vec<Complex<T>>,
    ) -> Self {
        debug_assert_eq!(dims.len(), graph.vertex_count());
        debug_assert_eq!(values.len(), graph.triangles().len());
        Self { graph, ctx, dims: Arc::new(dims), values }
    }

    /// All cells zero.
    pub fn zeros(graph: Arc<FusionGraph>, ctx: RootOfUnityContext<T>) -> Result<Self, CellError> {
        let n = graph.triangles().len();
        Self::new(graph, ctx, vec![Complex::new(T::zero(), T::zero()); n])
    }

    /// Same graph and dimensions, new values.
    pub fn with_values(&self, values: Vec<Complex<T>>) -> Result<Self, CellError> {
        if values.len() != self.values.len() {
            return Err(CellError::ShapeMismatch(format!(
                "{} values for {} triangles",
                values.len(),
                self.values.len()
            )));
        }
        Ok(Self { graph: self.graph.clone(), ctx: self.ctx, dims: self.dims.clone(), values })
    }

    pub fn graph(&self) -> &FusionGraph {
        &self.graph
    }
    pub fn graph_arc(&self) -> &Arc<FusionGraph> {
        &self.graph
    }
    pub fn context(&self) -> &RootOfUnityContext<T> {
        &self.ctx
    }
    pub fn dims(&self) -> &[T] {
        &self.dims
    }
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }
    pub fn q2(&self) -> T {
        self.ctx.qint(2)
    }

    pub fn get(&self, t: usize) -> Complex<T> {
        self.values[t]
    }

    pub fn set(&mut self, t: usize, v: Complex<T>) {
        self.values[t] = v;
    }

    /// Value of the triangle with edges `(α, β, γ)` in cyclic order; every
    /// rotation resolves to the same stored entry.
    pub fn value(&self, edges: [usize; 3]) -> Option<Complex<T>> {
        self.graph.triangle_of_edges(edges).map(|t| self.values[t])
    }

    /// Value of a named catalog cell.
    pub fn named(&self, name: &str) -> Option<Complex<T>> {
        self.graph.named_cell(name).map(|t| self.values[t])
    }

    pub fn set_named(&mut self, name: &str, v: Complex<T>) -> Result<(), CellError> {
        let t = self
            .graph
            .named_cell(name)
            .ok_or_else(|| CellError::Unknown(format!("cell name `{name}`")))?;
        self.values[t] = v;
        Ok(())
    }

    /// Compile a subset of the coherence system for this graph.
    pub fn equations(&self, sel: Selection) -> Result<EquationSet<T>, CellError> {
        EquationSet::build(&self.graph, &self.dims, self.q2(), sel)
    }
}

/// `LHS − RHS` of the Type I equation on one frame.
pub fn type1_residual<T: Scalar>(cells: &CellSystem<T>, frame: &TypeIFrame) -> Result<Complex<T>, CellError> {
    let eq = equations::type1_equation(cells.graph(), cells.dims(), cells.q2(), frame, 0)?;
    Ok(eq.residual(cells.values()))
}

/// `LHS − RHS` of the Type II equation on one frame.
pub fn type2_residual<T: Scalar>(cells: &CellSystem<T>, frame: &TypeIIFrame) -> Result<Complex<T>, CellError> {
    let eq = equations::type2_equation(cells.graph(), cells.dims(), frame, 0)?;
    Ok(eq.residual(cells.values()))
}
