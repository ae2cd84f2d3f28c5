//! JSON cell files. Each record names a triangle by vertex and edge ids in
//! any cyclic rotation; values land on the canonical rotation.

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{CellError, CellSystem};
use crate::fusion_graph::{builtin_graph, FusionGraph, GraphFile};
use crate::numerics::{RootOfUnityContext, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphRef {
    Name(String),
    Inline(Box<GraphFile>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellRecord {
    pub a: String,
    pub b: String,
    pub c: String,
    pub alpha: String,
    pub beta: String,
    pub gamma: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellFile {
    pub graph: GraphRef,
    pub cells: Vec<CellRecord>,
}

impl CellFile {
    pub fn from_cells<T: Scalar>(cells: &CellSystem<T>) -> Self {
        let g = cells.graph();
        let graph = if builtin_graph(g.name()).map(|b| &b == g).unwrap_or(false) {
            GraphRef::Name(g.name().to_string())
        } else {
            GraphRef::Inline(Box::new(GraphFile::from_graph(g)))
        };
        let vid = |i: usize| g.vertices()[i].id.clone();
        let eid = |i: usize| g.edges()[i].id.clone();
        let records = g
            .triangles()
            .iter()
            .zip(cells.values())
            .map(|(t, v)| CellRecord {
                a: vid(t.vertices[0]),
                b: vid(t.vertices[1]),
                c: vid(t.vertices[2]),
                alpha: eid(t.edges[0]),
                beta: eid(t.edges[1]),
                gamma: eid(t.edges[2]),
                re: v.re.to_f64_lossy(),
                im: v.im.to_f64_lossy(),
            })
            .collect();
        Self { graph, cells: records }
    }

    /// The graph named or embedded in the file.
    pub fn resolve_graph(&self) -> Result<FusionGraph, CellError> {
        Ok(match &self.graph {
            GraphRef::Name(n) => builtin_graph(n)?,
            GraphRef::Inline(f) => (**f).clone().into_graph()?,
        })
    }

    /// Place every record on its triangle. Every triangle needs exactly one
    /// value; repeated rotations of one triangle must agree.
    pub fn into_cells<T: Scalar>(
        &self,
        graph: Arc<FusionGraph>,
        ctx: RootOfUnityContext<T>,
    ) -> Result<CellSystem<T>, CellError> {
        let n = graph.triangles().len();
        let mut slots: Vec<Option<Complex<f64>>> = vec![None; n];
        for r in &self.cells {
            let v = |id: &str| graph.vertex_index(id).ok_or_else(|| CellError::Unknown(format!("vertex `{id}`")));
            let e = |id: &str| graph.edge_index(id).ok_or_else(|| CellError::Unknown(format!("edge `{id}`")));
            let (a, b, c) = (v(&r.a)?, v(&r.b)?, v(&r.c)?);
            let edges = [e(&r.alpha)?, e(&r.beta)?, e(&r.gamma)?];
            let ends = [(a, b), (b, c), (c, a)];
            for (&x, &(from, to)) in edges.iter().zip(&ends) {
                let ed = &graph.edges()[x];
                if ed.from != from || ed.to != to {
                    return Err(CellError::Unknown(format!(
                        "edge `{}` as a step {} -> {}",
                        ed.id,
                        graph.vertices()[from].id,
                        graph.vertices()[to].id
                    )));
                }
            }
            let t = graph
                .triangle_of_edges(edges)
                .ok_or_else(|| CellError::Unknown(format!("triangle ({}, {}, {})", r.a, r.b, r.c)))?;
            let z = Complex::new(r.re, r.im);
            match slots[t] {
                Some(old) if old != z => {
                    return Err(CellError::ShapeMismatch(format!(
                        "conflicting values for {}",
                        graph.triangle_label(t)
                    )))
                }
                _ => slots[t] = Some(z),
            }
        }
        let values = slots
            .iter()
            .enumerate()
            .map(|(t, s)| {
                s.map(|z| Complex::new(T::of(z.re), T::of(z.im)))
                    .ok_or_else(|| CellError::MissingCell(graph.triangle_label(t)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        CellSystem::new(graph, ctx, values)
    }
}

/// Parse a cell file. When `graph` is given the file must refer to the same
/// graph; otherwise the graph is resolved from the file.
pub fn parse_cells<T: Scalar>(bytes: &[u8], graph: Option<Arc<FusionGraph>>) -> Result<CellSystem<T>, CellError> {
    let file: CellFile = serde_json::from_slice(bytes).map_err(|e| CellError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let named = file.resolve_graph()?;
    let graph = match graph {
        Some(g) => {
            if g.name() != named.name() || g.triangles() != named.triangles() {
                return Err(CellError::ShapeMismatch(format!(
                    "cell file is for `{}`, expected `{}`",
                    named.name(),
                    g.name()
                )));
            }
            g
        }
        None => Arc::new(named),
    };
    let ctx = RootOfUnityContext::from_altitude(graph.altitude());
    file.into_cells(graph, ctx)
}

/// Pretty-printed cell file in canonical rotation and triangle order.
pub fn serialize_cells<T: Scalar>(cells: &CellSystem<T>) -> Vec<u8> {
    serde_json::to_vec_pretty(&CellFile::from_cells(cells)).expect("cell records serialize")
}
