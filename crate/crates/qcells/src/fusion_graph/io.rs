//! JSON graph files.

use serde::{Deserialize, Serialize};

use super::{Edge, FusionGraph, GraphError, Vertex};
use crate::numerics::Altitude;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AltitudeField {
    Finite(u32),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triality: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: String,
    pub from: String,
    pub to: String,
}

/// On-disk shape of a graph. `weights` and `truncation` are only present for
/// truncated classical alcoves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub name: String,
    pub altitude: AltitudeField,
    pub unit: String,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<(u32, u32)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<u32>,
}

impl GraphFile {
    pub fn from_graph(g: &FusionGraph) -> Self {
        let vid = |i: usize| g.vertices()[i].id.clone();
        Self {
            name: g.name().to_string(),
            altitude: match g.altitude() {
                Altitude::Finite(k) => AltitudeField::Finite(k),
                Altitude::Infinite => AltitudeField::Named("infinity".into()),
            },
            unit: vid(g.unit()),
            vertices: g
                .vertices()
                .iter()
                .map(|v| VertexRecord { id: v.id.clone(), triality: v.triality })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord { id: e.id.clone(), from: vid(e.from), to: vid(e.to) })
                .collect(),
            weights: g.weights().filter(|_| g.truncation().is_some()).map(<[_]>::to_vec),
            truncation: g.truncation(),
        }
    }

    /// Resolve ids and build the graph, then run the spectral validation.
    pub fn into_graph(self) -> Result<FusionGraph, GraphError> {
        let altitude = match self.altitude {
            AltitudeField::Finite(k) => Altitude::Finite(k),
            AltitudeField::Named(s) if s.eq_ignore_ascii_case("infinity") => Altitude::Infinite,
            AltitudeField::Named(s) => {
                return Err(GraphError::Validation(format!("altitude `{s}` is neither an integer nor \"infinity\"")))
            }
        };
        let lookup = |id: &str, what: &str| {
            self.vertices
                .iter()
                .position(|v| v.id == id)
                .ok_or_else(|| GraphError::Validation(format!("{what} references unknown vertex `{id}`")))
        };
        let unit = lookup(&self.unit, "unit")?;
        let edges = self
            .edges
            .iter()
            .map(|e| {
                Ok(Edge {
                    id: e.id.clone(),
                    from: lookup(&e.from, &format!("edge `{}`", e.id))?,
                    to: lookup(&e.to, &format!("edge `{}`", e.id))?,
                })
            })
            .collect::<Result<Vec<_>, GraphError>>()?;
        let vertices = self
            .vertices
            .iter()
            .map(|v| Vertex { id: v.id.clone(), triality: v.triality })
            .collect();
        let mut g = FusionGraph::new(self.name, altitude, unit, vertices, edges)?;
        match (self.weights, self.truncation) {
            (Some(w), Some(t)) if altitude == Altitude::Infinite => {
                if w.len() != g.vertex_count() {
                    return Err(GraphError::Validation("one weight per vertex is required".into()));
                }
                g = g.with_weights(w, Some(t));
            }
            (None, None) => {}
            _ => {
                return Err(GraphError::Validation(
                    "`weights` and `truncation` go together and need altitude \"infinity\"".into(),
                ))
            }
        }
        g.validate().map_err(|e| match e {
            GraphError::Validation(_) => e,
            other => GraphError::Validation(other.to_string()),
        })?;
        Ok(g)
    }
}

/// Parse and validate a graph file.
pub fn parse_graph(bytes: &[u8]) -> Result<FusionGraph, GraphError> {
    let file: GraphFile = serde_json::from_slice(bytes).map_err(|e| GraphError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.into_graph()
}

/// Pretty-printed JSON form of a graph.
pub fn serialize_graph(g: &FusionGraph) -> Vec<u8> {
    serde_json::to_vec_pretty(&GraphFile::from_graph(g)).expect("graph records serialize")
}
