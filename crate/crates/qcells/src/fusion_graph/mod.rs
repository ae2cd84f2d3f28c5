//! Fusion graphs: vertices, labeled oriented multi-edges, quantum dimensions,
//! and enumeration of the triangles and frames that carry the coherence
//! equations.

pub mod catalog;
mod io;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::numerics::{linalg, Altitude, NumericsError, RootOfUnityContext, Scalar};

pub use catalog::builtin_graph;
pub use io::{parse_graph, serialize_graph, GraphFile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("unknown graph `{0}`")]
    UnknownGraph(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("graph is not strongly connected")]
    NotConnected,
    #[error("Perron-Frobenius eigenvalue {found} differs from [3] = {expected}")]
    AltitudeMismatch { found: f64, expected: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub triality: Option<u8>,
}

/// Oriented edge `from → to`; parallel edges carry distinct ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
}

/// Oriented triangle `a →α b →β c →γ a`, stored in canonical rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedTriangle {
    pub vertices: [usize; 3],
    pub edges: [usize; 3],
}

impl OrientedTriangle {
    /// The cyclic rotation starting at the second vertex.
    pub fn rotate(self) -> Self {
        let [a, b, c] = self.vertices;
        let [x, y, z] = self.edges;
        Self { vertices: [b, c, a], edges: [y, z, x] }
    }

    fn key(&self) -> [usize; 6] {
        let [a, b, c] = self.vertices;
        let [x, y, z] = self.edges;
        [a, x, b, y, c, z]
    }

    /// Lexicographically smallest (vertex, edge) sequence among the rotations.
    pub fn canonical(self) -> Self {
        let r1 = self.rotate();
        let r2 = r1.rotate();
        [self, r1, r2].into_iter().min_by_key(|t| t.key()).unwrap()
    }
}

/// Parallel-edge pair `(α, α′)` from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeIFrame {
    pub a: usize,
    pub b: usize,
    pub alpha: usize,
    pub alpha_prime: usize,
}

impl TypeIFrame {
    pub fn is_diagonal(&self) -> bool {
        self.alpha == self.alpha_prime
    }
}

/// Apex summand of a Type II frame: `β1: c→a1, β2: a2→c, β3: c→a3, β4: a4→c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Apex {
    pub c: usize,
    pub beta: [usize; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Degeneracy {
    /// `a1 = a3` and `a2 = a4`.
    Doubly,
    /// Exactly one of the two diagonals collapses.
    Singly,
    NonDegenerate,
}

/// Quadrilateral frame `α1: a1→a2, α2: a3→a2, α3: a3→a4, α4: a1→a4` with its
/// apex summands.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeIIFrame {
    pub vertices: [usize; 4],
    pub edges: [usize; 4],
    pub apexes: Vec<Apex>,
}

impl TypeIIFrame {
    pub fn degeneracy(&self) -> Degeneracy {
        let [a1, a2, a3, a4] = self.vertices;
        match (a1 == a3, a2 == a4) {
            (true, true) => Degeneracy::Doubly,
            (false, false) => Degeneracy::NonDegenerate,
            _ => Degeneracy::Singly,
        }
    }

    fn key(&self) -> ([usize; 4], [usize; 4]) {
        (self.vertices, self.edges)
    }

    /// Image under `(a1,a2,a3,a4) → (a3,a2,a1,a4)` with edges relabeled.
    fn flip_first(&self) -> ([usize; 4], [usize; 4]) {
        let [a1, a2, a3, a4] = self.vertices;
        let [x1, x2, x3, x4] = self.edges;
        ([a3, a2, a1, a4], [x2, x1, x4, x3])
    }

    /// Image under `(a1,a2,a3,a4) → (a1,a4,a3,a2)` with edges relabeled.
    fn flip_second(&self) -> ([usize; 4], [usize; 4]) {
        let [a1, a2, a3, a4] = self.vertices;
        let [x1, x2, x3, x4] = self.edges;
        ([a1, a4, a3, a2], [x4, x3, x2, x1])
    }

    /// Whether this frame is the lexicographic minimum of its symmetry orbit.
    pub fn is_orbit_representative(&self) -> bool {
        let k = self.key();
        let f1 = self.flip_first();
        let f2 = self.flip_second();
        let both = {
            let [a1, a2, a3, a4] = self.vertices;
            let [x1, x2, x3, x4] = self.edges;
            ([a3, a4, a1, a2], [x3, x4, x1, x2])
        };
        k <= f1 && k <= f2 && k <= both
    }
}

/// Per-vertex quantum dimensions, normalized at the unit vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionVector<T> {
    pub values: Vec<T>,
    /// Eigenvalue that the vector realizes (`[3]_κ` for a compatible graph).
    pub eigenvalue: T,
}

impl<T: Scalar> DimensionVector<T> {
    pub fn get(&self, v: usize) -> T {
        self.values[v]
    }
}

/// Immutable fusion graph with precomputed adjacency and triangle tables.
#[derive(Debug, Clone)]
pub struct FusionGraph {
    name: String,
    altitude: Altitude,
    unit: usize,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<u32>>,
    between: HashMap<(usize, usize), Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
    triangles: Vec<OrientedTriangle>,
    triangle_index: HashMap<[usize; 3], usize>,
    weights: Option<Vec<(u32, u32)>>,
    truncation: Option<u32>,
    named_cells: Vec<(String, usize)>,
}

impl PartialEq for FusionGraph {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.altitude == other.altitude
            && self.unit == other.unit
            && self.vertices == other.vertices
            && self.edges == other.edges
    }
}

impl FusionGraph {
    /// Build a graph from vertices and index-based edges.
    ///
    /// Checks index bounds, id uniqueness and triality compatibility; the
    /// spectral check lives in [`FusionGraph::validate`].
    pub fn new(
        name: impl Into<String>,
        altitude: Altitude,
        unit: usize,
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
    ) -> Result<Self, GraphError> {
        let n = vertices.len();
        if unit >= n {
            return Err(GraphError::Validation(format!("unit index {unit} out of range")));
        }
        if let Altitude::Finite(k) = altitude {
            if k < 4 {
                return Err(NumericsError::AltitudeTooSmall(k).into());
            }
        }
        let mut ids = BTreeSet::new();
        for v in &vertices {
            if !ids.insert(v.id.as_str()) {
                return Err(GraphError::Validation(format!("duplicate vertex id `{}`", v.id)));
            }
            if matches!(v.triality, Some(t) if t > 2) {
                return Err(GraphError::Validation(format!("vertex `{}` has triality outside 0..=2", v.id)));
            }
        }
        let mut eids = BTreeSet::new();
        for e in &edges {
            if !eids.insert(e.id.as_str()) {
                return Err(GraphError::Validation(format!("duplicate edge id `{}`", e.id)));
            }
            if e.from >= n || e.to >= n {
                return Err(GraphError::Validation(format!("edge `{}` references an unknown vertex", e.id)));
            }
            if let (Some(s), Some(t)) = (vertices[e.from].triality, vertices[e.to].triality) {
                if t != (s + 1) % 3 {
                    return Err(GraphError::Validation(format!(
                        "edge `{}` from `{}` to `{}` does not raise triality by one",
                        e.id, vertices[e.from].id, vertices[e.to].id
                    )));
                }
            }
        }
        let mut adjacency = vec![vec![0u32; n]; n];
        let mut between: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut out_edges = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.from][e.to] += 1;
            between.entry((e.from, e.to)).or_default().push(i);
            out_edges[e.from].push(i);
        }
        let mut g = Self {
            name: name.into(),
            altitude,
            unit,
            vertices,
            edges,
            adjacency,
            between,
            out_edges,
            triangles: Vec::new(),
            triangle_index: HashMap::new(),
            weights: None,
            truncation: None,
            named_cells: Vec::new(),
        };
        g.triangles = g.compute_triangles();
        g.triangle_index = g
            .triangles
            .iter()
            .enumerate()
            .map(|(i, t)| (t.edges, i))
            .collect();
        Ok(g)
    }

    /// Attach highest-weight labels to the vertices (alcove graphs).
    pub(crate) fn with_weights(mut self, weights: Vec<(u32, u32)>, truncation: Option<u32>) -> Self {
        assert_eq!(weights.len(), self.vertices.len());
        self.weights = Some(weights);
        self.truncation = truncation;
        self
    }

    pub(crate) fn with_named_cells(mut self, named: Vec<(String, usize)>) -> Self {
        self.named_cells = named;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn altitude(&self) -> Altitude {
        self.altitude
    }
    pub fn unit(&self) -> usize {
        self.unit
    }
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adjacency
    }
    pub fn weights(&self) -> Option<&[(u32, u32)]> {
        self.weights.as_deref()
    }
    /// Level cap of a truncated classical graph.
    pub fn truncation(&self) -> Option<u32> {
        self.truncation
    }
    /// Named cells in the order used to prioritize gauge fixing.
    pub fn named_cells(&self) -> &[(String, usize)] {
        &self.named_cells
    }

    pub fn named_cell(&self, name: &str) -> Option<usize> {
        self.named_cells.iter().find(|(n, _)| n == name).map(|(_, i)| *i)
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Edges `a → b` in storage order.
    pub fn edges_between(&self, a: usize, b: usize) -> &[usize] {
        self.between.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn out_edges(&self, a: usize) -> &[usize] {
        &self.out_edges[a]
    }

    /// Whether every vertex pair is joined by at most one edge.
    pub fn is_single_edged(&self) -> bool {
        self.adjacency.iter().flatten().all(|&x| x <= 1)
    }

    pub fn triangles(&self) -> &[OrientedTriangle] {
        &self.triangles
    }

    /// Index of the canonical triangle with the given edges in cyclic order.
    pub fn triangle_of_edges(&self, edges: [usize; 3]) -> Option<usize> {
        let t = OrientedTriangle {
            vertices: [self.edges[edges[0]].from, self.edges[edges[1]].from, self.edges[edges[2]].from],
            edges,
        }
        .canonical();
        self.triangle_index.get(&t.edges).copied()
    }

    /// Locate a triangle by vertex ids in cyclic order, optionally pinning
    /// edge ids (needed on multi-edges).
    pub fn find_triangle(&self, vertices: [&str; 3], edges: [Option<&str>; 3]) -> Option<usize> {
        let v = [
            self.vertex_index(vertices[0])?,
            self.vertex_index(vertices[1])?,
            self.vertex_index(vertices[2])?,
        ];
        let mut pins = [None; 3];
        for (p, e) in pins.iter_mut().zip(edges) {
            if let Some(id) = e {
                *p = Some(self.edge_index(id)?);
            }
        }
        let mut found = None;
        for &x in self.edges_between(v[0], v[1]) {
            for &y in self.edges_between(v[1], v[2]) {
                for &z in self.edges_between(v[2], v[0]) {
                    let ok = [x, y, z].iter().zip(&pins).all(|(e, p)| p.is_none_or(|p| p == *e));
                    if ok {
                        if found.is_some() {
                            return None;
                        }
                        found = self.triangle_of_edges([x, y, z]);
                    }
                }
            }
        }
        found
    }

    /// Human-readable label `(a,b,c)` of a triangle, with edge ids on multi-edges.
    pub fn triangle_label(&self, t: usize) -> String {
        let tri = self.triangles[t];
        let v = tri.vertices.map(|i| self.vertices[i].id.as_str());
        if self.is_single_edged() {
            format!("({},{},{})", v[0], v[1], v[2])
        } else {
            let e = tri.edges.map(|i| self.edges[i].id.as_str());
            format!("({},{},{};{},{},{})", v[0], v[1], v[2], e[0], e[1], e[2])
        }
    }

    fn compute_triangles(&self) -> Vec<OrientedTriangle> {
        let mut out = Vec::new();
        for (ia, ea) in self.edges.iter().enumerate() {
            for &ib in self.out_edges(ea.to) {
                let c = self.edges[ib].to;
                for &ic in self.edges_between(c, ea.from) {
                    let t = OrientedTriangle { vertices: [ea.from, ea.to, c], edges: [ia, ib, ic] };
                    if t.canonical() == t {
                        out.push(t);
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Tr(G³)/3, computed from the adjacency matrix.
    pub fn trace_g3_over_3(&self) -> u64 {
        let g = &self.adjacency;
        let n = g.len();
        let mut tr = 0u64;
        for a in 0..n {
            for b in 0..n {
                if g[a][b] == 0 {
                    continue;
                }
                for c in 0..n {
                    tr += (g[a][b] * g[b][c] * g[c][a]) as u64;
                }
            }
        }
        tr / 3
    }

    /// Tr(G Gᵀ G Gᵀ), computed from the adjacency matrix.
    pub fn trace_ggt_squared(&self) -> u64 {
        let g = &self.adjacency;
        let n = g.len();
        // P = G Gᵀ is symmetric, so the trace of P² is the sum of squares.
        let mut total = 0u64;
        for i in 0..n {
            for j in 0..n {
                let p: u64 = (0..n).map(|k| (g[i][k] * g[j][k]) as u64).sum();
                total += p * p;
            }
        }
        total
    }

    /// Number of ordered vertex pairs joined by at least one edge.
    pub fn type1_vertex_pairs(&self) -> usize {
        self.adjacency.iter().flatten().filter(|&&x| x > 0).count()
    }

    /// The same graph with every edge reversed.
    pub fn conjugate(&self) -> FusionGraph {
        let vertices = self
            .vertices
            .iter()
            .map(|v| Vertex { id: v.id.clone(), triality: v.triality.map(|t| (3 - t) % 3) })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { id: e.id.clone(), from: e.to, to: e.from })
            .collect();
        let name = match self.name.strip_suffix('*') {
            Some(base) => base.to_string(),
            None => format!("{}*", self.name),
        };
        let mut g = FusionGraph::new(name, self.altitude, self.unit, vertices, edges)
            .expect("reversing edges preserves validity");
        if let Some(w) = &self.weights {
            g = g.with_weights(w.iter().map(|&(k, l)| (l, k)).collect(), self.truncation);
        }
        g
    }

    fn strongly_connected(&self) -> bool {
        let n = self.vertices.len();
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut stack = vec![self.unit];
            seen[self.unit] = true;
            while let Some(v) = stack.pop() {
                for w in 0..n {
                    let linked = if forward { self.adjacency[v][w] } else { self.adjacency[w][v] };
                    if linked > 0 && !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen.into_iter().all(|x| x)
        };
        reach(true) && reach(false)
    }

    /// Perron–Frobenius dimensions; the eigenvalue must equal `[3]_κ` to the
    /// context tolerance.
    pub fn pf_dimensions<T: Scalar>(&self, ctx: &RootOfUnityContext<T>) -> Result<DimensionVector<T>, GraphError> {
        if !self.strongly_connected() {
            return Err(GraphError::NotConnected);
        }
        let (lambda, values) = linalg::perron_frobenius::<T>(&self.adjacency, self.unit);
        let expected = ctx.qint(3);
        if (lambda - expected).abs() > ctx.tolerance() {
            return Err(GraphError::AltitudeMismatch {
                found: lambda.to_f64_lossy(),
                expected: expected.to_f64_lossy(),
            });
        }
        Ok(DimensionVector { values, eigenvalue: lambda })
    }

    /// Dimensions used by the coherence equations: the weight formula on
    /// truncated classical alcoves, Perron–Frobenius data otherwise.
    pub fn dimensions<T: Scalar>(&self, ctx: &RootOfUnityContext<T>) -> Result<DimensionVector<T>, GraphError> {
        match (&self.weights, self.truncation) {
            (Some(w), Some(_)) => {
                let values = w
                    .iter()
                    .map(|&(k, l)| ctx.qdim_weight(k, l))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(DimensionVector { values, eigenvalue: ctx.qint(3) })
            }
            _ => self.pf_dimensions(ctx),
        }
    }

    /// Check triality, connectivity and spectral compatibility with the altitude.
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.truncation.is_some() {
            return Ok(());
        }
        let ctx = RootOfUnityContext::<f64>::from_altitude(self.altitude);
        self.pf_dimensions(&ctx).map(|_| ())
    }

    /// One Type I frame per ordered edge pair `(α, α′)` with common endpoints.
    pub fn type1_frames(&self) -> Vec<TypeIFrame> {
        let mut out = Vec::new();
        let mut keys: Vec<_> = self.between.keys().copied().collect();
        keys.sort();
        for (a, b) in keys {
            let es = self.edges_between(a, b);
            for &x in es {
                for &y in es {
                    out.push(TypeIFrame { a, b, alpha: x, alpha_prime: y });
                }
            }
        }
        out
    }

    fn apexes(&self, v: [usize; 4]) -> Vec<Apex> {
        let [a1, a2, a3, a4] = v;
        let mut out = Vec::new();
        for c in 0..self.vertices.len() {
            for &b1 in self.edges_between(c, a1) {
                for &b2 in self.edges_between(a2, c) {
                    for &b3 in self.edges_between(c, a3) {
                        for &b4 in self.edges_between(a4, c) {
                            out.push(Apex { c, beta: [b1, b2, b3, b4] });
                        }
                    }
                }
            }
        }
        out
    }

    /// Type II frames. The raw list has `Tr(G Gᵀ G Gᵀ)` entries; with `dedup`
    /// one representative per symmetry orbit is kept and frames without an
    /// apex are dropped.
    pub fn type2_frames(&self, dedup: bool) -> Vec<TypeIIFrame> {
        let mut out = Vec::new();
        for (i1, e1) in self.edges.iter().enumerate() {
            let (a1, a2) = (e1.from, e1.to);
            for (i2, e2) in self.edges.iter().enumerate() {
                if e2.to != a2 {
                    continue;
                }
                let a3 = e2.from;
                for &i3 in self.out_edges(a3) {
                    let a4 = self.edges[i3].to;
                    for &i4 in self.edges_between(a1, a4) {
                        let mut f = TypeIIFrame {
                            vertices: [a1, a2, a3, a4],
                            edges: [i1, i2, i3, i4],
                            apexes: Vec::new(),
                        };
                        if dedup && !f.is_orbit_representative() {
                            continue;
                        }
                        f.apexes = self.apexes(f.vertices);
                        if dedup && f.apexes.is_empty() {
                            continue;
                        }
                        out.push(f);
                    }
                }
            }
        }
        out
    }
}

/// Free-function form of [`FusionGraph::pf_dimensions`].
pub fn pf_dimensions<T: Scalar>(graph: &FusionGraph, ctx: &RootOfUnityContext<T>) -> Result<DimensionVector<T>, GraphError> {
    graph.pf_dimensions(ctx)
}

/// Free-function form of [`FusionGraph::triangles`].
pub fn enumerate_triangles(graph: &FusionGraph) -> Vec<OrientedTriangle> {
    graph.triangles().to_vec()
}

/// Free-function form of [`FusionGraph::type1_frames`].
pub fn enumerate_type1_frames(graph: &FusionGraph) -> Vec<TypeIFrame> {
    graph.type1_frames()
}

/// Free-function form of [`FusionGraph::type2_frames`].
pub fn enumerate_type2_frames(graph: &FusionGraph, dedup: bool) -> Vec<TypeIIFrame> {
    graph.type2_frames(dedup)
}

/// Free-function form of [`FusionGraph::conjugate`].
pub fn conjugate_graph(graph: &FusionGraph) -> FusionGraph {
    graph.conjugate()
}
