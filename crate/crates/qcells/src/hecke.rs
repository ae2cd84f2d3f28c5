//! Hecke representations from cell systems.
//!
//! For vertices `a`, `c` the rhombus matrix acts on the length-two paths
//! `a →α b →β c`:
//! `𝒰[(b,α,β),(b′,α′,β′)] = (1/(μ_a μ_c)) Σ_γ T_{abc}^{αβγ} conj(T_{ab′c}^{α′β′γ})`
//! with `γ` running over the edges `c → a`. Acting at positions `n, n+1` of
//! longer paths gives the operators `U_n`.

use std::collections::HashMap;

use num_complex::Complex;
use serde::Serialize;
use thiserror::Error;

use crate::cell_system::{CellError, CellSystem};
use crate::numerics::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeckeError {
    #[error("no edge from `{c}` to `{a}`")]
    NotAdjacent { a: String, c: String },
    #[error("operator index {n} outside 1..={max} on paths of length {p}", max = p.saturating_sub(1))]
    IndexOutOfRange { n: usize, p: usize },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error(transparent)]
    Cell(#[from] CellError),
}

/// Dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    pub n: usize,
    pub data: Vec<Complex<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex::new(T::zero(), T::zero()); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.n + j]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * o.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| *a + *b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| *a - *b).collect() }
    }

    pub fn scale(&self, s: T) -> Self {
        Self { n: self.n, data: self.data.iter().map(|a| *a * s).collect() }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.n).fold(Complex::new(T::zero(), T::zero()), |s, i| s + self.get(i, i))
    }

    /// Largest entry modulus, the violation measure for operator identities.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |m, x| if x > m || x.is_nan() { x } else { m })
    }
}

/// `𝒰` for one vertex pair, indexed by the paths `(b, α, β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhombusMatrix<T> {
    pub a: usize,
    pub c: usize,
    pub index: Vec<(usize, usize, usize)>,
    pub matrix: CMatrix<T>,
}

impl<T: Scalar> RhombusMatrix<T> {
    pub fn size(&self) -> usize {
        self.index.len()
    }

    pub fn hermitian_violation(&self) -> T {
        self.matrix.sub(&self.matrix.adjoint()).max_abs()
    }

    /// `max |𝒰² − [2]𝒰|`.
    pub fn idempotent_violation(&self, q2: T) -> T {
        self.matrix.mul(&self.matrix).sub(&self.matrix.scale(q2)).max_abs()
    }

    pub fn trace(&self) -> Complex<T> {
        self.matrix.trace()
    }

    pub fn to_json(&self, cells: &CellSystem<T>) -> serde_json::Value {
        let g = cells.graph();
        let vid = |v: usize| g.vertices()[v].id.clone();
        let eid = |e: usize| g.edges()[e].id.clone();
        let n = self.size();
        serde_json::json!({
            "a": vid(self.a),
            "c": vid(self.c),
            "paths": self.index.iter().map(|&(b, x, y)| serde_json::json!([vid(b), eid(x), eid(y)])).collect::<Vec<_>>(),
            "re": (0..n).map(|i| (0..n).map(|j| self.matrix.get(i, j).re.to_f64_lossy()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "im": (0..n).map(|i| (0..n).map(|j| self.matrix.get(i, j).im.to_f64_lossy()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

fn two_paths(cells: &CellSystem<impl Scalar>, a: usize, c: usize) -> Vec<(usize, usize, usize)> {
    let g = cells.graph();
    let mut out = Vec::new();
    for &x in g.out_edges(a) {
        let b = g.edges()[x].to;
        for &y in g.edges_between(b, c) {
            out.push((b, x, y));
        }
    }
    out
}

/// `𝒰` without the adjacency check; a pair with no edge `c → a` gives zero.
fn rhombus<T: Scalar>(cells: &CellSystem<T>, a: usize, c: usize) -> RhombusMatrix<T> {
    let g = cells.graph();
    let index = two_paths(cells, a, c);
    let n = index.len();
    let mut m = CMatrix::zeros(n);
    let norm = T::one() / (cells.dims()[a] * cells.dims()[c]);
    let back = g.edges_between(c, a);
    for (i, &(_, x, y)) in index.iter().enumerate() {
        for (j, &(_, x2, y2)) in index.iter().enumerate() {
            let mut s = Complex::new(T::zero(), T::zero());
            for &z in back {
                let t1 = cells.value([x, y, z]).expect("closed triangle");
                let t2 = cells.value([x2, y2, z]).expect("closed triangle");
                s += t1 * t2.conj();
            }
            m.data[i * n + j] = s * norm;
        }
    }
    RhombusMatrix { a, c, index, matrix: m }
}

/// Rhombus matrix of the pair `(a, c)`; requires an edge `c → a`.
pub fn rhombus_matrix<T: Scalar>(cells: &CellSystem<T>, a: usize, c: usize) -> Result<RhombusMatrix<T>, HeckeError> {
    let g = cells.graph();
    if g.edges_between(c, a).is_empty() {
        return Err(HeckeError::NotAdjacent { a: g.vertices()[a].id.clone(), c: g.vertices()[c].id.clone() });
    }
    Ok(rhombus(cells, a, c))
}

/// Every rhombus matrix of the graph, one per pair joined by an edge `c → a`.
pub fn all_rhombus_matrices<T: Scalar>(cells: &CellSystem<T>) -> Vec<RhombusMatrix<T>> {
    let g = cells.graph();
    let mut pairs: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.to, e.from)).collect();
    pairs.sort_unstable();
    pairs.dedup();
    pairs.into_iter().map(|(a, c)| rhombus(cells, a, c)).collect()
}

/// Paths of `length` consecutive edges starting at `source`, as edge lists.
#[derive(Debug, Clone)]
pub struct PathSpace {
    pub source: usize,
    pub length: usize,
    pub paths: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl PathSpace {
    pub fn new(cells: &CellSystem<impl Scalar>, source: usize, length: usize) -> Self {
        let g = cells.graph();
        let mut paths: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..length {
            let mut next = Vec::new();
            for p in &paths {
                let at = p.last().map_or(source, |&e| g.edges()[e].to);
                for &e in g.out_edges(at) {
                    let mut q = p.clone();
                    q.push(e);
                    next.push(q);
                }
            }
            paths = next;
        }
        let index = paths.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        Self { source, length, paths, index }
    }

    pub fn dim(&self) -> usize {
        self.paths.len()
    }

    pub fn position(&self, path: &[usize]) -> Option<usize> {
        self.index.get(path).copied()
    }
}

/// `U_n` on `Path^p`: the edges at positions `n, n+1` (one-based) are
/// replaced by every path with the same ends. The coefficient taking
/// `(b,α,β)` to `(b′,α′,β′)` is `𝒰[(b,α,β),(b′,α′,β′)]`.
pub fn path_operator<T: Scalar>(
    cells: &CellSystem<T>,
    space: &PathSpace,
    n: usize,
) -> Result<CMatrix<T>, HeckeError> {
    let p = space.length;
    if n == 0 || n + 1 > p {
        return Err(HeckeError::IndexOutOfRange { n, p });
    }
    let g = cells.graph();
    let mut cache: HashMap<(usize, usize), RhombusMatrix<T>> = HashMap::new();
    let dim = space.dim();
    let mut out = CMatrix::zeros(dim);
    for (col, path) in space.paths.iter().enumerate() {
        let (x, y) = (path[n - 1], path[n]);
        let a = g.edges()[x].from;
        let c = g.edges()[y].to;
        let r = cache.entry((a, c)).or_insert_with(|| rhombus(cells, a, c));
        let Some(i) = r.index.iter().position(|&(_, u, v)| u == x && v == y) else {
            continue;
        };
        for (j, &(_, x2, y2)) in r.index.iter().enumerate() {
            let coef = r.matrix.get(i, j);
            if coef.re == T::zero() && coef.im == T::zero() {
                continue;
            }
            let mut q = path.clone();
            q[n - 1] = x2;
            q[n] = y2;
            let row = space.position(&q).expect("replacement keeps the path in the space");
            out.data[row * dim + col] += coef;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhombusCheck {
    pub a: String,
    pub c: String,
    pub size: usize,
    pub hermitian: f64,
    pub idempotent: f64,
    /// `|tr 𝒰 − [2] s_ca|`.
    pub trace: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationViolation {
    pub relation: &'static str,
    pub length: usize,
    pub source: String,
    pub n: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeckeReport {
    pub graph: String,
    pub p_max: usize,
    pub rhombi: Vec<RhombusCheck>,
    pub rhombus_hermitian: f64,
    pub rhombus_idempotent: f64,
    pub rhombus_trace: f64,
    /// `U_n² − [2] U_n`.
    pub idempotent: f64,
    /// `U_i U_j − U_j U_i` for `|i − j| ≥ 2`.
    pub far_commutation: f64,
    /// `U_n U_{n+1} U_n − U_n − (U_{n+1} U_n U_{n+1} − U_{n+1})`.
    pub cubic: f64,
    /// `(U_{n+2} U_{n+1} U_n − (U_n + U_{n+2}))(U_{n+1} U_{n+2} U_{n+1} − U_{n+1})`.
    pub quartic: f64,
    /// `F² − [2][3] F` with `F = U_n U_{n+1} U_n − U_n`.
    pub f_relation: f64,
    /// Worst location of every relation family.
    pub worst: Vec<RelationViolation>,
}

impl HeckeReport {
    pub fn max_violation(&self) -> f64 {
        [
            self.rhombus_hermitian,
            self.rhombus_idempotent,
            self.rhombus_trace,
            self.idempotent,
            self.far_commutation,
            self.cubic,
            self.quartic,
            self.f_relation,
        ]
        .into_iter()
        .fold(0.0, |m: f64, x| if x > m || x.is_nan() { x } else { m })
    }
}

struct Tracker {
    worst: HashMap<&'static str, RelationViolation>,
}

impl Tracker {
    fn note(&mut self, relation: &'static str, length: usize, source: &str, n: usize, value: f64) {
        let e = self.worst.entry(relation).or_insert(RelationViolation {
            relation,
            length,
            source: source.to_string(),
            n,
            value: 0.0,
        });
        if value > e.value || value.is_nan() {
            *e = RelationViolation { relation, length, source: source.to_string(), n, value };
        }
    }

    fn get(&self, relation: &str) -> f64 {
        self.worst.get(relation).map_or(0.0, |v| v.value)
    }
}

/// Check every rhombus matrix and the Hecke relations on `Path^p` from every
/// source vertex, for `2 ≤ p ≤ p_max`.
pub fn check_hecke_relations<T: Scalar>(cells: &CellSystem<T>, p_max: usize) -> HeckeReport {
    let g = cells.graph();
    let ctx = cells.context();
    let (q2, q3) = (ctx.qint(2), ctx.qint(3));
    let rhombi: Vec<RhombusCheck> = all_rhombus_matrices(cells)
        .iter()
        .map(|r| {
            let s = T::int(g.edges_between(r.c, r.a).len() as i64);
            RhombusCheck {
                a: g.vertices()[r.a].id.clone(),
                c: g.vertices()[r.c].id.clone(),
                size: r.size(),
                hermitian: r.hermitian_violation().to_f64_lossy(),
                idempotent: r.idempotent_violation(q2).to_f64_lossy(),
                trace: (r.trace() - Complex::new(q2 * s, T::zero())).norm().to_f64_lossy(),
            }
        })
        .collect();
    let fold = |f: fn(&RhombusCheck) -> f64| rhombi.iter().map(f).fold(0.0, |m: f64, x| if x > m || x.is_nan() { x } else { m });
    let mut tr = Tracker { worst: HashMap::new() };
    for p in 2..=p_max {
        for source in 0..g.vertex_count() {
            let space = PathSpace::new(cells, source, p);
            if space.dim() == 0 {
                continue;
            }
            let sid = g.vertices()[source].id.as_str();
            let u: Vec<CMatrix<T>> =
                (1..p).map(|n| path_operator(cells, &space, n).expect("index in range")).collect();
            for (i, ui) in u.iter().enumerate() {
                let n = i + 1;
                tr.note("idempotent", p, sid, n, ui.mul(ui).sub(&ui.scale(q2)).max_abs().to_f64_lossy());
                for (j, uj) in u.iter().enumerate().skip(i + 2) {
                    let v = ui.mul(uj).sub(&uj.mul(ui)).max_abs().to_f64_lossy();
                    tr.note("far_commutation", p, sid, n * 100 + j + 1, v);
                }
                if let Some(un1) = u.get(i + 1) {
                    let lhs = ui.mul(un1).mul(ui).sub(ui);
                    let rhs = un1.mul(ui).mul(un1).sub(un1);
                    tr.note("cubic", p, sid, n, lhs.sub(&rhs).max_abs().to_f64_lossy());
                    let f = lhs;
                    tr.note("f_relation", p, sid, n, f.mul(&f).sub(&f.scale(q2 * q3)).max_abs().to_f64_lossy());
                    if let Some(un2) = u.get(i + 2) {
                        let left = un2.mul(un1).mul(ui).sub(&ui.add(un2));
                        let right = un1.mul(un2).mul(un1).sub(un1);
                        tr.note("quartic", p, sid, n, left.mul(&right).max_abs().to_f64_lossy());
                    }
                }
            }
        }
    }
    let mut worst: Vec<RelationViolation> = tr.worst.values().cloned().collect();
    worst.sort_by(|a, b| a.relation.cmp(b.relation));
    HeckeReport {
        graph: g.name().to_string(),
        p_max,
        rhombus_hermitian: fold(|r| r.hermitian),
        rhombus_idempotent: fold(|r| r.idempotent),
        rhombus_trace: fold(|r| r.trace),
        idempotent: tr.get("idempotent"),
        far_commutation: tr.get("far_commutation"),
        cubic: tr.get("cubic"),
        quartic: tr.get("quartic"),
        f_relation: tr.get("f_relation"),
        rhombi,
        worst,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion_graph::builtin_graph;
    use crate::Context;
    use std::sync::Arc;

    #[test]
    fn matrix_algebra() {
        let mut m = CMatrix::<f64>::identity(2);
        m.data[1] = Complex::new(0.0, 1.0);
        let h = m.adjoint();
        assert_eq!(h.get(1, 0), Complex::new(0.0, -1.0));
        assert_eq!(m.mul(&CMatrix::identity(2)), m);
        assert_eq!(m.trace(), Complex::new(2.0, 0.0));
        assert_eq!(m.sub(&m).max_abs(), 0.0);
    }

    #[test]
    fn errors() {
        let g = Arc::new(builtin_graph("A_1").unwrap());
        let cells = CellSystem::zeros(g.clone(), Context::new(4).unwrap()).unwrap();
        let v = |id| g.vertex_index(id).unwrap();
        // (0,0) → (1,0) exists, so (1,0) → (0,0) does not.
        let r = rhombus_matrix(&cells, v("(0,0)"), v("(1,0)"));
        assert!(matches!(r, Err(HeckeError::NotAdjacent { .. })));
        let space = PathSpace::new(&cells, v("(0,0)"), 2);
        assert!(matches!(path_operator(&cells, &space, 2), Err(HeckeError::IndexOutOfRange { n: 2, p: 2 })));
        assert!(matches!(path_operator(&cells, &space, 0), Err(HeckeError::IndexOutOfRange { .. })));
    }

    #[test]
    fn path_space_counts() {
        let g = Arc::new(builtin_graph("E5").unwrap());
        let cells = CellSystem::zeros(g, Context::new(8).unwrap()).unwrap();
        // 1_0 → 2_1 → {1_5, 2_2, 2_5}; a 1_i has one way out, a 2_i three.
        let s = PathSpace::new(&cells, 0, 3);
        assert_eq!(s.dim(), 1 + 3 + 3);
        for (i, p) in s.paths.iter().enumerate() {
            assert_eq!(s.position(p), Some(i));
        }
    }
}
