//! Gauge fixing by diagonal edge phases.
//!
//! A cell picks up `θ_α + θ_β + θ_γ` under the diagonal gauge, so the phases
//! of a set of cells can be zeroed at once exactly when their edge-incidence
//! rows are independent. Cells are taken greedily in priority order: named
//! catalog cells first in catalog order, then the rest in triangle order.

use num_complex::Complex;

use crate::cell_system::{apply_gauge, gauge_invariants, CellError, CellSystem, GaugeChoice};
use crate::fusion_graph::FusionGraph;
use crate::numerics::linalg::{solve_consistent, Matrix, RankTracker};
use crate::numerics::Scalar;

/// Triangle indices in gauge-fixing priority.
pub fn gauge_priority(graph: &FusionGraph) -> Vec<usize> {
    let mut seen = vec![false; graph.triangles().len()];
    let mut order = Vec::with_capacity(seen.len());
    for &(_, t) in graph.named_cells() {
        if !seen[t] {
            seen[t] = true;
            order.push(t);
        }
    }
    order.extend((0..seen.len()).filter(|&t| !seen[t]));
    order
}

fn incidence(graph: &FusionGraph, t: usize) -> Vec<f64> {
    let mut row = vec![0.0; graph.edges().len()];
    for &e in &graph.triangles()[t].edges {
        row[e] += 1.0;
    }
    row
}

/// Split the non-zero cells into those whose phase the gauge can zero
/// (`pinned`) and those whose phase is then gauge invariant (`free`).
pub fn pivot_cells(graph: &FusionGraph, nonzero: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let mut rank = RankTracker::new();
    let (mut pinned, mut free) = (Vec::new(), Vec::new());
    for t in gauge_priority(graph) {
        if !nonzero[t] {
            continue;
        }
        if rank.try_insert(&incidence(graph, t)) {
            pinned.push(t);
        } else {
            free.push(t);
        }
    }
    (pinned, free)
}

/// Diagonal gauge making every pinned cell real positive. Cells with modulus
/// at most `zero_tol` are treated as zero.
pub fn canonical_gauge<T: Scalar>(cells: &CellSystem<T>, zero_tol: T) -> Result<CellSystem<T>, CellError> {
    let g = cells.graph();
    let nonzero: Vec<bool> = cells.values().iter().map(|z| z.norm() > zero_tol).collect();
    let (pinned, _) = pivot_cells(g, &nonzero);
    let ne = g.edges().len();
    let mut a = Matrix::zeros(pinned.len(), ne);
    let mut b = Vec::with_capacity(pinned.len());
    for (i, &t) in pinned.iter().enumerate() {
        for &e in &g.triangles()[t].edges {
            *a.at_mut(i, e) += T::one();
        }
        let z = cells.get(t);
        b.push(-z.im.atan2_full(z.re));
    }
    let theta = solve_consistent(&a, &b);
    let mut out = apply_gauge(cells, &GaugeChoice::from_edge_phases(g, &theta)?)?;
    // Remove rounding residue on the pinned cells.
    for &t in &pinned {
        let n = out.get(t).norm();
        out.set(t, Complex::new(n, T::zero()));
    }
    Ok(out)
}

/// Canonical representative of a solution: pinned cells real positive and,
/// on graphs carrying the double-edge invariants, the member of the
/// conjugate pair whose `c` triple product has non-negative imaginary part.
pub fn canonicalize<T: Scalar>(cells: &CellSystem<T>, zero_tol: T) -> Result<CellSystem<T>, CellError> {
    let out = canonical_gauge(cells, zero_tol)?;
    let flip = match gauge_invariants(&out) {
        Ok(r) => r.double_edge.is_some_and(|d| d.c.triple_product.im < 0.0),
        Err(_) => false,
    };
    if flip {
        out.with_values(out.values().iter().map(|z| z.conj()).collect())
    } else {
        Ok(out)
    }
}
