//! Gauge transformations `T′ = Σ U^{ab}_{α′α} U^{bc}_{β′β} U^{ca}_{γ′γ} T`.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::Rng;

use super::{CellError, CellSystem};
use crate::fusion_graph::FusionGraph;
use crate::numerics::{cis, Scalar};

/// One unitary per ordered vertex pair with at least one edge, acting on the
/// edges `a → b` in storage order. Pairs without an entry act as the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeChoice<T> {
    blocks: BTreeMap<(usize, usize), Vec<Complex<T>>>,
}

impl<T: Scalar> Default for GaugeChoice<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Scalar> GaugeChoice<T> {
    pub fn identity() -> Self {
        Self { blocks: BTreeMap::new() }
    }

    /// Diagonal gauge `e^{iθ_e}` with one phase per edge.
    pub fn from_edge_phases(graph: &FusionGraph, phases: &[T]) -> Result<Self, CellError> {
        if phases.len() != graph.edges().len() {
            return Err(CellError::ShapeMismatch(format!(
                "{} phases for {} edges",
                phases.len(),
                graph.edges().len()
            )));
        }
        let mut g = Self::identity();
        for (&(a, b), edges) in pair_blocks(graph).iter() {
            let s = edges.len();
            let mut m = vec![Complex::new(T::zero(), T::zero()); s * s];
            for (i, &e) in edges.iter().enumerate() {
                m[i * s + i] = cis(phases[e]);
            }
            g.blocks.insert((a, b), m);
        }
        Ok(g)
    }

    /// A random unitary on every vertex pair (Gram–Schmidt on a random
    /// complex matrix, so multi-edge blocks mix their edges).
    pub fn random<R: Rng>(graph: &FusionGraph, rng: &mut R) -> Self {
        let mut g = Self::identity();
        for (&(a, b), edges) in pair_blocks(graph).iter() {
            g.blocks.insert((a, b), random_unitary(edges.len(), rng));
        }
        g
    }

    /// Install the unitary for the pair `(a, b)`, row-major `s × s`.
    pub fn set_block(&mut self, graph: &FusionGraph, a: usize, b: usize, m: Vec<Complex<T>>) -> Result<(), CellError> {
        let s = graph.edges_between(a, b).len();
        if s == 0 || m.len() != s * s {
            return Err(CellError::ShapeMismatch(format!(
                "pair ({a},{b}) has {s} edges but the block has {} entries",
                m.len()
            )));
        }
        self.blocks.insert((a, b), m);
        Ok(())
    }

    pub fn block(&self, a: usize, b: usize) -> Option<&[Complex<T>]> {
        self.blocks.get(&(a, b)).map(Vec::as_slice)
    }

    /// Check block shapes against the graph and unitarity to `tol`.
    pub fn validate(&self, graph: &FusionGraph, tol: T) -> Result<(), CellError> {
        for (&(a, b), m) in &self.blocks {
            let s = graph.edges_between(a, b).len();
            if m.len() != s * s || s == 0 {
                return Err(CellError::ShapeMismatch(format!("block ({a},{b}) does not match {s} edges")));
            }
            for i in 0..s {
                for j in 0..s {
                    let mut dot = Complex::new(T::zero(), T::zero());
                    for k in 0..s {
                        dot += m[i * s + k] * m[j * s + k].conj();
                    }
                    let want = if i == j { T::one() } else { T::zero() };
                    if (dot - Complex::new(want, T::zero())).norm() > tol {
                        return Err(CellError::ShapeMismatch(format!("block ({a},{b}) is not unitary")));
                    }
                }
            }
        }
        Ok(())
    }

    fn entry(&self, a: usize, b: usize, row: usize, col: usize, s: usize) -> Complex<T> {
        match self.blocks.get(&(a, b)) {
            Some(m) => m[row * s + col],
            None if row == col => Complex::new(T::one(), T::zero()),
            None => Complex::new(T::zero(), T::zero()),
        }
    }
}

fn pair_blocks(graph: &FusionGraph) -> BTreeMap<(usize, usize), Vec<usize>> {
    let mut out: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, e) in graph.edges().iter().enumerate() {
        out.entry((e.from, e.to)).or_default().push(i);
    }
    out
}

fn random_unitary<T: Scalar, R: Rng>(s: usize, rng: &mut R) -> Vec<Complex<T>> {
    loop {
        let mut rows: Vec<Vec<Complex<T>>> = (0..s)
            .map(|_| {
                (0..s)
                    .map(|_| Complex::new(T::of(rng.gen_range(-1.0..1.0)), T::of(rng.gen_range(-1.0..1.0))))
                    .collect()
            })
            .collect();
        let mut ok = true;
        for i in 0..s {
            for j in 0..i {
                let dot = rows[i]
                    .iter()
                    .zip(&rows[j])
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + *x * y.conj());
                let rj = rows[j].clone();
                for (x, y) in rows[i].iter_mut().zip(&rj) {
                    *x -= dot * *y;
                }
            }
            let norm = rows[i].iter().fold(T::zero(), |acc, x| acc + x.norm_sqr()).sqrt();
            if norm.to_f64_lossy() < 1e-6 {
                ok = false;
                break;
            }
            for x in rows[i].iter_mut() {
                *x /= norm;
            }
        }
        if ok {
            return rows.into_iter().flatten().collect();
        }
    }
}

/// Transform every cell by the gauge; all Type I and Type II residuals are
/// covariant, so verified systems stay verified.
pub fn apply_gauge<T: Scalar>(cells: &CellSystem<T>, gauge: &GaugeChoice<T>) -> Result<CellSystem<T>, CellError> {
    let graph = cells.graph();
    for (&(a, b), m) in &gauge.blocks {
        let s = graph.edges_between(a, b).len();
        if s == 0 || m.len() != s * s {
            return Err(CellError::ShapeMismatch(format!("block ({a},{b}) does not match {s} edges")));
        }
    }
    let mut pos = vec![0usize; graph.edges().len()];
    for edges in pair_blocks(graph).values() {
        for (i, &e) in edges.iter().enumerate() {
            pos[e] = i;
        }
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = Vec::with_capacity(graph.triangles().len());
    for t in graph.triangles() {
        let [a, b, c] = t.vertices;
        let [x, y, z] = t.edges;
        let (eab, ebc, eca) = (graph.edges_between(a, b), graph.edges_between(b, c), graph.edges_between(c, a));
        let (sab, sbc, sca) = (eab.len(), ebc.len(), eca.len());
        let mut acc = zero;
        for &al in eab {
            let u1 = gauge.entry(a, b, pos[x], pos[al], sab);
            if u1 == zero {
                continue;
            }
            for &be in ebc {
                let u2 = gauge.entry(b, c, pos[y], pos[be], sbc);
                if u2 == zero {
                    continue;
                }
                for &ga in eca {
                    let u3 = gauge.entry(c, a, pos[z], pos[ga], sca);
                    if u3 == zero {
                        continue;
                    }
                    let v = cells.value([al, be, ga]).expect("edges of a triangle close up");
                    acc += u1 * u2 * u3 * v;
                }
            }
        }
        out.push(acc);
    }
    cells.with_values(out)
}
