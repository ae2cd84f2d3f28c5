//! Solving the coherence system.
//!
//! Single-edge graphs go through two stages: the squared moduli from the
//! Type I and degenerate Type II equations, then the phases left free by the
//! gauge from the remaining equations. Multi-edge graphs are solved jointly
//! over all complex cells. Every stage uses seeded random restarts run in
//! parallel and reduced in restart order.

mod canonical;
mod lm;
mod problems;
mod z9;

use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cell_system::equations::Equation;
use crate::cell_system::{gauge_invariants, CellError, CellFile, CellSystem, EquationKind, EquationSet, InvariantReport, Selection};
use crate::fusion_graph::{FusionGraph, GraphError};
use crate::numerics::{RootOfUnityContext, Scalar};

pub use canonical::{canonical_gauge, canonicalize, gauge_priority, pivot_cells};
pub use z9::{certify_infeasible_z9, z9_roots, BranchAssignment, Z9Certificate};

use lm::{levenberg_marquardt, LmSettings};
use problems::{pack, unpack, ComplexProblem, ModuliProblem, ModulusEquation, PhaseProblem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("infeasible: best residual {best_residual:.3e} over {restarts} restarts")]
    Infeasible { best_residual: f64, restarts: usize },
    #[error("inconclusive: {reason} (best residual {best_residual:.3e})")]
    Inconclusive { best_residual: f64, reason: String },
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveOptions {
    pub restarts: usize,
    pub seed: u64,
    /// `ε_solve`: a system is solved when every residual is below this.
    pub tolerance: f64,
    /// `θ_inf`: a best residual above this is reported as infeasible.
    pub infeasible_threshold: f64,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { restarts: 64, seed: 0, tolerance: 1e-9, infeasible_threshold: 1e-4, max_iterations: 500 }
    }
}

impl SolveOptions {
    fn lm(&self) -> LmSettings {
        LmSettings { max_iterations: self.max_iterations, target: self.tolerance * 1e-4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolveStatus {
    Solved,
    Infeasible,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartStats {
    pub count: usize,
    pub converged: usize,
    pub best_residual: f64,
    pub best_restart: Option<usize>,
    pub seed: u64,
}

/// Squared moduli `x_t = |T_t|²` of a single-edge graph.
#[derive(Debug, Clone)]
pub struct ModuliSolution<T> {
    pub x: Vec<T>,
    /// False for cells no complete equation constrains (truncated graphs).
    pub determined: Vec<bool>,
    pub max_residual: T,
    /// Distinct converged solutions, best first.
    pub branches: Vec<Vec<T>>,
    pub stats: RestartStats,
}

#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub graph: String,
    pub status: SolveStatus,
    pub cells: Option<CellSystem<T>>,
    pub max_residual: f64,
    pub stats: RestartStats,
    pub invariants: Option<InvariantReport>,
    /// Distinct values of the `c` triple product among converged restarts,
    /// which separates gauge-inequivalent solutions on double-edge graphs.
    pub alternatives: Vec<crate::cell_system::ComplexValue>,
    pub message: String,
}

impl<T: Scalar> SolveReport<T> {
    /// Machine form: status, residual, restart statistics, seed, invariants
    /// and the cells in cell-file layout.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "graph": self.graph,
            "status": self.status,
            "max_residual": self.max_residual,
            "restarts": self.stats,
            "seed": self.stats.seed,
            "invariants": self.invariants,
            "alternatives": self.alternatives,
            "message": self.message,
            "cells": self.cells.as_ref().map(|c| CellFile::from_cells(c).cells),
        })
    }
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(restart as u64);
    r
}

/// Run `f` once per restart in parallel and keep results in restart order.
fn run_restarts<T: Scalar, F>(opts: &SolveOptions, f: F) -> Vec<lm::LmOutcome<T>>
where
    F: Fn(&mut ChaCha8Rng) -> lm::LmOutcome<T> + Sync,
{
    (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|i| f(&mut restart_rng(opts.seed, i)))
        .collect()
}

fn best_of<T: Scalar>(runs: &[lm::LmOutcome<T>]) -> usize {
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        let (a, b) = (r.max_residual, runs[best].max_residual);
        if a < b || (b.is_nan() && !a.is_nan()) {
            best = i;
        }
    }
    best
}

fn stats<T: Scalar>(runs: &[lm::LmOutcome<T>], best: usize, tol: f64, seed: u64) -> RestartStats {
    RestartStats {
        count: runs.len(),
        converged: runs.iter().filter(|r| r.max_residual.to_f64_lossy() < tol).count(),
        best_residual: runs[best].max_residual.to_f64_lossy(),
        best_restart: Some(best),
        seed,
    }
}

/// Level `l + m` of every vertex on a truncated alcove.
fn levels(graph: &FusionGraph) -> Option<(Vec<u32>, u32)> {
    let t = graph.truncation()?;
    Some((graph.weights()?.iter().map(|&(l, m)| l + m).collect(), t))
}

/// Equations whose frames lie away from the truncation boundary, so that
/// every apex they sum over is present. All of them on untruncated graphs.
pub fn complete_equations<T: Scalar>(graph: &FusionGraph, set: &EquationSet<T>) -> Vec<Equation<T>> {
    let Some((lv, top)) = levels(graph) else {
        return set.equations.clone();
    };
    let inside = |vs: &[usize]| vs.iter().all(|&v| lv[v] < top);
    set.equations
        .iter()
        .filter(|e| match e.kind {
            EquationKind::TypeI { .. } => {
                let f = &set.type1_frames[e.frame];
                inside(&[f.a, f.b])
            }
            EquationKind::TypeII(_) => inside(&set.type2_frames[e.frame].vertices),
        })
        .cloned()
        .collect()
}

/// Upper bound `min [2] μ_a μ_b` over the edges of each triangle, which the
/// diagonal Type I equations impose on `|T|²`.
fn modulus_bounds<T: Scalar>(graph: &FusionGraph, dims: &[T], q2: T) -> Vec<T> {
    graph
        .triangles()
        .iter()
        .map(|t| {
            let [a, b, c] = t.vertices;
            let e = |x: usize, y: usize| q2 * dims[x] * dims[y];
            e(a, b).min(e(b, c)).min(e(c, a))
        })
        .collect()
}

fn verdict(best: f64, opts: &SolveOptions, restarts: usize) -> Result<(), SolveError> {
    if best < opts.tolerance {
        Ok(())
    } else if best > opts.infeasible_threshold || best.is_nan() {
        Err(SolveError::Infeasible { best_residual: best, restarts })
    } else {
        Err(SolveError::Inconclusive {
            best_residual: best,
            reason: "residual floor between the solve tolerance and the infeasibility threshold".into(),
        })
    }
}

/// Squared moduli from the diagonal Type I and degenerate Type II equations.
///
/// Truncated alcoves are solved by peeling: a complete Type I equation with a
/// single unknown determines it, and this repeats until nothing changes.
pub fn solve_moduli<T: Scalar>(
    graph: &FusionGraph,
    ctx: &RootOfUnityContext<T>,
    opts: &SolveOptions,
) -> Result<ModuliSolution<T>, SolveError> {
    if !graph.is_single_edged() {
        return Err(SolveError::Inconclusive {
            best_residual: f64::NAN,
            reason: format!("`{}` has multiple edges; moduli couple to phases, use the joint solve", graph.name()),
        });
    }
    let dims = graph.dimensions(ctx)?.values;
    let q2 = ctx.qint(2);
    let n = graph.triangles().len();
    let set = EquationSet::build(graph, &dims, q2, Selection::MODULI)?;
    let equations: Vec<ModulusEquation<T>> = complete_equations(graph, &set)
        .iter()
        .filter_map(ModulusEquation::from_equation)
        .collect();
    if graph.truncation().is_some() {
        return Ok(peel(n, &equations, opts.seed));
    }
    let problem = ModuliProblem { n, equations };
    let bounds = modulus_bounds(graph, &dims, q2);
    let runs = run_restarts(opts, |rng| {
        let x0 = bounds.iter().map(|&b| b * T::of(rng.gen_range(1e-3..1.0))).collect();
        levenberg_marquardt(&problem, x0, opts.lm())
    });
    let best = best_of(&runs);
    let st = stats(&runs, best, opts.tolerance, opts.seed);
    verdict(st.best_residual, opts, runs.len())?;
    let mut branches: Vec<Vec<T>> = vec![runs[best].params.clone()];
    for r in &runs {
        if r.max_residual.to_f64_lossy() >= opts.tolerance {
            continue;
        }
        let fresh = branches.iter().all(|b| {
            b.iter().zip(&r.params).any(|(u, v)| (*u - *v).abs().to_f64_lossy() > 1e-6 * (1.0 + u.abs().to_f64_lossy()))
        });
        if fresh {
            branches.push(r.params.clone());
        }
    }
    Ok(ModuliSolution {
        x: runs[best].params.clone(),
        determined: vec![true; n],
        max_residual: runs[best].max_residual,
        branches,
        stats: st,
    })
}

fn peel<T: Scalar>(n: usize, equations: &[ModulusEquation<T>], seed: u64) -> ModuliSolution<T> {
    let linear: Vec<&ModulusEquation<T>> =
        equations.iter().filter(|e| e.terms.iter().all(|(_, f)| f.len() == 1)).collect();
    let mut x = vec![T::zero(); n];
    let mut known = vec![false; n];
    loop {
        let mut progress = false;
        for e in &linear {
            let unknown: Vec<usize> = e.unknowns().filter(|&t| !known[t]).collect();
            if unknown.len() != 1 {
                continue;
            }
            let t = unknown[0];
            let (mut rest, mut coef) = (e.rhs, T::zero());
            for (c, f) in &e.terms {
                if f[0] as usize == t {
                    coef += *c;
                } else {
                    rest -= *c * x[f[0] as usize];
                }
            }
            x[t] = rest / coef;
            known[t] = true;
            progress = true;
        }
        if !progress {
            break;
        }
    }
    let max_residual = equations
        .iter()
        .filter(|e| e.unknowns().all(|t| known[t]))
        .map(|e| e.residual(&x).abs())
        .fold(T::zero(), T::max);
    let st = RestartStats {
        count: 0,
        converged: 0,
        best_residual: max_residual.to_f64_lossy(),
        best_restart: None,
        seed,
    };
    ModuliSolution { branches: vec![x.clone()], x, determined: known, max_residual, stats: st }
}

fn report_from_error<T>(graph: &FusionGraph, err: SolveError, seed: u64, restarts: usize) -> SolveReport<T> {
    let (status, best) = match &err {
        SolveError::Infeasible { best_residual, .. } => (SolveStatus::Infeasible, *best_residual),
        SolveError::Inconclusive { best_residual, .. } => (SolveStatus::Inconclusive, *best_residual),
        _ => (SolveStatus::Inconclusive, f64::NAN),
    };
    SolveReport {
        graph: graph.name().to_string(),
        status,
        cells: None,
        max_residual: best,
        stats: RestartStats { count: restarts, converged: 0, best_residual: best, best_restart: None, seed },
        invariants: None,
        alternatives: Vec::new(),
        message: err.to_string(),
    }
}

/// Phases of a single-edge graph with known moduli. Pinned cells are real
/// positive; the phases of the remaining cells minimise every equation that
/// touches them.
pub fn solve_phases<T: Scalar>(
    graph: Arc<FusionGraph>,
    ctx: RootOfUnityContext<T>,
    moduli: &ModuliSolution<T>,
    opts: &SolveOptions,
) -> Result<SolveReport<T>, SolveError> {
    let zero_tol = T::of(opts.tolerance);
    let base: Vec<Complex<T>> = moduli
        .x
        .iter()
        .map(|&x| Complex::new(if x > zero_tol { x.sqrt() } else { T::zero() }, T::zero()))
        .collect();
    let template = CellSystem::new(graph.clone(), ctx, base.clone())?;
    let all = template.equations(Selection::FULL)?;
    let equations = complete_equations(&graph, &all);
    let nonzero: Vec<bool> = base.iter().map(|z| z.re > T::zero()).collect();
    let (_, free) = pivot_cells(&graph, &nonzero);
    let touching: Vec<&Equation<T>> = equations.iter().filter(|e| free.iter().any(|&t| e.touches(t))).collect();
    let (cells, st) = if free.is_empty() || touching.is_empty() {
        (base, moduli.stats.clone())
    } else {
        let problem = PhaseProblem { base, free: free.clone(), equations: touching };
        let runs = run_restarts(opts, |rng| {
            let p0 = (0..free.len()).map(|_| T::of(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))).collect();
            levenberg_marquardt(&problem, p0, opts.lm())
        });
        let best = best_of(&runs);
        (problem.cells(&runs[best].params), stats(&runs, best, opts.tolerance, opts.seed))
    };
    let cells = canonicalize(&template.with_values(cells)?, zero_tol)?;
    finish(cells, &equations, st, Vec::new(), opts)
}

fn finish<T: Scalar>(
    cells: CellSystem<T>,
    equations: &[Equation<T>],
    stats: RestartStats,
    alternatives: Vec<crate::cell_system::ComplexValue>,
    opts: &SolveOptions,
) -> Result<SolveReport<T>, SolveError> {
    let max = equations
        .iter()
        .map(|e| e.residual(cells.values()).norm().to_f64_lossy())
        .fold(0.0, |m: f64, r| if r > m || r.is_nan() { r } else { m });
    let status = match verdict(max, opts, stats.count) {
        Ok(()) => SolveStatus::Solved,
        Err(SolveError::Infeasible { .. }) => SolveStatus::Infeasible,
        Err(_) => SolveStatus::Inconclusive,
    };
    let message = match status {
        SolveStatus::Solved => format!("all {} equations below {:.1e}", equations.len(), opts.tolerance),
        _ => format!("best residual {max:.3e} over {} restarts", stats.count),
    };
    Ok(SolveReport {
        graph: cells.graph().name().to_string(),
        status,
        invariants: gauge_invariants(&cells).ok(),
        cells: (status == SolveStatus::Solved).then_some(cells),
        max_residual: max,
        stats,
        alternatives,
        message,
    })
}

/// Joint minimisation over all complex cells, used on multi-edge graphs.
pub fn solve_joint<T: Scalar>(
    graph: Arc<FusionGraph>,
    ctx: RootOfUnityContext<T>,
    opts: &SolveOptions,
) -> Result<SolveReport<T>, SolveError> {
    let template = CellSystem::zeros(graph.clone(), ctx)?;
    let all = template.equations(Selection::FULL)?;
    let equations = complete_equations(&graph, &all);
    let n = graph.triangles().len();
    let problem = ComplexProblem { n, equations: &equations };
    let bounds = modulus_bounds(&graph, template.dims(), template.q2());
    let settings = LmSettings { max_iterations: opts.max_iterations * 4, ..opts.lm() };
    let runs = run_restarts(opts, |rng| {
        let cells: Vec<Complex<T>> = bounds
            .iter()
            .map(|&b| {
                let r = (b * T::of(rng.gen_range(0.05..1.0))).sqrt();
                Complex::from_polar(r, T::of(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)))
            })
            .collect();
        levenberg_marquardt(&problem, pack(&cells), settings)
    });
    let best = best_of(&runs);
    let st = stats(&runs, best, opts.tolerance, opts.seed);
    let zero_tol = T::of(opts.tolerance);
    let mut alternatives: Vec<crate::cell_system::ComplexValue> = Vec::new();
    for r in runs.iter().filter(|r| r.max_residual.to_f64_lossy() < opts.tolerance) {
        let sys = template.with_values(unpack(&r.params))?;
        if let Some(d) = gauge_invariants(&sys).ok().and_then(|i| i.double_edge) {
            let z = d.c.triple_product;
            let fresh = alternatives.iter().all(|w| (w.to_complex() - z.to_complex()).norm() > 1e-6 * (1.0 + z.norm()));
            if fresh {
                alternatives.push(z);
            }
        }
    }
    let cells = canonicalize(&template.with_values(unpack(&runs[best].params))?, zero_tol)?;
    finish(cells, &equations, st, alternatives, opts)
}

/// Solve a graph end to end. Never fails on numerical grounds: infeasible
/// and inconclusive outcomes are reported through the status.
pub fn solve<T: Scalar>(
    graph: Arc<FusionGraph>,
    ctx: RootOfUnityContext<T>,
    opts: &SolveOptions,
) -> Result<SolveReport<T>, SolveError> {
    if graph.triangles().is_empty() {
        // Without triangles only the signs of the Type I right-hand sides
        // matter, so graphs lacking a dimension vector fall back to unit ones.
        let cells = match CellSystem::zeros(graph.clone(), ctx) {
            Ok(c) => c,
            Err(_) => CellSystem::with_dims(graph.clone(), ctx, vec![T::one(); graph.vertex_count()], Vec::new()),
        };
        let eqs = cells.equations(Selection::FULL)?;
        let equations = complete_equations(&graph, &eqs);
        let st = RestartStats { count: 0, converged: 0, best_residual: 0.0, best_restart: None, seed: opts.seed };
        return finish(cells, &equations, st, Vec::new(), opts);
    }
    if graph.is_single_edged() {
        match solve_moduli(&graph, &ctx, opts) {
            Ok(m) => solve_phases(graph, ctx, &m, opts),
            Err(e @ (SolveError::Infeasible { .. } | SolveError::Inconclusive { .. })) => {
                Ok(report_from_error(&graph, e, opts.seed, opts.restarts))
            }
            Err(e) => Err(e),
        }
    } else {
        solve_joint(graph, ctx, opts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameResidual {
    pub kind: EquationKind,
    /// Index into the frame list of the equation's kind.
    pub frame: usize,
    pub label: String,
    pub residual: f64,
    /// Triangles the equation involves.
    #[serde(skip)]
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub graph: String,
    pub pass: bool,
    pub tolerance: f64,
    pub max_residual: f64,
    pub type1_max: f64,
    pub type2_max: f64,
    pub equations: usize,
    pub failing: usize,
    pub frames: Vec<FrameResidual>,
}

/// Every Type I frame (off-diagonal ones included) and every deduplicated
/// Type II frame, with `pass` iff all residuals are below `tolerance`.
pub fn verify<T: Scalar>(cells: &CellSystem<T>, tolerance: f64) -> Result<VerifyReport, CellError> {
    let g = cells.graph();
    let set = cells.equations(Selection::FULL)?;
    let equations = complete_equations(g, &set);
    let vid = |v: usize| g.vertices()[v].id.as_str();
    let eid = |e: usize| g.edges()[e].id.as_str();
    let frames: Vec<FrameResidual> = equations
        .iter()
        .map(|e| {
            let label = match e.kind {
                EquationKind::TypeI { .. } => {
                    let f = &set.type1_frames[e.frame];
                    format!("I {}->{} [{},{}]", vid(f.a), vid(f.b), eid(f.alpha), eid(f.alpha_prime))
                }
                EquationKind::TypeII(_) => {
                    let f = &set.type2_frames[e.frame];
                    let v = f.vertices.map(vid);
                    let x = f.edges.map(eid);
                    format!("II ({},{},{},{}) [{},{},{},{}]", v[0], v[1], v[2], v[3], x[0], x[1], x[2], x[3])
                }
            };
            let mut touched: Vec<usize> =
                e.terms.iter().flat_map(|t| t.factors.iter().map(|f| f.tri as usize)).collect();
            touched.sort_unstable();
            touched.dedup();
            FrameResidual {
                kind: e.kind,
                frame: e.frame,
                label,
                residual: e.residual(cells.values()).norm().to_f64_lossy(),
                cells: touched,
            }
        })
        .collect();
    let worst = |pick: fn(&EquationKind) -> bool| {
        frames
            .iter()
            .filter(|f| pick(&f.kind))
            .map(|f| f.residual)
            .fold(0.0, |m: f64, r| if r > m || r.is_nan() { r } else { m })
    };
    let type1_max = worst(|k| matches!(k, EquationKind::TypeI { .. }));
    let type2_max = worst(|k| matches!(k, EquationKind::TypeII(_)));
    let max_residual = if type1_max.is_nan() || type2_max.is_nan() { f64::NAN } else { type1_max.max(type2_max) };
    let failing = frames.iter().filter(|f| !(f.residual < tolerance)).count();
    Ok(VerifyReport {
        graph: g.name().to_string(),
        pass: failing == 0,
        tolerance,
        max_residual,
        type1_max,
        type2_max,
        equations: frames.len(),
        failing,
        frames,
    })
}
