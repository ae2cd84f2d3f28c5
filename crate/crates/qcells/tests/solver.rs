mod common;

use std::sync::Arc;

use common::*;
use qcells::cell_system::{apply_gauge, gauge_invariants, CellSystem, GaugeChoice};
use num_traits::Float;
use qcells::fusion_graph::{catalog, Edge, FusionGraph, Vertex};
use qcells::numerics::Scalar;
use qcells::solver::{
    certify_infeasible_z9, solve, solve_moduli, solve_phases, verify, z9_roots, SolveOptions, SolveReport,
    SolveStatus,
};
use qcells::{Altitude, Context, DoubleDouble};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-9;

fn solved(name: &str) -> SolveReport<f64> {
    let g = graph(name);
    let r = solve(g.clone(), Context::from_altitude(g.altitude()), &SolveOptions::default()).unwrap();
    assert_eq!(r.status, SolveStatus::Solved, "{name}: {}", r.message);
    r
}

fn cells_of(r: &SolveReport<f64>) -> &CellSystem<f64> {
    r.cells.as_ref().unwrap()
}

#[test]
fn e5_moduli() {
    let g = graph("E5");
    let m = solve_moduli(&g, &Context::from_altitude(g.altitude()), &SolveOptions::default()).unwrap();
    let r2 = 2f64.sqrt();
    let x = |n: &str| m.x[g.named_cell(n).unwrap()];
    for i in 0..6 {
        assert!((x(&format!("tau{i}")) - (10.0 + 7.0 * r2).sqrt()).abs() < EPS);
        assert!((x(&format!("mu{i}")) - (5.0 + 3.5 * r2).sqrt()).abs() < EPS);
    }
    for n in ["nu0", "nu1"] {
        assert!((x(n) - (29.0 + 20.5 * r2).sqrt()).abs() < EPS);
    }
}

#[test]
fn e5_solution() {
    let r = solved("E5");
    assert!(r.max_residual < 1e-9);
    let c = cells_of(&r);
    let (nu0, nu1) = (c.named("nu0").unwrap(), c.named("nu1").unwrap());
    assert!((nu0 + nu1).norm() < 1e-9);
    for (n, t) in c.graph().named_cells() {
        let v = c.get(*t);
        assert!(v.im.abs() < 1e-9, "{n}");
        if n != "nu1" {
            assert!(v.re > 0.0, "{n}");
        }
    }
    let oct = r.invariants.unwrap().octahedron.unwrap();
    assert!((oct.re + (239.0 + 169.0 * 2f64.sqrt()) / 2.0).abs() < 1e-8);
}

#[test]
fn alcove_moduli_match_the_closed_forms() {
    for level in 1..=6u32 {
        let g = graph(&format!("A_{level}"));
        let m = solve_moduli(&g, &Context::from_altitude(g.altitude()), &SolveOptions::default()).unwrap();
        let kappa = (level + 3) as f64;
        for t in 0..g.triangles().len() {
            let c = catalog::alcove_cell(&g, t).unwrap();
            let expect = alcove_closed_form(kappa, c.up, c.k, c.l);
            assert!((m.x[t] - expect).abs() < EPS * expect.max(1.0), "A_{level} {c:?}");
        }
    }
}

#[test]
fn alcove_solutions_are_real_positive() {
    for level in 1..=5u32 {
        let r = solved(&format!("A_{level}"));
        for v in cells_of(&r).values() {
            assert!(v.re > 0.0 && v.im.abs() < 1e-9);
        }
    }
}

#[test]
fn classical_alcove_first_cells() {
    let g = graph("A_inf_3");
    let ctx = Context::from_altitude(Altitude::Infinite);
    let m = solve_moduli(&g, &ctx, &SolveOptions::default()).unwrap();
    let mut found = Vec::new();
    for t in 0..g.triangles().len() {
        if !m.determined[t] {
            continue;
        }
        let c = catalog::alcove_cell(&g, t).unwrap();
        // q = 1: [n] = n.
        let n = |x: u32| x as f64;
        let (k, l) = (c.k, c.l);
        let common = n(k + 1) * n(k + 2) * n(l + 1) * n(k + l + 2) * n(k + l + 3) / 4.0;
        let expect = common * if c.up { n(l + 2) } else { n(l) };
        assert!((m.x[t] - expect).abs() < 1e-9);
        found.push(m.x[t].round() as i64);
    }
    found.sort_unstable();
    found.dedup();
    assert_eq!(&found[..4], &[6, 12, 36, 60]);
}

#[test]
fn z9_is_infeasible() {
    let g = graph("Z9");
    let opts = SolveOptions { restarts: 200, ..SolveOptions::default() };
    let r = solve(g.clone(), Context::from_altitude(g.altitude()), &opts).unwrap();
    assert_eq!(r.status, SolveStatus::Infeasible);
    assert!(r.cells.is_none());
    assert_eq!(r.stats.count, 200);
    assert!(r.stats.best_residual >= opts.infeasible_threshold);
}

#[test]
fn e21_solution() {
    let r = solved("E21");
    let c = cells_of(&r);
    let mut negative = Vec::new();
    for (n, t) in c.graph().named_cells() {
        let v = c.get(*t);
        assert!(v.im.abs() < 1e-9, "{n}");
        let expect = e21_closed_form(catalog::e21_cell_class(n));
        assert!((v.norm_sqr() - expect).abs() < 1e-8 * expect, "{n}");
        if v.re < 0.0 {
            negative.push(n.as_str());
        }
    }
    negative.sort_unstable();
    assert_eq!(negative.len(), 3);
    assert_eq!(&negative[1..], &["sigma2'", "sigma2''"]);
    assert!(negative[0] == "rho'" || negative[0] == "rho''");
}

#[test]
fn e9_solution_is_gauge_equivalent_to_the_published_one() {
    let r = solved("E9");
    let inv = r.invariants.as_ref().unwrap().double_edge.clone().unwrap();
    let base = gauge_invariants(&e9_diagonal()).unwrap().double_edge.unwrap();
    assert!((inv.det - base.det).abs() < 1e-6);
    assert!((inv.trace - base.trace).abs() < 1e-7);
    for j in 0..3 {
        assert!((inv.c.norms[j] - base.c.norms[j]).abs() < 1e-7);
        assert!((inv.d.norms[j] - base.d.norms[j]).abs() < 1e-7);
    }
    let (t, b) = (inv.c.triple_product.to_complex(), base.c.triple_product.to_complex());
    let scale = b.norm();
    assert!((t - b).norm() < 1e-7 * scale || (t - b.conj()).norm() < 1e-7 * scale);
    assert!(t.im >= 0.0);
    // Both members of the conjugate pair turn up across restarts.
    assert_eq!(r.alternatives.len(), 2);
    let (x, y) = (r.alternatives[0].to_complex(), r.alternatives[1].to_complex());
    assert!((x - y.conj()).norm() < 1e-6 * scale);
}

#[test]
fn solved_reports_pass_verify() {
    for name in ["E5", "E21", "A_3", "E9"] {
        let r = solved(name);
        assert!(verify(cells_of(&r), 1e-9).unwrap().pass, "{name}");
    }
}

#[test]
fn random_gauges_keep_solutions_verified() {
    for name in ["E5", "E9"] {
        let r = solved(name);
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = cells_of(&r);
            let out = apply_gauge(c, &GaugeChoice::random(c.graph(), &mut rng)).unwrap();
            assert!(verify(&out, 10.0 * EPS).unwrap().pass, "{name} {seed}");
        }
    }
}

#[test]
fn perturbation_is_localized() {
    let mut cells = e5_published();
    let t0 = cells.graph().named_cell("tau0").unwrap();
    let v = cells.get(t0);
    cells.set(t0, v * 1.01);
    let r = verify(&cells, EPS).unwrap();
    assert!(!r.pass);
    assert!(r.failing > 0);
    for f in &r.frames {
        if f.residual >= EPS {
            assert!(f.cells.contains(&t0), "{}", f.label);
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let g = graph("E5");
    let opts = SolveOptions { seed: 7, restarts: 16, ..SolveOptions::default() };
    let run = || solve(g.clone(), Context::from_altitude(g.altitude()), &opts).unwrap().to_json();
    let a = run();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(run);
    assert_eq!(a, b);
    assert_eq!(a["seed"], 7);
}

#[test]
fn rejected_branch_breaks_doubly_degenerate_frames() {
    for level in 2..=4u32 {
        let kappa = (level + 3) as f64;
        let q = |n: u32| qn(kappa, n as f64);
        let mu = |k: u32, l: u32| q(k + 1) * q(l + 1) * q(k + l + 2) / q(2);
        let kept = |_k: u32, l: u32| q(l + 2) / q(l);
        let rejected = |k: u32, l: u32| q(k + 1) * q(k + l + 3) / (q(k + 2) * q(k + l + 2));
        // Both are roots of μ_{k+1,l−1} λ + μ_{k,l+1}/λ = μ_{k,l} + μ_{k+1,l}.
        for k in 0..level {
            for l in 1..level - k {
                for lam in [kept(k, l), rejected(k, l)] {
                    let lhs = mu(k + 1, l - 1) * lam + mu(k, l + 1) / lam;
                    assert!((lhs - mu(k, l) - mu(k + 1, l)).abs() < 1e-10);
                }
            }
        }
        let good = alcove_from_ratio(level, kept);
        assert!(verify(&good, EPS).unwrap().pass);
        assert!(doubly_degenerate_max(&good) < EPS);
        let bad = alcove_from_ratio(level, rejected);
        assert!(doubly_degenerate_max(&bad) > 1e3 * EPS, "A_{level}");
    }
    // Level one has no rhombus, so there is no root to choose.
    let g = graph("A_1");
    assert!((0..g.triangles().len()).all(|t| catalog::alcove_cell(&g, t).unwrap().l == 0));
}

#[test]
fn phase_stage_accepts_precomputed_moduli() {
    let g = graph("E5");
    let ctx = Context::from_altitude(g.altitude());
    let opts = SolveOptions::default();
    let m = solve_moduli(&g, &ctx, &opts).unwrap();
    let r = solve_phases(g, ctx, &m, &opts).unwrap();
    assert_eq!(r.status, SolveStatus::Solved);
}

#[test]
fn zero_triangle_graphs() {
    let lone = Arc::new(
        FusionGraph::new("lone", Altitude::Finite(4), 0, vec![Vertex { id: "o".into(), triality: Some(0) }], vec![])
            .unwrap(),
    );
    let r = solve(lone.clone(), Context::from_altitude(lone.altitude()), &SolveOptions::default()).unwrap();
    assert_eq!(r.status, SolveStatus::Solved);
    assert_eq!(r.cells.unwrap().values().len(), 0);
    let vs = ["x", "y"].map(|id| Vertex { id: id.into(), triality: None });
    let edge = Edge { id: "e".into(), from: 0, to: 1 };
    let open = Arc::new(FusionGraph::new("open", Altitude::Finite(4), 0, vs.to_vec(), vec![edge]).unwrap());
    let r = solve(open.clone(), Context::from_altitude(open.altitude()), &SolveOptions::default()).unwrap();
    assert_eq!(r.status, SolveStatus::Infeasible);
}

#[test]
fn z9_roots_match_the_closed_forms() {
    let (r2, r3, r6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    let [(bp, cp), (bm, cm)] = z9_roots::<f64>();
    assert!((bp - (3.0 * r2 + 3.0 - r3) / 6.0).abs() < 1e-14);
    assert!((bm - (3.0 * r2 - 3.0 + r3) / 6.0).abs() < 1e-14);
    assert!((cp - (r6 - 3.0 + r3) / 6.0).abs() < 1e-14);
    assert!((cm - (r6 + 3.0 - r3) / 6.0).abs() < 1e-14);
}

#[test]
fn z9_certificate_at_double_double() {
    type D = DoubleDouble;
    let cert = certify_infeasible_z9::<D>();
    assert!(cert.digits >= 30);
    assert_eq!(cert.assignments.len(), 8);
    // Second route: the closed-form roots, brute-forced over the eight choices.
    let (r2, r3) = (D::int(2).sqrt(), D::int(3).sqrt());
    let six = D::int(6);
    let roots = [(D::int(3) * r2 + D::int(3) - r3) / six, (D::int(3) * r2 - D::int(3) + r3) / six];
    let [(bp, _), (bm, _)] = z9_roots::<D>();
    assert!((bp - roots[0]).abs().to_f64_lossy() < 1e-29);
    assert!((bm - roots[1]).abs().to_f64_lossy() < 1e-29);
    let total = (D::int(2) + r3).sqrt();
    let mut min = D::infinity();
    for mask in 0..8 {
        let bs = [0, 1, 2].map(|j| if mask >> j & 1 == 1 { roots[0] } else { roots[1] });
        let a = total - bs[0] - bs[1] - bs[2];
        let v = (a * a + r3 * (bs[0] * bs[0] + bs[1] * bs[1] + bs[2] * bs[2]) - D::int(2)).abs();
        min = min.min(v);
    }
    assert!(min.to_f64_lossy() > 0.3);
    let second = min.to_decimal(30);
    assert_eq!(cert.min_violation[..28], second[..28]);
    let f = certify_infeasible_z9::<f64>();
    assert!((f.min_violation_f64 - cert.min_violation_f64).abs() < 1e-13);
}
