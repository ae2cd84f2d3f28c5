//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};

use common::*;
use num_complex::Complex64;
use qcells::cell_system::{apply_gauge, gauge_invariants, CellSystem, GaugeChoice, InvariantReport};
use qcells::fusion_graph::{builtin_graph, catalog, Degeneracy};
use qcells::fusion_ring::{fusion_matrices, nimrep_check};
use qcells::hecke::check_hecke_relations;
use qcells::solver::{certify_infeasible_z9, solve, solve_moduli, verify, SolveOptions, SolveReport, SolveStatus};
use qcells::{Altitude, Context, DoubleDouble};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Collects comparisons; a criterion passes when none failed.
#[derive(Default)]
struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
    worst: f64,
    count: usize,
}

impl Check {
    fn close(&mut self, label: impl AsRef<str>, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs();
        self.count += 1;
        if err > self.worst || err.is_nan() {
            self.worst = err;
        }
        if !(err <= tol) {
            self.failures.push(format!("{}: got {got:.15e}, want {want:.15e}, err {err:.2e} > {tol:e}", label.as_ref()));
        }
    }

    fn below(&mut self, label: impl AsRef<str>, got: f64, tol: f64) {
        self.close(label, got, 0.0, tol);
    }

    fn above(&mut self, label: impl AsRef<str>, got: f64, floor: f64) {
        self.count += 1;
        if !(got > floor) {
            self.failures.push(format!("{}: {got:e} is not above {floor:e}", label.as_ref()));
        }
    }

    fn exact<T: PartialEq + std::fmt::Debug>(&mut self, label: impl AsRef<str>, got: T, want: T) {
        self.count += 1;
        if got != want {
            self.failures.push(format!("{}: got {got:?}, want {want:?}", label.as_ref()));
        }
    }

    fn that(&mut self, label: impl AsRef<str>, ok: bool) {
        self.count += 1;
        if !ok {
            self.failures.push(label.as_ref().to_string());
        }
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

fn solved(name: &str, restarts: usize) -> SolveReport<f64> {
    let g = graph(name);
    let opts = SolveOptions { restarts, ..SolveOptions::default() };
    solve(g.clone(), Context::from_altitude(g.altitude()), &opts).unwrap()
}

fn cells_of<'a>(name: &str, r: &'a SolveReport<f64>) -> &'a CellSystem<f64> {
    assert_eq!(r.status, SolveStatus::Solved, "{name}: {}", r.message);
    r.cells.as_ref().unwrap()
}

fn q_numbers(c: &mut Check) {
    let at = |k: u32| Context::from_altitude(Altitude::Finite(k));
    let (r2, r3) = (2f64.sqrt(), 3f64.sqrt());
    c.close("[2]_8", at(8).qint(2), (2.0 + r2).sqrt(), 1e-12);
    c.close("[3]_8", at(8).qint(3), 1.0 + r2, 1e-12);
    c.close("[3]_12", at(12).qint(3), 1.0 + r3, 1e-12);
}

fn counts(c: &mut Check) {
    let e5 = builtin_graph("E5").unwrap();
    c.exact("E5 triangles", e5.triangles().len(), 14);
    c.exact("E5 Type I", e5.type1_vertex_pairs(), 24);
    let raw = e5.type2_frames(false);
    c.exact("E5 Type II raw", raw.len(), 108);
    let split = [Degeneracy::Doubly, Degeneracy::Singly, Degeneracy::NonDegenerate]
        .map(|d| raw.iter().filter(|f| f.degeneracy() == d).count());
    c.exact("E5 degeneracy split", split, [24, 72, 12]);
    let e9 = builtin_graph("E9").unwrap();
    c.exact("E9 triangles", e9.triangles().len(), 22);
    c.exact("E9 Type I", e9.type1_vertex_pairs(), 24);
    let e21 = builtin_graph("E21").unwrap();
    c.exact("E21 vertices", e21.vertex_count(), 24);
    c.exact("E21 triangles", e21.triangles().len(), 40);
    c.exact("E21 Type I", e21.type1_vertex_pairs(), 60);
    c.exact("Z9 vertices", builtin_graph("Z9").unwrap().vertex_count(), 12);
}

/// `(a + b√2 + c√3 + d√6) / 2`.
fn half_quartic(a: f64, b: f64, c: f64, d: f64) -> f64 {
    (a + b * 2f64.sqrt() + c * 3f64.sqrt() + d * 6f64.sqrt()) / 2.0
}

fn published_dimension(graph: &str, id: &str) -> f64 {
    let (s2, s3) = (2f64.sqrt(), 3f64.sqrt());
    match graph {
        "E5" if id.starts_with("1_") => 1.0,
        "E5" => 1.0 + s2,
        "E9" if id == "3_0" => 3.0 + 2.0 * s3,
        "E9" if id.starts_with("3_") => 3.0 + s3,
        "E9" if id.starts_with("0^") => 1.0,
        "E9" => 1.0 + s3,
        "E21" if id.starts_with("3_") && id.contains('^') => half_quartic(4.0, 1.0, 2.0, 1.0),
        "E21" if id.starts_with("3_") => half_quartic(4.0, 2.0, 2.0, 2.0),
        "E21" => {
            let [a, b, c, d] = match &id[..2] {
                "1_" => [2.0, 0.0, 0.0, 0.0],
                "2_" => [2.0, 1.0, 0.0, 1.0],
                "4_" => [6.0, 5.0, 4.0, 3.0],
                "5_" => [4.0, 3.0, 2.0, 1.0],
                "6_" => [4.0, 4.0, 2.0, 2.0],
                "7_" => [6.0, 4.0, 4.0, 2.0],
                _ => panic!("no published dimension for {id}"),
            };
            half_quartic(a, b, c, d)
        }
        _ => panic!("no published dimensions for {graph}"),
    }
}

fn dimensions(c: &mut Check) {
    for name in ["E5", "E9", "E21"] {
        let g = builtin_graph(name).unwrap();
        let ctx = Context::from_altitude(g.altitude());
        let d = g.pf_dimensions(&ctx).unwrap();
        c.close(format!("{name} eigenvalue"), d.eigenvalue, ctx.qint(3), 1e-9);
        for (i, v) in g.vertices().iter().enumerate() {
            c.close(format!("{name} {}", v.id), d.values[i], published_dimension(name, &v.id), 1e-9);
        }
    }
}

fn alcove(c: &mut Check) {
    for level in 1..=6u32 {
        let g = graph(&format!("A_{level}"));
        let m = solve_moduli(&g, &Context::from_altitude(g.altitude()), &SolveOptions::default()).unwrap();
        let kappa = (level + 3) as f64;
        for t in 0..g.triangles().len() {
            let a = catalog::alcove_cell(&g, t).unwrap();
            let want = alcove_closed_form(kappa, a.up, a.k, a.l);
            c.close(format!("A_{level} {}", g.triangle_label(t)), m.x[t], want, 1e-9);
        }
    }
    let g = graph("A_inf_3");
    let m = solve_moduli(&g, &Context::from_altitude(Altitude::Infinite), &SolveOptions::default()).unwrap();
    let mut first: Vec<f64> = (0..g.triangles().len()).filter(|&t| m.determined[t]).map(|t| m.x[t]).collect();
    first.sort_by(f64::total_cmp);
    first.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    for (i, want) in [6.0, 12.0, 36.0, 60.0].into_iter().enumerate() {
        c.close(format!("classical cell {i}"), first.get(i).copied().unwrap_or(f64::NAN), want, 1e-12);
    }
    for level in 2..=4u32 {
        let kappa = (level + 3) as f64;
        let q = |n: u32| qn(kappa, n as f64);
        let rejected = |k: u32, l: u32| q(k + 1) * q(k + l + 3) / (q(k + 2) * q(k + l + 2));
        let bad = alcove_from_ratio(level, rejected);
        c.above(format!("A_{level} rejected branch"), doubly_degenerate_max(&bad), 1e-6);
    }
}

fn e5(c: &mut Check) {
    let r2 = 2f64.sqrt();
    let report = solved("E5", 64);
    let cells = cells_of("E5", &report);
    let sq = |n: &str| cells.named(n).unwrap().norm_sqr();
    for i in 0..6 {
        c.close(format!("|tau{i}|^2"), sq(&format!("tau{i}")), (10.0 + 7.0 * r2).sqrt(), 1e-9);
        c.close(format!("|mu{i}|^2"), sq(&format!("mu{i}")), (5.0 + 3.5 * r2).sqrt(), 1e-9);
    }
    for n in ["nu0", "nu1"] {
        c.close(format!("|{n}|^2"), sq(n), (29.0 + 20.5 * r2).sqrt(), 1e-9);
    }
    let (nu0, nu1) = (cells.named("nu0").unwrap(), cells.named("nu1").unwrap());
    c.below("nu1 + nu0", (nu0 + nu1).norm(), 1e-9);
    let oct = gauge_invariants(cells).unwrap().octahedron.unwrap();
    c.close("C", oct.re, -(239.0 + 169.0 * r2) / 2.0, 1e-9);
    c.below("Im C", oct.im, 1e-9);
    let v = verify(&e5_published(), 1e-9).unwrap();
    c.that(format!("published E5 verifies (max residual {:e})", v.max_residual), v.pass);
}

fn e9(c: &mut Check) {
    let s = 1.0 + 3f64.sqrt();
    let det = 0.5 * 9.0 * s.powi(4);
    let trace = 2f64.powf(-0.5) * 3.0 * s.powi(3);
    let norm = 2f64.powf(-0.5) * 3f64.sqrt() * s.powi(3);
    let mut triples = Vec::new();
    let mut judge = |c: &mut Check, label: &str, inv: &InvariantReport| {
        let d = inv.double_edge.as_ref().unwrap();
        c.close(format!("{label} Det"), d.det, det, 1e-9);
        c.close(format!("{label} Tr"), d.trace, trace, 1e-9);
        for j in 0..3 {
            c.close(format!("{label} |c^{j}|^2"), d.c.norms[j], norm, 1e-9);
        }
        triples.push((label.to_string(), d.c.triple_product.to_complex(), d.d.triple_product.to_complex()));
    };
    for (label, cells) in [("diagonal", e9_diagonal()), ("orbifold", e9_orbifold()), ("c20 = 0", e9_c20_zero())] {
        let v = verify(&cells, 1e-9).unwrap();
        c.that(format!("{label} verifies (max residual {:e})", v.max_residual), v.pass);
        judge(c, label, &gauge_invariants(&cells).unwrap());
    }
    let report = solved("E9", 64);
    let cells = cells_of("E9", &report);
    c.below("fresh solve residual", verify(cells, 1e-8).unwrap().max_residual, 1e-8);
    judge(c, "fresh", &gauge_invariants(cells).unwrap());
    let (_, c0, d0) = triples[0];
    for (label, t, d) in &triples[1..] {
        let scale = c0.norm();
        let up_to_conj = |x: Complex64, y: Complex64| (x - y).norm().min((x - y.conj()).norm());
        c.below(format!("{label} c triple vs diagonal"), up_to_conj(*t, c0) / scale, 1e-9);
        c.below(format!("{label} d triple vs diagonal"), up_to_conj(*d, d0) / d0.norm(), 1e-9);
    }
}

fn e21(c: &mut Check) {
    let report = solved("E21", 64);
    let cells = cells_of("E21", &report);
    let g = cells.graph();
    let mut per_class: Vec<(&str, f64)> = Vec::new();
    let mut negative = Vec::new();
    for (n, t) in g.named_cells() {
        let v = cells.get(*t);
        let class = catalog::e21_cell_class(n);
        c.below(format!("Im {n}"), v.im, 1e-9);
        c.close(format!("|{n}|^2 vs table ({class})"), v.norm_sqr(), e21_table(class), 1e-9);
        per_class.push((class, v.norm_sqr()));
        if v.re < 0.0 {
            negative.push(n.clone());
        }
    }
    negative.sort();
    c.exact("negative cells", negative.len(), 3);
    c.that(
        format!("negatives are sigma2', sigma2'' and one rho: {negative:?}"),
        negative.len() == 3
            && negative.iter().filter(|n| n.starts_with("rho")).count() == 1
            && negative.iter().any(|n| n == "sigma2'")
            && negative.iter().any(|n| n == "sigma2''"),
    );
    let v = verify(cells, 1e-9).unwrap();
    c.that(format!("E21 verifies (max residual {:e})", v.max_residual), v.pass);
    let closed = per_class.iter().map(|(k, x)| (x - e21_closed_form(k)).abs()).fold(0.0, f64::max);
    c.note(format!("all classes match the closed forms to {closed:.1e}"));
    if let Some(&(_, rho)) = per_class.iter().find(|(k, _)| *k == "rho") {
        let f = |d: f64| (11002.0 + 7779.5 * 2f64.sqrt() + 6352.0 * 3f64.sqrt() + d * 6f64.sqrt()).sqrt();
        c.note(format!(
            "rho: solved {rho:.12}, closed form [4]^2[5][7]/[2] = {:.12}; the tabulated last coefficient \
             8993/2 gives {:.12}, while 8983/2 gives {:.12}",
            e21_closed_form("rho"),
            f(4496.5),
            f(4491.5)
        ));
    }
}

fn z9(c: &mut Check) {
    let cert = certify_infeasible_z9::<DoubleDouble>();
    c.that(format!("certificate digits {}", cert.digits), cert.digits >= 30);
    c.above(format!("certified gap {}", cert.min_violation), cert.min_violation_f64, 1e-3);
    let report = solved("Z9", 200);
    c.exact("Z9 status", report.status, SolveStatus::Infeasible);
    c.exact("Z9 restarts", report.stats.count, 200);
    c.above("Z9 best residual", report.stats.best_residual, 1e-4);
}

fn nimreps(c: &mut Check) {
    for k in 1..=6 {
        let f = fusion_matrices(k);
        let ws = f.weights();
        for &(l, m) in ws {
            c.that(
                format!("N({m},{l}) = N({l},{m})^T at level {k}"),
                f.get((m, l)).unwrap() == &f.get((l, m)).unwrap().transpose(),
            );
        }
        let mut commute = true;
        for a in f.matrices() {
            for b in f.matrices() {
                commute &= a.mul(b) == b.mul(a);
            }
        }
        c.that(format!("level {k} fusion matrices commute"), commute);
    }
    for name in ["E5", "E9", "E21", "Z9"] {
        let r = nimrep_check(&builtin_graph(name).unwrap());
        c.that(format!("{name} nimrep: {}", r.message), r.pass && r.non_negative);
    }
}

fn hecke(c: &mut Check) {
    for name in ["A_2", "A_3", "E5"] {
        let report = solved(name, 64);
        let h = check_hecke_relations(cells_of(name, &report), 4);
        c.exact(format!("{name} path lengths"), h.p_max, 4);
        c.that(format!("{name} has rhombi"), !h.rhombi.is_empty());
        for (label, v) in [
            ("rhombus hermitian", h.rhombus_hermitian),
            ("rhombus U^2 = [2]U", h.rhombus_idempotent),
            ("rhombus trace", h.rhombus_trace),
            ("U_n^2 = [2]U_n", h.idempotent),
            ("far commutation", h.far_commutation),
            ("cubic", h.cubic),
            ("quartic", h.quartic),
            ("F^2 = [2][3]F", h.f_relation),
        ] {
            c.below(format!("{name} {label}"), v, 1e-8);
        }
    }
}

/// Residual of every equation, in a fixed order.
fn residuals(cells: &CellSystem<f64>) -> Vec<f64> {
    verify(cells, 1.0).unwrap().frames.iter().map(|f| f.residual).collect()
}

fn gauges(c: &mut Check) {
    for name in catalog::CATALOG {
        let cells = if let Some(level) = name.strip_prefix("A_") {
            alcove_system(level.parse().unwrap())
        } else if *name == "Z9" {
            // No solution exists; gauge a generic point instead.
            let g = graph(name);
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            let vals = (0..g.triangles().len())
                .map(|_| Complex64::new(rand::Rng::gen_range(&mut rng, 0.5..2.0), rand::Rng::gen_range(&mut rng, -1.0..1.0)))
                .collect();
            CellSystem::new(g.clone(), Context::from_altitude(g.altitude()), vals).unwrap()
        } else {
            let report = solved(name, 64);
            cells_of(name, &report).clone()
        };
        let base = residuals(&cells);
        let inv = gauge_invariants(&cells).unwrap();
        let mut worst = 0f64;
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = apply_gauge(&cells, &GaugeChoice::random(cells.graph(), &mut rng)).unwrap();
            for (a, b) in base.iter().zip(residuals(&out)) {
                worst = worst.max((a - b).abs());
            }
            worst = worst.max(invariant_distance(&inv, &gauge_invariants(&out).unwrap()));
        }
        c.below(format!("{name} residuals and invariants over 100 gauges"), worst, 1e-8);
    }
}

fn invariant_distance(a: &InvariantReport, b: &InvariantReport) -> f64 {
    let mut d = 0f64;
    if let (Some(x), Some(y)) = (&a.moduli, &b.moduli) {
        for (p, q) in x.iter().zip(y) {
            d = d.max((p.modulus - q.modulus).abs());
        }
    }
    if let (Some(x), Some(y)) = (&a.octahedron, &b.octahedron) {
        d = d.max((x.to_complex() - y.to_complex()).norm());
    }
    if let (Some(x), Some(y)) = (&a.double_edge, &b.double_edge) {
        d = d.max((x.det - y.det).abs()).max((x.trace - y.trace).abs());
        for (p, q) in [(&x.c, &y.c), (&x.d, &y.d)] {
            for j in 0..3 {
                d = d.max((p.norms[j] - q.norms[j]).abs()).max((p.overlaps[j] - q.overlaps[j]).abs());
            }
            d = d.max((p.triple_product.to_complex() - q.triple_product.to_complex()).norm());
        }
    }
    d
}

fn main() {
    let criteria: [(&str, fn(&mut Check)); 11] = [
        ("q-number regression", q_numbers),
        ("counting suite", counts),
        ("dimension suite", dimensions),
        ("A_k closed forms and branch rejection", alcove),
        ("E5 end to end", e5),
        ("E9 verification and invariants", e9),
        ("E21 table, signs and verification", e21),
        ("Z9 rejection", z9),
        ("nimrep layer", nimreps),
        ("Hecke property suite", hecke),
        ("gauge property tests", gauges),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let mut check = Check::default();
        let outcome = catch_unwind(AssertUnwindSafe(|| run(&mut check)));
        let pass = outcome.is_ok() && check.failures.is_empty();
        let summary = match &outcome {
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                format!("panicked: {msg}")
            }
            Ok(()) => format!("{} checks, worst deviation {:.2e}", check.count, check.worst),
        };
        println!("{} {:>2} {name}: {summary}", if pass { "PASS" } else { "FAIL" }, i + 1);
        for f in &check.failures {
            println!("        {f}");
        }
        for n in &check.notes {
            println!("        note: {n}");
        }
        failed += usize::from(!pass);
    }
    println!("{} of 11 criteria pass", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
