use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use qcells::cell_system::{gauge_invariants, parse_cells, CellError, CellFile, CellRecord, CellSystem, GraphRef};
use qcells::fusion_graph::catalog::CATALOG;
use qcells::fusion_graph::{builtin_graph, parse_graph, FusionGraph, GraphError, GraphFile};
use qcells::fusion_ring::{fusion_dimension, fusion_matrices, nimrep_check};
use qcells::hecke::{check_hecke_relations, HeckeError};
use qcells::solver::{certify_infeasible_z9, solve, verify, SolveError, SolveOptions, SolveStatus};
use qcells::{DoubleDouble, NumericsError, Precision, RootOfUnityContext, Scalar};
use serde_json::{json, Value};
use thiserror::Error;

use crate::{
    CellsArgs, CertifyArgs, Command, FusionArgs, GraphAction, GraphArgs, GraphsAction, HeckeArgs, OutputArgs, Outcome,
    SolveArgs, VerifyArgs,
};

/// Everything that maps to exit code 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Graphs { action: GraphsAction::List(out) } => graphs_list(&out),
        Command::Graph { action: GraphAction::Show(args) } => {
            let p = precision(args.precision, f64::DIGITS)?;
            dispatch!(p, graph_show(&args))
        }
        Command::Solve(args) => {
            let p = precision(args.graph.precision, f64::DIGITS)?;
            dispatch!(p, run_solve(&args))
        }
        Command::Verify(args) => {
            let p = precision(args.cells.graph.precision, f64::DIGITS)?;
            dispatch!(p, run_verify(&args))
        }
        Command::Invariants(args) => {
            let p = precision(args.graph.precision, f64::DIGITS)?;
            dispatch!(p, run_invariants(&args))
        }
        Command::Hecke(args) => {
            let p = precision(args.cells.graph.precision, f64::DIGITS)?;
            dispatch!(p, run_hecke(&args))
        }
        Command::Fusion(args) => run_fusion(&args),
        Command::Nimrep(args) => run_nimrep(&args),
        Command::CertifyZ9(args) => {
            let p = precision(args.precision, DoubleDouble::DIGITS)?;
            dispatch!(p, run_certify(&args))
        }
    }
}

/// `println!` that tolerates a closed stdout, as under `| head`.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

/// Instantiate a generic command at the selected precision tier.
macro_rules! dispatch {
    ($p:expr, $f:ident($($arg:expr),*)) => {
        match $p {
            Precision::Double => $f::<f64>($($arg),*),
            Precision::DoubleDouble => $f::<DoubleDouble>($($arg),*),
        }
    };
}
use dispatch;

/// Flag, then `QCELLS_PRECISION`, then the command default.
fn precision(flag: Option<u32>, default: u32) -> Result<Precision> {
    let digits = match flag {
        Some(d) => d,
        None => match std::env::var("QCELLS_PRECISION") {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("QCELLS_PRECISION: `{s}` is not a digit count")))?,
            Err(_) => default,
        },
    };
    Ok(Precision::from_digits(digits)?)
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Catalog name first, then a graph file.
fn load_graph(selector: &str) -> Result<Arc<FusionGraph>> {
    match builtin_graph(selector) {
        Ok(g) => Ok(Arc::new(g)),
        Err(e) => {
            let path = Path::new(selector);
            if path.exists() {
                Ok(Arc::new(parse_graph(&read(path)?)?))
            } else {
                Err(e.into())
            }
        }
    }
}

/// Read a cell file, or the cells embedded in a `solve` report.
fn load_cells<T: Scalar>(graph: Arc<FusionGraph>, path: &Path) -> Result<CellSystem<T>> {
    let bytes = read(path)?;
    let value: Value = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if value.get("status").is_none() {
        return Ok(parse_cells(&bytes, Some(graph))?);
    }
    let named = value.get("graph").and_then(Value::as_str).unwrap_or_default();
    if named != graph.name() {
        return Err(CliError::Input(format!(
            "{}: report is for `{named}`, expected `{}`",
            path.display(),
            graph.name()
        )));
    }
    let records = match value.get("cells") {
        Some(Value::Array(_)) => serde_json::from_value::<Vec<CellRecord>>(value["cells"].clone())
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
        _ => return Err(CliError::Input(format!("{}: report carries no cells", path.display()))),
    };
    let file = CellFile { graph: GraphRef::Inline(Box::new(GraphFile::from_graph(&graph))), cells: records };
    let ctx = RootOfUnityContext::from_altitude(graph.altitude());
    Ok(file.into_cells(graph, ctx)?)
}

fn write_json(out: &OutputArgs, value: &Value) -> Result<()> {
    if let Some(path) = &out.output {
        let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
        text.push('\n');
        fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    Ok(())
}

fn graphs_list(out: &OutputArgs) -> Result<Outcome> {
    say!("{:<6} {:>9} {:>8} {:>6} {:>9} {:>8} {:>8}", "graph", "altitude", "vertices", "edges", "triangles", "type I", "type II");
    let mut rows = Vec::new();
    for name in CATALOG {
        let g = builtin_graph(name)?;
        let (t1, t2) = (g.type1_frames().len(), g.type2_frames(true).len());
        say!(
            "{:<6} {:>9} {:>8} {:>6} {:>9} {:>8} {:>8}",
            name,
            g.altitude().to_string(),
            g.vertex_count(),
            g.edges().len(),
            g.triangles().len(),
            t1,
            t2
        );
        rows.push(json!({
            "graph": name,
            "altitude": g.altitude().to_string(),
            "vertices": g.vertex_count(),
            "edges": g.edges().len(),
            "triangles": g.triangles().len(),
            "type1_frames": t1,
            "type2_frames": t2,
        }));
    }
    write_json(out, &json!({ "graphs": rows }))?;
    Ok(Outcome::Ok)
}

fn graph_show<T: Scalar>(args: &GraphArgs) -> Result<Outcome> {
    let g = load_graph(&args.graph)?;
    let ctx = RootOfUnityContext::<T>::from_altitude(g.altitude());
    let dims = g.dimensions(&ctx).ok();
    let digits = T::DIGITS as usize;
    let t1 = g.type1_frames().len();
    let (t2_raw, t2) = (g.type2_frames(false).len(), g.type2_frames(true).len());
    say!("graph: {}", g.name());
    say!("altitude: {}", g.altitude());
    say!("vertices: {}", g.vertex_count());
    say!("edges: {}", g.edges().len());
    say!("triangles: {}", g.triangles().len());
    say!("type I frames: {t1} ({} vertex pairs)", g.type1_vertex_pairs());
    say!("type II frames: {t2} ({t2_raw} before symmetry reduction)");
    say!("{:<12} {:>8}  dimension", "vertex", "triality");
    let mut vertices = Vec::new();
    for (i, v) in g.vertices().iter().enumerate() {
        let tri = v.triality.map_or("-".to_string(), |t| t.to_string());
        let dim = dims.as_ref().map(|d| d.get(i).to_decimal(digits));
        let unit = if i == g.unit() { "  (unit)" } else { "" };
        say!("{:<12} {:>8}  {}{unit}", v.id, tri, dim.as_deref().unwrap_or("-"));
        vertices.push(json!({ "id": v.id, "triality": v.triality, "dimension": dim }));
    }
    write_json(
        &args.out,
        &json!({
            "graph": g.name(),
            "altitude": g.altitude().to_string(),
            "precision": T::DIGITS,
            "vertices": vertices,
            "edges": g.edges().len(),
            "triangles": g.triangles().len(),
            "type1_frames": t1,
            "type1_vertex_pairs": g.type1_vertex_pairs(),
            "type2_frames": t2,
            "type2_frames_raw": t2_raw,
        }),
    )?;
    Ok(Outcome::Ok)
}

fn status_outcome(s: SolveStatus) -> Outcome {
    match s {
        SolveStatus::Solved => Outcome::Ok,
        SolveStatus::Infeasible => Outcome::Infeasible,
        SolveStatus::Inconclusive => Outcome::Inconclusive,
    }
}

fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Solved => "SOLVED",
        SolveStatus::Infeasible => "INFEASIBLE",
        SolveStatus::Inconclusive => "INCONCLUSIVE",
    }
}

fn run_solve<T: Scalar>(args: &SolveArgs) -> Result<Outcome> {
    if args.tol <= 0.0 || args.infeasible <= 0.0 {
        return Err(CliError::Input("tolerances must be positive".into()));
    }
    let g = load_graph(&args.graph.graph)?;
    let ctx = RootOfUnityContext::<T>::from_altitude(g.altitude());
    let opts = SolveOptions {
        restarts: args.restarts,
        seed: args.seed,
        tolerance: args.tol,
        infeasible_threshold: args.infeasible,
        ..SolveOptions::default()
    };
    let report = solve(g, ctx, &opts)?;
    let st = &report.stats;
    say!("graph: {}", report.graph);
    say!("status: {}", status_name(report.status));
    say!("max residual: {:e}", report.max_residual);
    say!("seed: {}", st.seed);
    say!("restarts: {} ({} converged, best residual {:e})", st.count, st.converged, st.best_residual);
    say!("precision: {} digits", T::DIGITS);
    if !report.message.is_empty() {
        say!("message: {}", report.message);
    }
    for z in &report.alternatives {
        say!("alternative triple product: {:.12} {:+.12}i", z.re, z.im);
    }
    if let Some(cells) = &report.cells {
        say!("cells:");
        for (t, v) in cells.values().iter().enumerate() {
            say!("  {:<40} {:+.15} {:+.15}i", cells.graph().triangle_label(t), v.re.to_f64_lossy(), v.im.to_f64_lossy());
        }
    }
    let mut value = report.to_json();
    value["precision"] = json!(T::DIGITS);
    write_json(&args.graph.out, &value)?;
    Ok(status_outcome(report.status))
}

fn run_verify<T: Scalar>(args: &VerifyArgs) -> Result<Outcome> {
    if !(args.tol > 0.0) {
        return Err(CliError::Input("tolerance must be positive".into()));
    }
    let g = load_graph(&args.cells.graph.graph)?;
    let cells = load_cells::<T>(g, &args.cells.cells)?;
    let report = verify(&cells, args.tol)?;
    let status = if report.pass { "PASS" } else { "FAIL" };
    say!("graph: {}", report.graph);
    say!("status: {status}");
    say!("max residual: {:e}", report.max_residual);
    say!("type I max: {:e}", report.type1_max);
    say!("type II max: {:e}", report.type2_max);
    say!("equations: {} ({} failing at tolerance {:e})", report.equations, report.failing, report.tolerance);
    let mut failing: Vec<_> = report.frames.iter().filter(|f| !(f.residual < report.tolerance)).collect();
    failing.sort_by(|a, b| b.residual.total_cmp(&a.residual));
    for f in failing.iter().take(10) {
        say!("  {:e}  {}", f.residual, f.label);
    }
    if failing.len() > 10 {
        say!("  ... {} more", failing.len() - 10);
    }
    let mut value = serde_json::to_value(&report).expect("reports serialize");
    value["status"] = json!(status);
    value["precision"] = json!(T::DIGITS);
    write_json(&args.cells.graph.out, &value)?;
    Ok(if report.pass { Outcome::Ok } else { Outcome::Fail })
}

fn run_invariants<T: Scalar>(args: &CellsArgs) -> Result<Outcome> {
    let g = load_graph(&args.graph.graph)?;
    let cells = load_cells::<T>(g, &args.cells)?;
    let report = gauge_invariants(&cells)?;
    say!("graph: {}", report.graph);
    if let Some(m) = &report.moduli {
        say!("moduli:");
        for c in m {
            say!("  {:<40} {:.15}", c.cell, c.modulus);
        }
    }
    if let Some(z) = &report.octahedron {
        say!("octahedron product: {:.15} {:+.15}i", z.re, z.im);
    }
    if let Some(d) = &report.double_edge {
        say!("det(M^dag M): {:.15}", d.det);
        say!("tr(M^dag M): {:.15}", d.trace);
        for (name, v) in [("c", &d.c), ("d", &d.d)] {
            say!("{name} norms: {:.15} {:.15} {:.15}", v.norms[0], v.norms[1], v.norms[2]);
            say!("{name} overlaps: {:.15} {:.15} {:.15}", v.overlaps[0], v.overlaps[1], v.overlaps[2]);
            let z = v.triple_product;
            say!("{name} triple product: {:.15} {:+.15}i", z.re, z.im);
        }
    }
    write_json(&args.graph.out, &serde_json::to_value(&report).expect("reports serialize"))?;
    Ok(Outcome::Ok)
}

fn run_hecke<T: Scalar>(args: &HeckeArgs) -> Result<Outcome> {
    if args.pmax < 2 {
        return Err(CliError::Input("--pmax must be at least 2".into()));
    }
    let g = load_graph(&args.cells.graph.graph)?;
    let cells = load_cells::<T>(g, &args.cells.cells)?;
    let report = check_hecke_relations(&cells, args.pmax);
    let worst = report.max_violation();
    let pass = worst < args.tol;
    let status = if pass { "PASS" } else { "FAIL" };
    say!("graph: {}", report.graph);
    say!("status: {status}");
    say!("max violation: {worst:e}");
    say!("rhombi: {}", report.rhombi.len());
    for (name, v) in [
        ("rhombus hermitian", report.rhombus_hermitian),
        ("rhombus U^2 = [2]U", report.rhombus_idempotent),
        ("rhombus trace", report.rhombus_trace),
        ("U_n^2 = [2]U_n", report.idempotent),
        ("far commutation", report.far_commutation),
        ("cubic", report.cubic),
        ("quartic", report.quartic),
        ("F^2 = [2][3]F", report.f_relation),
    ] {
        say!("  {name:<20} {v:e}");
    }
    for w in &report.worst {
        say!("  worst {:<12} {:e} at length {}, source {}, n = {}", w.relation, w.value, w.length, w.source, w.n);
    }
    let mut value = serde_json::to_value(&report).expect("reports serialize");
    value["status"] = json!(status);
    value["max_violation"] = json!(worst);
    value["tolerance"] = json!(args.tol);
    value["rhombus_matrices"] = Value::Array(
        qcells::hecke::all_rhombus_matrices(&cells).iter().map(|r| r.to_json(&cells)).collect(),
    );
    write_json(&args.cells.graph.out, &value)?;
    Ok(if pass { Outcome::Ok } else { Outcome::Fail })
}

fn run_fusion(args: &FusionArgs) -> Result<Outcome> {
    if args.level == 0 {
        return Err(CliError::Input("--level must be positive".into()));
    }
    let family = fusion_matrices(args.level);
    say!("level: {}", args.level);
    let mut value = json!({ "level": args.level });
    match args.weight {
        Some(w) => {
            let m = family
                .get(w)
                .ok_or_else(|| CliError::Input(format!("weight ({},{}) is outside the level-{} alcove", w.0, w.1, args.level)))?;
            say!("weight: ({},{})", w.0, w.1);
            say!("dimension: {}", m.entry_sum());
            let rows: Vec<Vec<i32>> = m.rows().map(<[i32]>::to_vec).collect();
            for r in &rows {
                say!("  {}", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
            }
            value["weight"] = json!([w.0, w.1]);
            value["dimension"] = json!(m.entry_sum());
            value["matrix"] = json!(rows);
        }
        None => {
            let mut dims = Vec::new();
            say!("{:<10} dimension", "weight");
            for &w in family.weights() {
                let d = fusion_dimension(&family, w).expect("alcove weight");
                say!("({},{}){:<5} {d}", w.0, w.1, "");
                dims.push(json!({ "weight": [w.0, w.1], "dimension": d }));
            }
            value["weights"] = json!(dims);
        }
    }
    write_json(&args.out, &value)?;
    Ok(Outcome::Ok)
}

fn run_nimrep(args: &GraphArgs) -> Result<Outcome> {
    let g = load_graph(&args.graph)?;
    let report = nimrep_check(&g);
    let status = if report.pass { "PASS" } else { "FAIL" };
    say!("graph: {}", report.graph);
    say!("status: {status}");
    say!("level: {}", report.level);
    say!("non-negative: {} (min entry {})", report.non_negative, report.min_entry);
    say!("pairs checked: {}", report.pairs_checked);
    if let Some((m, n)) = report.first_violation {
        say!("first violation: ({},{}) x ({},{})", m.0, m.1, n.0, n.1);
    }
    if !report.message.is_empty() {
        say!("message: {}", report.message);
    }
    let mut value = serde_json::to_value(&report).expect("reports serialize");
    value["status"] = json!(status);
    write_json(&args.out, &value)?;
    Ok(if report.pass { Outcome::Ok } else { Outcome::Fail })
}

/// A certified gap above this counts as a proof of infeasibility.
const CERTIFICATE_GAP: f64 = 1e-3;

fn run_certify<T: Scalar>(args: &CertifyArgs) -> Result<Outcome> {
    let cert = certify_infeasible_z9::<T>();
    let certified = cert.min_violation_f64 > CERTIFICATE_GAP;
    let status = if certified { "CERTIFIED" } else { "INCONCLUSIVE" };
    say!("graph: Z9");
    say!("status: {status}");
    say!("precision: {} digits", cert.digits);
    say!("b+ = {}  c+ = {}", cert.b_plus, cert.c_plus);
    say!("b- = {}  c- = {}", cert.b_minus, cert.c_minus);
    for a in &cert.assignments {
        let signs: String = a.plus.iter().map(|&p| if p { '+' } else { '-' }).collect();
        say!("  {signs}  a = {}  violation = {}", a.a, a.violation);
    }
    say!("min violation: {}", cert.min_violation);
    let mut value = serde_json::to_value(&cert).expect("reports serialize");
    value["graph"] = json!("Z9");
    value["status"] = json!(status);
    value["gap_threshold"] = json!(CERTIFICATE_GAP);
    write_json(&args.out, &value)?;
    Ok(if certified { Outcome::Ok } else { Outcome::Inconclusive })
}
