//! Built-in fusion graphs.

use std::collections::BTreeSet;

use super::{Edge, FusionGraph, GraphError, Vertex};
use crate::numerics::Altitude;

/// Names accepted by [`builtin_graph`], for listings.
pub const CATALOG: &[&str] = &["A_1", "A_2", "A_3", "A_4", "A_5", "A_6", "E5", "E9", "E21", "Z9"];

/// Look up a catalog graph: `A_k` (or `Ak`), `A_inf_L` (classical alcove
/// truncated at level L), `E5`, `E9`, `E21`, `Z9`.
pub fn builtin_graph(name: &str) -> Result<FusionGraph, GraphError> {
    let unknown = || GraphError::UnknownGraph(name.to_string());
    let upper = name.to_ascii_uppercase();
    match upper.as_str() {
        "E5" => return Ok(e5()),
        "E9" => return Ok(e9()),
        "E21" => return Ok(e21()),
        "Z9" => return Ok(z9()),
        _ => {}
    }
    let rest = upper.strip_prefix('A').ok_or_else(unknown)?;
    let rest = rest.strip_prefix('_').unwrap_or(rest);
    if let Some(l) = rest.strip_prefix("INF") {
        let l = l.strip_prefix('_').unwrap_or(l);
        let level: u32 = l.parse().map_err(|_| unknown())?;
        return Ok(alcove(level, true));
    }
    let k: u32 = rest.parse().map_err(|_| unknown())?;
    if k == 0 {
        return Err(unknown());
    }
    Ok(alcove(k, false))
}

/// Incremental builder keyed by vertex ids.
struct Builder {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl Builder {
    fn new() -> Self {
        Self { vertices: Vec::new(), edges: Vec::new() }
    }

    fn vertex(&mut self, id: impl Into<String>, triality: u8) {
        self.vertices.push(Vertex { id: id.into(), triality: Some(triality) });
    }

    fn idx(&self, id: &str) -> usize {
        self.vertices
            .iter()
            .position(|v| v.id == id)
            .unwrap_or_else(|| panic!("catalog references unknown vertex {id}"))
    }

    fn edge(&mut self, from: &str, to: &str) {
        let id = format!("e{}", self.edges.len());
        self.named_edge(from, to, &id);
    }

    fn named_edge(&mut self, from: &str, to: &str, id: &str) {
        let (from, to) = (self.idx(from), self.idx(to));
        self.edges.push(Edge { id: id.to_string(), from, to });
    }

    fn build(self, name: &str, altitude: Altitude, unit: &str) -> FusionGraph {
        let unit = self.idx(unit);
        FusionGraph::new(name, altitude, unit, self.vertices, self.edges).expect("catalog graph is well formed")
    }
}

fn name_cells(g: FusionGraph, cells: Vec<(String, [&str; 3], [Option<&str>; 3])>) -> FusionGraph {
    let named = cells
        .into_iter()
        .map(|(n, v, e)| {
            let t = g
                .find_triangle(v, e)
                .unwrap_or_else(|| panic!("catalog cell {n} is not a triangle"));
            (n, t)
        })
        .collect();
    g.with_named_cells(named)
}

/// Alcove weights with `l + m ≤ level`, by increasing `l + m`, then `l`.
pub fn alcove_weights(level: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for s in 0..=level {
        for l in 0..=s {
            out.push((l, s - l));
        }
    }
    out
}

/// Vertex id of an alcove weight.
pub fn weight_id(w: (u32, u32)) -> String {
    format!("({},{})", w.0, w.1)
}

fn alcove(level: u32, classical: bool) -> FusionGraph {
    let weights = alcove_weights(level);
    let mut b = Builder::new();
    for &(l, m) in &weights {
        b.vertex(weight_id((l, m)), ((l as i64 - m as i64).rem_euclid(3)) as u8);
    }
    for &(l, m) in &weights {
        for (dl, dm) in [(1i64, 0i64), (-1, 1), (0, -1)] {
            let (nl, nm) = (l as i64 + dl, m as i64 + dm);
            if nl >= 0 && nm >= 0 && nl + nm <= level as i64 {
                b.edge(&weight_id((l, m)), &weight_id((nl as u32, nm as u32)));
            }
        }
    }
    let (name, altitude, truncation) = if classical {
        (format!("A_inf_{level}"), Altitude::Infinite, Some(level))
    } else {
        (format!("A_{level}"), Altitude::for_level(level), None)
    };
    b.build(&name, altitude, "(0,0)").with_weights(weights, truncation)
}

/// Shape of an alcove triangle, read off its horizontal edge `(k,l) → (k+1,l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlcoveCell {
    /// Third vertex `(k,l+1)`; otherwise it is `(k+1,l−1)`.
    pub up: bool,
    pub k: u32,
    pub l: u32,
}

/// Classify a triangle of an alcove graph; `None` on graphs without weights.
pub fn alcove_cell(g: &FusionGraph, t: usize) -> Option<AlcoveCell> {
    let w = g.weights()?;
    let tri = g.triangles()[t];
    for i in 0..3 {
        let (a, b, c) = (tri.vertices[i], tri.vertices[(i + 1) % 3], tri.vertices[(i + 2) % 3]);
        let ((k, l), (k2, l2)) = (w[a], w[b]);
        if k2 == k + 1 && l2 == l {
            return Some(AlcoveCell { up: w[c] == (k, l + 1), k, l });
        }
    }
    None
}

fn e5() -> FusionGraph {
    let mut b = Builder::new();
    for i in 0..6u8 {
        b.vertex(format!("1_{i}"), i % 3);
    }
    for i in 0..6u8 {
        b.vertex(format!("2_{i}"), i % 3);
    }
    for i in 0..6 {
        b.edge(&format!("1_{i}"), &format!("2_{}", (i + 1) % 6));
        b.edge(&format!("2_{i}"), &format!("1_{}", (i + 4) % 6));
        b.edge(&format!("2_{i}"), &format!("2_{}", (i + 1) % 6));
        b.edge(&format!("2_{i}"), &format!("2_{}", (i + 4) % 6));
    }
    let g = b.build("E5", Altitude::Finite(8), "1_0");
    let ids: Vec<[String; 3]> = (0..6)
        .map(|i| [format!("1_{i}"), format!("2_{}", (i + 1) % 6), format!("2_{}", (i + 2) % 6)])
        .chain((0..6).map(|i| [format!("2_{i}"), format!("2_{}", (i + 1) % 6), format!("2_{}", (i + 2) % 6)]))
        .chain([
            ["2_0".into(), "2_4".into(), "2_2".into()],
            ["2_1".into(), "2_5".into(), "2_3".into()],
        ])
        .collect();
    let names: Vec<String> = (0..6)
        .map(|i| format!("tau{i}"))
        .chain((0..6).map(|i| format!("mu{i}")))
        .chain(["nu0".into(), "nu1".into()])
        .collect();
    let cells = names
        .into_iter()
        .zip(&ids)
        .map(|(n, v)| (n, [v[0].as_str(), v[1].as_str(), v[2].as_str()], [None; 3]))
        .collect();
    name_cells(g, cells)
}

fn e9() -> FusionGraph {
    let mut b = Builder::new();
    for t in 0..3u8 {
        for j in 0..3 {
            b.vertex(format!("{t}^{j}"), t);
        }
    }
    for i in 0..3u8 {
        b.vertex(format!("3_{i}"), i);
    }
    for j in 0..3 {
        let (z, o, w) = (format!("0^{j}"), format!("1^{j}"), format!("2^{j}"));
        b.edge(&z, &o);
        b.edge(&o, &w);
        b.edge(&w, &z);
        b.edge(&w, "3_0");
        b.edge("3_0", &o);
        b.edge(&o, "3_2");
        b.edge("3_1", &w);
    }
    b.named_edge("3_1", "3_2", "e21");
    b.named_edge("3_0", "3_1", "alpha1");
    b.named_edge("3_0", "3_1", "alpha2");
    b.named_edge("3_2", "3_0", "beta1");
    b.named_edge("3_2", "3_0", "beta2");
    let g = b.build("E9", Altitude::Finite(12), "0^0");

    let mut cells: Vec<(String, [String; 3], [Option<String>; 3])> = Vec::new();
    for j in 0..3 {
        cells.push((format!("a^{j}"), [format!("1^{j}"), format!("2^{j}"), format!("0^{j}")], [None, None, None]));
    }
    for j in 0..3 {
        cells.push((format!("b^{j}"), [format!("1^{j}"), format!("2^{j}"), "3_0".into()], [None, None, None]));
    }
    for k in 1..=2 {
        for j in 0..3 {
            cells.push((
                format!("c{k}^{j}"),
                ["3_0".into(), "3_1".into(), format!("2^{j}")],
                [Some(format!("alpha{k}")), None, None],
            ));
        }
    }
    for l in 1..=2 {
        for j in 0..3 {
            cells.push((
                format!("d{l}^{j}"),
                ["3_2".into(), "3_0".into(), format!("1^{j}")],
                [Some(format!("beta{l}")), None, None],
            ));
        }
    }
    for k in 1..=2 {
        for l in 1..=2 {
            cells.push((
                format!("e{k}{l}"),
                ["3_1".into(), "3_2".into(), "3_0".into()],
                [Some("e21".into()), Some(format!("beta{l}")), Some(format!("alpha{k}"))],
            ));
        }
    }
    let cells = cells
        .iter()
        .map(|(n, v, e)| {
            (
                n.clone(),
                [v[0].as_str(), v[1].as_str(), v[2].as_str()],
                [e[0].as_deref(), e[1].as_deref(), e[2].as_deref()],
            )
        })
        .collect();
    name_cells(g, cells)
}

fn z9() -> FusionGraph {
    let mut b = Builder::new();
    for i in 0..3u8 {
        b.vertex(format!("0_{i}"), i);
    }
    for i in 0..3u8 {
        for j in 1..=3 {
            b.vertex(format!("3_{i}^{j}"), i);
        }
    }
    for i in 0..3 {
        let n = (i + 1) % 3;
        b.edge(&format!("0_{i}"), &format!("0_{n}"));
        for j in 1..=3 {
            b.edge(&format!("0_{i}"), &format!("3_{n}^{j}"));
            b.edge(&format!("3_{i}^{j}"), &format!("0_{n}"));
            b.edge(&format!("3_{i}^{j}"), &format!("3_{n}^{j}"));
        }
    }
    let g = b.build("Z9", Altitude::Finite(12), "0_0");
    let mut cells: Vec<(String, [String; 3])> = vec![("a".into(), ["0_0".into(), "0_1".into(), "0_2".into()])];
    for j in 1..=3 {
        cells.push((format!("b{j}"), ["0_1".into(), format!("3_2^{j}"), "0_0".into()]));
    }
    for j in 1..=3 {
        cells.push((format!("c{j}"), ["0_1".into(), format!("3_2^{j}"), format!("3_0^{j}")]));
    }
    let cells = cells
        .iter()
        .map(|(n, v)| (n.clone(), [v[0].as_str(), v[1].as_str(), v[2].as_str()], [None; 3]))
        .collect();
    name_cells(g, cells)
}

/// Vertex ids of E21 in storage order.
fn e21_vertex_ids() -> Vec<String> {
    let mut v = Vec::new();
    let both = |f: &dyn Fn(u8) -> Vec<String>| (1..=2).flat_map(f).collect::<Vec<_>>();
    v.extend(both(&|k| vec![format!("1_{k}")]));
    v.extend(both(&|k| vec![format!("2_{k}^1"), format!("2_{k}^2")]));
    v.extend(both(&|k| vec![format!("3_{k}")]));
    v.extend(both(&|k| vec![format!("3_{k}^1"), format!("3_{k}^2")]));
    v.extend(both(&|k| vec![format!("4_{k}^1"), format!("4_{k}^2")]));
    v.extend(both(&|k| vec![format!("5_{k}^1"), format!("5_{k}^2")]));
    v.extend(both(&|k| vec![format!("6_{k}")]));
    v.extend(both(&|k| vec![format!("7_{k}")]));
    v
}

fn e21_triality(id: &str) -> u8 {
    id.split_once('^').map_or(0, |(_, t)| t.parse().unwrap())
}

/// The 40 E21 triangles as vertex triples, oriented by triality.
fn e21_triangles() -> Vec<[String; 3]> {
    let mut t: Vec<[String; 3]> = Vec::new();
    let s = |x: &str| x.to_string();
    for k in 1..=2 {
        let o = 3 - k;
        let wing = [
            (format!("1_{k}"), format!("2_{k}^1"), format!("2_{k}^2")),
            (format!("3_{k}"), format!("2_{k}^1"), format!("2_{k}^2")),
            (format!("3_{k}"), format!("2_{k}^1"), format!("3_{k}^2")),
            (format!("3_{k}"), format!("3_{k}^1"), format!("2_{k}^2")),
            (format!("3_{k}"), format!("4_{k}^1"), format!("3_{k}^2")),
            (format!("3_{k}"), format!("3_{k}^1"), format!("4_{k}^2")),
            (format!("3_{k}"), format!("4_{k}^1"), format!("4_{k}^2")),
            (format!("6_{o}"), format!("3_{k}^1"), format!("4_{k}^2")),
            (format!("6_{k}"), format!("4_{k}^1"), format!("3_{k}^2")),
        ];
        t.extend(wing.into_iter().map(|(a, b, c)| [a, b, c]));
    }
    for t0 in ["7_1", "7_2"] {
        for t1 in ["4_1^1", "4_2^1"] {
            for t2 in ["4_1^2", "4_2^2"] {
                t.push([s(t0), s(t1), s(t2)]);
            }
        }
    }
    let octahedra = [
        (["6_1", "7_1"], ["4_1^1", "5_2^1"], ["5_1^2", "4_2^2"]),
        (["6_2", "7_2"], ["5_1^1", "4_2^1"], ["4_1^2", "5_2^2"]),
    ];
    for (a0, a1, a2) in octahedra {
        for t0 in a0 {
            for t1 in a1 {
                for t2 in a2 {
                    let tri = [s(t0), s(t1), s(t2)];
                    if !t.contains(&tri) {
                        t.push(tri);
                    }
                }
            }
        }
    }
    t
}

/// Class of an E21 cell from the vertex families it touches.
fn e21_class(tri: &[String; 3]) -> &'static str {
    let mut fam: Vec<char> = tri.iter().map(|v| v.chars().next().unwrap()).collect();
    fam.sort();
    let key: String = fam.into_iter().collect();
    match key.as_str() {
        "122" => "alpha1",
        "223" => "gamma2",
        "233" => "alpha2",
        "334" => "gamma3",
        "344" => "alpha3",
        "346" => "beta",
        "556" => "nu1",
        "557" => "nu2",
        "456" => "mu1",
        "457" => "mu2",
        "446" => "sigma1",
        "447" => {
            let wings: BTreeSet<&str> = tri
                .iter()
                .filter(|v| v.starts_with('4'))
                .map(|v| &v[2..3])
                .collect();
            if wings.len() == 1 {
                "lambda"
            } else {
                "cross"
            }
        }
        _ => unreachable!("E21 triangle outside the known classes"),
    }
}

/// Named E21 cells on the four mixed-wing triangles of the central octahedron.
const E21_CROSS: [(&str, [&str; 3]); 4] = [
    ("rho'", ["7_2", "4_1^1", "4_2^2"]),
    ("rho''", ["7_1", "4_2^1", "4_1^2"]),
    ("sigma2'", ["7_2", "4_2^1", "4_1^2"]),
    ("sigma2''", ["7_1", "4_1^1", "4_2^2"]),
];

/// Closed-form class of a named E21 cell (`"alpha1#2"` → `"alpha1"`,
/// `"rho''"` → `"rho"`).
pub fn e21_cell_class(name: &str) -> &str {
    let base = name.split('#').next().unwrap();
    base.trim_end_matches('\'')
}

fn e21() -> FusionGraph {
    let ids = e21_vertex_ids();
    let tris = e21_triangles();
    let mut b = Builder::new();
    for id in &ids {
        b.vertex(id.clone(), e21_triality(id));
    }
    let pos = |v: &str| ids.iter().position(|x| x == v).unwrap();
    let mut edges = BTreeSet::new();
    let mut oriented = Vec::new();
    for tri in &tris {
        let mut s = tri.clone();
        s.sort_by_key(|v| e21_triality(v));
        edges.insert((pos(&s[0]), pos(&s[1])));
        edges.insert((pos(&s[1]), pos(&s[2])));
        edges.insert((pos(&s[2]), pos(&s[0])));
        oriented.push((e21_class(tri), s));
    }
    for (a, c) in edges {
        b.edge(&ids[a].clone(), &ids[c].clone());
    }
    let g = b.build("E21", Altitude::Finite(24), "1_1");

    // Names in gauge-fixing priority: every regular class first, then the
    // mixed-wing cells of the central octahedron with the sign-carrying ones last.
    let mut counters = std::collections::HashMap::new();
    let mut cells: Vec<(String, [String; 3])> = Vec::new();
    for (class, s) in &oriented {
        if *class == "cross" {
            continue;
        }
        let n = counters.entry(*class).or_insert(0);
        *n += 1;
        cells.push((format!("{class}#{n}"), s.clone()));
    }
    for (name, v) in E21_CROSS {
        cells.push((name.to_string(), v.map(String::from)));
    }
    let cells = cells
        .iter()
        .map(|(n, v)| (n.clone(), [v[0].as_str(), v[1].as_str(), v[2].as_str()], [None; 3]))
        .collect();
    name_cells(g, cells)
}
