//! Published and closed-form cell systems shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use qcells::cell_system::equations::Type2Selection;
use qcells::cell_system::{CellSystem, Selection};
use qcells::fusion_graph::{builtin_graph, catalog, FusionGraph};
use qcells::Context;

pub fn graph(name: &str) -> Arc<FusionGraph> {
    Arc::new(builtin_graph(name).unwrap())
}

/// `[n]` at altitude `kappa`, straight from the sine formula.
pub fn qn(kappa: f64, n: f64) -> f64 {
    (n * PI / kappa).sin() / (PI / kappa).sin()
}

pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Cell system on a catalog graph with every named cell set.
pub fn named_system(name: &str, values: &[(String, Complex64)]) -> CellSystem<f64> {
    let g = graph(name);
    let ctx = Context::from_altitude(g.altitude());
    let mut cells = CellSystem::zeros(g.clone(), ctx).unwrap();
    for (n, v) in values {
        cells.set_named(n, *v).unwrap();
    }
    assert_eq!(values.len(), g.triangles().len(), "fixture must cover every triangle");
    cells
}

/// E5 with `ν₁ = −ν₀` and every other cell real positive.
pub fn e5_published() -> CellSystem<f64> {
    let r2 = 2f64.sqrt();
    let tau = (10.0 + 7.0 * r2).powf(0.25);
    let mu = (5.0 + 3.5 * r2).powf(0.25);
    let nu = (29.0 + 20.5 * r2).powf(0.25);
    let mut v: Vec<(String, Complex64)> = Vec::new();
    for i in 0..6 {
        v.push((format!("tau{i}"), re(tau)));
        v.push((format!("mu{i}"), re(mu)));
    }
    v.push(("nu0".into(), re(nu)));
    v.push(("nu1".into(), re(-nu)));
    named_system("E5", &v)
}

fn e9_system(
    c1: [Complex64; 3],
    c2: [Complex64; 3],
    d1: [Complex64; 3],
    d2: [Complex64; 3],
    e: [[Complex64; 2]; 2],
) -> CellSystem<f64> {
    let s = 1.0 + 3f64.sqrt();
    let a = 2f64.powf(-0.25) * s;
    let b = 2f64.powf(-0.25) * 3f64.powf(0.25) * s;
    let mut v: Vec<(String, Complex64)> = Vec::new();
    for j in 0..3 {
        v.push((format!("a^{j}"), re(a)));
        v.push((format!("b^{j}"), re(b)));
        v.push((format!("c1^{j}"), c1[j]));
        v.push((format!("c2^{j}"), c2[j]));
        v.push((format!("d1^{j}"), d1[j]));
        v.push((format!("d2^{j}"), d2[j]));
    }
    for k in 0..2 {
        for l in 0..2 {
            v.push((format!("e{}{}", k + 1, l + 1), e[k][l]));
        }
    }
    named_system("E9", &v)
}

pub fn e9_r_pm() -> (f64, f64) {
    let r3 = 3f64.sqrt();
    let x = (78.0 + 45.0 * r3).sqrt();
    let y = (12.0 + 7.0 * r3).sqrt();
    (x + y, x - y)
}

pub fn e9_rho_pm() -> (f64, f64) {
    let r3 = 3f64.sqrt();
    let x = 3.0 * (2.0 + r3).powf(1.5);
    let y = 3.0 * (12.0 + 7.0 * r3).sqrt();
    (x + y, x - y)
}

/// The solution with `e12 = e21 = 0`.
pub fn e9_diagonal() -> CellSystem<f64> {
    let (rp, rm) = e9_r_pm();
    let (pp, pm) = e9_rho_pm();
    let w = |j: usize| cis(2.0 * PI * j as f64 / 3.0);
    let c1 = [0, 1, 2].map(|j| w(j) * rp.sqrt());
    let c2 = [0, 1, 2].map(|j| w(j).conj() * rm.sqrt());
    let d1 = [0, 1, 2].map(|j| w(j).conj() * rp.sqrt());
    let d2 = [0, 1, 2].map(|j| w(j) * rm.sqrt());
    e9_system(c1, c2, d1, d2, [[re(pm.sqrt()), re(0.0)], [re(0.0), re(-pp.sqrt())]])
}

/// The orbifold solution, with `e` transposed and `d` conjugated to match the
/// edge labelling used here.
pub fn e9_orbifold() -> CellSystem<f64> {
    let q = |n: f64| qn(12.0, n);
    let s = (q(2.0) * q(4.0)).sqrt();
    let lp = q(2.0).sqrt() * (q(2.0) * q(4.0) + s).sqrt();
    let lm = q(2.0).sqrt() * (q(2.0) * q(4.0) - s).sqrt();
    let w = |j: usize| cis(2.0 * PI * (j as f64 - 1.0) / 3.0);
    let c1 = [0, 1, 2].map(|j| w(j) * lp);
    let c2 = [0, 1, 2].map(|j| w(j).conj() * lm);
    let d1 = [0, 1, 2].map(|j| (w(j).conj() * lm).conj());
    let d2 = [0, 1, 2].map(|j| (w(j) * lp).conj());
    let k = q(4.0) / q(2.0).sqrt();
    let e12 = k * (q(2.0) * q(2.0) - s).sqrt();
    let e21 = -k * (q(2.0) * q(2.0) + s).sqrt();
    e9_system(c1, c2, d1, d2, [[re(0.0), re(e12)], [re(e21), re(0.0)]])
}

/// The solution with `c_2^0 = 0`; `c` is conjugated and the `e22` prefactor
/// is `2^{-3/4}`.
pub fn e9_c20_zero() -> CellSystem<f64> {
    let r3 = 3f64.sqrt();
    let s = 1.0 + r3;
    let p = 2f64.powf(-0.25);
    let big_a = p * 3f64.powf(0.25) * s;
    let c10 = p * 3f64.powf(0.25) * s.powf(1.5);
    let c21 = p * r3 * s;
    let c22 = Complex64::new(0.5 * (1.0 - r3), -(0.5f64.sqrt()) * 3f64.powf(0.25)) * c21;
    let d1 = [re(c10), re(big_a), re(big_a)];
    let d2 = [re(0.0), re(c21), c22];
    let c1 = d1.map(|z| z.conj());
    let c2 = d2.map(|z| z.conj());
    let e12 = Complex64::new(1.0 - r3, -(2f64.sqrt()) * 3f64.powf(0.25)) * (2f64.powf(-1.25) * (3.0 + r3));
    let e21 = re(p * r3 * s);
    let e22 = Complex64::new(-(3.0 - r3).sqrt(), s.sqrt()) * (2f64.powf(-0.75) * r3 * s.sqrt());
    e9_system(c1, c2, d1, d2, [[re(0.0), e12], [e21, e22]])
}

/// Closed-form squared modulus of an E21 cell class at `κ = 24`.
pub fn e21_closed_form(class: &str) -> f64 {
    let q = |n: f64| qn(24.0, n);
    let (q2, q3, q4, q5, q6, q7, q9) = (q(2.0), q(3.0), q(4.0), q(5.0), q(6.0), q(7.0), q(9.0));
    match class {
        "alpha1" => q2 * q3 * q3 - q3 * q4,
        "gamma2" => q3 * q4,
        "alpha2" => q2 * q3 * q4 * q4 - q3 * q4 * q5,
        "gamma3" => q3 * q4 * q5,
        "alpha3" => q3 * q3 * q4 * q5,
        "lambda" => 0.5 * q3 * q3 * q5 * q6,
        "beta" => q3 * q4 * q4 * q5 / q2,
        "mu1" => q3 * q5 * q9 / q2,
        "sigma1" => q3 * q3 * q5 * q5 / q2,
        "rho" => q4 * q4 * q5 * q7 / q2,
        "mu2" => q3 * q3 * q5 * q9 / q2,
        "nu1" => q5 * q5 * q9 / q2,
        "nu2" => q7 * q9 / q2,
        "sigma2" => 0.5 * q3 * q3 * q5 * q5 * q6 / (q2 * q4),
        other => panic!("unknown E21 class {other}"),
    }
}

/// `f[a,b,c,d] = √(a + b√2 + c√3 + d√6)`, the tabulated squared moduli.
pub fn e21_table(class: &str) -> f64 {
    let f = |a: f64, b: f64, c: f64, d: f64| (a + b * 2f64.sqrt() + c * 3f64.sqrt() + d * 6f64.sqrt()).sqrt();
    match class {
        "alpha1" => f(10.0, 5.0, 4.0, 4.0),
        "alpha2" => f(272.0, 191.0, 156.0, 111.0),
        "alpha3" => f(5896.0, 4169.0, 3404.0, 2407.0),
        "gamma2" => f(32.0, 22.0, 18.0, 13.0),
        "gamma3" => f(686.0, 485.0, 396.0, 280.0),
        "nu1" => f(1508.0, 1066.0, 870.0, 615.0),
        "mu1" => f(596.0, 421.0, 344.0, 243.0),
        "sigma1" => f(2224.0, 1571.0, 1284.0, 907.0),
        "nu2" => f(118.0, 83.0, 68.0, 48.0),
        "mu2" => f(5120.0, 3620.0, 2956.0, 2090.0),
        "sigma2" => f(1112.0, 1571.0 / 2.0, 642.0, 907.0 / 2.0),
        "beta" => f(2560.0, 1810.0, 1478.0, 1045.0),
        "lambda" => f(2948.0, 4169.0 / 2.0, 1702.0, 2407.0 / 2.0),
        "rho" => f(11002.0, 15559.0 / 2.0, 6352.0, 8993.0 / 2.0),
        other => panic!("unknown E21 class {other}"),
    }
}

pub const E21_CLASSES: [&str; 14] = [
    "alpha1", "alpha2", "alpha3", "gamma2", "gamma3", "nu1", "mu1", "sigma1", "nu2", "mu2", "sigma2", "beta", "lambda",
    "rho",
];

pub fn e21_negative(name: &str) -> bool {
    matches!(name, "rho''" | "sigma2'" | "sigma2''")
}

/// E21 from the closed forms, real with the three negative cells.
pub fn e21_published() -> CellSystem<f64> {
    let g = graph("E21");
    let v: Vec<(String, Complex64)> = g
        .named_cells()
        .iter()
        .map(|(n, _)| {
            let m = e21_closed_form(catalog::e21_cell_class(n)).sqrt();
            (n.clone(), re(if e21_negative(n) { -m } else { m }))
        })
        .collect();
    named_system("E21", &v)
}

/// `|τ↑_{k,l}|²` and `|τ↓_{k,l}|²` from the closed forms.
pub fn alcove_closed_form(kappa: f64, up: bool, k: u32, l: u32) -> f64 {
    let q = |n: u32| qn(kappa, n as f64);
    let common = q(k + 1) * q(k + 2) * q(l + 1) * q(k + l + 2) * q(k + l + 3) / (q(2) * q(2));
    if up {
        common * q(l + 2)
    } else {
        common * q(l)
    }
}

/// A_k with every cell real positive at its closed-form modulus.
pub fn alcove_system(level: u32) -> CellSystem<f64> {
    let g = graph(&format!("A_{level}"));
    let ctx = Context::from_altitude(g.altitude());
    let kappa = (level + 3) as f64;
    let vals = (0..g.triangles().len())
        .map(|t| {
            let c = catalog::alcove_cell(&g, t).unwrap();
            re(alcove_closed_form(kappa, c.up, c.k, c.l).sqrt())
        })
        .collect();
    CellSystem::new(g, ctx, vals).unwrap()
}

pub fn doubly_degenerate_max(cells: &CellSystem<f64>) -> f64 {
    let sel = Selection {
        type1_off_diagonal: false,
        type2: Type2Selection { doubly: true, singly: false, non_degenerate: false },
    };
    cells.equations(sel).unwrap().max_residual(cells.values())
}

/// Alcove cells from the diagonal Type I sums, split between the two
/// triangles of each rhombus in the ratio `λ = |τ↑|²/|τ↓|²`.
pub fn alcove_from_ratio(level: u32, ratio: impl Fn(u32, u32) -> f64) -> CellSystem<f64> {
    let g = graph(&format!("A_{level}"));
    let kappa = (level + 3) as f64;
    let q = |n: u32| qn(kappa, n as f64);
    let mu = |k: u32, l: u32| q(k + 1) * q(l + 1) * q(k + l + 2) / q(2);
    let vals = (0..g.triangles().len())
        .map(|t| {
            let c = catalog::alcove_cell(&g, t).unwrap();
            let s = q(2) * mu(c.k, c.l) * mu(c.k + 1, c.l);
            let x = if c.l == 0 {
                s
            } else {
                let lam = ratio(c.k, c.l);
                if c.up {
                    s * lam / (1.0 + lam)
                } else {
                    s / (1.0 + lam)
                }
            };
            Complex64::new(x.sqrt(), 0.0)
        })
        .collect();
    CellSystem::new(g.clone(), Context::from_altitude(g.altitude()), vals).unwrap()
}
