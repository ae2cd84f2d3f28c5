//! SU(3) fusion matrices at level k, annular matrices of a module graph, and
//! the nimrep (module over the fusion ring) check.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fusion_graph::{builtin_graph, catalog::alcove_weights, FusionGraph};
use crate::numerics::Altitude;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FusionError {
    #[error("annular matrix F{weight:?} has the negative entry {value} at ({a}, {b})")]
    NegativeEntry { weight: (u32, u32), a: usize, b: usize, value: i64 },
    #[error("the classical limit has no finite fusion ring")]
    InfiniteAltitude,
    #[error("weight {0:?} is outside the alcove")]
    WeightOutsideAlcove((u32, u32)),
}

/// Dense square integer matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i32>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n);
            for (j, &x) in r.iter().enumerate() {
                m.data[i * n + j] = x as i32;
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i32 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i32]> {
        self.data.chunks(self.n.max(1))
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.data[j * n + i] = self.data[i * n + j];
            }
        }
        t
    }

    /// Product skipping zero entries of the left factor.
    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.n;
        assert_eq!(rhs.n, n);
        let mut out = Self::zeros(n);
        for i in 0..n {
            let row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                let r = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in row.iter_mut().zip(r) {
                    *o += a * b;
                }
            }
        }
        out
    }

    fn sub_assign(&mut self, rhs: &Self) {
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }

    fn add_scaled(&mut self, c: i32, rhs: &Self) {
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += c * b;
        }
    }

    pub fn entry_sum(&self) -> i64 {
        self.data.iter().map(|&x| x as i64).sum()
    }

    pub fn min_entry(&self) -> i32 {
        self.data.iter().copied().min().unwrap_or(0)
    }

    fn first_negative(&self) -> Option<(usize, usize, i32)> {
        let n = self.n;
        self.data
            .iter()
            .position(|&x| x < 0)
            .map(|p| (p / n, p % n, self.data[p]))
    }
}

/// Matrices indexed by the alcove weights at one level.
#[derive(Debug, Clone)]
pub struct WeightFamily {
    level: u32,
    weights: Vec<(u32, u32)>,
    index: HashMap<(u32, u32), usize>,
    matrices: Vec<IntMatrix>,
}

impl WeightFamily {
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Alcove weights by increasing `λ + μ`, then `λ`.
    pub fn weights(&self) -> &[(u32, u32)] {
        &self.weights
    }

    pub fn weight_index(&self, w: (u32, u32)) -> Option<usize> {
        self.index.get(&w).copied()
    }

    pub fn get(&self, w: (u32, u32)) -> Option<&IntMatrix> {
        self.weight_index(w).map(|i| &self.matrices[i])
    }

    pub fn matrices(&self) -> &[IntMatrix] {
        &self.matrices
    }
}

/// Fusion matrices `N_{(λ,μ)}`, indexed by alcove weights.
pub type FusionFamily = WeightFamily;
/// Annular matrices `F_{(λ,μ)}`, indexed by graph vertices.
pub type AnnularFamily = WeightFamily;

/// Run the SU(3) recurrence from the seed `X_{(1,0)}`:
/// `X_{(λ,μ)} = X_{(1,0)} X_{(λ−1,μ)} − X_{(λ−1,μ−1)} − X_{(λ−2,μ+1)}`,
/// `X_{(λ,0)} = X_{(1,0)} X_{(λ−1,0)} − X_{(λ−2,1)}`, `X_{(0,λ)} = X_{(λ,0)}ᵀ`.
/// Out-of-alcove terms vanish.
fn recurrence(seed: IntMatrix, level: u32, check_negative: bool) -> Result<WeightFamily, FusionError> {
    let weights = alcove_weights(level);
    let index: HashMap<(u32, u32), usize> = weights.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let n = seed.size();
    let mut slots: Vec<Option<IntMatrix>> = vec![None; weights.len()];
    slots[index[&(0, 0)]] = Some(IntMatrix::identity(n));
    let fetch = |slots: &[Option<IntMatrix>], l: i64, m: i64| -> Option<IntMatrix> {
        if l < 0 || m < 0 || l + m > level as i64 {
            return None;
        }
        Some(slots[index[&(l as u32, m as u32)]].clone().expect("recurrence order provides operands"))
    };
    let check = |w: (u32, u32), x: &IntMatrix| -> Result<(), FusionError> {
        if check_negative {
            if let Some((a, b, value)) = x.first_negative() {
                return Err(FusionError::NegativeEntry { weight: w, a, b, value: value as i64 });
            }
        }
        Ok(())
    };
    for s in 1..=level as i64 {
        let x = if s == 1 {
            seed.clone()
        } else {
            let mut x = seed.mul(&fetch(&slots, s - 1, 0).unwrap());
            if let Some(y) = fetch(&slots, s - 2, 1) {
                x.sub_assign(&y);
            }
            x
        };
        check((s as u32, 0), &x)?;
        let t = x.transpose();
        check((0, s as u32), &t)?;
        slots[index[&(s as u32, 0)]] = Some(x);
        slots[index[&(0, s as u32)]] = Some(t);
        for l in 1..s {
            let m = s - l;
            let mut x = seed.mul(&fetch(&slots, l - 1, m).unwrap());
            if let Some(y) = fetch(&slots, l - 1, m - 1) {
                x.sub_assign(&y);
            }
            if let Some(y) = fetch(&slots, l - 2, m + 1) {
                x.sub_assign(&y);
            }
            check((l as u32, m as u32), &x)?;
            slots[index[&(l as u32, m as u32)]] = Some(x);
        }
    }
    Ok(WeightFamily {
        level,
        weights,
        index,
        matrices: slots.into_iter().map(|x| x.expect("every weight is reached")).collect(),
    })
}

/// Fusion matrices at level `k`, seeded by the alcove graph.
pub fn fusion_matrices(k: u32) -> FusionFamily {
    assert!(k >= 1, "level must be positive");
    let graph = builtin_graph(&format!("A_{k}")).expect("alcove graphs exist for every level");
    recurrence(IntMatrix::from_rows(graph.adjacency()), k, false).expect("negativity is not checked")
}

/// Annular matrices of a module graph at its level, seeded by its adjacency.
pub fn annular_matrices(graph: &FusionGraph) -> Result<AnnularFamily, FusionError> {
    let level = graph.altitude().level().ok_or(FusionError::InfiniteAltitude)?;
    recurrence(IntMatrix::from_rows(graph.adjacency()), level, true)
}

/// Entry sum `d_n = Σ_{p,q} N_{n,p}^q`.
pub fn fusion_dimension(family: &WeightFamily, weight: (u32, u32)) -> Result<i64, FusionError> {
    family
        .get(weight)
        .map(IntMatrix::entry_sum)
        .ok_or(FusionError::WeightOutsideAlcove(weight))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NimrepReport {
    pub graph: String,
    pub level: u32,
    pub pass: bool,
    pub non_negative: bool,
    pub min_entry: i64,
    pub pairs_checked: usize,
    /// First weight pair `(m, n)` with `F_m F_n ≠ Σ_p N_{mn}^p F_p`.
    pub first_violation: Option<((u32, u32), (u32, u32))>,
    pub message: String,
}

/// First weight-index pair violating `F_m F_n = Σ_p N_{mn}^p F_p`, and the
/// number of pairs examined.
pub fn check_module(fusion: &FusionFamily, annular: &AnnularFamily) -> (Option<(usize, usize)>, usize) {
    let w = fusion.weights().len();
    let first = (0..w)
        .into_par_iter()
        .find_map_first(|m| {
            let nm = &fusion.matrices[m];
            let fm = &annular.matrices[m];
            (0..w).find_map(|n| {
                let mut lhs = fm.mul(&annular.matrices[n]);
                for p in 0..w {
                    let c = nm.get(n, p);
                    if c != 0 {
                        lhs.add_scaled(-c, &annular.matrices[p]);
                    }
                }
                lhs.data.iter().any(|&x| x != 0).then_some((m, n))
            })
        });
    (first, w * w)
}

/// Nimrep validation of a graph at its level.
pub fn nimrep_check(graph: &FusionGraph) -> NimrepReport {
    let level = match graph.altitude() {
        Altitude::Finite(_) => graph.altitude().level().unwrap(),
        Altitude::Infinite => {
            return NimrepReport {
                graph: graph.name().to_string(),
                level: 0,
                pass: false,
                non_negative: false,
                min_entry: 0,
                pairs_checked: 0,
                first_violation: None,
                message: FusionError::InfiniteAltitude.to_string(),
            }
        }
    };
    let mut report = NimrepReport {
        graph: graph.name().to_string(),
        level,
        pass: false,
        non_negative: true,
        min_entry: 0,
        pairs_checked: 0,
        first_violation: None,
        message: String::new(),
    };
    let annular = match annular_matrices(graph) {
        Ok(a) => a,
        Err(e) => {
            report.non_negative = false;
            if let FusionError::NegativeEntry { value, .. } = e {
                report.min_entry = value;
            }
            report.message = e.to_string();
            return report;
        }
    };
    report.min_entry = annular.matrices.iter().map(|m| m.min_entry() as i64).min().unwrap_or(0);
    let fusion = fusion_matrices(level);
    let (first, pairs) = check_module(&fusion, &annular);
    report.pairs_checked = pairs;
    report.first_violation = first.map(|(m, n)| (fusion.weights[m], fusion.weights[n]));
    report.pass = first.is_none();
    report.message = match report.first_violation {
        None => "PASS".into(),
        Some((m, n)) => format!("F{m:?} F{n:?} differs from the fusion expansion"),
    };
    report
}
