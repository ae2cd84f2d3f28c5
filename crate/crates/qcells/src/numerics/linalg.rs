//! Small dense linear algebra over a generic [`Scalar`].
//!
//! The systems handled here have at most a few hundred unknowns, so plain
//! Gaussian elimination with partial pivoting is adequate at any precision.

use super::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Solve the square system `a x = b` in place; `b` receives `x`.
///
/// Returns `false` when a pivot falls below `tiny` relative to the largest
/// entry, leaving `b` unspecified.
pub fn solve_square<T: Scalar>(a: &mut Matrix<T>, b: &mut [T]) -> bool {
    let n = a.rows;
    assert_eq!(a.cols, n);
    assert_eq!(b.len(), n);
    let scale = a.data.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() {
        return n == 0;
    }
    let tiny = scale * T::epsilon() * T::int(16);
    for col in 0..n {
        let (mut piv, mut best) = (col, a.at(col, col).abs());
        for r in col + 1..n {
            let v = a.at(r, col).abs();
            if v > best {
                piv = r;
                best = v;
            }
        }
        if best <= tiny {
            return false;
        }
        if piv != col {
            for j in 0..n {
                a.data.swap(col * n + j, piv * n + j);
            }
            b.swap(col, piv);
        }
        let p = a.at(col, col);
        for r in col + 1..n {
            let f = a.at(r, col) / p;
            if f == T::zero() {
                continue;
            }
            for j in col..n {
                let v = a.at(col, j);
                *a.at_mut(r, j) -= f * v;
            }
            let bc = b[col];
            b[r] -= f * bc;
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for j in col + 1..n {
            s -= a.at(col, j) * b[j];
        }
        b[col] = s / a.at(col, col);
    }
    true
}

/// A particular solution of a consistent, possibly underdetermined system
/// `a x = b` (free variables set to zero). Rows that reduce to zero are
/// ignored.
pub fn solve_consistent<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Vec<T> {
    let (m, n) = (a.rows, a.cols);
    let mut a = a.clone();
    let mut b = b.to_vec();
    let tol = T::epsilon() * T::int(1024);
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        let (mut piv, mut best) = (row, a.at(row, col).abs());
        for r in row + 1..m {
            let v = a.at(r, col).abs();
            if v > best {
                piv = r;
                best = v;
            }
        }
        if best <= tol {
            continue;
        }
        if piv != row {
            for j in 0..n {
                a.data.swap(row * n + j, piv * n + j);
            }
            b.swap(row, piv);
        }
        let p = a.at(row, col);
        for r in 0..m {
            if r == row {
                continue;
            }
            let f = a.at(r, col) / p;
            if f == T::zero() {
                continue;
            }
            for j in col..n {
                let v = a.at(row, j);
                *a.at_mut(r, j) -= f * v;
            }
            let br = b[row];
            b[r] -= f * br;
        }
        pivots.push((row, col));
        row += 1;
    }
    let mut x = vec![T::zero(); n];
    for (r, c) in pivots {
        x[c] = b[r] / a.at(r, c);
    }
    x
}

/// Incremental row-rank tracker over exact small integers (stored as f64).
///
/// Used to pick a maximal independent set of incidence rows greedily.
#[derive(Debug, Default, Clone)]
pub struct RankTracker {
    basis: Vec<(usize, Vec<f64>)>,
}

impl RankTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Insert `row` if it is independent of the rows seen so far.
    pub fn try_insert(&mut self, row: &[f64]) -> bool {
        let mut v = row.to_vec();
        for (p, b) in &self.basis {
            let f = v[*p];
            if f != 0.0 {
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= f * y;
                }
            }
        }
        let (p, best) = v
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc });
        if best < 1e-9 {
            return false;
        }
        let pv = v[p];
        for x in v.iter_mut() {
            *x /= pv;
        }
        for (_, b) in self.basis.iter_mut() {
            let f = b[p];
            if f != 0.0 {
                for (x, y) in b.iter_mut().zip(&v) {
                    *x -= f * y;
                }
            }
        }
        self.basis.push((p, v));
        true
    }
}

/// Perron–Frobenius eigenpair of a non-negative integer matrix.
///
/// Power iteration on `A + I` (which is aperiodic for any strongly connected
/// `A`) followed by shifted inverse iteration to reach full precision. The
/// vector is positive and scaled so that entry `unit` equals one.
pub fn perron_frobenius<T: Scalar>(adj: &[Vec<u32>], unit: usize) -> (T, Vec<T>) {
    let n = adj.len();
    let a: Vec<Vec<T>> = adj
        .iter()
        .map(|r| r.iter().map(|&x| T::int(x as i64)).collect())
        .collect();
    let apply = |v: &[T]| -> Vec<T> {
        (0..n)
            .map(|i| a[i].iter().zip(v).fold(T::zero(), |s, (x, y)| s + *x * *y))
            .collect()
    };
    let mut v = vec![T::one(); n];
    for _ in 0..20000 {
        let mut w = apply(&v);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += *vi;
        }
        let norm = w.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        for x in w.iter_mut() {
            *x /= norm;
        }
        let diff = w.iter().zip(&v).fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()));
        v = w;
        if diff.to_f64_lossy() < 1e-13 {
            break;
        }
    }
    // Shifted inverse iteration; the shift is refreshed from the Rayleigh-type
    // ratio at the largest component.
    for _ in 0..4 {
        let av = apply(&v);
        let (imax, _) = v
            .iter()
            .enumerate()
            .fold((0, T::zero()), |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc });
        let lambda = av[imax] / v[imax];
        let shift = lambda + T::of(1e-12) * (T::one() + lambda.abs());
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                *m.at_mut(i, j) = a[i][j];
            }
            *m.at_mut(i, i) -= shift;
        }
        let mut w = v.clone();
        if !solve_square(&mut m, &mut w) {
            break;
        }
        let norm = w.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        let sign = if w[imax] < T::zero() { -T::one() } else { T::one() };
        v = w.into_iter().map(|x| sign * x / norm).collect();
    }
    let av = apply(&v);
    let (imax, _) = v
        .iter()
        .enumerate()
        .fold((0, T::zero()), |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc });
    let lambda = av[imax] / v[imax];
    let u = v[unit];
    (lambda, v.into_iter().map(|x| x / u).collect())
}
