//! Levenberg–Marquardt on small dense problems, with an optional projection
//! applied after every step (used for the `x ≥ 0` moduli constraint).

use crate::numerics::linalg::{solve_square, Matrix};
use crate::numerics::Scalar;

pub(crate) trait LeastSquares<T: Scalar>: Sync {
    fn params(&self) -> usize;
    /// Residual vector, and the Jacobian when asked for.
    fn eval(&self, p: &[T], jac: Option<&mut Matrix<T>>) -> Vec<T>;
    fn project(&self, _p: &mut [T]) {}
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LmSettings {
    pub max_iterations: usize,
    /// Stop once every residual is below this.
    pub target: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct LmOutcome<T> {
    pub params: Vec<T>,
    pub max_residual: T,
}

fn max_abs<T: Scalar>(r: &[T]) -> T {
    r.iter().fold(T::zero(), |m, x| if x.abs() > m || x.is_nan() { x.abs() } else { m })
}

fn cost<T: Scalar>(r: &[T]) -> T {
    r.iter().fold(T::zero(), |s, x| s + *x * *x)
}

pub(crate) fn levenberg_marquardt<T: Scalar, P: LeastSquares<T> + ?Sized>(
    prob: &P,
    start: Vec<T>,
    settings: LmSettings,
) -> LmOutcome<T> {
    let n = prob.params();
    let mut p = start;
    prob.project(&mut p);
    let mut r = prob.eval(&p, None);
    let mut c = cost(&r);
    let mut lambda = T::of(1e-3);
    let target = T::of(settings.target);
    let mut stalls = 0;
    for _ in 0..settings.max_iterations {
        if max_abs(&r) < target || c.is_nan() {
            break;
        }
        let m = r.len();
        let mut jac = Matrix::zeros(m, n);
        r = prob.eval(&p, Some(&mut jac));
        // Normal equations JᵀJ δ = −Jᵀr.
        let mut jtj = Matrix::zeros(n, n);
        let mut g = vec![T::zero(); n];
        for i in 0..m {
            let row = &jac.data[i * n..(i + 1) * n];
            for (a, &ja) in row.iter().enumerate() {
                if ja == T::zero() {
                    continue;
                }
                g[a] += ja * r[i];
                for (b, &jb) in row.iter().enumerate().skip(a) {
                    *jtj.at_mut(a, b) += ja * jb;
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                let v = jtj.at(b, a);
                *jtj.at_mut(a, b) = v;
            }
        }
        let dmax = (0..n).fold(T::zero(), |mx, a| mx.max(jtj.at(a, a)));
        let floor = dmax * T::of(1e-12) + T::min_positive_value();
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for d in 0..n {
                let v = a.at(d, d).max(floor);
                *a.at_mut(d, d) += lambda * v;
            }
            let mut step: Vec<T> = g.iter().map(|x| -*x).collect();
            if !solve_square(&mut a, &mut step) {
                lambda *= T::int(8);
                continue;
            }
            let mut trial: Vec<T> = p.iter().zip(&step).map(|(x, d)| *x + *d).collect();
            prob.project(&mut trial);
            let rt = prob.eval(&trial, None);
            let ct = cost(&rt);
            if ct < c {
                let gain = (c - ct) / c.max(T::min_positive_value());
                p = trial;
                r = rt;
                c = ct;
                lambda = (lambda / T::int(3)).max(T::of(1e-15));
                improved = true;
                stalls = if gain < T::of(1e-12) { stalls + 1 } else { 0 };
                break;
            }
            lambda *= T::int(4);
            if lambda > T::of(1e16) {
                break;
            }
        }
        if !improved || stalls > 8 {
            break;
        }
    }
    LmOutcome { max_residual: max_abs(&r), params: p }
}
