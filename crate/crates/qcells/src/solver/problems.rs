//! Least-squares formulations of the coherence system.

use num_complex::Complex;

use super::lm::LeastSquares;
use crate::cell_system::equations::Equation;
use crate::numerics::linalg::Matrix;
use crate::numerics::Scalar;

/// An equation in the squared moduli `x_t = |T_t|²`: `Σ coef Π x − rhs`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ModulusEquation<T> {
    pub rhs: T,
    pub terms: Vec<(T, Vec<u32>)>,
}

impl<T: Scalar> ModulusEquation<T> {
    /// Rewrite an equation whose every term pairs each `T_t` with a `conj T_t`.
    pub fn from_equation(eq: &Equation<T>) -> Option<Self> {
        let mut terms = Vec::with_capacity(eq.terms.len());
        for term in &eq.terms {
            let mut plain: Vec<u32> = term.factors.iter().filter(|f| !f.conj).map(|f| f.tri).collect();
            let mut conj: Vec<u32> = term.factors.iter().filter(|f| f.conj).map(|f| f.tri).collect();
            plain.sort_unstable();
            conj.sort_unstable();
            if plain != conj {
                return None;
            }
            terms.push((term.coef, plain));
        }
        Some(Self { rhs: eq.rhs, terms })
    }

    pub fn residual(&self, x: &[T]) -> T {
        self.terms
            .iter()
            .fold(-self.rhs, |s, (c, f)| s + f.iter().fold(*c, |p, &t| p * x[t as usize]))
    }

    pub fn unknowns(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().flat_map(|(_, f)| f.iter().map(|&t| t as usize))
    }
}

pub(crate) struct ModuliProblem<T> {
    pub n: usize,
    pub equations: Vec<ModulusEquation<T>>,
}

impl<T: Scalar> LeastSquares<T> for ModuliProblem<T> {
    fn params(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[T], jac: Option<&mut Matrix<T>>) -> Vec<T> {
        if let Some(j) = jac {
            j.data.iter_mut().for_each(|v| *v = T::zero());
            for (i, eq) in self.equations.iter().enumerate() {
                for (c, f) in &eq.terms {
                    for k in 0..f.len() {
                        let d = f
                            .iter()
                            .enumerate()
                            .filter(|&(m, _)| m != k)
                            .fold(*c, |p, (_, &t)| p * x[t as usize]);
                        *j.at_mut(i, f[k] as usize) += d;
                    }
                }
            }
        }
        self.equations.iter().map(|e| e.residual(x)).collect()
    }

    fn project(&self, x: &mut [T]) {
        for v in x.iter_mut() {
            if *v < T::zero() {
                *v = T::zero();
            }
        }
    }
}

/// All cells as free complex unknowns, parameters `[Re T_0, Im T_0, Re T_1, …]`.
pub(crate) struct ComplexProblem<'a, T> {
    pub n: usize,
    pub equations: &'a [Equation<T>],
}

pub(crate) fn unpack<T: Scalar>(p: &[T]) -> Vec<Complex<T>> {
    p.chunks(2).map(|c| Complex::new(c[0], c[1])).collect()
}

pub(crate) fn pack<T: Scalar>(cells: &[Complex<T>]) -> Vec<T> {
    cells.iter().flat_map(|z| [z.re, z.im]).collect()
}

impl<T: Scalar> LeastSquares<T> for ComplexProblem<'_, T> {
    fn params(&self) -> usize {
        2 * self.n
    }

    fn eval(&self, p: &[T], jac: Option<&mut Matrix<T>>) -> Vec<T> {
        let cells = unpack(p);
        if let Some(j) = jac {
            j.data.iter_mut().for_each(|v| *v = T::zero());
            for (i, eq) in self.equations.iter().enumerate() {
                eq.wirtinger(&cells, |t, w, wb| {
                    // ∂r/∂u = w + w̄, ∂r/∂v = i (w − w̄).
                    let du = w + wb;
                    let dv = (w - wb) * Complex::new(T::zero(), T::one());
                    *j.at_mut(2 * i, 2 * t) += du.re;
                    *j.at_mut(2 * i + 1, 2 * t) += du.im;
                    *j.at_mut(2 * i, 2 * t + 1) += dv.re;
                    *j.at_mut(2 * i + 1, 2 * t + 1) += dv.im;
                });
            }
        }
        self.equations
            .iter()
            .flat_map(|e| {
                let r = e.residual(&cells);
                [r.re, r.im]
            })
            .collect()
    }
}

/// Fixed moduli, unknown phases on the `free` cells only.
pub(crate) struct PhaseProblem<'a, T> {
    pub base: Vec<Complex<T>>,
    pub free: Vec<usize>,
    pub equations: Vec<&'a Equation<T>>,
}

impl<T: Scalar> PhaseProblem<'_, T> {
    pub fn cells(&self, phases: &[T]) -> Vec<Complex<T>> {
        let mut cells = self.base.clone();
        for (&t, &phi) in self.free.iter().zip(phases) {
            cells[t] = Complex::new(cells[t].norm(), T::zero()) * Complex::new(phi.cos_full(), phi.sin_full());
        }
        cells
    }
}

impl<T: Scalar> LeastSquares<T> for PhaseProblem<'_, T> {
    fn params(&self) -> usize {
        self.free.len()
    }

    fn eval(&self, p: &[T], jac: Option<&mut Matrix<T>>) -> Vec<T> {
        let cells = self.cells(p);
        if let Some(j) = jac {
            j.data.iter_mut().for_each(|v| *v = T::zero());
            let mut slot = vec![usize::MAX; cells.len()];
            for (k, &t) in self.free.iter().enumerate() {
                slot[t] = k;
            }
            let i_unit = Complex::new(T::zero(), T::one());
            for (i, eq) in self.equations.iter().enumerate() {
                eq.wirtinger(&cells, |t, w, wb| {
                    let k = slot[t];
                    if k == usize::MAX {
                        return;
                    }
                    // dT/dφ = iT.
                    let d = i_unit * (w * cells[t] - wb * cells[t].conj());
                    *j.at_mut(2 * i, k) += d.re;
                    *j.at_mut(2 * i + 1, k) += d.im;
                });
            }
        }
        self.equations
            .iter()
            .flat_map(|e| {
                let r = e.residual(&cells);
                [r.re, r.im]
            })
            .collect()
    }
}
