//! Damped Newton iteration for square nonlinear systems.
//!
//! The step is damped by halving until the candidate is feasible and the
//! merit `½‖r‖²` satisfies an Armijo decrease. How the linear Newton system
//! is solved is left to the [`NewtonSystem`] implementation, so large
//! structured problems can use an iterative solver.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub trait NewtonSystem {
    fn residual(&self, x: &[f64]) -> Vec<f64>;

    /// Solves `J(x)·δ = −r` for the Newton direction `δ`.
    fn newton_step(&self, x: &[f64], residual: &[f64]) -> Result<Vec<f64>>;

    fn is_feasible(&self, x: &[f64]) -> bool {
        x.iter().all(|v| v.is_finite())
    }

    /// Rounding floor below which the residual cannot be resolved at `x`.
    fn residual_floor(&self, _x: &[f64]) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: u32,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-9, max_iter: 200, max_halvings: 30 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSolution {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    /// Tolerance actually enforced: `max(tol, residual floor)`.
    pub tolerance: f64,
    pub iterations: usize,
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn half_sq_norm(v: &[f64]) -> f64 {
    0.5 * v.iter().map(|x| x * x).sum::<f64>()
}

/// Runs damped Newton from `x0` until `‖r‖∞ ≤ max(tol, floor)`.
pub fn damped_newton<S: NewtonSystem + ?Sized>(
    system: &S,
    x0: Vec<f64>,
    opts: &NewtonOptions,
) -> Result<NewtonSolution> {
    if !system.is_feasible(&x0) {
        return Err(Error::invalid("Newton starting point is not feasible"));
    }
    let mut x = x0;
    let mut r = system.residual(&x);
    let mut norm = inf_norm(&r);
    if !norm.is_finite() {
        return Err(Error::NonConvergence { iterations: 0, residual_norm: norm });
    }
    let mut trial = vec![0.0; x.len()];

    for iter in 0..=opts.max_iter {
        let tolerance = opts.tol.max(system.residual_floor(&x));
        if norm <= tolerance {
            return Ok(NewtonSolution { x, residual_norm: norm, tolerance, iterations: iter });
        }
        if iter == opts.max_iter {
            break;
        }
        let step = system.newton_step(&x, &r)?;
        let merit = half_sq_norm(&r);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            for ((tv, xv), sv) in trial.iter_mut().zip(&x).zip(&step) {
                *tv = xv + t * sv;
            }
            if system.is_feasible(&trial) {
                let rt = system.residual(&trial);
                let mt = half_sq_norm(&rt);
                // Armijo on ½‖r‖², whose slope along the Newton direction is −‖r‖².
                if mt.is_finite() && mt <= (1.0 - 1e-4 * t) * merit {
                    accepted = Some(rt);
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some(rt) => {
                std::mem::swap(&mut x, &mut trial);
                r = rt;
                norm = inf_norm(&r);
            }
            None => {
                return Err(Error::NonConvergence { iterations: iter, residual_norm: norm });
            }
        }
    }
    Err(Error::NonConvergence { iterations: opts.max_iter, residual_norm: norm })
}

struct DenseSystem<R, J> {
    residual: R,
    jacobian: J,
    positive: bool,
}

impl<R, J> NewtonSystem for DenseSystem<R, J>
where
    R: Fn(&[f64]) -> Vec<f64>,
    J: Fn(&[f64]) -> DMatrix<f64>,
{
    fn residual(&self, x: &[f64]) -> Vec<f64> {
        (self.residual)(x)
    }

    fn newton_step(&self, x: &[f64], residual: &[f64]) -> Result<Vec<f64>> {
        let jac = (self.jacobian)(x);
        let rhs = -DVector::from_column_slice(residual);
        jac.lu()
            .solve(&rhs)
            .map(|d| d.as_slice().to_vec())
            .ok_or(Error::NonConvergence { iterations: 0, residual_norm: inf_norm(residual) })
    }

    fn is_feasible(&self, x: &[f64]) -> bool {
        x.iter().all(|v| v.is_finite() && (!self.positive || *v > 0.0))
    }
}

/// Dense damped Newton with an explicit Jacobian.
///
/// When `x0` lies in the open positive orthant every iterate is kept there.
pub fn solve_newton<R, J>(residual: R, jacobian: J, x0: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>>
where
    R: Fn(&[f64]) -> Vec<f64>,
    J: Fn(&[f64]) -> DMatrix<f64>,
{
    let positive = !x0.is_empty() && x0.iter().all(|v| *v > 0.0);
    let system = DenseSystem { residual, jacobian, positive };
    let opts = NewtonOptions { tol, max_iter, ..NewtonOptions::default() };
    damped_newton(&system, x0.to_vec(), &opts).map(|s| s.x)
}
