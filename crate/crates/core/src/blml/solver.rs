//! Coefficient solver for the band-limited maximum-likelihood fit.
//!
//! The coefficients solve `ρ_i(c) = Σ_j w_j·c_j·S_ij − n/c_i = 0` on the
//! positive orthant. Scaling row `i` by `w_i` turns the Jacobian into the
//! symmetric positive definite `W·S·W + diag(n·w_i/c_i²)`, the Hessian of the
//! strictly convex `½·cᵀWSWc − n·Σ w_i·ln c_i`. Each Newton direction is
//! therefore found by preconditioned conjugate gradients.

use crate::error::{Error, Result};
use crate::numerics::sinc::check_fc;
use crate::numerics::{damped_newton, NewtonOptions, NewtonSystem};

use super::gram::GramOperator;
use super::points::SupportPoints;

/// Fitted band-limited density `f̂(x) = ((1/n)·Σ_b w_b·c_b·kernel(x − p_b))²`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlmlFit {
    pub points: SupportPoints,
    pub weights: Vec<u64>,
    pub coeffs: Vec<f64>,
    pub fc: f64,
    pub n_total: u64,
    /// Achieved `‖ρ(ĉ)‖∞`.
    pub residual_norm: f64,
    /// Tolerance the solver enforced, `max(tol, rounding floor)`.
    pub tolerance: f64,
    pub iterations: usize,
}

struct CoefficientSystem<'a> {
    gram: &'a GramOperator,
    w: Vec<f64>,
    n: f64,
    s_diag: Vec<f64>,
    kernel_max: f64,
}

impl CoefficientSystem<'_> {
    fn weighted_product(&self, c: &[f64]) -> Vec<f64> {
        let wc: Vec<f64> = c.iter().zip(&self.w).map(|(c, w)| c * w).collect();
        let mut out = vec![0.0; c.len()];
        self.gram.apply(&wc, &mut out);
        out
    }
}

impl NewtonSystem for CoefficientSystem<'_> {
    fn residual(&self, c: &[f64]) -> Vec<f64> {
        let mut r = self.weighted_product(c);
        for (ri, ci) in r.iter_mut().zip(c) {
            *ri -= self.n / ci;
        }
        r
    }

    fn newton_step(&self, c: &[f64], r: &[f64]) -> Result<Vec<f64>> {
        let b = c.len();
        let d: Vec<f64> = (0..b).map(|i| self.n * self.w[i] / (c[i] * c[i])).collect();
        let precond: Vec<f64> = (0..b).map(|i| self.w[i] * self.w[i] * self.s_diag[i] + d[i]).collect();
        let rhs: Vec<f64> = (0..b).map(|i| -self.w[i] * r[i]).collect();
        let mut wv = vec![0.0; b];
        let mut swv = vec![0.0; b];
        let apply = |v: &[f64], out: &mut [f64]| {
            for i in 0..b {
                wv[i] = self.w[i] * v[i];
            }
            self.gram.apply(&wv, &mut swv);
            for i in 0..b {
                out[i] = self.w[i] * swv[i] + d[i] * v[i];
            }
        };
        Ok(pcg(apply, &precond, &rhs, 1e-13, 50 + 2 * b.min(500)))
    }

    fn is_feasible(&self, c: &[f64]) -> bool {
        c.iter().all(|v| v.is_finite() && *v > 0.0)
    }

    fn residual_floor(&self, c: &[f64]) -> f64 {
        // Rounding bound on the accumulated products Σ_j S_ij·w_j·c_j.
        let mass: f64 = c.iter().zip(&self.w).map(|(c, w)| c * w).sum();
        4.0 * f64::EPSILON * self.kernel_max * mass
    }
}

/// Preconditioned conjugate gradients for a symmetric positive definite operator,
/// started from zero.
fn pcg(mut apply: impl FnMut(&[f64], &mut [f64]), precond: &[f64], b: &[f64], rel_tol: f64, max_iter: usize) -> Vec<f64> {
    let n = b.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let target = rel_tol * dot(b, b).sqrt();
    let mut z: Vec<f64> = r.iter().zip(precond).map(|(r, m)| r / m).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        if dot(&r, &r).sqrt() <= target {
            break;
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap.is_nan() || pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] / precond[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    x
}

/// Solves the coefficient system for weighted, distinct support points.
///
/// Starts from `c_i = √(n/Σ_j w_j·S_ij)` (exact when `S` is diagonal); if the
/// damped iteration fails it restarts once from `c_i = √(n/(w_i·S_ii))`.
pub fn solve_blml(points: &SupportPoints, weights: &[u64], fc: f64, opts: &NewtonOptions) -> Result<BlmlFit> {
    check_fc(fc)?;
    points.validate()?;
    if weights.len() != points.len() {
        return Err(Error::invalid(format!("{} weights for {} support points", weights.len(), points.len())));
    }
    if weights.contains(&0) {
        return Err(Error::invalid("weights must be at least 1"));
    }
    let b = points.len();
    let dims = points.dims();
    let gram = GramOperator::new(points, fc);
    let n_total: u64 = weights.iter().sum();
    let n = n_total as f64;
    let system = CoefficientSystem {
        gram: &gram,
        w: weights.iter().map(|&w| w as f64).collect(),
        n,
        s_diag: (0..b).map(|i| gram.diagonal_entry(i, fc, dims)).collect(),
        kernel_max: fc.powi(dims as i32),
    };

    let fallback: Vec<f64> = (0..b).map(|i| (n / (system.w[i] * system.s_diag[i])).sqrt()).collect();
    let row_sums = system.weighted_product(&vec![1.0; b]);
    let init: Vec<f64> = row_sums.iter().zip(&fallback).map(|(&s, &f)| if s > 0.0 { (n / s).sqrt() } else { f }).collect();

    let solution = match damped_newton(&system, init.clone(), opts) {
        Ok(sol) => sol,
        Err(Error::NonConvergence { .. }) if init != fallback => damped_newton(&system, fallback, opts)?,
        Err(e) => return Err(e),
    };
    Ok(BlmlFit {
        points: points.clone(),
        weights: weights.to_vec(),
        coeffs: solution.x,
        fc,
        n_total,
        residual_norm: solution.residual_norm,
        tolerance: solution.tolerance,
        iterations: solution.iterations,
    })
}

impl BlmlFit {
    pub fn dims(&self) -> usize {
        self.points.dims()
    }

    /// `(1/n)·Σ_b w_b·c_b·kernel(x − p_b)`, the square root of the density up to sign.
    fn amplitude(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, (&w, &c)) in self.weights.iter().zip(&self.coeffs).enumerate() {
            acc += w as f64 * c * self.points.kernel_to(i, x, self.fc);
        }
        acc / self.n_total as f64
    }

    /// Density at `x`, which must have `dims` coordinates.
    pub fn pdf(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dims() {
            return Err(Error::invalid(format!("expected a {}-D point, got {} coordinates", self.dims(), x.len())));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("evaluation point must be finite"));
        }
        let a = self.amplitude(x);
        Ok(a * a)
    }

    /// `∫f̂ = (1/n²)·cᵀ·W·S·W·c`, equal to 1 when the constraints hold.
    pub fn integral(&self) -> f64 {
        let wc: Vec<f64> = self.weights.iter().zip(&self.coeffs).map(|(&w, &c)| w as f64 * c).collect();
        let mut swc = vec![0.0; wc.len()];
        GramOperator::new(&self.points, self.fc).apply(&wc, &mut swc);
        let n = self.n_total as f64;
        wc.iter().zip(&swc).map(|(a, b)| a * b).sum::<f64>() / (n * n)
    }

    /// Constraint residual `ρ(ĉ)` recomputed from scratch.
    pub fn constraint_residual(&self) -> Vec<f64> {
        let wc: Vec<f64> = self.weights.iter().zip(&self.coeffs).map(|(&w, &c)| w as f64 * c).collect();
        let mut r = vec![0.0; wc.len()];
        GramOperator::new(&self.points, self.fc).apply(&wc, &mut r);
        let n = self.n_total as f64;
        for (ri, ci) in r.iter_mut().zip(&self.coeffs) {
            *ri -= n / ci;
        }
        r
    }
}

/// Density of `fit` at `x`.
pub fn pdf_eval(fit: &BlmlFit, x: &[f64]) -> Result<f64> {
    fit.pdf(x)
}

/// Closed-form total mass of `fit`.
pub fn pdf_integral(fit: &BlmlFit) -> f64 {
    fit.integral()
}
