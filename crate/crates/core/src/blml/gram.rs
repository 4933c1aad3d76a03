//! Sinc Gram matrix `S_ij = kernel(p_i − p_j)`, dense or applied on the fly.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::numerics::sinc::{check_fc, sinc_kernel};

use super::points::SupportPoints;

/// Largest support size for which the Gram matrix is stored.
pub const DENSE_GRAM_LIMIT: usize = 4096;

/// Dense Gram matrix of the support points.
pub fn gram_matrix(points: &SupportPoints, fc: f64) -> Result<DMatrix<f64>> {
    check_fc(fc)?;
    points.validate()?;
    Ok(dense(points, fc))
}

fn dense(points: &SupportPoints, fc: f64) -> DMatrix<f64> {
    let b = points.len();
    let mut s = DMatrix::zeros(b, b);
    for j in 0..b {
        for i in j..b {
            let v = points.kernel(i, j, fc);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

/// One axis of the implicit operator: `sin(π·fc·p)` and `cos(π·fc·p)` per point.
pub(crate) struct Axis {
    p: Vec<f64>,
    sin: Vec<f64>,
    cos: Vec<f64>,
}

impl Axis {
    fn new(p: Vec<f64>, fc: f64) -> Self {
        let (sin, cos) = p.iter().map(|&v| (PI * fc * v).sin_cos()).unzip();
        Axis { p, sin, cos }
    }

    /// `sin(π·fc·(p_i − p_j))/(π·(p_i − p_j))` via the angle-difference identity,
    /// falling back to the direct form for close pairs where the identity cancels.
    #[inline]
    fn kernel(&self, i: usize, j: usize, fc: f64) -> f64 {
        let d = self.p[i] - self.p[j];
        if (d * fc).abs() < 0.05 {
            sinc_kernel(d, fc)
        } else {
            (self.sin[i] * self.cos[j] - self.cos[i] * self.sin[j]) / (PI * d)
        }
    }
}

pub(crate) enum GramOperator {
    Dense(DMatrix<f64>),
    Implicit { fc: f64, axes: Vec<Axis> },
}

impl GramOperator {
    pub(crate) fn new(points: &SupportPoints, fc: f64) -> Self {
        if points.len() <= DENSE_GRAM_LIMIT {
            return GramOperator::Dense(dense(points, fc));
        }
        let axes = match points {
            SupportPoints::OneD(p) => vec![Axis::new(p.clone(), fc)],
            SupportPoints::TwoD(p) => {
                vec![Axis::new(p.iter().map(|v| v.0).collect(), fc), Axis::new(p.iter().map(|v| v.1).collect(), fc)]
            }
        };
        GramOperator::Implicit { fc, axes }
    }

    /// `out = S·v`.
    pub(crate) fn apply(&self, v: &[f64], out: &mut [f64]) {
        match self {
            GramOperator::Dense(s) => {
                let v = DVector::from_column_slice(v);
                let r = s * v;
                out.copy_from_slice(r.as_slice());
            }
            GramOperator::Implicit { fc, axes } => {
                let b = v.len();
                for (i, o) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (j, &vj) in v.iter().enumerate().take(b) {
                        let mut k = 1.0;
                        for ax in axes {
                            k *= ax.kernel(i, j, *fc);
                        }
                        acc += k * vj;
                    }
                    *o = acc;
                }
            }
        }
    }

    pub(crate) fn diagonal_entry(&self, i: usize, fc: f64, dims: usize) -> f64 {
        match self {
            GramOperator::Dense(s) => s[(i, i)],
            GramOperator::Implicit { .. } => fc.powi(dims as i32),
        }
    }
}
