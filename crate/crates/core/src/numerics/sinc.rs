//! Sinc kernels with an explicit cut-off frequency.
//!
//! The kernel is `sinc_fc(x) = sin(π·fc·x) / (π·x)`, whose Fourier transform is
//! the indicator of `[-fc/2, fc/2]`. With this scaling `sinc_fc(0) = fc` and
//! `∫ sinc_fc(x)² dx = fc`, which is what makes a fitted band-limited density
//! integrate to one under the coefficient constraints.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `sin(π·fc·x) / (π·x)`, with the removable singularity at zero evaluated as `fc`.
pub fn sinc_fc(x: f64, fc: f64) -> Result<f64> {
    check_fc(fc)?;
    if !x.is_finite() {
        return Err(Error::invalid(format!("sinc argument must be finite, got {x}")));
    }
    Ok(sinc_kernel(x, fc))
}

/// Coordinate-product kernel `sinc_fc(dx) · sinc_fc(dy)`.
pub fn sinc2d(dx: f64, dy: f64, fc: f64) -> Result<f64> {
    Ok(sinc_fc(dx, fc)? * sinc_fc(dy, fc)?)
}

/// Unchecked kernel for inner loops. Callers guarantee `fc > 0` and finite `x`.
#[inline]
pub(crate) fn sinc_kernel(x: f64, fc: f64) -> f64 {
    if x == 0.0 {
        fc
    } else {
        (PI * fc * x).sin() / (PI * x)
    }
}

/// Normalized sinc `sin(π·u) / (π·u)`.
#[inline]
pub fn sinc_unit(u: f64) -> f64 {
    sinc_kernel(u, 1.0)
}

pub(crate) fn check_fc(fc: f64) -> Result<()> {
    if fc.is_finite() && fc > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("cut-off frequency must be finite and > 0, got {fc}")))
    }
}
