//! Mutual dependence estimated from band-limited fits of the joint and both marginals.

use crate::blml::{bin_1d, bin_2d, merge_duplicates_1d, merge_duplicates_2d, solve_blml, Binned, BlmlFit};
use crate::error::{Error, Result};
use crate::models::SampleSet;
use crate::numerics::sinc::check_fc;
use crate::numerics::NewtonOptions;

/// The three fits behind one estimate, with each sample's support index per fit.
#[derive(Debug, Clone)]
pub struct MdepFits {
    pub joint: BlmlFit,
    pub x: BlmlFit,
    pub y: BlmlFit,
    pub joint_assignment: Vec<usize>,
    pub x_assignment: Vec<usize>,
    pub y_assignment: Vec<usize>,
}

fn fit(binned: Binned, fc: f64, opts: &NewtonOptions, name: &'static str) -> Result<(BlmlFit, Vec<usize>)> {
    let f = solve_blml(&binned.points, &binned.weights, fc, opts).map_err(|e| Error::Fit { fit: name, source: Box::new(e) })?;
    Ok((f, binned.assignment))
}

/// Fits joint and marginal densities with the same cut-off `fc`. With
/// `quick`, samples are binned on the grid of spacing `1/(2·fc)`; otherwise
/// only exactly repeated values are merged.
pub fn fit_mdep(sample: &SampleSet, fc: f64, quick: bool, opts: &NewtonOptions) -> Result<MdepFits> {
    check_fc(fc)?;
    let (xs, ys) = (sample.xs(), sample.ys());
    let (jb, xb, yb) = if quick {
        (bin_2d(xs, ys, fc)?, bin_1d(xs, fc)?, bin_1d(ys, fc)?)
    } else {
        (merge_duplicates_2d(xs, ys)?, merge_duplicates_1d(xs)?, merge_duplicates_1d(ys)?)
    };
    let (joint, joint_assignment) = fit(jb, fc, opts, "joint")?;
    let (x, x_assignment) = fit(xb, fc, opts, "x-marginal")?;
    let (y, y_assignment) = fit(yb, fc, opts, "y-marginal")?;
    Ok(MdepFits { joint, x, y, joint_assignment, x_assignment, y_assignment })
}

impl MdepFits {
    /// `d̂ = √(1 − (1/n)·Σ_i ĉ_i^{XY}/(ĉ_i^X·ĉ_i^Y))`.
    pub fn estimate(&self) -> f64 {
        let n = self.joint_assignment.len();
        let mut sum = 0.0;
        for i in 0..n {
            let cxy = self.joint.coeffs[self.joint_assignment[i]];
            let cx = self.x.coeffs[self.x_assignment[i]];
            let cy = self.y.coeffs[self.y_assignment[i]];
            sum += cxy / (cx * cy);
        }
        let radicand = 1.0 - sum / n as f64;
        // The ratios carry a few ulps of solver rounding; below that the
        // radicand is indistinguishable from zero.
        if radicand <= 16.0 * f64::EPSILON {
            0.0
        } else {
            radicand.min(1.0).sqrt()
        }
    }
}

/// Mutual dependence estimate `d̂` of `sample` at cut-off `fc`.
pub fn mutual_dependence(sample: &SampleSet, fc: f64, quick: bool) -> Result<f64> {
    Ok(fit_mdep(sample, fc, quick, &NewtonOptions::default())?.estimate())
}
