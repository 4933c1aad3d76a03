//! Support points of a fit and the binning that produces them.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::numerics::sinc::{check_fc, sinc_kernel};

/// Distinct support points in one or two dimensions.
#[derive(Debug, Clone, PartialEq)]
pub enum SupportPoints {
    OneD(Vec<f64>),
    TwoD(Vec<(f64, f64)>),
}

impl SupportPoints {
    pub fn len(&self) -> usize {
        match self {
            SupportPoints::OneD(p) => p.len(),
            SupportPoints::TwoD(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dims(&self) -> usize {
        match self {
            SupportPoints::OneD(_) => 1,
            SupportPoints::TwoD(_) => 2,
        }
    }

    /// Kernel between support point `i` and the point `x` (length `dims`).
    #[inline]
    pub(crate) fn kernel_to(&self, i: usize, x: &[f64], fc: f64) -> f64 {
        match self {
            SupportPoints::OneD(p) => sinc_kernel(x[0] - p[i], fc),
            SupportPoints::TwoD(p) => sinc_kernel(x[0] - p[i].0, fc) * sinc_kernel(x[1] - p[i].1, fc),
        }
    }

    #[inline]
    pub(crate) fn kernel(&self, i: usize, j: usize, fc: f64) -> f64 {
        match self {
            SupportPoints::OneD(p) => sinc_kernel(p[i] - p[j], fc),
            SupportPoints::TwoD(p) => sinc_kernel(p[i].0 - p[j].0, fc) * sinc_kernel(p[i].1 - p[j].1, fc),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::invalid("a fit needs at least one support point"));
        }
        let finite = match self {
            SupportPoints::OneD(p) => p.iter().all(|v| v.is_finite()),
            SupportPoints::TwoD(p) => p.iter().all(|v| v.0.is_finite() && v.1.is_finite()),
        };
        if !finite {
            return Err(Error::invalid("support points must be finite"));
        }
        let mut seen = HashMap::with_capacity(self.len());
        for i in 0..self.len() {
            let key = match self {
                SupportPoints::OneD(p) => (bits(p[i]), 0),
                SupportPoints::TwoD(p) => (bits(p[i].0), bits(p[i].1)),
            };
            if seen.insert(key, i).is_some() {
                return Err(Error::DuplicatePoints { index: i });
            }
        }
        Ok(())
    }
}

/// Bit pattern with `−0.0` folded onto `0.0`.
fn bits(v: f64) -> u64 {
    (v + 0.0).to_bits()
}

/// Distinct support points with multiplicities, plus the support index of
/// every input sample. Points are ordered by first appearance in the input.
#[derive(Debug, Clone, PartialEq)]
pub struct Binned {
    pub points: SupportPoints,
    pub weights: Vec<u64>,
    pub assignment: Vec<usize>,
}

impl Binned {
    pub fn n_total(&self) -> u64 {
        self.weights.iter().sum()
    }
}

fn group<K: std::hash::Hash + Eq + Copy>(keys: impl Iterator<Item = K>) -> (Vec<K>, Vec<u64>, Vec<usize>) {
    let mut index: HashMap<K, usize> = HashMap::new();
    let mut order = Vec::new();
    let mut weights = Vec::new();
    let mut assignment = Vec::new();
    for k in keys {
        let idx = *index.entry(k).or_insert_with(|| {
            order.push(k);
            weights.push(0);
            order.len() - 1
        });
        weights[idx] += 1;
        assignment.push(idx);
    }
    (order, weights, assignment)
}

/// Grid spacing `1/(2·fc)` used for binning.
pub fn bin_width(fc: f64) -> f64 {
    0.5 / fc
}

fn grid_index(v: f64, delta: f64) -> Result<i64> {
    let k = (v / delta).round();
    if !k.is_finite() || k.abs() > 4.0e18 {
        return Err(Error::invalid(format!("value {v} cannot be binned at spacing {delta}")));
    }
    Ok(k as i64)
}

/// Snaps every value to the nearest centre of the grid `k·Δ`, `Δ = 1/(2·fc)`.
pub fn bin_1d(values: &[f64], fc: f64) -> Result<Binned> {
    check_fc(fc)?;
    let delta = bin_width(fc);
    let keys: Vec<i64> = values.iter().map(|&v| grid_index(v, delta)).collect::<Result<_>>()?;
    let (order, weights, assignment) = group(keys.into_iter());
    let points = SupportPoints::OneD(order.into_iter().map(|k| k as f64 * delta).collect());
    Ok(Binned { points, weights, assignment })
}

/// Two-dimensional binning on the same aligned grid along each axis.
pub fn bin_2d(xs: &[f64], ys: &[f64], fc: f64) -> Result<Binned> {
    check_fc(fc)?;
    if xs.len() != ys.len() {
        return Err(Error::invalid("xs and ys differ in length"));
    }
    let delta = bin_width(fc);
    let keys: Vec<(i64, i64)> =
        xs.iter().zip(ys).map(|(&x, &y)| Ok((grid_index(x, delta)?, grid_index(y, delta)?))).collect::<Result<_>>()?;
    let (order, weights, assignment) = group(keys.into_iter());
    let points = SupportPoints::TwoD(order.into_iter().map(|(i, j)| (i as f64 * delta, j as f64 * delta)).collect());
    Ok(Binned { points, weights, assignment })
}

/// Merges exactly repeated values into weighted support points.
pub fn merge_duplicates_1d(values: &[f64]) -> Result<Binned> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("values must be finite"));
    }
    let (order, weights, assignment) = group(values.iter().map(|&v| bits(v)));
    let points = SupportPoints::OneD(order.into_iter().map(f64::from_bits).collect());
    Ok(Binned { points, weights, assignment })
}

/// Merges exactly repeated pairs into weighted support points.
pub fn merge_duplicates_2d(xs: &[f64], ys: &[f64]) -> Result<Binned> {
    if xs.len() != ys.len() {
        return Err(Error::invalid("xs and ys differ in length"));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::invalid("values must be finite"));
    }
    let (order, weights, assignment) = group(xs.iter().zip(ys).map(|(&x, &y)| (bits(x), bits(y))));
    let points = SupportPoints::TwoD(order.into_iter().map(|(a, b)| (f64::from_bits(a), f64::from_bits(b))).collect());
    Ok(Binned { points, weights, assignment })
}
