//! Integrated mean squared error over the mutual-information axis.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::MeasureKind;

use super::sweep::SweepRecord;

/// Monte-Carlo estimates at one grid point of the information axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ImsePoint {
    pub i: f64,
    pub theoretical: f64,
    pub estimates: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImseValue {
    pub value: f64,
    /// NaN estimates left out of the mean squared errors.
    pub excluded_nan: usize,
}

/// `∫ MSE(I) dI` by the trapezoid rule, with `MSE(I_j)` the mean of
/// `(estimate − theoretical)²` over the runs at `I_j`.
pub fn imse(points: &[ImsePoint]) -> Result<ImseValue> {
    if points.len() < 2 {
        return Err(Error::invalid("IMSE needs at least two grid points"));
    }
    let mut excluded = 0;
    let mut curve = Vec::with_capacity(points.len());
    for p in points {
        if !p.i.is_finite() || !p.theoretical.is_finite() {
            return Err(Error::invalid(format!("grid point I={} has no finite theoretical value", p.i)));
        }
        if p.estimates.len() < 2 {
            return Err(Error::invalid(format!("grid point I={} has fewer than two runs", p.i)));
        }
        let finite: Vec<f64> = p.estimates.iter().copied().filter(|v| !v.is_nan()).collect();
        excluded += p.estimates.len() - finite.len();
        if finite.is_empty() {
            return Err(Error::UndefinedMeasure(format!("every estimate at I={} failed", p.i)));
        }
        let mse = finite.iter().map(|v| (v - p.theoretical).powi(2)).sum::<f64>() / finite.len() as f64;
        curve.push((p.i, mse));
    }
    curve.sort_by(|a, b| a.0.total_cmp(&b.0));
    if curve.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::invalid("IMSE grid points must have distinct I values"));
    }
    let value = curve.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
    Ok(ImseValue { value, excluded_nan: excluded })
}

/// IMSE of one measure in one `(family, nonlinearity)` cell at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImseRow {
    pub family: String,
    pub nonlinearity: String,
    pub measure: MeasureKind,
    pub n: usize,
    pub imse: f64,
    pub grid_points: usize,
    pub excluded_nan: usize,
    pub error: Option<String>,
}

/// One IMSE row per `(family, nonlinearity, measure, n)`, in first-appearance order.
pub fn imse_table(records: &[SweepRecord]) -> Vec<ImseRow> {
    type Key = (String, String, MeasureKind, usize);
    let mut keys: Vec<Key> = Vec::new();
    let mut grids: Vec<Vec<ImsePoint>> = Vec::new();
    let mut rhos: Vec<Vec<f64>> = Vec::new();
    for r in records {
        let key = (r.family.clone(), r.nonlinearity.clone(), r.measure, r.n);
        let g = match keys.iter().position(|k| *k == key) {
            Some(g) => g,
            None => {
                keys.push(key);
                grids.push(Vec::new());
                rhos.push(Vec::new());
                keys.len() - 1
            }
        };
        match rhos[g].iter().position(|&rho| rho == r.rho) {
            Some(p) => grids[g][p].estimates.push(r.estimate),
            None => {
                rhos[g].push(r.rho);
                grids[g].push(ImsePoint { i: r.i_theoretical, theoretical: r.theoretical, estimates: vec![r.estimate] });
            }
        }
    }
    keys.into_iter()
        .zip(grids)
        .map(|((family, nonlinearity, measure, n), points)| {
            let grid_points = points.len();
            let (imse, excluded_nan, error) = match imse(&points) {
                Ok(v) => (v.value, v.excluded_nan, None),
                Err(e) => (f64::NAN, 0, Some(e.to_string())),
            };
            ImseRow { family, nonlinearity, measure, n, imse, grid_points, excluded_nan, error }
        })
        .collect()
}
