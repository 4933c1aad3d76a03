//! Runtime scaling of the estimators.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::MeasureKind;
use crate::models::{sample_model, GenModel};
use crate::numerics::RandomStream;

use super::config::FcRule;
use super::sweep::estimate_measure;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchRow {
    pub measure: MeasureKind,
    pub n: usize,
    pub median_ns: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of `ln(runtime)` against `ln(n)` per measure.
    pub slopes: Vec<(MeasureKind, f64)>,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn median(mut v: Vec<u64>) -> u64 {
    v.sort_unstable();
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2
    }
}

/// Median wall-clock time of each measure over `reps` repetitions at each
/// sample size. Samples are drawn once per size from stream `n` of `seed`.
pub fn bench_complexity(
    n_grid: &[usize],
    model: &GenModel,
    fc_rule: FcRule,
    measures: &[MeasureKind],
    reps: usize,
    seed: u64,
) -> Result<BenchReport> {
    let (lo, hi) = (n_grid.iter().min().copied().unwrap_or(0), n_grid.iter().max().copied().unwrap_or(0));
    if n_grid.len() < 2 || lo < 2 || hi < 4 * lo {
        return Err(Error::invalid("benchmark sizes must span at least a factor of 4 and start at n >= 2"));
    }
    if reps == 0 {
        return Err(Error::invalid("benchmark needs at least one repetition"));
    }
    let fc = fc_rule.cutoff(model.rho);
    let mut rows = Vec::new();
    for &n in n_grid {
        let sample = sample_model(model, n, &mut RandomStream::new(seed, n as u64))?;
        for &kind in measures {
            let mut times = Vec::with_capacity(reps);
            for _ in 0..reps {
                let t = Instant::now();
                estimate_measure(&sample, kind, fc, true)?;
                times.push(t.elapsed().as_nanos() as u64);
            }
            rows.push(BenchRow { measure: kind, n, median_ns: median(times) });
        }
    }
    let slopes = measures
        .iter()
        .map(|&kind| {
            let pts: Vec<(f64, f64)> =
                rows.iter().filter(|r| r.measure == kind).map(|r| (r.n as f64, r.median_ns.max(1) as f64)).collect();
            (kind, log_log_slope(&pts))
        })
        .collect();
    Ok(BenchReport { rows, slopes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0].iter().map(|&n: &f64| (n, 3.0 * n.powf(1.5))).collect();
        assert_abs_diff_eq!(log_log_slope(&pts), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![5, 1, 3]), 3);
        assert_eq!(median(vec![4, 1, 3, 10]), 3);
    }
}
