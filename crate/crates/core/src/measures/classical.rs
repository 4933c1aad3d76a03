//! Pearson correlation and distance correlation.

use crate::error::{Error, Result};
use crate::models::SampleSet;

/// Sample Pearson correlation from single-pass running moments.
pub fn pearson(sample: &SampleSet) -> Result<f64> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::invalid("pearson needs at least two pairs"));
    }
    let (mut mx, mut my, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, (&x, &y)) in sample.xs().iter().zip(sample.ys()).enumerate() {
        let kf = (k + 1) as f64;
        let dx = x - mx;
        let dy = y - my;
        mx += dx / kf;
        my += dy / kf;
        sxx += dx * (x - mx);
        syy += dy * (y - my);
        sxy += dx * (y - my);
    }
    if !(sxx > 0.0 && syy > 0.0) {
        return Err(Error::UndefinedMeasure("pearson correlation of a constant variable".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Distance correlation (V-statistic of double-centred distances), computed
/// in `O(n²)` time and `O(n)` memory.
pub fn distance_correlation(sample: &SampleSet) -> Result<f64> {
    distance_correlation_streaming(sample)
}

fn check_n(sample: &SampleSet) -> Result<()> {
    if sample.len() < 2 {
        return Err(Error::invalid("distance correlation needs at least two pairs"));
    }
    Ok(())
}

fn finish(dcov2: f64, dvar_x: f64, dvar_y: f64) -> Result<f64> {
    if !(dvar_x > 0.0 && dvar_y > 0.0) {
        return Err(Error::UndefinedMeasure("distance variance is zero (constant variable)".into()));
    }
    let dcov2 = if dcov2 < 0.0 && dcov2 >= -1e-12 * (dvar_x * dvar_y).sqrt() { 0.0 } else { dcov2 };
    if dcov2 < 0.0 {
        return Err(Error::UndefinedMeasure(format!("negative squared distance covariance {dcov2}")));
    }
    // dCor = dCov/√(dVar_x·dVar_y), with each term the square root of its V-statistic.
    Ok((dcov2.sqrt() / (dvar_x.sqrt() * dvar_y.sqrt()).sqrt()).min(1.0))
}

fn centred(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (v[i] - v[j]).abs();
        }
    }
    let row: Vec<f64> = (0..n).map(|i| a[i * n..(i + 1) * n].iter().sum::<f64>() / n as f64).collect();
    let grand = row.iter().sum::<f64>() / n as f64;
    for i in 0..n {
        for j in 0..n {
            // Distance matrices are symmetric, so column means equal row means.
            a[i * n + j] += grand - row[i] - row[j];
        }
    }
    a
}

/// Distance correlation with stored double-centred matrices (`O(n²)` memory,
/// meant for small samples and cross-checks).
pub fn distance_correlation_dense(sample: &SampleSet) -> Result<f64> {
    check_n(sample)?;
    let n = sample.len();
    let a = centred(sample.xs());
    let b = centred(sample.ys());
    let nn = (n * n) as f64;
    let dcov2 = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() / nn;
    let dvar_x = a.iter().map(|x| x * x).sum::<f64>() / nn;
    let dvar_y = b.iter().map(|y| y * y).sum::<f64>() / nn;
    finish(dcov2, dvar_x, dvar_y)
}

fn row_means(v: &[f64]) -> (Vec<f64>, f64) {
    let n = v.len();
    let mut row = vec![0.0; n];
    for i in 0..n {
        let vi = v[i];
        let mut acc = 0.0;
        for &vj in v {
            acc += (vi - vj).abs();
        }
        row[i] = acc / n as f64;
    }
    let grand = row.iter().sum::<f64>() / n as f64;
    (row, grand)
}

/// Distance correlation in `O(n)` memory: row means first, then the centred
/// products accumulated pair by pair.
pub fn distance_correlation_streaming(sample: &SampleSet) -> Result<f64> {
    check_n(sample)?;
    let (xs, ys) = (sample.xs(), sample.ys());
    let n = xs.len();
    let (ra, ga) = row_means(xs);
    let (rb, gb) = row_means(ys);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (xi, yi) = (xs[i], ys[i]);
        let (ca, cb) = (ga - ra[i], gb - rb[i]);
        let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
        for j in 0..n {
            let a = (xi - xs[j]).abs() + ca - ra[j];
            let b = (yi - ys[j]).abs() + cb - rb[j];
            ab += a * b;
            aa += a * a;
            bb += b * b;
        }
        sab += ab;
        saa += aa;
        sbb += bb;
    }
    let nn = (n * n) as f64;
    finish(sab / nn, saa / nn, sbb / nn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn set(xs: &[f64], ys: &[f64]) -> SampleSet {
        SampleSet::new(xs.to_vec(), ys.to_vec()).unwrap()
    }

    #[test]
    fn pearson_small_cases() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        // Centred sums: sxy = 5.5, sxx = 5, syy = 8.75.
        let expected = 5.5 / (5.0f64 * 8.75).sqrt();
        assert_abs_diff_eq!(pearson(&set(&xs, &[1.0, 3.0, 2.0, 5.0])).unwrap(), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(pearson(&set(&xs, &[3.0, 5.0, 7.0, 9.0])).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pearson(&set(&xs, &[-1.0, -2.0, -3.0, -4.0])).unwrap(), -1.0, epsilon = 1e-15);
        assert!(matches!(pearson(&set(&xs, &[2.0; 4])), Err(Error::UndefinedMeasure(_))));
        assert!(matches!(pearson(&set(&[1.0], &[2.0])), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn dcorr_identity_and_affine() {
        let xs = [0.3, -1.2, 2.5, 0.0, 4.1, -3.3, 1.1, 0.7];
        assert_abs_diff_eq!(distance_correlation(&set(&xs, &xs)).unwrap(), 1.0, epsilon = 1e-12);
        let ys: Vec<f64> = xs.iter().map(|x| -3.0 * x + 2.0).collect();
        assert_abs_diff_eq!(distance_correlation(&set(&xs, &ys)).unwrap(), 1.0, epsilon = 1e-12);
        assert!(matches!(distance_correlation(&set(&xs, &[1.0; 8])), Err(Error::UndefinedMeasure(_))));
    }

    #[test]
    fn streaming_matches_dense() {
        let mut r = crate::numerics::RandomStream::new(2, 0);
        let xs: Vec<f64> = (0..300).map(|_| r.standard_normal()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x + 0.5 * r.standard_normal()).collect();
        let s = set(&xs, &ys);
        assert_abs_diff_eq!(distance_correlation_dense(&s).unwrap(), distance_correlation_streaming(&s).unwrap(), epsilon = 1e-12);
    }
}
