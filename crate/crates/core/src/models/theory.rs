//! Theoretical values of the dependence measures for a generating model.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::distance_correlation;
use crate::numerics::{integrate_1d, integrate_2d, QuadratureSpec, RandomStream};

use super::density::{joint_density, DensityModel};
use super::family::{sample_model, GenModel};

/// Default tolerance template for the theoretical integrals; the domain is
/// always replaced by the model's truncation boxes.
pub fn theory_spec() -> QuadratureSpec {
    QuadratureSpec::new(Vec::new()).with_tolerances(1e-8, 1e-8).with_max_refinements(40)
}

/// Breakpoints in the `(x, u)` plane, where `y = ρ·g(x) + √(1−ρ²)·u`.
fn xu_domain(dm: &DensityModel, spec: &QuadratureSpec) -> QuadratureSpec {
    let bps = dm.family().breakpoints();
    spec.with_domain(vec![bps.clone(), bps])
}

/// Mutual information `∫∫ f_xy·ln(f_xy/(f_x·f_y))`.
pub fn theoretical_mi(model: &GenModel, spec: &QuadratureSpec) -> Result<f64> {
    theoretical_mi_with(&joint_density(model)?, spec)
}

pub fn theoretical_mi_with(dm: &DensityModel, spec: &QuadratureSpec) -> Result<f64> {
    let m = *dm.model();
    if m.rho == 0.0 {
        return Ok(0.0);
    }
    let fam = m.family;
    let ln_s = dm.noise_scale().ln();
    // With x and u as coordinates, f_xy·dx·dy = f_V(x)·f_U(u)·dx·du and
    // f_xy/(f_x·f_y) = f_U(u)/(s·f_y(y)).
    let integrand = |x: f64, u: f64| {
        let w = fam.pdf(x) * fam.pdf(u);
        if w == 0.0 {
            return 0.0;
        }
        w * (fam.ln_pdf(u) - ln_s - dm.ln_f_y(m.y_of(x, u)))
    };
    let r = integrate_2d(integrand, &xu_domain(dm, spec))?;
    Ok(r.value.max(0.0))
}

/// Mutual dependence `√(1 − ∫∫√(f_xy·f_x·f_y))`.
pub fn theoretical_mdep(model: &GenModel, spec: &QuadratureSpec) -> Result<f64> {
    theoretical_mdep_with(&joint_density(model)?, spec)
}

pub fn theoretical_mdep_with(dm: &DensityModel, spec: &QuadratureSpec) -> Result<f64> {
    let m = *dm.model();
    if m.rho == 0.0 {
        return Ok(0.0);
    }
    let fam = m.family;
    let s = dm.noise_scale();
    // √(f_xy·f_x·f_y)·dx·dy = f_V(x)·√(s·f_U(u)·f_y(y))·dx·du.
    let integrand = |x: f64, u: f64| {
        let fv = fam.pdf(x);
        if fv == 0.0 {
            return 0.0;
        }
        fv * (s * fam.pdf(u) * dm.f_y(m.y_of(x, u))).sqrt()
    };
    let bc = integrate_2d(integrand, &xu_domain(dm, spec))?.value;
    let radicand = 1.0 - bc;
    if radicand < -1e-10 {
        return Err(Error::Quadrature { estimate: bc, error_bound: spec.abs_tol.max(spec.rel_tol) });
    }
    Ok(radicand.max(0.0).sqrt().min(1.0))
}

/// Pearson correlation from one-dimensional moments of `X`, `g(X)` and `U`.
pub fn theoretical_pearson(model: &GenModel, spec: &QuadratureSpec) -> Result<f64> {
    model.validate()?;
    let fam = model.family;
    let g = model.nonlinearity;
    let spec = spec.with_domain(vec![fam.breakpoints()]);
    let moment = |h: &dyn Fn(f64) -> f64| -> Result<f64> { Ok(integrate_1d(|x| h(x) * fam.pdf(x), &spec)?.value) };
    let m0 = moment(&|_| 1.0)?;
    let ex = moment(&|x| x)? / m0;
    let exx = moment(&|x| x * x)? / m0;
    let eg = moment(&|x| g.apply(x))? / m0;
    let egg = moment(&|x| g.apply(x).powi(2))? / m0;
    let exg = moment(&|x| x * g.apply(x))? / m0;
    let var_x = exx - ex * ex;
    let var_g = (egg - eg * eg).max(0.0);
    let s2 = 1.0 - model.rho * model.rho;
    let cov = model.rho * (exg - ex * eg);
    let var_y = model.rho * model.rho * var_g + s2 * var_x;
    if !(var_x > 0.0 && var_y > 0.0) {
        return Err(Error::UndefinedMeasure(format!("zero variance (var_x={var_x}, var_y={var_y})")));
    }
    Ok((cov / (var_x * var_y).sqrt()).clamp(-1.0, 1.0))
}

/// A Monte-Carlo value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
    pub reps: usize,
}

/// Distance correlation approximated by the mean sample value over `reps`
/// independent samples of size `n_oracle`; rep `k` draws from stream `k` of
/// `master_seed`.
pub fn theoretical_dcorr_oracle(model: &GenModel, n_oracle: usize, reps: usize, master_seed: u64) -> Result<OracleEstimate> {
    model.validate()?;
    if n_oracle < 10_000 {
        return Err(Error::invalid(format!("oracle sample size must be at least 10000, got {n_oracle}")));
    }
    if reps == 0 {
        return Err(Error::invalid("oracle needs at least one repetition"));
    }
    let values: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|k| {
            let sample = sample_model(model, n_oracle, &mut RandomStream::new(master_seed, k as u64))?;
            distance_correlation(&sample)
        })
        .collect::<Result<_>>()?;
    let mean = values.iter().sum::<f64>() / reps as f64;
    let std_error = if reps > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        (var / reps as f64).sqrt()
    } else {
        f64::NAN
    };
    Ok(OracleEstimate { mean, std_error, n: n_oracle, reps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Nonlinearity, PdfFamily};
    use approx::assert_abs_diff_eq;

    fn normal_linear(rho: f64) -> GenModel {
        GenModel::new(PdfFamily::STANDARD_NORMAL, Nonlinearity::Linear, rho).unwrap()
    }

    /// Closed-form mutual dependence of a standard bivariate normal.
    fn gaussian_mdep_oracle(rho: f64) -> f64 {
        let det = 1.0 - rho * rho;
        (1.0 - (2.0 * det.powf(0.25)) / (4.0 - rho * rho).sqrt()).sqrt()
    }

    #[test]
    fn normal_linear_mi_matches_closed_form() {
        for rho in [0.3, 0.5, 0.9] {
            let mi = theoretical_mi(&normal_linear(rho), &theory_spec()).unwrap();
            assert_abs_diff_eq!(mi, -0.5 * (1.0 - rho * rho).ln(), epsilon = 1e-5);
        }
    }

    #[test]
    fn normal_linear_mdep_matches_closed_form() {
        for rho in [0.3, 0.5, 0.9] {
            let d = theoretical_mdep(&normal_linear(rho), &theory_spec()).unwrap();
            assert_abs_diff_eq!(d, gaussian_mdep_oracle(rho), epsilon = 1e-5);
        }
        assert_abs_diff_eq!(gaussian_mdep_oracle(0.5), 0.1971685, epsilon = 1e-7);
    }

    #[test]
    fn independence_gives_zero() {
        for fam in [PdfFamily::STANDARD_NORMAL, PdfFamily::BandLimited] {
            let m = GenModel::new(fam, Nonlinearity::Quadratic, 0.0).unwrap();
            assert_eq!(theoretical_mi(&m, &theory_spec()).unwrap(), 0.0);
            assert_eq!(theoretical_mdep(&m, &theory_spec()).unwrap(), 0.0);
            assert_abs_diff_eq!(theoretical_pearson(&m, &theory_spec()).unwrap(), 0.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn pearson_moment_algebra() {
        for rho in [0.2, 0.7] {
            let r = theoretical_pearson(&normal_linear(rho), &theory_spec()).unwrap();
            assert_abs_diff_eq!(r, rho, epsilon = 1e-6);
            let q = GenModel::new(PdfFamily::STANDARD_NORMAL, Nonlinearity::Quadratic, rho).unwrap();
            assert_abs_diff_eq!(theoretical_pearson(&q, &theory_spec()).unwrap(), 0.0, epsilon = 1e-6);
        }
        // Cubic: cov = ρ·E[X⁴] = 3ρ, var Y = ρ²·15 + 1 − ρ².
        let rho: f64 = 0.6;
        let c = GenModel::new(PdfFamily::STANDARD_NORMAL, Nonlinearity::Cubic, rho).unwrap();
        let expected = 3.0 * rho / (14.0 * rho * rho + 1.0).sqrt();
        assert_abs_diff_eq!(theoretical_pearson(&c, &theory_spec()).unwrap(), expected, epsilon = 1e-6);
    }

    #[test]
    fn mi_and_mdep_grow_with_rho() {
        let cells = [
            (PdfFamily::STANDARD_NORMAL, Nonlinearity::Quadratic),
            (PdfFamily::STANDARD_NORMAL, Nonlinearity::Sine),
            (PdfFamily::BandLimited, Nonlinearity::Cubic),
        ];
        for (fam, g) in cells {
            let mut prev = (0.0, 0.0);
            for k in [1, 3, 5, 7, 9] {
                let m = GenModel::new(fam, g, k as f64 / 10.0).unwrap();
                let dm = joint_density(&m).unwrap();
                let mi = theoretical_mi_with(&dm, &theory_spec()).unwrap();
                let d = theoretical_mdep_with(&dm, &theory_spec()).unwrap();
                assert!(mi >= prev.0 && d >= prev.1 && d > 0.0 && d <= 1.0, "{fam} {g} rho={}: mi={mi} d={d}", m.rho);
                prev = (mi, d);
            }
        }
    }

    #[test]
    fn dcorr_oracle_behaviour() {
        let m0 = GenModel::new(PdfFamily::STANDARD_NORMAL, Nonlinearity::Linear, 0.0).unwrap();
        let o = theoretical_dcorr_oracle(&m0, 10_000, 2, 7).unwrap();
        assert!(o.mean < 0.05);
        let m = GenModel::new(PdfFamily::STANDARD_NORMAL, Nonlinearity::Linear, 0.999).unwrap();
        assert!(theoretical_dcorr_oracle(&m, 10_000, 1, 7).unwrap().mean > 0.95);
        assert!(theoretical_dcorr_oracle(&m, 100, 1, 7).is_err());
    }
}
