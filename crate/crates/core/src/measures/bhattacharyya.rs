//! Bhattacharyya (Hellinger) distances: by quadrature and for Gaussians.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::{integrate_1d, integrate_2d, QuadratureSpec};

fn from_coefficient(bc: f64) -> f64 {
    (1.0 - bc).clamp(0.0, 1.0).sqrt()
}

/// `√(1 − ∫√(p·q))` over the domain of `spec` (one dimension).
pub fn bhattacharyya_1d(p: impl Fn(f64) -> f64, q: impl Fn(f64) -> f64, spec: &QuadratureSpec) -> Result<f64> {
    let bc = integrate_1d(|x| (p(x) * q(x)).max(0.0).sqrt(), spec)?.value;
    Ok(from_coefficient(bc))
}

/// `√(1 − ∫∫√(p·q))` over the rectangle of `spec`.
pub fn bhattacharyya_2d(
    p: impl Fn(f64, f64) -> f64,
    q: impl Fn(f64, f64) -> f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let bc = integrate_2d(|x, y| (p(x, y) * q(x, y)).max(0.0).sqrt(), spec)?.value;
    Ok(from_coefficient(bc))
}

/// Mutual dependence of a bivariate normal with correlation `rho`:
/// `M(ρ) = √(1 − (1−ρ²)^{1/4}/(1−ρ²/4)^{1/2})`.
pub fn gaussian_mdep(rho: f64) -> Result<f64> {
    if !(rho.is_finite() && (0.0..1.0).contains(&rho)) {
        return Err(Error::invalid(format!("rho must lie in [0, 1), got {rho}")));
    }
    let r2 = rho * rho;
    Ok(from_coefficient((1.0 - r2).powf(0.25) / (1.0 - r2 / 4.0).sqrt()))
}

/// Hellinger distance between `N(μ₁, Σ₁)` and `N(μ₂, Σ₂)`:
/// `d² = 1 − |Σ₁|^{1/4}·|Σ₂|^{1/4}/|Σ̄|^{1/2} · exp(−⅛·Δμᵀ·Σ̄⁻¹·Δμ)` with `Σ̄ = (Σ₁+Σ₂)/2`.
pub fn gaussian_bhattacharyya(mu1: &DVector<f64>, sigma1: &DMatrix<f64>, mu2: &DVector<f64>, sigma2: &DMatrix<f64>) -> Result<f64> {
    let d = mu1.len();
    if d == 0 || d > 2 || mu2.len() != d || sigma1.shape() != (d, d) || sigma2.shape() != (d, d) {
        return Err(Error::invalid("means and covariances must share a dimension of 1 or 2"));
    }
    for s in [sigma1, sigma2] {
        if (s - s.transpose()).amax() > 1e-12 * s.amax() {
            return Err(Error::invalid("covariance matrix is not symmetric"));
        }
    }
    let det = |s: &DMatrix<f64>| -> Result<f64> {
        let chol = s.clone().cholesky().ok_or_else(|| Error::invalid("covariance matrix is not positive definite"))?;
        Ok(chol.l().diagonal().iter().map(|v| v * v).product())
    };
    let avg = (sigma1 + sigma2) * 0.5;
    let chol = avg.clone().cholesky().ok_or_else(|| Error::invalid("average covariance is not positive definite"))?;
    let dmu = mu1 - mu2;
    let quad = dmu.dot(&chol.solve(&dmu));
    let bc = det(sigma1)?.powf(0.25) * det(sigma2)?.powf(0.25) / det(&avg)?.sqrt() * (-quad / 8.0).exp();
    Ok(from_coefficient(bc))
}

/// Covariance pair whose Hellinger distance is the mutual dependence of a
/// bivariate normal: the joint `[[σx², ρσxσy], [ρσxσy, σy²]]` against the product
/// of its marginals `diag(σx², σy²)`.
pub fn gaussian_joint_and_product(rho: f64, sigma_x: f64, sigma_y: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let c = rho * sigma_x * sigma_y;
    let joint = DMatrix::from_row_slice(2, 2, &[sigma_x * sigma_x, c, c, sigma_y * sigma_y]);
    let product = DMatrix::from_row_slice(2, 2, &[sigma_x * sigma_x, 0.0, 0.0, sigma_y * sigma_y]);
    (joint, product)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn normal(mu: f64) -> impl Fn(f64) -> f64 {
        move |x| (-0.5 * (x - mu) * (x - mu)).exp() / (2.0 * PI).sqrt()
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(gaussian_mdep(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(gaussian_mdep(0.5).unwrap(), 0.1971685, epsilon = 1e-7);
        assert_abs_diff_eq!(gaussian_mdep(0.9).unwrap(), 0.5105840, epsilon = 1e-7);
        assert!(gaussian_mdep(1.0).is_err());
    }

    #[test]
    fn gaussian_chain_reproduces_mdep() {
        let zero = DVector::zeros(2);
        for k in 1..=9 {
            let rho = k as f64 / 10.0;
            let (j, p) = gaussian_joint_and_product(rho, 1.0, 1.0);
            let d = gaussian_bhattacharyya(&zero, &j, &zero, &p).unwrap();
            assert_abs_diff_eq!(d, gaussian_mdep(rho).unwrap(), epsilon = 1e-12);
            // Scaling both axes leaves the distance unchanged.
            let (j, p) = gaussian_joint_and_product(rho, 2.5, 0.3);
            assert_abs_diff_eq!(gaussian_bhattacharyya(&zero, &j, &zero, &p).unwrap(), gaussian_mdep(rho).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn one_dimensional_shift() {
        let spec = QuadratureSpec::interval(-12.0, 13.0).with_tolerances(1e-12, 1e-12);
        let quad = bhattacharyya_1d(normal(0.0), normal(1.0), &spec).unwrap();
        let one = DMatrix::from_element(1, 1, 1.0);
        let closed = gaussian_bhattacharyya(&DVector::from_element(1, 0.0), &one, &DVector::from_element(1, 1.0), &one).unwrap();
        assert_abs_diff_eq!(closed, (1.0 - (-0.125f64).exp()).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(quad, closed, epsilon = 1e-6);
        assert_abs_diff_eq!(bhattacharyya_1d(normal(0.0), normal(0.0), &spec).unwrap(), 0.0, epsilon = 1e-6);
    }

    #[test]
    fn disjoint_supports_are_at_distance_one() {
        let spec = QuadratureSpec::new(vec![vec![-2.0, 0.0, 2.0], vec![-1.0, 1.0]]);
        let p = |x: f64, _y: f64| if x < 0.0 { 0.25 } else { 0.0 };
        let q = |x: f64, _y: f64| if x >= 0.0 { 0.25 } else { 0.0 };
        assert_abs_diff_eq!(bhattacharyya_2d(p, q, &spec).unwrap(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn rejects_bad_covariances() {
        let z = DVector::zeros(2);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(gaussian_bhattacharyya(&z, &bad, &z, &DMatrix::identity(2, 2)).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.1, 1.0]);
        assert!(gaussian_bhattacharyya(&z, &asym, &z, &DMatrix::identity(2, 2)).is_err());
    }
}
