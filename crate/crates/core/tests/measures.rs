use approx::assert_abs_diff_eq;
use mdep_core::measures::{distance_correlation, distance_correlation_dense, fit_mdep, mutual_dependence, pearson};
use mdep_core::numerics::{NewtonOptions, RandomStream};
use mdep_core::{Error, SampleSet};
use num::{BigRational, Signed, ToPrimitive};
use proptest::prelude::*;

fn random_sample(seed: u64, n: usize, scale: f64) -> SampleSet {
    let mut s = RandomStream::new(seed, 0);
    let xs: Vec<f64> = (0..n).map(|_| scale * s.standard_normal()).collect();
    let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x * x + s.standard_normal()).collect();
    SampleSet::new(xs, ys).unwrap()
}

/// Compensated (Neumaier) running sum.
#[derive(Default)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    fn add(&mut self, v: f64) {
        let t = self.s + v;
        if self.s.abs() >= v.abs() {
            self.c += (self.s - t) + v;
        } else {
            self.c += (v - t) + self.s;
        }
        self.s = t;
    }

    fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// Squared distance covariance by the literal quadruple sum
/// `(1/n⁴)·Σ_ijkl (a_ij·b_ij + a_ij·b_kl − 2·a_ij·b_ik)`, accumulated with
/// compensated summation.
fn four_sum_dcov2(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let a = |i: usize, j: usize| (x[i] - x[j]).abs();
    let b = |i: usize, j: usize| (y[i] - y[j]).abs();
    let mut total = Sum::default();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let aij = a(i, j);
                    total.add(aij * b(i, j));
                    total.add(aij * b(k, l));
                    total.add(-2.0 * aij * b(i, k));
                }
            }
        }
    }
    total.value() / (n as f64).powi(4)
}

fn four_sum_dcorr(x: &[f64], y: &[f64]) -> f64 {
    let cov = four_sum_dcov2(x, y).max(0.0);
    let vx = four_sum_dcov2(x, x);
    let vy = four_sum_dcov2(y, y);
    (cov / (vx * vy).sqrt()).sqrt()
}

/// Pearson correlation from exact rational two-pass moments.
fn exact_pearson(x: &[f64], y: &[f64]) -> f64 {
    let q = |v: f64| BigRational::from_float(v).unwrap();
    let n = BigRational::from_integer(x.len().into());
    let mx = x.iter().map(|&v| q(v)).fold(BigRational::from_integer(0.into()), |a, b| a + b) / &n;
    let my = y.iter().map(|&v| q(v)).fold(BigRational::from_integer(0.into()), |a, b| a + b) / &n;
    let zero = BigRational::from_integer(0.into());
    let (mut sxy, mut sxx, mut syy) = (zero.clone(), zero.clone(), zero);
    for (&a, &b) in x.iter().zip(y) {
        let dx = q(a) - &mx;
        let dy = q(b) - &my;
        sxy += &dx * &dy;
        sxx += &dx * &dx;
        syy += &dy * &dy;
    }
    let r2 = (&sxy * &sxy / (sxx * syy)).to_f64().unwrap();
    let sign = if sxy.is_negative() { -1.0 } else { 1.0 };
    sign * r2.sqrt()
}

#[test]
fn dcorr_matches_four_sum_oracle() {
    for seed in 0..100u64 {
        let n = 4 + (seed as usize * 7) % 29;
        let s = random_sample(seed, n, 1.0 + seed as f64 / 10.0);
        let oracle = four_sum_dcorr(s.xs(), s.ys());
        assert_abs_diff_eq!(distance_correlation(&s).unwrap(), oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(distance_correlation_dense(&s).unwrap(), oracle, epsilon = 1e-12);
    }
}

#[test]
fn pearson_matches_exact_oracle() {
    for seed in 0..100u64 {
        let s = random_sample(seed, 5 + seed as usize * 3, 3.0);
        assert_abs_diff_eq!(pearson(&s).unwrap(), exact_pearson(s.xs(), s.ys()), epsilon = 1e-12);
    }
}

#[test]
fn pearson_and_dcorr_affine_behaviour() {
    let s = random_sample(7, 200, 1.0);
    let r = pearson(&s).unwrap();
    let dc = distance_correlation(&s).unwrap();
    let moved = s.map(|x| 3.0 * x - 1.0, |y| 0.2 * y + 5.0).unwrap();
    assert_abs_diff_eq!(pearson(&moved).unwrap(), r, epsilon = 1e-12);
    assert_abs_diff_eq!(distance_correlation(&moved).unwrap(), dc, epsilon = 1e-10);
    let flipped = s.map(|x| -x, |y| y).unwrap();
    assert_abs_diff_eq!(pearson(&flipped).unwrap(), -r, epsilon = 1e-12);
    assert_abs_diff_eq!(distance_correlation(&flipped).unwrap(), dc, epsilon = 1e-10);
}

#[test]
fn mdep_single_pair_is_zero() {
    let s = SampleSet::new(vec![0.7], vec![-2.0]).unwrap();
    for fc in [0.5, 1.0, 3.0, 4.0] {
        let fits = fit_mdep(&s, fc, false, &NewtonOptions::default()).unwrap();
        assert_abs_diff_eq!(fits.joint.coeffs[0], 1.0 / fc, epsilon = 1e-15);
        assert_abs_diff_eq!(fits.x.coeffs[0], 1.0 / fc.sqrt(), epsilon = 1e-15);
        assert_eq!(fits.estimate(), 0.0);
        assert_eq!(mutual_dependence(&s, fc, true).unwrap(), 0.0);
    }
}

#[test]
fn mdep_detects_dependence() {
    let mut st = RandomStream::new(3, 0);
    let xs: Vec<f64> = (0..800).map(|_| st.standard_normal()).collect();
    let dep: Vec<f64> = xs.iter().map(|x| x * x + 0.2 * st.standard_normal()).collect();
    let ind: Vec<f64> = (0..800).map(|_| st.standard_normal()).collect();
    let d_dep = mutual_dependence(&SampleSet::new(xs.clone(), dep).unwrap(), 2.0, true).unwrap();
    let d_ind = mutual_dependence(&SampleSet::new(xs, ind).unwrap(), 2.0, true).unwrap();
    assert!(d_dep > 0.4 && d_ind < 0.2 && d_dep > d_ind, "dependent {d_dep}, independent {d_ind}");
}

#[test]
fn quick_equals_unbinned_on_separated_grid_data() {
    // Pairs already on distinct grid centres are left untouched by binning.
    let fc = 1.25;
    let delta = 0.5 / fc;
    let mut st = RandomStream::new(4, 0);
    let mut used = std::collections::HashSet::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    while xs.len() < 60 {
        let i = (st.uniform() * 40.0) as i64 - 20;
        let j = (st.uniform() * 40.0) as i64 - 20;
        if used.insert((i, j)) {
            xs.push(i as f64 * delta);
            ys.push(j as f64 * delta);
        }
    }
    let s = SampleSet::new(xs, ys).unwrap();
    let quick = mutual_dependence(&s, fc, true).unwrap();
    let full = mutual_dependence(&s, fc, false).unwrap();
    assert_abs_diff_eq!(quick, full, epsilon = 1e-6);
}

#[test]
fn mdep_rejects_bad_cutoff() {
    let s = random_sample(1, 10, 1.0);
    assert!(matches!(mutual_dependence(&s, -1.0, true), Err(Error::InvalidArgument(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mdep_is_symmetric_and_bounded(seed in any::<u64>(), n in 1usize..300, fc in 0.5f64..5.0, quick in any::<bool>()) {
        let s = random_sample(seed, n, 1.5);
        let d = mutual_dependence(&s, fc, quick).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        let swapped = mutual_dependence(&s.swapped(), fc, quick).unwrap();
        prop_assert_eq!(d.to_bits(), swapped.to_bits());
    }

    #[test]
    fn dcorr_in_unit_interval(seed in any::<u64>(), n in 2usize..60) {
        let s = random_sample(seed, n, 2.0);
        let r = distance_correlation(&s).unwrap();
        prop_assert!((0.0..=1.0).contains(&r));
    }
}
