//! Shared fixtures for the criterion benchmarks.

use mdep_core::models::sample_model;
use mdep_core::{GenModel, Nonlinearity, PdfFamily, RandomStream, SampleSet};

/// Sample sizes spanning a factor of 8, as in the scaling experiments.
pub const SIZES: [usize; 4] = [2048, 4096, 8192, 16384];

pub fn normal_linear(rho: f64) -> GenModel {
    GenModel::new(PdfFamily::STANDARD_NORMAL, Nonlinearity::Linear, rho).expect("valid model")
}

/// Deterministic sample of size `n`: stream `n` of a fixed seed.
pub fn fixture(model: &GenModel, n: usize) -> SampleSet {
    sample_model(model, n, &mut RandomStream::new(0x5eed, n as u64)).expect("valid sample")
}
