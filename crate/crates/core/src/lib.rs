//! Dependence measurement between two real variables.
//!
//! The central estimator is the mutual dependence `d`: the Hellinger
//! (Bhattacharyya) distance between a joint density and the product of its
//! marginals, with every density estimated by band-limited maximum likelihood.
//! Pearson correlation, distance correlation and theoretical mutual
//! information are provided for comparison, together with generating models
//! and a seeded Monte-Carlo harness.

pub mod blml;
pub mod error;
pub mod format;
pub mod harness;
pub mod measures;
pub mod models;
pub mod numerics;

pub use blml::{solve_blml, BlmlFit, SupportPoints};
pub use error::{Error, Result};
pub use measures::{distance_correlation, mutual_dependence, pearson, Flavor, MeasureKind, MeasureValue};
pub use models::{GenModel, Nonlinearity, PdfFamily, SampleSet};
pub use numerics::{QuadratureSpec, RandomStream};
