//! Empirical dependence estimators and Bhattacharyya distance utilities.

mod bhattacharyya;
mod classical;
mod mdep;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bhattacharyya::{bhattacharyya_1d, bhattacharyya_2d, gaussian_bhattacharyya, gaussian_joint_and_product, gaussian_mdep};
pub use classical::{distance_correlation, distance_correlation_dense, distance_correlation_streaming, pearson};
pub use mdep::{fit_mdep, mutual_dependence, MdepFits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasureKind {
    #[serde(rename = "pearson")]
    Pearson,
    #[serde(rename = "dcorr")]
    DistanceCorrelation,
    #[serde(rename = "mdep")]
    MutualDependence,
    #[serde(rename = "mi")]
    MutualInformation,
}

impl MeasureKind {
    pub fn name(&self) -> &'static str {
        match self {
            MeasureKind::Pearson => "pearson",
            MeasureKind::DistanceCorrelation => "dcorr",
            MeasureKind::MutualDependence => "mdep",
            MeasureKind::MutualInformation => "mi",
        }
    }

    /// Admissible range of values.
    pub fn range(&self) -> (f64, f64) {
        match self {
            MeasureKind::Pearson => (-1.0, 1.0),
            MeasureKind::DistanceCorrelation | MeasureKind::MutualDependence => (0.0, 1.0),
            MeasureKind::MutualInformation => (-1e-9, f64::INFINITY),
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pearson" | "r" => Ok(MeasureKind::Pearson),
            "dcorr" | "distance_correlation" | "dcor" => Ok(MeasureKind::DistanceCorrelation),
            "mdep" | "mutual_dependence" | "d" => Ok(MeasureKind::MutualDependence),
            "mi" | "mutual_information" => Ok(MeasureKind::MutualInformation),
            other => Err(Error::Parse(format!("unknown measure '{other}' (expected pearson, dcorr, mdep or mi)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flavor {
    Empirical,
    Theoretical,
}

/// A measure value tagged with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureValue {
    pub kind: MeasureKind,
    pub value: f64,
    pub flavor: Flavor,
    pub n: Option<usize>,
    pub fc: Option<f64>,
    pub runtime_ns: Option<u64>,
}

impl MeasureValue {
    pub fn new(kind: MeasureKind, value: f64, flavor: Flavor) -> Result<Self> {
        if kind == MeasureKind::MutualInformation && flavor == Flavor::Empirical {
            return Err(Error::invalid("mutual information is only available as a theoretical value"));
        }
        let (lo, hi) = kind.range();
        if !(value >= lo && value <= hi) {
            return Err(Error::invalid(format!("{kind} value {value} outside [{lo}, {hi}]")));
        }
        Ok(MeasureValue { kind, value, flavor, n: None, fc: None, runtime_ns: None })
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_fc(mut self, fc: f64) -> Self {
        self.fc = Some(fc);
        self
    }

    pub fn with_runtime_ns(mut self, ns: u64) -> Self {
        self.runtime_ns = Some(ns);
        self
    }
}
