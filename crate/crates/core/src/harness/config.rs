//! Sweep configuration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::MeasureKind;
use crate::models::{Nonlinearity, PdfFamily};

/// How the cut-off frequency of `d̂` is chosen for a grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FcRule {
    Fixed(f64),
    /// `fc = 1/(1 − ρ²)`.
    Rho,
}

impl FcRule {
    pub fn cutoff(&self, rho: f64) -> f64 {
        match *self {
            FcRule::Fixed(fc) => fc,
            FcRule::Rho => 1.0 / (1.0 - rho * rho),
        }
    }
}

impl fmt::Display for FcRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FcRule::Fixed(fc) => write!(f, "{}", crate::format::sig9(*fc)),
            FcRule::Rho => f.write_str("rho"),
        }
    }
}

impl FromStr for FcRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("rho") {
            return Ok(FcRule::Rho);
        }
        let fc: f64 = s.parse().map_err(|_| Error::Parse(format!("fc rule must be 'rho' or a number, got '{s}'")))?;
        if !(fc.is_finite() && fc > 0.0) {
            return Err(Error::invalid(format!("cut-off frequency must be > 0, got {fc}")));
        }
        Ok(FcRule::Fixed(fc))
    }
}

/// Grid and settings of a Monte-Carlo sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub families: Vec<PdfFamily>,
    pub nonlinearities: Vec<Nonlinearity>,
    pub rho_grid: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub mc_runs: usize,
    pub master_seed: u64,
    pub fc_rule: FcRule,
    pub measures: Vec<MeasureKind>,
    /// Bin samples before fitting (`d̂` only).
    pub quick: bool,
    /// Sample size and repetitions of the distance-correlation oracle.
    pub oracle_n: usize,
    pub oracle_reps: usize,
    /// Fill the `runtime_ns` column. Off by default because timings are not reproducible.
    pub record_runtime: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            families: vec![PdfFamily::BandLimited, PdfFamily::STANDARD_NORMAL],
            nonlinearities: Nonlinearity::ALL.to_vec(),
            rho_grid: (1..=9).map(|k| k as f64 / 10.0).collect(),
            n_grid: vec![100, 316, 1000, 3162, 10000],
            mc_runs: 50,
            master_seed: 0,
            fc_rule: FcRule::Rho,
            measures: vec![MeasureKind::Pearson, MeasureKind::DistanceCorrelation, MeasureKind::MutualDependence],
            quick: true,
            oracle_n: 10_000,
            oracle_reps: 5,
            record_runtime: false,
        }
    }
}

fn strictly_increasing<T: PartialOrd>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() || self.nonlinearities.is_empty() || self.measures.is_empty() {
            return Err(Error::invalid("families, nonlinearities and measures must be non-empty"));
        }
        for fam in &self.families {
            fam.validate()?;
        }
        if self.rho_grid.is_empty() || !strictly_increasing(&self.rho_grid) {
            return Err(Error::invalid("rho grid must be non-empty and strictly increasing"));
        }
        if let Some(r) = self.rho_grid.iter().find(|r| !(r.is_finite() && (0.0..1.0).contains(*r))) {
            return Err(Error::invalid(format!("rho must lie in [0, 1), got {r}")));
        }
        if self.n_grid.is_empty() || !strictly_increasing(&self.n_grid) || self.n_grid[0] == 0 {
            return Err(Error::invalid("n grid must be non-empty, positive and strictly increasing"));
        }
        if self.mc_runs < 2 {
            return Err(Error::invalid(format!("at least 2 Monte Carlo runs are needed, got {}", self.mc_runs)));
        }
        if self.measures.contains(&MeasureKind::MutualInformation) {
            return Err(Error::invalid("mutual information is carried as the I_theoretical column, not estimated"));
        }
        let mut seen = self.measures.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.measures.len() {
            return Err(Error::invalid("measures must not repeat"));
        }
        if let FcRule::Fixed(fc) = self.fc_rule {
            if !(fc.is_finite() && fc > 0.0) {
                return Err(Error::invalid(format!("cut-off frequency must be > 0, got {fc}")));
            }
        }
        if self.measures.contains(&MeasureKind::DistanceCorrelation) && (self.oracle_n < 10_000 || self.oracle_reps == 0) {
            return Err(Error::invalid("distance-correlation oracle needs oracle_n >= 10000 and oracle_reps >= 1"));
        }
        Ok(())
    }

    /// Number of `(family, nonlinearity, rho)` cells.
    pub fn cells(&self) -> usize {
        self.families.len() * self.nonlinearities.len() * self.rho_grid.len()
    }
}
