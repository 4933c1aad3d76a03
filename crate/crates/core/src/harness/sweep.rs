//! Monte-Carlo sweep over the model grid.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{distance_correlation, mutual_dependence, pearson, MeasureKind};
use crate::models::{
    joint_density, sample_model, theoretical_dcorr_oracle, theoretical_mdep_with, theoretical_mi_with,
    theoretical_pearson, theory_spec, GenModel, Nonlinearity, PdfFamily, SampleSet,
};
use crate::numerics::{derive_seed, RandomStream};

use super::config::SweepConfig;

/// One estimate of one measure on one Monte-Carlo sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub family: String,
    pub nonlinearity: String,
    pub rho: f64,
    pub i_theoretical: f64,
    pub n: usize,
    pub run_index: usize,
    pub seed: u64,
    pub measure: MeasureKind,
    /// NaN when the estimator failed; see `error`.
    pub estimate: f64,
    pub theoretical: f64,
    pub runtime_ns: Option<u64>,
    pub error: Option<String>,
}

/// Theoretical values for one `(family, nonlinearity, rho)` cell. Failed
/// quantities are NaN with the reason kept alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellTheory {
    pub mi: f64,
    pub pearson: f64,
    pub dcorr: f64,
    pub dcorr_std_error: f64,
    pub mdep: f64,
    pub errors: Vec<String>,
}

impl CellTheory {
    pub fn value(&self, kind: MeasureKind) -> f64 {
        match kind {
            MeasureKind::Pearson => self.pearson,
            MeasureKind::DistanceCorrelation => self.dcorr,
            MeasureKind::MutualDependence => self.mdep,
            MeasureKind::MutualInformation => self.mi,
        }
    }
}

/// Stable 64-bit code of a family, used as a seed-derivation component.
fn family_code(fam: &PdfFamily) -> u64 {
    // FNV-1a over the canonical name.
    fam.to_string().bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn nonlinearity_code(g: Nonlinearity) -> u64 {
    g as u64
}

const ORACLE_TAG: u64 = 0x6f72_6163_6c65;

/// Seed of trial `run` of the cell `(model, n)`; the sample is drawn from stream 0 of it.
pub fn trial_seed(master_seed: u64, model: &GenModel, n: usize, run: usize) -> u64 {
    derive_seed(
        master_seed,
        &[family_code(&model.family), nonlinearity_code(model.nonlinearity), model.rho.to_bits(), n as u64, run as u64],
    )
}

/// Theoretical values needed by `measures` for one model.
pub fn cell_theory(model: &GenModel, measures: &[MeasureKind], oracle_n: usize, oracle_reps: usize, master_seed: u64) -> CellTheory {
    let mut errors = Vec::new();
    let keep = |name: &str, r: Result<f64>, errors: &mut Vec<String>| match r {
        Ok(v) => v,
        Err(e) => {
            errors.push(format!("theoretical {name}: {e}"));
            f64::NAN
        }
    };
    let spec = theory_spec();
    let density = joint_density(model);
    let want_mdep = measures.contains(&MeasureKind::MutualDependence);
    let (mi, mdep) = match &density {
        Ok(dm) => {
            let mi = keep("mi", theoretical_mi_with(dm, &spec), &mut errors);
            let mdep = if want_mdep { keep("mdep", theoretical_mdep_with(dm, &spec), &mut errors) } else { f64::NAN };
            (mi, mdep)
        }
        Err(e) => {
            errors.push(format!("theoretical mi and mdep: density construction failed: {e}"));
            (f64::NAN, f64::NAN)
        }
    };
    let pearson = if measures.contains(&MeasureKind::Pearson) { keep("pearson", theoretical_pearson(model, &spec), &mut errors) } else { f64::NAN };
    let (dcorr, dcorr_std_error) = if measures.contains(&MeasureKind::DistanceCorrelation) {
        let seed = derive_seed(master_seed, &[family_code(&model.family), nonlinearity_code(model.nonlinearity), model.rho.to_bits(), ORACLE_TAG]);
        match theoretical_dcorr_oracle(model, oracle_n, oracle_reps, seed) {
            Ok(o) => (o.mean, o.std_error),
            Err(e) => (keep("dcorr", Err(e), &mut errors), f64::NAN),
        }
    } else {
        (f64::NAN, f64::NAN)
    };
    CellTheory { mi, pearson, dcorr, dcorr_std_error, mdep, errors }
}

/// Evaluates one measure on a sample.
pub fn estimate_measure(sample: &SampleSet, kind: MeasureKind, fc: f64, quick: bool) -> Result<f64> {
    match kind {
        MeasureKind::Pearson => pearson(sample),
        MeasureKind::DistanceCorrelation => distance_correlation(sample),
        MeasureKind::MutualDependence => mutual_dependence(sample, fc, quick),
        MeasureKind::MutualInformation => Err(Error::invalid("mutual information has no empirical estimator")),
    }
}

/// Result of a sweep: per-cell theory and the long-format records.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub cells: Vec<(GenModel, CellTheory)>,
    pub records: Vec<SweepRecord>,
}

/// Runs the sweep on `threads` worker threads (all cores when `None`). The
/// output depends only on `config`: records come in grid order
/// (family, nonlinearity, rho, n, run, measure) whatever the thread count.
pub fn run_sweep(config: &SweepConfig, threads: Option<usize>) -> Result<SweepOutput> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::invalid("thread count must be at least 1"));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| Error::invalid(format!("cannot start thread pool: {e}")))?;
    pool.install(|| sweep_in_pool(config))
}

fn sweep_in_pool(config: &SweepConfig) -> Result<SweepOutput> {
    let mut models = Vec::with_capacity(config.cells());
    for fam in &config.families {
        for g in &config.nonlinearities {
            for &rho in &config.rho_grid {
                models.push(GenModel::new(*fam, *g, rho)?);
            }
        }
    }
    let theories: Vec<CellTheory> = models
        .par_iter()
        .map(|m| cell_theory(m, &config.measures, config.oracle_n, config.oracle_reps, config.master_seed))
        .collect();

    let mut trials = Vec::new();
    for c in 0..models.len() {
        for &n in &config.n_grid {
            for run in 0..config.mc_runs {
                trials.push((c, n, run));
            }
        }
    }
    let records: Vec<Vec<SweepRecord>> = trials
        .par_iter()
        .map(|&(c, n, run)| run_trial(config, &models[c], &theories[c], n, run))
        .collect();
    Ok(SweepOutput { cells: models.into_iter().zip(theories).collect(), records: records.into_iter().flatten().collect() })
}

fn run_trial(config: &SweepConfig, model: &GenModel, theory: &CellTheory, n: usize, run: usize) -> Vec<SweepRecord> {
    let seed = trial_seed(config.master_seed, model, n, run);
    let sample = sample_model(model, n, &mut RandomStream::new(seed, 0));
    let fc = config.fc_rule.cutoff(model.rho);
    config
        .measures
        .iter()
        .map(|&kind| {
            let started = Instant::now();
            let result = match &sample {
                Ok(s) => estimate_measure(s, kind, fc, config.quick),
                Err(e) => Err(Error::invalid(format!("sampling failed: {e}"))),
            };
            let elapsed = started.elapsed().as_nanos() as u64;
            let theoretical = theory.value(kind);
            let mut errors: Vec<String> = Vec::new();
            let estimate = match result {
                Ok(v) => v,
                Err(e) => {
                    errors.push(e.to_string());
                    f64::NAN
                }
            };
            if theoretical.is_nan() {
                errors.extend(theory.errors.iter().filter(|e| e.contains(kind.name())).cloned());
            }
            SweepRecord {
                family: model.family.to_string(),
                nonlinearity: model.nonlinearity.to_string(),
                rho: model.rho,
                i_theoretical: theory.mi,
                n,
                run_index: run,
                seed,
                measure: kind,
                estimate,
                theoretical,
                runtime_ns: config.record_runtime.then_some(elapsed),
                error: if errors.is_empty() { None } else { Some(errors.join("; ")) },
            }
        })
        .collect()
}
