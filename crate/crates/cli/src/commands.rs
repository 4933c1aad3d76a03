use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use mdep_core::format::sig9;
use mdep_core::harness::{
    bench_complexity, estimate_measure, imse_table, read_records, run_sweep, summarize, write_imse, write_records, write_summary,
    FcRule, SweepConfig,
};
use mdep_core::models::{sample_model, theoretical_dcorr_oracle, theoretical_mdep, theoretical_mi, theoretical_pearson, theory_spec};
use mdep_core::numerics::RNG_ALGORITHM;
use mdep_core::{GenModel, MeasureKind, Nonlinearity, PdfFamily, RandomStream, SampleSet};

use crate::args::{BenchArgs, EstimateArgs, GenArgs, ImseArgs, MeasureChoice, ModelArgs, SweepArgs, TheoryArgs, TheoryMeasure};
use crate::input::{parse_key_values, read_sample};

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes the resolved configuration to stderr, one `# key=value` line each.
fn log_config(command: &str, pairs: &[(&str, String)]) {
    let mut err = io::stderr().lock();
    let _ = writeln!(err, "# command={command}");
    for (k, v) in pairs {
        let _ = writeln!(err, "# {k}={v}");
    }
    let _ = writeln!(err, "# rng={RNG_ALGORITHM}");
}

fn parse_list<T>(s: &str, what: &str) -> Result<Vec<T>>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|e| anyhow!("bad {what} '{t}': {e}")))
        .collect()
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
}

fn join_f64(items: &[f64]) -> String {
    items.iter().map(|&v| sig9(v)).collect::<Vec<_>>().join(",")
}

fn resolve_model(m: &ModelArgs, default_rho: Option<f64>) -> Result<GenModel> {
    let family: PdfFamily = m.family.parse()?;
    let g: Nonlinearity = m.nonlinearity.parse()?;
    let rho = m.rho.or(default_rho).ok_or_else(|| anyhow!("--rho is required"))?;
    Ok(GenModel::new(family, g, rho)?)
}

fn model_pairs(model: &GenModel) -> Vec<(&'static str, String)> {
    vec![
        ("family", model.family.to_string()),
        ("g", model.nonlinearity.to_string()),
        ("rho", sig9(model.rho)),
        ("normalizer_z", sig9(model.family.normalizer())),
    ]
}

pub fn gen(a: GenArgs) -> Result<()> {
    let model = resolve_model(&a.model, None)?;
    if a.n == 0 {
        bail!("--n must be at least 1");
    }
    let mut pairs = model_pairs(&model);
    pairs.push(("seed", a.seed.to_string()));
    pairs.push(("n", a.n.to_string()));
    log_config("gen", &pairs);

    let sample = sample_model(&model, a.n, &mut RandomStream::new(a.seed, 0))?;
    let mut out = open_out(a.out.as_deref())?;
    for (k, v) in &pairs {
        writeln!(out, "# {k}={v}")?;
    }
    writeln!(out, "# rng={RNG_ALGORITHM}")?;
    writeln!(out, "x,y")?;
    // Shortest round-trip representation: a re-read file reproduces the sample bit for bit.
    for (x, y) in sample.xs().iter().zip(sample.ys()) {
        writeln!(out, "{x},{y}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn estimate(a: EstimateArgs) -> Result<()> {
    let (sample, rho, mut pairs): (SampleSet, Option<f64>, Vec<(&str, String)>) = match &a.input {
        Some(path) => {
            let file = read_sample(path)?;
            let rho = a.model.rho.or(file.rho);
            (file.sample, rho, vec![("in", path.display().to_string())])
        }
        None => {
            let model = resolve_model(&a.model, None)?;
            let n = a.n.ok_or_else(|| anyhow!("--n is required without --in"))?;
            let seed = a.seed.unwrap_or(0);
            let sample = sample_model(&model, n, &mut RandomStream::new(seed, 0))?;
            let mut p = model_pairs(&model);
            p.push(("seed", seed.to_string()));
            (sample, Some(model.rho), p)
        }
    };
    let kinds: Vec<MeasureKind> = match a.measure {
        MeasureChoice::Pearson => vec![MeasureKind::Pearson],
        MeasureChoice::Dcorr => vec![MeasureKind::DistanceCorrelation],
        MeasureChoice::Mdep => vec![MeasureKind::MutualDependence],
        MeasureChoice::All => vec![MeasureKind::Pearson, MeasureKind::DistanceCorrelation, MeasureKind::MutualDependence],
    };
    let needs_fc = kinds.contains(&MeasureKind::MutualDependence);
    let fc = match (a.fc, a.fc_rule.as_deref()) {
        (Some(fc), _) => Some(FcRule::Fixed(fc)),
        (None, Some(rule)) => Some(rule.parse::<FcRule>()?),
        (None, None) if rho.is_some() => Some(FcRule::Rho),
        (None, None) => None,
    };
    let fc = match fc {
        Some(rule @ FcRule::Fixed(v)) => {
            if !(v.is_finite() && v > 0.0) {
                bail!("--fc must be a positive number, got {v}");
            }
            Some(rule.cutoff(0.0))
        }
        Some(FcRule::Rho) => {
            let rho = rho.ok_or_else(|| anyhow!("--fc-rule rho needs --rho or a '# rho=' line in the input"))?;
            if !(rho.is_finite() && (0.0..1.0).contains(&rho)) {
                bail!("rho must lie in [0, 1), got {rho}");
            }
            Some(FcRule::Rho.cutoff(rho))
        }
        None => None,
    };
    if needs_fc && fc.is_none() {
        bail!("mdep needs --fc, --fc-rule rho, or a known rho");
    }
    pairs.push(("n", sample.len().to_string()));
    pairs.push(("measures", join(&kinds)));
    pairs.push(("fc", fc.map(sig9).unwrap_or_default()));
    pairs.push(("quick", a.quick.to_string()));
    log_config("estimate", &pairs);

    let mut out = open_out(None)?;
    writeln!(out, "measure,value,n,fc,runtime_ns")?;
    for kind in kinds {
        let fc_used = if kind == MeasureKind::MutualDependence { fc } else { None };
        let t = Instant::now();
        let value = estimate_measure(&sample, kind, fc_used.unwrap_or(1.0), a.quick).with_context(|| format!("{kind} estimate failed"))?;
        let ns = t.elapsed().as_nanos();
        writeln!(out, "{kind},{},{},{},{ns}", sig9(value), sample.len(), fc_used.map(sig9).unwrap_or_default())?;
    }
    out.flush()?;
    Ok(())
}

pub fn theory(a: TheoryArgs) -> Result<()> {
    let model = resolve_model(&a.model, None)?;
    let spec = theory_spec().with_tolerances(a.abs_tol, a.rel_tol);
    let mut pairs = model_pairs(&model);
    pairs.push(("measure", format!("{:?}", a.measure).to_ascii_lowercase()));
    pairs.push(("abs_tol", sig9(a.abs_tol)));
    pairs.push(("rel_tol", sig9(a.rel_tol)));
    if a.measure == TheoryMeasure::Dcorr {
        pairs.push(("oracle_n", a.oracle_n.to_string()));
        pairs.push(("oracle_reps", a.oracle_reps.to_string()));
        pairs.push(("seed", a.seed.to_string()));
    }
    log_config("theory", &pairs);

    let mut out = open_out(None)?;
    match a.measure {
        TheoryMeasure::Mi => writeln!(out, "{}", sig9(theoretical_mi(&model, &spec)?))?,
        TheoryMeasure::Mdep => writeln!(out, "{}", sig9(theoretical_mdep(&model, &spec)?))?,
        TheoryMeasure::Pearson => writeln!(out, "{}", sig9(theoretical_pearson(&model, &spec)?))?,
        TheoryMeasure::Dcorr => {
            let o = theoretical_dcorr_oracle(&model, a.oracle_n, a.oracle_reps, a.seed)?;
            writeln!(out, "{}", sig9(o.mean))?;
            writeln!(out, "# standard_error={}", sig9(o.std_error))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn parse_bool(s: &str, key: &str) -> Result<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => bail!("bad boolean for {key}: '{s}'"),
    }
}

/// Applies `key=value` settings (from a file or the command line) to `config`.
fn apply_settings(config: &mut SweepConfig, settings: &BTreeMap<String, String>) -> Result<()> {
    for (key, value) in settings {
        let v = value.as_str();
        match key.as_str() {
            "families" => config.families = parse_list(v, "family")?,
            "nonlinearities" | "g" => config.nonlinearities = parse_list(v, "nonlinearity")?,
            "rho_grid" => config.rho_grid = parse_list(v, "rho")?,
            "n_grid" => config.n_grid = parse_list(v, "n")?,
            "mc_runs" => config.mc_runs = v.parse().with_context(|| format!("bad mc_runs '{v}'"))?,
            "seed" | "master_seed" => config.master_seed = v.parse().with_context(|| format!("bad seed '{v}'"))?,
            "fc_rule" => config.fc_rule = v.parse()?,
            "measures" => config.measures = parse_list(v, "measure")?,
            "quick" => config.quick = parse_bool(v, key)?,
            "unbinned" => config.quick = !parse_bool(v, key)?,
            "oracle_n" => config.oracle_n = v.parse().with_context(|| format!("bad oracle_n '{v}'"))?,
            "oracle_reps" => config.oracle_reps = v.parse().with_context(|| format!("bad oracle_reps '{v}'"))?,
            "record_runtime" => config.record_runtime = parse_bool(v, key)?,
            other => bail!("unknown sweep setting '{other}'"),
        }
    }
    Ok(())
}

fn sweep_config(a: &SweepArgs) -> Result<SweepConfig> {
    let mut config = SweepConfig::default();
    if let Some(path) = &a.config {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let settings = parse_key_values(&text).with_context(|| format!("in {}", path.display()))?;
        apply_settings(&mut config, &settings)?;
    }
    let mut flags = BTreeMap::new();
    let mut set = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            flags.insert(k.to_string(), v);
        }
    };
    set("families", a.families.clone());
    set("nonlinearities", a.nonlinearities.clone());
    set("rho_grid", a.rho_grid.clone());
    set("n_grid", a.n_grid.clone());
    set("mc_runs", a.mc_runs.map(|v| v.to_string()));
    set("seed", a.seed.map(|v| v.to_string()));
    set("fc_rule", a.fc_rule.clone());
    set("measures", a.measures.clone());
    set("oracle_n", a.oracle_n.map(|v| v.to_string()));
    set("oracle_reps", a.oracle_reps.map(|v| v.to_string()));
    if a.unbinned {
        set("unbinned", Some("true".into()));
    }
    if a.record_runtime {
        set("record_runtime", Some("true".into()));
    }
    apply_settings(&mut config, &flags)?;
    config.validate()?;
    Ok(config)
}

pub fn sweep(a: SweepArgs) -> Result<()> {
    let config = sweep_config(&a)?;
    if a.threads == Some(0) {
        bail!("--threads must be at least 1");
    }
    log_config(
        "sweep",
        &[
            ("families", join(&config.families)),
            ("nonlinearities", join(&config.nonlinearities)),
            ("rho_grid", join_f64(&config.rho_grid)),
            ("n_grid", join(&config.n_grid)),
            ("mc_runs", config.mc_runs.to_string()),
            ("seed", config.master_seed.to_string()),
            ("fc_rule", config.fc_rule.to_string()),
            ("measures", join(&config.measures)),
            ("quick", config.quick.to_string()),
            ("oracle_n", config.oracle_n.to_string()),
            ("oracle_reps", config.oracle_reps.to_string()),
            ("record_runtime", config.record_runtime.to_string()),
            ("threads", a.threads.map(|t| t.to_string()).unwrap_or_else(|| "all".into())),
        ],
    );

    let output = run_sweep(&config, a.threads)?;
    let mut out = open_out(a.out.as_deref())?;
    write_records(&mut out, &output.records)?;
    out.flush()?;

    let failures = output.records.iter().filter(|r| r.error.is_some()).count();
    if failures > 0 {
        eprintln!("# warning: {failures} record(s) carry an error");
    }
    if let Some(path) = &a.summary {
        let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut w = BufWriter::new(file);
        write_summary(&mut w, &summarize(&output.records), &imse_table(&output.records))?;
        w.flush()?;
    }
    Ok(())
}

pub fn imse(a: ImseArgs) -> Result<()> {
    log_config("imse", &[("in", a.input.display().to_string())]);
    let file = File::open(&a.input).with_context(|| format!("cannot read {}", a.input.display()))?;
    let records = read_records(io::BufReader::new(file)).with_context(|| format!("in {}", a.input.display()))?;
    let rows = imse_table(&records);
    for row in rows.iter().filter(|r| r.excluded_nan > 0) {
        eprintln!(
            "# warning: {} NaN estimate(s) excluded for {}/{}/{} n={}",
            row.excluded_nan, row.family, row.nonlinearity, row.measure, row.n
        );
    }
    let mut out = open_out(a.out.as_deref())?;
    write_imse(&mut out, &rows)?;
    out.flush()?;
    Ok(())
}

pub fn bench(a: BenchArgs) -> Result<()> {
    let model = resolve_model(&a.model, Some(0.5))?;
    let n_grid: Vec<usize> = parse_list(&a.n_grid, "n")?;
    let measures: Vec<MeasureKind> = parse_list(&a.measures, "measure")?;
    let fc_rule: FcRule = a.fc_rule.parse()?;
    let mut pairs = model_pairs(&model);
    pairs.extend([
        ("n_grid", join(&n_grid)),
        ("measures", join(&measures)),
        ("fc_rule", fc_rule.to_string()),
        ("reps", a.reps.to_string()),
        ("seed", a.seed.to_string()),
    ]);
    log_config("bench", &pairs);

    let report = bench_complexity(&n_grid, &model, fc_rule, &measures, a.reps, a.seed)?;
    let mut out = open_out(a.out.as_deref())?;
    writeln!(out, "measure,n,median_ns")?;
    for row in &report.rows {
        writeln!(out, "{},{},{}", row.measure, row.n, row.median_ns)?;
    }
    for (kind, slope) in &report.slopes {
        writeln!(out, "# slope {kind}={}", sig9(*slope))?;
    }
    out.flush()?;
    Ok(())
}
