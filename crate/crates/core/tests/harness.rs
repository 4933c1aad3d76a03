use approx::assert_abs_diff_eq;
use mdep_core::harness::{
    bench_complexity, imse_table, read_records, run_sweep, summarize, write_records, write_summary, FcRule, SweepConfig,
};
use mdep_core::measures::MeasureKind;
use mdep_core::models::{sample_model, GenModel, Nonlinearity, PdfFamily};
use mdep_core::numerics::RandomStream;

fn small_config() -> SweepConfig {
    SweepConfig {
        families: vec![PdfFamily::STANDARD_NORMAL],
        nonlinearities: vec![Nonlinearity::Linear, Nonlinearity::Quadratic],
        rho_grid: vec![0.3, 0.6],
        n_grid: vec![50, 120],
        mc_runs: 3,
        master_seed: 99,
        measures: vec![MeasureKind::Pearson, MeasureKind::MutualDependence],
        ..SweepConfig::default()
    }
}

fn csv_bytes(cfg: &SweepConfig, threads: usize) -> Vec<u8> {
    let out = run_sweep(cfg, Some(threads)).unwrap();
    let mut buf = Vec::new();
    write_records(&mut buf, &out.records).unwrap();
    buf
}

#[test]
fn record_count_is_cells_times_runs_times_measures() {
    let cfg = SweepConfig {
        nonlinearities: vec![Nonlinearity::Linear],
        rho_grid: vec![0.5],
        n_grid: vec![40],
        mc_runs: 2,
        measures: vec![MeasureKind::Pearson],
        ..small_config()
    };
    assert_eq!(run_sweep(&cfg, Some(1)).unwrap().records.len(), 2);
    let cfg = small_config();
    assert_eq!(run_sweep(&cfg, Some(1)).unwrap().records.len(), 4 * 2 * 3 * 2);
}

#[test]
fn output_is_independent_of_thread_count() {
    let cfg = small_config();
    let one = csv_bytes(&cfg, 1);
    assert_eq!(one, csv_bytes(&cfg, 3));
    assert_eq!(one, csv_bytes(&cfg, 1));
    let header = String::from_utf8(one[..one.iter().position(|&b| b == b'\n').unwrap()].to_vec()).unwrap();
    assert_eq!(header, "family,nonlinearity,rho,I_theoretical,n,run_index,seed,measure,estimate,theoretical,runtime_ns,error");
}

#[test]
fn csv_round_trip_and_seed_column() {
    let cfg = small_config();
    let out = run_sweep(&cfg, Some(2)).unwrap();
    let mut buf = Vec::new();
    write_records(&mut buf, &out.records).unwrap();
    let back = read_records(buf.as_slice()).unwrap();
    assert_eq!(back.len(), out.records.len());
    let mut again = Vec::new();
    write_records(&mut again, &back).unwrap();
    assert_eq!(buf, again);

    // The seed column regenerates the trial sample.
    let rec = &out.records[7];
    let model = GenModel::new(rec.family.parse().unwrap(), rec.nonlinearity.parse().unwrap(), rec.rho).unwrap();
    let sample = sample_model(&model, rec.n, &mut RandomStream::new(rec.seed, 0)).unwrap();
    let value = mdep_core::harness::estimate_measure(&sample, rec.measure, cfg.fc_rule.cutoff(rec.rho), cfg.quick).unwrap();
    assert_eq!(value, rec.estimate);
    // Every row of a cell carries the same theoretical mutual information.
    for r in &out.records {
        let first = out.records.iter().find(|q| q.family == r.family && q.nonlinearity == r.nonlinearity && q.rho == r.rho).unwrap();
        assert_eq!(r.i_theoretical, first.i_theoretical);
    }
}

#[test]
fn failures_become_nan_rows() {
    let cfg = SweepConfig {
        nonlinearities: vec![Nonlinearity::Linear],
        rho_grid: vec![0.5],
        n_grid: vec![1],
        mc_runs: 2,
        measures: vec![MeasureKind::Pearson, MeasureKind::MutualDependence],
        ..small_config()
    };
    let out = run_sweep(&cfg, Some(1)).unwrap();
    let pearson: Vec<_> = out.records.iter().filter(|r| r.measure == MeasureKind::Pearson).collect();
    assert!(pearson.iter().all(|r| r.estimate.is_nan() && r.error.is_some()));
    let mdep: Vec<_> = out.records.iter().filter(|r| r.measure == MeasureKind::MutualDependence).collect();
    assert!(mdep.iter().all(|r| r.estimate == 0.0 && r.error.is_none()));
    let mut buf = Vec::new();
    write_records(&mut buf, &out.records).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.lines().nth(1).unwrap().contains(",pearson,,"));
    let summary = summarize(&out.records);
    assert_eq!(summary.iter().find(|s| s.measure == MeasureKind::Pearson).unwrap().failures, 2);
}

#[test]
fn pearson_converges_at_large_n() {
    let cfg = SweepConfig {
        nonlinearities: vec![Nonlinearity::Linear],
        rho_grid: vec![0.9],
        n_grid: vec![10_000],
        mc_runs: 5,
        measures: vec![MeasureKind::Pearson],
        ..small_config()
    };
    let out = run_sweep(&cfg, None).unwrap();
    let mean = out.records.iter().map(|r| r.estimate).sum::<f64>() / 5.0;
    assert_abs_diff_eq!(mean, 0.9, epsilon = 0.01);
    assert_abs_diff_eq!(out.records[0].theoretical, 0.9, epsilon = 1e-6);
    assert_abs_diff_eq!(out.records[0].i_theoretical, -0.5 * (1.0f64 - 0.81).ln(), epsilon = 1e-5);
}

#[test]
fn imse_rows_and_summary() {
    let cfg = small_config();
    let out = run_sweep(&cfg, Some(2)).unwrap();
    let rows = imse_table(&out.records);
    // (2 nonlinearities) × (2 measures) × (2 sizes).
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r.imse >= 0.0 && r.grid_points == 2 && r.error.is_none()));
    let mut buf = Vec::new();
    write_summary(&mut buf, &summarize(&out.records), &rows).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 16 + 8);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["kind"] == "cell" || v["kind"] == "imse");
    }

    let mut exact = out.records.clone();
    for r in &mut exact {
        r.estimate = r.theoretical;
    }
    assert!(imse_table(&exact).iter().all(|r| r.imse == 0.0));
}

#[test]
fn invalid_configs_are_rejected() {
    let base = small_config();
    for cfg in [
        SweepConfig { mc_runs: 1, ..base.clone() },
        SweepConfig { rho_grid: vec![0.5, 0.3], ..base.clone() },
        SweepConfig { rho_grid: vec![1.0], ..base.clone() },
        SweepConfig { n_grid: vec![100, 100], ..base.clone() },
        SweepConfig { measures: vec![MeasureKind::MutualInformation], ..base.clone() },
        SweepConfig { fc_rule: FcRule::Fixed(-1.0), ..base.clone() },
    ] {
        assert!(run_sweep(&cfg, Some(1)).is_err());
    }
    assert!(run_sweep(&base, Some(0)).is_err());
}

#[test]
fn timing_table_shape() {
    let model = GenModel::new(PdfFamily::STANDARD_NORMAL, Nonlinearity::Linear, 0.5).unwrap();
    let kinds = [MeasureKind::Pearson, MeasureKind::DistanceCorrelation, MeasureKind::MutualDependence];
    let report = bench_complexity(&[256, 512, 1024], &model, FcRule::Rho, &kinds, 3, 1).unwrap();
    assert_eq!(report.rows.len(), 9);
    assert_eq!(report.slopes.len(), 3);
    let dcorr = report.slopes.iter().find(|s| s.0 == MeasureKind::DistanceCorrelation).unwrap().1;
    assert!(dcorr > 1.2, "dcorr slope {dcorr}");
    assert!(bench_complexity(&[256, 512], &model, FcRule::Rho, &kinds, 1, 1).is_err());
}
