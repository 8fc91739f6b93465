use ascent_nav::bench::benchmark_timing;
use ascent_nav::campaign::{errors_by_run, position_error_ratio, run_campaign, run_sample, summarize, CampaignSpec};
use ascent_nav::export::{observation_rows, read_rows, write_rows, RunRow};
use ascent_nav::stats::median;
use ascent_nav_core::estimators::FilterKind;
use ascent_nav_core::gnss::ErrorBudget;
use ascent_nav_core::scenario::{build_crs5, generate_observations, generate_truth, run_seed};

#[test]
fn noiseless_campaign_converges() {
    let mut cfg = build_crs5();
    cfg.budget = ErrorBudget { seed: 0, ..ErrorBudget::noiseless() };
    cfg.perturb_initial_estimate = false;
    let spec = CampaignSpec { runs: 1, filters: FilterKind::ALL.to_vec(), channels: vec![6] };
    let rows = run_campaign(&cfg, &spec).unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!(r.diverged, 0);
        assert!(r.mean_pos_err < 1.0, "{} {}", r.filter, r.mean_pos_err);
    }
}

#[test]
fn filters_share_the_stream() {
    let cfg = build_crs5();
    let truth = generate_truth(&cfg).unwrap();
    let a = generate_observations(&truth, &cfg, run_seed(cfg.seed, 3));
    let b = generate_observations(&truth, &cfg, run_seed(cfg.seed, 3));
    let (mut ca, mut cb) = (Vec::new(), Vec::new());
    write_rows(&mut ca, observation_rows(&a)).unwrap();
    write_rows(&mut cb, observation_rows(&b)).unwrap();
    assert_eq!(ca, cb);
    let (seed, _, runs) = run_sample(&cfg, &truth, 6, 3, &[FilterKind::Ukf, FilterKind::Spukf]);
    assert_eq!(seed, run_seed(cfg.seed, 3));
    assert_eq!(runs[0].initial, runs[1].initial);
}

#[test]
fn ratio_recomputes_from_csv() {
    let cfg = build_crs5();
    let spec = CampaignSpec { runs: 4, filters: FilterKind::ALL.to_vec(), channels: vec![4, 6] };
    let rows = run_campaign(&cfg, &spec).unwrap();
    let mut buf = Vec::new();
    write_rows(&mut buf, rows.iter()).unwrap();
    let back: Vec<RunRow> = read_rows(buf.as_slice()).unwrap();
    assert_eq!(back, rows);
    let summary = summarize(&back).unwrap();
    for s in &summary {
        let kind: FilterKind = s.filter.parse().unwrap();
        let errs = errors_by_run(&back, kind, s.channels);
        let mine: Vec<&RunRow> = back.iter().filter(|r| r.channels == s.channels && r.filter == s.filter).collect();
        let pdop = mine.iter().map(|r| r.mean_pdop).sum::<f64>() / mine.len() as f64;
        let ratio = position_error_ratio(pdop, mine[0].sigma_r, median(&errs)).unwrap();
        assert!((ratio - s.pos_err_ratio).abs() <= 1e-12 * ratio.abs());
    }
}

#[test]
fn campaign_is_reproducible() {
    let cfg = build_crs5();
    let spec = CampaignSpec { runs: 2, filters: vec![FilterKind::Ekf], channels: vec![8] };
    let a = run_campaign(&cfg, &spec).unwrap();
    let b = run_campaign(&cfg, &spec).unwrap();
    let strip = |v: &[RunRow]| v.iter().map(|r| (r.run, r.seed, r.mean_pos_err, r.mean_pdop)).collect::<Vec<_>>();
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn timing_without_ukf_has_no_reduction() {
    let cfg = build_crs5();
    let report = benchmark_timing(&cfg, &[FilterKind::Ekf], 100).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert!(report.rows[0].steps >= 100);
    assert_eq!(report.rows[0].reduction_vs_ukf_pct, None);
    let report = benchmark_timing(&cfg, &[FilterKind::Ukf], 100).unwrap();
    assert_eq!(report.rows[0].reduction_vs_ukf_pct, Some(0.0));
}

#[test]
fn empty_campaign_is_rejected() {
    let spec = CampaignSpec { runs: 0, filters: vec![FilterKind::Ekf], channels: vec![6] };
    assert!(run_campaign(&build_crs5(), &spec).is_err());
}
