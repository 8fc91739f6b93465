//! Monte Carlo campaigns: one shared truth trajectory, paired observation
//! streams per run, every requested filter on every stream.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use ascent_nav_core::estimators::{run_filter, FilterKind, FilterRun};
use ascent_nav_core::scenario::{
    generate_observations, generate_truth, initial_estimate, measurement_stream, run_seed, ScenarioConfig, TruthLog,
};
use rayon::prelude::*;

use crate::bench::InstantClock;
use crate::export::{RunRow, SummaryRow};
use crate::stats::{finite_mean, median, percentile};

/// Environment variable holding the campaign worker count.
pub const WORKERS_ENV: &str = "ASCENT_NAV_WORKERS";

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSpec {
    pub runs: usize,
    pub filters: Vec<FilterKind>,
    pub channels: Vec<usize>,
}

/// `PDOP * sigma_R / median position error`. An infinite median gives 0.
pub fn position_error_ratio(pdop: f64, sigma_r: f64, median_err: f64) -> Result<f64> {
    if median_err.is_nan() || median_err <= 0.0 {
        bail!("position error ratio needs a positive median error, got {median_err}");
    }
    Ok(pdop * sigma_r / median_err)
}

/// Rayon pool sized by `ASCENT_NAV_WORKERS` (all cores when unset).
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v.trim().parse().with_context(|| format!("{WORKERS_ENV}=`{v}` is not a worker count"))?;
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?)
}

/// Filter runs of one Monte Carlo sample: channel count `channels`, run
/// index `run`, all filters on the same stream.
pub fn run_sample(
    cfg: &ScenarioConfig,
    truth: &TruthLog,
    channels: usize,
    run: usize,
    filters: &[FilterKind],
) -> (u64, f64, Vec<FilterRun>) {
    let mut cfg = cfg.clone();
    cfg.channels = channels;
    let seed = run_seed(cfg.seed, run as u64);
    let obs = generate_observations(truth, &cfg, seed);
    let pdops: Vec<f64> = obs.iter().filter_map(|o| o.pdop).collect();
    let mean_pdop = if pdops.is_empty() { f64::NAN } else { pdops.iter().sum::<f64>() / pdops.len() as f64 };
    let epochs = measurement_stream(&obs, &cfg);
    let init = initial_estimate(&cfg, seed);
    let model = cfg.model();
    let mm = cfg.measurement_config();
    let t0 = truth.times[0];
    let runs = filters
        .iter()
        .map(|&kind| {
            let mut clock = InstantClock::new();
            run_filter(kind, &init, t0, &epochs, &truth.states, &model, &mm, &cfg.ut, &mut clock)
        })
        .collect();
    (seed, mean_pdop, runs)
}

fn run_row(run: usize, seed: u64, channels: usize, mean_pdop: f64, sigma_r: f64, fr: &FilterRun) -> RunRow {
    let diverged = fr.is_diverged();
    RunRow {
        run,
        seed,
        filter: fr.kind.name().to_string(),
        channels,
        mean_pos_err: if diverged { f64::INFINITY } else { fr.mean_position_error() },
        mean_vel_err: if diverged { f64::INFINITY } else { fr.mean_speed_error() },
        mean_pdop,
        sigma_r,
        mean_step_ms: fr.mean_step_time() * 1e3,
        diverged: diverged as u8,
    }
}

/// Runs `spec.runs` samples for each channel count in parallel. Rows are
/// ordered by channel count, run, then filter.
pub fn run_campaign(cfg: &ScenarioConfig, spec: &CampaignSpec) -> Result<Vec<RunRow>> {
    if spec.runs == 0 {
        bail!("a campaign needs at least one run");
    }
    if spec.filters.is_empty() || spec.channels.is_empty() {
        bail!("a campaign needs at least one filter and one channel count");
    }
    let truth = generate_truth(cfg).context("truth trajectory")?;
    let sigma_r = cfg.measurement_config().sigma_range;
    let units: Vec<(usize, usize)> = spec.channels.iter().flat_map(|&k| (0..spec.runs).map(move |r| (k, r))).collect();
    let pool = worker_pool()?;
    let rows: Vec<Vec<RunRow>> = pool.install(|| {
        units
            .par_iter()
            .map(|&(k, r)| {
                let (seed, pdop, runs) = run_sample(cfg, &truth, k, r, &spec.filters);
                runs.iter().map(|fr| run_row(r, seed, k, pdop, sigma_r, fr)).collect()
            })
            .collect()
    });
    Ok(rows.into_iter().flatten().collect())
}

/// Position errors of one filter at one channel count, ordered by run.
pub fn errors_by_run(rows: &[RunRow], filter: FilterKind, channels: usize) -> Vec<f64> {
    let mut v: Vec<(usize, f64)> = rows
        .iter()
        .filter(|r| r.channels == channels && r.filter == filter.name())
        .map(|r| (r.run, r.mean_pos_err))
        .collect();
    v.sort_by_key(|p| p.0);
    v.into_iter().map(|p| p.1).collect()
}

/// Aggregates raw run rows into one summary row per (channels, filter).
/// Divergent runs enter the medians and percentiles as infinite errors and
/// are left out of the means. The PDOP in the error ratio is the average
/// over runs of each run's time-averaged PDOP.
pub fn summarize(rows: &[RunRow]) -> Result<Vec<SummaryRow>> {
    let mut groups: BTreeMap<(usize, FilterKind), Vec<&RunRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.channels, r.kind()?)).or_default().push(r);
    }
    let mut out = Vec::with_capacity(groups.len());
    for ((k, kind), mut g) in groups.iter().map(|(key, g)| (*key, g.clone())) {
        g.sort_by_key(|r| r.run);
        let pos: Vec<f64> = g.iter().map(|r| r.mean_pos_err).collect();
        let vel: Vec<f64> = g.iter().map(|r| r.mean_vel_err).collect();
        let steps: Vec<f64> = g.iter().map(|r| r.mean_step_ms).collect();
        let pdop = g.iter().map(|r| r.mean_pdop).sum::<f64>() / g.len() as f64;
        let med = median(&pos);
        let ratio =
            position_error_ratio(pdop, g[0].sigma_r, med).with_context(|| format!("{kind} with {k} channels"))?;
        out.push(SummaryRow {
            filter: kind.name().to_string(),
            channels: k,
            median_pos_err_m: med,
            mean_pos_err_m: finite_mean(&pos),
            p95_pos_err_m: percentile(&pos, 95.0),
            median_vel_err_mps: median(&vel),
            mean_step_ms: finite_mean(&steps),
            reduction_vs_ukf_pct: None,
            pos_err_ratio: ratio,
            diverged_runs: g.iter().filter(|r| r.diverged != 0).count(),
        });
    }
    let ukf: BTreeMap<usize, f64> =
        out.iter().filter(|s| s.filter == FilterKind::Ukf.name()).map(|s| (s.channels, s.mean_step_ms)).collect();
    for s in &mut out {
        if let Some(t) = ukf.get(&s.channels) {
            s.reduction_vs_ukf_pct = Some(100.0 * (1.0 - s.mean_step_ms / t));
        }
    }
    Ok(out)
}

/// Plain-text table in the layout of one block per channel count.
pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut s = String::new();
    let mut last = None;
    for r in rows {
        if last != Some(r.channels) {
            s += &format!("\nNo. of GNSS observations: {}\n", r.channels);
            s += &format!(
                "{:<8}{:>14}{:>14}{:>14}{:>14}{:>12}{:>14}{:>10}{:>10}\n",
                "filter",
                "median pos m",
                "mean pos m",
                "p95 pos m",
                "median vel",
                "step ms",
                "vs UKF %",
                "ratio",
                "diverged"
            );
            last = Some(r.channels);
        }
        let red = r.reduction_vs_ukf_pct.map(|v| format!("{v:.2}")).unwrap_or_default();
        s += &format!(
            "{:<8}{:>14.4}{:>14.4}{:>14.4}{:>14.4}{:>12.4}{:>14}{:>10.4}{:>10}\n",
            r.filter,
            r.median_pos_err_m,
            r.mean_pos_err_m,
            r.p95_pos_err_m,
            r.median_vel_err_mps,
            r.mean_step_ms,
            red,
            r.pos_err_ratio,
            r.diverged_runs
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_arithmetic() {
        assert_eq!(position_error_ratio(2.0, 5.0, 10.0).unwrap(), 1.0);
        assert_eq!(position_error_ratio(2.0, 5.0, f64::INFINITY).unwrap(), 0.0);
        assert!(position_error_ratio(2.0, 5.0, 0.0).is_err());
        assert!(position_error_ratio(2.0, 5.0, f64::NAN).is_err());
    }

    fn row(run: usize, filter: &str, err: f64, step: f64) -> RunRow {
        RunRow {
            run,
            filter: filter.into(),
            channels: 6,
            mean_pos_err: err,
            mean_vel_err: err / 10.0,
            mean_pdop: 2.0,
            sigma_r: 0.5,
            mean_step_ms: step,
            diverged: err.is_infinite() as u8,
            ..Default::default()
        }
    }

    #[test]
    fn summary_statistics() {
        let rows = vec![
            row(0, "UKF", 1.0, 4.0),
            row(1, "UKF", 3.0, 4.0),
            row(2, "UKF", 2.0, 4.0),
            row(0, "EKF", 2.0, 1.0),
            row(1, "EKF", f64::INFINITY, 1.0),
            row(2, "EKF", 4.0, 1.0),
        ];
        let s = summarize(&rows).unwrap();
        assert_eq!(s.len(), 2);
        let (ekf, ukf) = (&s[0], &s[1]);
        assert_eq!(ekf.filter, "EKF");
        assert_eq!(ekf.median_pos_err_m, 4.0);
        assert_eq!(ekf.mean_pos_err_m, 3.0);
        assert_eq!(ekf.diverged_runs, 1);
        assert_eq!(ekf.reduction_vs_ukf_pct, Some(75.0));
        assert_eq!(ekf.pos_err_ratio, 2.0 * 0.5 / 4.0);
        assert_eq!(ukf.median_pos_err_m, 2.0);
        assert_eq!(ukf.reduction_vs_ukf_pct, Some(0.0));
        let mut reversed = rows.clone();
        reversed.reverse();
        assert_eq!(summarize(&reversed).unwrap(), s);
    }

    #[test]
    fn no_ukf_leaves_reduction_empty() {
        let s = summarize(&[row(0, "EKF", 1.0, 1.0)]).unwrap();
        assert_eq!(s[0].reduction_vs_ukf_pct, None);
    }
}
