//! Single-threaded per-step timing of the filters.

use std::time::Instant;

use anyhow::{bail, Context, Result};
use ascent_nav_core::estimators::{run_filter, FilterKind, StepClock};
use ascent_nav_core::scenario::{
    generate_observations, generate_truth, initial_estimate, measurement_stream, run_seed, ScenarioConfig,
};
use serde::{Deserialize, Serialize};

/// Monotonic wall clock for the filter step timers.
#[derive(Debug, Clone, Copy)]
pub struct InstantClock(Instant);

impl InstantClock {
    pub fn new() -> Self {
        InstantClock(Instant::now())
    }
}

impl Default for InstantClock {
    fn default() -> Self {
        Self::new()
    }
}

impl StepClock for InstantClock {
    fn now(&mut self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// Steps discarded before timing starts.
pub const WARMUP_STEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub filter: String,
    pub steps: usize,
    pub mean_predict_ms: f64,
    pub mean_update_ms: f64,
    pub mean_step_ms: f64,
    /// `100 (1 - t / t_UKF)`; empty when the UKF was not timed.
    pub reduction_vs_ukf_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingReport {
    pub rows: Vec<TimingRow>,
}

impl TimingReport {
    pub fn get(&self, kind: FilterKind) -> Option<&TimingRow> {
        self.rows.iter().find(|r| r.filter == kind.name())
    }

    pub fn format(&self) -> String {
        let mut s = format!(
            "{:<8}{:>8}{:>14}{:>14}{:>12}{:>12}\n",
            "filter", "steps", "predict ms", "update ms", "step ms", "vs UKF %"
        );
        for r in &self.rows {
            let red = r.reduction_vs_ukf_pct.map(|v| format!("{v:.2}")).unwrap_or_default();
            s += &format!(
                "{:<8}{:>8}{:>14.5}{:>14.5}{:>12.5}{:>12}\n",
                r.filter, r.steps, r.mean_predict_ms, r.mean_update_ms, r.mean_step_ms, red
            );
        }
        s
    }
}

/// Times predict+update over at least `steps` epochs per filter after a
/// warm-up of [`WARMUP_STEPS`]. Filters are run in interleaved passes over
/// one observation stream so slow drifts of the machine affect all alike.
/// Must be called from a single thread with no concurrent load.
pub fn benchmark_timing(cfg: &ScenarioConfig, filters: &[FilterKind], steps: usize) -> Result<TimingReport> {
    if filters.is_empty() {
        bail!("no filters to time");
    }
    let truth = generate_truth(cfg).context("truth trajectory")?;
    let seed = run_seed(cfg.seed, 0);
    let obs = generate_observations(&truth, cfg, seed);
    let epochs = measurement_stream(&obs, cfg);
    let init = initial_estimate(cfg, seed);
    let model = cfg.model();
    let mm = cfg.measurement_config();
    let t0 = truth.times[0];
    let mut clock = InstantClock::new();

    let warm = WARMUP_STEPS.min(epochs.len());
    for &kind in filters {
        run_filter(kind, &init, t0, &epochs[..warm], &truth.states, &model, &mm, &cfg.ut, &mut clock);
    }

    let mut acc = vec![(0usize, 0.0f64, 0.0f64); filters.len()];
    while acc.iter().any(|a| a.0 < steps) {
        for (kind, a) in filters.iter().zip(acc.iter_mut()) {
            if a.0 >= steps {
                continue;
            }
            let run = run_filter(*kind, &init, t0, &epochs, &truth.states, &model, &mm, &cfg.ut, &mut clock);
            if run.records.is_empty() {
                bail!("{kind} produced no timed steps");
            }
            for r in &run.records {
                a.0 += 1;
                a.1 += r.timing.predict;
                a.2 += r.timing.update;
            }
        }
    }

    let mut rows: Vec<TimingRow> = filters
        .iter()
        .zip(&acc)
        .map(|(kind, &(n, p, u))| {
            let (p, u) = (p / n as f64 * 1e3, u / n as f64 * 1e3);
            TimingRow {
                filter: kind.name().to_string(),
                steps: n,
                mean_predict_ms: p,
                mean_update_ms: u,
                mean_step_ms: p + u,
                reduction_vs_ukf_pct: None,
            }
        })
        .collect();
    if let Some(t_ukf) = rows.iter().find(|r| r.filter == FilterKind::Ukf.name()).map(|r| r.mean_step_ms) {
        for r in &mut rows {
            r.reduction_vs_ukf_pct = Some(100.0 * (1.0 - r.mean_step_ms / t_ukf));
        }
    }
    Ok(TimingReport { rows })
}
