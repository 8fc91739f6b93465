//! CSV formats: truth log, observations, per-epoch filter output, per-run
//! campaign results and the summary table.

use std::io::{Read, Write};

use anyhow::{Context, Result};
use ascent_nav_core::estimators::{FilterKind, FilterRun};
use ascent_nav_core::gnss::GnssObservation;
use ascent_nav_core::scenario::TruthLog;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRow {
    pub t: f64,
    pub x: f64,
    pub h: f64,
    pub v: f64,
    pub gamma: f64,
    pub m: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub b: f64,
    pub bdot: f64,
    pub ecef_x: f64,
    pub ecef_y: f64,
    pub ecef_z: f64,
}

pub fn truth_rows(truth: &TruthLog) -> Vec<TruthRow> {
    truth
        .times
        .iter()
        .zip(&truth.states)
        .zip(&truth.positions)
        .map(|((&t, s), p)| TruthRow {
            t,
            x: s.x(),
            h: s.h(),
            v: s.v(),
            gamma: s.gamma(),
            m: s.m(),
            c: s.c(),
            b: s.b(),
            bdot: s.b_dot(),
            ecef_x: p.x,
            ecef_y: p.y,
            ecef_z: p.z,
        })
        .collect()
}

pub fn write_truth<W: Write>(w: W, truth: &TruthLog) -> Result<()> {
    write_rows(w, truth_rows(truth))
}

/// One channel of one epoch, values to nine significant digits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationRow {
    pub t: String,
    pub sat_id: usize,
    pub rho_m: String,
    pub phi_m: String,
    pub rate_mps: String,
    pub elevation_rad: String,
}

fn sig9(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn observation_rows(obs: &[GnssObservation]) -> Vec<ObservationRow> {
    obs.iter()
        .flat_map(|o| {
            o.channels.iter().map(move |c| ObservationRow {
                t: sig9(o.t),
                sat_id: c.sat,
                rho_m: sig9(c.rho),
                phi_m: sig9(c.phi),
                rate_mps: sig9(c.rate),
                elevation_rad: sig9(c.elevation),
            })
        })
        .collect()
}

pub fn write_observations<W: Write>(w: W, obs: &[GnssObservation]) -> Result<()> {
    write_rows(w, observation_rows(obs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterEpochRow {
    pub epoch_s: f64,
    pub filter: String,
    pub err_downrange_m: f64,
    pub err_altitude_m: f64,
    pub err_speed_mps: f64,
    pub err_gamma_rad: f64,
    pub cov_trace: f64,
    pub predict_ms: f64,
    pub update_ms: f64,
    pub diverged_flag: u8,
}

/// Per-epoch rows; a divergent run ends with one row at the failure time
/// carrying NaN errors and `diverged_flag = 1`.
pub fn filter_rows(run: &FilterRun) -> Vec<FilterEpochRow> {
    let name = run.kind.name().to_string();
    let mut rows: Vec<FilterEpochRow> = run
        .records
        .iter()
        .map(|r| FilterEpochRow {
            epoch_s: r.t,
            filter: name.clone(),
            err_downrange_m: r.error[0],
            err_altitude_m: r.error[1],
            err_speed_mps: r.error[2],
            err_gamma_rad: r.error[3],
            cov_trace: r.cov_trace,
            predict_ms: r.timing.predict * 1e3,
            update_ms: r.timing.update * 1e3,
            diverged_flag: 0,
        })
        .collect();
    if let Some((t, _)) = &run.diverged {
        rows.push(FilterEpochRow {
            epoch_s: *t,
            filter: name,
            err_downrange_m: f64::NAN,
            err_altitude_m: f64::NAN,
            err_speed_mps: f64::NAN,
            err_gamma_rad: f64::NAN,
            cov_trace: f64::NAN,
            predict_ms: f64::NAN,
            update_ms: f64::NAN,
            diverged_flag: 1,
        });
    }
    rows
}

pub fn write_filter_runs<W: Write>(w: W, runs: &[FilterRun]) -> Result<()> {
    write_rows(w, runs.iter().flat_map(filter_rows))
}

/// Raw per-run campaign result. Floats are written in shortest round-trip
/// form so that statistics recomputed from the file are bit-identical.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub run: usize,
    pub seed: u64,
    pub filter: String,
    pub channels: usize,
    /// Time-averaged position error; `inf` for a divergent run.
    pub mean_pos_err: f64,
    /// Time-averaged speed error; `inf` for a divergent run.
    pub mean_vel_err: f64,
    pub mean_pdop: f64,
    /// Range noise standard deviation seen by the filter (m).
    pub sigma_r: f64,
    pub mean_step_ms: f64,
    pub diverged: u8,
}

impl RunRow {
    pub fn kind(&self) -> Result<FilterKind> {
        self.filter.parse().map_err(|_| anyhow::anyhow!("unknown filter `{}` in run {}", self.filter, self.run))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub filter: String,
    pub channels: usize,
    pub median_pos_err_m: f64,
    pub mean_pos_err_m: f64,
    pub p95_pos_err_m: f64,
    pub median_vel_err_mps: f64,
    pub mean_step_ms: f64,
    /// Empty when the UKF is not part of the summary.
    pub reduction_vs_ukf_pct: Option<f64>,
    pub pos_err_ratio: f64,
    pub diverged_runs: usize,
}

pub fn write_rows<W: Write, T: Serialize>(w: W, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(r: R) -> Result<Vec<T>> {
    let mut rdr = csv::Reader::from_reader(r);
    rdr.deserialize().enumerate().map(|(i, row)| row.with_context(|| format!("CSV record {}", i + 1))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_rows_round_trip_exactly() {
        let rows = vec![
            RunRow {
                run: 0,
                seed: u64::MAX,
                filter: "EKF".into(),
                channels: 6,
                mean_pos_err: 0.1 + 0.2,
                mean_vel_err: f64::INFINITY,
                mean_pdop: 1.0 / 3.0,
                sigma_r: 0.35355339059327373,
                mean_step_ms: 1e-3,
                diverged: 1,
            },
            RunRow { run: 1, filter: "UKF".into(), mean_vel_err: 2.5, diverged: 0, ..Default::default() },
        ];
        let mut buf = Vec::new();
        write_rows(&mut buf, rows.clone()).unwrap();
        let back: Vec<RunRow> = read_rows(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn sig9_format() {
        assert_eq!(sig9(20_181_863.123456), "2.01818631e7");
        assert_eq!(sig9(-0.5), "-5.00000000e-1");
    }

    #[test]
    fn summary_reduction_may_be_empty() {
        let row = SummaryRow {
            filter: "EKF".into(),
            channels: 4,
            median_pos_err_m: 1.0,
            mean_pos_err_m: 1.0,
            p95_pos_err_m: 1.0,
            median_vel_err_mps: 1.0,
            mean_step_ms: 1.0,
            reduction_vs_ukf_pct: None,
            pos_err_ratio: 1.0,
            diverged_runs: 0,
        };
        let mut buf = Vec::new();
        write_rows(&mut buf, [row.clone()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().nth(1).unwrap().contains("1.0,,1.0"), "{text}");
        let back: Vec<SummaryRow> = read_rows(buf.as_slice()).unwrap();
        assert_eq!(back, [row]);
    }
}
