use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use ascent_nav::bench::{benchmark_timing, InstantClock};
use ascent_nav::campaign::{format_summary, run_campaign, summarize, CampaignSpec};
use ascent_nav::config::{measurement_mode, ConfigFile};
use ascent_nav::export::{self, RunRow};
use ascent_nav_core::estimators::{run_filter, FilterKind};
use ascent_nav_core::scenario::{
    generate_observations, generate_truth, initial_estimate, measurement_stream, run_seed, ScenarioConfig,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// GNSS navigation filters for launch-vehicle ascent: truth generation,
/// observation synthesis, filter runs, Monte Carlo campaigns and timing.
#[derive(Debug, Parser)]
#[command(name = "ascent-nav", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (TOML); defaults to the built-in CRS-5 scenario.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Receiver channel count(s), comma separated.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_channels)]
    channels: Vec<usize>,
    /// Filter(s) to run.
    #[arg(long, global = true, value_enum, default_value = "all")]
    filter: FilterArg,
    /// Master seed for the measurement noise.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; standard output for single-file commands if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Measurement model used by the filters.
    #[arg(long, global = true, value_parser = ["range", "range-rate"])]
    measurement_mode: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the reference trajectory (truth.csv).
    Truth,
    /// Write the observations of one run (observations.csv).
    Observe {
        /// Run index whose noise seed is used.
        #[arg(long, default_value_t = 0)]
        run: usize,
    },
    /// Run filters over one observation stream (filter_run.csv).
    Run {
        #[arg(long, default_value_t = 0)]
        run: usize,
        #[command(flatten)]
        limit: DivergenceLimit,
    },
    /// Monte Carlo campaign (runs.csv and summary.csv).
    Campaign {
        #[arg(long, default_value_t = 200)]
        runs: usize,
        #[command(flatten)]
        limit: DivergenceLimit,
    },
    /// Single-threaded per-step timing (timing.csv).
    Bench {
        /// Timed steps per filter.
        #[arg(long, default_value_t = 5000)]
        steps: usize,
    },
    /// Summarize a runs.csv into summary.csv.
    Report {
        /// Raw campaign results; defaults to OUT/runs.csv.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct DivergenceLimit {
    /// Exit with status 2 when any filter diverges in more than this
    /// percentage of runs.
    #[arg(long, default_value_t = 10.0)]
    max_diverged_pct: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FilterArg {
    Ekf,
    Ukf,
    Spukf,
    Espukf,
    All,
}

impl FilterArg {
    fn kinds(self) -> Vec<FilterKind> {
        match self {
            FilterArg::Ekf => vec![FilterKind::Ekf],
            FilterArg::Ukf => vec![FilterKind::Ukf],
            FilterArg::Spukf => vec![FilterKind::Spukf],
            FilterArg::Espukf => vec![FilterKind::Espukf],
            FilterArg::All => FilterKind::ALL.to_vec(),
        }
    }
}

fn parse_channels(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(k) if ascent_nav_core::scenario::CHANNEL_OPTIONS.contains(&k) => Ok(k),
        _ => Err(format!("`{s}` is not one of 4, 6, 8, 10")),
    }
}

/// The divergence limit was exceeded (exit status 2).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct DivergenceBreach(String);

fn scenario(c: &Common) -> Result<ScenarioConfig> {
    let file = match &c.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let mut cfg = file.scenario()?;
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(k) = c.channels.first() {
        cfg.channels = *k;
    }
    if let Some(m) = &c.measurement_mode {
        cfg.mode = measurement_mode(m)?;
    }
    ascent_nav::config::check(&cfg)?;
    Ok(cfg)
}

fn output(out: &Option<PathBuf>, name: &str) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(name);
            Box::new(BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn out_dir(out: &Option<PathBuf>) -> Result<PathBuf> {
    let dir = out.clone().unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn check_divergence(rows: &[RunRow], limit: &DivergenceLimit) -> Result<()> {
    for kind in FilterKind::ALL {
        let mine: Vec<&RunRow> = rows.iter().filter(|r| r.filter == kind.name()).collect();
        if mine.is_empty() {
            continue;
        }
        let diverged = mine.iter().filter(|r| r.diverged != 0).count();
        let pct = 100.0 * diverged as f64 / mine.len() as f64;
        if pct > limit.max_diverged_pct {
            return Err(DivergenceBreach(format!(
                "{kind} diverged in {diverged} of {} runs ({pct:.1}% > {}%)",
                mine.len(),
                limit.max_diverged_pct
            ))
            .into());
        }
    }
    Ok(())
}

fn write_summary(dir: &Path, rows: &[RunRow]) -> Result<()> {
    let summary = summarize(rows)?;
    export::write_rows(File::create(dir.join("summary.csv"))?, summary.iter())?;
    print!("{}", format_summary(&summary));
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    let c = &cli.common;
    match cli.command {
        Command::Truth => {
            let cfg = scenario(c)?;
            let truth = generate_truth(&cfg)?;
            export::write_truth(output(&c.out, "truth.csv")?, &truth)?;
        }
        Command::Observe { run } => {
            let cfg = scenario(c)?;
            let truth = generate_truth(&cfg)?;
            let obs = generate_observations(&truth, &cfg, run_seed(cfg.seed, run as u64));
            let degraded = obs.iter().filter(|o| o.degraded).count();
            if degraded > 0 {
                eprintln!("warning: {degraded} epochs have fewer than {} visible satellites", cfg.channels);
            }
            export::write_observations(output(&c.out, "observations.csv")?, &obs)?;
        }
        Command::Run { run, limit } => {
            let cfg = scenario(c)?;
            let truth = generate_truth(&cfg)?;
            let seed = run_seed(cfg.seed, run as u64);
            let obs = generate_observations(&truth, &cfg, seed);
            let epochs = measurement_stream(&obs, &cfg);
            let init = initial_estimate(&cfg, seed);
            let model = cfg.model();
            let mm = cfg.measurement_config();
            let runs: Vec<_> = c
                .filter
                .kinds()
                .into_iter()
                .map(|kind| {
                    let mut clock = InstantClock::new();
                    run_filter(kind, &init, truth.times[0], &epochs, &truth.states, &model, &mm, &cfg.ut, &mut clock)
                })
                .collect();
            for r in &runs {
                match &r.diverged {
                    Some((t, e)) => eprintln!("{}: diverged at t = {t} s: {e}", r.kind),
                    None => eprintln!(
                        "{}: mean position error {:.4} m, mean step {:.4} ms",
                        r.kind,
                        r.mean_position_error(),
                        r.mean_step_time() * 1e3
                    ),
                }
            }
            export::write_filter_runs(output(&c.out, "filter_run.csv")?, &runs)?;
            let rows: Vec<RunRow> = runs
                .iter()
                .map(|r| RunRow { filter: r.kind.name().into(), diverged: r.is_diverged() as u8, ..Default::default() })
                .collect();
            check_divergence(&rows, &limit)?;
        }
        Command::Campaign { runs, limit } => {
            let cfg = scenario(c)?;
            let channels = if c.channels.is_empty() {
                ascent_nav_core::scenario::CHANNEL_OPTIONS.to_vec()
            } else {
                c.channels.clone()
            };
            let spec = CampaignSpec { runs, filters: c.filter.kinds(), channels };
            let rows = run_campaign(&cfg, &spec)?;
            let dir = out_dir(&c.out)?;
            export::write_rows(File::create(dir.join("runs.csv"))?, rows.iter())?;
            write_summary(&dir, &rows)?;
            check_divergence(&rows, &limit)?;
        }
        Command::Bench { steps } => {
            let cfg = scenario(c)?;
            let report = benchmark_timing(&cfg, &c.filter.kinds(), steps)?;
            print!("{}", report.format());
            if let Some(dir) = &c.out {
                std::fs::create_dir_all(dir)?;
                export::write_rows(File::create(dir.join("timing.csv"))?, report.rows.iter())?;
            }
        }
        Command::Report { input } => {
            let dir = out_dir(&c.out)?;
            let path = input.unwrap_or_else(|| dir.join("runs.csv"));
            let file = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
            let rows: Vec<RunRow> = export::read_rows(file).with_context(|| format!("reading {}", path.display()))?;
            write_summary(&dir, &rows)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e)
            if e.chain()
                .any(|c| c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<DivergenceBreach>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
