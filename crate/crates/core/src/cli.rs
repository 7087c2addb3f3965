//! The `fddjam` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::channel::{exponential_covariance, CorrelationSpec};
use crate::error::{Error, Result};
use crate::experiments::{
    figure_spec, load_spec, run_sweep, write_experiment, write_results_to, ExperimentSpec,
    LemmaConfig, ResultRow, Scenario, SweepAxis,
};
use crate::jammer::{verify_lemma, JammingStrategy};
use crate::training::{design_pilots, EstimatorMode, PilotDesign, TrainingConfig};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "FDDJAM_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "fddjam",
    version,
    about = "Channel-training MSE of FDD massive MIMO under jamming"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment described by a TOML config (or a metadata sidecar).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Output file stem.
        #[arg(long, default_value = "sweep")]
        name: String,
    },
    /// Run one of the built-in figure sweeps.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        figure: u8,
        #[arg(long)]
        out: PathBuf,
        /// Monte-Carlo trials per point (0 = closed form only).
        #[arg(long, default_value_t = 0)]
        trials: usize,
    },
    /// Compare the eigen-optimal jammer against random unitary jammers.
    VerifyLemma {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate a single scenario and print one CSV row.
    #[command(allow_negative_numbers = true)]
    Mse {
        #[arg(long = "M")]
        m: usize,
        /// Jammer antennas; defaults to L.
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        r: f64,
        /// Jammer channel correlation; defaults to r.
        #[arg(long)]
        rg: Option<f64>,
        #[arg(long = "pb-db", default_value_t = 5.0)]
        pb_db: f64,
        #[arg(long = "pj-db", default_value_t = 5.0)]
        pj_db: f64,
        #[arg(long = "noise-variance", default_value_t = 1.0)]
        noise_variance: f64,
        #[arg(long, default_value = "optimal")]
        pilot: PilotDesign,
        #[arg(long, default_value = "eigen-optimal")]
        jamming: JammingStrategy,
        #[arg(long, default_value = "jammer-aware")]
        estimator: EstimatorMode,
        #[arg(long, default_value_t = 0)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the CSV header before the row.
        #[arg(long)]
        header: bool,
    },
}

fn configure_threads() {
    #[cfg(feature = "parallel")]
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // fails only if the pool is already built, e.g. a second call in tests
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn run_and_write(
    spec: &ExperimentSpec,
    dir: &Path,
    stem: &str,
    notes: &[String],
    out: &mut dyn Write,
) -> Result<()> {
    let rows = run_sweep(spec)?;
    let (csv, meta) = write_experiment(dir, stem, spec, &rows, notes)?;
    let _ = writeln!(
        out,
        "wrote {} rows to {} ({})",
        rows.len(),
        csv.display(),
        meta.display()
    );
    Ok(())
}

fn load_lemma_config(path: &Path) -> Result<LemmaConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let cfg: LemmaConfig = toml::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Sweep {
            config,
            out: dir,
            name,
        } => {
            let spec = load_spec(&config)?;
            run_and_write(&spec, &dir, &name, &[], out)
        }
        Command::Figure {
            figure,
            out: dir,
            trials,
        } => {
            let (mut spec, notes) = figure_spec(figure)?;
            spec.monte_carlo_trials = trials;
            run_and_write(&spec, &dir, &format!("figure{figure}"), &notes, out)
        }
        Command::VerifyLemma { config } => {
            let lc = load_lemma_config(&config)?;
            let cfg = &lc.base;
            let r_h = exponential_covariance(CorrelationSpec::new(cfg.num_bs_antennas, cfg.r_h)?)?;
            let r_g = exponential_covariance(CorrelationSpec::new(
                cfg.num_jammer_antennas,
                cfg.jammer_correlation(),
            )?)?;
            let pilots = design_pilots(lc.pilot, &r_h, cfg.pilot_length, lc.seed)?;
            let verdict = verify_lemma(&r_h, &r_g, &pilots, cfg, lc.num_random, lc.seed)?;
            let report =
                toml::to_string(&verdict).map_err(|e| Error::Consistency(e.to_string()))?;
            let _ = write!(out, "{report}");
            let _ = writeln!(out, "ky_fan_holds = {}", verdict.ky_fan_holds());
            Ok(())
        }
        Command::Mse {
            m,
            n,
            l,
            r,
            rg,
            pb_db,
            pj_db,
            noise_variance,
            pilot,
            jamming,
            estimator,
            trials,
            seed,
            header,
        } => {
            let mut base = TrainingConfig::new(m, n.unwrap_or(l), l, pb_db, pj_db, r);
            base.r_g = rg;
            base.noise_variance = noise_variance;
            let spec = ExperimentSpec {
                sweep_axis: SweepAxis::PilotLength,
                axis_values: vec![l],
                monte_carlo_trials: trials,
                seed,
                base,
                scenarios: vec![Scenario {
                    pilot,
                    jamming,
                    estimator,
                }],
            };
            let rows: Vec<ResultRow> = run_sweep(&spec)?;
            write_results_to(&rows, &mut *out, header)
                .map_err(|e| Error::Consistency(e.to_string()))
        }
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code:
/// 0 on success, 2 for usage and configuration errors, 1 for numerical
/// failures.
pub fn cli_main<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    configure_threads();
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "fddjam: error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}
