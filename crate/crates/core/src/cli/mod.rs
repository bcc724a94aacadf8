//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage errors (bad flags, config or input
//! files), 3 for numerical failures.

pub mod commands;
pub mod config;
pub mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::analysis::DetectorConfig;
use crate::error::{Error, Result};
use crate::model::InitialKind;
use commands::{PeakSource, SweepOutcome};
use config::{parse_columns, RunConfig};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qtrap", version, about = "Two-level ion in a q-deformed trap")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one initial state and write its observables as CSV.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Entropy runs: ground at tau = 0, cat at tau = 0, cat at tau = 0.004.
    Figure1 {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory.
        #[arg(long, default_value = "figure1")]
        dir: PathBuf,
    },
    /// Mutual entropy, its population part and the inversion for the cat run.
    Figure2 {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Detect collapse and revival events.
    Peaks {
        #[command(flatten)]
        config: ConfigArgs,
        /// CSV with `t`, `SP` and an inversion column; simulates when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Inversion column used for labelling (default `Inv_g`, else `Inv`).
        #[arg(long)]
        inv_column: Option<String>,
        #[command(flatten)]
        detector: DetectorArgs,
    },
    /// Independent runs over a list of deformations.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated tau values; may be empty.
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        taus: String,
        /// Output directory.
        #[arg(long, default_value = "sweep")]
        dir: PathBuf,
        #[command(flatten)]
        detector: DetectorArgs,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega_bar: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta_bar: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon_bar: Option<f64>,
    /// Real part of the coherent amplitude.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta_im: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub tmax: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub dt: Option<f64>,
    /// ground, excited or cat.
    #[arg(long)]
    pub initial: Option<String>,
    /// Output file (stdout when absent, for `run`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated output columns.
    #[arg(long)]
    pub emit: Option<String>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $field:ident),* $(,)?) => {
                $(if let Some(v) = self.$flag { cfg.$field = v; })*
            };
        }
        set!(
            omega_bar => omega_bar,
            delta_bar => delta_bar,
            epsilon_bar => epsilon_bar,
            beta => beta,
            beta_im => beta_im,
            tau => tau,
            nmax => n_max,
            tmax => t_max,
            dt => dt,
        );
        if let Some(kind) = &self.initial {
            cfg.initial = kind.parse::<InitialKind>()?;
        }
        if let Some(out) = &self.out {
            cfg.output_path = Some(out.clone());
        }
        if let Some(emit) = &self.emit {
            cfg.emit = parse_columns(emit)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct DetectorArgs {
    /// Peak threshold as a fraction of the S(P) maximum.
    #[arg(long, default_value_t = 0.1)]
    pub min_height: f64,
    /// Minimum spacing between peaks, in rescaled time.
    #[arg(long, default_value_t = 20.0)]
    pub min_separation: f64,
    /// Half-width of the inversion envelope window.
    #[arg(long, default_value_t = 10.0)]
    pub envelope_window: f64,
    /// S(P) threshold for onset intervals.
    #[arg(long, default_value_t = 0.01)]
    pub zero_threshold: f64,
}

impl DetectorArgs {
    pub fn resolve(&self) -> Result<DetectorConfig> {
        for (field, v) in [
            ("min_height", self.min_height),
            ("min_separation", self.min_separation),
            ("envelope_window", self.envelope_window),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(field, format!("must be non-negative, got {v}")));
            }
        }
        Ok(DetectorConfig {
            min_height_fraction: self.min_height,
            min_separation: self.min_separation,
            envelope_half_window: self.envelope_window,
            zero_threshold: self.zero_threshold,
        })
    }
}

fn parse_taus(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::invalid("taus", format!("`{s}` is not a number")))
        })
        .collect()
}

fn emit(out: &mut impl Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn execute(cli: Cli, stdout: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Run { config } => {
            let cfg = config.resolve()?;
            let csv = commands::run_simulation(&cfg)?;
            match &cfg.output_path {
                Some(path) => std::fs::write(path, csv)?,
                None => emit(stdout, &csv)?,
            }
        }
        Command::Figure1 { config, dir } => {
            let cfg = config.resolve()?;
            for path in commands::cmd_figure1(&cfg, &dir, [0.0, 0.004])? {
                writeln!(stdout, "wrote {}", path.display())?;
            }
        }
        Command::Figure2 { config } => {
            let cfg = config.resolve()?;
            let path = cfg.output_path.clone().unwrap_or_else(|| PathBuf::from("figure2.csv"));
            commands::cmd_figure2(&cfg, &path)?;
            writeln!(stdout, "wrote {}", path.display())?;
        }
        Command::Peaks {
            config,
            input,
            inv_column,
            detector,
        } => {
            let cfg = config.resolve()?;
            let detector = detector.resolve()?;
            let source = match input {
                Some(path) => PeakSource::Csv { path, inv_column },
                None => PeakSource::Config(cfg.clone()),
            };
            let report = commands::cmd_peaks(&source, &detector)?;
            emit(stdout, &commands::report_text(&report))?;
            if let Some(path) = &cfg.output_path {
                std::fs::write(path, commands::report_csv(&report))?;
            }
        }
        Command::Sweep {
            config,
            taus,
            dir,
            detector,
        } => {
            let cfg = config.resolve()?;
            let detector = detector.resolve()?;
            let taus = parse_taus(&taus)?;
            let outcomes: Vec<SweepOutcome> = commands::cmd_sweep(&cfg, &taus, &dir, &detector)?;
            emit(stdout, &commands::sweep_summary(&outcomes))?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = write!(if code == 0 { stdout as &mut dyn Write } else { stderr as &mut dyn Write }, "{e}");
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            }
        }
    }
}
