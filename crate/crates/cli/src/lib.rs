//! The `affectwear` command line: synthetic cohorts, session validation,
//! feature extraction, the LOOCV benchmark and result tables.
//!
//! Configuration comes from an optional TOML file; flags and
//! `AFFECTWEAR_*` environment variables override it.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use affectwear_core::features::FeatureGroup;
use affectwear_core::mlbench::ModelKind;
use clap::{Parser, Subcommand};

pub use config::RunConfig;
pub use error::{CliError, CliResult, EXIT_CONFIG, EXIT_EMPTY, EXIT_IO, EXIT_OK};

#[derive(Debug, Parser)]
#[command(name = "affectwear", version, about = "Wearable-signal features and depression-subtype benchmark")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, env = "AFFECTWEAR_CONFIG")]
    pub config: Option<PathBuf>,
    /// Directory holding one sub-directory per session.
    #[arg(long, global = true, env = "AFFECTWEAR_DATA_ROOT")]
    pub data_root: Option<PathBuf>,
    /// Label manifest (default: <data-root>/manifest.csv).
    #[arg(long, global = true, env = "AFFECTWEAR_MANIFEST")]
    pub manifest: Option<PathBuf>,
    /// Output directory for features, reports and tables.
    #[arg(long, global = true, env = "AFFECTWEAR_OUT")]
    pub out: Option<PathBuf>,
    /// Seed for synthesis and model training.
    #[arg(long, global = true, env = "AFFECTWEAR_SEED")]
    pub seed: Option<u64>,
    /// Comma-separated selectors: hrv_time, hrv_freq, eda, acc, temp, all.
    #[arg(long, global = true, env = "AFFECTWEAR_FEATURES", value_delimiter = ',')]
    pub features: Option<Vec<FeatureGroup>>,
    /// Comma-separated models: dt, rf, gb, knn, svm, mlp.
    #[arg(long, global = true, env = "AFFECTWEAR_MODELS", value_delimiter = ',')]
    pub models: Option<Vec<ModelKind>>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic cohort and its manifest under the data root.
    Synth(SynthArgs),
    /// Check every manifest session and write validation.json.
    Validate,
    /// Extract the 59 features of every valid session into features.csv.
    Extract,
    /// Leave-one-out benchmark of each model on each feature selector.
    Bench,
    /// Collect stored bench reports into report.md.
    Report,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub n_unipolar: Option<usize>,
    #[arg(long)]
    pub n_bipolar: Option<usize>,
    #[arg(long)]
    pub duration_s: Option<f64>,
    /// Added to the bipolar class's ACC dominant frequency (Hz).
    #[arg(long)]
    pub acc_freq_offset: Option<f64>,
}

impl Cli {
    /// File values (or defaults) with flag overrides applied, range checked.
    pub fn effective_config(&self) -> CliResult<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(p) = &self.data_root {
            c.paths.data_root = p.clone();
        }
        if let Some(p) = &self.manifest {
            c.paths.manifest = Some(p.clone());
        }
        if let Some(p) = &self.out {
            c.paths.out = p.clone();
        }
        if let Some(s) = self.seed {
            c.bench.seed = s;
        }
        if let Some(f) = &self.features {
            c.bench.features = f.clone();
        }
        if let Some(m) = &self.models {
            c.bench.models = m.clone();
        }
        if let Some(Command::Synth(a)) = &self.command {
            c.synth.n_unipolar = a.n_unipolar.unwrap_or(c.synth.n_unipolar);
            c.synth.n_bipolar = a.n_bipolar.unwrap_or(c.synth.n_bipolar);
            c.synth.duration_s = a.duration_s.unwrap_or(c.synth.duration_s);
            c.synth.offsets.acc_freq_hz = a.acc_freq_offset.unwrap_or(c.synth.offsets.acc_freq_hz);
        }
        c.validate()?;
        Ok(c)
    }
}

/// Runs a parsed command line and returns what it would print.
pub fn execute(cli: &Cli) -> CliResult<String> {
    let config = cli.effective_config()?;
    if cli.print_config {
        return Ok(config.to_toml());
    }
    match &cli.command {
        None => Err(CliError::Config("no command given (try --help)".into())),
        Some(Command::Synth(_)) => Ok(format!("{}\n", commands::cmd_synth(&config)?.display())),
        Some(Command::Validate) => {
            let s = commands::cmd_validate(&config)?;
            Ok(format!("{} sessions valid, {} excluded\n", s.n_ok, s.n_excluded))
        }
        Some(Command::Extract) => {
            let s = commands::cmd_extract(&config)?;
            Ok(format!(
                "{} ({} sessions, {} excluded)\n",
                config.paths.out.join(commands::FEATURES_FILE).display(),
                s.n_ok,
                s.n_excluded
            ))
        }
        Some(Command::Bench) => Ok(commands::cmd_bench(&config)?
            .iter()
            .map(|(group, _)| format!("{}\n", commands::table_path(&config.paths.out, *group).display()))
            .collect()),
        Some(Command::Report) => commands::cmd_report(&config),
    }
}

/// Parses `args` (program name first) and runs them; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(text) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Logger reading `AFFECTWEAR_LOG` (default `warn`).
pub fn init_logging() {
    let env = env_logger::Env::new().filter_or("AFFECTWEAR_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).try_init();
}
