//! Command-line front end.
//!
//! ```text
//! crq analyze --synthetic default --tau 0.5,0.75 --seed 7 --out out
//! crq analyze --input panel.csv --window 5 --horizon 2 --replications 200 --out out
//! crq generate --synthetic spec.toml --seed 7 --out panel.csv
//! ```
//!
//! `CRQ_THREADS` sets the number of worker threads.

use std::path::PathBuf;
use std::process::ExitCode;

use canonical_rq::io::{run_analysis, write_panel, gen_synthetic, InputSource, RunConfig, SyntheticSpec};
use canonical_rq::pipeline::ResponseTransform;
use canonical_rq::{Error, Result, Scheme};
use clap::{Args, Parser, Subcommand, ValueEnum};

const THREADS_VAR: &str = "CRQ_THREADS";

#[derive(Parser)]
#[command(name = "crq", version, about = "Canonical regression quantile panel analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit, predict and evaluate rolling windows and write report files.
    Analyze(AnalyzeArgs),
    /// Write a synthetic panel as CSV.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Run configuration (TOML); flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Panel CSV.
    #[arg(long, conflicts_with = "synthetic")]
    input: Option<PathBuf>,
    /// Synthetic panel spec (TOML), or `default`.
    #[arg(long)]
    synthetic: Option<String>,
    /// Comma-separated quantile levels.
    #[arg(long, value_delimiter = ',')]
    tau: Option<Vec<f64>>,
    /// Window length in years.
    #[arg(long)]
    window: Option<usize>,
    /// Years from the end of a window to its prediction target.
    #[arg(long)]
    horizon: Option<usize>,
    /// Number of rolling windows.
    #[arg(long)]
    windows: Option<usize>,
    /// First training year; defaults to the panel's first year.
    #[arg(long)]
    first_year: Option<i32>,
    /// Resampling draws; 0 reports point estimates only.
    #[arg(long)]
    replications: Option<usize>,
    /// Resampling scheme.
    #[arg(long)]
    scheme: Option<SchemeArg>,
    /// Subsample size or delete count.
    #[arg(long)]
    size: Option<usize>,
    /// Response transform.
    #[arg(long)]
    transform: Option<TransformArg>,
    /// Seed for the synthetic panel and the resampling draws.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Synthetic panel spec (TOML), or `default`.
    #[arg(long, default_value = "default")]
    synthetic: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Andrews,
    Jackknife,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformArg {
    SignedLog,
    LogMax1,
}

fn synthetic_spec(arg: &str) -> Result<SyntheticSpec> {
    if arg == "default" {
        return Ok(SyntheticSpec::default());
    }
    let text = std::fs::read_to_string(arg).map_err(|e| Error::Io(format!("{arg}: {e}")))?;
    toml::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{arg}: {e}")))
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidConfig(format!("{THREADS_VAR}={v:?} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

fn analyze(a: AnalyzeArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(path) => RunConfig::from_toml_file(path)?,
        None => RunConfig::default(),
    };
    if a.config.is_none() && a.input.is_none() && a.synthetic.is_none() {
        return Err(Error::InvalidConfig("one of --input, --synthetic or --config is required".into()));
    }
    if let Some(p) = a.input {
        cfg.input = InputSource::Csv(p);
    }
    if let Some(s) = &a.synthetic {
        cfg.input = InputSource::Synthetic(synthetic_spec(s)?);
    }
    if let Some(t) = a.tau {
        cfg.taus = t;
    }
    if let Some(v) = a.window {
        cfg.window_length = v;
    }
    if let Some(v) = a.horizon {
        cfg.horizon = v;
    }
    if let Some(v) = a.windows {
        cfg.n_windows = v;
    }
    if a.first_year.is_some() {
        cfg.first_train_year = a.first_year;
    }
    if let Some(v) = a.replications {
        cfg.resampling.replications = v;
    }
    if let Some(s) = a.scheme {
        cfg.resampling.scheme = match s {
            SchemeArg::Andrews => Scheme::Andrews,
            SchemeArg::Jackknife => Scheme::Jackknife,
        };
    }
    if a.size.is_some() {
        cfg.resampling.size = a.size;
    }
    if let Some(t) = a.transform {
        cfg.aggregation.transform = match t {
            TransformArg::SignedLog => ResponseTransform::SignedLog,
            TransformArg::LogMax1 => ResponseTransform::LogMax1,
        };
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(o) = a.out {
        cfg.out_dir = o;
    }
    cfg.threads = threads_from_env()?;

    let out = run_analysis(&cfg)?;
    println!(
        "analysed {} companies, {} window(s), tau {:?}; wrote {} files to {}",
        out.panel.n_companies(),
        out.windows.len(),
        cfg.taus,
        out.files.len(),
        cfg.out_dir.display()
    );
    Ok(())
}

fn generate(a: GenerateArgs) -> Result<()> {
    let spec = synthetic_spec(&a.synthetic)?;
    let panel = gen_synthetic(&spec, a.seed)?;
    write_panel(&panel, &a.out)?;
    println!("wrote {} observations to {}", panel.n_observations(), a.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Generate(a) => generate(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("crq: error: {e}");
            ExitCode::FAILURE
        }
    }
}
