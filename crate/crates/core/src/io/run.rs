//! End-to-end analysis run: load or generate the panel, analyse every level
//! and window, write tables, figures and a manifest.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{InputSource, ResamplingConfig, RunConfig};
use super::csv::load_panel;
use super::plots::emit_plot_data;
use super::synthetic::gen_synthetic;
use super::tables::{render_text_tables, write_tables};
use crate::error::{Error, Result};
use crate::pipeline::{analyse, AggregationConfig, PanelDataset, PredictionReport, WindowSpec, NUM_RESPONSES};

pub const MANIFEST_FILE: &str = "run_manifest.toml";
pub const TEXT_TABLES_FILE: &str = "tables.txt";

/// Reports of a run and the files written for it.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub panel: PanelDataset,
    pub windows: Vec<WindowSpec>,
    pub reports: Vec<PredictionReport>,
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct WindowEntry {
    label: i32,
    train_years: [i32; 2],
    train_target: i32,
    apply_years: [i32; 2],
    apply_target: i32,
}

#[derive(Serialize)]
struct Manifest<'a> {
    package: &'static str,
    version: &'static str,
    seed: u64,
    n_companies: usize,
    years: [i32; 2],
    taus: &'a [f64],
    window_length: usize,
    horizon: usize,
    n_windows: usize,
    /// Generative response weights of a synthetic panel.
    #[serde(skip_serializing_if = "Option::is_none")]
    generative_index: Option<[f64; NUM_RESPONSES]>,
    files: Vec<String>,
    input: &'a InputSource,
    aggregation: &'a AggregationConfig,
    resampling: &'a ResamplingConfig,
    subsample_size: Option<usize>,
    windows: Vec<WindowEntry>,
}

/// Reads the CSV or generates the synthetic panel named by the config.
pub fn load_input(config: &RunConfig) -> Result<PanelDataset> {
    match &config.input {
        InputSource::Csv(path) => load_panel(path),
        InputSource::Synthetic(spec) => gen_synthetic(spec, config.seed),
    }
}

/// Analyses `panel` at every level of the config without writing files.
pub fn analyse_panel(panel: &PanelDataset, config: &RunConfig) -> Result<(Vec<WindowSpec>, Vec<PredictionReport>)> {
    config.validate()?;
    let windows = config.windows(panel)?;
    let plan = config.resampling.plan(panel.n_companies(), config.seed);
    if let Some(p) = &plan {
        p.validate(panel.n_companies())?;
    }
    let reports = in_pool(config.threads, || {
        config
            .quantile_levels()?
            .into_iter()
            .map(|tau| analyse(panel, &windows, &config.aggregation, tau, plan.as_ref()))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok((windows, reports))
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(f),
    }
}

/// Runs the configured analysis and writes every output file into
/// `config.out_dir`, creating it if needed.
pub fn run_analysis(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let panel = load_input(config)?;
    let (windows, reports) = analyse_panel(&panel, config)?;
    let files = write_outputs(config, &panel, &windows, &reports)?;
    Ok(RunOutput {
        panel,
        windows,
        reports,
        files,
    })
}

fn write_outputs(
    config: &RunConfig,
    panel: &PanelDataset,
    windows: &[WindowSpec],
    reports: &[PredictionReport],
) -> Result<Vec<PathBuf>> {
    let dir = config.out_dir.as_path();
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut files = write_tables(reports, dir)?;
    let text = dir.join(TEXT_TABLES_FILE);
    write_file(&text, &render_text_tables(reports))?;
    files.push(text);
    files.extend(emit_plot_data(reports, panel, dir)?);

    let manifest = Manifest {
        package: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        seed: config.seed,
        n_companies: panel.n_companies(),
        years: [panel.first_year(), panel.last_year()],
        taus: &config.taus,
        window_length: config.window_length,
        horizon: config.horizon,
        n_windows: config.n_windows,
        generative_index: match &config.input {
            InputSource::Synthetic(s) => Some(s.index_weights),
            InputSource::Csv(_) => None,
        },
        files: files
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
        input: &config.input,
        aggregation: &config.aggregation,
        resampling: &config.resampling,
        subsample_size: config.resampling.plan(panel.n_companies(), config.seed).map(|p| p.size),
        windows: windows
            .iter()
            .map(|w| WindowEntry {
                label: w.apply_target(),
                train_years: [w.train_start_year, w.train_end()],
                train_target: w.train_target(),
                apply_years: [w.apply_start_year, w.apply_end()],
                apply_target: w.apply_target(),
            })
            .collect(),
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let path = dir.join(MANIFEST_FILE);
    write_file(&path, &text)?;
    files.push(path);
    Ok(files)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
