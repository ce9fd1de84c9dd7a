//! File input and output: panel CSVs, synthetic panels, run configuration and
//! the tables and figures of an analysis run.

pub mod config;
pub mod csv;
pub mod plots;
pub mod run;
pub mod synthetic;
pub mod tables;

pub use self::csv::{load_panel, write_panel, PANEL_COLUMNS};
pub use config::{InputSource, ResamplingConfig, RunConfig};
pub use plots::{emit_plot_data, figure1, figure2, figure3, Figure1, Figure2, Figure3, QqPairs, Scatter};
pub use run::{analyse_panel, load_input, run_analysis, RunOutput, MANIFEST_FILE, TEXT_TABLES_FILE};
pub use synthetic::{gen_synthetic, SyntheticSpec};
pub use tables::{render_text_tables, write_tables, MetricKind};
