//! Runs every example so they stay in sync with the library.

#[path = "../examples/quantile_basics.rs"]
mod quantile_basics;
#[path = "../examples/canonical_index.rs"]
mod canonical_index;
#[path = "../examples/resampling.rs"]
mod resampling;
#[path = "../examples/synthetic_pipeline.rs"]
mod synthetic_pipeline;
#[path = "../examples/panel_csv.rs"]
mod panel_csv;

#[test]
fn quantile_basics_runs() {
    quantile_basics::run_example().unwrap();
}

#[test]
fn canonical_index_runs() {
    canonical_index::run_example().unwrap();
}

#[test]
fn resampling_runs() {
    resampling::run_example().unwrap();
}

#[test]
fn synthetic_pipeline_runs() {
    synthetic_pipeline::run_example().unwrap();
}

#[test]
fn panel_csv_runs() {
    let dir = tempfile::tempdir().unwrap();
    panel_csv::run_example_in(dir.path().to_path_buf()).unwrap();
}
