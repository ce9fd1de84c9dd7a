//! Panel CSV round trip and a complete analysis run writing tables, figures
//! and a manifest.
//!
//! `cargo run --release --example panel_csv [out_dir]`

use std::path::PathBuf;

use canonical_rq::io::{gen_synthetic, load_panel, run_analysis, write_panel, InputSource, RunConfig, SyntheticSpec};

pub fn run_example_in(out: PathBuf) -> canonical_rq::Result<()> {
    std::fs::create_dir_all(&out)?;
    let panel = gen_synthetic(&SyntheticSpec::default(), 3)?;
    let csv = out.join("panel.csv");
    write_panel(&panel, &csv)?;
    let reloaded = load_panel(&csv)?;
    println!(
        "{} companies x {} years; reload equal: {}",
        reloaded.n_companies(),
        reloaded.n_years(),
        reloaded == panel
    );

    let mut config = RunConfig {
        input: InputSource::Csv(csv),
        taus: vec![0.5],
        out_dir: out.join("report"),
        seed: 3,
        ..Default::default()
    };
    config.resampling.replications = 20;
    let run = run_analysis(&config)?;
    for f in &run.files {
        println!("wrote {}", f.display());
    }
    let w = &run.reports[0].windows[0];
    println!("window {} alpha {:.3?}", w.spec.apply_target(), w.fit.alpha.as_slice());
    Ok(())
}

pub fn run_example() -> canonical_rq::Result<()> {
    run_example_in(std::env::temp_dir().join("crq_panel_csv_example"))
}

#[allow(dead_code)]
fn main() -> canonical_rq::Result<()> {
    match std::env::args().nth(1) {
        Some(dir) => run_example_in(dir.into()),
        None => run_example(),
    }
}
