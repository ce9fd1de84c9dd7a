//! Rolling-window prediction on a synthetic company panel: fit the index on
//! one window, apply it two years ahead and compare with the baselines.
//!
//! `cargo run --example synthetic_pipeline`

use canonical_rq::io::{gen_synthetic, SyntheticSpec};
use canonical_rq::pipeline::{
    evaluate, fit_window, predict_ahead, predict_baselines, AggregationConfig, WindowSpec, NUM_RESPONSES,
    RESPONSE_LABELS,
};
use canonical_rq::QuantileLevel;

pub fn run_example() -> canonical_rq::Result<()> {
    let spec = SyntheticSpec {
        noise_scale: 0.1,
        ..Default::default()
    };
    let panel = gen_synthetic(&spec, 2024)?;
    let config = AggregationConfig::default();
    let tau = QuantileLevel::MEDIAN;
    let window = WindowSpec::new(panel.first_year(), 5, 2);
    println!(
        "train {}..={} -> {}, apply {}..={} -> {}",
        window.train_start_year,
        window.train_end(),
        window.train_target(),
        window.apply_start_year,
        window.apply_end(),
        window.apply_target()
    );

    let fit = fit_window(&panel, &window, &config, tau)?;
    println!("alpha {:.3?}", fit.alpha.as_slice());
    let ahead = predict_ahead(&panel, &fit, &window, &config, tau)?;
    let base = predict_baselines(&panel, &window, &config, tau)?;

    println!("{:<9} {:>8} {:>8} {:>8}", "MAE", "Index", "cancor", "CEOrq");
    for j in 0..NUM_RESPONSES {
        let obs = ahead.observed.column(j);
        let m = |pred: nalgebra::DVectorView<f64>| evaluate(pred.as_slice(), obs.as_slice(), tau).map(|m| m.mae);
        println!(
            "{:<9} {:>8.3} {:>8.3} {:>8.3}",
            RESPONSE_LABELS[j],
            m(ahead.predicted.column(j))?,
            m(base.cca_ls.column(j))?,
            m(base.ceo_rq.column(j))?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> canonical_rq::Result<()> {
    run_example()
}
