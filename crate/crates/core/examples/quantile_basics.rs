//! Check loss, weighted sample quantiles and linear quantile regression,
//! with the LP fit compared against exhaustive enumeration of exact fits.
//!
//! `cargo run --example quantile_basics`

use canonical_rq::{check_loss, rq_fit, rq_subset_oracle, sample_quantile, QuantileLevel, RegressionProblem};
use nalgebra::{DMatrix, DVector};

pub fn run_example() -> canonical_rq::Result<()> {
    let tau = QuantileLevel::new(0.25)?;
    for u in [-2.0, 0.0, 2.0] {
        println!("rho_0.25({u:+}) = {}", check_loss(u, tau));
    }

    let values = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
    println!("median = {}", sample_quantile(&values, QuantileLevel::MEDIAN, None)?);
    let weights = [1.0, 1.0, 1.0, 1.0, 1.0, 10.0, 1.0, 1.0];
    println!("weighted median = {}", sample_quantile(&values, QuantileLevel::MEDIAN, Some(&weights))?);

    // y = 1 + 2x with one gross outlier
    let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
    let mut y: Vec<f64> = x.iter().map(|v| 1.0 + 2.0 * v).collect();
    y[7] += 40.0;
    let design = DMatrix::from_fn(10, 2, |i, j| if j == 0 { 1.0 } else { x[i] });
    let problem = RegressionProblem::new(design, DVector::from_vec(y))?;
    for t in [0.25, 0.5, 0.9] {
        let tau = QuantileLevel::new(t)?;
        let lp = rq_fit(&problem, tau)?;
        let oracle = rq_subset_oracle(&problem, tau)?;
        println!(
            "tau {t}: coefficients {:.4?}, objective {:.6} (enumeration {:.6}), {} active rows",
            lp.coefficients.as_slice(),
            lp.objective,
            oracle.objective,
            lp.active_rows.len()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> canonical_rq::Result<()> {
    run_example()
}
