//! Weighted Andrews subsample bootstrap and delete-d jackknife standard
//! errors, here for the sample median and a median regression slope.
//!
//! `cargo run --example resampling`

use canonical_rq::resampling::ResamplePlan;
use canonical_rq::{resample_inference, rq_fit, sample_quantile, QuantileLevel, RegressionProblem};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn run_example() -> canonical_rq::Result<()> {
    let n = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();

    let median = |w: &canonical_rq::WeightVector| Ok(vec![sample_quantile(&z, QuantileLevel::MEDIAN, Some(&w.weights))?]);
    let andrews = ResamplePlan::andrews(n, 1).with_replications(500).with_size(16);
    let res = resample_inference(n, &andrews, median)?;
    println!(
        "median {:.4}, Andrews SE {:.4} (asymptotic {:.4})",
        res.point[0],
        res.se[0],
        (std::f64::consts::PI / 2.0).sqrt() / (n as f64).sqrt()
    );
    let jack = ResamplePlan::jackknife(n, 1).with_replications(500);
    let res = resample_inference(n, &jack, median)?;
    println!("median jackknife SE {:.4} (d = {})", res.se[0], jack.size);

    let x: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
    let y: Vec<f64> = x.iter().zip(&z).map(|(x, e)| 1.0 + 3.0 * x + e).collect();
    let design = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { x[i] });
    let problem = RegressionProblem::new(design, DVector::from_vec(y))?;
    let plan = ResamplePlan::andrews(n, 2).with_replications(200);
    let res = resample_inference(n, &plan, |w| {
        let fit = rq_fit(&problem.reweighted(DVector::from_column_slice(&w.weights))?, QuantileLevel::MEDIAN)?;
        Ok(fit.coefficients.iter().copied().collect())
    })?;
    println!(
        "median regression slope {:.3} (SE {:.3}, t {:.2}), {} draws",
        res.point[1],
        res.se[1],
        res.t_stats[1],
        res.successful_draws()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> canonical_rq::Result<()> {
    run_example()
}
