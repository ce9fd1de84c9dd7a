//! Canonical regression quantile: the convex combination of responses best
//! predicted by a linear combination of explanatory variables, fitted under
//! the simplex and the signed L1 normalisation, plus the substitution
//! reduction and the classical canonical-correlation baseline.
//!
//! `cargo run --example canonical_index`

use canonical_rq::{
    canonical_rq_l1, canonical_rq_simplex, cca_leading, substitution_fit, CanonicalProblem, QuantileLevel,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn run_example() -> canonical_rq::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 60;
    let x = DMatrix::from_fn(n, 3, |_, j| if j == 0 { 1.0 } else { rng.sample::<f64, _>(StandardNormal) });
    // the first response follows the design closely, the others are noisy
    let signal = &x * DVector::from_vec(vec![0.5, 1.0, -0.5]);
    let y = DMatrix::from_fn(n, 3, |i, j| {
        let e: f64 = rng.sample(StandardNormal);
        signal[i] + [0.05, 1.0, 2.0][j] * e
    });

    let problem = CanonicalProblem::new(x.clone(), y.clone(), QuantileLevel::MEDIAN)?;
    let simplex = canonical_rq_simplex(&problem)?;
    println!(
        "simplex: alpha {:.3?} beta {:.3?} objective {:.5}",
        simplex.alpha.as_slice(),
        simplex.beta.as_slice(),
        simplex.objective
    );

    let l1 = canonical_rq_l1(&problem)?;
    println!("signed L1: alpha {:.3?} objective {:.5}", l1.alpha.as_slice(), l1.objective);

    let sub = substitution_fit(&problem)?;
    println!(
        "substitution: alpha {:.3?} objective {:.5} interior {}",
        sub.fit.alpha.as_slice(),
        sub.fit.objective,
        sub.interior
    );

    let cca = cca_leading(&x, &y)?;
    println!("leading canonical correlation {:.4}, a {:.3?}", cca.correlation, cca.a.as_slice());

    let index = simplex.predictive_index(&x)?;
    let target = simplex.response_index(&y)?;
    let mae = index.iter().zip(target.iter()).map(|(p, o)| (o - p).abs()).sum::<f64>() / n as f64;
    println!("mean |response index - predictive index| = {mae:.4}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> canonical_rq::Result<()> {
    run_example()
}
