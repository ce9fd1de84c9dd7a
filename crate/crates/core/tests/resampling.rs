use canonical_rq::resampling::ResamplePlan;
use canonical_rq::{
    andrews_weights, jackknife_weights, resample_inference, sample_quantile, Error, QuantileLevel, Scheme,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn normals(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn median(xs: &[f64], w: &[f64]) -> canonical_rq::Result<Vec<f64>> {
    Ok(vec![sample_quantile(xs, QuantileLevel::MEDIAN, Some(w))?])
}

#[test]
fn andrews_structure_and_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = andrews_weights(10, 3, &mut rng).unwrap();
    assert!(w.weights.iter().filter(|&&v| v < 0.1).count() >= 7);
    assert!(w.weights.iter().all(|&v| v > 0.0 && v.is_finite()));

    // the m large weights are the ones outside (0, 1/n); average them over many draws
    let plan = ResamplePlan::andrews(200, 9).with_size(16);
    let mut sum = 0.0;
    let mut count = 0usize;
    for r in 0..10_000 {
        let w = plan.draw(200, r).unwrap();
        let mut sorted = w.weights.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        sum += sorted[..16].iter().sum::<f64>();
        count += 16;
        assert!(w.weights.iter().all(|&v| v > 0.0));
    }
    // the top 16 slightly overstate the subset mean when a small Exp(1) draw
    // falls below 1/n; the effect is far below the tolerance
    let mean = sum / count as f64;
    assert!((mean - 1.0).abs() < 0.05, "{mean}");
}

#[test]
fn jackknife_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let w = jackknife_weights(100, 10, &mut rng).unwrap();
    assert_eq!(w.weights.iter().filter(|&&v| v == 1.0).count(), 90);
    assert_eq!(w.weights.iter().filter(|&&v| v < 0.01).count(), 10);
    assert!(matches!(jackknife_weights(10, 10, &mut rng), Err(Error::InvalidPlan(_))));
    assert!(matches!(andrews_weights(10, 10, &mut rng), Err(Error::InvalidPlan(_))));
}

#[test]
fn thread_count_does_not_change_results() {
    let xs = normals(80, 3);
    for plan in [
        ResamplePlan::andrews(80, 4).with_replications(64),
        ResamplePlan::jackknife(80, 4).with_replications(64),
    ] {
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| resample_inference(80, &plan, |w| median(&xs, &w.weights)).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}

#[test]
fn se_scales_with_noise() {
    let xs = normals(200, 5);
    let doubled: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
    for scheme in [Scheme::Andrews, Scheme::Jackknife] {
        let plan = match scheme {
            Scheme::Andrews => ResamplePlan::andrews(200, 6),
            Scheme::Jackknife => ResamplePlan::jackknife(200, 6),
        }
        .with_replications(300);
        let a = resample_inference(200, &plan, |w| median(&xs, &w.weights)).unwrap();
        let b = resample_inference(200, &plan, |w| median(&doubled, &w.weights)).unwrap();
        let ratio = b.se[0] / a.se[0];
        assert!((ratio - 2.0).abs() < 0.4, "{scheme:?}: {ratio}");
    }
}

#[test]
fn skip_accounting_and_rescale_flag() {
    let xs = normals(50, 7);
    let plan = ResamplePlan::andrews(50, 8).with_replications(40);
    let res = resample_inference(50, &plan, |w| {
        if w.draw_index == 17 {
            Err(Error::InvalidProblem("skip me".into()))
        } else {
            median(&xs, &w.weights)
        }
    })
    .unwrap();
    assert_eq!(res.successful_draws(), plan.replications - res.failures.len());
    assert_eq!(res.failures.len(), 1);
    assert!(!res.draw_indices.contains(&17));

    let raw = resample_inference(50, &plan.clone().with_rescale(false), |w| median(&xs, &w.weights)).unwrap();
    let scaled = resample_inference(50, &plan, |w| median(&xs, &w.weights)).unwrap();
    let factor = (plan.size as f64 / 50.0).sqrt();
    assert!((scaled.se[0] - raw.se[0] * factor).abs() < 1e-12);
    assert!((raw.t_stats[0] - raw.point[0] / raw.se[0]).abs() < 1e-12);
}

#[test]
fn invalid_plans() {
    let xs = normals(20, 1);
    let bad = ResamplePlan::andrews(20, 1).with_size(20);
    assert!(matches!(
        resample_inference(20, &bad, |w| median(&xs, &w.weights)),
        Err(Error::InvalidPlan(_))
    ));
    let one = ResamplePlan::jackknife(20, 1).with_replications(1);
    assert!(matches!(
        resample_inference(20, &one, |w| median(&xs, &w.weights)),
        Err(Error::InvalidPlan(_))
    ));
}
