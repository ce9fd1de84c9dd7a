use canonical_rq::{
    check_loss, rq_fit, rq_objective, rq_subset_oracle, sample_quantile, Error, QuantileLevel, RegressionProblem,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn tau(t: f64) -> QuantileLevel {
    QuantileLevel::new(t).unwrap()
}

/// Intercept plus `p - 1` normal columns, heavy-ish tailed response.
fn random_problem(seed: u64, n: usize, p: usize) -> RegressionProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DMatrix::from_fn(n, p, |_, j| if j == 0 { 1.0 } else { rng.sample(StandardNormal) });
    let y = DVector::from_fn(n, |i, _| {
        let e: f64 = rng.sample(StandardNormal);
        x.row(i).sum() + e * (1.0 + e.abs())
    });
    RegressionProblem::new(x, y).unwrap()
}

#[test]
fn intercept_only_is_the_sample_quantile() {
    let ys = [2.5, -1.0, 7.0, 3.0, 3.0, 0.5, 10.0];
    let pr = RegressionProblem::new(DMatrix::from_element(7, 1, 1.0), DVector::from_row_slice(&ys)).unwrap();
    for t in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let fit = rq_fit(&pr, tau(t)).unwrap();
        let q = sample_quantile(&ys, tau(t), None).unwrap();
        let at_q = rq_objective(&pr, &DVector::from_element(1, q), tau(t)).unwrap();
        assert!((fit.objective - at_q).abs() < 1e-10, "tau {t}");
    }
}

#[test]
fn interpolation_and_hand_examples() {
    let pr = RegressionProblem::new(
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]),
        DVector::from_vec(vec![0.0, 1.0]),
    )
    .unwrap();
    let fit = rq_fit(&pr, tau(0.5)).unwrap();
    assert!((fit.coefficients[0]).abs() < 1e-12 && (fit.coefficients[1] - 1.0).abs() < 1e-12);
    assert!(fit.objective.abs() < 1e-12);

    let pr = RegressionProblem::new(DMatrix::from_element(3, 1, 1.0), DVector::from_vec(vec![1.0, 2.0, 3.0])).unwrap();
    assert!((rq_subset_oracle(&pr, tau(0.5)).unwrap().coefficients[0] - 2.0).abs() < 1e-12);

    let pr = RegressionProblem::new(DMatrix::from_element(2, 1, 1.0), DVector::from_vec(vec![1.0, -1.0])).unwrap();
    assert!((rq_objective(&pr, &DVector::zeros(1), tau(0.75)).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn oracle_agrees_on_small_instances() {
    for (seed, n, p, t) in [(1, 8, 2, 0.75), (2, 6, 2, 0.5), (3, 12, 3, 0.25)] {
        let pr = random_problem(seed, n, p);
        let lp = rq_fit(&pr, tau(t)).unwrap();
        let or = rq_subset_oracle(&pr, tau(t)).unwrap();
        assert!((lp.objective - or.objective).abs() < 1e-8, "{seed}: {} vs {}", lp.objective, or.objective);
    }
}

#[test]
fn oracle_guard() {
    let pr = random_problem(4, 16, 2);
    assert!(matches!(rq_subset_oracle(&pr, tau(0.5)), Err(Error::OracleTooLarge(_))));
}

#[test]
fn rank_deficient_weighted_design_is_degenerate() {
    // the second column only differs from zero on a zero-weight row
    let x = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 5.0]);
    let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
    let pr = RegressionProblem::weighted(x, y, DVector::from_vec(vec![1.0, 1.0, 1.0, 0.0])).unwrap();
    match rq_fit(&pr, tau(0.5)) {
        Err(e @ Error::DegenerateDesign(_)) => assert!(e.to_string().contains("unbounded/degenerate design")),
        other => panic!("unexpected {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn check_loss_reflection(u in -1e3f64..1e3, t in 0.01f64..0.99) {
        let a = check_loss(u, tau(t));
        let b = check_loss(-u, tau(1.0 - t));
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn fit_beats_random_probes(seed in any::<u64>(), t in 0.1f64..0.9) {
        let pr = random_problem(seed, 20, 3);
        let fit = rq_fit(&pr, tau(t)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        for _ in 0..20 {
            let probe = DVector::from_fn(3, |_, _| fit.coefficients[0] + rng.sample::<f64, _>(StandardNormal));
            let obj = rq_objective(&pr, &probe, tau(t)).unwrap();
            prop_assert!(fit.objective <= obj + 1e-9);
        }
    }

    #[test]
    fn response_scaling_and_shift(seed in any::<u64>(), c in prop::sample::select(vec![0.1, 10.0, 3.0])) {
        let pr = random_problem(seed, 15, 3);
        let t = tau(0.75);
        let base = rq_fit(&pr, t).unwrap();

        let scaled = RegressionProblem::new(pr.design().clone(), pr.response() * c).unwrap();
        let fit = rq_fit(&scaled, t).unwrap();
        prop_assert!((fit.objective - c * base.objective).abs() <= 1e-8 * (1.0 + c * base.objective));
        let at = rq_objective(&scaled, &(&base.coefficients * c), t).unwrap();
        prop_assert!((at - fit.objective).abs() <= 1e-8 * (1.0 + at));

        let d = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let shifted = RegressionProblem::new(pr.design().clone(), pr.response() + pr.design() * &d).unwrap();
        let fit = rq_fit(&shifted, t).unwrap();
        prop_assert!((fit.objective - base.objective).abs() <= 1e-8 * (1.0 + base.objective));
        let at = rq_objective(&shifted, &(&base.coefficients + &d), t).unwrap();
        prop_assert!((at - base.objective).abs() <= 1e-8 * (1.0 + at));
    }

    #[test]
    fn column_scaling(seed in any::<u64>(), c in 0.1f64..10.0) {
        let pr = random_problem(seed, 15, 3);
        let t = tau(0.5);
        let base = rq_fit(&pr, t).unwrap();
        let mut x = pr.design().clone();
        x.column_mut(2).scale_mut(c);
        let scaled = RegressionProblem::new(x, pr.response().clone()).unwrap();
        let fit = rq_fit(&scaled, t).unwrap();
        prop_assert!((fit.objective - base.objective).abs() <= 1e-8 * (1.0 + base.objective));
        let mut mapped = base.coefficients.clone();
        mapped[2] /= c;
        let at = rq_objective(&scaled, &mapped, t).unwrap();
        prop_assert!((at - fit.objective).abs() <= 1e-8 * (1.0 + at));
    }

    #[test]
    fn weight_scaling(seed in any::<u64>(), c in 0.01f64..100.0) {
        let pr = random_problem(seed, 15, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = DVector::from_fn(15, |_, _| rng.random_range(0.1..2.0));
        let t = tau(0.25);
        let a = RegressionProblem::weighted(pr.design().clone(), pr.response().clone(), w.clone()).unwrap();
        let b = RegressionProblem::weighted(pr.design().clone(), pr.response().clone(), &w * c).unwrap();
        let fa = rq_fit(&a, t).unwrap();
        let fb = rq_fit(&b, t).unwrap();
        prop_assert!((fb.objective / fa.objective - c).abs() <= 1e-8 * c);
        let cross = rq_objective(&a, &fb.coefficients, t).unwrap();
        prop_assert!((cross - fa.objective).abs() <= 1e-8 * (1.0 + fa.objective));
    }

    #[test]
    fn sample_quantile_is_an_order_statistic(xs in prop::collection::vec(-100.0f64..100.0, 1..30), t in 0.01f64..0.99) {
        let q = sample_quantile(&xs, tau(t), None).unwrap();
        prop_assert!(xs.contains(&q));
        let below = xs.iter().filter(|&&x| x < q).count() as f64;
        let at_most = xs.iter().filter(|&&x| x <= q).count() as f64;
        let n = xs.len() as f64;
        prop_assert!(below < t * n + 1e-9 && at_most >= t * n - 1e-9);
    }
}
