use canonical_rq::cca::cca_leading;
use canonical_rq::linalg::correlation;
use canonical_rq::{
    canonical_rq_l1, canonical_rq_simplex, rq_fit, substitution_fit, CanonicalProblem, ConstraintKind, Error,
    QuantileLevel, RegressionProblem,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn tau(t: f64) -> QuantileLevel {
    QuantileLevel::new(t).unwrap()
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Responses mix a common linear signal with column-specific noise.
fn random_problem(seed: u64, n: usize, p: usize, q: usize, t: f64) -> CanonicalProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DMatrix::from_fn(n, p, |_, j| if j == 0 { 1.0 } else { normal(&mut rng) });
    let noise: Vec<f64> = (0..q).map(|_| rng.random_range(0.2..2.0)).collect();
    let y = DMatrix::from_fn(n, q, |i, j| x.row(i).sum() + noise[j] * normal(&mut rng));
    CanonicalProblem::new(x, y, tau(t)).unwrap()
}

/// Positive mixture `Y alpha = X beta + small noise` with noisy individual columns.
fn interior_problem(seed: u64) -> CanonicalProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 40;
    let x = DMatrix::from_fn(n, 2, |_, j| if j == 0 { 1.0 } else { normal(&mut rng) });
    let target: Vec<f64> = (0..n).map(|i| 1.0 + 2.0 * x[(i, 1)] + 0.05 * normal(&mut rng)).collect();
    // y1 = target + u, y2 = target - u: only the 1/2-1/2 mix cancels u
    let y = DMatrix::from_fn(n, 2, |i, j| {
        let u = 3.0 * ((i * 7 % 11) as f64 - 5.0);
        if j == 0 {
            target[i] + u
        } else {
            target[i] - u
        }
    });
    CanonicalProblem::new(x, y, tau(0.5)).unwrap()
}

fn check_simplex(fit: &canonical_rq::CanonicalFit) {
    assert_eq!(fit.constraint_kind, ConstraintKind::Simplex);
    assert!((fit.alpha.sum() - 1.0).abs() <= 1e-10);
    assert!(fit.alpha.iter().all(|&a| a >= -1e-10));
}

fn grid_oracle(pr: &CanonicalProblem) -> f64 {
    let q = pr.q();
    let steps = 20;
    let mut best = f64::INFINITY;
    let mut point = vec![0usize; q];
    fn rec(k: usize, left: usize, point: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if k + 1 == point.len() {
            point[k] = left;
            f(point);
            return;
        }
        for v in 0..=left {
            point[k] = v;
            rec(k + 1, left - v, point, f);
        }
    }
    rec(0, steps, &mut point, &mut |pt| {
        let alpha = DVector::from_iterator(q, pt.iter().map(|&v| v as f64 / steps as f64));
        let response = pr.responses() * &alpha;
        let sub = RegressionProblem::weighted(pr.design().clone(), response, pr.weights().clone()).unwrap();
        let fit = rq_fit(&sub, pr.tau().complement()).unwrap();
        best = best.min(fit.objective);
    });
    best
}

#[test]
fn single_response_reduces_to_flipped_regression_quantile() {
    let pr = random_problem(3, 25, 3, 1, 0.75);
    let fit = canonical_rq_simplex(&pr).unwrap();
    assert_eq!(fit.alpha.as_slice(), &[1.0]);
    let rq = RegressionProblem::new(pr.design().clone(), pr.responses().column(0).into_owned()).unwrap();
    let flipped = rq_fit(&rq, tau(0.25)).unwrap();
    assert!((fit.objective - flipped.objective).abs() < 1e-8);
    // the same level on the response-minus-fit scale differs at tau != .5
    let same = rq_fit(&rq, tau(0.75)).unwrap();
    assert!((fit.objective - same.objective).abs() > 1e-6);
}

#[test]
fn simplex_beats_the_alpha_grid() {
    for seed in 0..6 {
        let q = 2 + (seed as usize % 2);
        let pr = random_problem(100 + seed, 30, 2, q, [0.5, 0.75][seed as usize % 2]);
        let fit = canonical_rq_simplex(&pr).unwrap();
        check_simplex(&fit);
        let oracle = grid_oracle(&pr);
        assert!(fit.objective <= oracle + 1e-8, "seed {seed}: {} > {oracle}", fit.objective);
        let recomputed = pr.objective(&fit.alpha, &fit.beta).unwrap();
        assert!((recomputed - fit.objective).abs() <= 1e-10 * (1.0 + recomputed));
    }
}

#[test]
fn duplicated_response_column() {
    let one = random_problem(8, 30, 2, 1, 0.5);
    let y = DMatrix::from_fn(30, 2, |i, _| one.responses()[(i, 0)]);
    let two = CanonicalProblem::new(one.design().clone(), y, tau(0.5)).unwrap();
    let a = canonical_rq_simplex(&one).unwrap();
    let b = canonical_rq_simplex(&two).unwrap();
    check_simplex(&b);
    assert!((a.objective - b.objective).abs() < 1e-8);
    assert_eq!(b, canonical_rq_simplex(&two).unwrap());
}

#[test]
fn substitution_matches_simplex_on_interior_instances() {
    for seed in 0..5 {
        let pr = interior_problem(seed);
        let simplex = canonical_rq_simplex(&pr).unwrap();
        assert!(simplex.alpha.iter().all(|&a| a > 0.01), "{:?}", simplex.alpha);
        let sub = substitution_fit(&pr).unwrap();
        assert!(sub.interior);
        assert!((sub.fit.objective - simplex.objective).abs() < 1e-8);
    }
}

#[test]
fn substitution_flags_a_noise_column() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let n = 60;
    let x = DMatrix::from_fn(n, 2, |_, j| if j == 0 { 1.0 } else { normal(&mut rng) });
    let y1: Vec<f64> = (0..n).map(|i| x[(i, 1)] + 0.1 * normal(&mut rng)).collect();
    let y = DMatrix::from_fn(n, 2, |i, j| if j == 0 { y1[i] } else { y1[i] + 20.0 * normal(&mut rng) });
    let pr = CanonicalProblem::new(x, y, tau(0.5)).unwrap();
    let sub = substitution_fit(&pr).unwrap();
    assert!(sub.fit.alpha[1].abs() < 0.05, "{:?}", sub.fit.alpha);
}

#[test]
fn l1_orthants() {
    for seed in 0..4 {
        let pr = random_problem(200 + seed, 25, 2, 3, 0.75);
        let l1 = canonical_rq_l1(&pr).unwrap();
        assert_eq!(l1.constraint_kind, ConstraintKind::L1Sign);
        assert!((l1.alpha.iter().map(|a| a.abs()).sum::<f64>() - 1.0).abs() <= 1e-10);
        let simplex = canonical_rq_simplex(&pr).unwrap();
        assert!(l1.objective <= simplex.objective + 1e-10);

        // negating a response column mirrors the optimum
        let mut y = pr.responses().clone();
        y.column_mut(1).neg_mut();
        let neg = CanonicalProblem::new(pr.design().clone(), y, pr.tau()).unwrap();
        let l1n = canonical_rq_l1(&neg).unwrap();
        assert!((l1n.objective - l1.objective).abs() < 1e-8);
        let mut mapped = l1.alpha.clone();
        mapped[1] = -mapped[1];
        let at = neg.beta_given_alpha(&mapped).unwrap().objective;
        assert!((at - l1n.objective).abs() < 1e-8);
    }
}

#[test]
fn l1_equals_simplex_when_the_positive_orthant_wins() {
    let pr = interior_problem(9);
    let l1 = canonical_rq_l1(&pr).unwrap();
    let simplex = canonical_rq_simplex(&pr).unwrap();
    assert!(l1.alpha.iter().all(|&a| a >= -1e-10) || l1.alpha.iter().all(|&a| a <= 1e-10));
    assert!((l1.objective - simplex.objective).abs() < 1e-8);
}

#[test]
fn orthant_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = DMatrix::from_element(40, 1, 1.0);
    let y = DMatrix::from_fn(40, 13, |_, _| normal(&mut rng));
    let pr = CanonicalProblem::new(x, y, tau(0.5)).unwrap();
    match canonical_rq_l1(&pr) {
        Err(e @ Error::OrthantLimit { .. }) => assert!(e.to_string().contains("orthant enumeration limit")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn scale_equivariance() {
    for c in [0.1, 10.0] {
        let pr = random_problem(31, 30, 3, 3, 0.75);
        let base = canonical_rq_simplex(&pr).unwrap();
        let scaled = CanonicalProblem::new(pr.design().clone(), pr.responses() * c, pr.tau()).unwrap();
        let fit = canonical_rq_simplex(&scaled).unwrap();
        assert!((fit.objective / base.objective - c).abs() < 1e-8);
        let at = scaled.objective(&base.alpha, &(&base.beta * c)).unwrap();
        assert!((at - fit.objective).abs() < 1e-8 * (1.0 + at));

        let mut x = pr.design().clone();
        x.column_mut(1).scale_mut(c);
        let cs = CanonicalProblem::new(x, pr.responses().clone(), pr.tau()).unwrap();
        let fit = canonical_rq_simplex(&cs).unwrap();
        assert!((fit.objective - base.objective).abs() < 1e-8 * (1.0 + base.objective));
        let mut beta = base.beta.clone();
        beta[1] /= c;
        let at = cs.objective(&base.alpha, &beta).unwrap();
        assert!((at - fit.objective).abs() < 1e-8 * (1.0 + at));
    }
}

#[test]
fn cca_scores_and_recovery() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let n = 2000;
    let rho: f64 = 0.8;
    let mut x = DMatrix::zeros(n, 1);
    let mut y = DMatrix::zeros(n, 1);
    for i in 0..n {
        let a = normal(&mut rng);
        let b = normal(&mut rng);
        x[(i, 0)] = a;
        y[(i, 0)] = rho * a + (1.0 - rho * rho).sqrt() * b;
    }
    let fit = cca_leading(&x, &y).unwrap();
    assert!((fit.correlation - rho).abs() < 0.05, "{}", fit.correlation);

    let x3 = DMatrix::from_fn(200, 3, |_, _| normal(&mut rng));
    let y2 = DMatrix::from_fn(200, 2, |i, j| x3[(i, j)] + normal(&mut rng));
    let fit = cca_leading(&x3, &y2).unwrap();
    let xb = &x3 * &fit.b;
    let ya = &y2 * &fit.a;
    assert!((correlation(xb.as_slice(), ya.as_slice()) - fit.correlation).abs() < 1e-8);
    let var = |v: &DVector<f64>| {
        let m = v.mean();
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
    };
    assert!((var(&xb) - 1.0).abs() < 1e-8 && (var(&ya) - 1.0).abs() < 1e-8);

    let same = cca_leading(&x3, &x3.columns(1, 1).into_owned()).unwrap();
    assert!((same.correlation - 1.0).abs() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simplex_dominates_feasible_probes(seed in any::<u64>()) {
        let pr = random_problem(seed, 20, 2, 3, 0.5);
        let fit = canonical_rq_simplex(&pr).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            let raw: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..1.0)).collect();
            let s: f64 = raw.iter().sum();
            let alpha = DVector::from_iterator(3, raw.iter().map(|r| r / s));
            let probe = pr.beta_given_alpha(&alpha).unwrap();
            prop_assert!(fit.objective <= probe.objective + 1e-9);
        }
    }
}
