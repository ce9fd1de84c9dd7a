//! Weighted resampling inference.
//!
//! Two schemes perturb observation weights instead of duplicating rows, so
//! refits never see a singular design from repeated observations:
//!
//! * Andrews subsample bootstrap: a random subset of size `m` gets iid
//!   Exponential(1) weights, every other observation gets `U(0,1) / n`.
//! * Delete-d jackknife: a random subset of size `d` is down-weighted to
//!   `U(0,1) / n`, the rest keep weight one.
//!
//! Draw `r` is generated from a ChaCha stream keyed by `(seed, r)`, so the set
//! of weight vectors does not depend on scheduling or thread count.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Open01};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weights at or below this are not counted as refittable support.
pub const SUPPORT_WEIGHT: f64 = 1e-6;

/// Maximum share of failed draws tolerated by [`resample_inference`].
pub const MAX_FAILURE_SHARE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Andrews,
    Jackknife,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResamplePlan {
    pub scheme: Scheme,
    pub replications: usize,
    /// Subsample size `m` (Andrews) or delete count `d` (jackknife).
    pub size: usize,
    pub seed: u64,
    pub se_rescale: bool,
}

/// `ceil(3 ln n)`.
pub fn default_subsample_size(n: usize) -> usize {
    (3.0 * (n as f64).ln()).ceil().max(1.0) as usize
}

/// `ceil(sqrt n)`.
pub fn default_delete_count(n: usize) -> usize {
    (n as f64).sqrt().ceil() as usize
}

impl ResamplePlan {
    pub fn andrews(n: usize, seed: u64) -> Self {
        Self {
            scheme: Scheme::Andrews,
            replications: 200,
            size: default_subsample_size(n),
            seed,
            se_rescale: true,
        }
    }

    pub fn jackknife(n: usize, seed: u64) -> Self {
        Self {
            scheme: Scheme::Jackknife,
            replications: 200,
            size: default_delete_count(n),
            seed,
            se_rescale: true,
        }
    }

    pub fn with_replications(mut self, r: usize) -> Self {
        self.replications = r;
        self
    }

    pub fn with_size(mut self, size: usize) -> Self {
        self.size = size;
        self
    }

    pub fn with_rescale(mut self, rescale: bool) -> Self {
        self.se_rescale = rescale;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.replications < 2 {
            return Err(Error::InvalidPlan(format!(
                "need at least 2 replications, got {}",
                self.replications
            )));
        }
        if self.size == 0 || self.size >= n {
            let what = match self.scheme {
                Scheme::Andrews => "subsample size",
                Scheme::Jackknife => "delete count",
            };
            return Err(Error::InvalidPlan(format!("{what} {} must lie in [1, {n})", self.size)));
        }
        Ok(())
    }

    /// Weight vector of draw `draw_index`.
    pub fn draw(&self, n: usize, draw_index: usize) -> Result<WeightVector> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(draw_index as u64);
        let mut wv = match self.scheme {
            Scheme::Andrews => andrews_weights(n, self.size, &mut rng)?,
            Scheme::Jackknife => jackknife_weights(n, self.size, &mut rng)?,
        };
        wv.draw_index = draw_index;
        Ok(wv)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub draw_index: usize,
}

impl WeightVector {
    /// All-ones weights, used for the full-data estimate.
    pub fn unit(n: usize) -> Self {
        Self {
            weights: vec![1.0; n],
            draw_index: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Number of weights large enough to support a refit.
    pub fn support(&self) -> usize {
        self.weights.iter().filter(|&&w| w > SUPPORT_WEIGHT).count()
    }
}

fn small_weight<R: Rng + ?Sized>(rng: &mut R, n: usize) -> f64 {
    let u: f64 = Open01.sample(rng);
    u / n as f64
}

/// One Andrews subsample-bootstrap weight vector.
pub fn andrews_weights<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<WeightVector> {
    if m == 0 || m >= n {
        return Err(Error::InvalidPlan(format!("subsample size {m} must lie in [1, {n})")));
    }
    let chosen = index::sample(rng, n, m).into_vec();
    let mut in_subset = vec![false; n];
    for i in chosen {
        in_subset[i] = true;
    }
    let weights = in_subset
        .into_iter()
        .map(|inside| {
            if inside {
                let e: f64 = Exp1.sample(rng);
                e.max(f64::MIN_POSITIVE)
            } else {
                small_weight(rng, n)
            }
        })
        .collect();
    Ok(WeightVector {
        weights,
        draw_index: 0,
    })
}

/// One weighted delete-d jackknife weight vector.
pub fn jackknife_weights<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<WeightVector> {
    if d == 0 || d >= n {
        return Err(Error::InvalidPlan(format!("delete count {d} must lie in [1, {n})")));
    }
    let deleted = index::sample(rng, n, d).into_vec();
    let mut out = vec![false; n];
    for i in deleted {
        out[i] = true;
    }
    let weights = out
        .into_iter()
        .map(|gone| if gone { small_weight(rng, n) } else { 1.0 })
        .collect();
    Ok(WeightVector {
        weights,
        draw_index: 0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceResult {
    /// Full-data estimate.
    pub point: Vec<f64>,
    pub se: Vec<f64>,
    /// `point / se`; zero where `se == 0` (see `t_defined`).
    pub t_stats: Vec<f64>,
    pub t_defined: Vec<bool>,
    /// Replicate estimates of the successful draws, ordered by draw index.
    pub draws: Vec<Vec<f64>>,
    pub draw_indices: Vec<usize>,
    /// Failed draws with their error messages.
    pub failures: Vec<(usize, String)>,
}

impl InferenceResult {
    pub fn successful_draws(&self) -> usize {
        self.draws.len()
    }
}

/// Runs the plan against a weighted refit.
///
/// `fit` is called once with unit weights for the point estimate and once per
/// draw. Draws that fail are recorded and skipped; more than 10% failures is an
/// error. The standard error is the cross-draw standard deviation, scaled by
/// `sqrt(m / n)` for the Andrews scheme and replaced by the delete-d jackknife
/// variance `(n - d) / (d R) * sum (theta_r - mean)^2` for the jackknife when
/// `se_rescale` is set.
pub fn resample_inference<F>(n: usize, plan: &ResamplePlan, fit: F) -> Result<InferenceResult>
where
    F: Fn(&WeightVector) -> Result<Vec<f64>> + Sync,
{
    plan.validate(n)?;
    let point = fit(&WeightVector::unit(n))?;
    let k = point.len();

    let outcomes: Vec<(usize, Result<Vec<f64>>)> = (0..plan.replications)
        .into_par_iter()
        .map(|r| {
            let res = plan.draw(n, r).and_then(|w| fit(&w)).and_then(|v| {
                if v.len() != k {
                    Err(Error::DimensionMismatch(format!("draw returned {} values, expected {k}", v.len())))
                } else if v.iter().any(|x| !x.is_finite()) {
                    Err(Error::InvalidProblem("draw returned a non-finite value".into()))
                } else {
                    Ok(v)
                }
            });
            (r, res)
        })
        .collect();

    let mut draws = Vec::new();
    let mut draw_indices = Vec::new();
    let mut failures = Vec::new();
    for (r, res) in outcomes {
        match res {
            Ok(v) => {
                draws.push(v);
                draw_indices.push(r);
            }
            Err(e) => failures.push((r, e.to_string())),
        }
    }
    if failures.len() as f64 > MAX_FAILURE_SHARE * plan.replications as f64 || draws.len() < 2 {
        return Err(Error::TooManyFailures {
            failed: failures.len(),
            total: plan.replications,
        });
    }
    if !failures.is_empty() {
        log::warn!("{} of {} resampling draws failed", failures.len(), plan.replications);
    }

    let count = draws.len() as f64;
    let mut se = vec![0.0; k];
    for (j, s) in se.iter_mut().enumerate() {
        let mean = draws.iter().map(|d| d[j]).sum::<f64>() / count;
        let ss: f64 = draws.iter().map(|d| (d[j] - mean).powi(2)).sum();
        *s = match (plan.scheme, plan.se_rescale) {
            (Scheme::Andrews, true) => (ss / (count - 1.0)).sqrt() * (plan.size as f64 / n as f64).sqrt(),
            (Scheme::Jackknife, true) => {
                let d = plan.size as f64;
                ((n as f64 - d) / (d * count) * ss).sqrt()
            }
            (_, false) => (ss / (count - 1.0)).sqrt(),
        };
    }
    let mut t_stats = vec![0.0; k];
    let mut t_defined = vec![false; k];
    for j in 0..k {
        if se[j] > 0.0 {
            t_stats[j] = point[j] / se[j];
            t_defined[j] = true;
        }
    }
    Ok(InferenceResult {
        point,
        se,
        t_stats,
        t_defined,
        draws,
        draw_indices,
        failures,
    })
}
