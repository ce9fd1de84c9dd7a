//! Canonical regression quantiles.
//!
//! Finds the convex combination of several response variables that is best
//! predicted, in quantile check loss, by a linear combination of explanatory
//! variables. Alongside the estimator the crate ships weighted subsample
//! bootstrap and jackknife inference, a classical canonical-correlation
//! baseline, and a rolling-window panel prediction pipeline with CSV/SVG
//! reporting.
//!
//! The modules build on each other bottom-up:
//!
//! * [`quantile`] check loss, sample quantiles, weighted linear quantile regression
//! * [`canonical`] simplex- and L1-normalised canonical fits
//! * [`cca`] leading classical canonical correlation
//! * [`resampling`] weighted Andrews subsample bootstrap and delete-d jackknife
//! * [`pipeline`] panel transforms, design assembly, window fits, prediction, evaluation
//! * [`io`] CSV ingestion, synthetic panels, run configuration and report files

pub mod canonical;
pub mod cca;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod pipeline;
pub mod quantile;
pub mod resampling;

pub use canonical::{
    canonical_rq_l1, canonical_rq_simplex, make_index, substitution_fit, CanonicalFit, CanonicalProblem,
    ConstraintKind, SubstitutionFit,
};
pub use cca::{cca_leading, CcaFit};
pub use error::{Error, Result};
pub use quantile::{
    check_loss, rq_fit, rq_objective, rq_subset_oracle, sample_quantile, QuantileLevel, RegressionProblem,
    RqSolution,
};
pub use resampling::{andrews_weights, jackknife_weights, resample_inference, InferenceResult, ResamplePlan, Scheme, WeightVector};
