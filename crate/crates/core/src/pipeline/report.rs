//! Whole-window analysis: point estimates, resampled standard errors and the
//! joint Index + CEO regressions.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::evaluate::{evaluate_weighted, Metrics};
use super::panel::{PanelDataset, NUM_RESPONSES};
use super::transform::AggregationConfig;
use super::window::{BaselinePrediction, IndexPrediction, WindowData, WindowSpec};
use crate::canonical::CanonicalFit;
use crate::error::{Error, Result};
use crate::quantile::{rq_fit, QuantileLevel, RegressionProblem};
use crate::resampling::{resample_inference, ResamplePlan, WeightVector};

/// The four competing predictors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Predictor {
    /// Canonical regression quantile index, quantile regression ahead.
    IndexRq,
    /// Leading canonical correlation index, least squares ahead.
    CcaLs,
    /// CEO compensation, quantile regression ahead.
    CeoRq,
    /// CEO compensation, least squares ahead.
    CeoLs,
}

impl Predictor {
    pub const ALL: [Predictor; 4] = [Predictor::IndexRq, Predictor::CcaLs, Predictor::CeoRq, Predictor::CeoLs];

    pub fn key(self) -> &'static str {
        match self {
            Predictor::IndexRq => "index_rq",
            Predictor::CcaLs => "cca_ls",
            Predictor::CeoRq => "ceo_rq",
            Predictor::CeoLs => "ceo_ls",
        }
    }

    pub fn position(self) -> usize {
        self as usize
    }
}

/// Median regression of a future response on intercept, Index and CEOtot.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct JointEntry {
    pub coef_index: f64,
    pub coef_ceo: f64,
    pub se_index: f64,
    pub se_ceo: f64,
    pub t_index: f64,
    pub t_ceo: f64,
    /// Index and CEOtot are collinear; coefficients and t-statistics are zero.
    pub collinear: bool,
}

#[derive(Debug, Clone)]
pub struct WindowReport {
    pub spec: WindowSpec,
    pub fit: CanonicalFit,
    pub alpha_se: Vec<f64>,
    pub beta_se: Vec<f64>,
    pub beta_t: Vec<f64>,
    /// `metrics[response][predictor]`.
    pub metrics: [[Metrics; 4]; NUM_RESPONSES],
    pub metric_se: [[Metrics; 4]; NUM_RESPONSES],
    pub joint: [JointEntry; NUM_RESPONSES],
    pub index: IndexPrediction,
    pub baselines: BaselinePrediction,
    pub draws: usize,
    pub failed_draws: usize,
}

#[derive(Debug, Clone)]
pub struct PredictionReport {
    pub tau: QuantileLevel,
    pub windows: Vec<WindowReport>,
}

impl PredictionReport {
    /// Mean over windows and the standard error of that mean, treating windows
    /// as independent.
    pub fn pooled(&self, response: usize, predictor: Predictor) -> (Metrics, Metrics) {
        let k = self.windows.len() as f64;
        let mut mean = [0.0; 3];
        let mut var = [0.0; 3];
        for w in &self.windows {
            let m = w.metrics[response][predictor.position()].to_array();
            let s = w.metric_se[response][predictor.position()].to_array();
            for t in 0..3 {
                mean[t] += m[t] / k;
                var[t] += s[t] * s[t];
            }
        }
        let se = var.map(|v| v.sqrt() / k);
        (Metrics::from_slice(&mean), Metrics::from_slice(&se))
    }
}

/// Joint regressions always use the median.
const JOINT_TAU: QuantileLevel = QuantileLevel::MEDIAN;

fn joint_design(index: &DVector<f64>, ceo: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(index.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => index[i],
        _ => ceo[i],
    })
}

fn joint_fit(
    data: &WindowData,
    index: &DVector<f64>,
    j: usize,
    w: &DVector<f64>,
) -> Result<[f64; 3]> {
    let pr = RegressionProblem::weighted(
        joint_design(index, &data.ceo),
        data.y_future.column(j).into_owned(),
        w.clone(),
    )?;
    let sol = rq_fit(&pr, JOINT_TAU)?;
    Ok([sol.coefficients[0], sol.coefficients[1], sol.coefficients[2]])
}

struct Estimates {
    fit: CanonicalFit,
    index: IndexPrediction,
    baselines: Option<BaselinePrediction>,
    metrics: [[Metrics; 4]; NUM_RESPONSES],
    joint: [Option<[f64; 3]>; NUM_RESPONSES],
}

impl Estimates {
    fn compute(
        data: &WindowData,
        tau: QuantileLevel,
        w: &DVector<f64>,
        full: bool,
        collinear: &[bool; NUM_RESPONSES],
    ) -> Result<Self> {
        let fit = data.fit_index(tau, w)?;
        let index = data.predict_index(&fit, tau, w)?;
        let mut metrics = [[Metrics::default(); 4]; NUM_RESPONSES];
        let baselines = if full {
            let base = data.predict_baselines(tau, w)?;
            for j in 0..NUM_RESPONSES {
                let obs = data.y_future.column(j);
                let preds = [
                    index.predicted.column(j),
                    base.cca_ls.column(j),
                    base.ceo_rq.column(j),
                    base.ceo_ls.column(j),
                ];
                for (k, p) in preds.iter().enumerate() {
                    metrics[j][k] = evaluate_weighted(p.as_slice(), obs.as_slice(), tau, Some(w))?;
                }
            }
            Some(base)
        } else {
            None
        };
        let mut joint = [None; NUM_RESPONSES];
        for j in 0..NUM_RESPONSES {
            if !collinear[j] {
                joint[j] = Some(joint_fit(data, &index.predictive_index, j, w)?);
            }
        }
        Ok(Self {
            fit,
            index,
            baselines,
            metrics,
            joint,
        })
    }

    fn flatten(&self, full: bool) -> Vec<f64> {
        let mut v = Vec::new();
        if full {
            v.extend(self.fit.alpha.iter());
            v.extend(self.fit.beta.iter());
            for row in &self.metrics {
                for m in row {
                    v.extend(m.to_array());
                }
            }
        }
        for j in &self.joint {
            v.extend(j.unwrap_or([0.0; 3]));
        }
        v
    }
}

/// Point estimates plus, when a plan is given, resampled standard errors.
///
/// Each draw refits the canonical index, every prediction line and the joint
/// regressions under the draw's weights; metrics are weighted means.
fn analyse_window(
    data: &WindowData,
    tau: QuantileLevel,
    plan: Option<&ResamplePlan>,
) -> Result<WindowReport> {
    let unit = data.unit_weights();
    // collinearity is decided on the full data and held fixed across draws
    let mut collinear = [false; NUM_RESPONSES];
    let probe = data.fit_index(tau, &unit)?;
    let probe_index = data.predict_index(&probe, tau, &unit)?;
    for (j, flag) in collinear.iter_mut().enumerate() {
        match joint_fit(data, &probe_index.predictive_index, j, &unit) {
            Ok(_) => {}
            Err(Error::DegenerateDesign(_)) => *flag = true,
            Err(e) => return Err(e),
        }
    }
    let point = Estimates::compute(data, tau, &unit, true, &collinear)?;
    let p = point.fit.beta.len();
    let q = point.fit.alpha.len();

    let k = point.flatten(true).len();
    let (se, draws, failed) = match plan {
        Some(plan) => {
            let inf = resample_inference(data.n(), plan, |wv: &WeightVector| {
                let w = DVector::from_column_slice(&wv.weights);
                Ok(Estimates::compute(data, tau, &w, true, &collinear)?.flatten(true))
            })?;
            (inf.se, inf.draws.len(), inf.failures.len())
        }
        None => (vec![0.0; k], 0, 0),
    };

    let alpha_se = se[..q].to_vec();
    let beta_se = se[q..q + p].to_vec();
    let beta_t = (0..p)
        .map(|j| if beta_se[j] > 0.0 { point.fit.beta[j] / beta_se[j] } else { 0.0 })
        .collect();
    let mut metric_se = [[Metrics::default(); 4]; NUM_RESPONSES];
    let mut off = q + p;
    for row in metric_se.iter_mut() {
        for m in row.iter_mut() {
            *m = Metrics::from_slice(&se[off..off + 3]);
            off += 3;
        }
    }
    let mut joint = [JointEntry::default(); NUM_RESPONSES];
    for j in 0..NUM_RESPONSES {
        let base = off + 3 * j;
        joint[j] = joint_entry(point.joint[j], se[base + 1], se[base + 2], collinear[j]);
    }

    Ok(WindowReport {
        spec: data.spec,
        fit: point.fit,
        alpha_se,
        beta_se,
        beta_t,
        metrics: point.metrics,
        metric_se,
        joint,
        index: point.index,
        baselines: point.baselines.expect("full estimates carry baselines"),
        draws,
        failed_draws: failed,
    })
}

fn joint_entry(coefs: Option<[f64; 3]>, se_index: f64, se_ceo: f64, collinear: bool) -> JointEntry {
    let c = coefs.unwrap_or([0.0; 3]);
    let t = |b: f64, s: f64| if s > 0.0 { b / s } else { 0.0 };
    JointEntry {
        coef_index: c[1],
        coef_ceo: c[2],
        se_index,
        se_ceo,
        t_index: t(c[1], se_index),
        t_ceo: t(c[2], se_ceo),
        collinear,
    }
}

/// Per-window seed derived from the run seed.
fn window_plan(plan: &ResamplePlan, k: usize) -> ResamplePlan {
    let mut p = plan.clone();
    p.seed = plan.seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(k as u64 + 1));
    p
}

/// Runs every window: index fit, predictions, evaluation, joint regressions
/// and, with a plan, resampled standard errors for all of them.
pub fn analyse(
    panel: &PanelDataset,
    specs: &[WindowSpec],
    config: &AggregationConfig,
    tau: QuantileLevel,
    plan: Option<&ResamplePlan>,
) -> Result<PredictionReport> {
    if specs.is_empty() {
        return Err(Error::InvalidWindow("no windows".into()));
    }
    let mut windows = Vec::with_capacity(specs.len());
    for (k, spec) in specs.iter().enumerate() {
        let data = WindowData::build(panel, spec, config)?;
        let wp = plan.map(|p| window_plan(p, k));
        windows.push(analyse_window(&data, tau, wp.as_ref())?);
    }
    Ok(PredictionReport { tau, windows })
}

/// Joint t-statistics of Index and CEOtot per window and response.
#[derive(Debug, Clone)]
pub struct JointTable {
    pub windows: Vec<WindowSpec>,
    pub entries: Vec<[JointEntry; NUM_RESPONSES]>,
}

/// Median regression of each future response on intercept, Index and CEOtot,
/// with standard errors from resampling in which the canonical index is refit
/// for every draw.
pub fn joint_tstats(
    panel: &PanelDataset,
    specs: &[WindowSpec],
    config: &AggregationConfig,
    tau: QuantileLevel,
    plan: &ResamplePlan,
) -> Result<JointTable> {
    let mut entries = Vec::with_capacity(specs.len());
    for (k, spec) in specs.iter().enumerate() {
        let data = WindowData::build(panel, spec, config)?;
        let unit = data.unit_weights();
        let fit = data.fit_index(tau, &unit)?;
        let index = data.predict_index(&fit, tau, &unit)?;
        let mut collinear = [false; NUM_RESPONSES];
        let mut point = [None; NUM_RESPONSES];
        for j in 0..NUM_RESPONSES {
            match joint_fit(&data, &index.predictive_index, j, &unit) {
                Ok(c) => point[j] = Some(c),
                Err(Error::DegenerateDesign(_)) => collinear[j] = true,
                Err(e) => return Err(e),
            }
        }
        let wp = window_plan(plan, k);
        let inf = resample_inference(data.n(), &wp, |wv: &WeightVector| {
            let w = DVector::from_column_slice(&wv.weights);
            Ok(Estimates::compute(&data, tau, &w, false, &collinear)?.flatten(false))
        })?;
        let mut row = [JointEntry::default(); NUM_RESPONSES];
        for j in 0..NUM_RESPONSES {
            row[j] = joint_entry(point[j], inf.se[3 * j + 1], inf.se[3 * j + 2], collinear[j]);
        }
        entries.push(row);
    }
    Ok(JointTable {
        windows: specs.to_vec(),
        entries,
    })
}
