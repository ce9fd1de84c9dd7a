//! Rolling-window index fitting and two-years-ahead prediction.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::design::{build_design, response_matrix, CEO_WT_COLUMN};
use super::panel::{PanelDataset, NUM_RESPONSES};
use super::transform::{AggregationConfig, CeoPredictor};
use crate::canonical::{canonical_rq_simplex, CanonicalFit, CanonicalProblem};
use crate::cca::{cca_leading_weighted, CcaFit};
use crate::error::{Error, Result};
use crate::linalg;
use crate::quantile::{rq_fit, sample_quantile, QuantileLevel, RegressionProblem};

/// Training window, prediction horizon and apply window.
///
/// The index is fitted on the design over
/// `train_start_year ..= train_start_year + window_length - 1` against
/// responses `horizon` years after that, then applied to the design over the
/// apply window to predict responses `horizon` years after its end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub train_start_year: i32,
    pub window_length: usize,
    pub horizon: usize,
    pub apply_start_year: i32,
}

impl WindowSpec {
    /// Apply window starting `horizon` years after the training window, so
    /// its end coincides with the training target year.
    pub fn new(train_start_year: i32, window_length: usize, horizon: usize) -> Self {
        Self {
            train_start_year,
            window_length,
            horizon,
            apply_start_year: train_start_year + horizon as i32,
        }
    }

    /// `count` consecutive windows starting at `first_year`.
    pub fn rolling(first_year: i32, window_length: usize, horizon: usize, count: usize) -> Vec<Self> {
        (0..count)
            .map(|k| Self::new(first_year + k as i32, window_length, horizon))
            .collect()
    }

    pub fn train_end(&self) -> i32 {
        self.train_start_year + self.window_length as i32 - 1
    }

    pub fn train_target(&self) -> i32 {
        self.train_end() + self.horizon as i32
    }

    pub fn apply_end(&self) -> i32 {
        self.apply_start_year + self.window_length as i32 - 1
    }

    pub fn apply_target(&self) -> i32 {
        self.apply_end() + self.horizon as i32
    }

    pub fn validate(&self, panel: &PanelDataset) -> Result<()> {
        if self.window_length < 2 {
            return Err(Error::InvalidWindow(format!("window length {} < 2", self.window_length)));
        }
        if self.horizon < 1 {
            return Err(Error::InvalidWindow("horizon must be at least 1".into()));
        }
        let lo = self.train_start_year.min(self.apply_start_year);
        let hi = self.train_target().max(self.apply_target());
        if !panel.contains_year(lo) || !panel.contains_year(hi) {
            return Err(Error::InvalidWindow(format!(
                "window needs years {lo}..={hi}, panel covers {}..={}",
                panel.first_year(),
                panel.last_year()
            )));
        }
        Ok(())
    }
}

/// Straight line `intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Line {
    pub intercept: f64,
    pub slope: f64,
}

impl Line {
    pub fn at(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    pub fn predict(&self, x: &DVector<f64>) -> DVector<f64> {
        x.map(|v| self.at(v))
    }
}

fn is_constant(x: &DVector<f64>) -> bool {
    let first = x[0];
    let scale = x.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    x.iter().all(|v| (v - first).abs() <= 1e-12 * scale)
}

/// Weighted regression quantile of `y` on `[1, x]`; intercept only when `x` is constant.
pub fn rq_line(x: &DVector<f64>, y: &DVector<f64>, tau: QuantileLevel, w: &DVector<f64>) -> Result<Line> {
    if is_constant(x) {
        let q = sample_quantile(y.as_slice(), tau, Some(w.as_slice()))?;
        return Ok(Line {
            intercept: q,
            slope: 0.0,
        });
    }
    let design = DMatrix::from_fn(x.len(), 2, |i, j| if j == 0 { 1.0 } else { x[i] });
    let pr = RegressionProblem::weighted(design, y.clone(), w.clone())?;
    let sol = rq_fit(&pr, tau)?;
    Ok(Line {
        intercept: sol.coefficients[0],
        slope: sol.coefficients[1],
    })
}

/// Weighted least-squares line of `y` on `[1, x]`; intercept only when `x` is constant.
pub fn ls_line(x: &DVector<f64>, y: &DVector<f64>, w: &DVector<f64>) -> Result<Line> {
    if is_constant(x) {
        let total = w.sum();
        if total <= 0.0 {
            return Err(Error::ZeroTotalWeight);
        }
        return Ok(Line {
            intercept: w.dot(y) / total,
            slope: 0.0,
        });
    }
    let design = DMatrix::from_fn(x.len(), 2, |i, j| if j == 0 { 1.0 } else { x[i] });
    let b = linalg::least_squares(&design, y, Some(w))?;
    Ok(Line {
        intercept: b[0],
        slope: b[1],
    })
}

/// Matrices a window needs, built once and reused across resampling draws.
#[derive(Debug, Clone)]
pub struct WindowData {
    pub spec: WindowSpec,
    /// Design over the training window.
    pub x_train: DMatrix<f64>,
    /// Transformed responses at the training target year.
    pub y_train: DMatrix<f64>,
    /// Design over the apply window.
    pub x_apply: DMatrix<f64>,
    /// Transformed responses at the apply target year.
    pub y_future: DMatrix<f64>,
    /// Stand-alone CEO compensation predictor over the apply window.
    pub ceo: DVector<f64>,
}

impl WindowData {
    pub fn build(panel: &PanelDataset, spec: &WindowSpec, config: &AggregationConfig) -> Result<Self> {
        spec.validate(panel)?;
        let x_train = build_design(panel, spec.train_start_year, spec.window_length, config)?.matrix;
        let y_train = response_matrix(panel, spec.train_target(), config)?;
        let x_apply = build_design(panel, spec.apply_start_year, spec.window_length, config)?.matrix;
        let y_future = response_matrix(panel, spec.apply_target(), config)?;
        let ceo = match config.ceo_predictor {
            CeoPredictor::Aggregate => x_apply.column(CEO_WT_COLUMN).into_owned(),
            CeoPredictor::Current => {
                let mut v = DVector::zeros(panel.n_companies());
                for c in 0..panel.n_companies() {
                    v[c] = panel.get(c, spec.apply_end())?.ceo_tot;
                }
                v
            }
        };
        Ok(Self {
            spec: *spec,
            x_train,
            y_train,
            x_apply,
            y_future,
            ceo,
        })
    }

    pub fn n(&self) -> usize {
        self.x_train.nrows()
    }

    pub fn unit_weights(&self) -> DVector<f64> {
        DVector::from_element(self.n(), 1.0)
    }

    pub fn fit_index(&self, tau: QuantileLevel, w: &DVector<f64>) -> Result<CanonicalFit> {
        let pr = CanonicalProblem::weighted(self.x_train.clone(), self.y_train.clone(), tau, w.clone())?;
        canonical_rq_simplex(&pr)
    }

    pub fn predict_index(&self, fit: &CanonicalFit, tau: QuantileLevel, w: &DVector<f64>) -> Result<IndexPrediction> {
        let predictive_index = fit.predictive_index(&self.x_apply)?;
        let response_index = fit.response_index(&self.y_future)?;
        let mut predicted = DMatrix::zeros(self.n(), NUM_RESPONSES);
        let mut lines = Vec::with_capacity(NUM_RESPONSES);
        for j in 0..NUM_RESPONSES {
            let y = self.y_future.column(j).into_owned();
            let line = rq_line(&predictive_index, &y, tau, w)?;
            predicted.set_column(j, &line.predict(&predictive_index));
            lines.push(line);
        }
        Ok(IndexPrediction {
            predictive_index,
            response_index,
            observed: self.y_future.clone(),
            predicted,
            lines,
        })
    }

    pub fn predict_baselines(&self, tau: QuantileLevel, w: &DVector<f64>) -> Result<BaselinePrediction> {
        let n = self.n();
        let cca = cca_leading_weighted(&self.x_train, &self.y_train, w)?;
        let cca_index = &self.x_apply * &cca.b;
        let mut cca_ls = DMatrix::zeros(n, NUM_RESPONSES);
        let mut ceo_rq = DMatrix::zeros(n, NUM_RESPONSES);
        let mut ceo_ls = DMatrix::zeros(n, NUM_RESPONSES);
        let mut cca_lines = Vec::new();
        let mut ceo_rq_lines = Vec::new();
        let mut ceo_ls_lines = Vec::new();
        for j in 0..NUM_RESPONSES {
            let y = self.y_future.column(j).into_owned();
            let l = ls_line(&cca_index, &y, w)?;
            cca_ls.set_column(j, &l.predict(&cca_index));
            cca_lines.push(l);
            let l = rq_line(&self.ceo, &y, tau, w)?;
            ceo_rq.set_column(j, &l.predict(&self.ceo));
            ceo_rq_lines.push(l);
            let l = ls_line(&self.ceo, &y, w)?;
            ceo_ls.set_column(j, &l.predict(&self.ceo));
            ceo_ls_lines.push(l);
        }
        Ok(BaselinePrediction {
            cca,
            cca_index,
            cca_lines,
            cca_ls,
            ceo: self.ceo.clone(),
            ceo_rq_lines,
            ceo_rq,
            ceo_ls_lines,
            ceo_ls,
        })
    }
}

/// Index-based predictions for one window.
#[derive(Debug, Clone)]
pub struct IndexPrediction {
    /// `X* beta` over the apply window.
    pub predictive_index: DVector<f64>,
    /// `Y alpha` at the apply target year.
    pub response_index: DVector<f64>,
    /// Transformed responses at the apply target year.
    pub observed: DMatrix<f64>,
    pub predicted: DMatrix<f64>,
    /// Per-response quantile regression on the index.
    pub lines: Vec<Line>,
}

/// Baseline predictions for one window.
#[derive(Debug, Clone)]
pub struct BaselinePrediction {
    pub cca: CcaFit,
    pub cca_index: DVector<f64>,
    pub cca_lines: Vec<Line>,
    pub cca_ls: DMatrix<f64>,
    pub ceo: DVector<f64>,
    pub ceo_rq_lines: Vec<Line>,
    pub ceo_rq: DMatrix<f64>,
    pub ceo_ls_lines: Vec<Line>,
    pub ceo_ls: DMatrix<f64>,
}

/// Canonical regression quantile index for the training window.
pub fn fit_window(
    panel: &PanelDataset,
    spec: &WindowSpec,
    config: &AggregationConfig,
    tau: QuantileLevel,
) -> Result<CanonicalFit> {
    let data = WindowData::build(panel, spec, config)?;
    data.fit_index(tau, &data.unit_weights())
}

/// Applies a fitted index to the apply window and predicts each response.
pub fn predict_ahead(
    panel: &PanelDataset,
    fit: &CanonicalFit,
    spec: &WindowSpec,
    config: &AggregationConfig,
    tau: QuantileLevel,
) -> Result<IndexPrediction> {
    let data = WindowData::build(panel, spec, config)?;
    data.predict_index(fit, tau, &data.unit_weights())
}

/// Canonical-correlation and CEO compensation predictions.
pub fn predict_baselines(
    panel: &PanelDataset,
    spec: &WindowSpec,
    config: &AggregationConfig,
    tau: QuantileLevel,
) -> Result<BaselinePrediction> {
    let data = WindowData::build(panel, spec, config)?;
    data.predict_baselines(tau, &data.unit_weights())
}
