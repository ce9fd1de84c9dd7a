//! Panel prediction pipeline.
//!
//! For each rolling window the explanatory design is aggregated over the
//! training years, a canonical regression quantile index is fitted against the
//! responses `horizon` years later, and the index is then applied to a later
//! window to predict responses further ahead. Predictions are compared with a
//! canonical-correlation index and with CEO compensation.

pub mod design;
pub mod evaluate;
pub mod panel;
pub mod report;
pub mod transform;
pub mod window;

pub use design::{build_design, response_matrix, Design, DESIGN_COLUMNS, DESIGN_LABELS};
pub use evaluate::{evaluate, evaluate_weighted, Metrics};
pub use panel::{Company, Industry, Observation, PanelDataset, NUM_RESPONSES, RESPONSE_LABELS};
pub use report::{analyse, joint_tstats, JointEntry, JointTable, PredictionReport, Predictor, WindowReport};
pub use transform::{discounted_avg, log_max1, min_diff, signed_log, AggregationConfig, CeoPredictor, ResponseTransform};
pub use window::{
    fit_window, predict_ahead, predict_baselines, BaselinePrediction, IndexPrediction, Line, WindowData, WindowSpec,
};
