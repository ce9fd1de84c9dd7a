use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantile::{check_loss, QuantileLevel};

/// Prediction accuracy of one predictor on one response.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Metrics {
    pub mae: f64,
    pub rmse: f64,
    pub rho_tau_loss: f64,
}

impl Metrics {
    pub fn to_array(self) -> [f64; 3] {
        [self.mae, self.rmse, self.rho_tau_loss]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self {
            mae: v[0],
            rmse: v[1],
            rho_tau_loss: v[2],
        }
    }
}

/// MAE, RMSE and mean check loss of `observed - predicted`.
pub fn evaluate(predicted: &[f64], observed: &[f64], tau: QuantileLevel) -> Result<Metrics> {
    evaluate_weighted(predicted, observed, tau, None)
}

/// [`evaluate`] with observation weights; means become weighted means.
pub fn evaluate_weighted(
    predicted: &[f64],
    observed: &[f64],
    tau: QuantileLevel,
    weights: Option<&DVector<f64>>,
) -> Result<Metrics> {
    let n = predicted.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if observed.len() != n || weights.is_some_and(|w| w.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "{n} predictions, {} observations",
            observed.len()
        )));
    }
    let mut total = 0.0;
    let mut abs = 0.0;
    let mut sq = 0.0;
    let mut rho = 0.0;
    for i in 0..n {
        let w = weights.map_or(1.0, |w| w[i]);
        let e = observed[i] - predicted[i];
        total += w;
        abs += w * e.abs();
        sq += w * e * e;
        rho += w * check_loss(e, tau);
    }
    if total <= 0.0 {
        return Err(Error::ZeroTotalWeight);
    }
    Ok(Metrics {
        mae: abs / total,
        rmse: (sq / total).sqrt(),
        rho_tau_loss: rho / total,
    })
}
