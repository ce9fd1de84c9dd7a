//! Scalar transforms and five-year aggregates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `sign(y) ln|y|` for `|y| >= 1`, zero inside `(-1, 1)`.
///
/// The clamp keeps the map monotone and finite.
pub fn signed_log(y: f64) -> f64 {
    if y.abs() < 1.0 {
        0.0
    } else {
        y.signum() * y.abs().ln()
    }
}

/// `ln(max(1, y))`.
pub fn log_max1(y: f64) -> f64 {
    y.max(1.0).ln()
}

/// Exponentially discounted average of a chronological series, newest value
/// weighted most. Weights `(1 - rate)^k` are normalised to sum to one.
pub fn discounted_avg(series: &[f64], rate: f64) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::InvalidConfig(format!("discount rate {rate} outside [0, 1)")));
    }
    let keep = 1.0 - rate;
    let mut w = 1.0;
    let mut num = 0.0;
    let mut den = 0.0;
    for &s in series.iter().rev() {
        num += w * s;
        den += w;
        w *= keep;
    }
    Ok(num / den)
}

/// Smallest year-on-year change.
pub fn min_diff(series: &[f64]) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "min_diff needs at least 2 values, got {}",
            series.len()
        )));
    }
    Ok(series
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseTransform {
    SignedLog,
    LogMax1,
}

impl ResponseTransform {
    pub fn apply(self, y: f64) -> f64 {
        match self {
            ResponseTransform::SignedLog => signed_log(y),
            ResponseTransform::LogMax1 => log_max1(y),
        }
    }
}

/// Which CEO compensation series serves as the stand-alone predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CeoPredictor {
    /// The discounted average over the window (`CEOtwt`).
    Aggregate,
    /// The raw value in the window's last year.
    Current,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AggregationConfig {
    pub discount_rate: f64,
    pub transform: ResponseTransform,
    pub ceo_predictor: CeoPredictor,
}

impl Default for AggregationConfig {
    fn default() -> Self {
        Self {
            discount_rate: 0.05,
            transform: ResponseTransform::SignedLog,
            ceo_predictor: CeoPredictor::Aggregate,
        }
    }
}

impl AggregationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.discount_rate) {
            return Err(Error::InvalidConfig(format!(
                "discount rate {} outside [0, 1)",
                self.discount_rate
            )));
        }
        Ok(())
    }
}
