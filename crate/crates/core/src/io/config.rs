//! Run configuration, readable from TOML.
//!
//! ```toml
//! taus = [0.5, 0.75]
//! window_length = 5
//! horizon = 2
//! n_windows = 2
//! seed = 42
//! out_dir = "out"
//!
//! [input.synthetic]
//! n_companies = 100
//! noise_scale = 0.1
//!
//! [resampling]
//! scheme = "andrews"
//! replications = 200
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::synthetic::SyntheticSpec;
use crate::error::{Error, Result};
use crate::pipeline::{AggregationConfig, PanelDataset, WindowSpec, DESIGN_COLUMNS};
use crate::quantile::QuantileLevel;
use crate::resampling::{default_delete_count, default_subsample_size, ResamplePlan, Scheme};

/// Where the panel comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    Csv(PathBuf),
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResamplingConfig {
    pub scheme: Scheme,
    /// Zero skips resampling; standard errors are then reported as zero.
    pub replications: usize,
    /// Subsample size or delete count; derived from `n` when absent.
    pub size: Option<usize>,
    pub se_rescale: bool,
}

impl Default for ResamplingConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Andrews,
            replications: 200,
            size: None,
            se_rescale: true,
        }
    }
}

impl ResamplingConfig {
    /// Plan for `n` companies. The Andrews subsample is at least `p + 5` so
    /// that the full design can be refitted on it.
    pub fn plan(&self, n: usize, seed: u64) -> Option<ResamplePlan> {
        if self.replications == 0 {
            return None;
        }
        let size = self.size.unwrap_or(match self.scheme {
            Scheme::Andrews => default_subsample_size(n).max(DESIGN_COLUMNS + 5),
            Scheme::Jackknife => default_delete_count(n),
        });
        Some(ResamplePlan {
            scheme: self.scheme,
            replications: self.replications,
            size,
            seed,
            se_rescale: self.se_rescale,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: InputSource,
    pub taus: Vec<f64>,
    pub window_length: usize,
    pub horizon: usize,
    pub n_windows: usize,
    /// First training year; the panel's first year when absent.
    pub first_train_year: Option<i32>,
    pub aggregation: AggregationConfig,
    pub resampling: ResamplingConfig,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Worker threads; the global rayon pool when absent. Results do not
    /// depend on it.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: InputSource::Synthetic(SyntheticSpec::default()),
            taus: vec![0.5, 0.75],
            window_length: 5,
            horizon: 2,
            n_windows: 2,
            first_train_year: None,
            aggregation: AggregationConfig::default(),
            resampling: ResamplingConfig::default(),
            out_dir: PathBuf::from("out"),
            seed: 0,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn quantile_levels(&self) -> Result<Vec<QuantileLevel>> {
        self.taus.iter().map(|&t| QuantileLevel::new(t)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.taus.is_empty() {
            return Err(Error::InvalidConfig("no quantile levels".into()));
        }
        self.quantile_levels()?;
        if self.window_length == 0 || self.horizon == 0 || self.n_windows == 0 {
            return Err(Error::InvalidConfig(
                "window_length, horizon and n_windows must be positive".into(),
            ));
        }
        if self.resampling.replications == 1 {
            return Err(Error::InvalidConfig("replications must be 0 or at least 2".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidConfig("threads must be positive".into()));
        }
        self.aggregation.validate()?;
        if let InputSource::Synthetic(spec) = &self.input {
            spec.validate_for(self.window_length, self.horizon)?;
        }
        Ok(())
    }

    /// Rolling windows over `panel`, each checked against its year range.
    pub fn windows(&self, panel: &PanelDataset) -> Result<Vec<WindowSpec>> {
        let first = self.first_train_year.unwrap_or(panel.first_year());
        let specs = WindowSpec::rolling(first, self.window_length, self.horizon, self.n_windows);
        for s in &specs {
            s.validate(panel)?;
        }
        Ok(specs)
    }
}
