//! Synthetic company panels with a known predictive structure.
//!
//! Every company carries a latent log-size that drifts with a company-specific
//! growth rate. All five responses are the latent size plus a fixed offset plus
//! idiosyncratic noise, so past response aggregates predict future responses.
//! The response mix named by `index_weights` is the predictable one: response
//! `j` receives extra unpredictable noise of scale `(1 - w_j) * nuisance_scale`
//! (weights normalised to their maximum). CEO compensation loads on the latent
//! size only through `ceo_signal`. Economic profits and shareholder return can
//! be flipped to large negative values at rate `contamination`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::{Company, Industry, Observation, PanelDataset, NUM_RESPONSES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n_companies: usize,
    pub n_years: usize,
    pub first_year: i32,
    /// Scale of the yearly latent shocks and of the predictable responses' noise.
    pub noise_scale: f64,
    /// Extra noise on responses outside the generative index.
    pub nuisance_scale: f64,
    /// Student-t degrees of freedom for all noise; normal when absent.
    pub student_t_df: Option<f64>,
    /// Rate of sign-flipped heavy outliers in Eprof and TSR.
    pub contamination: f64,
    /// Generative response weights (REV, Earn, Eprof, MCap, TSR).
    pub index_weights: [f64; NUM_RESPONSES],
    /// Loading of log CEO compensation on the latent company size.
    pub ceo_signal: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_companies: 100,
            n_years: 10,
            first_year: 2009,
            noise_scale: 0.2,
            nuisance_scale: 0.6,
            student_t_df: None,
            contamination: 0.05,
            index_weights: [1.0, 0.0, 0.0, 0.0, 0.0],
            ceo_signal: 0.1,
        }
    }
}

// log-scale offsets of the responses from the latent size
const OFFSETS: [f64; NUM_RESPONSES] = [0.0, -2.0, -2.5, 0.7, -3.0];
const INDUSTRY_EFFECT: [f64; 6] = [0.2, 0.4, 0.0, 0.3, 0.5, -0.2];

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_companies < 2 {
            return bad(format!("n_companies = {} < 2", self.n_companies));
        }
        if self.n_years < 3 {
            return bad(format!("n_years = {} < 3", self.n_years));
        }
        if !(0.0..1.0).contains(&self.contamination) {
            return bad(format!("contamination {} outside [0, 1)", self.contamination));
        }
        if !(self.noise_scale >= 0.0 && self.nuisance_scale >= 0.0) {
            return bad("noise scales must be nonnegative".into());
        }
        if let Some(df) = self.student_t_df {
            if !(df > 2.0) {
                return bad(format!("student_t_df = {df} must exceed 2"));
            }
        }
        if self.index_weights.iter().any(|w| !(*w >= 0.0)) || self.index_weights.iter().sum::<f64>() <= 0.0 {
            return bad("index_weights must be nonnegative with a positive sum".into());
        }
        Ok(())
    }

    /// Checks that the panel is long enough for two rolling windows.
    pub fn validate_for(&self, window_length: usize, horizon: usize) -> Result<()> {
        self.validate()?;
        let need = window_length + 2 * horizon;
        if self.n_years < need {
            return Err(Error::InvalidConfig(format!(
                "n_years = {} but a {window_length}-year window with horizon {horizon} needs {need}",
                self.n_years
            )));
        }
        Ok(())
    }
}

struct Noise {
    t: Option<(StudentT<f64>, f64)>,
}

impl Noise {
    fn new(df: Option<f64>) -> Result<Self> {
        Ok(Self {
            t: match df {
                Some(df) => Some((
                    StudentT::new(df).map_err(|e| Error::InvalidConfig(e.to_string()))?,
                    ((df - 2.0) / df).sqrt(),
                )),
                None => None,
            },
        })
    }

    /// Unit-variance draw.
    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match &self.t {
            Some((t, scale)) => t.sample(rng) * scale,
            None => StandardNormal.sample(rng),
        }
    }
}

/// Generates a panel; identical `(spec, seed)` give identical panels.
pub fn gen_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<PanelDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Noise::new(spec.student_t_df)?;
    let wmax = spec.index_weights.iter().cloned().fold(0.0, f64::max);
    let sigma: Vec<f64> = spec
        .index_weights
        .iter()
        .map(|w| 0.25 * spec.noise_scale + (1.0 - w / wmax) * spec.nuisance_scale)
        .collect();

    let mut companies = Vec::with_capacity(spec.n_companies);
    let mut observations = Vec::with_capacity(spec.n_companies);
    for c in 0..spec.n_companies {
        let k = rng.random_range(0..Industry::ALL.len());
        let industry = Industry::ALL[k];
        companies.push(Company {
            id: format!("C{:03}", c + 1),
            industry,
        });
        let quality = noise.draw(&mut rng);
        let growth = 0.03 + 0.02 * quality + 0.02 * noise.draw(&mut rng);
        let mut size = 8.0 + 1.2 * quality + INDUSTRY_EFFECT[k] + 0.3 * noise.draw(&mut rng);
        let mut series = Vec::with_capacity(spec.n_years);
        for t in 0..spec.n_years {
            if t > 0 {
                size += growth + 0.5 * spec.noise_scale * noise.draw(&mut rng);
            }
            let mut resp = [0.0; NUM_RESPONSES];
            for j in 0..NUM_RESPONSES {
                let level = size + OFFSETS[j] + sigma[j] * noise.draw(&mut rng);
                let flip = (j == 2 || j == 4) && rng.random::<f64>() < spec.contamination;
                resp[j] = if flip {
                    -(level + 1.0 + 1.5 * noise.draw(&mut rng).abs()).exp()
                } else {
                    level.exp()
                };
            }
            let ceo = (2.3 + spec.ceo_signal * (size - 8.0) + 0.35 * noise.draw(&mut rng)).exp();
            series.push(Observation {
                ir: 1.2 + 0.3 * quality + 0.3 * noise.draw(&mut rng),
                eq: -0.05 + 0.02 * quality + 0.05 * noise.draw(&mut rng),
                mg: 1.0 + 0.1 * quality + 0.5 * noise.draw(&mut rng),
                eps: 0.1 * noise.draw(&mut rng),
                ceo_tot: ceo,
                rev: resp[0],
                earn: resp[1],
                eprof: resp[2],
                mcap: resp[3],
                tsr: resp[4],
            });
        }
        observations.push(series);
    }
    PanelDataset::new(companies, spec.first_year, observations)
}
