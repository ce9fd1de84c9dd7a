use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Company sector. `Utility` is the reference level in the design matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Industry {
    Industrial,
    Health,
    Consumer,
    Energy,
    Tech,
    Utility,
}

impl Industry {
    pub const ALL: [Industry; 6] = [
        Industry::Industrial,
        Industry::Health,
        Industry::Consumer,
        Industry::Energy,
        Industry::Tech,
        Industry::Utility,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Industry::Industrial => "industrial",
            Industry::Health => "health",
            Industry::Consumer => "consumer",
            Industry::Energy => "energy",
            Industry::Tech => "tech",
            Industry::Utility => "utility",
        }
    }
}

impl fmt::Display for Industry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Industry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Industry::ALL
            .iter()
            .copied()
            .find(|i| i.as_str() == lower)
            .ok_or_else(|| Error::InvalidPanel(format!("unknown industry label {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Company {
    pub id: String,
    pub industry: Industry,
}

/// One company-year record. Dollar amounts are in millions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Observation {
    /// Investment ratio.
    pub ir: f64,
    /// Earnings quality ratio.
    pub eq: f64,
    /// Margin growth ratio.
    pub mg: f64,
    /// EPS growth less true earnings growth.
    pub eps: f64,
    /// Total CEO compensation.
    pub ceo_tot: f64,
    pub rev: f64,
    pub earn: f64,
    pub eprof: f64,
    pub mcap: f64,
    pub tsr: f64,
}

impl Observation {
    /// IR, EQ, MG, EPS, CEOtot.
    pub fn explanatory(&self) -> [f64; 5] {
        [self.ir, self.eq, self.mg, self.eps, self.ceo_tot]
    }

    /// REV, Earn, Eprof, MCap, TSR.
    pub fn responses(&self) -> [f64; 5] {
        [self.rev, self.earn, self.eprof, self.mcap, self.tsr]
    }

    pub fn values(&self) -> [f64; 10] {
        [
            self.ir,
            self.eq,
            self.mg,
            self.eps,
            self.ceo_tot,
            self.rev,
            self.earn,
            self.eprof,
            self.mcap,
            self.tsr,
        ]
    }
}

/// Number of response variables.
pub const NUM_RESPONSES: usize = 5;

/// Names of the transformed responses, in column order.
pub const RESPONSE_LABELS: [&str; NUM_RESPONSES] = ["logRev", "logEarn", "logEprof", "logMCap", "logTSR"];

/// A balanced company-by-year panel over a contiguous range of years.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelDataset {
    companies: Vec<Company>,
    first_year: i32,
    n_years: usize,
    // observations[company][year - first_year]
    observations: Vec<Vec<Observation>>,
}

impl PanelDataset {
    pub fn new(companies: Vec<Company>, first_year: i32, observations: Vec<Vec<Observation>>) -> Result<Self> {
        if companies.is_empty() {
            return Err(Error::InvalidPanel("no companies".into()));
        }
        if observations.len() != companies.len() {
            return Err(Error::InvalidPanel(format!(
                "{} companies but {} observation series",
                companies.len(),
                observations.len()
            )));
        }
        let n_years = observations[0].len();
        if n_years == 0 {
            return Err(Error::InvalidPanel("no years".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for (c, series) in companies.iter().zip(&observations) {
            if !seen.insert(c.id.as_str()) {
                return Err(Error::InvalidPanel(format!("duplicate company id {:?}", c.id)));
            }
            if series.len() != n_years {
                return Err(Error::InvalidPanel(format!(
                    "company {:?} has {} years, expected {n_years}",
                    c.id,
                    series.len()
                )));
            }
            for (k, o) in series.iter().enumerate() {
                if o.values().iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidPanel(format!(
                        "company {:?} year {} has a non-finite value",
                        c.id,
                        first_year + k as i32
                    )));
                }
            }
        }
        Ok(Self {
            companies,
            first_year,
            n_years,
            observations,
        })
    }

    pub fn companies(&self) -> &[Company] {
        &self.companies
    }

    pub fn n_companies(&self) -> usize {
        self.companies.len()
    }

    pub fn first_year(&self) -> i32 {
        self.first_year
    }

    pub fn last_year(&self) -> i32 {
        self.first_year + self.n_years as i32 - 1
    }

    pub fn n_years(&self) -> usize {
        self.n_years
    }

    pub fn n_observations(&self) -> usize {
        self.n_years * self.companies.len()
    }

    pub fn contains_year(&self, year: i32) -> bool {
        year >= self.first_year && year <= self.last_year()
    }

    pub fn get(&self, company: usize, year: i32) -> Result<&Observation> {
        let Some(series) = self.observations.get(company) else {
            return Err(Error::InvalidPanel(format!("no company at index {company}")));
        };
        if !self.contains_year(year) {
            return Err(Error::InvalidPanel(format!(
                "company {:?} has no observation for {year} (panel covers {}..={})",
                self.companies[company].id,
                self.first_year,
                self.last_year()
            )));
        }
        Ok(&series[(year - self.first_year) as usize])
    }

    pub fn series(&self, company: usize) -> &[Observation] {
        &self.observations[company]
    }

    /// Same data relabelled `delta` years later.
    pub fn shift_years(&self, delta: i32) -> Self {
        Self {
            first_year: self.first_year + delta,
            ..self.clone()
        }
    }

    /// Reorders companies; `order[k]` is the old index of new company `k`.
    pub fn permute_companies(&self, order: &[usize]) -> Result<Self> {
        let mut check = order.to_vec();
        check.sort_unstable();
        if check != (0..self.companies.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidPanel("order is not a permutation".into()));
        }
        Ok(Self {
            companies: order.iter().map(|&i| self.companies[i].clone()).collect(),
            first_year: self.first_year,
            n_years: self.n_years,
            observations: order.iter().map(|&i| self.observations[i].clone()).collect(),
        })
    }
}
