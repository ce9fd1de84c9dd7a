//! Per-window design matrix and response matrix assembly.

use nalgebra::DMatrix;

use super::panel::{Industry, PanelDataset, NUM_RESPONSES};
use super::transform::{discounted_avg, min_diff, AggregationConfig};
use crate::error::{Error, Result};

/// Column labels of the 26-column window design, in order.
pub const DESIGN_LABELS: [&str; 26] = [
    "intercept",
    "indust",
    "health",
    "consum",
    "energy",
    "tech",
    "IRwt",
    "IRminD",
    "EQwt",
    "EQminD",
    "MGwt",
    "MGminD",
    "EPSGwt",
    "EPSGminD",
    "CEOtwt",
    "CEOtminD",
    "logRevwt",
    "logRevminD",
    "logEarnwt",
    "logEarnminD",
    "logEprofwt",
    "logEprofminD",
    "logMCapwt",
    "logMCapminD",
    "logTSRwt",
    "logTSRminD",
];

pub const DESIGN_COLUMNS: usize = DESIGN_LABELS.len();

/// Index of the `CEOtwt` column.
pub const CEO_WT_COLUMN: usize = 14;

const DUMMIES: [Industry; 5] = [
    Industry::Industrial,
    Industry::Health,
    Industry::Consumer,
    Industry::Energy,
    Industry::Tech,
];

#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub matrix: DMatrix<f64>,
    pub labels: Vec<&'static str>,
}

fn check_years(panel: &PanelDataset, start: i32, end: i32) -> Result<()> {
    for year in [start, end] {
        if !panel.contains_year(year) {
            return Err(Error::InvalidWindow(format!(
                "year {year} outside panel range {}..={}",
                panel.first_year(),
                panel.last_year()
            )));
        }
    }
    Ok(())
}

/// Builds the design over years `start ..= start + length - 1`.
///
/// Each row holds an intercept, five industry dummies (utility is the
/// reference), and a discounted average plus minimum yearly difference for each
/// of IR, EQ, MG, EPS, CEOtot and the five transformed responses. Responses are
/// transformed year by year before aggregation.
pub fn build_design(panel: &PanelDataset, start: i32, length: usize, config: &AggregationConfig) -> Result<Design> {
    config.validate()?;
    if length < 2 {
        return Err(Error::InvalidWindow(format!("window length {length} < 2")));
    }
    let end = start + length as i32 - 1;
    check_years(panel, start, end)?;
    let n = panel.n_companies();
    let mut m = DMatrix::zeros(n, DESIGN_COLUMNS);
    let mut series: Vec<Vec<f64>> = (0..10).map(|_| Vec::with_capacity(length)).collect();
    for c in 0..n {
        m[(c, 0)] = 1.0;
        let industry = panel.companies()[c].industry;
        for (k, d) in DUMMIES.iter().enumerate() {
            if industry == *d {
                m[(c, 1 + k)] = 1.0;
            }
        }
        for s in series.iter_mut() {
            s.clear();
        }
        for year in start..=end {
            let obs = panel.get(c, year)?;
            for (k, v) in obs.explanatory().into_iter().enumerate() {
                series[k].push(v);
            }
            for (k, v) in obs.responses().into_iter().enumerate() {
                series[5 + k].push(config.transform.apply(v));
            }
        }
        for (k, s) in series.iter().enumerate() {
            m[(c, 6 + 2 * k)] = discounted_avg(s, config.discount_rate)?;
            m[(c, 7 + 2 * k)] = min_diff(s)?;
        }
    }
    Ok(Design {
        matrix: m,
        labels: DESIGN_LABELS.to_vec(),
    })
}

/// Transformed responses of every company in `year`, one column per response.
pub fn response_matrix(panel: &PanelDataset, year: i32, config: &AggregationConfig) -> Result<DMatrix<f64>> {
    check_years(panel, year, year)?;
    let n = panel.n_companies();
    let mut m = DMatrix::zeros(n, NUM_RESPONSES);
    for c in 0..n {
        for (k, v) in panel.get(c, year)?.responses().into_iter().enumerate() {
            m[(c, k)] = config.transform.apply(v);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::panel::{Company, Observation};
    use crate::pipeline::transform::signed_log;

    fn constant_panel(industry: Industry) -> PanelDataset {
        let o = Observation {
            ir: 1.5,
            eq: 0.1,
            mg: 2.0,
            eps: -0.3,
            ceo_tot: 12.0,
            rev: 5000.0,
            earn: 400.0,
            eprof: -50.0,
            mcap: 9000.0,
            tsr: 0.5,
        };
        PanelDataset::new(
            vec![Company {
                id: "solo".into(),
                industry,
            }],
            2009,
            vec![vec![o; 7]],
        )
        .unwrap()
    }

    #[test]
    fn constant_series_design() {
        let p = constant_panel(Industry::Energy);
        let d = build_design(&p, 2009, 5, &AggregationConfig::default()).unwrap();
        assert_eq!(d.matrix.ncols(), 26);
        assert_eq!(d.labels, DESIGN_LABELS.to_vec());
        let row = d.matrix.row(0);
        assert_eq!(row[0], 1.0);
        assert_eq!(&row.iter().cloned().collect::<Vec<_>>()[1..6], &[0.0, 0.0, 0.0, 1.0, 0.0]);
        let expected_wt = [1.5, 0.1, 2.0, -0.3, 12.0, signed_log(5000.0), signed_log(400.0), signed_log(-50.0), signed_log(9000.0), 0.0];
        for (k, e) in expected_wt.iter().enumerate() {
            assert!((row[6 + 2 * k] - e).abs() < 1e-12, "column {}", DESIGN_LABELS[6 + 2 * k]);
            assert_eq!(row[7 + 2 * k], 0.0);
        }
    }

    #[test]
    fn utility_is_reference() {
        let p = constant_panel(Industry::Utility);
        let d = build_design(&p, 2010, 5, &AggregationConfig::default()).unwrap();
        assert!((1..6).all(|j| d.matrix[(0, j)] == 0.0));
    }

    #[test]
    fn out_of_range_window() {
        let p = constant_panel(Industry::Tech);
        assert!(build_design(&p, 2012, 5, &AggregationConfig::default()).is_err());
        assert!(response_matrix(&p, 2016, &AggregationConfig::default()).is_err());
    }
}
