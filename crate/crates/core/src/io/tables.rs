//! Report tables: full-precision CSVs and 3-decimal text tables.
//!
//! Windows are labelled by the year they predict. Every CSV carries a `tau`
//! column so one file holds all quantile levels of a run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::pipeline::{Metrics, PredictionReport, Predictor, DESIGN_LABELS, NUM_RESPONSES, RESPONSE_LABELS};
use crate::quantile::QuantileLevel;

/// Which metric a table shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Mae,
    Rmse,
    RhoLoss,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::Mae, MetricKind::Rmse, MetricKind::RhoLoss];

    pub fn file_name(self) -> &'static str {
        match self {
            MetricKind::Mae => "mae.csv",
            MetricKind::Rmse => "rmse.csv",
            MetricKind::RhoLoss => "rho_loss.csv",
        }
    }

    fn pick(self, m: &Metrics) -> f64 {
        match self {
            MetricKind::Mae => m.mae,
            MetricKind::Rmse => m.rmse,
            MetricKind::RhoLoss => m.rho_tau_loss,
        }
    }
}

/// Label of a predictor in the text tables.
pub fn display_name(p: Predictor, tau: QuantileLevel) -> &'static str {
    match p {
        Predictor::IndexRq if tau == QuantileLevel::MEDIAN => "Index",
        Predictor::IndexRq => "rq.can",
        Predictor::CcaLs => "cancor",
        Predictor::CeoRq => "CEOrq",
        Predictor::CeoLs => "CEOls",
    }
}

/// Full-precision, round-trippable rendering.
pub(crate) fn num(x: f64) -> String {
    format!("{x}")
}

/// Three decimals, without a negative sign on values that round to zero.
pub fn fmt3(x: f64) -> String {
    let s = format!("{x:.3}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub(crate) fn write_rows(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = writer(path)?;
    let io = |e: csv::Error| Error::Io(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn window_label(r: &PredictionReport, k: usize) -> String {
    r.windows[k].spec.apply_target().to_string()
}

/// `tau,window,logRev,...` with one row per window.
pub fn alpha_rows(reports: &[PredictionReport]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = strings(&["tau", "window"]);
    header.extend(strings(&RESPONSE_LABELS));
    let mut rows = Vec::new();
    for r in reports {
        for (k, w) in r.windows.iter().enumerate() {
            let mut row = vec![num(r.tau.value()), window_label(r, k)];
            row.extend(w.fit.alpha.iter().map(|&a| num(a)));
            rows.push(row);
        }
    }
    (header, rows)
}

/// `tau,window,label,beta,se,t` with one row per design column and window.
pub fn beta_rows(reports: &[PredictionReport]) -> (Vec<String>, Vec<Vec<String>>) {
    let header = strings(&["tau", "window", "label", "beta", "se", "t"]);
    let mut rows = Vec::new();
    for r in reports {
        for (k, w) in r.windows.iter().enumerate() {
            for (j, label) in DESIGN_LABELS.iter().enumerate() {
                rows.push(vec![
                    num(r.tau.value()),
                    window_label(r, k),
                    label.to_string(),
                    num(w.fit.beta[j]),
                    num(w.beta_se[j]),
                    num(w.beta_t[j]),
                ]);
            }
        }
    }
    (header, rows)
}

/// `tau,window,predictor,logRev,logRev_se,...`; per-window rows followed by a
/// `pooled` row per predictor holding the mean over windows and its SE.
pub fn metric_rows(reports: &[PredictionReport], kind: MetricKind) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = strings(&["tau", "window", "predictor"]);
    for l in RESPONSE_LABELS {
        header.push(l.to_string());
        header.push(format!("{l}_se"));
    }
    let mut rows = Vec::new();
    for r in reports {
        for (k, w) in r.windows.iter().enumerate() {
            for p in Predictor::ALL {
                let mut row = vec![num(r.tau.value()), window_label(r, k), p.key().to_string()];
                for j in 0..NUM_RESPONSES {
                    row.push(num(kind.pick(&w.metrics[j][p.position()])));
                    row.push(num(kind.pick(&w.metric_se[j][p.position()])));
                }
                rows.push(row);
            }
        }
        for p in Predictor::ALL {
            let mut row = vec![num(r.tau.value()), "pooled".to_string(), p.key().to_string()];
            for j in 0..NUM_RESPONSES {
                let (mean, se) = r.pooled(j, p);
                row.push(num(kind.pick(&mean)));
                row.push(num(kind.pick(&se)));
            }
            rows.push(row);
        }
    }
    (header, rows)
}

/// One row per window and response of the joint Index + CEOtot median regression.
pub fn joint_rows(reports: &[PredictionReport]) -> (Vec<String>, Vec<Vec<String>>) {
    let header = strings(&[
        "tau",
        "window",
        "response",
        "coef_index",
        "se_index",
        "t_index",
        "coef_ceo",
        "se_ceo",
        "t_ceo",
        "collinear",
    ]);
    let mut rows = Vec::new();
    for r in reports {
        for (k, w) in r.windows.iter().enumerate() {
            for (j, e) in w.joint.iter().enumerate() {
                rows.push(vec![
                    num(r.tau.value()),
                    window_label(r, k),
                    RESPONSE_LABELS[j].to_string(),
                    num(e.coef_index),
                    num(e.se_index),
                    num(e.t_index),
                    num(e.coef_ceo),
                    num(e.se_ceo),
                    num(e.t_ceo),
                    e.collinear.to_string(),
                ]);
            }
        }
    }
    (header, rows)
}

/// Writes alpha.csv, beta.csv, mae.csv, rmse.csv, rho_loss.csv and
/// joint_tstats.csv into `dir`.
pub fn write_tables(reports: &[PredictionReport], dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let mut emit = |name: &str, (header, rows): (Vec<String>, Vec<Vec<String>>)| -> Result<()> {
        let path = dir.join(name);
        write_rows(&path, &header, &rows)?;
        files.push(path);
        Ok(())
    };
    emit("alpha.csv", alpha_rows(reports))?;
    emit("beta.csv", beta_rows(reports))?;
    for kind in MetricKind::ALL {
        emit(kind.file_name(), metric_rows(reports, kind))?;
    }
    emit("joint_tstats.csv", joint_rows(reports))?;
    Ok(files)
}

fn table(out: &mut String, title: &str, header: &[String], rows: &[Vec<String>]) {
    let cols = header.len();
    let mut width = vec![0; cols];
    for r in std::iter::once(header).chain(rows.iter().map(|r| r.as_slice())) {
        for (c, cell) in r.iter().enumerate() {
            width[c] = width[c].max(cell.len());
        }
    }
    let line = |out: &mut String, r: &[String]| {
        let mut s = String::new();
        for (c, cell) in r.iter().enumerate() {
            if c == 0 {
                let _ = write!(s, "{cell:<w$}", w = width[c]);
            } else {
                let _ = write!(s, "  {cell:>w$}", w = width[c]);
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    let rule = "-".repeat(width.iter().sum::<usize>() + 2 * (cols - 1));
    out.push_str(title);
    out.push('\n');
    out.push_str(&rule);
    out.push('\n');
    line(out, header);
    out.push_str(&rule);
    out.push('\n');
    for r in rows {
        line(out, r);
    }
    out.push_str(&rule);
    out.push_str("\n\n");
}

fn with_labels(first: &str) -> Vec<String> {
    let mut h = vec![first.to_string()];
    h.extend(strings(&RESPONSE_LABELS));
    h
}

fn metric_table(out: &mut String, r: &PredictionReport, kind: MetricKind, title: &str, predictors: &[Predictor]) {
    let rows: Vec<Vec<String>> = predictors
        .iter()
        .map(|&p| {
            let mut row = vec![display_name(p, r.tau).to_string()];
            for j in 0..NUM_RESPONSES {
                let (mean, se) = r.pooled(j, p);
                row.push(format!("{} ({})", fmt3(kind.pick(&mean)), fmt3(kind.pick(&se))));
            }
            row
        })
        .collect();
    table(out, title, &with_labels("Method"), &rows);
}

fn years(r: &PredictionReport) -> String {
    let ys: Vec<String> = r.windows.iter().map(|w| w.spec.apply_target().to_string()).collect();
    ys.join("-")
}

/// Human-readable tables laid out like the published ones, for every level.
pub fn render_text_tables(reports: &[PredictionReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(out, "=== tau = {} ===\n", r.tau);

        let rows: Vec<Vec<String>> = r
            .windows
            .iter()
            .map(|w| {
                let mut row = vec![w.spec.apply_target().to_string()];
                row.extend(w.fit.alpha.iter().map(|&a| fmt3(a)));
                row
            })
            .collect();
        table(&mut out, "alpha coefficients for Index", &with_labels("year"), &rows);

        let mut header = vec![String::new()];
        for w in &r.windows {
            header.push(w.spec.apply_target().to_string());
            header.push("t-stat".to_string());
        }
        let rows: Vec<Vec<String>> = DESIGN_LABELS
            .iter()
            .enumerate()
            .map(|(j, label)| {
                let mut row = vec![label.to_string()];
                for w in &r.windows {
                    row.push(fmt3(w.fit.beta[j]));
                    row.push(fmt3(w.beta_t[j]));
                }
                row
            })
            .collect();
        table(&mut out, "Beta coefficients for Index", &header, &rows);

        let yrs = years(r);
        if r.tau == QuantileLevel::MEDIAN {
            let shown = [Predictor::CcaLs, Predictor::IndexRq, Predictor::CeoRq];
            metric_table(&mut out, r, MetricKind::Mae, &format!("MAE: {yrs} mean (SD)"), &shown);
        } else {
            let shown = [Predictor::CcaLs, Predictor::IndexRq, Predictor::CeoRq, Predictor::CeoLs];
            metric_table(&mut out, r, MetricKind::Mae, &format!("MAE for {} quantile: {yrs} mean (SD)", r.tau), &shown);
            metric_table(
                &mut out,
                r,
                MetricKind::RhoLoss,
                &format!("{} quantile objective function: {yrs} mean (SD)", r.tau),
                &shown,
            );
        }
        metric_table(
            &mut out,
            r,
            MetricKind::Rmse,
            &format!("RMSE: {yrs} mean (SD)"),
            &[Predictor::CcaLs, Predictor::IndexRq, Predictor::CeoRq, Predictor::CeoLs],
        );

        let mut rows = Vec::new();
        for w in &r.windows {
            let yy = w.spec.apply_end().rem_euclid(100);
            let mut head = vec![w.spec.apply_target().to_string()];
            head.extend(std::iter::repeat_n(String::new(), NUM_RESPONSES));
            rows.push(head);
            let mut idx = vec![format!("Index{yy:02}")];
            let mut ceo = vec![format!("CEO{yy:02}")];
            for e in &w.joint {
                let cell = |t: f64| if e.collinear { "collinear".to_string() } else { format!("{t:.2}") };
                idx.push(cell(e.t_index));
                ceo.push(cell(e.t_ceo));
            }
            rows.push(idx);
            rows.push(ceo);
        }
        table(&mut out, "t-statistics for CEOtot and Index", &with_labels(""), &rows);
    }
    out
}
