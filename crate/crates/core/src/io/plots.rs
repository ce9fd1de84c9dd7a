//! Scatter and Q-Q plot data with small static SVG renderings.
//!
//! * fig1: response index against the prediction index and against CEOtot
//! * fig2: each transformed response against the prediction index and CEOtot
//! * fig3: sorted fitted against sorted observed values per response
//!
//! Fitted lines are quantile regressions at the report's level. The CSVs
//! cover every level and window; the SVGs show the first window of the first
//! report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::tables::{num, write_rows};
use crate::error::{Error, Result};
use crate::pipeline::window::rq_line;
use crate::pipeline::{Line, PanelDataset, PredictionReport, Predictor, WindowReport, NUM_RESPONSES, RESPONSE_LABELS};
use crate::quantile::QuantileLevel;

/// Points of one scatter panel.
#[derive(Debug, Clone, PartialEq)]
pub struct Scatter {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub line: Line,
}

/// Response index against the prediction index and against CEOtot.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure1 {
    pub index: Scatter,
    pub ceo: Scatter,
}

/// Per-response scatters; `index[j]` uses the prediction lines of the window.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure2 {
    pub index: Vec<Scatter>,
    pub ceo: Vec<Scatter>,
}

/// Sorted fitted and sorted observed values.
#[derive(Debug, Clone, PartialEq)]
pub struct QqPairs {
    pub fitted: Vec<f64>,
    pub observed: Vec<f64>,
}

/// Q-Q pairs per response for the index and the CEOtot quantile regression.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure3 {
    pub index: Vec<QqPairs>,
    pub ceo: Vec<QqPairs>,
}

fn to_vec(v: &nalgebra::DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

pub fn figure1(w: &WindowReport, tau: QuantileLevel) -> Result<Figure1> {
    let ones = nalgebra::DVector::from_element(w.index.response_index.len(), 1.0);
    let y = &w.index.response_index;
    let x = &w.index.predictive_index;
    let ceo = &w.baselines.ceo;
    Ok(Figure1 {
        index: Scatter {
            x: to_vec(x),
            y: to_vec(y),
            line: rq_line(x, y, tau, &ones)?,
        },
        ceo: Scatter {
            x: to_vec(ceo),
            y: to_vec(y),
            line: rq_line(ceo, y, tau, &ones)?,
        },
    })
}

pub fn figure2(w: &WindowReport) -> Figure2 {
    let obs = &w.index.observed;
    let scatter = |x: &nalgebra::DVector<f64>, j: usize, line: Line| Scatter {
        x: to_vec(x),
        y: obs.column(j).iter().copied().collect(),
        line,
    };
    Figure2 {
        index: (0..NUM_RESPONSES)
            .map(|j| scatter(&w.index.predictive_index, j, w.index.lines[j]))
            .collect(),
        ceo: (0..NUM_RESPONSES)
            .map(|j| scatter(&w.baselines.ceo, j, w.baselines.ceo_rq_lines[j]))
            .collect(),
    }
}

pub fn qq_pairs(fitted: &[f64], observed: &[f64]) -> QqPairs {
    let mut f = fitted.to_vec();
    let mut o = observed.to_vec();
    f.sort_by(f64::total_cmp);
    o.sort_by(f64::total_cmp);
    QqPairs { fitted: f, observed: o }
}

pub fn figure3(w: &WindowReport) -> Figure3 {
    let obs = &w.index.observed;
    let qq = |pred: &nalgebra::DMatrix<f64>, j: usize| qq_pairs(pred.column(j).as_slice(), obs.column(j).as_slice());
    Figure3 {
        index: (0..NUM_RESPONSES).map(|j| qq(&w.index.predicted, j)).collect(),
        ceo: (0..NUM_RESPONSES).map(|j| qq(&w.baselines.ceo_rq, j)).collect(),
    }
}

/// Writes fig1/fig2/fig3 CSV and SVG files plus fig_lines.csv into `dir`.
pub fn emit_plot_data(reports: &[PredictionReport], panel: &PanelDataset, dir: &Path) -> Result<Vec<PathBuf>> {
    let ids: Vec<&str> = panel.companies().iter().map(|c| c.id.as_str()).collect();
    let mut f1 = Vec::new();
    let mut f2 = Vec::new();
    let mut f3 = Vec::new();
    let mut lines = Vec::new();
    let mut first = None;
    for r in reports {
        let tau = num(r.tau.value());
        for w in &r.windows {
            let win = w.spec.apply_target().to_string();
            if w.index.response_index.len() != ids.len() {
                return Err(Error::DimensionMismatch(format!(
                    "window {win} has {} companies, panel has {}",
                    w.index.response_index.len(),
                    ids.len()
                )));
            }
            let fig1 = figure1(w, r.tau)?;
            let fig2 = figure2(w);
            let fig3 = figure3(w);
            for (i, id) in ids.iter().enumerate() {
                f1.push(vec![
                    tau.clone(),
                    win.clone(),
                    id.to_string(),
                    num(fig1.index.x[i]),
                    num(fig1.ceo.x[i]),
                    num(fig1.index.y[i]),
                ]);
            }
            let mut line_row = |fig: &str, panel: &str, pred: &str, l: &Line| {
                lines.push(vec![
                    tau.clone(),
                    win.clone(),
                    fig.to_string(),
                    panel.to_string(),
                    pred.to_string(),
                    num(l.intercept),
                    num(l.slope),
                ]);
            };
            line_row("fig1", "response_index", "index", &fig1.index.line);
            line_row("fig1", "response_index", "ceo", &fig1.ceo.line);
            for j in 0..NUM_RESPONSES {
                line_row("fig2", RESPONSE_LABELS[j], "index", &fig2.index[j].line);
                line_row("fig2", RESPONSE_LABELS[j], "ceo", &fig2.ceo[j].line);
                for (i, id) in ids.iter().enumerate() {
                    f2.push(vec![
                        tau.clone(),
                        win.clone(),
                        id.to_string(),
                        RESPONSE_LABELS[j].to_string(),
                        num(fig2.index[j].x[i]),
                        num(fig2.ceo[j].x[i]),
                        num(fig2.index[j].y[i]),
                    ]);
                }
                for (pred, qq) in [(Predictor::IndexRq, &fig3.index[j]), (Predictor::CeoRq, &fig3.ceo[j])] {
                    for i in 0..qq.fitted.len() {
                        f3.push(vec![
                            tau.clone(),
                            win.clone(),
                            RESPONSE_LABELS[j].to_string(),
                            pred.key().to_string(),
                            (i + 1).to_string(),
                            num(qq.fitted[i]),
                            num(qq.observed[i]),
                        ]);
                    }
                }
            }
            if first.is_none() {
                first = Some((win.clone(), r.tau, fig1, fig2, fig3));
            }
        }
    }

    let header = |h: &[&str]| h.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let mut files = Vec::new();
    let mut csv = |name: &str, h: &[&str], rows: &[Vec<String>]| -> Result<()> {
        let path = dir.join(name);
        write_rows(&path, &header(h), rows)?;
        files.push(path);
        Ok(())
    };
    csv(
        "fig1.csv",
        &["tau", "window", "company_id", "prediction_index", "ceo", "response_index"],
        &f1,
    )?;
    csv(
        "fig2.csv",
        &["tau", "window", "company_id", "response", "prediction_index", "ceo", "observed"],
        &f2,
    )?;
    csv(
        "fig3.csv",
        &["tau", "window", "response", "predictor", "rank", "fitted", "observed"],
        &f3,
    )?;
    csv(
        "fig_lines.csv",
        &["tau", "window", "figure", "panel", "predictor", "intercept", "slope"],
        &lines,
    )?;

    let Some((win, tau, fig1, fig2, fig3)) = first else {
        return Err(Error::InvalidProblem("no windows to plot".into()));
    };
    let title = format!("{win}, tau = {tau}");
    let svgs = [
        (
            "fig1.svg",
            render(
                &format!("{title}: response index vs. prediction index and CEOtot"),
                1,
                vec![
                    Panel::scatter("prediction index", "response index", &fig1.index),
                    Panel::scatter("CEOtot", "response index", &fig1.ceo),
                ],
            ),
        ),
        (
            "fig2.svg",
            render(
                &format!("{title}: responses vs. prediction index and CEOtot"),
                2,
                (0..NUM_RESPONSES)
                    .flat_map(|j| {
                        [
                            Panel::scatter("prediction index", RESPONSE_LABELS[j], &fig2.index[j]),
                            Panel::scatter("CEOtot", RESPONSE_LABELS[j], &fig2.ceo[j]),
                        ]
                    })
                    .collect(),
            ),
        ),
        (
            "fig3.svg",
            render(
                &format!("{title}: Q-Q plot, fit vs. response"),
                2,
                (0..NUM_RESPONSES)
                    .flat_map(|j| {
                        [
                            Panel::qq(&format!("{} Index fit", RESPONSE_LABELS[j]), RESPONSE_LABELS[j], &fig3.index[j]),
                            Panel::qq(&format!("{} CEOrq fit", RESPONSE_LABELS[j]), RESPONSE_LABELS[j], &fig3.ceo[j]),
                        ]
                    })
                    .collect(),
            ),
        ),
    ];
    for (name, svg) in svgs {
        let path = dir.join(name);
        std::fs::write(&path, svg).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        files.push(path);
    }
    Ok(files)
}

struct Panel {
    xlabel: String,
    ylabel: String,
    x: Vec<f64>,
    y: Vec<f64>,
    line: Option<Line>,
}

impl Panel {
    fn scatter(xlabel: &str, ylabel: &str, s: &Scatter) -> Self {
        Self {
            xlabel: xlabel.into(),
            ylabel: ylabel.into(),
            x: s.x.clone(),
            y: s.y.clone(),
            line: Some(s.line),
        }
    }

    fn qq(xlabel: &str, ylabel: &str, q: &QqPairs) -> Self {
        Self {
            xlabel: xlabel.into(),
            ylabel: ylabel.into(),
            x: q.fitted.clone(),
            y: q.observed.clone(),
            line: Some(Line {
                intercept: 0.0,
                slope: 1.0,
            }),
        }
    }
}

const PANEL_W: f64 = 320.0;
const PANEL_H: f64 = 240.0;
const MARGIN: f64 = 40.0;

fn range(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn render(title: &str, cols: usize, panels: Vec<Panel>) -> String {
    let rows = panels.len().div_ceil(cols);
    let width = cols as f64 * PANEL_W;
    let height = 30.0 + rows as f64 * PANEL_H;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="13">{}</text>"#,
        width / 2.0,
        escape(title)
    );
    for (k, p) in panels.iter().enumerate() {
        let ox = (k % cols) as f64 * PANEL_W;
        let oy = 30.0 + (k / cols) as f64 * PANEL_H;
        draw_panel(&mut s, p, ox, oy);
    }
    s.push_str("</svg>\n");
    s
}

fn draw_panel(s: &mut String, p: &Panel, ox: f64, oy: f64) {
    let (x0, x1) = range(&p.x);
    let (y0, y1) = range(&p.y);
    let left = ox + MARGIN;
    let right = ox + PANEL_W - 10.0;
    let top = oy + 10.0;
    let bottom = oy + PANEL_H - MARGIN;
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
    let sy = |y: f64| bottom - (y - y0) / (y1 - y0) * (bottom - top);
    let _ = writeln!(
        s,
        r#"<rect x="{left:.1}" y="{top:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );
    for (v, x) in [(x0, left), (x1, right)] {
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{v:.2}</text>"#,
            bottom + 12.0
        );
    }
    for (v, y) in [(y0, bottom), (y1, top)] {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.2}</text>"#,
            left - 3.0,
            y + 3.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        bottom + 26.0,
        escape(&p.xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
        ox + 10.0,
        (top + bottom) / 2.0,
        ox + 10.0,
        (top + bottom) / 2.0,
        escape(&p.ylabel)
    );
    for (&x, &y) in p.x.iter().zip(&p.y) {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.1}" cy="{:.1}" r="2" fill="steelblue" fill-opacity="0.7"/>"#,
            sx(x),
            sy(y)
        );
    }
    if let Some(l) = p.line {
        if let Some(((ax, ay), (bx, by))) = clip_line(l, (x0, x1), (y0, y1)) {
            let _ = writeln!(
                s,
                r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="firebrick" stroke-width="1.5"/>"#,
                sx(ax),
                sy(ay),
                sx(bx),
                sy(by)
            );
        }
    }
}

/// Segment of `l` inside the box, if any.
fn clip_line(l: Line, (x0, x1): (f64, f64), (y0, y1): (f64, f64)) -> Option<((f64, f64), (f64, f64))> {
    let (mut a, mut b) = (x0, x1);
    if l.slope.abs() > 1e-300 {
        let ta = (y0 - l.intercept) / l.slope;
        let tb = (y1 - l.intercept) / l.slope;
        a = a.max(ta.min(tb));
        b = b.min(ta.max(tb));
    } else if !(y0..=y1).contains(&l.intercept) {
        return None;
    }
    (a < b).then(|| ((a, l.at(a)), (b, l.at(b))))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qq_is_sorted() {
        let q = qq_pairs(&[3.0, -1.0, 2.0], &[0.5, 9.0, -4.0]);
        assert_eq!(q.fitted, vec![-1.0, 2.0, 3.0]);
        assert_eq!(q.observed, vec![-4.0, 0.5, 9.0]);
    }

    #[test]
    fn clipping() {
        let l = Line {
            intercept: 0.0,
            slope: 1.0,
        };
        let ((ax, ay), (bx, by)) = clip_line(l, (-10.0, 10.0), (0.0, 1.0)).unwrap();
        assert_eq!((ax, ay, bx, by), (0.0, 0.0, 1.0, 1.0));
        let flat = Line {
            intercept: 5.0,
            slope: 0.0,
        };
        assert!(clip_line(flat, (0.0, 1.0), (0.0, 1.0)).is_none());
    }

    #[test]
    fn svg_is_well_formed_text() {
        let s = Scatter {
            x: vec![0.0, 1.0, 2.0],
            y: vec![1.0, 2.0, 2.5],
            line: Line {
                intercept: 1.0,
                slope: 0.8,
            },
        };
        let svg = render("a < b", 2, vec![Panel::scatter("x", "y", &s)]);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("a &lt; b"));
    }
}
