//! Check loss, sample quantiles and weighted linear quantile regression.
//!
//! [`rq_fit`] solves the classical linear-programming form of the regression
//! quantile problem: coefficients are free, each residual is split into a
//! positive and a negative part priced at `w_i * tau` and `w_i * (1 - tau)`.
//! [`rq_subset_oracle`] is an independent brute-force route for small problems
//! that enumerates every exact-fit vertex.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::LinearProgram;

/// Observations with weight below this are treated as absent.
pub const ZERO_WEIGHT: f64 = 1e-12;

const ORACLE_MAX_ROWS: usize = 15;
const ORACLE_MAX_COLS: usize = 4;

/// A quantile level strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct QuantileLevel(f64);

impl QuantileLevel {
    pub const MEDIAN: QuantileLevel = QuantileLevel(0.5);

    pub fn new(tau: f64) -> Result<Self> {
        if tau > 0.0 && tau < 1.0 {
            Ok(Self(tau))
        } else {
            Err(Error::InvalidQuantile(tau))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The level `1 - tau`.
    pub fn complement(self) -> Self {
        Self(1.0 - self.0)
    }
}

impl std::fmt::Display for QuantileLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `rho_tau(u) = u * (tau - I(u < 0))`.
#[inline]
pub fn check_loss(u: f64, tau: QuantileLevel) -> f64 {
    if u < 0.0 {
        u * (tau.0 - 1.0)
    } else {
        u * tau.0
    }
}

/// Smallest minimiser of `sum_i w_i rho_tau(x_i - theta)`.
///
/// The minimiser is always one of the observed values: it is the smallest
/// value whose cumulative weight reaches `tau` times the total.
pub fn sample_quantile(values: &[f64], tau: QuantileLevel, weights: Option<&[f64]>) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let w: Vec<f64> = match weights {
        Some(w) => {
            if w.len() != values.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} values but {} weights",
                    values.len(),
                    w.len()
                )));
            }
            if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidWeights("weights must be finite and nonnegative".into()));
            }
            w.iter().map(|&v| if v < ZERO_WEIGHT { 0.0 } else { v }).collect()
        }
        None => vec![1.0; values.len()],
    };
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroTotalWeight);
    }
    let mut order: Vec<usize> = (0..values.len()).filter(|&i| w[i] > 0.0).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let target = tau.0 * total;
    let slack = 1e-12 * total;
    let mut cum = 0.0;
    let mut k = 0;
    while k < order.len() {
        // accumulate all copies of the same value together
        let v = values[order[k]];
        while k < order.len() && values[order[k]] == v {
            cum += w[order[k]];
            k += 1;
        }
        if cum >= target - slack {
            return Ok(v);
        }
    }
    Ok(values[*order.last().expect("nonempty")])
}

/// A weighted linear quantile regression problem.
#[derive(Debug, Clone)]
pub struct RegressionProblem {
    design: DMatrix<f64>,
    response: DVector<f64>,
    weights: DVector<f64>,
}

impl RegressionProblem {
    /// Unit-weight problem.
    pub fn new(design: DMatrix<f64>, response: DVector<f64>) -> Result<Self> {
        let n = design.nrows();
        Self::weighted(design, response, DVector::from_element(n, 1.0))
    }

    pub fn weighted(design: DMatrix<f64>, response: DVector<f64>, weights: DVector<f64>) -> Result<Self> {
        let (n, p) = design.shape();
        if n == 0 || p == 0 {
            return Err(Error::InvalidProblem(format!("design is {n}x{p}")));
        }
        if response.len() != n || weights.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "design has {n} rows, response {} and weights {}",
                response.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWeights("weights must be finite and nonnegative".into()));
        }
        if design.iter().chain(response.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("non-finite data".into()));
        }
        Ok(Self {
            design,
            response,
            weights,
        })
    }

    /// Same data, new weights.
    pub fn reweighted(&self, weights: DVector<f64>) -> Result<Self> {
        Self::weighted(self.design.clone(), self.response.clone(), weights)
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.design
    }

    pub fn response(&self) -> &DVector<f64> {
        &self.response
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn n(&self) -> usize {
        self.design.nrows()
    }

    pub fn p(&self) -> usize {
        self.design.ncols()
    }

    fn effective_weight(&self, i: usize) -> f64 {
        let w = self.weights[i];
        if w < ZERO_WEIGHT {
            0.0
        } else {
            w
        }
    }

    fn residual(&self, i: usize, coefficients: &DVector<f64>) -> f64 {
        self.response[i] - self.design.row(i).transpose().dot(coefficients)
    }
}

/// Fitted regression quantile.
#[derive(Debug, Clone)]
pub struct RqSolution {
    pub coefficients: DVector<f64>,
    pub objective: f64,
    /// Observations interpolated by the fit.
    pub active_rows: Vec<usize>,
}

fn solution_at(problem: &RegressionProblem, coefficients: DVector<f64>, tau: QuantileLevel) -> RqSolution {
    let mut objective = 0.0;
    let mut active_rows = Vec::new();
    for i in 0..problem.n() {
        let r = problem.residual(i, &coefficients);
        objective += problem.effective_weight(i) * check_loss(r, tau);
        if r.abs() <= 1e-9 * (1.0 + problem.response[i].abs()) {
            active_rows.push(i);
        }
    }
    RqSolution {
        coefficients,
        objective,
        active_rows,
    }
}

/// `sum_i w_i rho_tau(y_i - x_i'b)`.
pub fn rq_objective(problem: &RegressionProblem, coefficients: &DVector<f64>, tau: QuantileLevel) -> Result<f64> {
    if coefficients.len() != problem.p() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} columns",
            coefficients.len(),
            problem.p()
        )));
    }
    Ok((0..problem.n())
        .map(|i| problem.effective_weight(i) * check_loss(problem.residual(i, coefficients), tau))
        .sum())
}

/// Weighted regression quantile by linear programming.
pub fn rq_fit(problem: &RegressionProblem, tau: QuantileLevel) -> Result<RqSolution> {
    let p = problem.p();
    let rows: Vec<usize> = (0..problem.n())
        .filter(|&i| problem.effective_weight(i) > 0.0)
        .collect();
    let active = DMatrix::from_fn(rows.len(), p, |r, j| problem.design[(rows[r], j)]);
    if rows.len() < p || linalg::rank(&active) < p {
        return Err(Error::DegenerateDesign(format!(
            "{} positively weighted rows do not span {p} columns",
            rows.len()
        )));
    }
    let m = rows.len();
    let mut cost = vec![0.0; p + 2 * m];
    for (r, &i) in rows.iter().enumerate() {
        let w = problem.effective_weight(i);
        cost[p + r] = w * tau.0;
        cost[p + m + r] = w * (1.0 - tau.0);
    }
    let mut lp = LinearProgram::new(cost);
    for j in 0..p {
        lp.set_free(j);
    }
    for (r, &i) in rows.iter().enumerate() {
        let mut row = vec![0.0; p + 2 * m];
        for j in 0..p {
            row[j] = problem.design[(i, j)];
        }
        row[p + r] = 1.0;
        row[p + m + r] = -1.0;
        lp.add_eq(row, problem.response[i]);
    }
    let sol = lp.solve()?;
    let coefficients = DVector::from_iterator(p, sol.x[..p].iter().cloned());
    Ok(solution_at(problem, coefficients, tau))
}

/// Brute-force regression quantile: best exact fit through any `p` rows.
///
/// Guarded to `n <= 15` and `p <= 4`. Singular subsets are skipped.
pub fn rq_subset_oracle(problem: &RegressionProblem, tau: QuantileLevel) -> Result<RqSolution> {
    let (n, p) = (problem.n(), problem.p());
    if n > ORACLE_MAX_ROWS || p > ORACLE_MAX_COLS {
        return Err(Error::OracleTooLarge(format!(
            "n = {n}, p = {p}; limits are {ORACLE_MAX_ROWS} and {ORACLE_MAX_COLS}"
        )));
    }
    if n < p {
        return Err(Error::AllSubsetsSingular(0));
    }
    let mut best: Option<RqSolution> = None;
    let mut tried = 0;
    for subset in combinations(n, p) {
        tried += 1;
        let a = DMatrix::from_fn(p, p, |r, j| problem.design[(subset[r], j)]);
        let rhs = DVector::from_fn(p, |r, _| problem.response[subset[r]]);
        let row_norms: f64 = a.row_iter().map(|r| r.norm()).product();
        let det = a.clone().lu().determinant();
        if row_norms == 0.0 || det.abs() <= 1e-12 * row_norms {
            continue;
        }
        let Some(b) = a.lu().solve(&rhs) else { continue };
        let candidate = solution_at(problem, b, tau);
        if best.as_ref().is_none_or(|s| candidate.objective < s.objective - 1e-13 * (1.0 + s.objective)) {
            best = Some(candidate);
        }
    }
    best.ok_or(Error::AllSubsetsSingular(tried))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                current = Some(next);
                break;
            }
        }
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau(t: f64) -> QuantileLevel {
        QuantileLevel::new(t).unwrap()
    }

    #[test]
    fn level_bounds() {
        assert!(QuantileLevel::new(0.0).is_err());
        assert!(QuantileLevel::new(1.0).is_err());
        assert!(QuantileLevel::new(f64::NAN).is_err());
        assert_eq!(tau(0.25).complement().value(), 0.75);
    }

    #[test]
    fn check_loss_examples() {
        assert_eq!(check_loss(0.0, tau(0.3)), 0.0);
        assert_eq!(check_loss(2.0, tau(0.5)), 1.0);
        let c = 1.7;
        assert_eq!(check_loss(c, tau(0.75)) / check_loss(-c, tau(0.75)), 3.0);
    }

    #[test]
    fn sample_quantile_examples() {
        assert_eq!(sample_quantile(&[1.0, 2.0, 3.0], tau(0.5), None).unwrap(), 2.0);
        assert_eq!(sample_quantile(&[0.0, 1.0, 2.0, 3.0], tau(0.25), None).unwrap(), 0.0);
        assert_eq!(
            sample_quantile(&[1.0, 2.0, 3.0], tau(0.5), Some(&[1.0, 1.0, 10.0])).unwrap(),
            3.0
        );
        assert_eq!(sample_quantile(&[], tau(0.5), None), Err(Error::EmptySample));
        assert_eq!(
            sample_quantile(&[1.0], tau(0.5), Some(&[0.0])),
            Err(Error::ZeroTotalWeight)
        );
    }

    #[test]
    fn sample_quantile_is_the_smallest_enumerated_minimiser() {
        let xs = [3.0, -1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
        let ws = [0.5, 2.0, 1.0, 1.0, 0.25, 3.0, 1.0, 1.25];
        for t in [0.1, 0.25, 0.5, 0.6, 0.75, 0.9] {
            let obj = |th: f64| -> f64 {
                xs.iter().zip(&ws).map(|(x, w)| w * check_loss(x - th, tau(t))).sum()
            };
            let min = xs.iter().map(|&x| obj(x)).fold(f64::INFINITY, f64::min);
            let smallest = xs
                .iter()
                .cloned()
                .filter(|&x| obj(x) <= min + 1e-12)
                .fold(f64::INFINITY, f64::min);
            assert_eq!(sample_quantile(&xs, tau(t), Some(&ws)).unwrap(), smallest);
        }
    }

    #[test]
    fn interpolation_when_n_equals_p() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]);
        let y = DVector::from_vec(vec![0.0, 1.0]);
        let pr = RegressionProblem::new(x, y).unwrap();
        let fit = rq_fit(&pr, tau(0.5)).unwrap();
        assert!(fit.objective.abs() < 1e-14);
        assert!(fit.coefficients[0].abs() < 1e-12);
        assert!((fit.coefficients[1] - 1.0).abs() < 1e-12);
        assert_eq!(fit.active_rows, vec![0, 1]);
        let oracle = rq_subset_oracle(&pr, tau(0.5)).unwrap();
        assert!(oracle.objective.abs() < 1e-14);
    }

    #[test]
    fn intercept_only_matches_sample_quantile() {
        let y = vec![4.0, -1.0, 2.5, 7.0, 3.0, 0.5, 9.0];
        let pr = RegressionProblem::new(DMatrix::from_element(7, 1, 1.0), DVector::from_vec(y.clone())).unwrap();
        for t in [0.2, 0.5, 0.75] {
            let fit = rq_fit(&pr, tau(t)).unwrap();
            let q = sample_quantile(&y, tau(t), None).unwrap();
            assert!((fit.coefficients[0] - q).abs() < 1e-12, "tau {t}");
        }
        let small = RegressionProblem::new(DMatrix::from_element(3, 1, 1.0), DVector::from_vec(vec![1.0, 2.0, 3.0])).unwrap();
        assert_eq!(rq_subset_oracle(&small, tau(0.5)).unwrap().coefficients[0], 2.0);
    }

    #[test]
    fn objective_examples() {
        let pr = RegressionProblem::new(DMatrix::from_element(1, 1, 1.0), DVector::from_vec(vec![2.0])).unwrap();
        assert_eq!(rq_objective(&pr, &DVector::from_vec(vec![2.0]), tau(0.5)).unwrap(), 0.0);
        assert_eq!(rq_objective(&pr, &DVector::from_vec(vec![0.0]), tau(0.5)).unwrap(), 1.0);
        assert!(rq_objective(&pr, &DVector::from_vec(vec![0.0, 1.0]), tau(0.5)).is_err());

        let pr = RegressionProblem::new(DMatrix::from_element(2, 1, 1.0), DVector::from_vec(vec![1.0, -1.0])).unwrap();
        assert_eq!(rq_objective(&pr, &DVector::from_vec(vec![0.0]), tau(0.75)).unwrap(), 1.0);
    }

    #[test]
    fn zero_weight_rows_drop_out() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = DVector::from_vec(vec![0.0, 1.0, 2.0, 100.0]);
        let w = DVector::from_vec(vec![1.0, 1.0, 1.0, 1e-13]);
        let pr = RegressionProblem::weighted(x, y, w).unwrap();
        let fit = rq_fit(&pr, tau(0.5)).unwrap();
        assert!(fit.objective.abs() < 1e-12);
        assert!((fit.coefficients[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deficient_design_is_rejected() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
        let y = DVector::from_vec(vec![0.0, 1.0, 2.0]);
        let pr = RegressionProblem::new(x.clone(), y.clone()).unwrap();
        assert!(matches!(rq_fit(&pr, tau(0.5)), Err(Error::DegenerateDesign(_))));
        assert!(matches!(rq_subset_oracle(&pr, tau(0.5)), Err(Error::AllSubsetsSingular(3))));

        let x = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
        let w = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let pr = RegressionProblem::weighted(x, y, w).unwrap();
        assert!(matches!(rq_fit(&pr, tau(0.5)), Err(Error::DegenerateDesign(_))));
    }

    #[test]
    fn combinations_enumerate_lexicographically() {
        let all: Vec<_> = combinations(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(combinations(3, 3).count(), 1);
        assert_eq!(combinations(2, 3).count(), 0);
    }
}
