//! Canonical regression quantiles.
//!
//! The canonical fit is the pair `(alpha, beta)` minimising
//!
//! ```text
//! sum_i w_i rho_tau(x_i'beta - y_i'alpha)
//! ```
//!
//! with the residual taken as fit minus response. Without a normalisation on
//! `alpha` the objective is scale invariant, so `alpha` is restricted either to
//! the unit simplex (`sum alpha_j = 1`, `alpha_j >= 0`) or to the L1 sphere
//! (`sum |alpha_j| = 1`). Both are solved exactly as linear programs: the simplex
//! version directly, the L1 version as one sign-constrained program per orthant.
//!
//! Whenever a fit needs to be compared with an ordinary response-minus-fit
//! regression quantile the level flips to `1 - tau`, since
//! `rho_tau(-u) = rho_{1-tau}(u)`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lp::LinearProgram;
use crate::quantile::{check_loss, rq_fit, QuantileLevel, RegressionProblem, RqSolution, ZERO_WEIGHT};

/// Largest response count accepted by [`canonical_rq_l1`].
pub const MAX_ORTHANT_RESPONSES: usize = 12;

#[derive(Debug, Clone)]
pub struct CanonicalProblem {
    design: DMatrix<f64>,
    responses: DMatrix<f64>,
    tau: QuantileLevel,
    weights: DVector<f64>,
}

impl CanonicalProblem {
    pub fn new(design: DMatrix<f64>, responses: DMatrix<f64>, tau: QuantileLevel) -> Result<Self> {
        let n = design.nrows();
        Self::weighted(design, responses, tau, DVector::from_element(n, 1.0))
    }

    pub fn weighted(
        design: DMatrix<f64>,
        responses: DMatrix<f64>,
        tau: QuantileLevel,
        weights: DVector<f64>,
    ) -> Result<Self> {
        let (n, p) = design.shape();
        let q = responses.ncols();
        if n == 0 || p == 0 || q == 0 {
            return Err(Error::InvalidProblem(format!(
                "need n, p, q >= 1; got n = {n}, p = {p}, q = {q}"
            )));
        }
        if responses.nrows() != n || weights.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "design has {n} rows, responses {} and weights {}",
                responses.nrows(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWeights("weights must be finite and nonnegative".into()));
        }
        if design.iter().chain(responses.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("non-finite data".into()));
        }
        for j in 0..q {
            if responses.column(j).iter().all(|v| *v == 0.0) {
                return Err(Error::InvalidProblem(format!("response column {j} is identically zero")));
            }
        }
        if n <= p + q {
            log::warn!("canonical problem with n = {n} <= p + q = {}: alpha is poorly identified", p + q);
        }
        Ok(Self {
            design,
            responses,
            tau,
            weights,
        })
    }

    pub fn reweighted(&self, weights: DVector<f64>) -> Result<Self> {
        Self::weighted(self.design.clone(), self.responses.clone(), self.tau, weights)
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.design
    }

    pub fn responses(&self) -> &DMatrix<f64> {
        &self.responses
    }

    pub fn tau(&self) -> QuantileLevel {
        self.tau
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

    pub fn q(&self) -> usize {
        self.responses.ncols()
    }

    /// `sum_i w_i rho_tau(x_i'beta - y_i'alpha)`.
    pub fn objective(&self, alpha: &DVector<f64>, beta: &DVector<f64>) -> Result<f64> {
        if alpha.len() != self.q() || beta.len() != self.p() {
            return Err(Error::DimensionMismatch(format!(
                "alpha has {} entries for {} responses, beta {} for {} columns",
                alpha.len(),
                self.q(),
                beta.len(),
                self.p()
            )));
        }
        let fit = &self.design * beta;
        let resp = &self.responses * alpha;
        Ok((0..self.n())
            .map(|i| {
                let w = self.weights[i];
                if w < ZERO_WEIGHT {
                    0.0
                } else {
                    w * check_loss(fit[i] - resp[i], self.tau)
                }
            })
            .sum())
    }

    /// Best `beta` for a fixed `alpha`: an ordinary regression quantile of
    /// `Y alpha` on `X` at level `1 - tau`.
    pub fn beta_given_alpha(&self, alpha: &DVector<f64>) -> Result<RqSolution> {
        let y = &self.responses * alpha;
        let pr = RegressionProblem::weighted(self.design.clone(), y, self.weights.clone())?;
        rq_fit(&pr, self.tau.complement())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// `sum alpha_j = 1`, `alpha_j >= 0`.
    Simplex,
    /// `sum |alpha_j| = 1`.
    L1Sign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalFit {
    pub alpha: DVector<f64>,
    pub beta: DVector<f64>,
    pub objective: f64,
    pub constraint_kind: ConstraintKind,
}

impl CanonicalFit {
    /// Predictive index `X beta` on new rows.
    pub fn predictive_index(&self, design: &DMatrix<f64>) -> Result<DVector<f64>> {
        make_index(design, &self.beta)
    }

    /// Response index `Y alpha` on new rows.
    pub fn response_index(&self, responses: &DMatrix<f64>) -> Result<DVector<f64>> {
        make_index(responses, &self.alpha)
    }
}

/// Solves the canonical program with `alpha_j = signs_j * a_j`, `a` on the simplex.
fn solve_orthant(problem: &CanonicalProblem, signs: &[f64]) -> Result<(DVector<f64>, DVector<f64>)> {
    let (p, q) = (problem.p(), problem.q());
    let tau = problem.tau.value();
    let rows: Vec<usize> = (0..problem.n())
        .filter(|&i| problem.weights[i] >= ZERO_WEIGHT)
        .collect();
    let m = rows.len();
    let nv = p + q + 2 * m;

    // variables: beta (free) | a (>= 0) | u+ | u-
    let mut cost = vec![0.0; nv];
    for (r, &i) in rows.iter().enumerate() {
        let w = problem.weights[i];
        cost[p + q + r] = w * tau;
        cost[p + q + m + r] = w * (1.0 - tau);
    }
    let mut lp = LinearProgram::new(cost);
    for j in 0..p {
        lp.set_free(j);
    }
    for (r, &i) in rows.iter().enumerate() {
        let mut row = vec![0.0; nv];
        for j in 0..p {
            row[j] = problem.design[(i, j)];
        }
        for j in 0..q {
            row[p + j] = -signs[j] * problem.responses[(i, j)];
        }
        row[p + q + r] = -1.0;
        row[p + q + m + r] = 1.0;
        lp.add_eq(row, 0.0);
    }
    let mut norm = vec![0.0; nv];
    for v in norm.iter_mut().skip(p).take(q) {
        *v = 1.0;
    }
    lp.add_eq(norm, 1.0);

    let sol = lp.solve()?;
    let beta = DVector::from_iterator(p, sol.x[..p].iter().cloned());
    let mut a: Vec<f64> = sol.x[p..p + q].iter().map(|v| v.max(0.0)).collect();
    let total: f64 = a.iter().sum();
    if total <= 0.0 {
        return Err(Error::Infeasible("normalisation row lost in the solution".into()));
    }
    for v in a.iter_mut() {
        *v /= total;
    }
    let alpha = DVector::from_iterator(q, a.iter().zip(signs).map(|(v, s)| v * s));
    Ok((alpha, beta))
}

/// Canonical regression quantile with `alpha` on the unit simplex.
pub fn canonical_rq_simplex(problem: &CanonicalProblem) -> Result<CanonicalFit> {
    let signs = vec![1.0; problem.q()];
    let (alpha, beta) = solve_orthant(problem, &signs)?;
    let objective = problem.objective(&alpha, &beta)?;
    Ok(CanonicalFit {
        alpha,
        beta,
        objective,
        constraint_kind: ConstraintKind::Simplex,
    })
}

/// Canonical regression quantile under `sum |alpha_j| = 1`.
///
/// Every one of the `2^q` sign patterns is solved as its own program; ties go
/// to the earliest pattern, counting `+` before `-` with response 0 as the
/// least significant digit, so the all-positive orthant wins any tie.
pub fn canonical_rq_l1(problem: &CanonicalProblem) -> Result<CanonicalFit> {
    let q = problem.q();
    if q > MAX_ORTHANT_RESPONSES {
        return Err(Error::OrthantLimit {
            q,
            max: MAX_ORTHANT_RESPONSES,
        });
    }
    let results: Vec<Result<CanonicalFit>> = (0..1usize << q)
        .into_par_iter()
        .map(|k| {
            let signs: Vec<f64> = (0..q)
                .map(|j| if (k >> j) & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            let (alpha, beta) = solve_orthant(problem, &signs)?;
            let objective = problem.objective(&alpha, &beta)?;
            Ok(CanonicalFit {
                alpha,
                beta,
                objective,
                constraint_kind: ConstraintKind::L1Sign,
            })
        })
        .collect();
    let mut best: Option<CanonicalFit> = None;
    for r in results {
        let fit = r?;
        let better = match &best {
            None => true,
            Some(b) => fit.objective < b.objective - 1e-12 * (1.0 + b.objective),
        };
        if better {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one orthant"))
}

/// Result of the unconstrained substitution route.
#[derive(Debug, Clone)]
pub struct SubstitutionFit {
    pub fit: CanonicalFit,
    /// All reconstituted `alpha_j > 0`. When false the substitution solution
    /// leaves the simplex and the constrained solver has to be used instead.
    pub interior: bool,
}

/// Substitutes `alpha_1 = 1 - sum_{j>=2} alpha_j` and solves the resulting
/// unconstrained regression quantile.
///
/// Under the substitution the canonical residual becomes
/// `x'beta - y_1 - sum_{j>=2} alpha_j (y_j - y_1)`, so `y_1` is regressed on
/// `[X, Y_j - Y_1]` at level `1 - tau` and `alpha_j` is minus the coefficient
/// of `Y_j - Y_1`.
pub fn substitution_fit(problem: &CanonicalProblem) -> Result<SubstitutionFit> {
    let (n, p, q) = (problem.n(), problem.p(), problem.q());
    if q < 2 {
        return Err(Error::InvalidProblem("substitution needs at least two responses".into()));
    }
    let y = &problem.responses;
    let z = DMatrix::from_fn(n, p + q - 1, |i, j| {
        if j < p {
            problem.design[(i, j)]
        } else {
            let k = j - p + 1;
            y[(i, k)] - y[(i, 0)]
        }
    });
    let y1 = y.column(0).into_owned();
    let pr = RegressionProblem::weighted(z, y1, problem.weights.clone())?;
    let sol = rq_fit(&pr, problem.tau.complement())?;
    let beta = DVector::from_iterator(p, sol.coefficients.iter().take(p).cloned());
    let mut alpha = DVector::zeros(q);
    for k in 1..q {
        alpha[k] = -sol.coefficients[p + k - 1];
    }
    alpha[0] = 1.0 - alpha.iter().skip(1).sum::<f64>();
    let interior = alpha.iter().all(|&a| a > 0.0);
    let objective = problem.objective(&alpha, &beta)?;
    Ok(SubstitutionFit {
        fit: CanonicalFit {
            alpha,
            beta,
            objective,
            constraint_kind: ConstraintKind::Simplex,
        },
        interior,
    })
}

/// Index values `X c` for new rows.
pub fn make_index(design: &DMatrix<f64>, coefficients: &DVector<f64>) -> Result<DVector<f64>> {
    if design.ncols() != coefficients.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} columns but {} coefficients",
            design.ncols(),
            coefficients.len()
        )));
    }
    Ok(design * coefficients)
}
