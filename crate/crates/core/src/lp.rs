//! Dense two-phase primal simplex for small and medium linear programs.
//!
//! Problems are stated as
//!
//! ```text
//! minimize    c'x
//! subject to  A x = b
//!             x_j >= 0   for bounded columns, x_j free otherwise
//! ```
//!
//! Free columns are split into a positive and a negative part. Rows are sign
//! normalised so that `b >= 0`, and any column that is already a positive unit
//! vector in a single row seeds the starting basis; remaining rows receive an
//! artificial variable and go through phase one. Pricing is Dantzig's rule
//! with a switch to Bland's rule after a run of degenerate pivots, which keeps
//! the method finite on the heavily degenerate programs produced by quantile
//! regression. The final basic solution is recomputed from an LU factorisation
//! of the basis so that accumulated tableau round-off does not leak into the
//! returned vertex.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 40;

/// A linear program with equality rows.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    cost: Vec<f64>,
    free: Vec<bool>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

/// An optimal vertex.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl LinearProgram {
    /// Creates a program over `cost.len()` nonnegative variables and no rows.
    pub fn new(cost: Vec<f64>) -> Self {
        let n = cost.len();
        Self {
            cost,
            free: vec![false; n],
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Marks variable `j` as unrestricted in sign.
    pub fn set_free(&mut self, j: usize) {
        self.free[j] = true;
    }

    /// Appends the equality row `coeffs . x = rhs`.
    pub fn add_eq(&mut self, coeffs: Vec<f64>, rhs: f64) {
        assert_eq!(coeffs.len(), self.cost.len(), "row width must match variable count");
        self.rows.push(coeffs);
        self.rhs.push(rhs);
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let m = self.rows.len();
        let nv = self.cost.len();

        // column map: standard column -> (original var, sign)
        let mut col_var = Vec::with_capacity(nv * 2);
        for j in 0..nv {
            col_var.push((j, 1.0));
            if self.free[j] {
                col_var.push((j, -1.0));
            }
        }
        let ns = col_var.len();

        if m == 0 {
            // Only bounded below by zero: optimal at x = 0 unless some cost is negative.
            for &(j, s) in &col_var {
                if s * self.cost[j] < 0.0 {
                    return Err(Error::Unbounded(format!("variable {j} has no constraints")));
                }
            }
            return Ok(LpSolution {
                x: vec![0.0; nv],
                objective: 0.0,
                pivots: 0,
            });
        }

        // standard-form matrix with b >= 0
        let mut a = vec![0.0; m * ns];
        let mut b = vec![0.0; m];
        for i in 0..m {
            let flip = if self.rhs[i] < 0.0 { -1.0 } else { 1.0 };
            b[i] = flip * self.rhs[i];
            for (k, &(j, s)) in col_var.iter().enumerate() {
                a[i * ns + k] = flip * s * self.rows[i][j];
            }
        }
        let c: Vec<f64> = col_var.iter().map(|&(j, s)| s * self.cost[j]).collect();

        // crash basis from positive unit columns
        let mut basis = vec![usize::MAX; m];
        let mut row_scale = vec![1.0; m];
        let mut used = vec![false; ns];
        for k in 0..ns {
            if col_var[k].1 < 0.0 {
                continue;
            }
            let mut hit = None;
            let mut single = true;
            for i in 0..m {
                let v = a[i * ns + k];
                if v != 0.0 {
                    if hit.is_some() {
                        single = false;
                        break;
                    }
                    hit = Some((i, v));
                }
            }
            if let (true, Some((i, v))) = (single, hit) {
                if v > 0.0 && basis[i] == usize::MAX && !used[k] {
                    basis[i] = k;
                    row_scale[i] = 1.0 / v;
                    used[k] = true;
                }
            }
        }
        let artificial_rows: Vec<usize> = (0..m).filter(|&i| basis[i] == usize::MAX).collect();
        let na = artificial_rows.len();
        let width = ns + na;

        let mut tab = Tableau::new(m, width);
        for i in 0..m {
            let s = row_scale[i];
            for k in 0..ns {
                tab.set(i, k, a[i * ns + k] * s);
            }
            tab.set_rhs(i, b[i] * s);
        }
        for (r, &i) in artificial_rows.iter().enumerate() {
            tab.set(i, ns + r, 1.0);
            basis[i] = ns + r;
        }
        tab.basis = basis;

        let cost_scale = c.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        let mut pivots = 0;
        let limit = 50 * (m + width) + 1000;

        if na > 0 {
            let mut phase1 = vec![0.0; width];
            for r in 0..na {
                phase1[ns + r] = 1.0;
            }
            tab.load_costs(&phase1);
            pivots += tab.optimise(&vec![true; width], 1e-11, limit)?;
            let infeas = -tab.obj[width];
            let bscale = b.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
            if infeas > 1e-8 * bscale {
                return Err(Error::Infeasible(format!(
                    "phase one residual {infeas:.3e}"
                )));
            }
            // drive artificials out of the basis
            for i in 0..m {
                if tab.basis[i] >= ns {
                    let mut best = None;
                    let mut best_abs = PIVOT_TOL;
                    for k in 0..ns {
                        let v = tab.get(i, k).abs();
                        if v > best_abs {
                            best_abs = v;
                            best = Some(k);
                        }
                    }
                    if let Some(k) = best {
                        tab.pivot(i, k);
                        pivots += 1;
                    }
                }
            }
        }

        let mut phase2 = vec![0.0; width];
        phase2[..ns].copy_from_slice(&c);
        tab.load_costs(&phase2);
        let mut allowed = vec![true; width];
        for flag in allowed.iter_mut().skip(ns) {
            *flag = false;
        }
        pivots += tab.optimise(&allowed, 1e-10 * cost_scale, limit)?;

        // basic solution, optionally refined through the original basis matrix
        let mut xs = vec![0.0; ns];
        for i in 0..m {
            let k = tab.basis[i];
            if k < ns {
                xs[k] = tab.rhs(i).max(0.0);
            }
        }
        if tab.basis.iter().all(|&k| k < ns) {
            let bmat = DMatrix::from_fn(m, m, |i, r| a[i * ns + tab.basis[r]]);
            let rhs = DVector::from_column_slice(&b);
            if let Some(sol) = bmat.lu().solve(&rhs) {
                if sol.iter().all(|v| v.is_finite() && *v > -1e-7) {
                    for r in 0..m {
                        xs[tab.basis[r]] = sol[r].max(0.0);
                    }
                }
            }
        }

        let mut x = vec![0.0; nv];
        for (k, &(j, s)) in col_var.iter().enumerate() {
            x[j] += s * xs[k];
        }
        let objective = x.iter().zip(&self.cost).map(|(xi, ci)| xi * ci).sum();
        Ok(LpSolution {
            x,
            objective,
            pivots,
        })
    }
}

/// Row-major tableau with the right-hand side stored as the last column.
struct Tableau {
    m: usize,
    width: usize,
    data: Vec<f64>,
    obj: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(m: usize, width: usize) -> Self {
        Self {
            m,
            width,
            data: vec![0.0; m * (width + 1)],
            obj: vec![0.0; width + 1],
            basis: vec![usize::MAX; m],
        }
    }

    #[inline]
    fn stride(&self) -> usize {
        self.width + 1
    }

    #[inline]
    fn get(&self, i: usize, k: usize) -> f64 {
        self.data[i * self.stride() + k]
    }

    #[inline]
    fn set(&mut self, i: usize, k: usize, v: f64) {
        let s = self.stride();
        self.data[i * s + k] = v;
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.stride() + self.width]
    }

    fn set_rhs(&mut self, i: usize, v: f64) {
        let w = self.width;
        self.set(i, w, v);
    }

    /// Installs a cost vector and prices out the current basis.
    fn load_costs(&mut self, cost: &[f64]) {
        let s = self.stride();
        self.obj[..self.width].copy_from_slice(cost);
        self.obj[self.width] = 0.0;
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.data[i * s..(i + 1) * s];
                for (o, r) in self.obj.iter_mut().zip(row) {
                    *o -= cb * r;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let s = self.stride();
        let pv = self.data[r * s + c];
        {
            let row = &mut self.data[r * s..(r + 1) * s];
            for v in row.iter_mut() {
                *v /= pv;
            }
            row[c] = 1.0;
        }
        let (before, rest) = self.data.split_at_mut(r * s);
        let (prow, after) = rest.split_at_mut(s);
        let eliminate = |row: &mut [f64]| {
            let f = row[c];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                row[c] = 0.0;
            }
        };
        before.chunks_exact_mut(s).for_each(eliminate);
        after.chunks_exact_mut(s).for_each(eliminate);
        let f = self.obj[c];
        if f != 0.0 {
            for (v, p) in self.obj.iter_mut().zip(prow.iter()) {
                *v -= f * p;
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Runs primal simplex pivots until no allowed column prices out negative.
    fn optimise(&mut self, allowed: &[bool], cost_tol: f64, limit: usize) -> Result<usize> {
        let mut pivots = 0;
        let mut degenerate = 0;
        loop {
            let bland = degenerate >= DEGENERATE_RUN;
            let mut enter = None;
            let mut best = -cost_tol;
            for k in 0..self.width {
                if !allowed[k] {
                    continue;
                }
                let d = self.obj[k];
                if d < best {
                    enter = Some(k);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(c) = enter else {
                return Ok(pivots);
            };

            let mut leave: Option<(usize, f64, f64)> = None;
            for i in 0..self.m {
                let a = self.get(i, c);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / a;
                    match leave {
                        None => leave = Some((i, ratio, a)),
                        Some((li, lr, la)) => {
                            let tie = (ratio - lr).abs() <= 1e-12 * (1.0 + lr.abs());
                            let better = if tie {
                                if bland {
                                    self.basis[i] < self.basis[li]
                                } else {
                                    a > la
                                }
                            } else {
                                ratio < lr
                            };
                            if better {
                                leave = Some((i, ratio, a));
                            }
                        }
                    }
                }
            }
            let Some((r, ratio, _)) = leave else {
                return Err(Error::Unbounded(format!("column {c} has no blocking row")));
            };
            if ratio <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
            pivots += 1;
            if pivots > limit {
                return Err(Error::IterationLimit(pivots));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_max_problem() {
        // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
        let mut lp = LinearProgram::new(vec![-3.0, -5.0, 0.0, 0.0, 0.0]);
        lp.add_eq(vec![1.0, 0.0, 1.0, 0.0, 0.0], 4.0);
        lp.add_eq(vec![0.0, 2.0, 0.0, 1.0, 0.0], 12.0);
        lp.add_eq(vec![3.0, 2.0, 0.0, 0.0, 1.0], 18.0);
        let sol = lp.solve().unwrap();
        assert!((sol.objective + 36.0).abs() < 1e-12);
        assert!((sol.x[0] - 2.0).abs() < 1e-12);
        assert!((sol.x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn free_variable_and_phase_one() {
        // min |x - 3| written as x - 3 = u - v, cost u + v, x free
        let mut lp = LinearProgram::new(vec![0.0, 1.0, 1.0]);
        lp.set_free(0);
        lp.add_eq(vec![1.0, -1.0, 1.0], 3.0);
        let sol = lp.solve().unwrap();
        assert!(sol.objective.abs() < 1e-12);
        assert!((sol.x[0] - 3.0).abs() < 1e-12);

        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add_eq(vec![1.0, 1.0], 1.0);
        lp.add_eq(vec![1.0, -1.0], -0.5);
        let sol = lp.solve().unwrap();
        assert!((sol.x[0] - 0.25).abs() < 1e-12);
        assert!((sol.x[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add_eq(vec![1.0, 1.0], -1.0);
        assert!(matches!(lp.solve(), Err(Error::Infeasible(_))));

        let mut lp = LinearProgram::new(vec![-1.0, 0.0]);
        lp.add_eq(vec![1.0, -1.0], 1.0);
        assert!(matches!(lp.solve(), Err(Error::Unbounded(_))));
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.add_eq(vec![1.0, 1.0], 1.0);
        lp.add_eq(vec![2.0, 2.0], 2.0);
        let sol = lp.solve().unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-12);
    }
}
