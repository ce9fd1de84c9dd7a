//! Leading classical canonical correlation, the least-squares baseline.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone)]
pub struct CcaFit {
    /// Response weights.
    pub a: DVector<f64>,
    /// Predictor weights.
    pub b: DVector<f64>,
    pub correlation: f64,
}

/// Leading canonical pair of `X` and `Y`.
///
/// Constant columns (such as an intercept) are dropped before whitening and
/// receive a zero weight. The scores `X b` and `Y a` have unit variance with
/// divisor `n` (the total weight in the weighted version).
pub fn cca_leading(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<CcaFit> {
    cca_leading_weighted(x, y, &DVector::from_element(x.nrows(), 1.0))
}

/// [`cca_leading`] with observation weights in every moment.
pub fn cca_leading_weighted(x: &DMatrix<f64>, y: &DMatrix<f64>, w: &DVector<f64>) -> Result<CcaFit> {
    let n = x.nrows();
    if y.nrows() != n || w.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "X has {n} rows, Y {} and weights {}",
            y.nrows(),
            w.len()
        )));
    }
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroTotalWeight);
    }
    let (xc, xkeep) = centre(x, w, total);
    let (yc, ykeep) = centre(y, w, total);
    if xkeep.is_empty() || ykeep.is_empty() {
        return Err(Error::SingularCovariance("every column of X or Y is constant".into()));
    }
    let cov = |a: &DMatrix<f64>, b: &DMatrix<f64>| {
        let mut aw = a.clone();
        for i in 0..n {
            aw.row_mut(i).scale_mut(w[i] / total);
        }
        aw.transpose() * b
    };
    let sxx = cov(&xc, &xc);
    let syy = cov(&yc, &yc);
    let sxy = cov(&xc, &yc);

    let lx = sxx
        .clone()
        .cholesky()
        .filter(|c| well_conditioned(c.l_dirty()))
        .ok_or_else(|| singular("X", &xc, &xkeep))?
        .l();
    let ly = syy
        .clone()
        .cholesky()
        .filter(|c| well_conditioned(c.l_dirty()))
        .ok_or_else(|| singular("Y", &yc, &ykeep))?
        .l();

    // M = Lx^{-1} Sxy Ly^{-T}
    let left = lx
        .solve_lower_triangular(&sxy)
        .ok_or_else(|| Error::SingularCovariance("X whitening failed".into()))?;
    let m = ly
        .solve_lower_triangular(&left.transpose())
        .ok_or_else(|| Error::SingularCovariance("Y whitening failed".into()))?
        .transpose();
    let svd = m.svd(true, true);
    let (mut top, mut best) = (0, f64::NEG_INFINITY);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > best {
            best = s;
            top = k;
        }
    }
    let u = svd.u.as_ref().expect("u requested").column(top).into_owned();
    let v = svd.v_t.as_ref().expect("v requested").row(top).transpose();
    let bk = lx
        .transpose()
        .solve_upper_triangular(&u)
        .ok_or_else(|| Error::SingularCovariance("X back-substitution failed".into()))?;
    let ak = ly
        .transpose()
        .solve_upper_triangular(&v)
        .ok_or_else(|| Error::SingularCovariance("Y back-substitution failed".into()))?;

    let mut b = DVector::zeros(x.ncols());
    for (k, &j) in xkeep.iter().enumerate() {
        b[j] = bk[k];
    }
    let mut a = DVector::zeros(y.ncols());
    for (k, &j) in ykeep.iter().enumerate() {
        a[j] = ak[k];
    }
    if a.sum() < 0.0 {
        a.neg_mut();
        b.neg_mut();
    }
    Ok(CcaFit {
        a,
        b,
        correlation: best.clamp(0.0, 1.0),
    })
}

/// Weighted centring; returns the kept (non-constant) columns and their indices.
fn centre(m: &DMatrix<f64>, w: &DVector<f64>, total: f64) -> (DMatrix<f64>, Vec<usize>) {
    let n = m.nrows();
    let mut keep = Vec::new();
    let mut cols = Vec::new();
    for j in 0..m.ncols() {
        let col = m.column(j);
        let mean = col.iter().zip(w.iter()).map(|(v, wi)| v * wi).sum::<f64>() / total;
        let centred: Vec<f64> = col.iter().map(|v| v - mean).collect();
        let var = centred.iter().zip(w.iter()).map(|(c, wi)| wi * c * c).sum::<f64>() / total;
        if var > 1e-24 * (1.0 + mean * mean) {
            keep.push(j);
            cols.push(DVector::from_vec(centred));
        }
    }
    let out = if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    };
    (out, keep)
}

fn well_conditioned(l: &DMatrix<f64>) -> bool {
    let d: Vec<f64> = l.diagonal().iter().map(|v| v.abs()).collect();
    let max = d.iter().cloned().fold(0.0, f64::max);
    d.iter().all(|&v| v > 1e-7 * max)
}

/// Names the first kept column that is linearly dependent on earlier ones.
fn singular(which: &str, centred: &DMatrix<f64>, keep: &[usize]) -> Error {
    for k in 1..=centred.ncols() {
        if linalg::rank(&centred.columns(0, k).into_owned()) < k {
            return Error::SingularCovariance(format!(
                "{which} column {} is collinear with earlier columns",
                keep[k - 1]
            ));
        }
    }
    Error::SingularCovariance(format!("{which} covariance is not positive definite"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_in_one_dimension() {
        let x = DMatrix::from_column_slice(6, 1, &[1.0, 2.0, 3.0, 4.0, 5.0, 7.0]);
        let y = DMatrix::from_column_slice(6, 1, &[2.0, 1.0, 4.0, 3.0, 7.0, 5.0]);
        let fit = cca_leading(&x, &y).unwrap();
        let r = linalg::correlation(x.as_slice(), y.as_slice());
        assert!((fit.correlation - r.abs()).abs() < 1e-10);

        let yneg = -&y;
        let fit = cca_leading(&x, &yneg).unwrap();
        assert!((fit.correlation - r.abs()).abs() < 1e-10);
    }

    #[test]
    fn copy_of_predictor_column_has_unit_correlation() {
        let x = DMatrix::from_fn(10, 3, |i, j| match j {
            0 => 1.0,
            1 => (i as f64).sin(),
            _ => (i as f64 * 0.7).cos(),
        });
        let y = DMatrix::from_fn(10, 1, |i, _| x[(i, 2)]);
        let fit = cca_leading(&x, &y).unwrap();
        assert!((fit.correlation - 1.0).abs() < 1e-8);
        assert_eq!(fit.b[0], 0.0);
    }

    #[test]
    fn collinear_columns_are_named() {
        let x = DMatrix::from_fn(8, 3, |i, j| match j {
            0 => i as f64,
            1 => (i as f64).powi(2),
            _ => 2.0 * i as f64,
        });
        let y = DMatrix::from_fn(8, 1, |i, _| (i as f64).sqrt());
        match cca_leading(&x, &y) {
            Err(Error::SingularCovariance(msg)) => assert!(msg.contains("column 2"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
