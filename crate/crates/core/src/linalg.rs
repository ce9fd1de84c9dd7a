//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Numerical rank from the singular values, relative tolerance `1e-10`.
pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0_f64, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-10 * top).count()
}

/// Weighted least squares `argmin_b sum_i w_i (y_i - x_i'b)^2`.
///
/// Fails with [`Error::DegenerateDesign`] when the weighted design loses rank.
pub fn least_squares(
    design: &DMatrix<f64>,
    response: &DVector<f64>,
    weights: Option<&DVector<f64>>,
) -> Result<DVector<f64>> {
    let (n, p) = design.shape();
    if response.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "design has {n} rows, response has {}",
            response.len()
        )));
    }
    let mut xw = design.clone();
    let mut yw = response.clone();
    if let Some(w) = weights {
        if w.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "design has {n} rows, weights have {}",
                w.len()
            )));
        }
        for i in 0..n {
            let s = w[i].max(0.0).sqrt();
            xw.row_mut(i).scale_mut(s);
            yw[i] *= s;
        }
    }
    if rank(&xw) < p {
        return Err(Error::DegenerateDesign(format!(
            "least-squares design of {p} columns is rank deficient"
        )));
    }
    let svd = xw.svd(true, true);
    svd.solve(&yw, 1e-12)
        .map_err(|e| Error::DegenerateDesign(e.to_string()))
}

/// Pearson correlation of two equal-length slices; zero when either is constant.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}
