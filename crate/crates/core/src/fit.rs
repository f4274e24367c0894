//! Small least-squares helpers shared by the rate and strip-width fits.

use nalgebra::{DMatrix, DVector};

/// Result of an ordinary least-squares fit `y ≈ X c`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    /// Root-mean-square misfit.
    pub rms_residual: f64,
}

/// Solves the least-squares problem for the design matrix given row by row.
/// Returns `None` when the system is rank deficient or underdetermined.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Option<LeastSquares> {
    let m = rows.len();
    let n = rows.first()?.len();
    if m < n || m != y.len() {
        return None;
    }
    let x = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    let rhs = DVector::from_column_slice(y);
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.iter().any(|&s| s <= smax * 1e-12) {
        return None;
    }
    let c = svd.solve(&rhs, 0.0).ok()?;
    let r = &x * &c - &rhs;
    let rms = (r.norm_squared() / m as f64).sqrt();
    Some(LeastSquares {
        coefficients: c.iter().copied().collect(),
        rms_residual: rms,
    })
}

/// Straight-line fit `y ≈ a + b x`; returns `(a, b, rms)`.
pub fn line(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let rows: Vec<Vec<f64>> = x.iter().map(|&t| vec![1.0, t]).collect();
    let ls = least_squares(&rows, y)?;
    Some((ls.coefficients[0], ls.coefficients[1], ls.rms_residual))
}
