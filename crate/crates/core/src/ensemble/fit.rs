//! Least-squares polynomial through binned hit densities.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::stats::Histogram;

/// Condition number of the normal system above which a fit is flagged.
pub const ILL_CONDITIONED: f64 = 1e12;
pub const DEFAULT_FIT_ORDER: usize = 15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("polynomial order must be >= 1")]
    ZeroOrder,
    #[error("need at least {needed} points for order {order}, got {got}")]
    TooFewPoints {
        order: usize,
        needed: usize,
        got: usize,
    },
    #[error("x and y lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("least-squares solve failed: {0}")]
    Solve(String),
}

/// p(y) = Σ c_k s^k with s = (y − center) / half_width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialFit {
    pub center: f64,
    pub half_width: f64,
    /// Coefficients in the rescaled coordinate, constant term first.
    pub coefficients: Vec<f64>,
    /// Condition number of the normal system (square of the design matrix's).
    pub condition: f64,
    pub ill_conditioned: bool,
}

impl PolynomialFit {
    pub fn eval(&self, y: f64) -> f64 {
        let s = (y - self.center) / self.half_width;
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * s + c)
    }
}

/// Fit a polynomial of `order` to `(xs, ys)` on the coordinate rescaled to [-1, 1].
///
/// Solved through the SVD of the design matrix rather than the normal
/// equations; `ill_conditioned` is set when the normal system's condition
/// number would exceed [`ILL_CONDITIONED`].
pub fn polynomial_fit(xs: &[f64], ys: &[f64], order: usize) -> Result<PolynomialFit, FitError> {
    if order == 0 {
        return Err(FitError::ZeroOrder);
    }
    if xs.len() != ys.len() {
        return Err(FitError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < order + 1 {
        return Err(FitError::TooFewPoints {
            order,
            needed: order + 1,
            got: xs.len(),
        });
    }
    let (min, max) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    let center = 0.5 * (min + max);
    let half_width = if max > min { 0.5 * (max - min) } else { 1.0 };

    let design = DMatrix::from_fn(xs.len(), order + 1, |i, j| {
        ((xs[i] - center) / half_width).powi(j as i32)
    });
    let rhs = DVector::from_column_slice(ys);
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 {
        (smax / smin).powi(2)
    } else {
        f64::INFINITY
    };
    let coeffs = svd
        .solve(&rhs, 0.0)
        .map_err(|e| FitError::Solve(e.to_string()))?;
    Ok(PolynomialFit {
        center,
        half_width,
        coefficients: coeffs.iter().copied().collect(),
        condition,
        ill_conditioned: condition > ILL_CONDITIONED,
    })
}

/// Fit the histogram's density (unit mass) at its bin centres.
pub fn fit_histogram(histogram: &Histogram, order: usize) -> Result<PolynomialFit, FitError> {
    polynomial_fit(&histogram.centers(), &histogram.density(), order)
}
