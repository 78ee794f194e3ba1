//! Output-layer fitting on Gaussian hidden features.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::sampling::HiddenParam;
use crate::special::eta;

/// `N x (J + 1)` features: column `j` is `eta(a_j . x_n - b_j)`, the last column is all ones.
///
/// Raw designs built with [`DesignMatrix::from_raw`] may omit the intercept column.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    values: DMatrix<f64>,
    intercept: bool,
}

impl DesignMatrix {
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Number of penalised feature columns `J` (the intercept column excluded).
    pub fn hidden(&self) -> usize {
        self.values.ncols() - usize::from(self.intercept)
    }

    pub fn has_intercept(&self) -> bool {
        self.intercept
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    /// Wraps a raw matrix; with `intercept` the last column is the unpenalised intercept.
    pub fn from_raw(values: DMatrix<f64>, intercept: bool) -> Result<Self> {
        if values.ncols() == 0 || values.nrows() == 0 {
            return Err(Error::Dimension("design matrix must be non-empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("design matrix has non-finite entries".into()));
        }
        Ok(Self { values, intercept })
    }
}

/// Hidden weights stacked as a `J x m` matrix.
pub(crate) fn weight_matrix(hidden: &[HiddenParam], m: usize) -> Result<DMatrix<f64>> {
    if let Some(j) = hidden.iter().position(|h| h.a.len() != m) {
        return Err(Error::Dimension(format!(
            "unit {j} has {} weights, inputs have {m} components",
            hidden[j].a.len()
        )));
    }
    Ok(DMatrix::from_fn(hidden.len(), m, |j, i| hidden[j].a[i]))
}

pub fn design_matrix(hidden: &[HiddenParam], xs: &DMatrix<f64>) -> Result<DesignMatrix> {
    let weights = weight_matrix(hidden, xs.ncols())?;
    let (n, j) = (xs.nrows(), hidden.len());
    let pre = xs * weights.transpose();
    let mut values = DMatrix::from_element(n, j + 1, 1.0);
    for (col, h) in hidden.iter().enumerate() {
        for row in 0..n {
            values[(row, col)] = eta(pre[(row, col)] - h.b);
        }
    }
    DesignMatrix::from_raw(values, true)
}

/// Output weights (`J x k`, one column per target component) and intercepts
/// (zero when the design has no intercept column).
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeSolution {
    pub c: DMatrix<f64>,
    pub c0: DVector<f64>,
    pub lambda: f64,
}

impl RidgeSolution {
    /// Coefficients with the intercept appended as the last row.
    pub fn stacked(&self) -> DMatrix<f64> {
        let (j, k) = self.c.shape();
        DMatrix::from_fn(j + 1, k, |r, col| {
            if r < j {
                self.c[(r, col)]
            } else {
                self.c0[col]
            }
        })
    }

    /// `D [C; c0]` (or `D C` without an intercept column).
    pub fn predict(&self, d: &DesignMatrix) -> DMatrix<f64> {
        if d.has_intercept() {
            d.values() * self.stacked()
        } else {
            d.values() * &self.c
        }
    }

    /// `0.5 * (|D C - Y|^2 + lambda |C|^2)`, intercept unpenalised.
    pub fn objective(&self, d: &DesignMatrix, y: &DMatrix<f64>) -> f64 {
        let r = self.predict(d) - y;
        0.5 * (r.norm_squared() + self.lambda * self.c.norm_squared())
    }
}

/// Relative pivot size below which a column is treated as linearly dependent.
const RANK_TOLERANCE: f64 = 1e-11;

/// Minimises `|D [C; c0] - Y|^2 + lambda |C|^2` (the intercept row is not penalised).
///
/// `lambda > 0` uses a Cholesky solve of the regularised normal equations. `lambda = 0`
/// solves the least-squares problem by column-pivoted QR and reports rank deficiency.
pub fn ridge_fit(d: &DesignMatrix, y: &DMatrix<f64>, lambda: f64) -> Result<RidgeSolution> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("ridge parameter {lambda}")));
    }
    if y.nrows() != d.rows() {
        return Err(Error::Dimension(format!(
            "{} design rows but {} target rows",
            d.rows(),
            y.nrows()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("targets contain non-finite entries".into()));
    }
    let stacked = if lambda > 0.0 {
        solve_regularised(d, y, lambda)?
    } else {
        solve_least_squares(d, y)?
    };
    let j = d.hidden();
    let c0 = if d.has_intercept() {
        stacked.row(j).transpose()
    } else {
        DVector::zeros(y.ncols())
    };
    Ok(RidgeSolution {
        c: stacked.rows(0, j).into_owned(),
        c0,
        lambda,
    })
}

/// [`ridge_fit`] with `lambda = 0`.
pub fn linear_fit(d: &DesignMatrix, y: &DMatrix<f64>) -> Result<RidgeSolution> {
    ridge_fit(d, y, 0.0)
}

/// `(D^T D + lambda I') W = D^T Y` with `I'` zero on the intercept.
pub(crate) fn regularised_system(
    d: &DesignMatrix,
    y: &DMatrix<f64>,
    lambda: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let dt = d.values().transpose();
    let mut gram = &dt * d.values();
    for i in 0..d.hidden() {
        gram[(i, i)] += lambda;
    }
    (gram, dt * y)
}

fn solve_regularised(d: &DesignMatrix, y: &DMatrix<f64>, lambda: f64) -> Result<DMatrix<f64>> {
    let (gram, rhs) = regularised_system(d, y, lambda);
    let cols = gram.ncols();
    let chol = gram.cholesky().ok_or(Error::RankDeficient {
        rank: cols - 1,
        cols,
    })?;
    Ok(chol.solve(&rhs))
}

fn solve_least_squares(d: &DesignMatrix, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (n, cols) = d.values().shape();
    if n < cols {
        return Err(Error::RankDeficient { rank: n, cols });
    }
    let qr = d.values().clone().col_piv_qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..cols).map(|i| r[(i, i)].abs()).collect();
    let largest = diag.iter().copied().fold(0.0, f64::max);
    let rank = diag
        .iter()
        .filter(|&&v| v > RANK_TOLERANCE * largest)
        .count();
    if rank < cols {
        return Err(Error::RankDeficient { rank, cols });
    }
    let mut qty = y.clone();
    qr.q_tr_mul(&mut qty);
    let top = qty.rows(0, cols).into_owned();
    let mut sol = r
        .solve_upper_triangular(&top)
        .ok_or(Error::RankDeficient { rank, cols })?;
    qr.p().inv_permute_rows(&mut sol);
    Ok(sol)
}
