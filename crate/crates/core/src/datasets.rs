//! Target functions, equidistant datasets and codebook targets.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::network::LabelCodebook;

/// Inputs `x_n` (rows of an `N x m` matrix) with targets `y_n` (rows of `N x k`).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    xs: DMatrix<f64>,
    ys: DMatrix<f64>,
}

impl LabeledDataset {
    pub fn new(xs: DMatrix<f64>, ys: DMatrix<f64>) -> Result<Self> {
        if xs.nrows() != ys.nrows() {
            return Err(Error::Dimension(format!(
                "{} inputs but {} targets",
                xs.nrows(),
                ys.nrows()
            )));
        }
        if xs.nrows() == 0 || xs.ncols() == 0 || ys.ncols() == 0 {
            return Err(Error::Dimension("dataset must be non-empty".into()));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Data("dataset contains non-finite entries".into()));
        }
        Ok(Self { xs, ys })
    }

    /// One-dimensional inputs with scalar targets.
    pub fn from_scalar(xs: &[f64], ys: &[f64]) -> Result<Self> {
        Self::new(
            DMatrix::from_column_slice(xs.len(), 1, xs),
            DMatrix::from_column_slice(ys.len(), 1, ys),
        )
    }

    pub fn from_rows(xs: &[Vec<f64>], ys: &[Vec<f64>]) -> Result<Self> {
        let m = xs.first().map_or(0, Vec::len);
        let k = ys.first().map_or(0, Vec::len);
        if xs.iter().any(|r| r.len() != m) || ys.iter().any(|r| r.len() != k) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(
            DMatrix::from_fn(xs.len(), m, |i, j| xs[i][j]),
            DMatrix::from_fn(ys.len(), k, |i, j| ys[i][j]),
        )
    }

    pub fn len(&self) -> usize {
        self.xs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Input dimension `m`.
    pub fn input_dim(&self) -> usize {
        self.xs.ncols()
    }

    /// Target dimension `k`.
    pub fn output_dim(&self) -> usize {
        self.ys.ncols()
    }

    pub fn inputs(&self) -> &DMatrix<f64> {
        &self.xs
    }

    pub fn targets(&self) -> &DMatrix<f64> {
        &self.ys
    }

    pub fn input(&self, n: usize) -> Vec<f64> {
        self.xs.row(n).iter().copied().collect()
    }

    /// Scalar target of a `k = 1` dataset.
    pub fn scalar_target(&self, n: usize) -> f64 {
        self.ys[(n, 0)]
    }

    /// Rows `idx` of this dataset, in the given order.
    pub fn select(&self, idx: &[usize]) -> Self {
        Self {
            xs: self.xs.select_rows(idx),
            ys: self.ys.select_rows(idx),
        }
    }

    /// Writes `x_1..x_m, y_1..y_k` rows with a header.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let header: Vec<String> = (1..=self.input_dim())
            .map(|i| format!("x_{i}"))
            .chain((1..=self.output_dim()).map(|i| format!("y_{i}")))
            .collect();
        w.write_record(&header)?;
        for n in 0..self.len() {
            let row: Vec<String> = self
                .xs
                .row(n)
                .iter()
                .chain(self.ys.row(n).iter())
                .map(|v| v.to_string())
                .collect();
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

/// Topologist's sine curve `sin(2 pi / x)`, with the value 0 at the origin.
pub fn tsc(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (2.0 * PI / x).sin()
    }
}

/// `n` points `lo, lo + h, ..., hi` with `h = (hi - lo) / (n - 1)` and targets `f(x)`.
pub fn equidistant_dataset(
    f: impl Fn(f64) -> f64,
    n: usize,
    lo: f64,
    hi: f64,
) -> Result<LabeledDataset> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 points, got {n}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidArgument(format!("bad interval [{lo}, {hi}]")));
    }
    let xs = equidistant_points(n, lo, hi);
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    LabeledDataset::from_scalar(&xs, &ys)
}

pub(crate) fn equidistant_points(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    let mid = (n - 1) as f64 / 2.0;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else if i as f64 == mid && lo == -hi {
                // symmetric interval: hit the centre exactly
                0.0
            } else {
                lo + i as f64 * h
            }
        })
        .collect()
}

/// Row `n` of the result is the codebook vector for `labels[n]`.
pub fn codebook_targets(labels: &[u8], codebook: &LabelCodebook) -> Result<DMatrix<f64>> {
    let k = codebook.width();
    let mut out = DMatrix::zeros(labels.len(), k);
    for (n, &label) in labels.iter().enumerate() {
        let code = codebook
            .vector(label as usize)
            .ok_or_else(|| Error::Range(format!("label {label} at row {n}")))?;
        for (j, &v) in code.iter().enumerate() {
            out[(n, j)] = v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsc_values() {
        assert_eq!(tsc(0.0), 0.0);
        assert!(tsc(1.0).abs() < 1e-15);
        assert!((tsc(4.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_dataset() {
        let ds = equidistant_dataset(tsc, 2, -1.0, 1.0).unwrap();
        assert_eq!(ds.inputs().as_slice(), &[-1.0, 1.0]);
    }

    #[test]
    fn too_few_points() {
        assert!(equidistant_dataset(tsc, 1, -1.0, 1.0).is_err());
    }

    #[test]
    fn five_point_tsc_hits_zero() {
        let ds = equidistant_dataset(tsc, 5, -1.0, 1.0).unwrap();
        let expected = [tsc(-1.0), tsc(-0.5), 0.0, tsc(0.5), tsc(1.0)];
        assert_eq!(ds.targets().as_slice(), &expected);
        assert_eq!(ds.inputs()[(2, 0)], 0.0);
    }

    #[test]
    fn two_hundred_points_spacing() {
        let ds = equidistant_dataset(tsc, 200, -1.0, 1.0).unwrap();
        let xs = ds.inputs().as_slice();
        assert_eq!(xs[0], -1.0);
        assert_eq!(xs[199], 1.0);
        let h = 2.0 / 199.0;
        for w in xs.windows(2) {
            assert!((w[1] - w[0] - h).abs() < 1e-15);
        }
        assert!(!xs.contains(&0.0));
    }

    #[test]
    fn dataset_shape_checks() {
        assert!(LabeledDataset::from_scalar(&[1.0, 2.0], &[1.0]).is_err());
        assert!(LabeledDataset::from_scalar(&[f64::NAN], &[1.0]).is_err());
    }

    #[test]
    fn codebook_target_rows() {
        let cb = LabelCodebook::generate(7).unwrap();
        let t = codebook_targets(&[0, 0, 0], &cb).unwrap();
        assert_eq!(t.row(0), t.row(1));
        assert_eq!(t.row(1), t.row(2));
        assert!(matches!(codebook_targets(&[10], &cb), Err(Error::Range(_))));
    }
}
