//! Response/design container and the standardization transform.

use super::Matrix;
use crate::error::{Error, Result};

/// Response vector plus design matrix with the standardization transform
/// recorded so coefficients can be mapped back to the raw scale.
///
/// When `standardized` is true, `mean(y) = 0` and every column satisfies
/// `XᵀⱼXⱼ/n = 1` (within 1e-10). `column_scales`/`column_means`/`y_center`
/// accumulate the applied transform across repeated standardizations.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: Matrix,
    pub y: Vec<f64>,
    pub standardized: bool,
    pub column_scales: Vec<f64>,
    pub column_means: Vec<f64>,
    pub y_center: f64,
}

impl Dataset {
    /// Wraps raw data: identity transform, not standardized.
    pub fn new(x: Matrix, y: Vec<f64>) -> Result<Self> {
        if x.n_rows() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "X has {} rows but y has length {}",
                x.n_rows(),
                y.len()
            )));
        }
        let p = x.n_cols();
        Ok(Dataset {
            x,
            y,
            standardized: false,
            column_scales: vec![1.0; p],
            column_means: vec![0.0; p],
            y_center: 0.0,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.n_rows()
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.x.n_cols()
    }

    /// Maps a coefficient vector on the standardized scale back to the raw
    /// scale of the original predictors.
    pub fn to_raw_scale(&self, beta: &[f64]) -> Vec<f64> {
        beta.iter()
            .zip(&self.column_scales)
            .map(|(b, s)| b / s)
            .collect()
    }

    /// Applies this dataset's recorded transform to foreign rows, e.g. a
    /// validation fold transformed by its training fold's statistics.
    pub fn apply_transform(&self, x: &Matrix, y: &[f64]) -> Result<(Matrix, Vec<f64>)> {
        if x.n_cols() != self.p() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} columns, got {}",
                self.p(),
                x.n_cols()
            )));
        }
        let mut xt = x.clone();
        for j in 0..xt.n_cols() {
            let m = self.column_means[j];
            let s = self.column_scales[j];
            for v in xt.col_mut(j) {
                *v = (*v - m) / s;
            }
        }
        let yt = y.iter().map(|v| v - self.y_center).collect();
        Ok((xt, yt))
    }
}

// Scales smaller than this (relative to the column magnitude) are treated as
// zero variance.
const CONSTANT_COLUMN_TOL: f64 = 1e-10;

/// Centers `y`, and centers/rescales each predictor column so that
/// `XᵀⱼXⱼ/n = 1` (population scaling, not sample standard deviation).
///
/// The recorded transform composes with any transform already present, so
/// standardize is idempotent on the full record.
pub fn standardize(raw: &Dataset) -> Result<Dataset> {
    let n = raw.n();
    if n < 2 {
        return Err(Error::TooFewRows(n));
    }
    let nf = n as f64;
    let mut x = raw.x.clone();
    let p = x.n_cols();
    let mut scales = Vec::with_capacity(p);
    let mut means = Vec::with_capacity(p);
    for j in 0..p {
        let col = x.col_mut(j);
        let mean = col.iter().sum::<f64>() / nf;
        let mut ss = 0.0;
        let mut max_abs = 0.0f64;
        for v in col.iter_mut() {
            *v -= mean;
            ss += *v * *v;
            max_abs = max_abs.max(v.abs());
        }
        let scale = (ss / nf).sqrt();
        if scale <= CONSTANT_COLUMN_TOL * (1.0 + mean.abs()).max(max_abs) {
            return Err(Error::ConstantColumn(j));
        }
        for v in col.iter_mut() {
            *v /= scale;
        }
        means.push(mean);
        scales.push(scale);
    }
    let y_mean = raw.y.iter().sum::<f64>() / nf;
    let y: Vec<f64> = raw.y.iter().map(|v| v - y_mean).collect();

    // compose with the transform already recorded on the input
    let column_scales = raw
        .column_scales
        .iter()
        .zip(&scales)
        .map(|(s0, s1)| s0 * s1)
        .collect();
    let column_means = raw
        .column_means
        .iter()
        .zip(raw.column_scales.iter().zip(&means))
        .map(|(m0, (s0, m1))| m0 + m1 * s0)
        .collect();

    Ok(Dataset {
        x,
        y,
        standardized: true,
        column_scales,
        column_means,
        y_center: raw.y_center + y_mean,
    })
}
