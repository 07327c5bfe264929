//! The single-parametric principal-component penalty and the two-stage
//! SPPCSO fit: a Lasso warm start selects a support, whose Gram
//! eigenstructure defines quadratic-penalty rows appended to the design; the
//! final estimate is a Lasso on that augmented design.

use crate::error::{Error, Result};
use crate::linalg::{dot, sym_eigen, Dataset, EigenDecomposition, Matrix};
use crate::solvers::{cd_fit, cd_fit_scaled, FitResult, PenaltySpec};

/// Whether the penalty eigenvalues are taken from X_SᵀX_S literally or from
/// X_SᵀX_S/n. The literal Gram is the default; the /n variant exists because
/// the shrinkage formulas are scale-sensitive and sources differ on the
/// convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenScale {
    #[default]
    Gram,
    GramOverN,
}

/// Quadratic penalty derived from the eigenstructure of a support's Gram
/// matrix: `K` holds the per-component weights and `z_rows = √K·Uᵀ` the rows
/// appended to the design at the support columns.
#[derive(Debug, Clone)]
pub struct SppcsoPenalty {
    /// Ordered support indices (size q).
    pub support: Vec<usize>,
    pub u: Matrix,
    /// Descending eigenvalues of the (possibly rescaled) support Gram.
    pub d: Vec<f64>,
    pub theta: f64,
    /// K[i] = d[i](1−θ)/(d[i]+θ−1) for d[i] ≥ 1, else 1/θ − d[i]; always > 0.
    pub k: Vec<f64>,
    /// q×q matrix whose row i is √K[i] times the i-th eigenvector.
    pub z_rows: Matrix,
}

impl SppcsoPenalty {
    /// Largest eigenvalue of ZᵀZ, i.e. max K[i].
    pub fn max_k(&self) -> f64 {
        self.k.iter().copied().fold(0.0, f64::max)
    }

    /// Z·β restricted to the support coordinates of a full-length β.
    pub fn z_times(&self, beta: &[f64]) -> Vec<f64> {
        let q = self.support.len();
        let mut out = vec![0.0; q];
        for (jj, &j) in self.support.iter().enumerate() {
            let b = beta[j];
            if b != 0.0 {
                for i in 0..q {
                    out[i] += self.z_rows.get(i, jj) * b;
                }
            }
        }
        out
    }
}

/// Design stacked with the penalty rows: the last q rows of `x_star` are zero
/// outside the support columns, and `y_star` ends in q zeros. Loss scaling
/// keeps the original `n_effective`.
#[derive(Debug, Clone)]
pub struct AugmentedDesign {
    pub x_star: Matrix,
    pub y_star: Vec<f64>,
    pub n_effective: usize,
    pub penalty: SppcsoPenalty,
}

/// Per-component multiplier applied to the principal-component coordinates of
/// the OLS estimate: (d−1+θ)/d for d ≥ 1, θ·d below.
pub fn shrinkage_factor(d_i: f64, theta: f64) -> Result<f64> {
    validate_theta(theta)?;
    Ok(if d_i >= 1.0 {
        (d_i - 1.0 + theta) / d_i
    } else {
        theta * d_i
    })
}

/// Ridge shrinkage factor d/(d+k), for comparison reports.
pub fn ridge_factor(d_i: f64, k: f64) -> f64 {
    d_i / (d_i + k)
}

/// Liu shrinkage factor (d+h)/(d+1), for comparison reports.
pub fn liu_factor(d_i: f64, h: f64) -> f64 {
    (d_i + h) / (d_i + 1.0)
}

/// Penalty weights K for an eigenvalue vector; strictly positive for any
/// θ ∈ (0,1) and continuous across d = 1.
pub fn penalty_diag(d: &[f64], theta: f64) -> Result<Vec<f64>> {
    validate_theta(theta)?;
    Ok(d.iter()
        .map(|&di| {
            if di >= 1.0 {
                di * (1.0 - theta) / (di + theta - 1.0)
            } else {
                1.0 / theta - di
            }
        })
        .collect())
}

fn validate_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidTheta(theta));
    }
    Ok(())
}

/// Eigendecomposition of the support columns' Gram matrix, on the requested
/// scale.
pub fn support_eigen(
    data: &Dataset,
    support: &[usize],
    scale: EigenScale,
) -> Result<EigenDecomposition> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let xs = data.x.select_columns(support);
    let mut gram = xs.gram();
    if scale == EigenScale::GramOverN {
        let inv_n = 1.0 / data.n() as f64;
        for j in 0..gram.n_cols() {
            for v in gram.col_mut(j) {
                *v *= inv_n;
            }
        }
    }
    sym_eigen(&gram)
}

/// Builds the penalty weights and Z rows from a precomputed eigendecomposition.
pub fn penalty_from_eigen(
    support: &[usize],
    eig: &EigenDecomposition,
    theta: f64,
) -> Result<SppcsoPenalty> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let q = support.len();
    debug_assert_eq!(eig.d.len(), q);
    let k = penalty_diag(&eig.d, theta)?;
    let d_min = *eig.d.last().unwrap_or(&0.0);
    if d_min < 1.0 && theta <= d_min {
        log::warn!(
            "theta = {theta} is at or below the smallest support eigenvalue {d_min}; \
             outside the admissible interval stated for the shrinkage formulas"
        );
    }
    let mut z_rows = Matrix::zeros(q, q);
    for i in 0..q {
        let s = k[i].sqrt();
        for l in 0..q {
            z_rows.set(i, l, s * eig.u.get(l, i));
        }
    }
    Ok(SppcsoPenalty {
        support: support.to_vec(),
        u: eig.u.clone(),
        d: eig.d.clone(),
        theta,
        k,
        z_rows,
    })
}

/// Stacks the penalty rows under the design: Z's columns are embedded at the
/// actual support indices, so (X*)ᵀX* = XᵀX + ZᵀZ.
pub fn augment_with(data: &Dataset, penalty: &SppcsoPenalty) -> AugmentedDesign {
    let n = data.n();
    let p = data.p();
    let q = penalty.support.len();
    let mut x_star = Matrix::zeros(n + q, p);
    for j in 0..p {
        x_star.col_mut(j)[..n].copy_from_slice(data.x.col(j));
    }
    for (jj, &j) in penalty.support.iter().enumerate() {
        let col = x_star.col_mut(j);
        for i in 0..q {
            col[n + i] = penalty.z_rows.get(i, jj);
        }
    }
    let mut y_star = Vec::with_capacity(n + q);
    y_star.extend_from_slice(&data.y);
    y_star.resize(n + q, 0.0);
    AugmentedDesign {
        x_star,
        y_star,
        n_effective: n,
        penalty: penalty.clone(),
    }
}

/// Eigendecomposes the support Gram, forms K and Z, and appends the penalty
/// rows to the design.
pub fn build_augmentation(data: &Dataset, support: &[usize], theta: f64) -> Result<AugmentedDesign> {
    build_augmentation_scaled(data, support, theta, EigenScale::Gram)
}

/// [`build_augmentation`] with an explicit eigenvalue scale.
pub fn build_augmentation_scaled(
    data: &Dataset,
    support: &[usize],
    theta: f64,
    scale: EigenScale,
) -> Result<AugmentedDesign> {
    if !data.standardized {
        return Err(Error::NotStandardized);
    }
    validate_theta(theta)?;
    let eig = support_eigen(data, support, scale)?;
    let penalty = penalty_from_eigen(support, &eig, theta)?;
    Ok(augment_with(data, &penalty))
}

/// Single-parametric principal-components regression estimate
/// U·diag(A)·Uᵀ·β̂_OLS on an invertible support Gram. Exists for testing and
/// comparison; the production path is augmentation plus coordinate descent.
pub fn sppcr_estimate(x_s: &Matrix, y: &[f64], theta: f64) -> Result<Vec<f64>> {
    validate_theta(theta)?;
    if x_s.n_rows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "sppcr_estimate: X_S has {} rows, y has {}",
            x_s.n_rows(),
            y.len()
        )));
    }
    let eig = sym_eigen(&x_s.gram())?;
    let q = eig.d.len();
    let d_max = eig.d[0];
    let d_min = eig.d[q - 1];
    if d_min <= 1e-10 * d_max.max(1.0) {
        return Err(Error::SingularGram(d_min));
    }
    let xty = x_s.tr_matvec(y);
    // U·diag(A/d)·Uᵀ·Xᵀy  ==  U·A·Uᵀ·β̂_OLS
    let mut w = vec![0.0; q];
    for i in 0..q {
        let a_i = shrinkage_factor(eig.d[i], theta)?;
        w[i] = a_i / eig.d[i] * dot(eig.u.col(i), &xty);
    }
    let mut beta = vec![0.0; q];
    for l in 0..q {
        for i in 0..q {
            beta[l] += eig.u.get(l, i) * w[i];
        }
    }
    Ok(beta)
}

/// Two-stage SPPCSO fit result. `fit.objective` is the penalized objective of
/// the augmented problem at the original sample-size scaling.
#[derive(Debug, Clone)]
pub struct SppcsoFit {
    pub fit: FitResult,
    /// Stage 1 selected nothing, so the result is the plain Lasso fit.
    pub reduced_to_lasso: bool,
    /// Support selected by the stage-1 Lasso.
    pub stage1_support: Vec<usize>,
    pub penalty: Option<SppcsoPenalty>,
    /// Plug-in value of Λ_max{(1/n)ZᵀZ}·‖β̂‖∞, reported against λ/4 as a
    /// diagnostic for the error-bound regime; `None` when reduced to Lasso.
    pub lemma1_lhs: Option<f64>,
    pub lemma1_ok: Option<bool>,
}

/// SPPCSO via Lasso initialization: stage 1 fits a Lasso at `lambda`; its
/// support defines the penalty rows; stage 2 refits a Lasso at the same
/// `lambda` on the augmented design, warm-started from stage 1.
pub fn sppcso_fit(
    data: &Dataset,
    lambda: f64,
    theta: f64,
    tol: f64,
    max_iter: usize,
) -> Result<SppcsoFit> {
    sppcso_fit_with(data, lambda, theta, tol, max_iter, EigenScale::Gram, None)
}

/// [`sppcso_fit`] with an explicit eigenvalue scale and an optional stage-1
/// warm start (used along descending λ paths).
pub fn sppcso_fit_with(
    data: &Dataset,
    lambda: f64,
    theta: f64,
    tol: f64,
    max_iter: usize,
    scale: EigenScale,
    stage1_init: Option<&[f64]>,
) -> Result<SppcsoFit> {
    if !data.standardized {
        return Err(Error::NotStandardized);
    }
    validate_theta(theta)?;
    let lasso = PenaltySpec::lasso(lambda)?;
    let zeros;
    let init = match stage1_init {
        Some(b) => b,
        None => {
            zeros = vec![0.0; data.p()];
            &zeros
        }
    };
    let stage1 = cd_fit(&data.x, &data.y, &lasso, init, tol, max_iter)?;
    if stage1.support.is_empty() {
        return Ok(SppcsoFit {
            stage1_support: Vec::new(),
            fit: stage1,
            reduced_to_lasso: true,
            penalty: None,
            lemma1_lhs: None,
            lemma1_ok: None,
        });
    }
    let eig = support_eigen(data, &stage1.support, scale)?;
    let penalty = penalty_from_eigen(&stage1.support, &eig, theta)?;
    sppcso_stage2(data, &penalty, lambda, tol, max_iter, stage1)
}

/// Stage 2 given a prebuilt penalty: used directly by cross-validation where
/// stage-1 paths and eigendecompositions are shared across the (λ, θ) grid.
pub fn sppcso_stage2(
    data: &Dataset,
    penalty: &SppcsoPenalty,
    lambda: f64,
    tol: f64,
    max_iter: usize,
    stage1: FitResult,
) -> Result<SppcsoFit> {
    let lasso = PenaltySpec::lasso(lambda)?;
    let aug = augment_with(data, penalty);
    let fit = cd_fit_scaled(
        &aug.x_star,
        &aug.y_star,
        &lasso,
        &stage1.beta,
        tol,
        max_iter,
        aug.n_effective,
    )?;
    let beta_inf = fit.beta.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    let lhs = penalty.max_k() / data.n() as f64 * beta_inf;
    Ok(SppcsoFit {
        fit,
        reduced_to_lasso: false,
        stage1_support: stage1.support,
        penalty: Some(penalty.clone()),
        lemma1_lhs: Some(lhs),
        lemma1_ok: Some(lhs <= lambda / 4.0),
    })
}
