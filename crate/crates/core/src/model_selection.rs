//! K-fold cross-validation over the (λ, θ) grid with warm-started λ paths.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimator::{
    penalty_from_eigen, sppcso_fit_with, sppcso_stage2, support_eigen, EigenScale,
};
use crate::linalg::{axpy, dot, standardize, Dataset, EigenDecomposition, Matrix};
use crate::solvers::{cd_fit, FitResult, PenaltySpec, MCP_GAMMA_DEFAULT, MIXING_ALPHA_DEFAULT, SCAD_GAMMA_DEFAULT};

/// Estimation method selectable by the CV engine, benchmark harness and CLI.
/// `Oracle` returns the true coefficients and is only meaningful inside the
/// simulation harness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Lasso,
    Enet { alpha: f64 },
    Mcp { gamma: f64 },
    Scad { gamma: f64 },
    Mnet { gamma: f64, alpha: f64 },
    Sppcso,
    Oracle,
}

impl Method {
    /// Parses a method name, applying the conventional shape defaults.
    pub fn parse(s: &str) -> Result<Method> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lasso" => Ok(Method::Lasso),
            "enet" => Ok(Method::Enet {
                alpha: MIXING_ALPHA_DEFAULT,
            }),
            "mcp" => Ok(Method::Mcp {
                gamma: MCP_GAMMA_DEFAULT,
            }),
            "scad" => Ok(Method::Scad {
                gamma: SCAD_GAMMA_DEFAULT,
            }),
            "mnet" => Ok(Method::Mnet {
                gamma: MCP_GAMMA_DEFAULT,
                alpha: MIXING_ALPHA_DEFAULT,
            }),
            "sppcso" => Ok(Method::Sppcso),
            "oracle" => Ok(Method::Oracle),
            other => Err(Error::UnsupportedMethod(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Lasso => "lasso",
            Method::Enet { .. } => "enet",
            Method::Mcp { .. } => "mcp",
            Method::Scad { .. } => "scad",
            Method::Mnet { .. } => "mnet",
            Method::Sppcso => "sppcso",
            Method::Oracle => "oracle",
        }
    }

    /// Whether the θ grid applies (SPPCSO only).
    pub fn needs_theta(&self) -> bool {
        matches!(self, Method::Sppcso)
    }

    /// Penalty spec at a given λ for the single-stage families.
    pub fn to_spec(&self, lambda: f64) -> Result<PenaltySpec> {
        match *self {
            Method::Lasso => PenaltySpec::lasso(lambda),
            Method::Enet { alpha } => PenaltySpec::enet(lambda, alpha),
            Method::Mcp { gamma } => PenaltySpec::mcp(lambda, gamma),
            Method::Scad { gamma } => PenaltySpec::scad(lambda, gamma),
            Method::Mnet { gamma, alpha } => PenaltySpec::mnet(lambda, gamma, alpha),
            Method::Sppcso | Method::Oracle => {
                Err(Error::UnsupportedMethod(self.name().to_string()))
            }
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Method> {
        Method::parse(s)
    }
}

/// Deterministic partition of {0..n} into k folds whose sizes differ by at
/// most one.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || n < k {
        return Err(Error::BadFoldCount { n, k });
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds.push(idx[start..start + size].to_vec());
        start += size;
    }
    Ok(folds)
}

/// θ candidates: 0.1 through 0.9 in 0.1 steps. The endpoints 0 and 1 are
/// excluded because the penalty formulas need θ ∈ (0, 1).
pub fn theta_grid() -> Vec<f64> {
    (1..10).map(|i| i as f64 / 10.0).collect()
}

/// One (λ, θ) candidate; θ is `None` for methods without a second parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub lambda: f64,
    pub theta: Option<f64>,
}

/// Validation-error surface over the candidate grid. `mean_mse[i]` is NaN
/// when grid point `i` failed in every fold.
#[derive(Debug, Clone)]
pub struct CVResult {
    pub grid: Vec<GridPoint>,
    pub mean_mse: Vec<f64>,
    pub std_mse: Vec<f64>,
    pub best: GridPoint,
}

impl CVResult {
    /// Index of `best` within `grid`.
    pub fn best_index(&self) -> usize {
        self.grid
            .iter()
            .position(|g| g == &self.best)
            .expect("best is drawn from the grid")
    }
}

/// Mean validation MSE over k folds for every (λ, θ) candidate, with each
/// training fold re-standardized and its transform applied to the held-out
/// fold. λ paths are warm-started in descending order within a fixed θ.
///
/// The best pair minimizes the mean MSE; ties break toward larger λ, then
/// larger θ.
pub fn cross_validate(
    data: &Dataset,
    method: &Method,
    lambda_grid: &[f64],
    theta_grid: &[f64],
    k: usize,
    seed: u64,
) -> Result<CVResult> {
    if !data.standardized {
        return Err(Error::NotStandardized);
    }
    if matches!(method, Method::Oracle) {
        return Err(Error::UnsupportedMethod("oracle".into()));
    }
    if lambda_grid.is_empty() {
        return Err(Error::EmptyData("lambda grid is empty".into()));
    }
    if method.needs_theta() && theta_grid.is_empty() {
        return Err(Error::EmptyData("theta grid is empty".into()));
    }

    let mut lambdas = lambda_grid.to_vec();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let thetas: Vec<f64> = if method.needs_theta() {
        theta_grid.to_vec()
    } else {
        Vec::new()
    };

    let grid: Vec<GridPoint> = if method.needs_theta() {
        thetas
            .iter()
            .flat_map(|&t| {
                lambdas.iter().map(move |&l| GridPoint {
                    lambda: l,
                    theta: Some(t),
                })
            })
            .collect()
    } else {
        lambdas
            .iter()
            .map(|&l| GridPoint {
                lambda: l,
                theta: None,
            })
            .collect()
    };

    let folds = kfold_split(data.n(), k, seed)?;
    let all: Vec<usize> = (0..data.n()).collect();

    let per_fold: Vec<Vec<Option<f64>>> = folds
        .par_iter()
        .map(|val_idx| {
            let train_idx: Vec<usize> = all
                .iter()
                .copied()
                .filter(|i| !val_idx.contains(i))
                .collect();
            eval_fold(data, &train_idx, val_idx, method, &lambdas, &thetas, grid.len())
        })
        .collect();

    let mut mean_mse = Vec::with_capacity(grid.len());
    let mut std_mse = Vec::with_capacity(grid.len());
    for gi in 0..grid.len() {
        let vals: Vec<f64> = per_fold.iter().filter_map(|f| f[gi]).collect();
        if vals.is_empty() {
            mean_mse.push(f64::NAN);
            std_mse.push(f64::NAN);
            continue;
        }
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        let s = if vals.len() > 1 {
            (vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (vals.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        mean_mse.push(m);
        std_mse.push(s);
    }

    let mut best: Option<usize> = None;
    for (i, &m) in mean_mse.iter().enumerate() {
        if !m.is_finite() {
            continue;
        }
        best = Some(match best {
            None => i,
            Some(b) => {
                let mb = mean_mse[b];
                if m < mb {
                    i
                } else if m == mb && prefer_on_tie(&grid[i], &grid[b]) {
                    i
                } else {
                    b
                }
            }
        });
    }
    let best = best.ok_or(Error::AllGridPointsFailed)?;

    Ok(CVResult {
        best: grid[best],
        grid,
        mean_mse,
        std_mse,
    })
}

/// Ties prefer the sparser model (larger λ), then the weaker component
/// penalty (larger θ).
fn prefer_on_tie(candidate: &GridPoint, incumbent: &GridPoint) -> bool {
    if candidate.lambda != incumbent.lambda {
        return candidate.lambda > incumbent.lambda;
    }
    match (candidate.theta, incumbent.theta) {
        (Some(a), Some(b)) => a > b,
        _ => false,
    }
}

fn eval_fold(
    data: &Dataset,
    train_idx: &[usize],
    val_idx: &[usize],
    method: &Method,
    lambdas: &[f64],
    thetas: &[f64],
    grid_len: usize,
) -> Vec<Option<f64>> {
    let train_raw = match Dataset::new(
        data.x.select_rows(train_idx),
        train_idx.iter().map(|&i| data.y[i]).collect(),
    ) {
        Ok(d) => d,
        Err(e) => {
            log::warn!("fold assembly failed: {e}");
            return vec![None; grid_len];
        }
    };
    let train = match standardize(&train_raw) {
        Ok(d) => d,
        Err(e) => {
            log::warn!("fold standardization failed: {e}");
            return vec![None; grid_len];
        }
    };
    let y_val_raw: Vec<f64> = val_idx.iter().map(|&i| data.y[i]).collect();
    let (x_val, y_val) = match train.apply_transform(&data.x.select_rows(val_idx), &y_val_raw) {
        Ok(v) => v,
        Err(e) => {
            log::warn!("fold transform failed: {e}");
            return vec![None; grid_len];
        }
    };

    match method {
        Method::Sppcso => {
            eval_fold_sppcso(&train, &x_val, &y_val, lambdas, thetas)
        }
        _ => eval_fold_standard(&train, &x_val, &y_val, method, lambdas),
    }
}

fn eval_fold_standard(
    train: &Dataset,
    x_val: &Matrix,
    y_val: &[f64],
    method: &Method,
    lambdas: &[f64],
) -> Vec<Option<f64>> {
    let p = train.p();
    let mut warm = vec![0.0; p];
    let mut out = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let fit = method
            .to_spec(lam)
            .and_then(|spec| cd_fit(&train.x, &train.y, &spec, &warm, crate::solvers::DEFAULT_TOL, crate::solvers::DEFAULT_MAX_ITER));
        match fit {
            Ok(f) => {
                warm.copy_from_slice(&f.beta);
                out.push(Some(validation_mse(x_val, y_val, &f.beta)));
            }
            Err(e) => {
                log::warn!("{} fit failed at lambda {lam}: {e}", method.name());
                out.push(None);
            }
        }
    }
    out
}

fn eval_fold_sppcso(
    train: &Dataset,
    x_val: &Matrix,
    y_val: &[f64],
    lambdas: &[f64],
    thetas: &[f64],
) -> Vec<Option<f64>> {
    let p = train.p();
    let tol = crate::solvers::DEFAULT_TOL;
    let max_iter = crate::solvers::DEFAULT_MAX_ITER;

    // stage 1 does not depend on θ: one warm-started Lasso path, plus one
    // eigendecomposition per distinct support
    let mut stage1: Vec<Option<FitResult>> = Vec::with_capacity(lambdas.len());
    let mut warm = vec![0.0; p];
    for &lam in lambdas {
        match PenaltySpec::lasso(lam)
            .and_then(|spec| cd_fit(&train.x, &train.y, &spec, &warm, tol, max_iter))
        {
            Ok(f) => {
                warm.copy_from_slice(&f.beta);
                stage1.push(Some(f));
            }
            Err(e) => {
                log::warn!("sppcso stage-1 fit failed at lambda {lam}: {e}");
                stage1.push(None);
            }
        }
    }
    let mut eigen_cache: HashMap<Vec<usize>, Option<EigenDecomposition>> = HashMap::new();
    let mut out = Vec::with_capacity(thetas.len() * lambdas.len());
    for &theta in thetas {
        for (li, &lam) in lambdas.iter().enumerate() {
            let Some(s1) = &stage1[li] else {
                out.push(None);
                continue;
            };
            if s1.support.is_empty() {
                out.push(Some(validation_mse(x_val, y_val, &s1.beta)));
                continue;
            }
            let eig = eigen_cache
                .entry(s1.support.clone())
                .or_insert_with(|| match support_eigen(train, &s1.support, EigenScale::Gram) {
                    Ok(e) => Some(e),
                    Err(e) => {
                        log::warn!("support eigendecomposition failed: {e}");
                        None
                    }
                });
            let Some(eig) = eig else {
                out.push(None);
                continue;
            };
            let fitted = penalty_from_eigen(&s1.support, eig, theta).and_then(|pen| {
                sppcso_stage2(train, &pen, lam, tol, max_iter, s1.clone())
            });
            match fitted {
                Ok(f) => out.push(Some(validation_mse(x_val, y_val, &f.fit.beta))),
                Err(e) => {
                    log::warn!("sppcso stage-2 fit failed at lambda {lam}, theta {theta}: {e}");
                    out.push(None);
                }
            }
        }
    }
    out
}

fn validation_mse(x_val: &Matrix, y_val: &[f64], beta: &[f64]) -> f64 {
    let mut r = y_val.to_vec();
    for (j, &b) in beta.iter().enumerate() {
        if b != 0.0 {
            axpy(-b, x_val.col(j), &mut r);
        }
    }
    dot(&r, &r) / y_val.len() as f64
}

/// Refits the chosen method on a full standardized dataset at the selected
/// (λ, θ). SPPCSO reports its stage-2 fit.
pub fn fit_method_at(
    data: &Dataset,
    method: &Method,
    lambda: f64,
    theta: Option<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<FitResult> {
    match method {
        Method::Sppcso => {
            let theta = theta.ok_or_else(|| {
                Error::InvalidArgument("sppcso requires a theta value".into())
            })?;
            Ok(sppcso_fit_with(data, lambda, theta, tol, max_iter, EigenScale::Gram, None)?.fit)
        }
        Method::Oracle => Err(Error::UnsupportedMethod("oracle".into())),
        _ => {
            let spec = method.to_spec(lambda)?;
            cd_fit(&data.x, &data.y, &spec, &vec![0.0; data.p()], tol, max_iter)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::lambda_path;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kfold_even_division() {
        let folds = kfold_split(10, 5, 1).unwrap();
        assert_eq!(folds.len(), 5);
        assert!(folds.iter().all(|f| f.len() == 2));
    }

    #[test]
    fn kfold_remainder_distribution() {
        let folds = kfold_split(11, 5, 1).unwrap();
        let mut sizes: Vec<usize> = folds.iter().map(|f| f.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 2, 2, 3]);
    }

    #[test]
    fn kfold_is_deterministic_and_partitions() {
        let a = kfold_split(23, 4, 99).unwrap();
        let b = kfold_split(23, 4, 99).unwrap();
        assert_eq!(a, b);
        let mut seen: Vec<usize> = a.iter().flatten().copied().collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..23).collect::<Vec<_>>());
        let c = kfold_split(23, 4, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn kfold_rejects_bad_counts() {
        assert!(matches!(
            kfold_split(5, 1, 0),
            Err(Error::BadFoldCount { .. })
        ));
        assert!(matches!(
            kfold_split(3, 5, 0),
            Err(Error::BadFoldCount { .. })
        ));
    }

    #[test]
    fn theta_grid_is_open_interval() {
        let g = theta_grid();
        assert_eq!(g.len(), 9);
        assert!(g.iter().all(|&t| t > 0.0 && t < 1.0));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!((g[0] - 0.1).abs() < 1e-15);
        assert!((g[8] - 0.9).abs() < 1e-15);
    }

    fn random_standardized(seed: u64, n: usize, p: usize) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Matrix::from_cols(
            (0..p)
                .map(|_| (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
                .collect(),
        )
        .unwrap();
        let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        standardize(&Dataset::new(x, y).unwrap()).unwrap()
    }

    #[test]
    fn single_grid_point_is_best() {
        let data = random_standardized(5, 30, 4);
        let cv = cross_validate(&data, &Method::Lasso, &[0.05], &[], 5, 7).unwrap();
        assert_eq!(cv.grid.len(), 1);
        assert_eq!(cv.best.lambda, 0.05);
        assert!(cv.mean_mse[0] >= 0.0);
    }

    #[test]
    fn grid_size_is_product_for_sppcso() {
        let data = random_standardized(6, 30, 4);
        let lams = lambda_path(&data, 4, 0.1).unwrap();
        let cv = cross_validate(&data, &Method::Sppcso, &lams, &[0.3, 0.6], 3, 7).unwrap();
        assert_eq!(cv.grid.len(), 8);
        assert_eq!(cv.mean_mse.len(), 8);
        assert_eq!(cv.best_index(), cv.grid.iter().position(|g| g == &cv.best).unwrap());
    }

    #[test]
    fn rerun_same_seed_is_identical() {
        let data = random_standardized(8, 40, 5);
        let lams = lambda_path(&data, 6, 0.05).unwrap();
        let a = cross_validate(&data, &Method::Lasso, &lams, &[], 5, 42).unwrap();
        let b = cross_validate(&data, &Method::Lasso, &lams, &[], 5, 42).unwrap();
        assert_eq!(a.mean_mse, b.mean_mse);
        assert_eq!(a.best, b.best);
    }

    #[test]
    fn oracle_method_is_rejected() {
        let data = random_standardized(9, 20, 3);
        assert!(matches!(
            cross_validate(&data, &Method::Oracle, &[0.1], &[], 4, 1),
            Err(Error::UnsupportedMethod(_))
        ));
    }

    #[test]
    fn pure_noise_selects_large_lambda() {
        // with no signal the null model wins on average, so the chosen λ
        // should sit in the top fifth of the descending grid in most trials
        let n_lambda = 20;
        let mut hits = 0;
        for seed in 0..50u64 {
            let data = random_standardized(1000 + seed, 40, 60);
            let lams = lambda_path(&data, n_lambda, 0.05).unwrap();
            let cv = cross_validate(&data, &Method::Lasso, &lams, &[], 5, seed).unwrap();
            if cv.best_index() < n_lambda / 5 {
                hits += 1;
            }
        }
        assert!(hits >= 40, "large-lambda selected in only {hits}/50 trials");
    }

    #[test]
    fn method_parsing() {
        assert_eq!(Method::parse("lasso").unwrap(), Method::Lasso);
        assert_eq!(
            Method::parse("SCAD").unwrap(),
            Method::Scad { gamma: 3.7 }
        );
        assert_eq!(
            Method::parse("mnet").unwrap(),
            Method::Mnet {
                gamma: 3.0,
                alpha: 0.5
            }
        );
        assert!(matches!(
            Method::parse("ols"),
            Err(Error::UnsupportedMethod(_))
        ));
    }

    #[test]
    fn fit_method_at_requires_theta_for_sppcso() {
        let data = random_standardized(10, 20, 3);
        assert!(matches!(
            fit_method_at(&data, &Method::Sppcso, 0.1, None, 1e-6, 100),
            Err(Error::InvalidArgument(_))
        ));
        let fit = fit_method_at(&data, &Method::Sppcso, 0.1, Some(0.5), 1e-6, 1000).unwrap();
        assert_eq!(fit.beta.len(), 3);
    }
}
