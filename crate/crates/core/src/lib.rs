//! Penalized linear regression built around the single-parametric
//! principal-component selection operator (SPPCSO): a Lasso on a design
//! augmented with rows derived from the principal components of the
//! currently-selected support. Ships the baseline penalized estimators
//! (Lasso, Enet, MCP, SCAD, Mnet), a k-fold cross-validation engine, a
//! Monte-Carlo benchmark harness, and a gene-expression analysis pipeline.

pub mod error;
pub mod estimator;
pub mod linalg;
pub mod model_selection;
pub mod solvers;

pub use error::{Error, Result};
pub use estimator::{
    build_augmentation, penalty_diag, shrinkage_factor, sppcr_estimate, sppcso_fit,
    AugmentedDesign, EigenScale, SppcsoFit, SppcsoPenalty,
};
pub use linalg::{standardize, sym_eigen, Dataset, EigenDecomposition, Matrix};
pub use model_selection::{cross_validate, kfold_split, theta_grid, CVResult, GridPoint, Method};
pub use solvers::{
    cd_fit, cd_fit_scaled, lambda_max, lambda_path, mcp_threshold, objective, scad_threshold,
    soft_threshold, FitResult, PenaltySpec,
};
