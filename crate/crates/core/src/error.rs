//! Error type shared by every module in the crate.

use thiserror::Error;

/// All failure modes surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("need at least 2 rows to standardize, got {0}")]
    TooFewRows(usize),

    #[error("column {0} has zero variance after centering")]
    ConstantColumn(usize),

    #[error("matrix is not symmetric: max |a[i][j] - a[j][i]| = {0:e}")]
    NotSymmetric(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("bad dimensions: {0}")]
    BadDimensions(String),

    #[error("data must be standardized first")]
    NotStandardized,

    #[error("lambda = {0} must be nonnegative")]
    InvalidLambda(f64),

    #[error("gamma = {gamma} invalid for {family}: requires gamma > {min}")]
    InvalidGamma {
        gamma: f64,
        family: &'static str,
        min: f64,
    },

    #[error("alpha = {0} must lie in (0, 1]")]
    InvalidAlpha(f64),

    #[error("theta = {0} must lie in (0, 1)")]
    InvalidTheta(f64),

    #[error("lambda path undefined: {0}")]
    EmptyData(String),

    #[error("objective increased by relative {0:e} on a convex family; solver bug")]
    Diverged(f64),

    #[error("support set is empty")]
    EmptySupport,

    #[error("gram matrix is singular (smallest eigenvalue {0:e})")]
    SingularGram(f64),

    #[error("fold count k = {k} invalid for n = {n} observations")]
    BadFoldCount { n: usize, k: usize },

    #[error("all cross-validation grid points failed")]
    AllGridPointsFailed,

    #[error("{failed} of {total} repetitions failed (more than 10%)")]
    TooManyFailures { failed: usize, total: usize },

    #[error("method '{0}' is not supported by this operation")]
    UnsupportedMethod(String),

    #[error("target probe '{0}' not found")]
    MissingTarget(String),

    #[error("malformed expression file at line {line}: {reason}")]
    MalformedFile { line: usize, reason: String },

    #[error("non-numeric value '{value}' at line {row}, field {col}")]
    NonNumericValue {
        row: usize,
        col: usize,
        value: String,
    },

    #[error("no probes left after filtering")]
    EmptyAfterFilter,

    #[error("fold-change ratio undefined for nonpositive expression in probe '{0}'; enable the absolute-spread mode")]
    NonpositiveValue(String),

    #[error("k = {k} exceeds probe count {p}")]
    KTooLarge { k: usize, p: usize },

    #[error("cannot split n = {n} samples with n_train = {n_train}")]
    BadSplit { n: usize, n_train: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
