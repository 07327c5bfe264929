//! Univariate threshold operators and the shared coordinate-descent engine
//! for all penalized least-squares fits.

mod cd;
mod threshold;

pub use cd::{
    cd_fit, cd_fit_scaled, kkt_residual, lambda_max, lambda_path, objective, objective_scaled,
    DEFAULT_MAX_ITER, DEFAULT_TOL,
};
pub use threshold::{mcp_threshold, scad_threshold, soft_threshold};

use crate::error::{Error, Result};

/// Conventional concavity default for SCAD.
pub const SCAD_GAMMA_DEFAULT: f64 = 3.7;
/// Conventional concavity default for MCP and Mnet.
pub const MCP_GAMMA_DEFAULT: f64 = 3.0;
/// Default L1/L2 mixing weight for Enet and Mnet.
pub const MIXING_ALPHA_DEFAULT: f64 = 0.5;

/// Penalty family with its parameters. `lambda` is the overall level, `gamma`
/// the concavity (SCAD/MCP/Mnet), `alpha` the L1 share of the mixed penalties
/// (Enet/Mnet).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PenaltySpec {
    Lasso { lambda: f64 },
    Enet { lambda: f64, alpha: f64 },
    Mcp { lambda: f64, gamma: f64 },
    Scad { lambda: f64, gamma: f64 },
    Mnet { lambda: f64, gamma: f64, alpha: f64 },
}

impl PenaltySpec {
    pub fn lasso(lambda: f64) -> Result<Self> {
        let s = PenaltySpec::Lasso { lambda };
        s.validate()?;
        Ok(s)
    }

    pub fn enet(lambda: f64, alpha: f64) -> Result<Self> {
        let s = PenaltySpec::Enet { lambda, alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn mcp(lambda: f64, gamma: f64) -> Result<Self> {
        let s = PenaltySpec::Mcp { lambda, gamma };
        s.validate()?;
        Ok(s)
    }

    pub fn scad(lambda: f64, gamma: f64) -> Result<Self> {
        let s = PenaltySpec::Scad { lambda, gamma };
        s.validate()?;
        Ok(s)
    }

    pub fn mnet(lambda: f64, gamma: f64, alpha: f64) -> Result<Self> {
        let s = PenaltySpec::Mnet {
            lambda,
            gamma,
            alpha,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda() < 0.0 {
            return Err(Error::InvalidLambda(self.lambda()));
        }
        match *self {
            PenaltySpec::Lasso { .. } => {}
            PenaltySpec::Enet { alpha, .. } => validate_alpha(alpha)?,
            PenaltySpec::Mcp { gamma, .. } => {
                if gamma <= 0.0 {
                    return Err(Error::InvalidGamma {
                        gamma,
                        family: "mcp",
                        min: 0.0,
                    });
                }
            }
            PenaltySpec::Scad { gamma, .. } => {
                if gamma <= 2.0 {
                    return Err(Error::InvalidGamma {
                        gamma,
                        family: "scad",
                        min: 2.0,
                    });
                }
            }
            PenaltySpec::Mnet { gamma, alpha, .. } => {
                if gamma <= 0.0 {
                    return Err(Error::InvalidGamma {
                        gamma,
                        family: "mnet",
                        min: 0.0,
                    });
                }
                validate_alpha(alpha)?;
            }
        }
        Ok(())
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        match *self {
            PenaltySpec::Lasso { lambda }
            | PenaltySpec::Enet { lambda, .. }
            | PenaltySpec::Mcp { lambda, .. }
            | PenaltySpec::Scad { lambda, .. }
            | PenaltySpec::Mnet { lambda, .. } => lambda,
        }
    }

    /// Same family and shape parameters at a different penalty level.
    pub fn with_lambda(&self, lambda: f64) -> Self {
        match *self {
            PenaltySpec::Lasso { .. } => PenaltySpec::Lasso { lambda },
            PenaltySpec::Enet { alpha, .. } => PenaltySpec::Enet { lambda, alpha },
            PenaltySpec::Mcp { gamma, .. } => PenaltySpec::Mcp { lambda, gamma },
            PenaltySpec::Scad { gamma, .. } => PenaltySpec::Scad { lambda, gamma },
            PenaltySpec::Mnet { gamma, alpha, .. } => PenaltySpec::Mnet {
                lambda,
                gamma,
                alpha,
            },
        }
    }

    /// Lasso and Enet objectives are convex; descent is asserted only for
    /// these families.
    #[inline]
    pub fn is_convex(&self) -> bool {
        matches!(self, PenaltySpec::Lasso { .. } | PenaltySpec::Enet { .. })
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            PenaltySpec::Lasso { .. } => "lasso",
            PenaltySpec::Enet { .. } => "enet",
            PenaltySpec::Mcp { .. } => "mcp",
            PenaltySpec::Scad { .. } => "scad",
            PenaltySpec::Mnet { .. } => "mnet",
        }
    }

    /// Penalty value at a single coefficient.
    pub fn penalty_at(&self, beta_j: f64) -> f64 {
        let t = beta_j.abs();
        match *self {
            PenaltySpec::Lasso { lambda } => lambda * t,
            PenaltySpec::Enet { lambda, alpha } => {
                lambda * alpha * t + lambda * (1.0 - alpha) * t * t
            }
            PenaltySpec::Mcp { lambda, gamma } => mcp_value(t, lambda, gamma),
            PenaltySpec::Scad { lambda, gamma } => {
                if t <= lambda {
                    lambda * t
                } else if t <= gamma * lambda {
                    (2.0 * gamma * lambda * t - t * t - lambda * lambda) / (2.0 * (gamma - 1.0))
                } else {
                    lambda * lambda * (gamma + 1.0) / 2.0
                }
            }
            PenaltySpec::Mnet {
                lambda,
                gamma,
                alpha,
            } => mcp_value(t, lambda * alpha, gamma) + lambda * (1.0 - alpha) * t * t,
        }
    }

    /// Total penalty over a coefficient vector.
    pub fn penalty_value(&self, beta: &[f64]) -> f64 {
        beta.iter().map(|&b| self.penalty_at(b)).sum()
    }

    /// Penalty derivative at t = |beta| > 0 (used in stationarity residuals).
    pub(crate) fn penalty_derivative(&self, t: f64) -> f64 {
        match *self {
            PenaltySpec::Lasso { lambda } => lambda,
            PenaltySpec::Enet { lambda, alpha } => lambda * alpha + 2.0 * lambda * (1.0 - alpha) * t,
            PenaltySpec::Mcp { lambda, gamma } => (lambda - t / gamma).max(0.0),
            PenaltySpec::Scad { lambda, gamma } => {
                if t <= lambda {
                    lambda
                } else {
                    (gamma * lambda - t).max(0.0) / (gamma - 1.0)
                }
            }
            PenaltySpec::Mnet {
                lambda,
                gamma,
                alpha,
            } => (lambda * alpha - t / gamma).max(0.0) + 2.0 * lambda * (1.0 - alpha) * t,
        }
    }

    /// Threshold below which a zero coefficient stays zero (subgradient width
    /// at the origin).
    #[inline]
    pub(crate) fn zero_threshold(&self) -> f64 {
        match *self {
            PenaltySpec::Lasso { lambda }
            | PenaltySpec::Mcp { lambda, .. }
            | PenaltySpec::Scad { lambda, .. } => lambda,
            PenaltySpec::Enet { lambda, alpha } | PenaltySpec::Mnet { lambda, alpha, .. } => {
                lambda * alpha
            }
        }
    }
}

fn mcp_value(t: f64, lambda: f64, gamma: f64) -> f64 {
    if t <= gamma * lambda {
        lambda * t - t * t / (2.0 * gamma)
    } else {
        gamma * lambda * lambda / 2.0
    }
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if alpha <= 0.0 || alpha > 1.0 {
        return Err(Error::InvalidAlpha(alpha));
    }
    Ok(())
}

/// Outcome of a penalized least-squares fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub beta: Vec<f64>,
    /// Indices with nonzero coefficients, ascending.
    pub support: Vec<usize>,
    /// Coordinate-descent sweeps performed (full and active-set).
    pub iterations: usize,
    pub objective: f64,
    pub converged: bool,
}

impl FitResult {
    pub(crate) fn support_of(beta: &[f64]) -> Vec<usize> {
        beta.iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn nnz(&self) -> usize {
        self.support.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_per_family() {
        assert!(PenaltySpec::lasso(0.0).is_ok());
        assert!(matches!(
            PenaltySpec::lasso(-0.1),
            Err(Error::InvalidLambda(_))
        ));
        assert!(matches!(
            PenaltySpec::scad(0.1, 2.0),
            Err(Error::InvalidGamma { .. })
        ));
        assert!(PenaltySpec::scad(0.1, 2.1).is_ok());
        assert!(matches!(
            PenaltySpec::mcp(0.1, 0.0),
            Err(Error::InvalidGamma { .. })
        ));
        assert!(matches!(
            PenaltySpec::enet(0.1, 0.0),
            Err(Error::InvalidAlpha(_))
        ));
        assert!(PenaltySpec::enet(0.1, 1.0).is_ok());
        assert!(matches!(
            PenaltySpec::mnet(0.1, 3.0, 1.5),
            Err(Error::InvalidAlpha(_))
        ));
    }

    #[test]
    fn scad_penalty_value_is_continuous() {
        let s = PenaltySpec::scad(1.0, 3.7).unwrap();
        let eps = 1e-9;
        assert!((s.penalty_at(1.0) - s.penalty_at(1.0 + eps)).abs() < 1e-8);
        assert!((s.penalty_at(3.7) - s.penalty_at(3.7 + eps)).abs() < 1e-8);
        assert!((s.penalty_at(100.0) - 1.0 * (3.7 + 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn enet_penalty_reduces_to_lasso_plus_ridge() {
        let lam = 0.5;
        let enet = PenaltySpec::enet(lam, 0.5).unwrap();
        let lasso = PenaltySpec::lasso(lam * 0.5).unwrap();
        let beta = [1.0, -2.0, 0.0];
        let ridge: f64 = beta.iter().map(|b| lam * 0.5 * b * b).sum();
        assert!((enet.penalty_value(&beta) - (lasso.penalty_value(&beta) + ridge)).abs() < 1e-12);
    }

    #[test]
    fn support_matches_nonzeros() {
        assert_eq!(
            FitResult::support_of(&[0.0, 1.0, -0.5, 0.0, 2.0]),
            vec![1, 2, 4]
        );
    }
}
