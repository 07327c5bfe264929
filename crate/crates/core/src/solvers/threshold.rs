//! Univariate threshold operators: each solves a one-dimensional penalized
//! quadratic exactly.

use super::PenaltySpec;
use crate::error::{Error, Result};

/// S(r, λ) = sign(r)·(|r| − λ)₊
#[inline]
pub fn soft_threshold(r: f64, lam: f64) -> f64 {
    debug_assert!(lam >= 0.0);
    if r > lam {
        r - lam
    } else if r < -lam {
        r + lam
    } else {
        0.0
    }
}

/// Minimizer of ½(z − r)² + MCP(|z|; λ, γ). Requires γ > 1 so the
/// unit-curvature update is well defined.
#[inline]
pub fn mcp_threshold(r: f64, lam: f64, gamma: f64) -> Result<f64> {
    if gamma <= 1.0 {
        return Err(Error::InvalidGamma {
            gamma,
            family: "mcp",
            min: 1.0,
        });
    }
    Ok(if r.abs() <= gamma * lam {
        soft_threshold(r, lam) / (1.0 - 1.0 / gamma)
    } else {
        r
    })
}

/// Minimizer of ½(z − r)² + SCAD(|z|; λ, γ). Requires γ > 2.
#[inline]
pub fn scad_threshold(r: f64, lam: f64, gamma: f64) -> Result<f64> {
    if gamma <= 2.0 {
        return Err(Error::InvalidGamma {
            gamma,
            family: "scad",
            min: 2.0,
        });
    }
    let a = r.abs();
    Ok(if a <= 2.0 * lam {
        soft_threshold(r, lam)
    } else if a <= gamma * lam {
        ((gamma - 1.0) * r - r.signum() * gamma * lam) / (gamma - 2.0)
    } else {
        r
    })
}

/// Exact coordinate minimizer of (v/2)·z² − c·z + p(|z|) for the family,
/// where v = XᵀⱼXⱼ/n is the column curvature. All updates reduce to the
/// public threshold operators at v = 1; the mixed families fold their ridge
/// term into the curvature.
#[inline]
pub(crate) fn coordinate_update(c: f64, v: f64, spec: &PenaltySpec) -> f64 {
    if v <= 0.0 {
        // zero column: the quadratic term vanishes and the penalty is
        // minimized at zero
        return 0.0;
    }
    match *spec {
        PenaltySpec::Lasso { lambda } => soft_threshold(c, lambda) / v,
        PenaltySpec::Enet { lambda, alpha } => {
            soft_threshold(c, lambda * alpha) / (v + 2.0 * lambda * (1.0 - alpha))
        }
        PenaltySpec::Mcp { lambda, gamma } => mcp_update(c, v, lambda, gamma),
        PenaltySpec::Scad { lambda, gamma } => {
            if c.abs() <= lambda * (v + 1.0) {
                soft_threshold(c, lambda) / v
            } else if c.abs() <= gamma * lambda * v {
                ((gamma - 1.0) * c - c.signum() * gamma * lambda) / ((gamma - 1.0) * v - 1.0)
            } else {
                c / v
            }
        }
        PenaltySpec::Mnet {
            lambda,
            gamma,
            alpha,
        } => mcp_update(
            c,
            v + 2.0 * lambda * (1.0 - alpha),
            lambda * alpha,
            gamma,
        ),
    }
}

#[inline]
fn mcp_update(c: f64, v: f64, lam: f64, gamma: f64) -> f64 {
    if c.abs() <= gamma * lam * v {
        soft_threshold(c, lam) / (v - 1.0 / gamma)
    } else {
        c / v
    }
}

/// The nonconvex updates need positive effective curvature on every column;
/// checked once per fit so the inner loop stays infallible.
pub(crate) fn check_curvature(spec: &PenaltySpec, v_min: f64) -> Result<()> {
    match *spec {
        PenaltySpec::Mcp { gamma, .. } => {
            if gamma * v_min <= 1.0 {
                return Err(Error::InvalidGamma {
                    gamma,
                    family: "mcp",
                    min: 1.0 / v_min.max(f64::MIN_POSITIVE),
                });
            }
        }
        PenaltySpec::Scad { gamma, .. } => {
            if (gamma - 1.0) * v_min <= 1.0 {
                return Err(Error::InvalidGamma {
                    gamma,
                    family: "scad",
                    min: 1.0 + 1.0 / v_min.max(f64::MIN_POSITIVE),
                });
            }
        }
        PenaltySpec::Mnet {
            gamma,
            lambda,
            alpha,
        } => {
            let v_eff = v_min + 2.0 * lambda * (1.0 - alpha);
            if gamma * v_eff <= 1.0 {
                return Err(Error::InvalidGamma {
                    gamma,
                    family: "mnet",
                    min: 1.0 / v_eff.max(f64::MIN_POSITIVE),
                });
            }
        }
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
    }

    #[test]
    fn mcp_threshold_examples() {
        assert!((mcp_threshold(2.0, 1.0, 3.0).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(mcp_threshold(4.0, 1.0, 3.0).unwrap(), 4.0);
        assert_eq!(mcp_threshold(0.5, 1.0, 3.0).unwrap(), 0.0);
        assert!(mcp_threshold(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn scad_threshold_examples() {
        assert!((scad_threshold(1.5, 1.0, 3.7).unwrap() - 0.5).abs() < 1e-12);
        let mid = scad_threshold(3.0, 1.0, 3.7).unwrap();
        assert!((mid - (2.7 * 3.0 - 3.7) / 1.7).abs() < 1e-12);
        assert_eq!(scad_threshold(5.0, 1.0, 3.7).unwrap(), 5.0);
        assert!(scad_threshold(1.0, 1.0, 2.0).is_err());
    }

    /// Brute-force the 1-D problem ½(z−r)² + p(|z|) on a fine grid.
    fn grid_oracle(r: f64, spec: &PenaltySpec) -> f64 {
        let half_width = 2.0 * r.abs().max(0.5);
        let step = 1e-5;
        let n = (2.0 * half_width / step) as usize;
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=n {
            let z = -half_width + i as f64 * step;
            let f = 0.5 * (z - r) * (z - r) + spec.penalty_at(z);
            if f < best.0 {
                best = (f, z);
            }
        }
        // the grid never lands exactly on 0; include it explicitly
        let f0 = 0.5 * r * r;
        if f0 < best.0 {
            best = (f0, 0.0);
        }
        best.1
    }

    #[test]
    fn thresholds_match_grid_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let r = rng.random::<f64>() * 8.0 - 4.0;
            let lam = rng.random::<f64>() * 1.5;
            let gamma_mcp = 1.2 + rng.random::<f64>() * 4.0;
            let gamma_scad = 2.1 + rng.random::<f64>() * 4.0;

            let got = mcp_threshold(r, lam, gamma_mcp).unwrap();
            let want = grid_oracle(r, &PenaltySpec::mcp(lam, gamma_mcp).unwrap());
            assert!(
                (got - want).abs() <= 1e-4,
                "mcp r={r} lam={lam} gamma={gamma_mcp}: {got} vs {want}"
            );

            let got = scad_threshold(r, lam, gamma_scad).unwrap();
            let want = grid_oracle(r, &PenaltySpec::scad(lam, gamma_scad).unwrap());
            assert!(
                (got - want).abs() <= 1e-4,
                "scad r={r} lam={lam} gamma={gamma_scad}: {got} vs {want}"
            );

            let got = soft_threshold(r, lam);
            let want = grid_oracle(r, &PenaltySpec::lasso(lam).unwrap());
            assert!((got - want).abs() <= 1e-4, "lasso r={r} lam={lam}");
        }
    }

    #[test]
    fn coordinate_update_matches_scaled_oracle() {
        // minimize (v/2)z² − cz + p(|z|); substitute z' at curvature v by
        // scanning a grid directly
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..60 {
            let c = rng.random::<f64>() * 6.0 - 3.0;
            let v = 0.4 + rng.random::<f64>() * 2.0;
            let lam = rng.random::<f64>();
            let specs = [
                PenaltySpec::lasso(lam).unwrap(),
                PenaltySpec::enet(lam, 0.5).unwrap(),
                PenaltySpec::mcp(lam, 3.0).unwrap(),
                PenaltySpec::scad(lam, 3.7).unwrap(),
                PenaltySpec::mnet(lam, 3.0, 0.5).unwrap(),
            ];
            for spec in specs {
                if check_curvature(&spec, v).is_err() {
                    continue;
                }
                let got = coordinate_update(c, v, &spec);
                let half_width = 3.0 * (c.abs() / v).max(0.5);
                let step = 1e-5;
                let mut best = (f64::INFINITY, 0.0);
                let n = (2.0 * half_width / step) as usize;
                for i in 0..=n {
                    let z = -half_width + i as f64 * step;
                    let f = 0.5 * v * z * z - c * z + spec.penalty_at(z);
                    if f < best.0 {
                        best = (f, z);
                    }
                }
                // f(0) = 0 exactly; the grid never lands on it
                if 0.0 < best.0 {
                    best = (0.0, 0.0);
                }
                assert!(
                    (got - best.1).abs() <= 2e-4,
                    "{} c={c} v={v} lam={lam}: {got} vs {}",
                    spec.family_name(),
                    best.1
                );
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn threshold_operators_are_odd(r in -10.0f64..10.0, lam in 0.0f64..2.0) {
            prop_assert_eq!(soft_threshold(-r, lam), -soft_threshold(r, lam));
            prop_assert_eq!(
                mcp_threshold(-r, lam, 3.0).unwrap(),
                -mcp_threshold(r, lam, 3.0).unwrap()
            );
            prop_assert_eq!(
                scad_threshold(-r, lam, 3.7).unwrap(),
                -scad_threshold(r, lam, 3.7).unwrap()
            );
        }

        #[test]
        fn mcp_approaches_soft_threshold_for_large_gamma(
            r in -10.0f64..10.0,
            lam in 0.0f64..2.0,
            gamma in 10.0f64..1000.0,
        ) {
            // inside the thresholding branch the gap is |S(r,λ)|/(γ−1); in the
            // identity branch it is λ < |r|/γ — both bounded by |r|/(γ−1)
            let diff = (mcp_threshold(r, lam, gamma).unwrap() - soft_threshold(r, lam)).abs();
            prop_assert!(diff <= r.abs() / (gamma - 1.0) + 1e-12);
        }
    }
}
