//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use super::Matrix;
use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;
const OFF_DIAG_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Orthonormal basis `u` and descending eigenvalues `d` of a symmetric matrix,
/// with `u · diag(d) · uᵀ` reconstructing the input.
///
/// Eigenvector signs are fixed so the first nonzero entry of every column is
/// positive, making all downstream results reproducible.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub u: Matrix,
    pub d: Vec<f64>,
}

impl EigenDecomposition {
    /// `u · diag(d) · uᵀ`, mainly for reconstruction checks.
    pub fn reconstruct(&self) -> Matrix {
        let q = self.d.len();
        let mut m = Matrix::zeros(q, q);
        for i in 0..q {
            for j in 0..q {
                let mut v = 0.0;
                for k in 0..q {
                    v += self.u.get(i, k) * self.d[k] * self.u.get(j, k);
                }
                m.set(i, j, v);
            }
        }
        m
    }

    /// `u · diag(w) · uᵀ` for an arbitrary diagonal `w` on the same basis.
    pub fn reconstruct_with(&self, w: &[f64]) -> Matrix {
        debug_assert_eq!(w.len(), self.d.len());
        let q = self.d.len();
        let mut m = Matrix::zeros(q, q);
        for i in 0..q {
            for j in 0..q {
                let mut v = 0.0;
                for k in 0..q {
                    v += self.u.get(i, k) * w[k] * self.u.get(j, k);
                }
                m.set(i, j, v);
            }
        }
        m
    }
}

/// Jacobi eigendecomposition of a symmetric matrix.
///
/// Cyclic sweeps annihilate each off-diagonal pair in turn until the
/// off-diagonal Frobenius norm drops below `1e-12 · ‖M‖_F` (at most 100
/// sweeps). Eigenvalues are returned in descending order.
pub fn sym_eigen(m: &Matrix) -> Result<EigenDecomposition> {
    let q = m.n_rows();
    if q == 0 || m.n_cols() != q {
        return Err(Error::BadDimensions(format!(
            "sym_eigen needs a nonempty square matrix, got {}x{}",
            m.n_rows(),
            m.n_cols()
        )));
    }
    let mut asym = 0.0f64;
    for i in 0..q {
        for j in (i + 1)..q {
            asym = asym.max((m.get(i, j) - m.get(j, i)).abs());
        }
    }
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }

    let mut a = m.clone();
    let mut u = Matrix::identity(q);
    let target = OFF_DIAG_TOL * m.frob_norm();

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..q {
            for j in (i + 1)..q {
                let v = a.get(i, j);
                off += 2.0 * v * v;
            }
        }
        if off.sqrt() <= target {
            break;
        }
        for p in 0..q {
            for r in (p + 1)..q {
                let apr = a.get(p, r);
                if apr == 0.0 {
                    continue;
                }
                let theta = (a.get(r, r) - a.get(p, p)) / (2.0 * apr);
                let t = {
                    let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                let app = a.get(p, p);
                let arr = a.get(r, r);
                a.set(p, p, app - t * apr);
                a.set(r, r, arr + t * apr);
                a.set(p, r, 0.0);
                a.set(r, p, 0.0);
                for k in 0..q {
                    if k != p && k != r {
                        let akp = a.get(k, p);
                        let akr = a.get(k, r);
                        a.set(k, p, c * akp - s * akr);
                        a.set(p, k, c * akp - s * akr);
                        a.set(k, r, s * akp + c * akr);
                        a.set(r, k, s * akp + c * akr);
                    }
                }
                for k in 0..q {
                    let ukp = u.get(k, p);
                    let ukr = u.get(k, r);
                    u.set(k, p, c * ukp - s * ukr);
                    u.set(k, r, s * ukp + c * ukr);
                }
            }
        }
    }

    // sort descending; equal eigenvalues keep their sweep order
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&i, &j| {
        a.get(j, j)
            .partial_cmp(&a.get(i, i))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let d: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let mut u_sorted = Matrix::zeros(q, q);
    for (jj, &j) in order.iter().enumerate() {
        u_sorted.col_mut(jj).copy_from_slice(u.col(j));
    }
    // sign convention: first nonzero entry of each eigenvector is positive
    for j in 0..q {
        let col = u_sorted.col_mut(j);
        if let Some(&lead) = col.iter().find(|v| **v != 0.0) {
            if lead < 0.0 {
                for v in col.iter_mut() {
                    *v = -*v;
                }
            }
        }
    }

    Ok(EigenDecomposition { u: u_sorted, d })
}
