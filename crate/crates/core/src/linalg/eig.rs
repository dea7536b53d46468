//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use super::{Complex64, ComplexMatrix, Tolerances};
use crate::error::{Error, Result};

/// Spectral decomposition `m = Q diag(eigenvalues) Q*`.
///
/// Eigenvalues are sorted descending; ties keep the iteration order. The
/// columns of `eigenvectors` are the matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

/// Diagonalizes a Hermitian matrix with cyclic Jacobi rotations.
///
/// The input must satisfy `||m - m*||_F <= residual_abs_tol * ||m||_F`. The
/// iteration runs on a copy scaled to unit Frobenius norm, so
/// `eig_off_diag_tol` acts relative to the input scale; it stops once the
/// off-diagonal Frobenius mass falls below that threshold and errors out if
/// the sweep budget is exhausted first.
pub fn hermitian_eig(m: &ComplexMatrix, tol: &Tolerances) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch {
            op: "hermitian_eig",
            details: format!("{}x{} is not square", m.rows(), m.cols()),
        });
    }
    let dim = m.rows();
    let norm = m.frobenius_norm();
    let defect = m.adjoint_defect();
    if norm > 0.0 && defect > tol.residual_abs_tol * norm {
        return Err(Error::NotHermitian {
            asymmetry: defect / norm,
        });
    }

    if norm == 0.0 {
        return Ok(EigenDecomposition {
            eigenvalues: vec![0.0; dim],
            eigenvectors: ComplexMatrix::identity(dim),
        });
    }

    // Hermitize and scale to unit Frobenius norm.
    let inv = 1.0 / norm;
    let mut h: Vec<Complex64> = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let avg = (m.get(i, j) + m.get(j, i).conj()) * Complex64::new(0.5 * inv, 0.0);
            h.push(avg);
        }
    }
    let mut q: Vec<Complex64> = ComplexMatrix::identity(dim).entries().to_vec();

    // Pivots below this cannot push the off-diagonal mass above the target.
    let skip = tol.eig_off_diag_tol / dim as f64;
    let zero = Complex64::new(0.0, 0.0);
    let mut off = off_diagonal_mass(&h, dim);
    let mut sweeps_used = 0;

    while off > tol.eig_off_diag_tol {
        if sweeps_used == tol.eig_max_sweeps {
            return Err(Error::NoConvergence {
                sweeps: sweeps_used,
                residual: off,
            });
        }
        sweeps_used += 1;

        for p in 0..dim {
            for r in (p + 1)..dim {
                let b = h[p * dim + r];
                let abs_b = b.norm();
                if abs_b <= skip {
                    continue;
                }
                let phase = b / abs_b;
                let app = h[p * dim + p].re;
                let arr = h[r * dim + r].re;
                let tau = (arr - app) / (2.0 * abs_b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_conj_phase = phase.conj() * s;
                let s_phase = phase * s;

                // Column pass: A <- A U with U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                // in the (p, r) plane.
                for k in 0..dim {
                    let akp = h[k * dim + p];
                    let akr = h[k * dim + r];
                    h[k * dim + p] = akp * c - akr * s_conj_phase;
                    h[k * dim + r] = akp * s + akr * (phase.conj() * c);
                }
                // Row pass: A <- U* A.
                for k in 0..dim {
                    let apk = h[p * dim + k];
                    let ark = h[r * dim + k];
                    h[p * dim + k] = apk * c - ark * s_phase;
                    h[r * dim + k] = apk * s + ark * (phase * c);
                }
                // The pivot is now zero to rounding; make it exact and keep
                // the diagonal real.
                h[p * dim + r] = zero;
                h[r * dim + p] = zero;
                h[p * dim + p].im = 0.0;
                h[r * dim + r].im = 0.0;

                // Accumulate the eigenvector basis: Q <- Q U.
                for k in 0..dim {
                    let qkp = q[k * dim + p];
                    let qkr = q[k * dim + r];
                    q[k * dim + p] = qkp * c - qkr * s_conj_phase;
                    q[k * dim + r] = qkp * s + qkr * (phase.conj() * c);
                }
            }
        }
        off = off_diagonal_mass(&h, dim);
    }

    // Undo the scaling and sort descending (stable, so degenerate clusters
    // keep the iteration order).
    let mut order: Vec<usize> = (0..dim).collect();
    let values: Vec<f64> = (0..dim).map(|i| h[i * dim + i].re * norm).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(dim, dim, |i, j| q[i * dim + order[j]]);

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_mass(h: &[Complex64], dim: usize) -> f64 {
    let mut sum = 0.0;
    for p in 0..dim {
        for r in (p + 1)..dim {
            sum += h[p * dim + r].norm_sqr();
        }
    }
    (2.0 * sum).sqrt()
}
