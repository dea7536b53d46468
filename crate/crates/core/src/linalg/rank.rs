//! Numerical rank and column-span orthonormalization.

use super::{Complex64, ComplexMatrix, Tolerances};
use crate::error::{Error, Result};

/// Numerical rank: the number of singular values exceeding
/// `rank_rel_tol * sigma_max`.
///
/// The singular values are the square roots of the eigenvalues of `m* m`
/// (clamped at zero). They are computed by one-sided Jacobi rotations that
/// orthogonalize the columns of `m` directly — the rotation angles are
/// exactly the Jacobi angles for `m* m`, but never forming the Gram matrix
/// keeps tiny singular values accurate to machine precision instead of the
/// `sqrt(eps) * sigma_max` floor a squared matrix would impose. Exact null
/// directions therefore stay far below the cutoff while genuinely small
/// directions (down to ~1e-7 relative) stay above it.
pub fn rank(m: &ComplexMatrix, tol: &Tolerances) -> Result<usize> {
    // Work on the thinner orientation; m and m* share singular values.
    let work = if m.cols() <= m.rows() {
        m.clone()
    } else {
        m.adjoint()
    };
    let rows = work.rows();
    let cols = work.cols();

    // Column-major copy so each rotation touches contiguous memory.
    let mut a: Vec<Complex64> = Vec::with_capacity(rows * cols);
    for j in 0..cols {
        for i in 0..rows {
            a.push(work.get(i, j));
        }
    }
    let mut norms_sq: Vec<f64> = (0..cols).map(|j| col_norm_sq(&a, rows, j)).collect();
    let max_sq = norms_sq.iter().fold(0.0_f64, |acc, &x| acc.max(x));
    if max_sq == 0.0 {
        return Ok(0);
    }

    // Columns count as orthogonal once their relative overlap is below this;
    // with the default 1e-12 the induced rank decisions at 1e-9 are safe.
    let ortho = tol.eig_off_diag_tol;
    // Columns this far below the largest one are rounding residue of exact
    // null directions; freezing them stops pairs of noise columns from
    // grinding each other into underflow. The floor sits many orders below
    // any admissible rank cutoff.
    let freeze_sq = max_sq * 1e-28;
    let mut converged = false;
    let mut worst = 0.0_f64;
    let mut sweeps_used = 0;

    for _ in 0..tol.eig_max_sweeps {
        sweeps_used += 1;
        let mut rotated = false;
        worst = 0.0;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let gpp = norms_sq[p];
                let gqq = norms_sq[q];
                if gpp <= freeze_sq || gqq <= freeze_sq {
                    continue;
                }
                let gpq = col_inner(&a, rows, p, q);
                let abs_gpq = gpq.norm();
                if abs_gpq == 0.0 {
                    continue;
                }
                let overlap = abs_gpq / (gpp.sqrt() * gqq.sqrt());
                if overlap <= ortho {
                    continue;
                }
                worst = worst.max(overlap);
                rotated = true;

                // 2x2 Hermitian Jacobi angle for [[gpp, gpq], [gpq*, gqq]].
                let phase = gpq / abs_gpq;
                let tau = (gqq - gpp) / (2.0 * abs_gpq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_conj_phase = phase.conj() * s;
                let c_conj_phase = phase.conj() * c;

                let (head, tail) = a.split_at_mut(q * rows);
                let col_p = &mut head[p * rows..p * rows + rows];
                let col_q = &mut tail[..rows];
                for (zp, zq) in col_p.iter_mut().zip(col_q.iter_mut()) {
                    let old_p = *zp;
                    let old_q = *zq;
                    *zp = old_p * c - old_q * s_conj_phase;
                    *zq = old_p * s + old_q * c_conj_phase;
                }
                norms_sq[p] = col_norm_sq(&a, rows, p);
                norms_sq[q] = col_norm_sq(&a, rows, q);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: sweeps_used,
            residual: worst,
        });
    }

    let sigma_max = norms_sq
        .iter()
        .fold(0.0_f64, |acc, &x| acc.max(x))
        .sqrt();
    if sigma_max == 0.0 {
        return Ok(0);
    }
    let cutoff = tol.rank_rel_tol * sigma_max;
    Ok(norms_sq.iter().filter(|&&x| x.sqrt() > cutoff).count())
}

/// Orthonormal basis of the column span via modified Gram-Schmidt with one
/// re-orthogonalization pass. Columns whose residual drops below
/// `rank_rel_tol` times the largest input column norm are dropped; already
/// orthonormal inputs come back unchanged.
pub fn orthonormalize(columns: &ComplexMatrix, tol: &Tolerances) -> ComplexMatrix {
    let rows = columns.rows();
    let max_norm = (0..columns.cols())
        .map(|j| {
            (0..rows)
                .map(|i| columns.get(i, j).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0_f64, f64::max);

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    if max_norm == 0.0 {
        return from_columns(rows, &basis);
    }
    let cutoff = tol.rank_rel_tol * max_norm;

    for j in 0..columns.cols() {
        let mut v: Vec<Complex64> = (0..rows).map(|i| columns.get(i, j)).collect();
        for _ in 0..2 {
            for u in &basis {
                let coeff: Complex64 = u
                    .iter()
                    .zip(v.iter())
                    .map(|(ui, vi)| ui.conj() * vi)
                    .sum();
                for (vi, ui) in v.iter_mut().zip(u.iter()) {
                    *vi -= coeff * ui;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > cutoff {
            let inv = Complex64::new(1.0 / norm, 0.0);
            for z in v.iter_mut() {
                *z *= inv;
            }
            basis.push(v);
        }
    }
    from_columns(rows, &basis)
}

fn from_columns(rows: usize, basis: &[Vec<Complex64>]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, basis.len(), |i, j| basis[j][i])
}

#[inline]
fn col_norm_sq(a: &[Complex64], rows: usize, j: usize) -> f64 {
    a[j * rows..(j + 1) * rows]
        .iter()
        .map(|z| z.norm_sqr())
        .sum()
}

#[inline]
fn col_inner(a: &[Complex64], rows: usize, p: usize, q: usize) -> Complex64 {
    let cp = &a[p * rows..(p + 1) * rows];
    let cq = &a[q * rows..(q + 1) * rows];
    cp.iter().zip(cq.iter()).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rank_of_identity_and_zero() {
        let tol = Tolerances::default();
        assert_eq!(rank(&ComplexMatrix::identity(5), &tol).unwrap(), 5);
        assert_eq!(rank(&ComplexMatrix::zeros(4, 7), &tol).unwrap(), 0);
    }

    #[test]
    fn rank_detects_exact_dependence() {
        let tol = Tolerances::default();
        // two equal columns plus one independent column
        let m = ComplexMatrix::from_fn(3, 3, |i, j| match j {
            0 | 1 => c((i + 1) as f64, 0.5),
            _ => c(0.0, if i == 2 { 1.0 } else { 0.0 }),
        });
        assert_eq!(rank(&m, &tol).unwrap(), 2);
    }

    #[test]
    fn rank_resolves_tiny_but_genuine_directions() {
        let tol = Tolerances::default();
        // diag(1, 1e-7): both above the relative cutoff of 1e-9
        let m = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(1e-7, 0.0)]);
        assert_eq!(rank(&m, &tol).unwrap(), 2);
        let m = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(1e-10, 0.0)]);
        assert_eq!(rank(&m, &tol).unwrap(), 1);
    }

    #[test]
    fn rank_handles_wide_matrices() {
        let tol = Tolerances::default();
        let m = ComplexMatrix::from_fn(2, 5, |i, j| c((i * 5 + j) as f64, 0.0));
        assert_eq!(rank(&m, &tol).unwrap(), 2);
    }

    #[test]
    fn orthonormalize_merges_duplicates() {
        let tol = Tolerances::default();
        let m = ComplexMatrix::from_fn(3, 2, |i, _| if i == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let q = orthonormalize(&m, &tol);
        assert_eq!(q.cols(), 1);
        assert!((q.get(0, 0).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn orthonormalize_keeps_orthonormal_input() {
        let tol = Tolerances::default();
        let q0 = ComplexMatrix::identity(4);
        assert!(orthonormalize(&q0, &tol).distance(&q0) < 1e-14);
    }

    #[test]
    fn orthonormalize_gaussian_like_input_is_unitary() {
        let tol = Tolerances::default();
        let mut seed = 99u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64) / (1u64 << 53) as f64 - 0.5
        };
        let m = ComplexMatrix::from_fn(16, 16, |_, _| c(next(), next()));
        let q = orthonormalize(&m, &tol);
        assert_eq!(q.cols(), 16);
        let gram = q.adjoint().matmul(&q).unwrap();
        assert!(gram.distance(&ComplexMatrix::identity(16)) < 1e-10);
    }

    #[test]
    fn rank_invariant_under_unitary() {
        let tol = Tolerances::default();
        let mut seed = 3u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64) / (1u64 << 53) as f64 - 0.5
        };
        let gauss = ComplexMatrix::from_fn(6, 6, |_, _| c(next(), next()));
        let u = orthonormalize(&gauss, &tol);
        // rank-3 matrix in M6: three generic rows, three zero rows
        let m = ComplexMatrix::from_fn(6, 6, |i, j| {
            if i < 3 {
                c(
                    ((i * 7 + j + 1) as f64).sin(),
                    ((3 * i + 2 * j) as f64).cos(),
                )
            } else {
                c(0.0, 0.0)
            }
        });
        let base = rank(&m, &tol).unwrap();
        let rotated = rank(&u.matmul(&m).unwrap(), &tol).unwrap();
        assert_eq!(base, rotated);
        assert_eq!(base, 3);
    }
}
