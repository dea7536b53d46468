//! Extremality certification for UCPT maps and marginal tracial states.
//!
//! Two independent criteria are implemented and cross-checked:
//!
//! * **LS (bi-independence)**: a reduced UCPT map `{v_i}` is extremal iff
//!   the only coefficients with `sum a_ij v_i v_j* = 0` *and*
//!   `sum a_ij v_j* v_i = 0` simultaneously are zero. This is a joint kernel
//!   condition, realized as one stacked matrix of full column rank — two
//!   separate independence checks would be strictly stronger and would
//!   wrongly reject some extremal maps.
//! * **PS (support projection)**: a marginal tracial state is extremal iff
//!   the compressed corner `P (M (x) M) P` meets the traceless-tensor-
//!   traceless subspace only in zero, decided by stacking bases of both
//!   subspaces and checking that the combined rank is the sum of the parts.
//!
//! Certificates carry the stacked shape, the achieved and required ranks,
//! and the tolerance used, so every verdict is reproducible.

use crate::channel::{choi, reduce_to_independent, validate_ucpt, KrausSet};
use crate::error::{Error, Result};
use crate::linalg::{rank, Complex64, ComplexMatrix, Tolerances};
use crate::state::{state_rank, validate_marginal, MarginalState};

/// Which criterion produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Bi-independence of `{v_i v_j*}` and `{v_j* v_i}`.
    Ls,
    /// Support-projection intersection test.
    Ps,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Ls => "LS",
            Method::Ps => "PS",
        })
    }
}

/// Machine-checkable extremality verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalityCertificate {
    pub method: Method,
    pub n: usize,
    /// Kraus count for LS, state rank for PS.
    pub k_or_r: usize,
    pub stacked_rows: usize,
    pub stacked_cols: usize,
    pub achieved_rank: usize,
    pub required_rank: usize,
    pub is_extremal: bool,
    pub tolerance_used: f64,
}

/// Bi-independence criterion on a reduced UCPT Kraus set.
///
/// For each ordered pair `(i, j)` the column
/// `[vec(v_i v_j*); vec(v_j* v_i)]` of length `2n^2` enters a stack of `k^2`
/// columns; the map is extremal iff the stack has rank `k^2`.
///
/// Errors if the set is not UCPT or not reduced.
pub fn ls_bi_independence(ks: &KrausSet, tol: &Tolerances) -> Result<ExtremalityCertificate> {
    let report = validate_ucpt(ks, tol)?;
    if !report.is_ucpt {
        return Err(Error::NotUcpt {
            unital: report.unital_residual,
            trace: report.trace_residual,
        });
    }
    if report.kraus_count_reduced != ks.len() {
        return Err(Error::NotReduced {
            count: ks.len(),
            independent: report.kraus_count_reduced,
        });
    }

    let n = ks.n();
    let k = ks.len();
    let d = n * n;
    let mut stack = ComplexMatrix::zeros(2 * d, k * k);
    for (i, vi) in ks.operators().iter().enumerate() {
        for (j, vj) in ks.operators().iter().enumerate() {
            let col = i * k + j;
            let left = vi.matmul(&vj.adjoint())?;
            let right = vj.adjoint().matmul(vi)?;
            for (row, &z) in left.entries().iter().enumerate() {
                stack.set(row, col, z);
            }
            for (row, &z) in right.entries().iter().enumerate() {
                stack.set(d + row, col, z);
            }
        }
    }
    let achieved = rank(&stack, tol)?;
    Ok(ExtremalityCertificate {
        method: Method::Ls,
        n,
        k_or_r: k,
        stacked_rows: 2 * d,
        stacked_cols: k * k,
        achieved_rank: achieved,
        required_rank: k * k,
        is_extremal: achieved == k * k,
        tolerance_used: tol.rank_rel_tol,
    })
}

/// Support-projection criterion on a marginal tracial state.
///
/// Stacks `r^2` corner basis elements `|u_s><u_t|` (from the retained
/// eigenvectors) against the `(n^2-1)^2` products `F_a (x) F_b` of the
/// traceless Hermitian basis, all vectorized into `C^{n^4}`. The state is
/// extremal iff the stack has rank `r^2 + (n^2-1)^2`, i.e. the two subspaces
/// intersect trivially.
///
/// Errors if the state is not marginal tracial.
pub fn ps_support_test(s: &MarginalState, tol: &Tolerances) -> Result<ExtremalityCertificate> {
    let report = validate_marginal(s, tol);
    if !report.is_marginal_tracial {
        return Err(Error::NotMarginalTracial {
            first: report.pt_first_residual,
            second: report.pt_second_residual,
            psd: report.psd_defect,
            trace: report.trace_defect,
        });
    }

    let n = s.n();
    let d = n * n;
    let r = state_rank(s, tol);
    let traceless = traceless_hermitian_basis(n);
    let cols = r * r + traceless.len() * traceless.len();
    let mut stack = ComplexMatrix::zeros(d * d, cols);

    // corner basis |u_s><u_t| over the retained eigenvectors
    let q = s.eigenvectors();
    for si in 0..r {
        for ti in 0..r {
            let col = si * r + ti;
            for row_i in 0..d {
                let qa = q.get(row_i, si);
                if qa == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for row_j in 0..d {
                    stack.set(row_i * d + row_j, col, qa * q.get(row_j, ti).conj());
                }
            }
        }
    }
    // traceless (x) traceless products
    let m = traceless.len();
    for (ai, fa) in traceless.iter().enumerate() {
        for (bi, fb) in traceless.iter().enumerate() {
            let col = r * r + ai * m + bi;
            let prod = fa.kron(fb);
            for (row, &z) in prod.entries().iter().enumerate() {
                stack.set(row, col, z);
            }
        }
    }

    let achieved = rank(&stack, tol)?;
    Ok(ExtremalityCertificate {
        method: Method::Ps,
        n,
        k_or_r: r,
        stacked_rows: d * d,
        stacked_cols: cols,
        achieved_rank: achieved,
        required_rank: cols,
        is_extremal: achieved == cols,
        tolerance_used: tol.rank_rel_tol,
    })
}

/// Outcome of running both criteria on the same channel.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub ls: ExtremalityCertificate,
    pub ps: ExtremalityCertificate,
    pub agree: bool,
}

/// Runs the LS criterion on the reduced set and the PS criterion on the
/// Choi state of the same channel; the two verdicts must agree for every
/// UCPT map.
pub fn cross_validate(ks: &KrausSet, tol: &Tolerances) -> Result<CrossValidation> {
    let report = validate_ucpt(ks, tol)?;
    if !report.is_ucpt {
        return Err(Error::NotUcpt {
            unital: report.unital_residual,
            trace: report.trace_residual,
        });
    }
    let reduced = reduce_to_independent(ks, tol)?;
    let ls = ls_bi_independence(&reduced, tol)?;
    let s = MarginalState::new(ks.n(), choi(ks), tol)?;
    let ps = ps_support_test(&s, tol)?;
    let agree = ls.is_extremal == ps.is_extremal;
    Ok(CrossValidation { ls, ps, agree })
}

/// Upper bound on the rank of any extremal marginal tracial state:
/// `floor(sqrt(2 n^2 - 1))`, computed in integer arithmetic.
pub fn rank_bound(n: usize) -> Result<usize> {
    if n < 1 {
        return Err(Error::InvalidParameter("rank_bound needs n >= 1".into()));
    }
    let target = 2 * (n as u128) * (n as u128) - 1;
    // largest m with m^2 <= target
    let mut m = (target as f64).sqrt() as u128;
    while m * m > target {
        m -= 1;
    }
    while (m + 1) * (m + 1) <= target {
        m += 1;
    }
    Ok(m as usize)
}

/// Orthonormal Hermitian basis of the traceless subspace of `M_n`
/// (generalized Gell-Mann matrices), `n^2 - 1` elements of unit
/// Hilbert-Schmidt norm.
///
/// Enumeration order: symmetric `(e_ij + e_ji)/sqrt(2)` for `i < j` in
/// lexicographic order, then antisymmetric `(-i e_ij + i e_ji)/sqrt(2)` in
/// the same order, then diagonal
/// `(e_11 + .. + e_ll - l e_{l+1,l+1}) / sqrt(l(l+1))` for `l = 1..n-1`.
pub fn traceless_hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(n * n - 1);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut m = ComplexMatrix::zeros(n, n);
            m.set(i, j, Complex64::new(inv_sqrt2, 0.0));
            m.set(j, i, Complex64::new(inv_sqrt2, 0.0));
            basis.push(m);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut m = ComplexMatrix::zeros(n, n);
            m.set(i, j, Complex64::new(0.0, -inv_sqrt2));
            m.set(j, i, Complex64::new(0.0, inv_sqrt2));
            basis.push(m);
        }
    }
    for l in 1..n {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut m = ComplexMatrix::zeros(n, n);
        for k in 0..l {
            m.set(k, k, Complex64::new(norm, 0.0));
        }
        m.set(l, l, Complex64::new(-(l as f64) * norm, 0.0));
        basis.push(m);
    }
    basis
}
