//! Marginal tracial states: density matrices on `C^n (x) C^n` whose partial
//! traces over both factors are `I/n`.
//!
//! These states correspond bijectively to UCPT maps on `M_n`: the forward
//! direction is [`crate::channel::choi`], the inverse direction is
//! [`kraus_from_state`], which slices each retained eigenvector into
//! second-factor blocks and reads the blocks as operator columns.

use crate::channel::KrausSet;
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, partial_trace, Complex64, ComplexMatrix, Tolerances, TraceSide,
};

/// Density matrix on `C^{n^2}` with its spectral decomposition cached at
/// construction.
#[derive(Debug, Clone)]
pub struct MarginalState {
    n: usize,
    density: ComplexMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl MarginalState {
    /// Wraps an `n^2 x n^2` Hermitian matrix and caches its spectrum.
    ///
    /// Positivity, unit trace, and the marginal conditions are measured by
    /// [`validate_marginal`], not enforced here.
    pub fn new(n: usize, density: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        let d = n * n;
        if density.rows() != d || density.cols() != d {
            return Err(Error::ShapeMismatch {
                op: "MarginalState::new",
                details: format!("expected {}x{}, got {}x{}", d, d, density.rows(), density.cols()),
            });
        }
        let eig = hermitian_eig(&density, tol)?;
        Ok(Self {
            n,
            density,
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    /// Choi state of a channel.
    pub fn from_channel(ks: &KrausSet, tol: &Tolerances) -> Result<Self> {
        Self::new(ks.n(), crate::channel::choi(ks), tol)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn density(&self) -> &ComplexMatrix {
        &self.density
    }

    /// Cached eigenvalues, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Cached eigenvectors, as columns matching [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }
}

/// Residuals of the marginal tracial conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalReport {
    /// Frobenius distance of the first-factor partial trace from `I/n`.
    pub pt_first_residual: f64,
    /// Frobenius distance of the second-factor partial trace from `I/n`.
    pub pt_second_residual: f64,
    /// `max(0, -lambda_min)` of the density matrix.
    pub psd_defect: f64,
    /// `|tr - 1|` of the density matrix.
    pub trace_defect: f64,
    pub is_marginal_tracial: bool,
}

/// Measures how far the state is from being marginal tracial: both partial
/// traces against `I/n`, positivity, and unit trace.
pub fn validate_marginal(s: &MarginalState, tol: &Tolerances) -> MarginalReport {
    let n = s.n();
    let target = ComplexMatrix::identity(n).scale(Complex64::new(1.0 / n as f64, 0.0));
    let pt1 = partial_trace(s.density(), n, TraceSide::First)
        .expect("density shape enforced at construction");
    let pt2 = partial_trace(s.density(), n, TraceSide::Second)
        .expect("density shape enforced at construction");
    let pt_first_residual = pt1.distance(&target);
    let pt_second_residual = pt2.distance(&target);
    let lambda_min = s.eigenvalues().last().copied().unwrap_or(0.0);
    let psd_defect = (-lambda_min).max(0.0);
    let trace_defect = (s.density().trace().re - 1.0).abs();
    let ok = tol.residual_abs_tol;
    MarginalReport {
        pt_first_residual,
        pt_second_residual,
        psd_defect,
        trace_defect,
        is_marginal_tracial: pt_first_residual <= ok
            && pt_second_residual <= ok
            && psd_defect <= ok
            && trace_defect <= ok,
    }
}

/// Rank of the density matrix: eigenvalues above
/// `rank_rel_tol * lambda_max`. Shares its retention threshold with
/// [`support_projection`] and [`kraus_from_state`], so the three agree by
/// construction.
pub fn state_rank(s: &MarginalState, tol: &Tolerances) -> usize {
    retained(s, tol).len()
}

/// Orthogonal projection onto the range of the density matrix.
#[derive(Debug, Clone)]
pub struct SupportProjection {
    pub p: ComplexMatrix,
    pub r: usize,
}

/// Builds the support projection `sum |zeta_i><zeta_i|` over retained
/// eigenvectors.
pub fn support_projection(s: &MarginalState, tol: &Tolerances) -> SupportProjection {
    let idx = retained(s, tol);
    let d = s.n() * s.n();
    let q = s.eigenvectors();
    let mut p = ComplexMatrix::zeros(d, d);
    for &k in &idx {
        for i in 0..d {
            let qik = q.get(i, k);
            if qik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                let value = p.get(i, j) + qik * q.get(j, k).conj();
                p.set(i, j, value);
            }
        }
    }
    SupportProjection { p, r: idx.len() }
}

/// Inverts the channel-to-state correspondence.
///
/// Each retained eigenpair `(lambda, zeta)` contributes one operator: slice
/// `zeta` into second-factor blocks `zeta_j` (so `zeta = sum_j zeta_j (x) e_j`
/// under the crate's tensor convention), let `v` have `sqrt(n) * zeta_j` as
/// column `j`, and weight it by `sqrt(lambda)`. The resulting set is UCPT
/// whenever the input is marginal tracial, and its Choi state reproduces the
/// input density matrix.
///
/// Eigenvector phases are fixed by making the first component of significant
/// magnitude real positive; within degenerate eigenspaces the basis choice is
/// still not canonical, so comparisons should go through Choi matrices.
pub fn kraus_from_state(s: &MarginalState, tol: &Tolerances) -> Result<KrausSet> {
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
    let sqrt_n = (n as f64).sqrt();
    let mut operators = Vec::new();
    for k in retained(s, tol) {
        let lambda = s.eigenvalues()[k];
        let column: Vec<Complex64> = (0..d).map(|i| s.eigenvectors().get(i, k)).collect();
        let phase = phase_convention(&column);
        let weight = Complex64::new(lambda.sqrt() * sqrt_n, 0.0) * phase;
        // composite index (p, j) = p*n + j: entry (p, j) of the operator
        let op = ComplexMatrix::from_fn(n, n, |p, j| column[p * n + j] * weight);
        operators.push(op);
    }
    KrausSet::new(operators)
}

fn retained(s: &MarginalState, tol: &Tolerances) -> Vec<usize> {
    let lambda_max = s.eigenvalues().first().copied().unwrap_or(0.0).max(0.0);
    if lambda_max <= 0.0 {
        return Vec::new();
    }
    let cutoff = tol.rank_rel_tol * lambda_max;
    s.eigenvalues()
        .iter()
        .enumerate()
        .filter(|&(_, &l)| l > cutoff)
        .map(|(i, _)| i)
        .collect()
}

/// Unit phase making the first significant component real positive.
fn phase_convention(column: &[Complex64]) -> Complex64 {
    for z in column {
        if z.norm() > 1e-12 {
            return z.conj() / z.norm();
        }
    }
    Complex64::new(1.0, 0.0)
}
