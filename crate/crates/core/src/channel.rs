//! Completely positive maps in Kraus form.
//!
//! A map is represented by operators `{v_i}` acting as
//! `A -> sum_i v_i* A v_i`. A map is UCPT (unital, completely positive,
//! trace preserving) when `sum v_i v_i* = sum v_i* v_i = I`; these are the
//! quantum analogues of doubly stochastic matrices.
//!
//! The Choi state of a map lives on `C^n (x) C^n` and is assembled from the
//! vectorized Kraus operators: under the crate's row-major/first-factor
//! conventions, `(v (x) I) xi = vectorize(v) / sqrt(n)` with `xi` the
//! maximally entangled unit vector, so the Choi matrix is
//! `(1/n) sum_i |vec v_i><vec v_i|`. Equivalently it is
//! `(1/n) sum_ij (v e_ij v*) (x) e_ij` summed over matrix units — note the
//! conjugate action in the first leg; writing `v* e_ij v` there instead
//! would build the Choi state of the adjoint map.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, Complex64, ComplexMatrix, Tolerances};

/// Ordered list of same-sized square Kraus operators.
///
/// Zero operators are allowed as members (some constructions pad with them),
/// but at least one operator must be nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    n: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators.first().ok_or_else(|| {
            Error::InvalidParameter("a Kraus set needs at least one operator".into())
        })?;
        if !first.is_square() {
            return Err(Error::ShapeMismatch {
                op: "KrausSet::new",
                details: format!("operator 0 is {}x{}", first.rows(), first.cols()),
            });
        }
        let n = first.rows();
        for (idx, op) in operators.iter().enumerate() {
            if op.rows() != n || op.cols() != n {
                return Err(Error::ShapeMismatch {
                    op: "KrausSet::new",
                    details: format!("operator {} is {}x{}, expected {}x{}", idx, op.rows(), op.cols(), n, n),
                });
            }
        }
        if operators.iter().all(|op| op.frobenius_norm() == 0.0) {
            return Err(Error::InvalidParameter(
                "a Kraus set needs at least one nonzero operator".into(),
            ));
        }
        Ok(Self { n, operators })
    }

    /// Builds a set from `(weight, operator)` pairs, absorbing each positive
    /// weight as `sqrt(weight) * v`.
    pub fn with_weights(weights: &[f64], operators: Vec<ComplexMatrix>) -> Result<Self> {
        if weights.len() != operators.len() {
            return Err(Error::InvalidParameter(format!(
                "{} weights for {} operators",
                weights.len(),
                operators.len()
            )));
        }
        if weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
            return Err(Error::InvalidParameter(
                "weights must be finite and strictly positive".into(),
            ));
        }
        let scaled = weights
            .iter()
            .zip(operators)
            .map(|(&w, op)| op.scale(Complex64::new(w.sqrt(), 0.0)))
            .collect();
        Self::new(scaled)
    }

    /// Matrix size n of the underlying algebra.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of Kraus operators in this representation.
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }
}

/// Residuals of the UCPT conditions, plus the minimal Kraus count.
#[derive(Debug, Clone, PartialEq)]
pub struct UcptReport {
    /// `|| sum v_i v_i* - I ||_F`
    pub unital_residual: f64,
    /// `|| sum v_i* v_i - I ||_F`
    pub trace_residual: f64,
    pub is_ucpt: bool,
    /// Number of linearly independent operators, i.e. the minimal length of
    /// any Kraus representation of the same map.
    pub kraus_count_reduced: usize,
}

/// Checks the unital and trace-preserving conditions and reports the reduced
/// Kraus count. Always produces a report for well-formed sets.
pub fn validate_ucpt(ks: &KrausSet, tol: &Tolerances) -> Result<UcptReport> {
    let id = ComplexMatrix::identity(ks.n());
    let mut unital = ComplexMatrix::zeros(ks.n(), ks.n());
    let mut tracep = ComplexMatrix::zeros(ks.n(), ks.n());
    for v in ks.operators() {
        let vadj = v.adjoint();
        unital = unital.add(&v.matmul(&vadj)?);
        tracep = tracep.add(&vadj.matmul(v)?);
    }
    let unital_residual = unital.distance(&id);
    let trace_residual = tracep.distance(&id);
    let reduced = reduce_to_independent(ks, tol)?;
    Ok(UcptReport {
        unital_residual,
        trace_residual,
        is_ucpt: unital_residual <= tol.residual_abs_tol && trace_residual <= tol.residual_abs_tol,
        kraus_count_reduced: reduced.len(),
    })
}

/// Rewrites the map with linearly independent Kraus operators.
///
/// The Gram matrix `G_ij = tr(v_i* v_j)` is diagonalized and the operators
/// are recombined along its eigenvectors; eigendirections with eigenvalue
/// above `rank_rel_tol * lambda_max` are kept, in descending eigenvalue
/// order. The output represents the same map and its operators have
/// pairwise orthogonal vectorizations.
pub fn reduce_to_independent(ks: &KrausSet, tol: &Tolerances) -> Result<KrausSet> {
    let k = ks.len();
    let gram = ComplexMatrix::from_fn(k, k, |i, j| {
        ks.operators()[i].hs_inner(&ks.operators()[j])
    });
    let eig = hermitian_eig(&gram, tol)?;
    let lambda_max = eig.eigenvalues[0].max(0.0);
    if lambda_max == 0.0 {
        // all-zero sets are rejected at construction
        unreachable!("Kraus set with vanishing Gram matrix");
    }
    let cutoff = tol.rank_rel_tol * lambda_max;
    let n = ks.n();
    let mut kept = Vec::new();
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= cutoff {
            continue;
        }
        let mut op = ComplexMatrix::zeros(n, n);
        for (i, v) in ks.operators().iter().enumerate() {
            let coeff = eig.eigenvectors.get(i, idx);
            if coeff != Complex64::new(0.0, 0.0) {
                op = op.add(&v.scale(coeff));
            }
        }
        kept.push(op);
    }
    KrausSet::new(kept)
}

/// Applies the map: `sum_i v_i* a v_i`.
pub fn apply(ks: &KrausSet, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows() != ks.n() || a.cols() != ks.n() {
        return Err(Error::ShapeMismatch {
            op: "apply",
            details: format!("argument is {}x{}, channel acts on M{}", a.rows(), a.cols(), ks.n()),
        });
    }
    let mut out = ComplexMatrix::zeros(ks.n(), ks.n());
    for v in ks.operators() {
        out = out.add(&v.adjoint().matmul(a)?.matmul(v)?);
    }
    Ok(out)
}

/// Choi matrix of the map: `(1/n) sum_i |vec v_i><vec v_i|` on `C^{n^2}`.
///
/// Positive semidefinite by construction; trace one and marginal partial
/// traces `I/n` exactly when the set is UCPT.
pub fn choi(ks: &KrausSet) -> ComplexMatrix {
    let n = ks.n();
    let d = n * n;
    let inv_n = 1.0 / n as f64;
    let mut out = ComplexMatrix::zeros(d, d);
    for v in ks.operators() {
        let w = v.entries();
        for r in 0..d {
            if w[r] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for s in 0..d {
                let value = out.get(r, s) + w[r] * w[s].conj() * inv_n;
                out.set(r, s, value);
            }
        }
    }
    out
}

/// Evaluates the state induced by the map on a simple tensor `a (x) b`:
/// the normalized trace of `phi(a) * transpose(b)`.
///
/// The transpose (not the adjoint) of `b` is what makes both marginals of a
/// UCPT map equal to the normalized trace. The same number is
/// `<(phi(a) (x) b) xi, xi>` against the maximally entangled vector, and
/// equals the Hilbert-Schmidt pairing `tr(choi * (a (x) b))` under this
/// crate's tensor convention.
pub fn pairing(ks: &KrausSet, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if b.rows() != ks.n() || b.cols() != ks.n() {
        return Err(Error::ShapeMismatch {
            op: "pairing",
            details: format!("argument is {}x{}, channel acts on M{}", b.rows(), b.cols(), ks.n()),
        });
    }
    let image = apply(ks, a)?;
    let product = image.matmul(&b.transpose())?;
    Ok(product.trace() / Complex64::new(ks.n() as f64, 0.0))
}

/// Schur-multiplier description of a diagonal map.
#[derive(Debug, Clone)]
pub struct DiagonalProfile {
    /// Matrix `C` with `phi(A) = C o A` when the map is diagonal.
    pub c: ComplexMatrix,
    /// Largest deviation of any `phi(e_ij)` from a multiple of `e_ij`.
    pub residual: f64,
    pub is_diagonal: bool,
    /// Whether every operator of the reduced Kraus set is a diagonal matrix.
    /// Agrees with `is_diagonal` for completely positive maps.
    pub kraus_diagonal: bool,
}

/// Extracts the Schur multiplier `C` with `c[i][j] = phi(e_ij)_{ij}` and
/// measures how far the map is from acting entrywise.
pub fn diagonal_profile(ks: &KrausSet, tol: &Tolerances) -> Result<DiagonalProfile> {
    let n = ks.n();
    let mut c = ComplexMatrix::zeros(n, n);
    let mut residual = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let unit = ComplexMatrix::matrix_unit(n, i, j);
            let image = apply(ks, &unit)?;
            let cij = image.get(i, j);
            c.set(i, j, cij);
            residual = residual.max(image.sub(&unit.scale(cij)).frobenius_norm());
        }
    }
    let reduced = reduce_to_independent(ks, tol)?;
    let kraus_diagonal = reduced
        .operators()
        .iter()
        .all(|v| v.off_diagonal_norm() <= tol.residual_abs_tol);
    Ok(DiagonalProfile {
        c,
        residual,
        is_diagonal: residual <= tol.residual_abs_tol,
        kraus_diagonal,
    })
}
