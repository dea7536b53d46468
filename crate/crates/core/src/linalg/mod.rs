//! Dense complex linear algebra for operators on small Hilbert spaces.
//!
//! Everything here is double precision and row major. The two conventions
//! that the rest of the crate inherits are fixed in this module:
//!
//! * **Tensor index convention**: the composite index of the pair `(p, r)`
//!   in `C^m (x) C^n` is `p * n + r`, i.e. the first factor is major. See
//!   [`ComplexMatrix::kron`].
//! * **Vectorization** is row-major flattening, so `vectorize(a (x) b)` and
//!   the matrix-unit order agree with the tensor convention above.

use num_complex::Complex;

use crate::error::{Error, Result};

mod eig;
mod rank;

pub use eig::{hermitian_eig, EigenDecomposition};
pub use rank::{orthonormalize, rank};

/// Complex number type used throughout the crate.
pub type Complex64 = Complex<f64>;

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Numerical tolerances shared by the rank, spectral, and validation
/// routines.
///
/// `rank_rel_tol` is relative to the largest singular value (or eigenvalue,
/// for positive semidefinite inputs); the residual and off-diagonal
/// thresholds are absolute on unit-scale data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative cutoff deciding which singular values count towards rank.
    pub rank_rel_tol: f64,
    /// Absolute cutoff for residuals of algebraic identities (unitality,
    /// trace preservation, partial traces, projector defects).
    pub residual_abs_tol: f64,
    /// Off-diagonal Frobenius mass at which the Jacobi iteration stops.
    pub eig_off_diag_tol: f64,
    /// Sweep budget for the Jacobi iteration.
    pub eig_max_sweeps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_rel_tol: 1e-9,
            residual_abs_tol: 1e-10,
            eig_off_diag_tol: 1e-12,
            eig_max_sweeps: 100,
        }
    }
}

impl Tolerances {
    /// Validates the invariants: strictly positive thresholds and at least
    /// one sweep.
    pub fn validated(self) -> Result<Self> {
        let positive = self.rank_rel_tol > 0.0
            && self.residual_abs_tol > 0.0
            && self.eig_off_diag_tol > 0.0;
        let finite = self.rank_rel_tol.is_finite()
            && self.residual_abs_tol.is_finite()
            && self.eig_off_diag_tol.is_finite();
        if !positive || !finite {
            return Err(Error::InvalidParameter(
                "tolerances must be finite and strictly positive".into(),
            ));
        }
        if self.eig_max_sweeps < 1 {
            return Err(Error::InvalidParameter(
                "eig_max_sweeps must be at least 1".into(),
            ));
        }
        Ok(self)
    }

    /// Default tolerances with a different rank cutoff.
    pub fn with_rank_rel_tol(rank_rel_tol: f64) -> Self {
        Self {
            rank_rel_tol,
            ..Self::default()
        }
    }
}

/// Which tensor factor a partial trace sums over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSide {
    First,
    Second,
}

/// Dense complex matrix, stored row major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting size mismatches and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(
                "matrix dimensions must be positive".into(),
            ));
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                op: "new",
                details: format!("{}x{} needs {} entries, got {}", rows, cols, rows * cols, data.len()),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix by evaluating `f(row, col)` at every position.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C_ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { C_ONE } else { C_ZERO })
    }

    /// Matrix unit with a single 1 at `(i, j)` (zero-based).
    pub fn matrix_unit(n: usize, i: usize, j: usize) -> Self {
        assert!(i < n && j < n, "matrix unit index out of range");
        let mut m = Self::zeros(n, n);
        m.set(i, j, C_ONE);
        m
    }

    /// Square matrix with the given diagonal and zeros elsewhere.
    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { C_ZERO })
    }

    /// Column vector from a slice.
    pub fn column(entries: &[Complex64]) -> Self {
        Self {
            rows: entries.len(),
            cols: 1,
            data: entries.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.cols + j] = value;
    }

    /// Standard matrix product.
    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                op: "matmul",
                details: format!(
                    "{}x{} times {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            });
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == C_ZERO {
                    continue;
                }
                let lhs = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(lhs.iter()) {
                    *d += aik * b;
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Transpose without conjugation.
    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Kronecker product. The composite row index of `(p, r)` is
    /// `p * other.rows + r` (first factor major), and likewise for columns.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = ComplexMatrix::zeros(rows, cols);
        for p in 0..self.rows {
            for q in 0..self.cols {
                let apq = self.get(p, q);
                if apq == C_ZERO {
                    continue;
                }
                for r in 0..other.rows {
                    for s in 0..other.cols {
                        out.set(p * other.rows + r, q * other.cols + s, apq * other.get(r, s));
                    }
                }
            }
        }
        out
    }

    /// Entrywise (Schur) product.
    pub fn schur_product(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                op: "schur_product",
                details: format!(
                    "{}x{} against {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            });
        }
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a * b)
            .collect();
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Row-major flattening into a column vector. Linear and isometric for
    /// the Frobenius/Euclidean norms.
    pub fn vectorize(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows * self.cols,
            cols: 1,
            data: self.data.clone(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "add requires equal shapes"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "sub requires equal shapes"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace requires a square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius distance to another matrix of the same shape.
    pub fn distance(&self, other: &ComplexMatrix) -> f64 {
        self.sub(other).frobenius_norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm of `self - self*`; zero exactly when Hermitian.
    pub fn adjoint_defect(&self) -> f64 {
        assert!(self.is_square(), "adjoint defect requires a square matrix");
        let mut sum = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                sum += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        sum.sqrt()
    }

    /// Frobenius mass of the off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    sum += self.get(i, j).norm_sqr();
                }
            }
        }
        sum.sqrt()
    }

    /// Hilbert-Schmidt inner product `tr(self* other)`, conjugate linear in
    /// the first argument.
    pub fn hs_inner(&self, other: &ComplexMatrix) -> Complex64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "hs_inner requires equal shapes"
        );
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Normalized maximally entangled vector on `C^n (x) C^n`, as an `n^2 x 1`
/// column under the crate's tensor convention.
pub fn maximally_entangled_vector(n: usize) -> ComplexMatrix {
    let mut data = vec![C_ZERO; n * n];
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    for i in 0..n {
        data[i * n + i] = amp;
    }
    ComplexMatrix {
        rows: n * n,
        cols: 1,
        data,
    }
}

/// Traces out one tensor factor of an operator on `C^n (x) C^n`.
///
/// The input must be `n^2 x n^2`; the result is `n x n`. Under the
/// first-factor-major convention, tracing the first factor leaves the second
/// one and vice versa.
pub fn partial_trace(m: &ComplexMatrix, n: usize, side: TraceSide) -> Result<ComplexMatrix> {
    let d = n * n;
    if m.rows() != d || m.cols() != d {
        return Err(Error::ShapeMismatch {
            op: "partial_trace",
            details: format!("expected {}x{}, got {}x{}", d, d, m.rows(), m.cols()),
        });
    }
    let out = match side {
        TraceSide::First => ComplexMatrix::from_fn(n, n, |r, s| {
            (0..n).map(|p| m.get(p * n + r, p * n + s)).sum()
        }),
        TraceSide::Second => ComplexMatrix::from_fn(n, n, |p, q| {
            (0..n).map(|r| m.get(p * n + r, q * n + r)).sum()
        }),
    };
    Ok(out)
}
