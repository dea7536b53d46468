//! Explicit channel families: the maximal-rank fixtures on M3 and M4, the
//! rank-n family for general n, the diagonal Vandermonde family, diagonal
//! perturbations, and seeded random generators for searches and negative
//! controls.

use std::f64::consts::TAU;

use crate::channel::{validate_ucpt, KrausSet};
use crate::error::{Error, Result};
use crate::extremality::ls_bi_independence;
use crate::linalg::{orthonormalize, Complex64, ComplexMatrix, Tolerances};
use crate::rng::SplitMix64;

const UNITARY_TOL: f64 = 1e-10;

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Builds an operator as a sum of scaled matrix units (1-based indices).
fn from_units(n: usize, terms: &[(f64, usize, usize)]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for &(coeff, i, j) in terms {
        m.set(i - 1, j - 1, m.get(i - 1, j - 1) + real(coeff));
    }
    m
}

/// Extremal UCPT map on M3 with four Kraus operators — the maximal rank on
/// `C^3 (x) C^3`. Operators are `w_i / 2` with
///
/// ```text
/// w1 = e11,            w2 = e12 + sqrt(2) e23,
/// w3 = sqrt(2) e21 + sqrt(3) e32,   w4 = e31 + sqrt(2) e13.
/// ```
pub fn construct_n3() -> KrausSet {
    let s2 = 2.0_f64.sqrt();
    let s3 = 3.0_f64.sqrt();
    let ws = [
        from_units(3, &[(1.0, 1, 1)]),
        from_units(3, &[(1.0, 1, 2), (s2, 2, 3)]),
        from_units(3, &[(s2, 2, 1), (s3, 3, 2)]),
        from_units(3, &[(1.0, 3, 1), (s2, 1, 3)]),
    ];
    let operators = ws.iter().map(|w| w.scale(real(0.5))).collect();
    KrausSet::new(operators).expect("fixture operators are well formed")
}

/// Extremal UCPT map on M4 with five Kraus operators — the maximal rank on
/// `C^4 (x) C^4`. Operators are `w_i / 2` with
///
/// ```text
/// w1 = e13 + e32,              w2 = sqrt(2) e24 + sqrt(2) e43,
/// w3 = sqrt(2) e14 + sqrt(3) e31,   w4 = e21 + sqrt(2) e42,
/// w5 = e12 + e23.
/// ```
pub fn construct_n4() -> KrausSet {
    let s2 = 2.0_f64.sqrt();
    let s3 = 3.0_f64.sqrt();
    let ws = [
        from_units(4, &[(1.0, 1, 3), (1.0, 3, 2)]),
        from_units(4, &[(s2, 2, 4), (s2, 4, 3)]),
        from_units(4, &[(s2, 1, 4), (s3, 3, 1)]),
        from_units(4, &[(1.0, 2, 1), (s2, 4, 2)]),
        from_units(4, &[(1.0, 1, 2), (1.0, 2, 3)]),
    ];
    let operators = ws.iter().map(|w| w.scale(real(0.5))).collect();
    KrausSet::new(operators).expect("fixture operators are well formed")
}

/// UCPT map on M_n with n Kraus operators:
///
/// ```text
/// v_1 = sqrt((n-2)/(n-1)) (e22 + ... + enn),
/// v_i = (e_{1i} + e_{i1}) / sqrt(n-1)      for 2 <= i <= n.
/// ```
///
/// Certification (not this constructor) decides extremality; the family is
/// known extremal for n >= 5 and comes out extremal for n = 3, 4 as well.
pub fn construct_general(n: usize) -> Result<KrausSet> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "the rank-n family needs n >= 3, got {}",
            n
        )));
    }
    let head = ((n as f64 - 2.0) / (n as f64 - 1.0)).sqrt();
    let off = 1.0 / (n as f64 - 1.0).sqrt();
    let mut operators = Vec::with_capacity(n);
    let mut v1 = ComplexMatrix::zeros(n, n);
    for j in 1..n {
        v1.set(j, j, real(head));
    }
    operators.push(v1);
    for i in 1..n {
        let mut vi = ComplexMatrix::zeros(n, n);
        vi.set(0, i, real(off));
        vi.set(i, 0, real(off));
        operators.push(vi);
    }
    KrausSet::new(operators)
}

/// Phase schedule whose ordered pairwise differences are distinct mod 2 pi.
#[derive(Debug, Clone)]
pub struct ThetaSchedule {
    a: usize,
    thetas: Vec<f64>,
}

impl ThetaSchedule {
    pub fn a(&self) -> usize {
        self.a
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }
}

/// Deterministic schedule `theta_i = 2 pi 2^(i-1) / 2^(a+1)`.
///
/// Differences of distinct powers of two are distinct integers and all
/// resulting angle differences lie in `(-pi, pi)`, so they are distinct
/// mod 2 pi; the invariant is still verified numerically on the output
/// (pairwise separation above 1e-6).
pub fn theta_schedule(a: usize) -> Result<ThetaSchedule> {
    if a < 2 {
        return Err(Error::InvalidParameter(format!(
            "theta_schedule needs a >= 2, got {}",
            a
        )));
    }
    let thetas: Vec<f64> = (1..=a)
        .map(|i| TAU * (i as f64 - 1.0 - (a as f64 + 1.0)).exp2())
        .collect();

    // collect ordered differences, reduce to [0, 2 pi), and check separation
    let mut diffs = Vec::with_capacity(a * (a - 1));
    for i in 0..a {
        for j in 0..a {
            if i != j {
                diffs.push((thetas[i] - thetas[j]).rem_euclid(TAU));
            }
        }
    }
    diffs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut min_gap = f64::INFINITY;
    for w in diffs.windows(2) {
        min_gap = min_gap.min(w[1] - w[0]);
    }
    min_gap = min_gap.min(diffs[0] + TAU - diffs[diffs.len() - 1]);
    if min_gap <= 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "theta schedule for a = {} has difference separation {:.3e}",
            a, min_gap
        )));
    }
    Ok(ThetaSchedule { a, thetas })
}

/// Blocks of the diagonal Vandermonde construction for `a` operators on M_n.
///
/// Written as rows of diagonal entries, operator `i` is the concatenation of
/// an identity-block head of length `a` (a one in slot `i`), a body of
/// length `l = a^2 - a` with entries `b_{ij} = e^{j i theta_i} / sqrt(a)`,
/// and `n - a^2` constant padding entries `1 / sqrt(a)`. Every body and
/// padding column has unit squared norm across operators.
#[derive(Debug, Clone)]
pub struct DiagonalVandermondeSpec {
    pub a: usize,
    pub n: usize,
    /// Head plus body length, `a^2`.
    pub m: usize,
    /// Body length, `a^2 - a`.
    pub l: usize,
    /// Body entries, `a` rows of length `l`.
    pub body: Vec<Vec<Complex64>>,
    /// Padding entries, `a` rows of length `n - m`.
    pub padding: Vec<Vec<Complex64>>,
}

impl DiagonalVandermondeSpec {
    pub fn new(a: usize, n: usize) -> Result<Self> {
        if a < 1 {
            return Err(Error::InvalidParameter("a must be at least 1".into()));
        }
        if a * a > n {
            return Err(Error::InvalidParameter(format!(
                "the diagonal family needs a^2 <= n, got a = {}, n = {}",
                a, n
            )));
        }
        let m = a * a;
        let l = m - a;
        let inv_sqrt_a = 1.0 / (a as f64).sqrt();
        let body: Vec<Vec<Complex64>> = if a >= 2 {
            let schedule = theta_schedule(a)?;
            (0..a)
                .map(|i| {
                    (1..=l)
                        .map(|power| {
                            let angle = power as f64 * schedule.thetas()[i];
                            Complex64::new(angle.cos(), angle.sin()) * real(inv_sqrt_a)
                        })
                        .collect()
                })
                .collect()
        } else {
            vec![Vec::new()]
        };
        let padding: Vec<Vec<Complex64>> = (0..a)
            .map(|_| vec![real(inv_sqrt_a); n - m])
            .collect();

        // column normalization across operators
        for col in 0..l {
            let sum: f64 = body.iter().map(|row| row[col].norm_sqr()).sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "body column {} has squared norm {}",
                    col, sum
                )));
            }
        }
        for col in 0..(n - m) {
            let sum: f64 = padding.iter().map(|row| row[col].norm_sqr()).sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "padding column {} has squared norm {}",
                    col, sum
                )));
            }
        }
        Ok(Self { a, n, m, l, body, padding })
    }

    /// Assembles the diagonal Kraus operators.
    pub fn kraus_set(&self) -> KrausSet {
        let operators: Vec<ComplexMatrix> = (0..self.a)
            .map(|i| {
                let mut diag = vec![Complex64::new(0.0, 0.0); self.n];
                diag[i] = real(1.0);
                for (offset, &z) in self.body[i].iter().enumerate() {
                    diag[self.a + offset] = z;
                }
                for (offset, &z) in self.padding[i].iter().enumerate() {
                    diag[self.m + offset] = z;
                }
                ComplexMatrix::diagonal(&diag)
            })
            .collect();
        KrausSet::new(operators).expect("vandermonde operators are well formed")
    }
}

/// Diagonal UCPT map on M_n with `a` linearly independent diagonal Kraus
/// operators, extremal for every `a^2 <= n`. For `a = 1` this degenerates to
/// a single diagonal unitary (the identity).
pub fn diagonal_vandermonde(a: usize, n: usize) -> Result<KrausSet> {
    Ok(DiagonalVandermondeSpec::new(a, n)?.kraus_set())
}

/// Inputs for the diagonal perturbation: a base diagonal UCPT list `u`
/// (zero operators allowed) and an extremal diagonal UCPT list `v` of the
/// same length, blended as `w_i = u_i + epsilon v_i`.
#[derive(Debug, Clone)]
pub struct PerturbationSpec {
    pub a: usize,
    pub n: usize,
    base: Vec<ComplexMatrix>,
    extremal: Vec<ComplexMatrix>,
    pub epsilon: f64,
}

impl PerturbationSpec {
    /// Validates the invariants: both lists diagonal and of equal length,
    /// `u` UCPT, `v` UCPT and extremal by the bi-independence test.
    pub fn new(
        base: Vec<ComplexMatrix>,
        extremal: Vec<ComplexMatrix>,
        epsilon: f64,
        tol: &Tolerances,
    ) -> Result<Self> {
        if base.len() != extremal.len() || base.is_empty() {
            return Err(Error::InvalidParameter(
                "base and extremal lists must have the same positive length".into(),
            ));
        }
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::InvalidParameter("epsilon must be finite and >= 0".into()));
        }
        let a = base.len();
        let n = base[0].rows();
        for op in base.iter().chain(extremal.iter()) {
            if !op.is_square() || op.rows() != n {
                return Err(Error::ShapeMismatch {
                    op: "PerturbationSpec::new",
                    details: "all operators must be n x n".into(),
                });
            }
            if op.off_diagonal_norm() > tol.residual_abs_tol {
                return Err(Error::InvalidParameter(
                    "perturbation operators must be diagonal".into(),
                ));
            }
        }
        let base_set = KrausSet::new(base.clone())?;
        let base_report = validate_ucpt(&base_set, tol)?;
        if !base_report.is_ucpt {
            return Err(Error::NotUcpt {
                unital: base_report.unital_residual,
                trace: base_report.trace_residual,
            });
        }
        let extremal_set = KrausSet::new(extremal.clone())?;
        let extremal_report = validate_ucpt(&extremal_set, tol)?;
        if !extremal_report.is_ucpt {
            return Err(Error::NotUcpt {
                unital: extremal_report.unital_residual,
                trace: extremal_report.trace_residual,
            });
        }
        // The direction must be independent as given: its products, not
        // those of some shorter reduction, control the blended map.
        if extremal_report.kraus_count_reduced != extremal_set.len() {
            return Err(Error::NotReduced {
                count: extremal_set.len(),
                independent: extremal_report.kraus_count_reduced,
            });
        }
        let cert = ls_bi_independence(&extremal_set, tol)?;
        if !cert.is_extremal {
            return Err(Error::InvalidParameter(
                "the extremal list must certify extremal".into(),
            ));
        }
        Ok(Self { a, n, base, extremal, epsilon })
    }

    pub fn base(&self) -> &[ComplexMatrix] {
        &self.base
    }

    pub fn extremal(&self) -> &[ComplexMatrix] {
        &self.extremal
    }
}

/// Perturbs the base map towards the extremal one and renormalizes:
/// `w_i = u_i + epsilon v_i`, then `w_i S^{-1/2}` with `S = sum w_i* w_i`.
///
/// All operators are diagonal, so `S` is a positive diagonal matrix, the
/// entrywise inverse square root is exact, and unitality coincides with
/// trace preservation. Errors if some diagonal entry of `S` is not safely
/// positive at the given epsilon. For `epsilon = 0` the output is the base
/// list itself.
pub fn perturb_diagonal(spec: &PerturbationSpec, tol: &Tolerances) -> Result<KrausSet> {
    let n = spec.n;
    let eps = real(spec.epsilon);
    let blended: Vec<ComplexMatrix> = spec
        .base
        .iter()
        .zip(spec.extremal.iter())
        .map(|(u, v)| u.add(&v.scale(eps)))
        .collect();
    let mut normalizer = vec![0.0_f64; n];
    for w in &blended {
        for j in 0..n {
            normalizer[j] += w.get(j, j).norm_sqr();
        }
    }
    let min_entry = normalizer.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_entry <= tol.residual_abs_tol {
        return Err(Error::DegenerateEpsilon { min_entry });
    }
    let scale: Vec<f64> = normalizer.iter().map(|&s| 1.0 / s.sqrt()).collect();
    let operators: Vec<ComplexMatrix> = blended
        .iter()
        .map(|w| {
            ComplexMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    w.get(i, i) * real(scale[i])
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    KrausSet::new(operators)
}

/// Channel of a single unitary, the rank-one extremal baseline.
pub fn unitary_channel(u: ComplexMatrix) -> Result<KrausSet> {
    if !u.is_square() {
        return Err(Error::ShapeMismatch {
            op: "unitary_channel",
            details: format!("{}x{}", u.rows(), u.cols()),
        });
    }
    let residual = u
        .adjoint()
        .matmul(&u)?
        .distance(&ComplexMatrix::identity(u.rows()));
    if residual > UNITARY_TOL {
        return Err(Error::NotUnitary { residual });
    }
    KrausSet::new(vec![u])
}

/// Convex mixture of unitary channels with Kraus operators
/// `sqrt(p_i) U_i` — the canonical non-extremal family for two or more
/// distinct unitaries.
pub fn mixture_of_unitaries(weights: &[f64], unitaries: Vec<ComplexMatrix>) -> Result<KrausSet> {
    if weights.len() != unitaries.len() || weights.is_empty() {
        return Err(Error::InvalidParameter(
            "weights and unitaries must have the same positive length".into(),
        ));
    }
    if weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
        return Err(Error::InvalidParameter("weights must be strictly positive".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "weights must sum to 1, got {}",
            total
        )));
    }
    let n = unitaries[0].rows();
    for u in &unitaries {
        if !u.is_square() || u.rows() != n {
            return Err(Error::ShapeMismatch {
                op: "mixture_of_unitaries",
                details: "all unitaries must be n x n".into(),
            });
        }
        let residual = u.adjoint().matmul(u)?.distance(&ComplexMatrix::identity(n));
        if residual > UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
    }
    KrausSet::with_weights(weights, unitaries)
}

/// Seeded random diagonal UCPT map: an `a x n` array of complex Gaussian
/// entries with every column normalized to unit norm. For diagonal
/// operators `v* v = v v*`, so column normalization alone makes the map
/// UCPT.
pub fn random_diagonal_ucpt(a: usize, n: usize, seed: u64) -> Result<KrausSet> {
    if a < 1 || n < 1 {
        return Err(Error::InvalidParameter("a and n must be at least 1".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let mut rows = vec![vec![Complex64::new(0.0, 0.0); n]; a];
    // drawn column by column, then normalized in place
    for j in 0..n {
        let mut norm_sq = 0.0;
        for row in rows.iter_mut() {
            let z = rng.next_complex_gaussian();
            norm_sq += z.norm_sqr();
            row[j] = z;
        }
        let inv = real(1.0 / norm_sq.sqrt());
        for row in rows.iter_mut() {
            row[j] *= inv;
        }
    }
    let operators = rows
        .iter()
        .map(|row| ComplexMatrix::diagonal(row))
        .collect();
    KrausSet::new(operators)
}

/// Random unitary as the orthonormalized column span of a complex Gaussian
/// matrix.
pub fn random_unitary(n: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    let gauss = ComplexMatrix::from_fn(n, n, |_, _| rng.next_complex_gaussian());
    let q = orthonormalize(&gauss, &Tolerances::default());
    assert_eq!(q.cols(), n, "Gaussian sample was rank deficient");
    q
}
