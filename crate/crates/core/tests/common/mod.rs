//! Shared helpers for the integration suites: an independent rank oracle,
//! random inputs, stacked-matrix builders, and the seeded channel pool.

#![allow(dead_code)]

use mts_core::{
    constructions, ComplexMatrix, Complex64, KrausSet, MarginalState, SplitMix64, Tolerances,
};

/// Rank by Gaussian elimination with partial pivoting.
///
/// Deliberately independent of the library's Jacobi-based rank: pivots are
/// compared against `rel_tol` times the largest absolute entry of the input.
pub fn row_reduction_rank(m: &ComplexMatrix, rel_tol: f64) -> usize {
    let rows = m.rows();
    let cols = m.cols();
    let mut a: Vec<Vec<Complex64>> = (0..rows)
        .map(|i| (0..cols).map(|j| m.get(i, j)).collect())
        .collect();
    let scale = m.max_abs();
    if scale == 0.0 {
        return 0;
    }
    let threshold = rel_tol * scale;
    let mut rank = 0;
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        // largest pivot in this column
        let mut best = pivot_row;
        for r in (pivot_row + 1)..rows {
            if a[r][col].norm() > a[best][col].norm() {
                best = r;
            }
        }
        if a[best][col].norm() <= threshold {
            continue;
        }
        a.swap(pivot_row, best);
        let inv = Complex64::new(1.0, 0.0) / a[pivot_row][col];
        for c in col..cols {
            a[pivot_row][c] *= inv;
        }
        for r in 0..rows {
            if r == pivot_row {
                continue;
            }
            let factor = a[r][col];
            if factor.norm() == 0.0 {
                continue;
            }
            for c in col..cols {
                let sub = factor * a[pivot_row][c];
                a[r][c] -= sub;
            }
        }
        rank += 1;
        pivot_row += 1;
    }
    rank
}

/// Dense random Hermitian matrix with entries of order one.
pub fn random_hermitian(dim: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    let raw = ComplexMatrix::from_fn(dim, dim, |_, _| rng.next_complex_gaussian());
    raw.add(&raw.adjoint()).scale(Complex64::new(0.5, 0.0))
}

/// The bi-independence stack rebuilt from public operations: column
/// `(i, j)` is `[vec(v_i v_j*); vec(v_j* v_i)]`.
pub fn ls_stack(ks: &KrausSet) -> ComplexMatrix {
    let n = ks.n();
    let k = ks.len();
    let d = n * n;
    let mut stack = ComplexMatrix::zeros(2 * d, k * k);
    for (i, vi) in ks.operators().iter().enumerate() {
        for (j, vj) in ks.operators().iter().enumerate() {
            let col = i * k + j;
            let left = vi.matmul(&vj.adjoint()).unwrap().vectorize();
            let right = vj.adjoint().matmul(vi).unwrap().vectorize();
            for row in 0..d {
                stack.set(row, col, left.get(row, 0));
                stack.set(d + row, col, right.get(row, 0));
            }
        }
    }
    stack
}

/// The support-projection stack rebuilt from public operations: corner
/// basis columns followed by traceless-tensor-traceless columns.
pub fn ps_stack(s: &MarginalState, tol: &Tolerances) -> ComplexMatrix {
    let n = s.n();
    let d = n * n;
    let r = mts_core::state_rank(s, tol);
    let basis = mts_core::extremality::traceless_hermitian_basis(n);
    let m = basis.len();
    let mut stack = ComplexMatrix::zeros(d * d, r * r + m * m);
    let q = s.eigenvectors();
    for si in 0..r {
        for ti in 0..r {
            let col = si * r + ti;
            for i in 0..d {
                for j in 0..d {
                    stack.set(i * d + j, col, q.get(i, si) * q.get(j, ti).conj());
                }
            }
        }
    }
    for (ai, fa) in basis.iter().enumerate() {
        for (bi, fb) in basis.iter().enumerate() {
            let col = r * r + ai * m + bi;
            let prod = fa.kron(fb).vectorize();
            for row in 0..(d * d) {
                stack.set(row, col, prod.get(row, 0));
            }
        }
    }
    stack
}

pub fn isqrt(n: usize) -> usize {
    let mut m = (n as f64).sqrt() as usize;
    while m * m > n {
        m -= 1;
    }
    while (m + 1) * (m + 1) <= n {
        m += 1;
    }
    m
}

/// Seeded random channel pool: equal mixtures of random unitaries, random
/// diagonal UCPT maps, and diagonal perturbations of the Vandermonde family.
/// Kind selection and all randomness are deterministic in `(n, index, rng)`.
pub fn sample_channel(n: usize, index: usize, rng: &mut SplitMix64) -> KrausSet {
    let tol = Tolerances::default();
    match index % 3 {
        0 => {
            let count = 2 + index % 3;
            let unitaries: Vec<ComplexMatrix> = (0..count)
                .map(|_| constructions::random_unitary(n, rng))
                .collect();
            let weights = vec![1.0 / count as f64; count];
            constructions::mixture_of_unitaries(&weights, unitaries).unwrap()
        }
        1 => {
            let a = 2 + index % 2;
            constructions::random_diagonal_ucpt(a, n, rng.next_u64()).unwrap()
        }
        _ => {
            let a = isqrt(n).max(1);
            let extremal = constructions::diagonal_vandermonde(a, n)
                .unwrap()
                .operators()
                .to_vec();
            let base = constructions::random_diagonal_ucpt(a, n, rng.next_u64())
                .unwrap()
                .operators()
                .to_vec();
            let epsilon = [1e-1, 1e-2, 1e-3][(index / 3) % 3];
            let spec =
                constructions::PerturbationSpec::new(base, extremal, epsilon, &tol).unwrap();
            constructions::perturb_diagonal(&spec, &tol).unwrap()
        }
    }
}
