//! Small dense linear algebra: Hermitian eigenvalues by cyclic Jacobi
//! rotations and the exponential of real (antisymmetric) matrices.
//!
//! Matrices here are tiny (d ≤ 16 for the Hermitian solver, at most 63×63
//! for rotation generators), so both routines favour robustness over speed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Dense complex matrix, row/column indexed as `m[(i, j)]`.
pub type CMatrix = DMatrix<Complex64>;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Unitary whose columns are the eigenvectors, ordered like `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Cyclic Jacobi on the Hermitian part of `m`.
    ///
    /// Each rotation first removes the phase of the pivot `a_pq` with a
    /// diagonal unitary and then applies an ordinary real Jacobi rotation.
    /// Sweeps stop once the off-diagonal Frobenius mass falls below
    /// `1e-15 · ‖m‖_F` (and never above `1e-13` absolute for unit-scale input).
    pub fn new(m: &CMatrix) -> Self {
        let n = m.nrows();
        assert_eq!(n, m.ncols(), "eigen-decomposition needs a square matrix");
        let mut a = (m + m.adjoint()).map(|z| z * 0.5);
        let mut v = CMatrix::identity(n, n);

        let scale = a.norm().max(f64::MIN_POSITIVE);
        let threshold = 1e-15 * scale;

        for _ in 0..JACOBI_MAX_SWEEPS {
            if off_diagonal_norm(&a) <= threshold {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let r = apq.norm();
                    if r <= f64::MIN_POSITIVE {
                        continue;
                    }
                    // Phase step: column q times e^{iψ}, row q times e^{-iψ}
                    // makes a_pq = |a_pq|.
                    let phase = Complex64::new(apq.re / r, -apq.im / r);
                    for k in 0..n {
                        a[(k, q)] *= phase;
                    }
                    for k in 0..n {
                        a[(q, k)] *= phase.conj();
                    }
                    for k in 0..n {
                        v[(k, q)] *= phase;
                    }

                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let theta = (aqq - app) / (2.0 * r);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;

                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * c - akq * s;
                        a[(k, q)] = akp * s + akq * c;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = apk * c - aqk * s;
                        a[(q, k)] = apk * s + aqk * c;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c - vkq * s;
                        v[(k, q)] = vkp * s + vkq * c;
                    }
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
        let values = order.iter().map(|&i| a[(i, i)].re).collect();
        let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
        Self { values, vectors }
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    HermitianEigen::new(m).values
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    HermitianEigen::new(m).min()
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `max |A - A†|` entry-wise.
pub fn hermiticity_deviation(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Frobenius distance between two complex matrices.
pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

/// Exponential of a real square matrix by scaling and squaring with a
/// truncated Taylor series.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 1/2; the
/// series is then summed until terms drop below machine precision (at most
/// 30 terms) and the result squared `s` times. For antisymmetric input the
/// output is orthogonal to roughly `1e-15 · 2^s`.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix exponential needs a square matrix");
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);

    let mut squarings = 0u32;
    let mut scaled_norm = norm1;
    while scaled_norm > 0.5 {
        scaled_norm *= 0.5;
        squarings += 1;
    }
    let scaled = a * 0.5f64.powi(squarings as i32);

    let mut result = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        result += &term;
        if term.amax() <= f64::EPSILON * 1e-2 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Orthonormal basis of the span of `vectors` by modified Gram–Schmidt with
/// one reorthogonalization pass. Vectors whose residual norm falls below
/// `rank_tol` relative to their original norm are dropped.
pub fn orthonormal_span(vectors: &[DVector<f64>], rank_tol: f64) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let original = v.norm();
        if original == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let residual = w.norm();
        if residual > rank_tol * original {
            basis.push(w / residual);
        }
    }
    basis
}
