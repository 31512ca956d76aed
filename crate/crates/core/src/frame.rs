//! Regular-simplex directional frames in R^(d²−1), their rotations, and the
//! outcome-count bounds that follow from the simplex angle.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::bloch::{dim_from_len, outradius};
use crate::error::{Error, Result};
use crate::linalg::{expm, orthonormal_span};

/// Tolerance used when frames are (re)validated after construction.
pub const FRAME_TOL: f64 = 1e-10;

/// N directional vectors of norm `R_out` in R^(d²−1).
///
/// [`DirectionalFrame::from_vectors`] only checks shapes; the regular-simplex
/// conditions are checked by [`validate_frame`], and frames produced by
/// [`canonical_frame`] and [`rotate_frame`] are always revalidated.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalFrame {
    dim: usize,
    vectors: Vec<DVector<f64>>,
}

impl DirectionalFrame {
    pub fn from_vectors(dim: usize, vectors: Vec<DVector<f64>>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let max = dim * dim;
        if vectors.len() < 2 || vectors.len() > max {
            return Err(Error::OutcomeCountOutOfRange {
                dim,
                count: vectors.len(),
                max,
            });
        }
        for v in &vectors {
            if v.len() != max - 1 {
                return Err(Error::DimensionMismatch {
                    expected: max - 1,
                    found: v.len(),
                });
            }
        }
        Ok(Self { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    fn checked(self) -> Result<Self> {
        let report = validate_frame(&self, FRAME_TOL);
        if report.passed() {
            Ok(self)
        } else {
            Err(Error::InvalidFrame(report.describe()))
        }
    }
}

/// Rotation of R^(d²−1) given as `exp(A)`, A antisymmetric with its strict
/// upper triangle (row-major) in `generator_coefficients`.
#[derive(Debug, Clone, PartialEq)]
pub struct Orientation {
    pub dim: usize,
    pub generator_coefficients: Vec<f64>,
}

impl Orientation {
    /// Number of coefficients for a given d: m(m−1)/2 with m = d² − 1.
    pub fn coefficient_count(dim: usize) -> usize {
        let m = dim * dim - 1;
        m * (m - 1) / 2
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            generator_coefficients: vec![0.0; Self::coefficient_count(dim)],
        }
    }

    /// Coefficients drawn uniformly from [−π, π].
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let generator_coefficients = (0..Self::coefficient_count(dim))
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        Self {
            dim,
            generator_coefficients,
        }
    }

    pub fn generator(&self) -> Result<DMatrix<f64>> {
        let m = self.dim * self.dim - 1;
        if self.generator_coefficients.len() != Self::coefficient_count(self.dim) {
            return Err(Error::DimensionMismatch {
                expected: Self::coefficient_count(self.dim),
                found: self.generator_coefficients.len(),
            });
        }
        let mut a = DMatrix::zeros(m, m);
        let mut k = 0;
        for i in 0..m {
            for j in (i + 1)..m {
                let c = self.generator_coefficients[k];
                a[(i, j)] = c;
                a[(j, i)] = -c;
                k += 1;
            }
        }
        Ok(a)
    }

    /// The orthogonal matrix `exp(A)`.
    pub fn rotation(&self) -> Result<DMatrix<f64>> {
        Ok(expm(&self.generator()?))
    }
}

/// Regular simplex frame with its vertices on the first N−1 axes.
///
/// Vertex k is placed using axis k: its component there is fixed by the unit
/// norm, and every later vertex gets the component that makes its inner
/// product with vertex k equal to −1/(N−1). Unit vectors are then scaled to
/// `R_out`.
pub fn canonical_frame(dim: usize, count: usize) -> Result<DirectionalFrame> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let max = dim * dim;
    if count < 2 || count > max {
        return Err(Error::OutcomeCountOutOfRange { dim, count, max });
    }
    let target = -1.0 / (count as f64 - 1.0);
    let axes = count - 1;
    let mut unit: Vec<Vec<f64>> = vec![vec![0.0; axes]; count];
    for k in 0..axes {
        let used: f64 = unit[k][..k].iter().map(|x| x * x).sum();
        let pivot = (1.0 - used).max(0.0).sqrt();
        unit[k][k] = pivot;
        for i in (k + 1)..count {
            let partial: f64 = (0..k).map(|j| unit[i][j] * unit[k][j]).sum();
            unit[i][k] = (target - partial) / pivot;
        }
    }
    let r = outradius(dim);
    let vectors = unit
        .into_iter()
        .map(|u| {
            let mut v = DVector::zeros(max - 1);
            for (j, x) in u.into_iter().enumerate() {
                v[j] = x * r;
            }
            v
        })
        .collect();
    DirectionalFrame { dim, vectors }.checked()
}

/// Applies a precomputed rotation matrix and revalidates the frame.
pub fn rotate_frame_by(
    frame: &DirectionalFrame,
    rotation: &DMatrix<f64>,
) -> Result<DirectionalFrame> {
    let m = frame.dim * frame.dim - 1;
    if rotation.nrows() != m || rotation.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: rotation.nrows(),
        });
    }
    let vectors = frame.vectors.iter().map(|v| rotation * v).collect();
    DirectionalFrame {
        dim: frame.dim,
        vectors,
    }
    .checked()
}

/// Rotates every vector by `exp(A)`.
pub fn rotate_frame(
    frame: &DirectionalFrame,
    orientation: &Orientation,
) -> Result<DirectionalFrame> {
    if orientation.dim != frame.dim {
        return Err(Error::DimensionMismatch {
            expected: frame.dim,
            found: orientation.dim,
        });
    }
    rotate_frame_by(frame, &orientation.rotation()?)
}

/// Canonical frame in a random orientation.
pub fn random_frame<R: Rng + ?Sized>(
    dim: usize,
    count: usize,
    rng: &mut R,
) -> Result<DirectionalFrame> {
    let canonical = canonical_frame(dim, count)?;
    rotate_frame(&canonical, &Orientation::random(dim, rng))
}

/// Deviations of a frame from the regular-simplex conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameReport {
    pub max_norm_deviation: f64,
    pub max_cosine_deviation: f64,
    pub sum_norm: f64,
    /// Smallest pairwise distance between vectors.
    pub min_separation: f64,
    pub tol: f64,
}

impl FrameReport {
    pub fn passed(&self) -> bool {
        self.max_norm_deviation <= self.tol
            && self.max_cosine_deviation <= self.tol
            && self.sum_norm <= self.tol
            && self.min_separation > self.tol
    }

    pub fn describe(&self) -> String {
        format!(
            "norm deviation {:e}, cosine deviation {:e}, |sum| {:e}, min separation {:e} (tol {:e})",
            self.max_norm_deviation, self.max_cosine_deviation, self.sum_norm, self.min_separation, self.tol
        )
    }
}

/// Norms, pairwise cosines against −1/(N−1), and the vector sum.
pub fn validate_frame(frame: &DirectionalFrame, tol: f64) -> FrameReport {
    let r = outradius(frame.dim);
    let n = frame.count();
    let target = -1.0 / (n as f64 - 1.0);
    let mut report = FrameReport {
        max_norm_deviation: 0.0,
        max_cosine_deviation: 0.0,
        sum_norm: 0.0,
        min_separation: f64::INFINITY,
        tol,
    };
    let mut sum = DVector::zeros(frame.vectors[0].len());
    for (i, v) in frame.vectors.iter().enumerate() {
        report.max_norm_deviation = report.max_norm_deviation.max((v.norm() - r).abs());
        sum += v;
        for w in &frame.vectors[(i + 1)..] {
            let denom = v.norm() * w.norm();
            let cos = if denom > 0.0 { v.dot(w) / denom } else { 0.0 };
            report.max_cosine_deviation = report.max_cosine_deviation.max((cos - target).abs());
            report.min_separation = report.min_separation.min((v - w).norm());
        }
    }
    report.sum_norm = sum.norm();
    report
}

/// Validates raw vectors; rejects counts outside [2, d²] before any check.
pub fn validate_vectors(dim: usize, vectors: Vec<DVector<f64>>, tol: f64) -> Result<FrameReport> {
    let frame = DirectionalFrame::from_vectors(dim, vectors)?;
    Ok(validate_frame(&frame, tol))
}

/// Minimum number of outcomes for a symmetric measurement with purity `kappa`.
///
/// `κ²(d−1)` within 1e-12 of an integer is snapped to it before the ceiling,
/// so exact boundary values such as κ = 1 are not pushed up by rounding.
pub fn n_min(kappa: f64, dim: usize) -> Result<usize> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::KappaOutOfRange(kappa));
    }
    let x = kappa * kappa * (dim as f64 - 1.0);
    let snapped = if (x - x.round()).abs() <= 1e-12 {
        x.round()
    } else {
        x
    };
    if snapped <= 1.0 {
        Ok(2)
    } else {
        Ok(snapped.ceil() as usize + 1)
    }
}

/// Probability-simplex vertices `t_i = ((N−1)/(d−1)) n_i`.
pub fn probability_simplex_vertices(frame: &DirectionalFrame) -> Vec<DVector<f64>> {
    let scale = (frame.count() as f64 - 1.0) / (frame.dim as f64 - 1.0);
    frame.vectors.iter().map(|v| v * scale).collect()
}

/// Dimension of the span of the frame vectors.
pub fn frame_rank(frame: &DirectionalFrame, rank_tol: f64) -> usize {
    orthonormal_span(&frame.vectors, rank_tol).len()
}

/// Infers d from vector lengths and wraps the vectors.
pub fn frame_from_vectors(vectors: Vec<DVector<f64>>) -> Result<DirectionalFrame> {
    let len = vectors
        .first()
        .map(|v| v.len())
        .ok_or_else(|| Error::InvalidFrame("empty frame".into()))?;
    DirectionalFrame::from_vectors(dim_from_len(len)?, vectors)
}
