//! Density matrices, Bloch vectors and the purity/direction decomposition
//! `b = κ n` with `‖n‖ = √((d−1)/(2d))`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_deviation, min_eigenvalue, CMatrix};
use crate::su_basis::{StructureConstants, SuBasis};

/// Default slack for the smallest eigenvalue of a state.
pub const DEFAULT_TOL_PSD: f64 = 1e-10;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const ZERO_BLOCH_NORM: f64 = 1e-14;

/// Outradius `√((d−1)/(2d))` of the Bloch body.
pub fn outradius(dim: usize) -> f64 {
    let d = dim as f64;
    ((d - 1.0) / (2.0 * d)).sqrt()
}

/// Inradius `1/√(2d(d−1))` of the Bloch body.
pub fn inradius(dim: usize) -> f64 {
    let d = dim as f64;
    1.0 / (2.0 * d * (d - 1.0)).sqrt()
}

/// `(R_out, r_in)` for `dim ≥ 2`.
pub fn radii(dim: usize) -> Result<(f64, f64)> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok((outradius(dim), inradius(dim)))
}

/// Recovers d from a Bloch-vector length d² − 1.
pub fn dim_from_len(len: usize) -> Result<usize> {
    let d = ((len + 1) as f64).sqrt().round() as usize;
    if d < 2 || d * d != len + 1 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(d)
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, tol_psd: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() < 2 {
            return Err(Error::InvalidDimension(matrix.nrows()));
        }
        let herm = hermiticity_deviation(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min = min_eigenvalue(&matrix);
        if min < -tol_psd {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { matrix })
    }

    /// The maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            matrix: CMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// Real coordinates certified to describe a state.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector {
    dim: usize,
    coords: DVector<f64>,
}

impl BlochVector {
    pub fn new(coords: DVector<f64>, basis: &SuBasis, tol_psd: f64) -> Result<Self> {
        let check = is_bloch_vector(&coords, basis, tol_psd)?;
        if !check.is_state {
            return Err(Error::NotPositive(check.min_eigenvalue));
        }
        Ok(Self {
            dim: basis.dim(),
            coords,
        })
    }

    pub fn from_density(rho: &DensityMatrix, basis: &SuBasis) -> Result<Self> {
        Ok(Self {
            dim: basis.dim(),
            coords: bloch_from_density(rho, basis)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }
}

/// `b = κ n` with `κ ∈ [0, 1]` and `‖n‖ = R_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct PurityDecomposition {
    pub dim: usize,
    pub kappa: f64,
    pub direction: DVector<f64>,
}

impl PurityDecomposition {
    pub fn new(kappa: f64, direction: DVector<f64>) -> Result<Self> {
        let dim = dim_from_len(direction.len())?;
        if !(0.0..=1.0).contains(&kappa) {
            return Err(Error::KappaOutOfRange(kappa));
        }
        let r_out = outradius(dim);
        let norm = direction.norm();
        if (norm - r_out).abs() > 1e-12 {
            return Err(Error::NotOnOuterSphere { norm, r_out });
        }
        Ok(Self {
            dim,
            kappa,
            direction,
        })
    }

    pub fn bloch(&self) -> DVector<f64> {
        &self.direction * self.kappa
    }
}

fn check_len(b: &DVector<f64>, basis: &SuBasis) -> Result<()> {
    if b.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            found: b.len(),
        });
    }
    Ok(())
}

/// `ρ(b) = I/d + b·σ`. Positivity is not checked.
pub fn density_from_bloch(b: &DVector<f64>, basis: &SuBasis) -> Result<CMatrix> {
    check_len(b, basis)?;
    let dim = basis.dim();
    let mut m = basis.combine(b.as_slice())?;
    let diag = Complex64::new(1.0 / dim as f64, 0.0);
    for i in 0..dim {
        m[(i, i)] += diag;
    }
    Ok(m)
}

/// `b_a = Tr(ρ σ_a) / 2`.
pub fn bloch_from_density(rho: &DensityMatrix, basis: &SuBasis) -> Result<DVector<f64>> {
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: rho.dim(),
        });
    }
    Ok(DVector::from_vec(basis.coordinates(rho.matrix())?))
}

/// Splits `b` into purity index and direction. At `b = 0` the direction is
/// the first coordinate axis scaled to `R_out`.
pub fn decompose(b: &DVector<f64>) -> Result<PurityDecomposition> {
    let dim = dim_from_len(b.len())?;
    let r_out = outradius(dim);
    let norm = b.norm();
    if norm > r_out + 1e-12 {
        return Err(Error::OutsideOuterSphere { norm, r_out });
    }
    if norm < ZERO_BLOCH_NORM {
        let mut direction = DVector::zeros(b.len());
        direction[0] = r_out;
        return Ok(PurityDecomposition {
            dim,
            kappa: 0.0,
            direction,
        });
    }
    Ok(PurityDecomposition {
        dim,
        kappa: (norm / r_out).min(1.0),
        direction: b * (r_out / norm),
    })
}

/// Outcome of the eigenvalue membership test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityCheck {
    pub is_state: bool,
    pub min_eigenvalue: f64,
}

/// `b ∈ B(d)` iff `λ_min(ρ(b)) ≥ −tol_psd`.
pub fn is_bloch_vector(b: &DVector<f64>, basis: &SuBasis, tol_psd: f64) -> Result<PositivityCheck> {
    let rho = density_from_bloch(b, basis)?;
    let min = min_eigenvalue(&rho);
    Ok(PositivityCheck {
        is_state: min >= -tol_psd,
        min_eigenvalue: min,
    })
}

/// `(b1 ⋆ b2)_a = d_abc b1_b b2_c`.
pub fn star_product(
    b1: &DVector<f64>,
    b2: &DVector<f64>,
    sc: &StructureConstants,
) -> Result<DVector<f64>> {
    let n = sc.dim() * sc.dim() - 1;
    for b in [b1, b2] {
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
    }
    let mut out = DVector::zeros(n);
    for &(a, b, c, d) in sc.d_terms() {
        out[a] += d * b1[b] * b2[c];
    }
    Ok(out)
}

/// Residual `‖b ⋆ b − ((d−2)/d) b‖` for an outer-sphere point.
pub fn star_residual(b: &DVector<f64>, sc: &StructureConstants) -> Result<f64> {
    let d = sc.dim() as f64;
    let star = star_product(b, b, sc)?;
    Ok((star - b * ((d - 2.0) / d)).norm())
}

/// Pure-state criterion for points with `‖b‖ = R_out`:
/// `b ∈ B(d) ⟺ b ⋆ b = ((d−2)/d) b`.
pub fn pure_state_test(b: &DVector<f64>, sc: &StructureConstants, tol: f64) -> Result<bool> {
    let r_out = outradius(sc.dim());
    let norm = b.norm();
    if (norm - r_out).abs() > tol {
        return Err(Error::NotOnOuterSphere { norm, r_out });
    }
    Ok(star_residual(b, sc)? <= tol)
}

/// Cosine of the angle between two directions (0 if either is zero).
pub fn cos_angle(n1: &DVector<f64>, n2: &DVector<f64>) -> f64 {
    let denom = n1.norm() * n2.norm();
    if denom == 0.0 {
        return 0.0;
    }
    (n1.dot(n2) / denom).clamp(-1.0, 1.0)
}

/// `Tr(ρ1 ρ2) = (1 + (d−1) κ1 κ2 cos θ12) / d`.
pub fn state_overlap(p1: &PurityDecomposition, p2: &PurityDecomposition) -> Result<f64> {
    if p1.dim != p2.dim {
        return Err(Error::DimensionMismatch {
            expected: p1.dim,
            found: p2.dim,
        });
    }
    let d = p1.dim as f64;
    let cos = cos_angle(&p1.direction, &p2.direction);
    Ok((1.0 + (d - 1.0) * p1.kappa * p2.kappa * cos) / d)
}

/// Largest angle between two Bloch directions that share purity `kappa`.
pub fn max_angle(kappa: f64, dim: usize) -> Result<f64> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::KappaOutOfRange(kappa));
    }
    let x = kappa * kappa * (dim as f64 - 1.0);
    if x <= 1.0 {
        Ok(std::f64::consts::PI)
    } else {
        Ok((-1.0 / x).acos())
    }
}

/// Largest κ with `ρ(κ, n)` a state: `−1 / (d · λ_min(n·σ))`.
pub fn kappa_max_along(n: &DVector<f64>, basis: &SuBasis) -> Result<f64> {
    check_len(n, basis)?;
    let norm = n.norm();
    if norm == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let r_out = outradius(basis.dim());
    if (norm - r_out).abs() > 1e-10 {
        return Err(Error::NotOnOuterSphere { norm, r_out });
    }
    let m = basis.combine(n.as_slice())?;
    let lambda = min_eigenvalue(&m);
    if lambda >= 0.0 {
        return Err(Error::Internal(format!(
            "traceless nonzero matrix has nonnegative minimum eigenvalue {lambda}"
        )));
    }
    Ok(-1.0 / (basis.dim() as f64 * lambda))
}
