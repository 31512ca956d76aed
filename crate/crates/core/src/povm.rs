//! Symmetric POVMs `E_i = (d/N) ρ(κ, n_i)` built on regular-simplex frames.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::bloch::density_from_bloch;
use crate::error::{Error, Result};
use crate::frame::{n_min, validate_frame, DirectionalFrame, FRAME_TOL};
use crate::linalg::{frobenius_distance, hermitian_eigenvalues, trace_product, CMatrix};
use crate::su_basis::SuBasis;

/// Frobenius distance at or below which two elements count as equal.
pub const DISTINCT_TOL: f64 = 1e-8;
/// Pairs closer than this (but still distinct) are flagged as near-coincident.
pub const NEAR_COINCIDENT_TOL: f64 = 1e-4;
/// Allowed gap between measured traces and the closed forms at construction.
pub const TRACE_LAW_TOL: f64 = 1e-10;

/// A symmetric measurement together with the (κ, frame) that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPovm {
    dim: usize,
    kappa: f64,
    frame: DirectionalFrame,
    elements: Vec<CMatrix>,
    alpha: f64,
    beta: f64,
}

/// `β = d(d−1)κ² / (N(N−1))`, `α = (d/N − β)/N`.
pub fn closed_form_alpha_beta(dim: usize, count: usize, kappa: f64) -> (f64, f64) {
    let d = dim as f64;
    let n = count as f64;
    let beta = d * (d - 1.0) * kappa * kappa / (n * (n - 1.0));
    let alpha = (d / n - beta) / n;
    (alpha, beta)
}

/// Mean off-diagonal `Tr(E_i E_j)` and the diagonal excess over it.
fn measured_alpha_beta(elements: &[CMatrix]) -> (f64, f64) {
    let n = elements.len();
    let mut off = 0.0;
    let mut diag = 0.0;
    for i in 0..n {
        for j in 0..n {
            let t = trace_product(&elements[i], &elements[j]).re;
            if i == j {
                diag += t;
            } else {
                off += t;
            }
        }
    }
    let alpha = off / (n * (n - 1)) as f64;
    (alpha, diag / n as f64 - alpha)
}

/// Largest `|Tr(E_i E_j) − (α + β δ_ij)|`.
fn trace_law_residual(elements: &[CMatrix], alpha: f64, beta: f64) -> f64 {
    let n = elements.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let expected = if i == j { alpha + beta } else { alpha };
            let t = trace_product(&elements[i], &elements[j]);
            worst = worst.max((t - Complex64::new(expected, 0.0)).norm());
        }
    }
    worst
}

/// Builds `E_i = (d/N)(I/d + κ n_i·σ)` and checks positivity and the trace laws.
pub fn build_symmetric_povm(
    kappa: f64,
    frame: &DirectionalFrame,
    basis: &SuBasis,
    tol_psd: f64,
) -> Result<SymmetricPovm> {
    let dim = frame.dim();
    let count = frame.count();
    if basis.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: basis.dim(),
        });
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::KappaOutOfRange(kappa));
    }
    let minimum = n_min(kappa, dim)?;
    if count < minimum {
        return Err(Error::BelowMinimumOutcomes {
            dim,
            count,
            kappa,
            n_min: minimum,
        });
    }
    let report = validate_frame(frame, FRAME_TOL);
    if !report.passed() {
        return Err(Error::InvalidFrame(report.describe()));
    }

    let weight = Complex64::new(dim as f64 / count as f64, 0.0);
    let mut elements = Vec::with_capacity(count);
    let mut worst: Option<(usize, Vec<f64>)> = None;
    for (i, n) in frame.vectors().iter().enumerate() {
        let e = density_from_bloch(&(n * kappa), basis)? * weight;
        let spectrum = hermitian_eigenvalues(&e);
        if worst.as_ref().is_none_or(|(_, s)| spectrum[0] < s[0]) {
            worst = Some((i, spectrum));
        }
        elements.push(e);
    }
    if let Some((index, spectrum)) = worst {
        if spectrum[0] < -tol_psd {
            return Err(Error::PositivityFailure {
                index,
                min_eigenvalue: spectrum[0],
                spectrum,
            });
        }
    }

    let (alpha_cf, beta_cf) = closed_form_alpha_beta(dim, count, kappa);
    let residual = trace_law_residual(&elements, alpha_cf, beta_cf);
    let (alpha, beta) = measured_alpha_beta(&elements);
    if residual > TRACE_LAW_TOL {
        return Err(Error::TraceLawMismatch {
            name: "Tr(E_i E_j)",
            measured: residual,
            expected: 0.0,
        });
    }
    Ok(SymmetricPovm {
        dim,
        kappa,
        frame: frame.clone(),
        elements,
        alpha,
        beta,
    })
}

impl SymmetricPovm {
    /// Assembles a POVM without any checks (deserialization, tests).
    /// Measured α and β are recomputed from the elements.
    pub fn from_parts(kappa: f64, frame: DirectionalFrame, elements: Vec<CMatrix>) -> Result<Self> {
        if elements.len() != frame.count() {
            return Err(Error::DimensionMismatch {
                expected: frame.count(),
                found: elements.len(),
            });
        }
        for e in &elements {
            if e.nrows() != frame.dim() || e.ncols() != frame.dim() {
                return Err(Error::DimensionMismatch {
                    expected: frame.dim(),
                    found: e.nrows(),
                });
            }
        }
        let (alpha, beta) = measured_alpha_beta(&elements);
        Ok(Self {
            dim: frame.dim(),
            kappa,
            frame,
            elements,
            alpha,
            beta,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.elements.len()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn frame(&self) -> &DirectionalFrame {
        &self.frame
    }

    pub fn directions(&self) -> &[DVector<f64>] {
        self.frame.vectors()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// α measured from the element traces.
    pub fn measured_alpha(&self) -> f64 {
        self.alpha
    }

    /// β measured from the element traces.
    pub fn measured_beta(&self) -> f64 {
        self.beta
    }

    pub fn is_informationally_complete(&self) -> bool {
        self.count() == self.dim * self.dim
    }
}

/// Closed-form (α, β), cross-checked against every measured `Tr(E_i E_j)`.
pub fn alpha_beta(povm: &SymmetricPovm) -> Result<(f64, f64)> {
    let (alpha, beta) = closed_form_alpha_beta(povm.dim, povm.count(), povm.kappa);
    let residual = trace_law_residual(&povm.elements, alpha, beta);
    if residual > TRACE_LAW_TOL {
        return Err(Error::TraceLawMismatch {
            name: "Tr(E_i E_j)",
            measured: residual,
            expected: 0.0,
        });
    }
    Ok((alpha, beta))
}

/// Residuals of completeness, trace laws, distinctness and positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmReport {
    /// `‖Σ E_i − I‖_F`.
    pub completeness_residual: f64,
    /// `max |Tr E_i − d/N|`.
    pub trace_residual: f64,
    /// `max |Tr(E_i E_j) − (α + β δ_ij)|` against the closed forms for κ.
    pub symmetry_residual: f64,
    pub min_separation: f64,
    /// Distinct pairs whose Frobenius distance is below [`NEAR_COINCIDENT_TOL`].
    pub near_coincident: Vec<(usize, usize)>,
    pub min_eigenvalue: f64,
    pub min_eigenvalue_index: usize,
    pub tol: f64,
}

impl PovmReport {
    pub fn distinct(&self) -> bool {
        self.min_separation > DISTINCT_TOL
    }

    pub fn passed(&self) -> bool {
        self.completeness_residual <= self.tol
            && self.trace_residual <= self.tol
            && self.symmetry_residual <= self.tol
            && self.distinct()
            && self.min_eigenvalue >= -self.tol
    }
}

pub fn validate_povm(povm: &SymmetricPovm, tol: f64) -> PovmReport {
    let dim = povm.dim;
    let n = povm.count();
    let target_trace = dim as f64 / n as f64;

    let mut sum = CMatrix::zeros(dim, dim);
    let mut trace_residual: f64 = 0.0;
    let mut min_eigenvalue = f64::INFINITY;
    let mut min_eigenvalue_index = 0;
    for (i, e) in povm.elements.iter().enumerate() {
        sum += e;
        trace_residual = trace_residual.max((e.trace() - Complex64::new(target_trace, 0.0)).norm());
        let lo = hermitian_eigenvalues(e)[0];
        if lo < min_eigenvalue {
            min_eigenvalue = lo;
            min_eigenvalue_index = i;
        }
    }
    let completeness_residual = frobenius_distance(&sum, &CMatrix::identity(dim, dim));

    let (alpha, beta) = closed_form_alpha_beta(dim, n, povm.kappa);
    let symmetry_residual = trace_law_residual(&povm.elements, alpha, beta);

    let mut min_separation = f64::INFINITY;
    let mut near_coincident = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = frobenius_distance(&povm.elements[i], &povm.elements[j]);
            min_separation = min_separation.min(dist);
            if dist > DISTINCT_TOL && dist < NEAR_COINCIDENT_TOL {
                near_coincident.push((i, j));
            }
        }
    }

    PovmReport {
        completeness_residual,
        trace_residual,
        symmetry_residual,
        min_separation,
        near_coincident,
        min_eigenvalue,
        min_eigenvalue_index,
        tol,
    }
}

/// Named families a symmetric POVM may belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PovmClass {
    VonNeumann,
    InformationallyComplete,
    Sic,
    RankOne,
}

impl PovmClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PovmClass::VonNeumann => "von_neumann",
            PovmClass::InformationallyComplete => "informationally_complete",
            PovmClass::Sic => "sic",
            PovmClass::RankOne => "rank_one",
        }
    }
}

impl fmt::Display for PovmClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify(povm: &SymmetricPovm, tol: f64) -> BTreeSet<PovmClass> {
    let mut labels = BTreeSet::new();
    let dim = povm.dim;
    let n = povm.count();

    let rank_one = (povm.kappa - 1.0).abs() <= tol
        && povm.elements.iter().all(|e| {
            hermitian_eigenvalues(e)
                .iter()
                .filter(|&&x| x > tol)
                .count()
                == 1
        });
    if rank_one {
        labels.insert(PovmClass::RankOne);
    }
    if n == dim * dim {
        labels.insert(PovmClass::InformationallyComplete);
        if rank_one {
            labels.insert(PovmClass::Sic);
        }
    }
    if n == dim && rank_one {
        let idempotent = povm
            .elements
            .iter()
            .all(|e| frobenius_distance(&(e * e), e) <= tol);
        let orthogonal = (0..n).all(|i| {
            ((i + 1)..n).all(|j| trace_product(&povm.elements[i], &povm.elements[j]).norm() <= tol)
        });
        if idempotent && orthogonal {
            labels.insert(PovmClass::VonNeumann);
        }
    }
    labels
}
