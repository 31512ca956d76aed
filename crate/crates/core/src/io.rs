//! JSON artifact schemas.
//!
//! Complex matrices are flat row-major lists of `[re, im]` pairs. Structure
//! constant indices are 1-based. Every artifact carries `schema_version`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bloch::{density_from_bloch, DensityMatrix};
use crate::error::{Error, Result};
use crate::frame::DirectionalFrame;
use crate::linalg::CMatrix;
use crate::povm::{classify, SymmetricPovm};
use crate::search::SearchResult;
use crate::statistics::{OutcomeCounts, ProbabilityVector, Reconstruction, TomographyStats};
use crate::su_basis::{StructureConstants, StructureEntry, SuBasis};

pub const SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

/// Parses JSON, reporting the path of the offending field on failure.
pub fn from_json_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Format(format!("at `{path}`: {}", e.into_inner()))
    })
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact types always serialize");
    s.push('\n');
    s
}

fn check_schema(found: u32) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(Error::Format(format!(
            "unsupported schema_version {found} (expected {SCHEMA_VERSION})"
        )));
    }
    Ok(())
}

pub fn matrix_to_pairs(m: &CMatrix) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push([z.re, z.im]);
        }
    }
    out
}

pub fn pairs_to_matrix(dim: usize, pairs: &[[f64; 2]]) -> Result<CMatrix> {
    if pairs.len() != dim * dim {
        return Err(Error::Format(format!(
            "matrix has {} entries, expected {} for dim {dim}",
            pairs.len(),
            dim * dim
        )));
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| {
        let [re, im] = pairs[i * dim + j];
        Complex64::new(re, im)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureRecord {
    pub indices: [usize; 3],
    pub d: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub dim: usize,
    pub generators: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub structure_constants: Vec<StructureRecord>,
}

impl BasisFile {
    pub fn new(basis: &SuBasis, sc: Option<&StructureConstants>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            dim: basis.dim(),
            generators: basis.generators().iter().map(matrix_to_pairs).collect(),
            structure_constants: sc
                .map(|sc| {
                    sc.entries()
                        .map(|e| StructureRecord {
                            indices: [e.indices[0] + 1, e.indices[1] + 1, e.indices[2] + 1],
                            d: e.d,
                            f: e.f,
                        })
                        .collect()
                })
                .unwrap_or_default(),
        }
    }

    pub fn to_basis(&self) -> Result<(SuBasis, StructureConstants)> {
        check_schema(self.schema_version)?;
        let gens = self
            .generators
            .iter()
            .map(|g| pairs_to_matrix(self.dim, g))
            .collect::<Result<Vec<_>>>()?;
        let basis = SuBasis::from_generators(self.dim, gens)?;
        let n = basis.len();
        let mut entries = Vec::with_capacity(self.structure_constants.len());
        for r in &self.structure_constants {
            if r.indices.iter().any(|&i| i == 0 || i > n) {
                return Err(Error::Format(format!(
                    "structure index {:?} outside 1..={n}",
                    r.indices
                )));
            }
            entries.push(StructureEntry {
                indices: [r.indices[0] - 1, r.indices[1] - 1, r.indices[2] - 1],
                d: r.d,
                f: r.f,
            });
        }
        Ok((basis, StructureConstants::from_entries(self.dim, entries)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub dim: usize,
    pub count: usize,
    pub vectors: Vec<Vec<f64>>,
}

impl FrameFile {
    pub fn new(frame: &DirectionalFrame) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            dim: frame.dim(),
            count: frame.count(),
            vectors: frame
                .vectors()
                .iter()
                .map(|v| v.iter().copied().collect())
                .collect(),
        }
    }

    pub fn to_frame(&self) -> Result<DirectionalFrame> {
        check_schema(self.schema_version)?;
        if self.vectors.len() != self.count {
            return Err(Error::Format(format!(
                "frame lists {} vectors but count is {}",
                self.vectors.len(),
                self.count
            )));
        }
        DirectionalFrame::from_vectors(
            self.dim,
            self.vectors
                .iter()
                .map(|v| DVector::from_vec(v.clone()))
                .collect(),
        )
    }
}

/// A state given either as a density matrix (`entries`) or a Bloch vector
/// (`coords`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
}

impl StateFile {
    pub fn density(rho: &CMatrix) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            dim: rho.nrows(),
            entries: Some(matrix_to_pairs(rho)),
            coords: None,
        }
    }

    pub fn bloch(dim: usize, b: &DVector<f64>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            dim,
            entries: None,
            coords: Some(b.iter().copied().collect()),
        }
    }

    pub fn to_density(&self, basis: &SuBasis, tol_psd: f64) -> Result<DensityMatrix> {
        check_schema(self.schema_version)?;
        let matrix = match (&self.entries, &self.coords) {
            (Some(e), None) => pairs_to_matrix(self.dim, e)?,
            (None, Some(c)) => {
                if basis.dim() != self.dim {
                    return Err(Error::DimensionMismatch {
                        expected: basis.dim(),
                        found: self.dim,
                    });
                }
                density_from_bloch(&DVector::from_vec(c.clone()), basis)?
            }
            _ => return Err(Error::Format(
                "state needs exactly one of `entries` (density matrix) or `coords` (Bloch vector)"
                    .into(),
            )),
        };
        DensityMatrix::new(matrix, tol_psd)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub dim: usize,
    pub count: usize,
    pub kappa: f64,
    pub frame: FrameFile,
    pub elements: Vec<Vec<[f64; 2]>>,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub classes: Vec<String>,
}

impl PovmFile {
    pub fn new(povm: &SymmetricPovm, class_tol: f64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            dim: povm.dim(),
            count: povm.count(),
            kappa: povm.kappa(),
            frame: FrameFile::new(povm.frame()),
            elements: povm.elements().iter().map(matrix_to_pairs).collect(),
            alpha: povm.measured_alpha(),
            beta: povm.measured_beta(),
            classes: classify(povm, class_tol)
                .iter()
                .map(|c| c.to_string())
                .collect(),
        }
    }

    /// Rebuilds the POVM as stored; validity is checked separately.
    pub fn to_povm(&self) -> Result<SymmetricPovm> {
        check_schema(self.schema_version)?;
        let frame = self.frame.to_frame()?;
        if frame.dim() != self.dim || frame.count() != self.count {
            return Err(Error::Format(
                "frame shape disagrees with POVM dim/count".into(),
            ));
        }
        let elements = self
            .elements
            .iter()
            .map(|e| pairs_to_matrix(self.dim, e))
            .collect::<Result<Vec<_>>>()?;
        SymmetricPovm::from_parts(self.kappa, frame, elements)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbsFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub count: usize,
    pub probs: Vec<f64>,
}

impl ProbsFile {
    /// Serialized with small negatives clamped to zero.
    pub fn new(p: &ProbabilityVector) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            count: p.count(),
            probs: p.clamped(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub count: usize,
    pub shots: u64,
    pub seed: u64,
    pub tallies: Vec<u64>,
}

/// Input to reconstruction: probabilities or raw tallies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub count: usize,
    #[serde(default)]
    pub probs: Option<Vec<f64>>,
    #[serde(default)]
    pub tallies: Option<Vec<u64>>,
}

impl DistributionFile {
    pub fn to_probabilities(&self) -> Result<ProbabilityVector> {
        check_schema(self.schema_version)?;
        let p = match (&self.probs, &self.tallies) {
            (Some(p), None) => ProbabilityVector::new(p.clone())?,
            (None, Some(t)) => ProbabilityVector::from_counts(&OutcomeCounts {
                tallies: t.clone(),
                shots: t.iter().sum(),
            })?,
            _ => {
                return Err(Error::Format(
                    "distribution needs exactly one of `probs` or `tallies`".into(),
                ))
            }
        };
        if p.count() != self.count {
            return Err(Error::Format(format!(
                "distribution has {} entries but count is {}",
                p.count(),
                self.count
            )));
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
    pub min_eigenvalue: f64,
    pub trace: f64,
    pub is_state: bool,
}

impl ReconstructionFile {
    pub fn new(r: &Reconstruction) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            dim: r.matrix.nrows(),
            entries: matrix_to_pairs(&r.matrix),
            min_eigenvalue: r.min_eigenvalue,
            trace: r.trace,
            is_state: r.is_state,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub dim: usize,
    pub count: usize,
    pub kappa: f64,
    pub shots: u64,
    pub trials: usize,
    pub seed: u64,
    pub mean_error: f64,
    pub std_error: f64,
    /// `mean_error · √shots · κ`, roughly constant across shots and κ.
    pub scaled_error: f64,
    pub non_state_estimates: usize,
    pub errors: Vec<f64>,
}

impl TomographyFile {
    pub fn new(dim: usize, count: usize, seed: u64, stats: &TomographyStats) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            dim,
            count,
            kappa: stats.kappa,
            shots: stats.shots,
            trials: stats.trials,
            seed,
            mean_error: stats.mean_error,
            std_error: stats.std_error,
            scaled_error: stats.mean_error * (stats.shots as f64).sqrt() * stats.kappa,
            non_state_estimates: stats.non_state_estimates,
            errors: stats.errors.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub dim: usize,
    pub count: usize,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    pub best_kappa: f64,
    pub best_restart: usize,
    pub per_restart_bests: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
    pub certified: bool,
    pub certify_margin: f64,
    pub frame: FrameFile,
}

impl SearchFile {
    pub fn new(
        result: &SearchResult,
        restarts: usize,
        iterations: usize,
        seed: u64,
        certified: bool,
        certify_margin: f64,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            dim: result.dim,
            count: result.count,
            restarts,
            iterations,
            seed,
            best_kappa: result.best_kappa,
            best_restart: result.best_restart,
            per_restart_bests: result.per_restart_bests.clone(),
            iterations_used: result.iterations_used,
            converged: result.converged,
            certified,
            certify_margin,
            frame: FrameFile::new(&result.best_frame),
        }
    }
}

/// Per-restart improvement trace as CSV: `restart,iteration,kappa`.
pub fn search_trace_csv(result: &SearchResult) -> String {
    let mut out = String::from("restart,iteration,kappa\n");
    for (r, trace) in result.traces.iter().enumerate() {
        for (it, k) in trace {
            out.push_str(&format!("{r},{it},{k}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::DEFAULT_TOL_PSD;
    use crate::frame::canonical_frame;
    use crate::povm::build_symmetric_povm;
    use crate::su_basis::structure_constants;

    #[test]
    fn basis_round_trip() {
        let basis = SuBasis::generate(3).unwrap();
        let sc = structure_constants(&basis);
        let text = to_json_string(&BasisFile::new(&basis, Some(&sc)));
        let parsed: BasisFile = from_json_str(&text).unwrap();
        let (b2, sc2) = parsed.to_basis().unwrap();
        assert_eq!(b2.generators(), basis.generators());
        assert_eq!(
            sc2.entries().collect::<Vec<_>>(),
            sc.entries().collect::<Vec<_>>()
        );
        // 1-based indices on disk.
        assert!(parsed
            .structure_constants
            .iter()
            .all(|r| r.indices.iter().all(|&i| (1..=8).contains(&i))));
        let f147 = parsed
            .structure_constants
            .iter()
            .find(|r| r.indices == [1, 4, 7])
            .unwrap();
        assert!((f147.f - 1.0).abs() < 1e-15);
    }

    #[test]
    fn povm_round_trip() {
        let basis = SuBasis::generate(2).unwrap();
        let povm = build_symmetric_povm(
            1.0,
            &canonical_frame(2, 4).unwrap(),
            &basis,
            DEFAULT_TOL_PSD,
        )
        .unwrap();
        let file = PovmFile::new(&povm, 1e-9);
        assert_eq!(
            file.classes,
            vec!["informationally_complete", "sic", "rank_one"]
        );
        let parsed: PovmFile = from_json_str(&to_json_string(&file)).unwrap();
        assert_eq!(parsed.to_povm().unwrap(), povm);
    }

    #[test]
    fn malformed_input_names_the_field() {
        let err =
            from_json_str::<FrameFile>(r#"{"dim": 2, "count": 2, "vectors": [[0.5, 0, "x"]]}"#)
                .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("vectors[0][2]"), "{msg}");
        let err = from_json_str::<FrameFile>(r#"{"dim": 2, "vectors": []}"#).unwrap_err();
        assert!(err.to_string().contains("count"));
    }

    #[test]
    fn state_file_variants() {
        let basis = SuBasis::generate(2).unwrap();
        let bloch = StateFile::bloch(2, &DVector::from_vec(vec![0.0, 0.0, 0.5]));
        let rho = bloch.to_density(&basis, DEFAULT_TOL_PSD).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        let dens = StateFile::density(rho.matrix());
        assert_eq!(dens.to_density(&basis, DEFAULT_TOL_PSD).unwrap(), rho);
        let neither = StateFile {
            schema_version: 1,
            dim: 2,
            entries: None,
            coords: None,
        };
        assert!(matches!(
            neither.to_density(&basis, 1e-10),
            Err(Error::Format(_))
        ));
        let future = StateFile {
            schema_version: 99,
            ..bloch
        };
        assert!(matches!(
            future.to_density(&basis, 1e-10),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn distribution_from_tallies() {
        let d = DistributionFile {
            schema_version: 1,
            count: 4,
            probs: None,
            tallies: Some(vec![1, 1, 2, 0]),
        };
        assert_eq!(
            d.to_probabilities().unwrap().probs(),
            &[0.25, 0.25, 0.5, 0.0]
        );
    }
}
