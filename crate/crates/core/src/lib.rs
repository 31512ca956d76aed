//! Symmetric POVMs and the Bloch-vector geometry of qudit states.
//!
//! * [`su_basis`]: generalized Gell-Mann basis of su(d) and its structure constants.
//! * [`bloch`]: density matrix ↔ Bloch vector, the `b = κ n` decomposition and
//!   the geometric predicates of the state body.
//! * [`frame`]: regular-simplex directional frames, rotations, outcome-count bounds.
//! * [`povm`]: construction, validation and classification of symmetric POVMs.
//! * [`statistics`]: outcome probabilities, simplex embedding, reconstruction,
//!   finite-shot tomography.
//! * [`search`]: hill-climbing search for orientations admitting large κ.
//! * [`io`]: JSON artifact schemas.

pub mod bloch;
pub mod error;
pub mod frame;
pub mod io;
pub mod linalg;
pub mod povm;
pub mod random;
pub mod search;
pub mod statistics;
pub mod su_basis;

pub use bloch::{
    bloch_from_density, decompose, density_from_bloch, is_bloch_vector, kappa_max_along, max_angle,
    pure_state_test, radii, star_product, state_overlap, BlochVector, DensityMatrix,
    PurityDecomposition, DEFAULT_TOL_PSD,
};
pub use error::{Error, Result};
pub use frame::{
    canonical_frame, n_min, probability_simplex_vertices, random_frame, rotate_frame,
    validate_frame, DirectionalFrame, Orientation,
};
pub use linalg::CMatrix;
pub use povm::{
    alpha_beta, build_symmetric_povm, classify, validate_povm, PovmClass, SymmetricPovm,
};
pub use search::{certify, kappa_max_for_frame, optimize_orientation, SearchConfig, SearchResult};
pub use statistics::{
    embed_point, outcome_probabilities, project_onto_frame, reconstruct_state, sample_outcomes,
    tomography_error, verify_projection_theorem, OutcomeCounts, ProbabilityVector,
};
pub use su_basis::{structure_constants, verify_basis_relations, StructureConstants, SuBasis};

/// Crate version reported by the command-line tool.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
