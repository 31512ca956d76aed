use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension must be at least 2 (got {0})")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("outcome count {count} outside [2, {max}] for d = {dim}")]
    OutcomeCountOutOfRange {
        dim: usize,
        count: usize,
        max: usize,
    },

    #[error("outcome count {count} below the minimum {n_min} admissible for kappa = {kappa} in d = {dim}")]
    BelowMinimumOutcomes {
        dim: usize,
        count: usize,
        kappa: f64,
        n_min: usize,
    },

    #[error("kappa = {0} outside (0, 1]")]
    KappaOutOfRange(f64),

    #[error("Bloch vector norm {norm} exceeds the outradius {r_out}")]
    OutsideOuterSphere { norm: f64, r_out: f64 },

    #[error("Bloch vector norm {norm} is not on the outer sphere (radius {r_out})")]
    NotOnOuterSphere { norm: f64, r_out: f64 },

    #[error("direction vector is zero")]
    ZeroDirection,

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("frame spans rank {rank}, expected {expected}")]
    DegenerateFrame { rank: usize, expected: usize },

    #[error(
        "element {index} is not positive: min eigenvalue {min_eigenvalue:e} (spectrum {spectrum:?}); \
         kappa is too large for this orientation"
    )]
    PositivityFailure {
        index: usize,
        min_eigenvalue: f64,
        spectrum: Vec<f64>,
    },

    #[error("measured {name} = {measured} disagrees with closed form {expected}")]
    TraceLawMismatch {
        name: &'static str,
        measured: f64,
        expected: f64,
    },

    #[error("probability vector invalid: {0}")]
    InvalidProbabilities(String),

    #[error("measurement is not informationally complete (N = {count}, need {needed})")]
    NotInformationallyComplete { count: usize, needed: usize },

    #[error("shot count must be at least 1")]
    InvalidShots,

    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
