//! Numerical search for simplex orientations admitting a large κ.
//!
//! For a fixed frame the largest admissible κ is known exactly: it is the
//! smallest `−1/(d λ_min(n_i·σ))` over the frame vectors. The search
//! maximizes that value over orientations with restarted stochastic hill
//! climbing. Each proposal composes the incumbent with a small random
//! rotation `exp(step · G)`, G antisymmetric with Gaussian entries.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::bloch::{kappa_max_along, DEFAULT_TOL_PSD};
use crate::error::{Error, Result};
use crate::frame::{
    canonical_frame, rotate_frame, rotate_frame_by, validate_frame, DirectionalFrame, Orientation,
    FRAME_TOL,
};
use crate::linalg::expm;
use crate::povm::{build_symmetric_povm, validate_povm};
use crate::random::stream_rng;
use crate::su_basis::SuBasis;

/// Exact largest κ for which every `κ n_i` is a Bloch vector, capped at 1.
pub fn kappa_max_for_frame(frame: &DirectionalFrame, basis: &SuBasis) -> Result<f64> {
    if frame.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: frame.dim(),
            found: basis.dim(),
        });
    }
    let report = validate_frame(frame, FRAME_TOL);
    if !report.passed() {
        return Err(Error::InvalidFrame(report.describe()));
    }
    let mut best = f64::INFINITY;
    for n in frame.vectors() {
        best = best.min(kappa_max_along(n, basis)?);
    }
    Ok(best.min(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub dim: usize,
    pub count: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    pub initial_step: f64,
    /// Multiplier applied to the step after `rejection_window` consecutive rejections.
    pub step_decay: f64,
    pub rejection_window: usize,
    pub convergence_tol: f64,
    pub master_seed: u64,
}

impl SearchConfig {
    pub fn new(dim: usize, count: usize, master_seed: u64) -> Self {
        Self {
            dim,
            count,
            restarts: 20,
            max_iterations: 5000,
            initial_step: 0.3,
            step_decay: 0.9,
            rejection_window: 50,
            convergence_tol: 1e-8,
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidDimension(self.dim));
        }
        let max = self.dim * self.dim;
        if self.count < 2 || self.count > max {
            return Err(Error::OutcomeCountOutOfRange {
                dim: self.dim,
                count: self.count,
                max,
            });
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if !(self.step_decay > 0.0 && self.step_decay < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "step_decay {} outside (0, 1)",
                self.step_decay
            )));
        }
        if self.initial_step.is_nan()
            || self.initial_step <= 0.0
            || self.convergence_tol.is_nan()
            || self.convergence_tol <= 0.0
        {
            return Err(Error::InvalidConfig(
                "initial_step and convergence_tol must be positive".into(),
            ));
        }
        if self.rejection_window == 0 {
            return Err(Error::InvalidConfig(
                "rejection_window must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of one restart.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartTrace {
    pub best_kappa: f64,
    /// `(iteration, κ)` for the starting point and every accepted move.
    pub improvements: Vec<(usize, f64)>,
    pub iterations: usize,
    pub converged: bool,
    pub frame: DirectionalFrame,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub dim: usize,
    pub count: usize,
    pub best_kappa: f64,
    pub best_frame: DirectionalFrame,
    pub best_restart: usize,
    pub per_restart_bests: Vec<f64>,
    pub traces: Vec<Vec<(usize, f64)>>,
    pub iterations_used: usize,
    /// Whether the best restart stopped on its convergence criterion
    /// (κ reached 1 or the step fell below `convergence_tol`).
    pub converged: bool,
}

fn small_rotation<R: Rng + ?Sized>(m: usize, step: f64, rng: &mut R) -> DMatrix<f64> {
    // Entries scaled so the generator's Frobenius norm is about `step`.
    let scale = step / ((m * (m - 1)) as f64).sqrt() * std::f64::consts::SQRT_2;
    let mut a = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            let x: f64 = rng.sample::<f64, _>(StandardNormal) * scale;
            a[(i, j)] = x;
            a[(j, i)] = -x;
        }
    }
    expm(&a)
}

fn run_restart(config: &SearchConfig, basis: &SuBasis, index: usize) -> Result<RestartTrace> {
    let mut rng = stream_rng(config.master_seed, index as u64);
    let m = config.dim * config.dim - 1;
    let start = rotate_frame(
        &canonical_frame(config.dim, config.count)?,
        &Orientation::random(config.dim, &mut rng),
    )?;
    let mut frame = start;
    let mut kappa = kappa_max_for_frame(&frame, basis)?;
    let mut improvements = vec![(0, kappa)];
    let mut step = config.initial_step;
    let mut rejections = 0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        if kappa >= 1.0 || step < config.convergence_tol {
            converged = true;
            break;
        }
        iterations += 1;
        let rotation = small_rotation(m, step, &mut rng);
        let candidate = rotate_frame_by(&frame, &rotation)?;
        let candidate_kappa = kappa_max_for_frame(&candidate, basis)?;
        if candidate_kappa > kappa {
            frame = candidate;
            kappa = candidate_kappa;
            improvements.push((iterations, kappa));
            rejections = 0;
        } else {
            rejections += 1;
            if rejections >= config.rejection_window {
                step *= config.step_decay;
                rejections = 0;
            }
        }
    }
    if !converged && (kappa >= 1.0 || step < config.convergence_tol) {
        converged = true;
    }
    Ok(RestartTrace {
        best_kappa: kappa,
        improvements,
        iterations,
        converged,
        frame,
    })
}

/// Restarted hill climbing over orientations. Restart r uses stream r of
/// the master seed; with the `parallel` feature restarts run concurrently
/// and the result is identical to a sequential run.
pub fn optimize_orientation(config: &SearchConfig, basis: &SuBasis) -> Result<SearchResult> {
    config.validate()?;
    if basis.dim() != config.dim {
        return Err(Error::DimensionMismatch {
            expected: config.dim,
            found: basis.dim(),
        });
    }

    #[cfg(feature = "parallel")]
    let restarts: Vec<Result<RestartTrace>> = {
        use rayon::prelude::*;
        (0..config.restarts)
            .into_par_iter()
            .map(|r| run_restart(config, basis, r))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let restarts: Vec<Result<RestartTrace>> = (0..config.restarts)
        .map(|r| run_restart(config, basis, r))
        .collect();

    let restarts = restarts.into_iter().collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, r) in restarts.iter().enumerate() {
        if r.best_kappa > restarts[best].best_kappa {
            best = i;
        }
    }
    let floor = 1.0 / (config.dim as f64 - 1.0) - 1e-12;
    if restarts[best].best_kappa < floor {
        return Err(Error::Internal(format!(
            "search returned kappa {} below the inner-ball floor",
            restarts[best].best_kappa
        )));
    }
    Ok(SearchResult {
        dim: config.dim,
        count: config.count,
        best_kappa: restarts[best].best_kappa,
        best_frame: restarts[best].frame.clone(),
        best_restart: best,
        per_restart_bests: restarts.iter().map(|r| r.best_kappa).collect(),
        traces: restarts.iter().map(|r| r.improvements.clone()).collect(),
        iterations_used: restarts.iter().map(|r| r.iterations).sum(),
        converged: restarts[best].converged,
    })
}

/// True iff a POVM at `best_kappa − margin` on the best frame builds and
/// validates at 1e-9. With `margin = 0` this can fail at the boundary by
/// the positivity slack.
pub fn certify(result: &SearchResult, basis: &SuBasis, margin: f64) -> bool {
    let kappa = result.best_kappa - margin;
    match build_symmetric_povm(kappa, &result.best_frame, basis, DEFAULT_TOL_PSD) {
        Ok(povm) => validate_povm(&povm, 1e-9).passed(),
        Err(_) => false,
    }
}
