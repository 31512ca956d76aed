//! Browser bindings for the interactive demo page in `www/`.
//!
//! Every export returns a JSON string; the `*_json` functions hold the logic
//! and are usable (and tested) natively.

use nalgebra::DVector;
use serde::Serialize;
use sympovm::frame::random_frame;
use sympovm::random::{haar_pure_state, projector, stream_rng};
use sympovm::statistics::SpanProjector;
use sympovm::{
    bloch_from_density, build_symmetric_povm, certify, density_from_bloch, embed_point,
    optimize_orientation, outcome_probabilities, tomography_error, DensityMatrix, SearchConfig,
    SuBasis, DEFAULT_TOL_PSD,
};
use wasm_bindgen::prelude::*;

const MAX_DIM: usize = 5;
const MAX_SAMPLES: usize = 20_000;

#[derive(Serialize)]
struct Cloud {
    dim: usize,
    count: usize,
    kappa: f64,
    /// Simplex vertices `t_i` in span coordinates.
    vertices: Vec<Vec<f64>>,
    /// Probability points `v` in span coordinates.
    points: Vec<Vec<f64>>,
    /// Largest `‖v − κ b∥‖` over the cloud.
    residual: f64,
}

#[derive(Serialize)]
struct Search {
    dim: usize,
    count: usize,
    best_kappa: f64,
    best_restart: usize,
    certified: bool,
    floor: f64,
    traces: Vec<Vec<(usize, f64)>>,
}

#[derive(Serialize)]
struct TomoPoint {
    shots: u64,
    mean_error: f64,
    std_error: f64,
}

#[derive(Serialize)]
struct TomoCurve {
    kappa: f64,
    trials: usize,
    points: Vec<TomoPoint>,
}

fn check_dim(dim: usize) -> Result<(), String> {
    if !(2..=MAX_DIM).contains(&dim) {
        return Err(format!("dimension must be in 2..={MAX_DIM}"));
    }
    Ok(())
}

/// Probability-simplex points of random states with purity `purity`, measured
/// by a symmetric POVM in a random orientation.
pub fn point_cloud_json(
    dim: usize,
    count: usize,
    kappa: f64,
    purity: f64,
    samples: usize,
    seed: u64,
) -> Result<String, String> {
    check_dim(dim)?;
    if samples == 0 || samples > MAX_SAMPLES {
        return Err(format!("samples must be in 1..={MAX_SAMPLES}"));
    }
    if !(purity > 0.0 && purity <= 1.0) {
        return Err("purity must be in (0, 1]".into());
    }
    let basis = SuBasis::generate(dim).map_err(|e| e.to_string())?;
    let frame = random_frame(dim, count, &mut stream_rng(seed, 0)).map_err(|e| e.to_string())?;
    let povm =
        build_symmetric_povm(kappa, &frame, &basis, DEFAULT_TOL_PSD).map_err(|e| e.to_string())?;
    let span = SpanProjector::new(povm.frame()).map_err(|e| e.to_string())?;
    let scale = (count as f64 - 1.0) / (dim as f64 - 1.0);
    let vertices = frame
        .vectors()
        .iter()
        .map(|n| span.coordinates(&(n * scale)))
        .collect();

    let mut rng = stream_rng(seed, 1);
    let mut points = Vec::with_capacity(samples);
    let mut residual: f64 = 0.0;
    for _ in 0..samples {
        let pure = DensityMatrix::new(projector(&haar_pure_state(dim, &mut rng)), DEFAULT_TOL_PSD)
            .map_err(|e| e.to_string())?;
        let b: DVector<f64> =
            bloch_from_density(&pure, &basis).map_err(|e| e.to_string())? * purity;
        let rho = DensityMatrix::new(
            density_from_bloch(&b, &basis).map_err(|e| e.to_string())?,
            DEFAULT_TOL_PSD,
        )
        .map_err(|e| e.to_string())?;
        let p = outcome_probabilities(&rho, &povm, &basis).map_err(|e| e.to_string())?;
        let v = embed_point(&p, &povm).map_err(|e| e.to_string())?;
        residual = residual.max((&v - span.project(&b) * kappa).norm());
        points.push(span.coordinates(&v));
    }
    let cloud = Cloud {
        dim,
        count,
        kappa,
        vertices,
        points,
        residual,
    };
    serde_json::to_string(&cloud).map_err(|e| e.to_string())
}

/// Orientation search with its per-restart improvement traces.
pub fn search_json(
    dim: usize,
    count: usize,
    restarts: usize,
    iterations: usize,
    seed: u64,
) -> Result<String, String> {
    check_dim(dim)?;
    let basis = SuBasis::generate(dim).map_err(|e| e.to_string())?;
    let mut config = SearchConfig::new(dim, count, seed);
    config.restarts = restarts;
    config.max_iterations = iterations;
    let result = optimize_orientation(&config, &basis).map_err(|e| e.to_string())?;
    let search = Search {
        dim,
        count,
        best_kappa: result.best_kappa,
        best_restart: result.best_restart,
        certified: certify(&result, &basis, 1e-6),
        floor: 1.0 / (dim as f64 - 1.0),
        traces: result.traces,
    };
    serde_json::to_string(&search).map_err(|e| e.to_string())
}

/// Mean reconstruction error of qubit tomography with a four-outcome POVM of
/// purity `kappa`, at each shot count in `shots`.
pub fn tomography_json(
    kappa: f64,
    shots: &[u64],
    trials: usize,
    seed: u64,
) -> Result<String, String> {
    if trials == 0 || trials > 2000 {
        return Err("trials must be in 1..=2000".into());
    }
    let basis = SuBasis::generate(2).map_err(|e| e.to_string())?;
    let frame = random_frame(2, 4, &mut stream_rng(seed, 0)).map_err(|e| e.to_string())?;
    let povm =
        build_symmetric_povm(kappa, &frame, &basis, DEFAULT_TOL_PSD).map_err(|e| e.to_string())?;
    let b = DVector::from_vec(vec![0.15, -0.1, 0.2]);
    let rho = DensityMatrix::new(
        density_from_bloch(&b, &basis).map_err(|e| e.to_string())?,
        DEFAULT_TOL_PSD,
    )
    .map_err(|e| e.to_string())?;
    let mut points = Vec::with_capacity(shots.len());
    for (i, &s) in shots.iter().enumerate() {
        let stats = tomography_error(
            &rho,
            &povm,
            &basis,
            s,
            trials,
            seed.wrapping_add(i as u64 + 1),
        )
        .map_err(|e| e.to_string())?;
        points.push(TomoPoint {
            shots: s,
            mean_error: stats.mean_error,
            std_error: stats.std_error,
        });
    }
    serde_json::to_string(&TomoCurve {
        kappa,
        trials,
        points,
    })
    .map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn point_cloud(
    dim: usize,
    count: usize,
    kappa: f64,
    purity: f64,
    samples: usize,
    seed: u32,
) -> Result<String, JsError> {
    point_cloud_json(dim, count, kappa, purity, samples, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn search(
    dim: usize,
    count: usize,
    restarts: usize,
    iterations: usize,
    seed: u32,
) -> Result<String, JsError> {
    search_json(dim, count, restarts, iterations, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn tomography(
    kappa: f64,
    shots: Vec<u32>,
    trials: usize,
    seed: u32,
) -> Result<String, JsError> {
    let shots: Vec<u64> = shots.into_iter().map(u64::from).collect();
    tomography_json(kappa, &shots, trials, seed as u64).map_err(|e| JsError::new(&e))
}
