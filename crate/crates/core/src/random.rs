//! Seeded sampling of states, directions and orientations.
//!
//! Every generator is ChaCha8. Independent sub-streams (tomography trials,
//! search restarts) share the master seed and use the trial or restart
//! index as the ChaCha stream number, so results do not depend on
//! execution order.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::CMatrix;

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector in C^d (normalized complex Gaussian).
pub fn haar_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<Complex64> {
    let v = DVector::from_fn(dim, |_, _| complex_gaussian(rng));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// `|ψ⟩⟨ψ|`.
pub fn projector(psi: &DVector<Complex64>) -> CMatrix {
    psi * psi.adjoint()
}

/// Full-rank random density matrix `G G† / Tr(G G†)` from a Ginibre matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// Uniform random direction in R^n with the given norm.
pub fn random_direction<R: Rng + ?Sized>(len: usize, norm: f64, rng: &mut R) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(len, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-12 {
            return v * (norm / n);
        }
    }
}
