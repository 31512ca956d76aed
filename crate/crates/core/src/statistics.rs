//! Outcome statistics of symmetric POVMs: probabilities, the embedding into
//! the probability simplex, the projection identity `v = κ b∥`, linear
//! reconstruction for informationally complete measurements, and
//! finite-shot tomography.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use crate::bloch::{bloch_from_density, density_from_bloch, DensityMatrix, DEFAULT_TOL_PSD};
use crate::error::{Error, Result};
use crate::frame::{probability_simplex_vertices, DirectionalFrame};
use crate::linalg::{frobenius_distance, min_eigenvalue, orthonormal_span, trace_product, CMatrix};
use crate::povm::SymmetricPovm;
use crate::random::stream_rng;
use crate::su_basis::SuBasis;

const PROB_NEGATIVE_TOL: f64 = 1e-12;
const PROB_SUM_TOL: f64 = 1e-12;
/// Relative residual below which a frame vector adds no new direction.
pub const SPAN_RANK_TOL: f64 = 1e-9;

/// Outcome distribution over N outcomes. Raw values are kept (entries may
/// be as low as −1e−12); [`ProbabilityVector::clamped`] is for output.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidProbabilities("empty".into()));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < -PROB_NEGATIVE_TOL)
        {
            return Err(Error::InvalidProbabilities(format!("entry {i} is {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidProbabilities(format!("sum is {sum}")));
        }
        Ok(Self { probs })
    }

    /// Relative frequencies of a tally.
    pub fn from_counts(counts: &OutcomeCounts) -> Result<Self> {
        if counts.shots == 0 {
            return Err(Error::InvalidShots);
        }
        let shots = counts.shots as f64;
        Self::new(counts.tallies.iter().map(|&t| t as f64 / shots).collect())
    }

    /// Point mass on outcome `i`.
    pub fn vertex(count: usize, i: usize) -> Self {
        let mut probs = vec![0.0; count];
        probs[i] = 1.0;
        Self { probs }
    }

    pub fn uniform(count: usize) -> Self {
        Self {
            probs: vec![1.0 / count as f64; count],
        }
    }

    pub fn count(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Entries with small negatives replaced by zero.
    pub fn clamped(&self) -> Vec<f64> {
        self.probs.iter().map(|&p| p.max(0.0)).collect()
    }
}

/// Tallies of a finite-shot experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeCounts {
    pub tallies: Vec<u64>,
    pub shots: u64,
}

fn check_dims(rho: &DensityMatrix, povm: &SymmetricPovm) -> Result<()> {
    if rho.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

fn basis_for(povm: &SymmetricPovm, basis: &SuBasis) -> Result<()> {
    if basis.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            found: basis.dim(),
        });
    }
    Ok(())
}

/// `p_i = (d/N)(1/d + 2κ b·n_i)`, cross-checked against `Tr(ρ E_i)`.
pub fn outcome_probabilities(
    rho: &DensityMatrix,
    povm: &SymmetricPovm,
    basis: &SuBasis,
) -> Result<ProbabilityVector> {
    check_dims(rho, povm)?;
    basis_for(povm, basis)?;
    let b = bloch_from_density(rho, basis)?;
    let d = povm.dim() as f64;
    let n = povm.count() as f64;
    let kappa = povm.kappa();
    let mut probs = Vec::with_capacity(povm.count());
    for (dir, e) in povm.directions().iter().zip(povm.elements()) {
        let p = (d / n) * (1.0 / d + 2.0 * kappa * b.dot(dir));
        let direct = trace_product(rho.matrix(), e).re;
        if (p - direct).abs() > 1e-12 {
            return Err(Error::Internal(format!(
                "Bloch-form probability {p} disagrees with Tr(rho E) = {direct}"
            )));
        }
        probs.push(p);
    }
    ProbabilityVector::new(probs)
}

/// `v = Σ p_i t_i` in R^(d²−1).
pub fn embed_point(p: &ProbabilityVector, povm: &SymmetricPovm) -> Result<DVector<f64>> {
    if p.count() != povm.count() {
        return Err(Error::DimensionMismatch {
            expected: povm.count(),
            found: p.count(),
        });
    }
    let vertices = probability_simplex_vertices(povm.frame());
    let mut v = DVector::zeros(vertices[0].len());
    for (pi, t) in p.probs().iter().zip(&vertices) {
        v.axpy(*pi, t, 1.0);
    }
    Ok(v)
}

/// Orthogonal projector onto the span of a frame.
#[derive(Debug, Clone)]
pub struct SpanProjector {
    basis: Vec<DVector<f64>>,
}

impl SpanProjector {
    /// Orthonormalizes the frame vectors; the span must have rank N − 1.
    pub fn new(frame: &DirectionalFrame) -> Result<Self> {
        let basis = orthonormal_span(frame.vectors(), SPAN_RANK_TOL);
        let expected = frame.count() - 1;
        if basis.len() != expected {
            return Err(Error::DegenerateFrame {
                rank: basis.len(),
                expected,
            });
        }
        Ok(Self { basis })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `x` in the orthonormal span basis.
    pub fn coordinates(&self, x: &DVector<f64>) -> Vec<f64> {
        self.basis.iter().map(|q| q.dot(x)).collect()
    }

    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(x.len());
        for q in &self.basis {
            out.axpy(q.dot(x), q, 1.0);
        }
        out
    }
}

/// `b∥`, the orthogonal projection of `b` onto span{n_i}.
pub fn project_onto_frame(b: &DVector<f64>, frame: &DirectionalFrame) -> Result<DVector<f64>> {
    let len = frame.vectors()[0].len();
    if b.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            found: b.len(),
        });
    }
    Ok(SpanProjector::new(frame)?.project(b))
}

/// `‖v − κ b∥‖` for the state's outcome distribution.
pub fn verify_projection_theorem(
    rho: &DensityMatrix,
    povm: &SymmetricPovm,
    basis: &SuBasis,
) -> Result<f64> {
    let p = outcome_probabilities(rho, povm, basis)?;
    let v = embed_point(&p, povm)?;
    let b = bloch_from_density(rho, basis)?;
    let parallel = project_onto_frame(&b, povm.frame())?;
    Ok((v - parallel * povm.kappa()).norm())
}

/// Linear-inversion estimate and its diagnostics.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub matrix: CMatrix,
    pub min_eigenvalue: f64,
    pub trace: f64,
    /// Whether the estimate is a state within [`DEFAULT_TOL_PSD`]; never
    /// projected when false.
    pub is_state: bool,
}

/// `ρ = I/d + ((d+1)/κ)(Σ p_i n_i)·σ` for an informationally complete POVM.
pub fn reconstruct_state(
    p: &ProbabilityVector,
    povm: &SymmetricPovm,
    basis: &SuBasis,
) -> Result<Reconstruction> {
    basis_for(povm, basis)?;
    let dim = povm.dim();
    if !povm.is_informationally_complete() {
        return Err(Error::NotInformationallyComplete {
            count: povm.count(),
            needed: dim * dim,
        });
    }
    if p.count() != povm.count() {
        return Err(Error::DimensionMismatch {
            expected: povm.count(),
            found: p.count(),
        });
    }
    if povm.kappa() < 1e-12 {
        return Err(Error::KappaOutOfRange(povm.kappa()));
    }
    let mut weighted = DVector::zeros(dim * dim - 1);
    for (pi, n) in p.probs().iter().zip(povm.directions()) {
        weighted.axpy(*pi, n, 1.0);
    }
    let b = weighted * ((dim as f64 + 1.0) / povm.kappa());
    let matrix = density_from_bloch(&b, basis)?;
    let min = min_eigenvalue(&matrix);
    Ok(Reconstruction {
        trace: matrix.trace().re,
        min_eigenvalue: min,
        is_state: min >= -DEFAULT_TOL_PSD,
        matrix,
    })
}

/// Multinomial draw by inverse CDF over the cumulative probabilities.
pub fn sample_counts<R: Rng + ?Sized>(
    p: &ProbabilityVector,
    shots: u64,
    rng: &mut R,
) -> Result<OutcomeCounts> {
    if shots == 0 {
        return Err(Error::InvalidShots);
    }
    let clamped = p.clamped();
    let total: f64 = clamped.iter().sum();
    let mut cdf = Vec::with_capacity(clamped.len());
    let mut acc = 0.0;
    for q in &clamped {
        acc += q / total;
        cdf.push(acc);
    }
    let last = cdf.len() - 1;
    let mut tallies = vec![0u64; clamped.len()];
    for _ in 0..shots {
        let u: f64 = rng.random();
        let i = cdf.partition_point(|&c| c <= u).min(last);
        tallies[i] += 1;
    }
    Ok(OutcomeCounts { tallies, shots })
}

/// Born-rule sampling of `shots` outcomes; stream 0 of `seed`.
pub fn sample_outcomes(
    rho: &DensityMatrix,
    povm: &SymmetricPovm,
    basis: &SuBasis,
    shots: u64,
    seed: u64,
) -> Result<OutcomeCounts> {
    let p = outcome_probabilities(rho, povm, basis)?;
    sample_counts(&p, shots, &mut stream_rng(seed, 0))
}

/// Summary of repeated finite-shot reconstructions.
#[derive(Debug, Clone, PartialEq)]
pub struct TomographyStats {
    pub shots: u64,
    pub trials: usize,
    pub kappa: f64,
    /// Frobenius distance between ρ and each trial's estimate, by trial index.
    pub errors: Vec<f64>,
    pub mean_error: f64,
    pub std_error: f64,
    /// Number of trials whose linear estimate is not a state.
    pub non_state_estimates: usize,
}

fn tomography_trial(
    rho: &DensityMatrix,
    p: &ProbabilityVector,
    povm: &SymmetricPovm,
    basis: &SuBasis,
    shots: u64,
    seed: u64,
    trial: usize,
) -> Result<(f64, bool)> {
    let counts = sample_counts(p, shots, &mut stream_rng(seed, trial as u64))?;
    let freq = ProbabilityVector::from_counts(&counts)?;
    let estimate = reconstruct_state(&freq, povm, basis)?;
    Ok((
        frobenius_distance(&estimate.matrix, rho.matrix()),
        estimate.is_state,
    ))
}

/// Mean and standard deviation of the reconstruction error over `trials`
/// independent experiments. Trial `t` uses stream `t` of `seed`, so results
/// are identical with or without the `parallel` feature.
pub fn tomography_error(
    rho: &DensityMatrix,
    povm: &SymmetricPovm,
    basis: &SuBasis,
    shots: u64,
    trials: usize,
    seed: u64,
) -> Result<TomographyStats> {
    check_dims(rho, povm)?;
    if !povm.is_informationally_complete() {
        return Err(Error::NotInformationallyComplete {
            count: povm.count(),
            needed: povm.dim() * povm.dim(),
        });
    }
    if shots == 0 {
        return Err(Error::InvalidShots);
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let p = outcome_probabilities(rho, povm, basis)?;

    #[cfg(feature = "parallel")]
    let results: Vec<Result<(f64, bool)>> = {
        use rayon::prelude::*;
        (0..trials)
            .into_par_iter()
            .map(|t| tomography_trial(rho, &p, povm, basis, shots, seed, t))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<(f64, bool)>> = (0..trials)
        .map(|t| tomography_trial(rho, &p, povm, basis, shots, seed, t))
        .collect();

    let mut errors = Vec::with_capacity(trials);
    let mut non_state_estimates = 0;
    for r in results {
        let (err, is_state) = r?;
        errors.push(err);
        if !is_state {
            non_state_estimates += 1;
        }
    }
    let mean = errors.iter().sum::<f64>() / trials as f64;
    let var = if trials > 1 {
        errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials - 1) as f64
    } else {
        0.0
    };
    Ok(TomographyStats {
        shots,
        trials,
        kappa: povm.kappa(),
        errors,
        mean_error: mean,
        std_error: var.sqrt(),
        non_state_estimates,
    })
}

/// `ρ = E_j N/d`, the state along frame direction j at the POVM's κ.
pub fn element_state(povm: &SymmetricPovm, j: usize) -> Result<DensityMatrix> {
    let scale = Complex64::new(povm.count() as f64 / povm.dim() as f64, 0.0);
    DensityMatrix::new(&povm.elements()[j] * scale, DEFAULT_TOL_PSD)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{canonical_frame, random_frame};
    use crate::povm::{build_symmetric_povm, closed_form_alpha_beta};
    use crate::random::{random_density_matrix, stream_rng};
    use approx::assert_abs_diff_eq;

    fn povm(dim: usize, count: usize, kappa: f64, seed: u64) -> (SuBasis, SymmetricPovm) {
        let basis = SuBasis::generate(dim).unwrap();
        let frame = random_frame(dim, count, &mut stream_rng(seed, 0)).unwrap();
        let p = build_symmetric_povm(kappa, &frame, &basis, DEFAULT_TOL_PSD).unwrap();
        (basis, p)
    }

    #[test]
    fn maximally_mixed_gives_uniform() {
        let (basis, p) = povm(3, 5, 0.5, 1);
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let probs = outcome_probabilities(&rho, &p, &basis).unwrap();
        for x in probs.probs() {
            assert_abs_diff_eq!(*x, 0.2, epsilon = 1e-15);
        }
        assert!(embed_point(&probs, &p).unwrap().norm() < 1e-15);
        assert!(verify_projection_theorem(&rho, &p, &basis).unwrap() < 1e-15);
    }

    #[test]
    fn qubit_sic_on_first_direction() {
        let basis = SuBasis::generate(2).unwrap();
        let frame = canonical_frame(2, 4).unwrap();
        let sic = build_symmetric_povm(1.0, &frame, &basis, DEFAULT_TOL_PSD).unwrap();
        let rho = element_state(&sic, 0).unwrap();
        let probs = outcome_probabilities(&rho, &sic, &basis).unwrap();
        let expected = [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
        for (x, y) in probs.probs().iter().zip(expected) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-15);
        }
    }

    #[test]
    fn element_states_follow_alpha_beta() {
        let (basis, p) = povm(3, 6, 0.4, 2);
        let (alpha, beta) = closed_form_alpha_beta(3, 6, 0.4);
        for j in 0..6 {
            let rho = element_state(&p, j).unwrap();
            let probs = outcome_probabilities(&rho, &p, &basis).unwrap();
            for (i, x) in probs.probs().iter().enumerate() {
                let delta = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(*x, (alpha + beta * delta) * 6.0 / 3.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn embedding_of_vertices_and_uniform() {
        let (_, p) = povm(3, 4, 0.5, 3);
        let t = probability_simplex_vertices(p.frame());
        for i in 0..4 {
            let v = embed_point(&ProbabilityVector::vertex(4, i), &p).unwrap();
            assert!((v - &t[i]).norm() < 1e-15);
        }
        assert!(
            embed_point(&ProbabilityVector::uniform(4), &p)
                .unwrap()
                .norm()
                < 1e-15
        );
    }

    #[test]
    fn embedding_satisfies_direction_identity() {
        let (basis, p) = povm(3, 5, 0.5, 4);
        let mut rng = stream_rng(5, 0);
        let rho = DensityMatrix::new(random_density_matrix(3, &mut rng), DEFAULT_TOL_PSD).unwrap();
        let v = embed_point(&outcome_probabilities(&rho, &p, &basis).unwrap(), &p).unwrap();
        let b = bloch_from_density(&rho, &basis).unwrap();
        for n in p.directions() {
            assert_abs_diff_eq!(v.dot(n), 0.5 * b.dot(n), epsilon = 1e-10);
        }
    }

    #[test]
    fn projection_basic_cases() {
        let frame = canonical_frame(3, 4).unwrap();
        let mut inside = DVector::zeros(8);
        inside[0] = 0.2;
        inside[2] = -0.1;
        assert!((project_onto_frame(&inside, &frame).unwrap() - &inside).norm() < 1e-12);
        let mut outside = DVector::zeros(8);
        outside[5] = 0.3;
        assert!(project_onto_frame(&outside, &frame).unwrap().norm() < 1e-15);

        let full = canonical_frame(3, 9).unwrap();
        let mut rng = stream_rng(6, 0);
        let b = crate::random::random_direction(8, 0.3, &mut rng);
        assert!((project_onto_frame(&b, &full).unwrap() - &b).norm() < 1e-12);
    }

    #[test]
    fn degenerate_frame_is_rejected() {
        let frame = canonical_frame(2, 3).unwrap();
        let v = frame.vectors()[0].clone();
        let flat = DirectionalFrame::from_vectors(2, vec![v.clone(), v.clone(), v]).unwrap();
        assert!(matches!(
            project_onto_frame(&DVector::zeros(3), &flat),
            Err(Error::DegenerateFrame {
                rank: 1,
                expected: 2
            })
        ));
    }

    #[test]
    fn reconstruction_round_trip_and_uniform() {
        let (basis, p) = povm(3, 9, 0.5, 7);
        let mut rng = stream_rng(8, 0);
        let rho = DensityMatrix::new(random_density_matrix(3, &mut rng), DEFAULT_TOL_PSD).unwrap();
        let probs = outcome_probabilities(&rho, &p, &basis).unwrap();
        let rec = reconstruct_state(&probs, &p, &basis).unwrap();
        assert!(frobenius_distance(&rec.matrix, rho.matrix()) <= 1e-10);
        assert!(rec.is_state);
        let uniform = reconstruct_state(&ProbabilityVector::uniform(9), &p, &basis).unwrap();
        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(frobenius_distance(&uniform.matrix, mixed.matrix()) < 1e-14);
    }

    #[test]
    fn reconstruction_requires_informational_completeness() {
        let (basis, p) = povm(3, 8, 0.5, 9);
        assert!(matches!(
            reconstruct_state(&ProbabilityVector::uniform(8), &p, &basis),
            Err(Error::NotInformationallyComplete {
                count: 8,
                needed: 9
            })
        ));
    }

    #[test]
    fn noisy_reconstruction_is_flagged_not_projected() {
        let basis = SuBasis::generate(2).unwrap();
        let sic = build_symmetric_povm(
            1.0,
            &canonical_frame(2, 4).unwrap(),
            &basis,
            DEFAULT_TOL_PSD,
        )
        .unwrap();
        let rho = element_state(&sic, 0).unwrap();
        let mut negative = 0;
        for seed in 0..50 {
            let counts = sample_outcomes(&rho, &sic, &basis, 20, seed).unwrap();
            let freq = ProbabilityVector::from_counts(&counts).unwrap();
            let rec = reconstruct_state(&freq, &sic, &basis).unwrap();
            assert_abs_diff_eq!(rec.trace, 1.0, epsilon = 1e-14);
            assert!(crate::linalg::hermiticity_deviation(&rec.matrix) < 1e-15);
            if !rec.is_state {
                negative += 1;
                assert!(rec.min_eigenvalue < 0.0);
            }
        }
        assert!(
            negative > 0,
            "pure-state estimates from 20 shots should leave the state set"
        );
    }

    #[test]
    fn sampling_contracts() {
        let (basis, p) = povm(2, 4, 1.0, 10);
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let one = sample_outcomes(&rho, &p, &basis, 1, 3).unwrap();
        assert_eq!(one.tallies.iter().sum::<u64>(), 1);
        assert_eq!(one.tallies.iter().filter(|&&t| t == 1).count(), 1);

        let a = sample_outcomes(&rho, &p, &basis, 1000, 42).unwrap();
        let b = sample_outcomes(&rho, &p, &basis, 1000, 42).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            sample_outcomes(&rho, &p, &basis, 0, 1),
            Err(Error::InvalidShots)
        ));
    }

    #[test]
    fn million_shots_stay_within_five_sigma() {
        let (basis, p) = povm(2, 4, 1.0, 11);
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let counts = sample_outcomes(&rho, &p, &basis, 1_000_000, 99).unwrap();
        let sigma = (1e6f64 * 0.25 * 0.75).sqrt();
        for &t in &counts.tallies {
            assert!((t as f64 - 250_000.0).abs() < 5.0 * sigma, "{t}");
        }
    }

    #[test]
    fn tomography_exact_limit_and_determinism() {
        let (basis, p) = povm(2, 4, 1.0, 12);
        let rho = DensityMatrix::new(
            random_density_matrix(2, &mut stream_rng(13, 0)),
            DEFAULT_TOL_PSD,
        )
        .unwrap();
        let exact = outcome_probabilities(&rho, &p, &basis).unwrap();
        let rec = reconstruct_state(&exact, &p, &basis).unwrap();
        assert!(frobenius_distance(&rec.matrix, rho.matrix()) <= 1e-10);

        let a = tomography_error(&rho, &p, &basis, 500, 16, 5).unwrap();
        let b = tomography_error(&rho, &p, &basis, 500, 16, 5).unwrap();
        assert_eq!(a, b);
        let sequential: Vec<f64> = (0..16)
            .map(|t| {
                tomography_trial(&rho, &exact, &p, &basis, 500, 5, t)
                    .unwrap()
                    .0
            })
            .collect();
        assert_eq!(a.errors, sequential);
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![1.1, -0.1]).is_err());
        assert!(ProbabilityVector::new(vec![]).is_err());
        let p = ProbabilityVector::new(vec![1.0 + 5e-13, -5e-13]).unwrap();
        assert_eq!(p.clamped()[1], 0.0);
        assert!(p.probs()[1] < 0.0);
    }
}
