//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use sympovm::frame::{canonical_frame, random_frame};
use sympovm::random::{
    haar_pure_state, projector, random_density_matrix, random_direction, stream_rng,
};
use sympovm::{
    build_symmetric_povm, certify, density_from_bloch, embed_point, n_min, optimize_orientation,
    outcome_probabilities, pure_state_test, radii, reconstruct_state, structure_constants,
    tomography_error, validate_povm, verify_basis_relations, CMatrix, DensityMatrix,
    DirectionalFrame, ProbabilityVector, SearchConfig, SuBasis, SymmetricPovm,
};

type C64 = Complex<f64>;

const TOL_PSD: f64 = 1e-10;

/// Eigenvalues from nalgebra's Hermitian solver, independent of the toolkit's own.
fn oracle_min_eigenvalue(m: &CMatrix) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn trace_re(m: &CMatrix) -> f64 {
    m.trace().re
}

fn state(m: CMatrix) -> DensityMatrix {
    DensityMatrix::new(m, TOL_PSD).expect("valid state")
}

/// Mixture of a Haar pure state and a Ginibre state, with a random weight.
fn random_state(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let w: f64 = rng.random();
    let pure = projector(&haar_pure_state(dim, rng));
    let mixed = random_density_matrix(dim, rng);
    pure * C64::new(w, 0.0) + mixed * C64::new(1.0 - w, 0.0)
}

fn outer_radius(d: usize) -> f64 {
    ((d as f64 - 1.0) / (2.0 * d as f64)).sqrt()
}

fn oracle_probabilities(rho: &CMatrix, povm: &SymmetricPovm) -> Vec<f64> {
    povm.elements()
        .iter()
        .map(|e| trace_re(&(rho * e)))
        .collect()
}

/// Least-squares projection of `b` onto the span of `dirs`, via nalgebra SVD.
fn oracle_project(b: &DVector<f64>, dirs: &[DVector<f64>]) -> DVector<f64> {
    let a = DMatrix::from_columns(dirs);
    let svd = a.clone().svd(true, true);
    let coeffs = svd.solve(b, 1e-10).expect("svd solve");
    a * coeffs
}

fn bloch_of(rho: &CMatrix, basis: &SuBasis) -> DVector<f64> {
    DVector::from_iterator(
        basis.len(),
        basis
            .generators()
            .iter()
            .map(|s| trace_re(&(rho * s)) / 2.0),
    )
}

fn within(elapsed: Duration, limit_s: u64, what: &str) {
    assert!(
        elapsed <= Duration::from_secs(limit_s),
        "{what} took {elapsed:?} (limit {limit_s} s)"
    );
}

fn c1_basis_algebra() -> String {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for d in 2..=6 {
        let basis = SuBasis::generate(d).unwrap();
        let sc = structure_constants(&basis);
        let report = verify_basis_relations(&basis, &sc, 1e-10).unwrap();
        assert!(report.passed(), "d = {d}: {report:?}");
        worst = worst
            .max(report.commutator_residual)
            .max(report.anticommutator_residual)
            .max(report.gram_residual);
        if d == 2 {
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        assert_eq!(sc.d(a, b, c), 0.0, "d_{a}{b}{c} for d = 2");
                    }
                }
            }
        }
    }
    within(start.elapsed(), 10, "basis algebra");
    format!(
        "max residual {worst:.1e}, d=2 symmetric constants all zero, {:?}",
        start.elapsed()
    )
}

fn c2_radii() -> String {
    let mut worst: f64 = 0.0;
    for d in 2..=10 {
        let (r_out, r_in) = radii(d).unwrap();
        let df = d as f64;
        let want_out = ((df - 1.0) / (2.0 * df)).sqrt();
        let want_in = 1.0 / (2.0 * df * (df - 1.0)).sqrt();
        worst = worst
            .max((r_out - want_out).abs())
            .max((r_in - want_in).abs());

        // Geometric cross-check: a pure state lies on the outer sphere; the
        // state with one zero eigenvalue and the rest equal touches the inner ball.
        let basis = SuBasis::generate(d).unwrap();
        let mut pure = CMatrix::zeros(d, d);
        pure[(0, 0)] = C64::new(1.0, 0.0);
        let mut face = CMatrix::identity(d, d) * C64::new(1.0 / (df - 1.0), 0.0);
        face[(0, 0)] = C64::new(0.0, 0.0);
        assert!((bloch_of(&pure, &basis).norm() - r_out).abs() < 1e-12);
        assert!((bloch_of(&face, &basis).norm() - r_in).abs() < 1e-12);
    }
    assert!(worst <= 1e-14, "closed-form deviation {worst:e}");
    assert_eq!(radii(2).unwrap(), (0.5, 0.5));
    format!("max deviation {worst:.1e} for d <= 10, d=2 gives (1/2, 1/2)")
}

fn c3_star_condition() -> String {
    let start = Instant::now();
    for d in 2..=5 {
        let basis = SuBasis::generate(d).unwrap();
        let sc = structure_constants(&basis);
        let mut rng = stream_rng(300 + d as u64, 0);
        for k in 0..500 {
            let rho = state(projector(&haar_pure_state(d, &mut rng)));
            let b = bloch_of(rho.matrix(), &basis);
            assert!(
                pure_state_test(&b, &sc, 1e-9).unwrap(),
                "d = {d}, sample {k}"
            );
        }
    }
    let basis = SuBasis::generate(3).unwrap();
    let sc = structure_constants(&basis);
    let mut rng = stream_rng(399, 0);
    let mut rejected = 0;
    while rejected < 500 {
        let b = random_direction(8, outer_radius(3), &mut rng);
        let m = density_from_bloch(&b, &basis).unwrap();
        if oracle_min_eigenvalue(&m) < -1e-6 {
            assert!(
                !pure_state_test(&b, &sc, 1e-9).unwrap(),
                "non-state accepted: {b:?}"
            );
            rejected += 1;
        }
    }
    within(start.elapsed(), 60, "star condition");
    format!(
        "2000 pure states accepted, 500 non-states rejected, {:?}",
        start.elapsed()
    )
}

fn c4_inner_ball() -> String {
    let start = Instant::now();
    let mut builds = 0usize;
    for d in 2..=5 {
        let basis = SuBasis::generate(d).unwrap();
        let kappa = 1.0 / (d as f64 - 1.0);
        for n in 2..=d * d {
            for k in 0..1000u64 {
                let mut rng = stream_rng(4000 + (d * 100 + n) as u64, k);
                let frame = random_frame(d, n, &mut rng).unwrap();
                let povm = build_symmetric_povm(kappa, &frame, &basis, TOL_PSD)
                    .unwrap_or_else(|e| panic!("d = {d}, N = {n}, orientation {k}: {e}"));
                let report = validate_povm(&povm, 1e-9);
                assert!(
                    report.passed(),
                    "d = {d}, N = {n}, orientation {k}: {report:?}"
                );
                builds += 1;
            }
        }
    }
    format!(
        "{builds} random orientations built and validated, {:?}",
        start.elapsed()
    )
}

fn c5_trace_laws() -> String {
    let mut rng = stream_rng(500, 0);
    let mut worst: f64 = 0.0;
    for k in 0..200u64 {
        let d = rng.random_range(2..=4);
        let kappa: f64 = rng.random_range(0.05..=1.0) / (d as f64 - 1.0);
        let n = rng.random_range(2..=d * d);
        let basis = SuBasis::generate(d).unwrap();
        let frame = random_frame(d, n, &mut stream_rng(501, k)).unwrap();
        let povm = build_symmetric_povm(kappa, &frame, &basis, TOL_PSD).unwrap();
        let (df, nf) = (d as f64, n as f64);
        let scale = df * df / (nf * nf);
        let off = scale * (1.0 / df - kappa * kappa * (df - 1.0) / (df * (nf - 1.0)));
        let diag = scale * (1.0 / df + kappa * kappa * (df - 1.0) / df);
        let e = povm.elements();
        for i in 0..n {
            worst = worst.max((trace_re(&e[i]) - df / nf).abs());
            for j in 0..n {
                let want = if i == j { diag } else { off };
                worst = worst.max((trace_re(&(&e[i] * &e[j])) - want).abs());
            }
        }
    }
    assert!(worst <= 1e-10, "trace law deviation {worst:e}");

    let basis = SuBasis::generate(2).unwrap();
    let frame = random_frame(2, 4, &mut stream_rng(502, 0)).unwrap();
    let sic = build_symmetric_povm(1.0, &frame, &basis, TOL_PSD).unwrap();
    let e = sic.elements();
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { 0.25 } else { 1.0 / 12.0 };
            assert!((trace_re(&(&e[i] * &e[j])) - want).abs() <= 1e-10);
        }
    }
    assert!((sic.measured_alpha() - 1.0 / 12.0).abs() <= 1e-10);
    assert!((sic.measured_beta() - 1.0 / 6.0).abs() <= 1e-10);
    format!("200 instances within {worst:.1e}; qubit SIC alpha = 1/12, beta = 1/6")
}

fn c6_n_min() -> String {
    for d in 2..=10 {
        assert_eq!(n_min(1.0, d).unwrap(), d, "n_min(1, {d})");
    }
    let mut checked = 0;
    for d in 2..=6 {
        let df = d as f64;
        // angle between regular-simplex directions, measured on actual frames
        let simplex_angle = |n: usize| -> f64 {
            let f = canonical_frame(d, n).unwrap();
            let v = f.vectors();
            (v[0].dot(&v[1]) / (v[0].norm() * v[1].norm()))
                .clamp(-1.0, 1.0)
                .acos()
        };
        let angles: Vec<f64> = (2..=d * d).map(simplex_angle).collect();
        for k in 1..=1000 {
            let kappa = k as f64 / 1000.0;
            let x = kappa * kappa * (df - 1.0);
            let theta = if x <= 1.0 {
                std::f64::consts::PI
            } else {
                (-1.0 / x).acos()
            };
            let brute = (2..=d * d)
                .find(|&n| angles[n - 2] <= theta + 1e-9)
                .expect("some N fits");
            assert_eq!(n_min(kappa, d).unwrap(), brute, "kappa = {kappa}, d = {d}");
            checked += 1;
        }
    }
    format!("n_min(1, d) = d for d <= 10; {checked} grid points agree with brute force")
}

fn c7_projection() -> String {
    let mut worst: f64 = 0.0;
    let mut full: f64 = 0.0;
    let mut pairs = 0;
    for d in 2..=4 {
        let basis = SuBasis::generate(d).unwrap();
        let kappa = 1.0 / (d as f64 - 1.0);
        for n in 2..=d * d {
            for k in 0..100u64 {
                let mut rng = stream_rng(7000 + (d * 100 + n) as u64, k);
                let frame = random_frame(d, n, &mut rng).unwrap();
                let povm = build_symmetric_povm(kappa, &frame, &basis, TOL_PSD).unwrap();
                let rho = random_state(d, &mut rng);
                let b = bloch_of(&rho, &basis);
                let p = ProbabilityVector::new(oracle_probabilities(&rho, &povm)).unwrap();
                let scale = (n as f64 - 1.0) / (d as f64 - 1.0);
                let v_oracle = frame
                    .vectors()
                    .iter()
                    .zip(p.probs())
                    .fold(DVector::zeros(basis.len()), |acc, (t, &pi)| {
                        acc + t * (scale * pi)
                    });
                let v = embed_point(&p, &povm).unwrap();
                assert!((&v - &v_oracle).norm() < 1e-12);
                let residual = (&v - oracle_project(&b, frame.vectors()) * kappa).norm();
                worst = worst.max(residual);
                if n == d * d {
                    full = full.max((&v - &b * kappa).norm());
                }
                pairs += 1;
            }
        }
    }
    assert!(worst <= 1e-10, "projection residual {worst:e}");
    assert!(full <= 1e-10, "N = d^2 residual {full:e}");
    format!("{pairs} pairs, max |v - kappa b_par| = {worst:.1e}, N = d^2 max |v - kappa b| = {full:.1e}")
}

fn c8_reconstruction() -> String {
    let mut worst: f64 = 0.0;
    for d in 2..=4 {
        let basis = SuBasis::generate(d).unwrap();
        let kappa = 1.0 / (d as f64 - 1.0);
        let frame = random_frame(d, d * d, &mut stream_rng(800, d as u64)).unwrap();
        let povm = build_symmetric_povm(kappa, &frame, &basis, TOL_PSD).unwrap();
        let mut rng = stream_rng(801, d as u64);
        for _ in 0..100 {
            let rho = random_state(d, &mut rng);
            let p = outcome_probabilities(&state(rho.clone()), &povm, &basis).unwrap();
            let rec = reconstruct_state(&p, &povm, &basis).unwrap();
            worst = worst.max((&rec.matrix - &rho).norm());
        }
    }
    assert!(worst <= 1e-10, "round-trip error {worst:e}");
    format!("300 states, max Frobenius error {worst:.1e}")
}

fn c9_tomography() -> String {
    let start = Instant::now();
    let basis = SuBasis::generate(2).unwrap();
    let frame: DirectionalFrame = random_frame(2, 4, &mut stream_rng(900, 0)).unwrap();
    let sic = build_symmetric_povm(1.0, &frame, &basis, TOL_PSD).unwrap();
    let half = build_symmetric_povm(0.5, &frame, &basis, TOL_PSD).unwrap();
    let rho = state(density_from_bloch(&DVector::from_vec(vec![0.15, -0.1, 0.2]), &basis).unwrap());

    let e_low = tomography_error(&rho, &sic, &basis, 10_000, 200, 901)
        .unwrap()
        .mean_error;
    let e_high = tomography_error(&rho, &sic, &basis, 40_000, 200, 902)
        .unwrap()
        .mean_error;
    let shots_ratio = e_high / e_low;
    assert!(
        (0.4..=0.6).contains(&shots_ratio),
        "4x shots ratio {shots_ratio}"
    );

    let e_half = tomography_error(&rho, &half, &basis, 10_000, 200, 903)
        .unwrap()
        .mean_error;
    let kappa_ratio = e_half / e_low;
    assert!(
        (1.6..=2.4).contains(&kappa_ratio),
        "halved-kappa ratio {kappa_ratio}"
    );
    within(start.elapsed(), 120, "tomography scaling");
    format!(
        "4x shots ratio {shots_ratio:.3}, halved-kappa ratio {kappa_ratio:.3}, {:?}",
        start.elapsed()
    )
}

fn c10_search() -> String {
    let mut parts = Vec::new();
    for (d, n, must_reach) in [(2, 4, true), (3, 3, true), (3, 4, false), (3, 9, false)] {
        let start = Instant::now();
        let basis = SuBasis::generate(d).unwrap();
        let config = SearchConfig::new(d, n, 1000 + (d * 10 + n) as u64);
        let result = optimize_orientation(&config, &basis).unwrap();
        within(start.elapsed(), 120, "orientation search");
        assert!(result.best_kappa >= 1.0 / (d as f64 - 1.0) - 1e-12);
        assert!(
            certify(&result, &basis, 1e-6),
            "d = {d}, N = {n} does not certify"
        );
        for trace in &result.traces {
            assert!(
                trace.windows(2).all(|w| w[1].1 >= w[0].1),
                "non-monotone trace"
            );
        }
        if must_reach {
            assert!(
                result.best_kappa >= 0.999,
                "d = {d}, N = {n}: best {}",
                result.best_kappa
            );
        }
        parts.push(format!(
            "(d={d}, N={n}) {:.6} in {:.1?}",
            result.best_kappa,
            start.elapsed()
        ));
    }
    parts.join("; ")
}

fn c11_determinism() -> String {
    let dir = tempfile::TempDir::new().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("state.json"),
        r#"{"dim": 3, "coords": [0.1, 0.0, -0.1, 0.05, 0.0, 0.1, 0.0, -0.05]}"#,
    )
    .unwrap();
    let setup: &[&[&str]] = &[
        &[
            "povm",
            "build",
            "--dim",
            "3",
            "--outcomes",
            "9",
            "--kappa",
            "0.5",
            "--seed",
            "3",
            "--out",
            "p.json",
        ],
        &[
            "probs",
            "--state",
            "state.json",
            "--povm",
            "p.json",
            "--out",
            "probs.json",
        ],
    ];
    for args in setup {
        run(args, d);
    }
    let seeded: &[(&[&str], Option<&str>)] = &[
        (
            &["frame", "--dim", "3", "--outcomes", "5", "--seed", "8"],
            None,
        ),
        (
            &[
                "povm",
                "build",
                "--dim",
                "3",
                "--outcomes",
                "9",
                "--kappa",
                "0.5",
                "--seed",
                "3",
            ],
            None,
        ),
        (
            &[
                "sample",
                "--state",
                "state.json",
                "--povm",
                "p.json",
                "--shots",
                "5000",
                "--seed",
                "2",
            ],
            None,
        ),
        (
            &[
                "tomo",
                "--state",
                "state.json",
                "--povm",
                "p.json",
                "--shots",
                "2000",
                "--trials",
                "30",
                "--seed",
                "2",
            ],
            None,
        ),
        (
            &[
                "project",
                "--dim",
                "3",
                "--outcomes",
                "9",
                "--kappa",
                "0.5",
                "--samples",
                "50",
                "--seed",
                "2",
                "--out",
                "cloud.csv",
            ],
            Some("cloud.csv"),
        ),
        (
            &[
                "search",
                "--dim",
                "3",
                "--outcomes",
                "4",
                "--restarts",
                "4",
                "--iters",
                "500",
                "--seed",
                "2",
                "--trace",
                "trace.csv",
            ],
            Some("trace.csv"),
        ),
        (
            &["reconstruct", "--probs", "probs.json", "--povm", "p.json"],
            None,
        ),
    ];
    for (args, file) in seeded {
        let first = run(args, d);
        let first_file = file.map(|f| std::fs::read(d.join(f)).unwrap());
        let second = run(args, d);
        let second_file = file.map(|f| std::fs::read(d.join(f)).unwrap());
        assert_eq!(first, second, "stdout differs for {args:?}");
        assert_eq!(first_file, second_file, "output file differs for {args:?}");
    }
    format!(
        "{} subcommands byte-identical across repeated runs",
        seeded.len()
    )
}

fn run(args: &[&str], cwd: &Path) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_sympovm"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn main() {
    type Check = fn() -> String;
    let criteria: [(&str, Check); 11] = [
        ("basis algebra", c1_basis_algebra),
        ("radii", c2_radii),
        ("pure-state star condition", c3_star_condition),
        ("inner-ball universality", c4_inner_ball),
        ("trace laws", c5_trace_laws),
        ("minimum outcome count", c6_n_min),
        ("projection identity", c7_projection),
        ("reconstruction round trip", c8_reconstruction),
        ("tomography scaling", c9_tomography),
        ("orientation search", c10_search),
        ("determinism", c11_determinism),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match catch_unwind(AssertUnwindSafe(check)) {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("FAIL {:>2} {name}: {msg}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
