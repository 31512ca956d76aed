use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use nalgebra::DVector;
use serde::Serialize;
use sympovm::bloch::{bloch_from_density, outradius, DensityMatrix, DEFAULT_TOL_PSD};
use sympovm::frame::{random_frame, DirectionalFrame};
use sympovm::io::{
    from_json_str, search_trace_csv, to_json_string, BasisFile, CountsFile, DistributionFile,
    FrameFile, PovmFile, ProbsFile, ReconstructionFile, SearchFile, StateFile, TomographyFile,
    SCHEMA_VERSION,
};
use sympovm::povm::{build_symmetric_povm, classify, validate_povm, SymmetricPovm};
use sympovm::random::{haar_pure_state, projector, stream_rng};
use sympovm::search::{certify, optimize_orientation, SearchConfig};
use sympovm::statistics::{
    embed_point, outcome_probabilities, reconstruct_state, sample_outcomes, tomography_error,
    SpanProjector,
};
use sympovm::{structure_constants, SuBasis};
use thiserror::Error;

/// Largest dimension accepted on the command line.
const MAX_DIM: usize = 16;
/// Tolerance for the POVM class labels written into artifacts.
const CLASS_TOL: f64 = 1e-9;
/// Largest allowed `‖v − κ b∥‖` for rows of a projected point cloud.
const CLOUD_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Compute(#[from] sympovm::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input { .. } => 2,
            CliError::Failed(_) | CliError::Compute(_) => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "sympovm",
    about = "Symmetric POVMs and qudit Bloch-vector geometry"
)]
struct Cli {
    /// Slack allowed on the smallest eigenvalue of states and POVM elements.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL_PSD)]
    tol_psd: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump the su(d) generators and structure constants as JSON.
    Basis {
        #[arg(long)]
        dim: usize,
        /// Omit the structure constants.
        #[arg(long)]
        no_constants: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a regular-simplex frame in a random orientation.
    Frame {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        outcomes: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build or validate symmetric POVMs.
    #[command(subcommand)]
    Povm(PovmCommand),
    /// Outcome probabilities of a state.
    Probs {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        povm: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Linear reconstruction from probabilities or tallies (N = d²).
    Reconstruct {
        #[arg(long)]
        probs: PathBuf,
        #[arg(long)]
        povm: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw measurement outcomes.
    Sample {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        povm: PathBuf,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeated finite-shot tomography; reports reconstruction error statistics.
    Tomo {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        povm: PathBuf,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Point cloud of probability-simplex points of random states (CSV).
    Project(ProjectArgs),
    /// Search for orientations admitting the largest κ.
    Search(SearchArgs),
}

#[derive(Subcommand, Debug)]
enum PovmCommand {
    Build {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        outcomes: usize,
        #[arg(long)]
        kappa: f64,
        /// Frame file; otherwise a random orientation drawn from --seed.
        #[arg(long, conflicts_with = "seed", required_unless_present = "seed")]
        frame: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Validate {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ProjectArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    outcomes: usize,
    #[arg(long)]
    kappa: f64,
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    /// Purity κ of the sampled states (1 = pure).
    #[arg(long, default_value_t = 1.0)]
    purity: f64,
    /// Use this frame instead of a random one.
    #[arg(long)]
    frame: Option<PathBuf>,
    /// Save the generated frame.
    #[arg(long)]
    frame_out: Option<PathBuf>,
    /// Emit coordinates in an orthonormal basis of the frame span (N − 1 columns).
    #[arg(long)]
    span_coords: bool,
    /// Also write the Bloch vectors of the sampled states (CSV).
    #[arg(long)]
    bloch_out: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    outcomes: usize,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 5000)]
    iters: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    margin: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-restart improvement trace (CSV).
    #[arg(long)]
    trace: Option<PathBuf>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    from_json_str(&text).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn check_output(path: &Option<PathBuf>) -> CliResult<()> {
    if let Some(p) = path {
        let parent = p.parent().filter(|d| !d.as_os_str().is_empty());
        if let Some(dir) = parent {
            if !dir.is_dir() {
                return Err(CliError::Usage(format!(
                    "output directory {} does not exist",
                    dir.display()
                )));
            }
        }
    }
    Ok(())
}

fn emit(text: &str, out: &Option<PathBuf>) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input {
            path: p.clone(),
            message: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(value: &T, out: &Option<PathBuf>) -> CliResult<()> {
    emit(&to_json_string(value), out)
}

fn check_dim(dim: usize) -> CliResult<()> {
    if !(2..=MAX_DIM).contains(&dim) {
        return Err(CliError::Usage(format!(
            "--dim must be in 2..={MAX_DIM} (got {dim})"
        )));
    }
    Ok(())
}

fn check_outcomes(dim: usize, n: usize) -> CliResult<()> {
    if n < 2 || n > dim * dim {
        return Err(CliError::Usage(format!(
            "--outcomes must be in 2..={} for d = {dim} (got {n})",
            dim * dim
        )));
    }
    Ok(())
}

fn check_unit_interval(name: &str, x: f64) -> CliResult<()> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(CliError::Usage(format!(
            "{name} must be in (0, 1] (got {x})"
        )));
    }
    Ok(())
}

fn load_povm(path: &Path, tol_psd: f64) -> CliResult<SymmetricPovm> {
    let file: PovmFile = read_json(path)?;
    let povm = file.to_povm().map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let report = validate_povm(&povm, tol_psd.max(1e-9));
    if !report.passed() {
        return Err(CliError::Failed(format!(
            "{}: not a valid symmetric POVM ({report:?})",
            path.display()
        )));
    }
    Ok(povm)
}

fn load_state(path: &Path, basis: &SuBasis, tol_psd: f64) -> CliResult<DensityMatrix> {
    let file: StateFile = read_json(path)?;
    file.to_density(basis, tol_psd)
        .map_err(|e| CliError::Input {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}

fn load_frame(path: &Path) -> CliResult<DirectionalFrame> {
    let file: FrameFile = read_json(path)?;
    file.to_frame().map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

#[derive(Serialize)]
struct PovmValidation {
    schema_version: u32,
    passed: bool,
    tol: f64,
    completeness_residual: f64,
    trace_residual: f64,
    symmetry_residual: f64,
    min_separation: f64,
    distinct: bool,
    near_coincident: Vec<(usize, usize)>,
    min_eigenvalue: f64,
    min_eigenvalue_index: usize,
    alpha: f64,
    beta: f64,
    classes: Vec<String>,
}

fn run(cli: Cli) -> CliResult<()> {
    let tol_psd = cli.tol_psd;
    if tol_psd.is_nan() || tol_psd < 0.0 {
        return Err(CliError::Usage("--tol-psd must be nonnegative".into()));
    }
    match cli.command {
        Command::Basis {
            dim,
            no_constants,
            out,
        } => {
            check_dim(dim)?;
            check_output(&out)?;
            let basis = SuBasis::generate(dim)?;
            let sc = (!no_constants).then(|| structure_constants(&basis));
            emit_json(&BasisFile::new(&basis, sc.as_ref()), &out)
        }
        Command::Frame {
            dim,
            outcomes,
            seed,
            out,
        } => {
            check_dim(dim)?;
            check_outcomes(dim, outcomes)?;
            check_output(&out)?;
            let frame = random_frame(dim, outcomes, &mut stream_rng(seed, 0))?;
            emit_json(&FrameFile::new(&frame), &out)
        }
        Command::Povm(PovmCommand::Build {
            dim,
            outcomes,
            kappa,
            frame,
            seed,
            out,
        }) => {
            check_dim(dim)?;
            check_outcomes(dim, outcomes)?;
            check_unit_interval("--kappa", kappa)?;
            check_output(&out)?;
            let frame = match (frame, seed) {
                (Some(path), _) => {
                    let f = load_frame(&path)?;
                    if f.dim() != dim || f.count() != outcomes {
                        return Err(CliError::Usage(format!(
                            "frame {} has d = {}, N = {}; expected d = {dim}, N = {outcomes}",
                            path.display(),
                            f.dim(),
                            f.count()
                        )));
                    }
                    f
                }
                (None, Some(seed)) => random_frame(dim, outcomes, &mut stream_rng(seed, 0))?,
                (None, None) => {
                    return Err(CliError::Usage(
                        "either --frame or --seed is required".into(),
                    ))
                }
            };
            let basis = SuBasis::generate(dim)?;
            let povm = build_symmetric_povm(kappa, &frame, &basis, tol_psd)?;
            emit_json(&PovmFile::new(&povm, CLASS_TOL), &out)
        }
        Command::Povm(PovmCommand::Validate { file, tol, out }) => {
            check_output(&out)?;
            let parsed: PovmFile = read_json(&file)?;
            let povm = parsed.to_povm().map_err(|e| CliError::Input {
                path: file.clone(),
                message: e.to_string(),
            })?;
            let report = validate_povm(&povm, tol);
            let passed = report.passed();
            let summary = PovmValidation {
                schema_version: SCHEMA_VERSION,
                passed,
                tol,
                completeness_residual: report.completeness_residual,
                trace_residual: report.trace_residual,
                symmetry_residual: report.symmetry_residual,
                min_separation: report.min_separation,
                distinct: report.distinct(),
                near_coincident: report.near_coincident.clone(),
                min_eigenvalue: report.min_eigenvalue,
                min_eigenvalue_index: report.min_eigenvalue_index,
                alpha: povm.measured_alpha(),
                beta: povm.measured_beta(),
                classes: if passed {
                    classify(&povm, tol).iter().map(|c| c.to_string()).collect()
                } else {
                    Vec::new()
                },
            };
            emit_json(&summary, &out)?;
            if passed {
                Ok(())
            } else {
                Err(CliError::Failed(format!(
                    "{}: validation failed",
                    file.display()
                )))
            }
        }
        Command::Probs { state, povm, out } => {
            check_output(&out)?;
            let povm = load_povm(&povm, tol_psd)?;
            let basis = SuBasis::generate(povm.dim())?;
            let rho = load_state(&state, &basis, tol_psd)?;
            let p = outcome_probabilities(&rho, &povm, &basis)?;
            emit_json(&ProbsFile::new(&p), &out)
        }
        Command::Reconstruct { probs, povm, out } => {
            check_output(&out)?;
            let povm = load_povm(&povm, tol_psd)?;
            let dist: DistributionFile = read_json(&probs)?;
            let p = dist.to_probabilities().map_err(|e| CliError::Input {
                path: probs.clone(),
                message: e.to_string(),
            })?;
            let basis = SuBasis::generate(povm.dim())?;
            let rec = reconstruct_state(&p, &povm, &basis)?;
            if !rec.is_state {
                eprintln!(
                    "warning: linear estimate is not positive (min eigenvalue {:e}); reported unprojected",
                    rec.min_eigenvalue
                );
            }
            emit_json(&ReconstructionFile::new(&rec), &out)
        }
        Command::Sample {
            state,
            povm,
            shots,
            seed,
            out,
        } => {
            if shots == 0 {
                return Err(CliError::Usage("--shots must be at least 1".into()));
            }
            check_output(&out)?;
            let povm = load_povm(&povm, tol_psd)?;
            let basis = SuBasis::generate(povm.dim())?;
            let rho = load_state(&state, &basis, tol_psd)?;
            let counts = sample_outcomes(&rho, &povm, &basis, shots, seed)?;
            emit_json(
                &CountsFile {
                    schema_version: SCHEMA_VERSION,
                    count: povm.count(),
                    shots,
                    seed,
                    tallies: counts.tallies,
                },
                &out,
            )
        }
        Command::Tomo {
            state,
            povm,
            shots,
            trials,
            seed,
            out,
        } => {
            if shots == 0 || trials == 0 {
                return Err(CliError::Usage(
                    "--shots and --trials must be at least 1".into(),
                ));
            }
            check_output(&out)?;
            let povm = load_povm(&povm, tol_psd)?;
            let basis = SuBasis::generate(povm.dim())?;
            let rho = load_state(&state, &basis, tol_psd)?;
            let stats = tomography_error(&rho, &povm, &basis, shots, trials, seed)?;
            emit_json(
                &TomographyFile::new(povm.dim(), povm.count(), seed, &stats),
                &out,
            )
        }
        Command::Project(args) => project(args, tol_psd),
        Command::Search(args) => search(args),
    }
}

fn project(args: ProjectArgs, tol_psd: f64) -> CliResult<()> {
    check_dim(args.dim)?;
    check_outcomes(args.dim, args.outcomes)?;
    check_unit_interval("--kappa", args.kappa)?;
    check_unit_interval("--purity", args.purity)?;
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    check_output(&Some(args.out.clone()))?;
    check_output(&args.frame_out)?;
    check_output(&args.bloch_out)?;

    let dim = args.dim;
    let (frame, source) = match &args.frame {
        Some(path) => (load_frame(path)?, path.display().to_string()),
        None => {
            let f = random_frame(dim, args.outcomes, &mut stream_rng(args.seed, 0))?;
            let name = match &args.frame_out {
                Some(p) => p.display().to_string(),
                None => format!("random orientation, seed {}", args.seed),
            };
            (f, name)
        }
    };
    if frame.dim() != dim || frame.count() != args.outcomes {
        return Err(CliError::Usage(
            "frame shape disagrees with --dim/--outcomes".into(),
        ));
    }
    let basis = SuBasis::generate(dim)?;
    let povm = build_symmetric_povm(args.kappa, &frame, &basis, tol_psd)?;
    let projector_span = SpanProjector::new(povm.frame())?;

    let m = dim * dim - 1;
    let columns = if args.span_coords {
        args.outcomes - 1
    } else {
        m
    };
    let mut cloud = format!("# frame: {source}\n");
    cloud.push_str(
        &(1..=columns)
            .map(|i| format!("v{i}"))
            .collect::<Vec<_>>()
            .join(","),
    );
    cloud.push('\n');
    let mut bloch_csv = (1..=m)
        .map(|i| format!("b{i}"))
        .collect::<Vec<_>>()
        .join(",");
    bloch_csv.push('\n');

    let mut rng = stream_rng(args.seed, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..args.samples {
        let pure = projector(&haar_pure_state(dim, &mut rng));
        let pure = DensityMatrix::new(pure, tol_psd)?;
        let b_pure = bloch_from_density(&pure, &basis)?;
        let b: DVector<f64> = b_pure * args.purity;
        let rho = DensityMatrix::new(sympovm::density_from_bloch(&b, &basis)?, tol_psd)?;
        let p = outcome_probabilities(&rho, &povm, &basis)?;
        let v = embed_point(&p, &povm)?;
        let residual = (&v - projector_span.project(&b) * args.kappa).norm();
        worst = worst.max(residual);
        let coords: Vec<f64> = if args.span_coords {
            projector_span.coordinates(&v)
        } else {
            v.iter().copied().collect()
        };
        cloud.push_str(&join(&coords));
        bloch_csv.push_str(&join(b.as_slice()));
    }
    if worst > CLOUD_RESIDUAL_TOL {
        return Err(CliError::Failed(format!(
            "projection identity residual {worst:e} exceeds {CLOUD_RESIDUAL_TOL:e}"
        )));
    }
    eprintln!(
        "{} points, max |v - kappa b_par| = {worst:e}, R_out = {}",
        args.samples,
        outradius(dim)
    );
    if let Some(p) = &args.frame_out {
        emit_json(&FrameFile::new(povm.frame()), &Some(p.clone()))?;
    }
    if let Some(p) = &args.bloch_out {
        emit(&bloch_csv, &Some(p.clone()))?;
    }
    emit(&cloud, &Some(args.out))
}

fn join(xs: &[f64]) -> String {
    let mut s = xs
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",");
    s.push('\n');
    s
}

fn search(args: SearchArgs) -> CliResult<()> {
    check_dim(args.dim)?;
    check_outcomes(args.dim, args.outcomes)?;
    if args.restarts == 0 || args.iters == 0 {
        return Err(CliError::Usage(
            "--restarts and --iters must be at least 1".into(),
        ));
    }
    if args.margin.is_nan() || args.margin < 0.0 {
        return Err(CliError::Usage("--margin must be nonnegative".into()));
    }
    check_output(&args.out)?;
    check_output(&args.trace)?;
    let mut config = SearchConfig::new(args.dim, args.outcomes, args.seed);
    config.restarts = args.restarts;
    config.max_iterations = args.iters;
    let basis = SuBasis::generate(args.dim)?;
    let result = optimize_orientation(&config, &basis)?;
    let certified = certify(&result, &basis, args.margin);
    let file = SearchFile::new(
        &result,
        args.restarts,
        args.iters,
        args.seed,
        certified,
        args.margin,
    );
    if let Some(p) = &args.trace {
        emit(&search_trace_csv(&result), &Some(p.clone()))?;
    }
    emit_json(&file, &args.out)?;
    if certified {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "best kappa {} did not certify at margin {}",
            result.best_kappa, args.margin
        )))
    }
}

fn main() -> ExitCode {
    let version: &'static str =
        Box::leak(format!("{} (schema {})", sympovm::VERSION, SCHEMA_VERSION).into_boxed_str());
    let matches = Cli::command().version(version).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
