use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use osserman_core::catalog::{catalog_entry, rank_k_generic, JChoice, CATALOG_NAMES};
use osserman_core::clifford::adams_nu;
use osserman_core::io::{classify_model, verify_model, Check, ModelFile, ReportFile};
use osserman_core::linalg::{cluster_spectrum, random_unit, symmetric_eigen, Matrix, SeededRng, Vector, CLUSTER_GAP_REL};
use osserman_core::osserman::{VerifyOptions, DEFAULT_SAMPLE_COUNT, DEFAULT_SPECTRUM_TOL};
use osserman_core::Error;

#[derive(Parser)]
#[command(name = "osserman", version, about = "Complex Osserman curvature models: build, verify, classify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Adams number: the maximal rank of a Clifford family on R^n.
    Nu { n: usize },
    /// Write a named model from the catalog.
    Catalog {
        /// One of the catalog names; `list` prints them.
        name: String,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        /// Comma-separated coefficients overriding the defaults.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        coeffs: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write c0 R0 + sum c_i R_{J_i} over a seeded Clifford family.
    Build {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        c0: f64,
        #[arg(long)]
        rank: usize,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        coeffs: Vec<f64>,
        /// `j1`, `j1j2`, or a path to a JSON matrix (or model file) holding J.
        #[arg(long = "J", alias = "j", default_value = "j1")]
        j: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the clustered spectrum of the Jacobi or complex Jacobi operator.
    Spectrum {
        #[arg(long)]
        model: PathBuf,
        /// `random`, `basis`, `basis:<i>`, or a vector such as `[1,0,0,0]`.
        #[arg(long, default_value = "random")]
        at: String,
        /// Use the complex Jacobi operator J(x) + J(Jx).
        #[arg(long)]
        complex: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a verification and write a report. Exit 0 on pass, 1 on fail.
    Verify {
        #[arg(long)]
        model: PathBuf,
        /// osserman, p-osserman:<p>, complex-osserman, einstein, compat or symmetries.
        #[arg(long)]
        check: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_COUNT)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SPECTRUM_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form classification cross-checked numerically. Exit 1 on disagreement.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_COUNT)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether the command succeeded in the verification sense.
fn run(command: Command) -> CliResult<bool> {
    match command {
        Command::Nu { n } => {
            println!("{}", adams_nu(n)?);
            Ok(true)
        }
        Command::Catalog {
            name,
            dim,
            coeffs,
            seed,
            out,
        } => {
            if name == "list" {
                for n in CATALOG_NAMES {
                    println!("{n}");
                }
                return Ok(true);
            }
            let entry = catalog_entry(&name, dim, coeffs.as_deref(), seed)?;
            let file = ModelFile::from_model(&entry.model, Some(&entry.name), seed);
            emit(&file.to_json()?, out.as_deref())?;
            Ok(true)
        }
        Command::Build {
            dim,
            c0,
            rank,
            coeffs,
            j,
            seed,
            out,
        } => {
            if coeffs.len() != rank {
                return Err(CliError::Usage(format!(
                    "--coeffs has {} values but --rank is {rank}",
                    coeffs.len()
                )));
            }
            let choice = match j.to_ascii_lowercase().as_str() {
                "j1" => JChoice::J1,
                "j1j2" => JChoice::J1J2,
                _ => JChoice::Custom(read_matrix(Path::new(&j))?),
            };
            let entry = rank_k_generic(dim, rank, choice, c0, &coeffs, seed)?;
            let file = ModelFile::from_model(&entry.model, Some(&entry.name), seed);
            emit(&file.to_json()?, out.as_deref())?;
            Ok(true)
        }
        Command::Spectrum {
            model,
            at,
            complex,
            seed,
        } => {
            let model = load_model(&model)?.to_model()?;
            let n = model.dim();
            let x = parse_point(&at, n, seed)?;
            let m = if complex {
                model.complex_jacobi(&x.0)?
            } else {
                model.spec().jacobi(&x.0)?
            };
            let eig = symmetric_eigen(&m, 1e-12)?;
            let rho = eig.eigenvalues.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            let clusters = cluster_spectrum(&eig.eigenvalues, CLUSTER_GAP_REL * (1.0 + rho));
            println!("{}", to_json(&clusters)?);
            Ok(true)
        }
        Command::Verify {
            model,
            check,
            samples,
            seed,
            tol,
            out,
        } => {
            let file = load_model(&model)?;
            let check = Check::parse(&check)?;
            let report = verify_model(&file, check, &VerifyOptions { seed, samples, tol })?;
            finish(&report, out.as_deref())?;
            Ok(report.report.passed())
        }
        Command::Classify {
            model,
            samples,
            seed,
            out,
        } => {
            let file = load_model(&model)?;
            let opts = VerifyOptions {
                seed,
                samples,
                ..Default::default()
            };
            let report = classify_model(&file, &opts)?;
            finish(&report, out.as_deref())?;
            Ok(report.agreement != Some(false))
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string(value).map_err(|e| Error::Serialization(e.to_string()).into())
}

fn load_model(path: &Path) -> CliResult<ModelFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.into(), e))?;
    Ok(ModelFile::from_json(&text)?)
}

/// Reads J from a bare JSON matrix or from the `J` field of a model file.
fn read_matrix(path: &Path) -> CliResult<Matrix> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.into(), e))?;
    if let Ok(rows) = serde_json::from_str::<Vec<Vec<f64>>>(&text) {
        return Ok(Matrix::from_rows(&rows)?);
    }
    let file = ModelFile::from_json(&text)?;
    Ok(Matrix::from_rows(&file.j)?)
}

fn parse_point(at: &str, n: usize, seed: u64) -> CliResult<Vector> {
    let basis = |i: usize| {
        if i < n {
            Ok(Vector::basis(n, i))
        } else {
            Err(CliError::Usage(format!("basis index {i} out of range for dimension {n}")))
        }
    };
    match at {
        "random" => Ok(random_unit(n, &mut SeededRng::new(seed))?),
        "basis" => basis(0),
        _ => {
            if let Some(i) = at.strip_prefix("basis:") {
                let i = i
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad basis index in '{at}'")))?;
                return basis(i);
            }
            let body = at.trim().trim_start_matches('[').trim_end_matches(']');
            let v = body
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| CliError::Usage(format!("cannot parse vector '{at}'")))?;
            if v.len() != n {
                return Err(CliError::Usage(format!(
                    "vector has {} entries, model dimension is {n}",
                    v.len()
                )));
            }
            Ok(Vector(v).normalized()?)
        }
    }
}

fn finish(report: &ReportFile, out: Option<&Path>) -> CliResult<()> {
    let text = report.to_json()?;
    match out {
        Some(path) => {
            write_atomic(path, &text)?;
            let mut line = format!("{}: {}", report.command, verdict_word(report.report.passed()));
            if let Some(case) = &report.multiplicity_case {
                line.push_str(&format!(" {case}"));
            }
            if let Some(agree) = report.agreement {
                line.push_str(if agree { " (classifier agrees)" } else { " (classifier DISAGREES)" });
            }
            println!("{line}");
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn verdict_word(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe a partial document.
fn write_atomic(path: &Path, text: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let io = |e| CliError::Io(path.into(), e);
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.write_all(b"\n").map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
