use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rph_core::certificate::certify_system;
use rph_core::document::{parse_system, to_json, CertificateDoc, MixedCellsDoc, SolveDoc};
use rph_core::lattice::{build_cayley, log_abs_lifting, SupportSystem};
use rph_core::mixed_cells::enumerate_mixed_cells;
use rph_core::pipeline::{solve, SolveError, SolverConfig};
use rph_core::tracker::TrackerSettings;
use rph_core::Error;

const EXIT_INPUT: u8 = 1;
const EXIT_CERTIFICATE: u8 = 2;
const EXIT_TIE: u8 = 3;
const EXIT_TRACKING: u8 = 4;

/// Real polyhedral homotopy solver for sparse polynomial systems.
///
/// Input is a JSON document with "n", "supports" and "coefficients";
/// pass "-" to read it from stdin. Results go to stdout as JSON, a short
/// summary goes to stderr.
#[derive(Parser)]
#[command(name = "rph", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mixed cells of the subdivision induced by log|coefficients|.
    MixedCells { input: PathBuf },
    /// Check the patchworking certificate. Exit 0 on pass, 2 on fail.
    Certify { input: PathBuf },
    /// Certify, solve the binomial start systems and track real paths.
    Solve {
        input: PathBuf,
        /// Fixed start parameter in (0, 1); picked per path when omitted.
        #[arg(long)]
        t0: Option<f64>,
        /// Endpoint residual bound, relative to the largest term.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Track even when the certificate fails.
        #[arg(long)]
        force: bool,
        /// Maximum number of tracking threads.
        #[arg(long)]
        threads: Option<usize>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::TieDegenerate { .. }) { EXIT_TIE } else { EXIT_INPUT };
        Failure { code, message: e.to_string() }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        Failure { message: e.to_string(), ..Failure::from(e.source) }
    }
}

fn read_system(path: &Path) -> Result<SupportSystem, Failure> {
    let mut text = String::new();
    let read = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    read.map_err(|e| Failure { code: EXIT_INPUT, message: format!("{}: {e}", path.display()) })?;
    Ok(parse_system(&text)?)
}

fn mixed_cells(input: &Path) -> Result<u8, Failure> {
    let sys = read_system(input)?;
    let cayley = build_cayley(&sys)?;
    let set = enumerate_mixed_cells(&cayley, &log_abs_lifting(&sys)?)?;
    let doc = MixedCellsDoc::new(&sys, &set)?;
    println!("{}", to_json(&doc));
    eprintln!(
        "{} mixed cells, mixed volume {}, {} circuit inequalities",
        doc.cells.len(),
        doc.mixed_volume,
        doc.inequality_count
    );
    Ok(0)
}

fn certify(input: &Path) -> Result<u8, Failure> {
    let sys = read_system(input)?;
    let (cert, _) = certify_system(&sys)?;
    println!("{}", to_json(&CertificateDoc::from(&cert)));
    match cert.min_margin() {
        Some(min) => eprintln!(
            "certificate {}: {} inequalities, m = {}, min margin {min:.6}",
            if cert.pass { "passes" } else { "fails" },
            cert.margins.len(),
            cert.m
        ),
        None => eprintln!("certificate passes vacuously: no circuit inequalities"),
    }
    Ok(if cert.pass { 0 } else { EXIT_CERTIFICATE })
}

fn run_solve(input: &Path, t0: Option<f64>, tol: f64, force: bool, threads: Option<usize>) -> Result<u8, Failure> {
    let bad = |message: String| Failure { code: EXIT_INPUT, message };
    if let Some(t) = t0 {
        if !(t > 0.0 && t < 1.0) {
            return Err(bad(format!("--t0 must lie in (0, 1), got {t}")));
        }
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(bad(format!("--tol must be positive, got {tol}")));
    }
    if threads == Some(0) {
        return Err(bad("--threads must be at least 1".into()));
    }
    let sys = read_system(input)?;
    let config = SolverConfig {
        tracker: TrackerSettings { t0, final_tolerance: tol, ..TrackerSettings::default() },
        force,
        threads,
    };
    let report = solve(&sys, &config)?;
    let doc = SolveDoc::new(&sys, &report)?;
    println!("{}", to_json(&doc));

    eprintln!(
        "{} mixed cells (mixed volume {}), certificate {}",
        doc.cells.len(),
        doc.mixed_volume,
        if report.certificate.pass { "passed" } else { "failed" }
    );
    if !report.certificate.pass && !force {
        eprintln!("not tracking: rerun with --force to track anyway");
        return Ok(EXIT_CERTIFICATE);
    }
    let starts: usize = report.start_solutions.iter().map(Vec::len).sum();
    eprintln!(
        "{starts} real start solutions, {} tracked{}, {} failed",
        report.solutions.len(),
        if report.uncertified { " (uncertified)" } else { "" },
        report.failures.len()
    );
    for s in &doc.solutions {
        eprintln!("  {:?}  residual {:.1e}", s.point, s.residual);
    }
    for f in &doc.failures {
        eprintln!("  cell {}: {}", f.cell, f.error);
    }
    Ok(if report.failures.is_empty() { 0 } else { EXIT_TRACKING })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::MixedCells { input } => mixed_cells(input),
        Command::Certify { input } => certify(input),
        Command::Solve { input, t0, tol, force, threads } => run_solve(input, *t0, *tol, *force, *threads),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
