//! Initialization, mixed cells, certificate, tracking.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::binomial::{binomial_from_cell, solve_real, RealOrthantSolution};
use crate::certificate::{certify, Certificate};
use crate::error::Error;
use crate::lattice::{build_cayley, log_abs_lifting, SupportSystem};
use crate::mixed_cells::{enumerate_mixed_cells, MixedCell, MixedCellSet};
use crate::tracker::{track, HomotopySystem, PathFailure, PathState, TrackedSolution, TrackerSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Initialization,
    MixedCells,
    Certificate,
    StartSystems,
    Tracking,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Initialization => "initialization",
            Stage::MixedCells => "mixed cells",
            Stage::Certificate => "certificate",
            Stage::StartSystems => "start systems",
            Stage::Tracking => "tracking",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{stage}: {source}")]
pub struct SolveError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

trait StageExt<T> {
    fn at(self, stage: Stage) -> Result<T, SolveError>;
}

impl<T> StageExt<T> for crate::error::Result<T> {
    fn at(self, stage: Stage) -> Result<T, SolveError> {
        self.map_err(|source| SolveError { stage, source })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolverConfig {
    pub tracker: TrackerSettings,
    /// Track even when the certificate fails; results are marked uncertified.
    pub force: bool,
    /// Cap on tracking threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Timings {
    pub mixed_cells_ms: f64,
    pub certificate_ms: f64,
    pub start_systems_ms: f64,
    pub tracking_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub cells: MixedCellSet,
    pub certificate: Certificate,
    /// Real binomial solutions per cell; empty when tracking was skipped.
    pub start_solutions: Vec<Vec<RealOrthantSolution>>,
    pub solutions: Vec<TrackedSolution>,
    pub failures: Vec<PathFailure>,
    /// Solutions were produced despite a failed certificate.
    pub uncertified: bool,
    pub timings: Timings,
}

impl SolveReport {
    pub fn cell(&self, k: usize) -> &MixedCell {
        &self.cells.cells[k]
    }
}

struct Clock {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Clock {
    fn start() -> Self {
        Self {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    fn ms(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        {
            self.start.elapsed().as_secs_f64() * 1e3
        }
        #[cfg(target_arch = "wasm32")]
        {
            0.0
        }
    }
}

/// Runs every stage. A failed certificate without `force` is a normal
/// outcome: the report has cells and margins but no solutions.
pub fn solve(system: &SupportSystem, config: &SolverConfig) -> Result<SolveReport, SolveError> {
    let clock = Clock::start();
    let cayley = build_cayley(system).at(Stage::Initialization)?;
    let lifting = log_abs_lifting(system).at(Stage::Initialization)?;
    let cells = enumerate_mixed_cells(&cayley, &lifting).at(Stage::MixedCells)?;
    let mut timings = Timings { mixed_cells_ms: clock.ms(), ..Timings::default() };

    let clock = Clock::start();
    let certificate = if cells.inequalities.is_empty() {
        Certificate { margins: Vec::new(), pass: true, m: cayley.m(), vacuous: true }
    } else {
        certify(&lifting, &cells.inequalities, cayley.m()).at(Stage::Certificate)?
    };
    timings.certificate_ms = clock.ms();

    if !certificate.pass && !config.force {
        return Ok(SolveReport {
            start_solutions: vec![Vec::new(); cells.cells.len()],
            cells,
            certificate,
            solutions: Vec::new(),
            failures: Vec::new(),
            uncertified: false,
            timings,
        });
    }

    let clock = Clock::start();
    let homotopy = HomotopySystem::with_lifting(system, lifting);
    let mut start_solutions = Vec::with_capacity(cells.cells.len());
    let mut paths = Vec::new();
    for (k, cell) in cells.cells.iter().enumerate() {
        let bsys = binomial_from_cell(cell, system).at(Stage::StartSystems)?;
        let sols = solve_real(&bsys).at(Stage::StartSystems)?;
        paths.extend(sols.iter().map(|s| PathState::start(&homotopy, k, cell, s, &config.tracker)));
        start_solutions.push(sols);
    }
    timings.start_systems_ms = clock.ms();

    let clock = Clock::start();
    let results = run_tracking(&homotopy, &paths, config)?;
    timings.tracking_ms = clock.ms();

    let mut solutions = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(s) => solutions.push(s),
            Err(f) => failures.push(f),
        }
    }
    Ok(SolveReport {
        cells,
        uncertified: !certificate.pass,
        certificate,
        start_solutions,
        solutions,
        failures,
        timings,
    })
}

type PathResults = Vec<Result<TrackedSolution, PathFailure>>;

#[cfg(feature = "parallel")]
fn run_tracking(h: &HomotopySystem, paths: &[PathState], config: &SolverConfig) -> Result<PathResults, SolveError> {
    match config.threads {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| SolveError { stage: Stage::Tracking, source: Error::Input(e.to_string()) })?;
            Ok(pool.install(|| track(h, paths, &config.tracker)))
        }
        None => Ok(track(h, paths, &config.tracker)),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_tracking(h: &HomotopySystem, paths: &[PathState], config: &SolverConfig) -> Result<PathResults, SolveError> {
    Ok(track(h, paths, &config.tracker))
}
