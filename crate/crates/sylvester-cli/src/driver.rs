//! Solver drivers shared by the subcommands: dispatching a parsed
//! instance to a solver, CSV report rows, and the two benchmark tables
//! over generated box batches.

use std::time::Instant;

use sylvester::generator::{generate_boxes, BoxConfig, SeedConvention};
use sylvester::report::{SolverReport, StepSchedule};
use sylvester::smoothing::{solve_mm, SmoothingOptions};
use sylvester::subgrad::{solve_subgradient, SubgradOptions};

use crate::format::ParsedInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Subgrad,
    Mm,
    Directional,
}

impl SolverChoice {
    pub fn name(&self) -> &'static str {
        match self {
            SolverChoice::Subgrad => "subgrad",
            SolverChoice::Mm => "mm",
            SolverChoice::Directional => "directional",
        }
    }
}

/// A solver-side failure: the instance parsed but the requested run
/// cannot produce a report.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverFailure(pub String);

impl std::fmt::Display for SolverFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SolverFailure {}

/// Format with 9 significant digits, plain decimal where reasonable.
pub fn sig9(v: f64) -> String {
    if v == 0.0 {
        return "0.00000000".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exponent = v.abs().log10().floor() as i32;
    if (-3..15).contains(&exponent) {
        let decimals = (8 - exponent).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.8e}")
    }
}

/// Solver knobs a subcommand can override.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOverrides {
    pub max_iters: Option<usize>,
    pub schedule: Option<StepSchedule>,
}

fn subgrad_options(overrides: &RunOverrides) -> SubgradOptions {
    let mut opts = SubgradOptions::default();
    if let Some(k) = overrides.max_iters {
        opts.max_iters = k;
    }
    if let Some(s) = overrides.schedule {
        opts.schedule = s;
    }
    opts
}

/// One finished run, ready for reporting.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub solver: SolverChoice,
    pub dim: usize,
    pub targets: usize,
    pub report: SolverReport,
    pub seconds: f64,
}

impl RunOutcome {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.solver.name(),
            self.dim,
            self.targets,
            sig9(self.report.best_value),
            self.report.iterations,
            sig9(self.seconds)
        )
    }
}

pub const CSV_HEADER: &str = "solver,n,m,value,iterations,wall_time_s";

/// Dispatch one instance to one solver. The schedule override applies to
/// the subgradient solvers; `max_iters` caps subgradient iterations and
/// the smoothing solver's inner loop.
pub fn run_solver(
    inst: &ParsedInstance,
    solver: SolverChoice,
    overrides: &RunOverrides,
) -> Result<RunOutcome, SolverFailure> {
    let clock = Instant::now();
    let report = match (inst, solver) {
        (ParsedInstance::Standard(inst), SolverChoice::Subgrad) => {
            solve_subgradient(inst, &inst.default_start(), &subgrad_options(overrides))
        }
        (ParsedInstance::Standard(inst), SolverChoice::Mm) => {
            let mut opts = SmoothingOptions::default();
            if let Some(k) = overrides.max_iters {
                opts.inner_max_iters = k;
            }
            solve_mm(inst, &inst.default_start(), &opts).map_err(|e| SolverFailure(e.to_string()))?
        }
        (ParsedInstance::Directional(inst), SolverChoice::Directional) => {
            sylvester::directional::solve_directional(
                inst,
                &inst.default_start(),
                &subgrad_options(overrides),
            )
            .map_err(|e| SolverFailure(e.to_string()))?
        }
        (ParsedInstance::Standard(_), SolverChoice::Directional) => {
            return Err(SolverFailure(
                "the directional solver needs directional targets; this file has none".into(),
            ));
        }
        (ParsedInstance::Directional(_), _) => {
            return Err(SolverFailure(format!(
                "the {} solver does not handle directional targets; use --solver directional",
                solver.name()
            )));
        }
    };
    Ok(RunOutcome {
        solver,
        dim: inst.dim(),
        targets: inst.target_count(),
        report,
        seconds: clock.elapsed().as_secs_f64(),
    })
}

/// Benchmark rows over generated box batches. Table 1 varies the batch
/// size in the plane; table 2 grows the dimension at a thousand boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchTable {
    PlanarBatches,
    LargeBatches,
}

impl BenchTable {
    pub fn configs(&self) -> Vec<(usize, usize)> {
        match self {
            BenchTable::PlanarBatches => vec![(2, 100), (2, 500)],
            BenchTable::LargeBatches => vec![(100, 1000), (200, 1000)],
        }
    }

    pub fn solvers(&self) -> Vec<SolverChoice> {
        match self {
            BenchTable::PlanarBatches => vec![SolverChoice::Subgrad, SolverChoice::Mm],
            BenchTable::LargeBatches => vec![SolverChoice::Mm],
        }
    }

    pub fn header_note(&self) -> &'static str {
        match self {
            BenchTable::PlanarBatches => {
                "# planar box batches: n=2, m varies; stream seed 7, skip-seed convention"
            }
            BenchTable::LargeBatches => {
                "# large box batches: m=1000, n varies; stream seed 7, skip-seed convention"
            }
        }
    }
}

fn bench_one(n: usize, m: usize, solver: SolverChoice) -> Result<RunOutcome, SolverFailure> {
    let config = BoxConfig { dim: n, count: m, seed: 7, convention: SeedConvention::SkipSeed };
    let inst = generate_boxes(&config).map_err(|e| SolverFailure(e.to_string()))?;
    let clock = Instant::now();
    let report = match solver {
        SolverChoice::Subgrad => {
            // A diminishing sqrt step with a long stall window: the 1/k
            // default settles short of the batch optima at this scale.
            let opts = SubgradOptions {
                schedule: StepSchedule::HarmonicSqrt { c: 1.0 },
                max_iters: 2_000_000,
                stall_tol: 1e-9,
                stall_window: 200_000,
                membership_tol: 1e-9,
            };
            solve_subgradient(&inst, &inst.default_start(), &opts)
        }
        SolverChoice::Mm => solve_mm(&inst, &inst.default_start(), &SmoothingOptions::default())
            .map_err(|e| SolverFailure(e.to_string()))?,
        SolverChoice::Directional => {
            return Err(SolverFailure("benchmark tables have no directional rows".into()));
        }
    };
    Ok(RunOutcome { solver, dim: n, targets: m, report, seconds: clock.elapsed().as_secs_f64() })
}

/// Run a whole table. Rows may execute concurrently under the parallel
/// feature, but the returned rows always follow config order.
pub fn bench_table(
    table: BenchTable,
    solver_filter: Option<SolverChoice>,
) -> Result<Vec<RunOutcome>, SolverFailure> {
    let mut jobs = Vec::new();
    for (n, m) in table.configs() {
        for solver in table.solvers() {
            if solver_filter.is_none_or(|f| f == solver) {
                jobs.push((n, m, solver));
            }
        }
    }
    if jobs.is_empty() {
        return Err(SolverFailure(format!(
            "the {} solver has no rows in this table",
            solver_filter.expect("empty only under a filter").name()
        )));
    }
    run_jobs(jobs)
}

#[cfg(feature = "parallel")]
fn run_jobs(jobs: Vec<(usize, usize, SolverChoice)>) -> Result<Vec<RunOutcome>, SolverFailure> {
    use rayon::prelude::*;
    jobs.into_par_iter().map(|(n, m, s)| bench_one(n, m, s)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_jobs(jobs: Vec<(usize, usize, SolverChoice)>) -> Result<Vec<RunOutcome>, SolverFailure> {
    jobs.into_iter().map(|(n, m, s)| bench_one(n, m, s)).collect()
}
