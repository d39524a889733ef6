//! Command line front end. `solve` runs one instance file, `bench`
//! reproduces the generated-batch tables, `gen` writes a generated
//! instance as a file. Exit codes: 0 success, 2 parse or usage error,
//! 3 solver error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sylvester::generator::{generate_boxes, BoxConfig, SeedConvention};
use sylvester::report::{StepSchedule, StopReason};

use sylvester_cli::driver::{
    bench_table, run_solver, sig9, BenchTable, RunOutcome, RunOverrides, SolverChoice, CSV_HEADER,
};
use sylvester_cli::format::{parse_str, render, ParsedInstance};
use sylvester_cli::svg::{render_svg, Solution};

const EXIT_PARSE: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "sylvester", version, about = "Generalized smallest intersecting/enclosing ball solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance file and report the result.
    Solve(SolveArgs),
    /// Run a benchmark table over generated box batches.
    Bench(BenchArgs),
    /// Generate a box-batch instance file.
    Gen(GenArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file to solve.
    file: PathBuf,
    /// Solver to run.
    #[arg(long, value_enum, default_value_t = SolverArg::Subgrad)]
    solver: SolverArg,
    /// Iteration cap: subgradient steps, or the smoothing inner loop.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Step schedule for the subgradient solvers, e.g. harmonic:1.0,
    /// sqrt:0.5, constant:0.01.
    #[arg(long, value_parser = parse_schedule)]
    schedule: Option<StepSchedule>,
    /// Write a drawing of the instance and solution (planar only).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Append the report row to a CSV file (header written when new).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Which table to run: 1 (planar batches) or 2 (large batches).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    table: u8,
    /// Restrict to one solver (table 1 runs both by default).
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    /// Write the table to a CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Ambient dimension.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Number of boxes.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    m: u64,
    /// Stream seed in [0, 4095].
    #[arg(long, default_value_t = 7, value_parser = clap::value_parser!(u32).range(0..4096))]
    seed: u32,
    /// Whether the seed itself is consumed before the first value.
    #[arg(long, value_enum, default_value_t = ConventionArg::SkipSeed)]
    convention: ConventionArg,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Subgrad,
    Mm,
    Directional,
}

impl From<SolverArg> for SolverChoice {
    fn from(value: SolverArg) -> Self {
        match value {
            SolverArg::Subgrad => SolverChoice::Subgrad,
            SolverArg::Mm => SolverChoice::Mm,
            SolverArg::Directional => SolverChoice::Directional,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    SkipSeed,
    IncludeSeed,
}

impl From<ConventionArg> for SeedConvention {
    fn from(value: ConventionArg) -> Self {
        match value {
            ConventionArg::SkipSeed => SeedConvention::SkipSeed,
            ConventionArg::IncludeSeed => SeedConvention::IncludeSeed,
        }
    }
}

fn parse_schedule(text: &str) -> Result<StepSchedule, String> {
    let (kind, c) = text
        .split_once(':')
        .ok_or_else(|| format!("expected kind:c, e.g. harmonic:1.0, got `{text}`"))?;
    let c: f64 = c.parse().map_err(|_| format!("bad schedule constant `{c}`"))?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(format!("schedule constant must be positive, got {c}"));
    }
    match kind {
        "harmonic" => Ok(StepSchedule::Harmonic { c }),
        "sqrt" => Ok(StepSchedule::HarmonicSqrt { c }),
        "constant" => Ok(StepSchedule::Constant { c }),
        _ => Err(format!("unknown schedule `{kind}`; use harmonic, sqrt, or constant")),
    }
}

fn stop_reason_label(reason: &StopReason) -> &'static str {
    match reason {
        StopReason::MaxIters => "iteration budget exhausted",
        StopReason::ValueStall => "best value stalled",
        StopReason::FoundZero => "zero-objective point found",
        StopReason::MembershipBreak => "iterate entered the active target",
        StopReason::SmoothingExhausted => "smoothing fully decayed",
    }
}

fn append_csv(path: &PathBuf, note: Option<&str>, rows: &[&RunOutcome]) -> Result<(), String> {
    use std::io::Write as _;
    let new_file = !path.exists();
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| format!("cannot open {}: {e}", path.display()))?;
    let mut text = String::new();
    if new_file {
        if let Some(note) = note {
            text.push_str(note);
            text.push('\n');
        }
        text.push_str(CSV_HEADER);
        text.push('\n');
    }
    for row in rows {
        text.push_str(&row.csv_row());
        text.push('\n');
    }
    file.write_all(text.as_bytes()).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn print_outcome(outcome: &RunOutcome) {
    let report = &outcome.report;
    println!(
        "{} solver: value {} after {} iterations ({}), {} s",
        outcome.solver.name(),
        sig9(report.best_value),
        report.iterations,
        stop_reason_label(&report.stop_reason),
        sig9(outcome.seconds)
    );
    let coords: Vec<String> = report.best_point.iter().map(|v| sig9(*v)).collect();
    println!("center ({})", coords.join(", "));
}

fn cmd_solve(args: SolveArgs) -> Result<(), (u8, String)> {
    let text = fs::read_to_string(&args.file)
        .map_err(|e| (EXIT_PARSE, format!("cannot read {}: {e}", args.file.display())))?;
    let inst = parse_str(&text)
        .map_err(|e| (EXIT_PARSE, format!("{}: {e}", args.file.display())))?;

    let overrides = RunOverrides { max_iters: args.max_iters, schedule: args.schedule };
    let outcome = run_solver(&inst, args.solver.into(), &overrides)
        .map_err(|e| (EXIT_SOLVER, e.to_string()))?;
    print_outcome(&outcome);

    if let Some(path) = &args.csv {
        append_csv(path, None, &[&outcome]).map_err(|e| (EXIT_SOLVER, e))?;
    }
    if let Some(path) = &args.svg {
        if inst.dim() == 2 {
            let solution = Solution {
                center: &outcome.report.best_point,
                radius: outcome.report.best_value,
            };
            let drawing = render_svg(&inst, Some(solution))
                .map_err(|e| (EXIT_SOLVER, e.to_string()))?;
            fs::write(path, drawing)
                .map_err(|e| (EXIT_SOLVER, format!("cannot write {}: {e}", path.display())))?;
        } else {
            eprintln!("note: skipping {}; drawings are planar only", path.display());
        }
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), (u8, String)> {
    let table = if args.table == 1 { BenchTable::PlanarBatches } else { BenchTable::LargeBatches };
    let rows = bench_table(table, args.solver.map(Into::into))
        .map_err(|e| (EXIT_SOLVER, e.to_string()))?;

    println!("{}", table.header_note());
    println!("{CSV_HEADER}");
    for row in &rows {
        println!("{}", row.csv_row());
    }
    if let Some(path) = &args.csv {
        let refs: Vec<&RunOutcome> = rows.iter().collect();
        append_csv(path, Some(table.header_note()), &refs).map_err(|e| (EXIT_SOLVER, e))?;
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), (u8, String)> {
    let config = BoxConfig {
        dim: args.n as usize,
        count: args.m as usize,
        seed: args.seed,
        convention: args.convention.into(),
    };
    let inst = generate_boxes(&config).map_err(|e| (EXIT_PARSE, e.to_string()))?;
    let text = render(&ParsedInstance::Standard(inst));
    match &args.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| (EXIT_PARSE, format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Gen(args) => cmd_gen(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
