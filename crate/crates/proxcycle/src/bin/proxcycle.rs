//! Command-line front end: parse a problem file, run the requested
//! solver, write the report and trace, and exit 0 only when the run
//! converged with every verification check passing.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use proxcycle::io::{self, Mode, RunOptions};

#[derive(Parser)]
#[command(
    name = "proxcycle",
    about = "Classical and generalized cycles of cyclic proximal compositions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a solver on a JSON problem file.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the problem file (schema proxcycle-problem/1).
    problem: PathBuf,
    /// Solver mode: naive, generalized, analytic_lines, verify_all.
    #[arg(long)]
    mode: Option<Mode>,
    /// Forward step size in (0, 1).
    #[arg(long)]
    gamma: Option<f64>,
    /// Constant relaxation in (0, 2 - gamma).
    #[arg(long)]
    lambda: Option<f64>,
    /// Outer iteration cap.
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Fixed-point residual threshold.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for the pseudo-random start (ignored when the file pins x0).
    #[arg(long)]
    seed: Option<u64>,
    /// Write the per-iteration trace as CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn run(args: &RunArgs) -> Result<i32, proxcycle::Error> {
    let file = io::parse_problem(&args.problem)?;
    let opts = RunOptions {
        mode: args.mode,
        gamma: args.gamma,
        lambda: args.lambda,
        max_iters: args.max_iters,
        tol: args.tol,
        seed: args.seed,
        trace_path: args.trace.as_ref().map(|p| p.display().to_string()),
        report_path: args.report.as_ref().map(|p| p.display().to_string()),
    };
    let outcome = io::run(&file, &opts)?;
    let mut text = String::new();
    let _ = writeln!(text, "{}", outcome.summary);
    for check in &outcome.report.verification {
        let verdict = if check.skipped {
            "SKIP"
        } else if check.passed {
            "pass"
        } else {
            "FAIL"
        };
        let _ = writeln!(
            text,
            "  [{verdict}] {}: measured {:.3e} vs tolerance {:.3e}  ({})",
            check.name, check.measured, check.tolerance, check.identity
        );
    }
    for warning in &outcome.report.warnings {
        let _ = writeln!(text, "  note: {warning}");
    }
    // A closed pipe (e.g. `proxcycle ... | head`) must not turn a
    // finished run into a failure; the exit code carries the verdict.
    let _ = std::io::stdout().write_all(text.as_bytes());
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match run(&args) {
            Ok(code) => ExitCode::from(code as u8),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
