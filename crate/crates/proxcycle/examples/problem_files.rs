//! The file pipeline: strict JSON problems in, deterministic JSON
//! reports and CSV traces out.
//!
//! This drives the same dispatcher as the `proxcycle` binary: parse a
//! bundled problem file, run it in `verify_all` mode, and write the
//! report and trace. Problem parsing is strict — unknown keys and
//! parameters that do not belong to a piece kind are rejected, which
//! the end of the example demonstrates.
//!
//! Run with: `cargo run --example problem_files`

use proxcycle::io::{self, parse_problem, parse_problem_str, RunOptions};
use proxcycle::Result;
use std::path::Path;

fn main() -> Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    let file = parse_problem(dir.join("intersecting_lines.json"))?;
    println!("loaded problem: {}", file.name.as_deref().unwrap_or("?"));
    println!("  pieces: {}, ambient dim {}", file.pieces.len(), file.ambient_dim);
    println!("  mode {:?}, seed {}", file.mode(), file.seed());
    println!();

    let out_dir = std::env::temp_dir();
    let opts = RunOptions {
        trace_path: Some(out_dir.join("intersecting_lines.trace.csv").display().to_string()),
        report_path: Some(out_dir.join("intersecting_lines.report.json").display().to_string()),
        ..RunOptions::default()
    };
    let outcome = io::run(&file, &opts)?;
    println!("{}", outcome.summary);
    println!("exit code {}", outcome.exit_code);
    for c in &outcome.report.verification {
        println!(
            "  [{}] {:<28} measured {:.3e} <= {:.1e}",
            if c.skipped {
                "skip"
            } else if c.passed {
                "pass"
            } else {
                "FAIL"
            },
            c.name,
            c.measured,
            c.tolerance
        );
    }
    println!();
    println!("wrote {}", opts.trace_path.as_deref().unwrap());
    println!("wrote {}", opts.report_path.as_deref().unwrap());
    let trace = std::fs::read_to_string(opts.trace_path.as_deref().unwrap())?;
    println!("trace head:");
    for line in trace.lines().take(3) {
        println!("  {line}");
    }
    println!();

    // Strictness: a misspelled key is an error, not a silent default.
    let bad = r#"{
      "schema": "proxcycle-problem/1",
      "ambient_dim": 2,
      "pieces": [
        {"kind": "indicator_line", "anchor": [0.0, 0.0], "direction": [1.0, 0.0]}
      ],
      "outer_tolerance": 1e-9
    }"#;
    match parse_problem_str(bad, "inline example") {
        Err(e) => println!("strict parsing rejected a misspelled key:\n  {e}"),
        Ok(_) => println!("unexpected: bad file accepted"),
    }
    Ok(())
}
