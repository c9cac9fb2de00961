//! Closed-form cycles for families of lines.
//!
//! For lines `a_i + span(b_i)` the cycle conditions reduce to a small
//! linear system in the line parameters `t_i`, with a circulant
//! bidiagonal-plus-corner matrix. Its determinant has a closed form,
//! and it vanishes exactly when all directions are pairwise parallel:
//! then the cycles form an infinite family, otherwise the cycle is
//! unique. Both branches are compared against the iterative solver.
//!
//! Run with: `cargo run --example analytic_lines`

use proxcycle::{
    determinant_formula, generalized_solve, seeded_start, solve_line_cycles, LineClassification,
    LineFamily, Result, SolveConfig,
};

fn describe(name: &str, family: &LineFamily) -> Result<()> {
    let solution = solve_line_cycles(family)?;
    println!("{name}:");
    println!(
        "  determinant {:+.6} (closed form {:+.6})",
        solution.determinant,
        determinant_formula(family)
    );
    match &solution.classification {
        LineClassification::Unique { t } => {
            println!("  unique cycle at parameters t = {t:?}");
        }
        LineClassification::InfiniteFamily { t_particular, nullspace } => {
            println!("  infinite family: particular t = {t_particular:?}");
            println!("  free directions in parameter space: {nullspace:?}");
        }
    }
    for (i, b) in solution.cycle_points.to_blocks().iter().enumerate() {
        println!("  u_{} = [{:+.6}, {:+.6}]", i + 1, b[0], b[1]);
    }
    for (i, b) in solution.gap_vector.to_blocks().iter().enumerate() {
        println!("  y_{} = [{:+.6}, {:+.6}]", i + 1, b[0], b[1]);
    }

    // Cross-check the gap vector against the iterative solver.
    let problem = family.to_problem()?;
    let x0 = seeded_start(problem.m(), problem.d(), 3)?;
    let iterative = generalized_solve(&problem, &SolveConfig::default(), &x0)?;
    let agree = solution.gap_vector.sub(&iterative.y)?.norm();
    println!("  ||y_analytic - y_iterative|| = {agree:.3e}");
    println!();
    Ok(())
}

fn main() -> Result<()> {
    let unique = LineFamily::new(vec![
        (vec![0.0, 0.0], vec![1.0, 0.0]),
        (vec![2.0, -1.0], vec![1.0, 1.0]),
        (vec![1.0, 3.0], vec![0.0, 1.0]),
    ])?;
    describe("three lines in general position", &unique)?;

    let parallel = LineFamily::new(vec![
        (vec![0.0, 1.0], vec![1.0, 0.0]),
        (vec![0.0, 0.0], vec![1.0, 0.0]),
    ])?;
    describe("two parallel horizontal lines", &parallel)?;

    println!("pairwise parallel <=> zero determinant <=> infinite family");
    Ok(())
}
