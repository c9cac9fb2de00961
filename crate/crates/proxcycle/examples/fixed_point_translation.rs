//! Fixed-point sets of cyclic prox chains translate by the gap.
//!
//! For each index `i`, let `F_i` be the set of fixed points of the
//! full cyclic chain that ends at piece `i`. When a classical cycle
//! `z` with gap vector `y` exists, the prox of the next piece maps
//! `F_i` onto `F_{i+1}` by the fixed translation `p -> p - y_{i+1}`.
//!
//! The toy here is a pair of parallel horizontal lines at heights 1
//! and 0: every vertical pair `((t,1), (t,0))` is a cycle, the gap is
//! `y = ((0,-1), (0,1))`, `F_1` is the top line and `F_2` the bottom
//! one, and projecting any point of `F_1` onto the second line
//! subtracts exactly `y_2 = (0, 1)`.
//!
//! Run with: `cargo run --example fixed_point_translation`

use proxcycle::verify::check_fixed_point_translation;
use proxcycle::{
    naive_cycle_iterate, BlockVector, ConvexPiece, CycleProblem, Result, SolveConfig,
};

/// Applies the cyclic chain ending at piece `i` (pieces i+1, ..., i).
fn chain(problem: &CycleProblem, i: usize, p: &[f64]) -> Result<Vec<f64>> {
    let m = problem.m();
    let mut cur = p.to_vec();
    for k in 1..=m {
        cur = problem.piece((i + k) % m).prox(1.0, &cur)?;
    }
    Ok(cur)
}

fn main() -> Result<()> {
    let problem = CycleProblem::new(vec![
        ConvexPiece::indicator_line(vec![0.0, 1.0], vec![1.0, 0.0])?,
        ConvexPiece::indicator_line(vec![0.0, 0.0], vec![1.0, 0.0])?,
    ])?;

    // Find one cycle with the naive scheme.
    let x0 = BlockVector::from_blocks(&[vec![0.7, 0.3], vec![-0.4, 0.6]])?;
    let report = naive_cycle_iterate(&problem, &SolveConfig::default(), &x0)?;
    let z = report.classical_cycle.as_ref().expect("parallel lines have cycles");
    let y = &report.y;
    println!("one classical cycle (of infinitely many):");
    for (i, b) in z.to_blocks().iter().enumerate() {
        println!("  z_{} = [{:+.6}, {:+.6}]", i + 1, b[0], b[1]);
    }
    println!("gap vector:");
    for (i, b) in y.to_blocks().iter().enumerate() {
        println!("  y_{} = [{:+.6}, {:+.6}]", i + 1, b[0], b[1]);
    }
    println!();

    // Members of F_1: points on the top line are fixed by the chain
    // (project down, then back up).
    println!("membership and translation, sampled by hand:");
    for t in [-2.0, 0.25, 5.0] {
        let p = vec![t, 1.0];
        let fixed = chain(&problem, 0, &p)?;
        let moved = problem.piece(1).prox(1.0, &p)?;
        let expected = [p[0] - y.block(1)[0], p[1] - y.block(1)[1]];
        println!(
            "  p = [{:+.2}, {:+.2}] in F_1: chain(p) = [{:+.2}, {:+.2}]; \
             prox_2(p) = [{:+.2}, {:+.2}] = p - y_2 (error {:.1e})",
            p[0],
            p[1],
            fixed[0],
            fixed[1],
            moved[0],
            moved[1],
            ((moved[0] - expected[0]).powi(2) + (moved[1] - expected[1]).powi(2)).sqrt()
        );
    }
    println!();

    // The bundled check does the same with seeded random samples that
    // are first settled into F_i.
    let check = check_fixed_point_translation(&problem, z, y, 8, 17, 1e-7)?;
    println!(
        "[{}] {}: measured {:.3e} <= {:.1e}  ({})",
        if check.passed { "pass" } else { "FAIL" },
        check.name,
        check.measured,
        check.tolerance,
        check.identity
    );
    Ok(())
}
