//! Classical cycles via the naive cyclic scheme — and how it fails
//! when no cycle exists.
//!
//! First, three quadratic wells: the cyclic prox composition is a
//! strict contraction, so the scheme converges geometrically to the
//! unique classical cycle. Second, the epigraph-vs-axis pair: there
//! is no cycle, and the iterates drift toward infinity (the drift is
//! logarithmic, so the norm grows very slowly; the report flags that
//! no cycle was certified).
//!
//! Run with: `cargo run --example classical_cycles`

use proxcycle::{
    naive_cycle_iterate, seeded_start, BlockVector, ConvexPiece, CycleProblem, Result,
    SolveConfig,
};

fn main() -> Result<()> {
    // --- A problem with a unique classical cycle -------------------
    let wells = CycleProblem::new(vec![
        ConvexPiece::quadratic(vec![1.0, 0.0], 1.0)?,
        ConvexPiece::quadratic(vec![-0.5, 1.0], 2.0)?,
        ConvexPiece::quadratic(vec![0.0, -1.0], 0.5)?,
    ])?;
    let config = SolveConfig::default();
    let x0 = seeded_start(wells.m(), wells.d(), 5)?;
    let report = naive_cycle_iterate(&wells, &config, &x0)?;

    println!("three quadratic wells:");
    println!("  status {} after {} iterations", report.status.name(), report.iterations);
    let z = report.classical_cycle.as_ref().expect("contraction converges");
    for (i, b) in z.to_blocks().iter().enumerate() {
        println!("  z_{} = [{:+.9}, {:+.9}]", i + 1, b[0], b[1]);
    }
    println!("  cycle residual: {:.3e}", wells.cycle_residual(z)?);
    println!("  gap vector noise (y + y shifted sums to 0): ||sum y_i|| = {:.3e}", {
        let blocks = report.y.to_blocks();
        let mut s = vec![0.0; wells.d()];
        for b in &blocks {
            for (acc, v) in s.iter_mut().zip(b) {
                *acc += v;
            }
        }
        s.iter().map(|v| v * v).sum::<f64>().sqrt()
    });
    println!();

    // --- A problem with no classical cycle -------------------------
    let pair = CycleProblem::new(vec![
        ConvexPiece::indicator_epi_exp_shift(1.0)?,
        ConvexPiece::indicator_line(vec![0.0, 0.0], vec![1.0, 0.0])?,
    ])?;
    let capped = SolveConfig { max_outer_iters: 50_000, ..SolveConfig::default() };
    let x0 = BlockVector::zeros(pair.m(), pair.d())?;
    let report = naive_cycle_iterate(&pair, &capped, &x0)?;

    println!("epigraph of exp(-t)+1 vs horizontal axis:");
    println!("  status {} after {} iterations", report.status.name(), report.iterations);
    println!("  cycle recovered: {}", report.classical_cycle.is_some());
    for w in &report.warnings {
        println!("  warning: {w}");
    }
    // The trace records the unprojected iterate norm: it keeps
    // creeping upward (log-slowly) instead of settling.
    let early = &report.trace[99];
    let late = report.trace.last().unwrap();
    println!(
        "  ||iterate||: {:.4} at iteration {}  ->  {:.4} at iteration {}",
        early.norm_x, early.iter, late.norm_x, late.iter
    );
    println!("  (no finite limit exists; the displacement infimum is not attained)");
    Ok(())
}
