//! Acceptance gate: the seven headline requirements, one test per
//! criterion. Each test prints a single `criterion N: PASS/FAIL`
//! line with the measured numbers before asserting, so the verdicts
//! are visible in the test output (run with `-- --nocapture` to see
//! the lines for passing tests as well).

use proxcycle::io::{self, parse_problem, RunOptions};
use proxcycle::verify::check_fixed_point_translation;
use proxcycle::{
    brute_force_cycle_search, determinant_formula, generalized_solve, naive_cycle_iterate,
    prox_closure_infconv, seeded_start, solve_line_cycles, BlockVector, ConvexPiece,
    CycleProblem, LineClassification, LineFamily, SolveConfig, SolveStatus,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;

fn bundled(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn inf_dist(blocks: &[Vec<f64>], target: &[f64]) -> f64 {
    blocks
        .iter()
        .flatten()
        .zip(target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn verdict(criterion: &str, passed: bool, detail: &str) -> bool {
    println!("criterion {criterion}: {} — {detail}", if passed { "PASS" } else { "FAIL" });
    passed
}

// ---------------------------------------------------------------
// 1. Shifted-epigraph pair: generalized limits at alpha = 1 and 0.
// ---------------------------------------------------------------
#[test]
fn criterion_1_generalized_limits_of_the_epigraph_pair() {
    // alpha = 1: gap (0,-1,0,1), cycle (0,1/2,0,-1/2), within 1e-4.
    let file = parse_problem(bundled("ex61_alpha1.json")).unwrap();
    let outcome = io::run(&file, &RunOptions::default()).unwrap();
    let run_a = &outcome.report;
    let err_y1 = inf_dist(&run_a.y, &[0.0, -1.0, 0.0, 1.0]);
    let err_x1 = inf_dist(&run_a.x, &[0.0, 0.5, 0.0, -0.5]);

    // alpha = 0: both limits vanish, within 1e-4.
    let file = parse_problem(bundled("ex61_alpha0.json")).unwrap();
    let outcome = io::run(&file, &RunOptions::default()).unwrap();
    let run_b = &outcome.report;
    let err_y0 = inf_dist(&run_b.y, &[0.0; 4]);
    let err_x0 = inf_dist(&run_b.x, &[0.0; 4]);

    let ok = verdict(
        "1",
        err_y1 <= 1e-4 && err_x1 <= 1e-4 && err_y0 <= 1e-4 && err_x0 <= 1e-4,
        &format!(
            "alpha=1: |y - (0,-1,0,1)| = {err_y1:.2e}, |x - (0,1/2,0,-1/2)| = {err_x1:.2e}; \
             alpha=0: |y| = {err_y0:.2e}, |x| = {err_x0:.2e} (all <= 1e-4)"
        ),
    );
    assert!(ok);
}

// ---------------------------------------------------------------
// 2. Nonexistence diagnostics for the same pair.
// ---------------------------------------------------------------
#[test]
fn criterion_2_nonexistence_diagnostics() {
    let problem = CycleProblem::new(vec![
        ConvexPiece::indicator_epi_exp_shift(1.0).unwrap(),
        ConvexPiece::indicator_line(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap(),
    ])
    .unwrap();

    // Clause A: the naive scheme must trigger DivergenceDetected with
    // the default threshold of 1e8. The iterates do escape to
    // infinity, but only logarithmically: the norm after the full
    // default iteration budget is still O(10). A lowered threshold
    // demonstrates that the detector itself works.
    let config = SolveConfig::default();
    let x0 = BlockVector::zeros(2, 2).unwrap();
    let report = naive_cycle_iterate(&problem, &config, &x0).unwrap();
    let final_norm = report.trace.last().map(|t| t.norm_x).unwrap_or(0.0);
    let clause_a = report.status == SolveStatus::DivergenceDetected;

    let low = SolveConfig { divergence_threshold: 12.0, ..SolveConfig::default() };
    let low_report = naive_cycle_iterate(&problem, &low, &x0).unwrap();
    let detector_works = low_report.status == SolveStatus::DivergenceDetected;

    // Clause B: exhaustive search over [-3,3]^4 at 41 points per axis
    // must leave a minimum cycle residual above 0.05. The grid's best
    // point parks both blocks at the right edge, where the residual
    // is the vertical epigraph clearance exp(-3) ~ 0.0498, slightly
    // below the stated bound.
    let hit = brute_force_cycle_search(&problem, -3.0, 3.0, 41).unwrap();
    let clause_b = hit.residual > 0.05;

    let ok = verdict(
        "2",
        clause_a && clause_b,
        &format!(
            "naive status {} after {} iterations, ||x_n|| = {final_norm:.2} \
             (threshold 1e8 requires ~exp(2e8) iterations; detector fires at \
             threshold 12: {detector_works}); grid minimum residual {:.6} \
             (required > 0.05, true floor is exp(-3) = {:.6})",
            report.status.name(),
            report.iterations,
            hit.residual,
            (-3.0f64).exp(),
        ),
    );
    assert!(ok);
}

// ---------------------------------------------------------------
// 3. Line families: determinant formula, dichotomy, cross-solver.
// ---------------------------------------------------------------
fn random_direction(rng: &mut ChaCha8Rng, d: usize, chosen: &[Vec<f64>]) -> Vec<f64> {
    'outer: for _ in 0..10_000 {
        let cand: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = cand.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 0.3 {
            continue;
        }
        // Keep directions bounded away from parallel so the naive
        // solver converges at a healthy linear rate.
        for b in chosen {
            let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            let cos = cand.iter().zip(b).map(|(a, c)| a * c).sum::<f64>() / (norm * bn);
            if cos.abs() > 0.95 {
                continue 'outer;
            }
        }
        return cand;
    }
    unreachable!("direction sampling exhausted its attempts");
}

#[test]
fn criterion_3_line_family_dichotomy() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut worst_det = 0.0f64;
    let mut worst_stat = 0.0f64;
    let mut worst_agree = 0.0f64;
    let mut classification_ok = true;
    let mut unique_count = 0;

    for idx in 0..100 {
        let m = rng.gen_range(2..=6);
        let d = rng.gen_range(2..=4);
        let parallel = idx % 7 == 0;

        let mut lines: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(m);
        if parallel {
            let base = random_direction(&mut rng, d, &[]);
            for _ in 0..m {
                let s: f64 = {
                    let mag = rng.gen_range(0.5..1.8);
                    if rng.gen_bool(0.5) {
                        mag
                    } else {
                        -mag
                    }
                };
                let anchor: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
                lines.push((anchor, base.iter().map(|v| v * s).collect()));
            }
        } else {
            let mut chosen: Vec<Vec<f64>> = Vec::new();
            for _ in 0..m {
                let dir = random_direction(&mut rng, d, &chosen);
                chosen.push(dir.clone());
                let anchor: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
                lines.push((anchor, dir));
            }
        }

        let family = LineFamily::new(lines).unwrap();
        let solution = solve_line_cycles(&family).unwrap();

        // Determinant: numeric vs closed form, relative to the
        // natural scale prod_i <b_i, b_i>.
        let scale: f64 = (0..family.m())
            .map(|i| family.direction(i).iter().map(|v| v * v).sum::<f64>())
            .product::<f64>()
            .max(1.0);
        let det_err = (solution.determinant - determinant_formula(&family)).abs() / scale;
        worst_det = worst_det.max(det_err);

        // Dichotomy: infinite family exactly for pairwise parallel.
        let is_infinite = matches!(solution.classification, LineClassification::InfiniteFamily { .. });
        if is_infinite != parallel {
            classification_ok = false;
        }

        if !parallel {
            unique_count += 1;
            // Stationarity of the analytic cycle.
            let u = &solution.cycle_points;
            for i in 0..family.m() {
                let prev = u.block(if i == 0 { family.m() - 1 } else { i - 1 });
                let dot: f64 = u
                    .block(i)
                    .iter()
                    .zip(prev)
                    .zip(family.direction(i))
                    .map(|((c, p), b)| (c - p) * b)
                    .sum();
                worst_stat = worst_stat.max(dot.abs());
            }

            // Cross-check against the iterative cycle solver.
            let problem = family.to_problem().unwrap();
            let config = SolveConfig { outer_tol: 1e-10, ..SolveConfig::default() };
            let x0 = seeded_start(problem.m(), problem.d(), 1000 + idx as u64).unwrap();
            let report = naive_cycle_iterate(&problem, &config, &x0).unwrap();
            assert_eq!(
                report.status,
                SolveStatus::Converged,
                "naive solver must converge on family {idx}"
            );
            let z = report.classical_cycle.expect("converged runs certify a cycle");
            let agree = z.sub(&solution.cycle_points).unwrap().norm();
            worst_agree = worst_agree.max(agree);
        }
    }

    let ok = verdict(
        "3",
        worst_det <= 1e-10 && classification_ok && worst_stat <= 1e-9 && worst_agree <= 1e-6,
        &format!(
            "100 families ({unique_count} unique, {} parallel): determinant error \
             <= {worst_det:.2e} (rel, tol 1e-10), classification matches parallelism: \
             {classification_ok}, stationarity <= {worst_stat:.2e} (tol 1e-9), \
             analytic-vs-iterative cycle distance <= {worst_agree:.2e} (tol 1e-6)",
            100 - unique_count
        ),
    );
    assert!(ok);
}

// ---------------------------------------------------------------
// 4. Structural identities on every converged generalized run.
// ---------------------------------------------------------------
fn random_piece(rng: &mut ChaCha8Rng, d: usize, force_quadratic: bool) -> ConvexPiece {
    let choice = if force_quadratic { 0 } else { rng.gen_range(0..5) };
    match choice {
        0 => {
            let anchor: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            ConvexPiece::quadratic(anchor, rng.gen_range(0.5..2.0)).unwrap()
        }
        1 => {
            let anchor: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let dir = random_direction(rng, d, &[]);
            ConvexPiece::indicator_line(anchor, dir).unwrap()
        }
        2 => {
            let normal = random_direction(rng, d, &[]);
            ConvexPiece::indicator_halfspace(normal, rng.gen_range(-0.5..1.5)).unwrap()
        }
        3 => {
            let lower: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..-0.5)).collect();
            let upper: Vec<f64> = (0..d).map(|_| rng.gen_range(0.5..2.0)).collect();
            ConvexPiece::indicator_box(lower, upper).unwrap()
        }
        _ => {
            let center: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.5..0.5)).collect();
            ConvexPiece::indicator_ball(center, rng.gen_range(1.0..2.0)).unwrap()
        }
    }
}

#[test]
fn criterion_4_structural_identity_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut worst = [0.0f64; 6];
    let config = SolveConfig::default();

    for _case in 0..25 {
        let m = rng.gen_range(2..=4);
        let d = rng.gen_range(1..=3);
        // Always include a quadratic piece: strong convexity keeps
        // every scheme briskly convergent.
        let pieces: Vec<ConvexPiece> =
            (0..m).map(|i| random_piece(&mut rng, d, i == 0)).collect();
        let problem = CycleProblem::new(pieces).unwrap();

        let seed_a = rng.gen_range(0..1_000_000);
        let seed_b = seed_a + 7;
        let start_a = seeded_start(m, d, seed_a).unwrap();
        let start_b = seeded_start(m, d, seed_b).unwrap();
        // A diagonal shift of start_a: every block moves by the same
        // random offset.
        let offset: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let shifted_blocks: Vec<Vec<f64>> = start_a
            .to_blocks()
            .iter()
            .map(|b| b.iter().zip(&offset).map(|(v, o)| v + o).collect())
            .collect();
        let start_c = BlockVector::from_blocks(&shifted_blocks).unwrap();

        let run_a = generalized_solve(&problem, &config, &start_a).unwrap();
        let run_b = generalized_solve(&problem, &config, &start_b).unwrap();
        let run_c = generalized_solve(&problem, &config, &start_c).unwrap();
        for run in [&run_a, &run_b, &run_c] {
            assert_eq!(run.status, SolveStatus::Converged, "all sampled problems converge");
            // (i) y is orthogonal to the diagonal.
            worst[0] = worst[0]
                .max(run.y.proj_diagonal().norm() / run.y.norm().max(1.0));
            // (ii) y is the cyclic gap of x.
            worst[1] = worst[1].max(run.y.sub(&run.x.cyclic_gap()).unwrap().norm());
            // (iii) x = -y/2 - Ty.
            worst[2] = worst[2].max(
                run.x
                    .axpy(0.5, &run.y)
                    .unwrap()
                    .add(&run.y.skew_t())
                    .unwrap()
                    .norm(),
            );
        }
        // Uniqueness of the gap vector across starts.
        worst[3] = worst[3].max(run_a.y.sub(&run_b.y).unwrap().norm());
        // Diagonal-shift invariance of both reported objects.
        worst[4] = worst[4].max(run_a.x.sub(&run_c.x).unwrap().norm());
        worst[5] = worst[5].max(run_a.y.sub(&run_c.y).unwrap().norm());
    }

    let ok = verdict(
        "4",
        worst[0] <= 1e-8
            && worst[1] <= 1e-8
            && worst[2] <= 1e-7
            && worst[3] <= 1e-7
            && worst[4] <= 1e-7
            && worst[5] <= 1e-7,
        &format!(
            "75 converged runs on 25 random problems: ||P_D y||/max(1,||y||) <= {:.2e} \
             (1e-8), ||y - (Rx-x)|| <= {:.2e} (1e-8), ||x + y/2 + Ty|| <= {:.2e} (1e-7), \
             gap uniqueness across starts <= {:.2e} (1e-7), diagonal-shift invariance \
             <= {:.2e} / {:.2e} (1e-7)",
            worst[0], worst[1], worst[2], worst[3], worst[4], worst[5]
        ),
    );
    assert!(ok);
}

// ---------------------------------------------------------------
// 5. Operator identities on the product space.
// ---------------------------------------------------------------
#[test]
fn criterion_5_operator_identity_suite() {
    let mut worst = [0.0f64; 3];
    let mut count = 0usize;
    let mut seed = 0u64;
    while count < 1000 {
        for m in 2..=8 {
            for d in 1..=5 {
                seed += 1;
                count += 1;
                let x = seeded_start(m, d, seed).unwrap();
                let half_plus_t =
                    |v: &BlockVector| v.scale(0.5).add(&v.skew_t()).unwrap();

                worst[0] = worst[0].max(x.skew_t().dot(&x).unwrap().abs());

                let inner = x
                    .sub(&x.shift())
                    .unwrap()
                    .add(&x.proj_diagonal().scale(2.0))
                    .unwrap();
                worst[1] = worst[1].max(half_plus_t(&inner).sub(&x).unwrap().norm());

                let transfer = half_plus_t(&x.sub(&x.shift()).unwrap())
                    .sub(&x.proj_diagonal_perp())
                    .unwrap()
                    .norm();
                worst[2] = worst[2].max(transfer);
            }
        }
    }

    let ok = verdict(
        "5",
        worst.iter().all(|&w| w <= 1e-12),
        &format!(
            "{count} random block vectors, m in 2..=8, d in 1..=5: |<Tx,x>| <= {:.2e}, \
             ||(I/2+T)(I-R+2P_D)x - x|| <= {:.2e}, ||(I/2+T)(I-R)x - P_perp x|| <= {:.2e} \
             (all tol 1e-12)",
            worst[0], worst[1], worst[2]
        ),
    );
    assert!(ok);
}

// ---------------------------------------------------------------
// 6. Prox correctness for every catalog kind + infimal convolution
//    against independent oracles.
// ---------------------------------------------------------------
fn catalog(rng: &mut ChaCha8Rng) -> Vec<(ConvexPiece, usize)> {
    let mut pieces = Vec::new();
    // (piece, ambient dim)
    pieces.push((
        ConvexPiece::indicator_affine_subspace(
            vec![0.3, -0.2, 0.5],
            vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, -1.0]],
        )
        .unwrap(),
        3,
    ));
    pieces.push((
        ConvexPiece::indicator_line(vec![0.5, -1.0], vec![2.0, 1.0]).unwrap(),
        2,
    ));
    pieces.push((
        ConvexPiece::indicator_halfspace(vec![1.0, -0.5, 0.25], 0.75).unwrap(),
        3,
    ));
    pieces.push((ConvexPiece::indicator_ball(vec![0.2, -0.3], 1.2).unwrap(), 2));
    pieces.push((
        ConvexPiece::indicator_box(vec![-1.0, -0.5], vec![0.5, 1.5]).unwrap(),
        2,
    ));
    pieces.push((
        ConvexPiece::indicator_epi_exp_shift(rng.gen_range(0.0..1.5)).unwrap(),
        2,
    ));
    pieces.push((
        ConvexPiece::quadratic(vec![0.4, -0.6, 0.1], rng.gen_range(0.5..3.0)).unwrap(),
        3,
    ));
    pieces.push((ConvexPiece::linear(vec![0.7, -0.2]).unwrap(), 2));
    pieces
}

#[test]
fn criterion_6_prox_correctness_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut worst_vi = 0.0f64;
    let mut worst_firm = 0.0f64;
    let mut worst_idem = 0.0f64;
    let mut worst_epi = 0.0f64;

    for (piece, d) in catalog(&mut rng) {
        for _ in 0..200 {
            let gamma = rng.gen_range(0.2..2.0);
            let v1: Vec<f64> = (0..d).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let v2: Vec<f64> = (0..d).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let p1 = piece.prox(gamma, &v1).unwrap();
            let p2 = piece.prox(gamma, &v2).unwrap();

            // Variational inequality: <v - p, u - p> <= gamma (f(u) - f(p))
            // for a feasible comparison point u.
            let u_raw: Vec<f64> = (0..d).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let u = if piece.is_indicator() {
                piece.prox(1.0, &u_raw).unwrap()
            } else {
                u_raw
            };
            let lhs: f64 = v1
                .iter()
                .zip(&p1)
                .zip(u.iter().zip(&p1))
                .map(|((v, p), (uu, pp))| (v - p) * (uu - pp))
                .sum();
            let rhs = gamma * (piece.value(&u).unwrap() - piece.value(&p1).unwrap());
            worst_vi = worst_vi.max(lhs - rhs);

            // Firm nonexpansiveness.
            let diff_p: f64 = p1.iter().zip(&p2).map(|(a, b)| (a - b) * (a - b)).sum();
            let cross: f64 = p1
                .iter()
                .zip(&p2)
                .zip(v1.iter().zip(&v2))
                .map(|((a, b), (va, vb))| (a - b) * (va - vb))
                .sum();
            worst_firm = worst_firm.max(diff_p - cross);

            // Idempotence for projections.
            if piece.is_indicator() {
                let pp = piece.prox(gamma, &p1).unwrap();
                let idem: f64 = pp
                    .iter()
                    .zip(&p1)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                worst_idem = worst_idem.max(idem);
            }

            // Epigraph feasibility.
            if matches!(piece.kind(), proxcycle::PieceKind::IndicatorEpiExpShift { .. }) {
                if let proxcycle::PieceKind::IndicatorEpiExpShift { alpha } = piece.kind() {
                    let slack = ((-p1[0]).exp() + alpha) - p1[1];
                    worst_epi = worst_epi.max(slack);
                }
            }
        }
    }

    // Infimal convolution vs the direct quadratic-program oracle on
    // all-quadratic problems: eliminate the blocks coordinatewise and
    // solve the scalar stationarity equation for the shared shift.
    let mut worst_qp = 0.0f64;
    for case in 0..40 {
        let m = 2 + case % 3;
        let d = 1 + case % 3;
        let mut pieces = Vec::new();
        let mut anchors = Vec::new();
        let mut weights = Vec::new();
        for _ in 0..m {
            let a: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let w = rng.gen_range(0.4..2.5);
            pieces.push(ConvexPiece::quadratic(a.clone(), w).unwrap());
            anchors.push(a);
            weights.push(w);
        }
        let problem = CycleProblem::new(pieces).unwrap();
        let gamma = rng.gen_range(0.3..1.5);
        let v = seeded_start(m, d, 600 + case as u64).unwrap();

        let computed = prox_closure_infconv(&problem, gamma, &v, 1e-13, 200_000).unwrap();

        // Oracle: minimize sum_i w_i/2 ||u_i - a_i||^2
        //                + 1/(2 gamma) || u + e(c) - v ||^2
        // u_i = (gamma w_i a_i + v_i - c) / (1 + gamma w_i), and the
        // shift c solves sum_i u_i + m c = sum_i v_i, coordinatewise.
        let mut oracle = BlockVector::zeros(m, d).unwrap();
        for coord in 0..d {
            let mut a_sum = 0.0;
            let mut b_sum = 0.0;
            let mut v_sum = 0.0;
            for i in 0..m {
                let s = 1.0 / (1.0 + gamma * weights[i]);
                a_sum += s * (gamma * weights[i] * anchors[i][coord] + v.block(i)[coord]);
                b_sum += s;
                v_sum += v.block(i)[coord];
            }
            let c = (v_sum - a_sum) / (m as f64 - b_sum);
            for i in 0..m {
                let s = 1.0 / (1.0 + gamma * weights[i]);
                let u = s * (gamma * weights[i] * anchors[i][coord] + v.block(i)[coord] - c);
                oracle.block_mut(i)[coord] = u + c;
            }
        }
        worst_qp = worst_qp.max(computed.sub(&oracle).unwrap().norm());
    }

    // Infimal convolution vs an affine least-squares oracle on
    // all-line problems: parameterize C + D by the line directions
    // plus a diagonal basis and solve the least-squares system by
    // singular value decomposition.
    let mut worst_ls = 0.0f64;
    for case in 0..40 {
        let m = 2 + case % 4;
        let d = 2 + case % 2;
        let mut lines = Vec::new();
        for _ in 0..m {
            let anchor: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let dir = random_direction(&mut rng, d, &[]);
            lines.push((anchor, dir));
        }
        let pieces: Vec<ConvexPiece> = lines
            .iter()
            .map(|(a, b)| ConvexPiece::indicator_line(a.clone(), b.clone()).unwrap())
            .collect();
        let problem = CycleProblem::new(pieces).unwrap();
        let v = seeded_start(m, d, 700 + case as u64).unwrap();
        let computed = prox_closure_infconv(&problem, 0.7, &v, 1e-12, 100_000).unwrap();

        // Generator matrix: one column per line direction (embedded
        // in its own block) plus d diagonal columns.
        let rows = m * d;
        let cols = m + d;
        let mut g = nalgebra::DMatrix::<f64>::zeros(rows, cols);
        let mut rhs = nalgebra::DVector::<f64>::zeros(rows);
        for i in 0..m {
            for r in 0..d {
                g[(i * d + r, i)] = lines[i].1[r];
                rhs[i * d + r] = v.block(i)[r] - lines[i].0[r];
            }
        }
        for k in 0..d {
            for i in 0..m {
                g[(i * d + k, m + k)] = 1.0;
            }
        }
        let t = g
            .clone()
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .expect("least-squares solve");
        let proj = &g * t;
        let mut oracle = BlockVector::zeros(m, d).unwrap();
        for i in 0..m {
            for r in 0..d {
                oracle.block_mut(i)[r] = lines[i].0[r] + proj[i * d + r];
            }
        }
        worst_ls = worst_ls.max(computed.sub(&oracle).unwrap().norm());
    }

    let ok = verdict(
        "6",
        worst_vi <= 1e-8
            && worst_firm <= 1e-10
            && worst_idem <= 1e-10
            && worst_epi <= 1e-10
            && worst_qp <= 1e-8
            && worst_ls <= 1e-8,
        &format!(
            "catalog of 8 kinds x 200 samples: variational slack <= {worst_vi:.2e} (1e-8), \
             firm-nonexpansiveness slack <= {worst_firm:.2e} (1e-10), projection \
             idempotence <= {worst_idem:.2e} (1e-10), epigraph feasibility slack <= \
             {worst_epi:.2e} (1e-10); infimal convolution vs QP oracle <= {worst_qp:.2e} \
             and vs affine least-squares oracle <= {worst_ls:.2e} (both 1e-8)"
        ),
    );
    assert!(ok);
}

// ---------------------------------------------------------------
// 7. Intersecting sets: the gap collapses and cycles are diagonal;
//    fixed-point sets translate by the gap on the parallel toy.
// ---------------------------------------------------------------
#[test]
fn criterion_7_common_argmin_collapse() {
    let intersecting: Vec<CycleProblem> = vec![
        CycleProblem::new(vec![
            ConvexPiece::indicator_line(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap(),
            ConvexPiece::indicator_line(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap(),
        ])
        .unwrap(),
        CycleProblem::new(vec![
            ConvexPiece::indicator_line(vec![1.3, -0.4], vec![1.0, 0.0]).unwrap(),
            ConvexPiece::indicator_line(vec![1.3, -0.4], vec![1.0, 1.0]).unwrap(),
            ConvexPiece::indicator_line(vec![1.3, -0.4], vec![0.0, 1.0]).unwrap(),
        ])
        .unwrap(),
        CycleProblem::new(vec![
            ConvexPiece::indicator_ball(vec![0.0, 0.0], 1.5).unwrap(),
            ConvexPiece::indicator_line(vec![0.2, 0.3], vec![1.0, -0.5]).unwrap(),
            ConvexPiece::indicator_halfspace(vec![0.0, 1.0], 1.0).unwrap(),
        ])
        .unwrap(),
        CycleProblem::new(vec![
            ConvexPiece::indicator_box(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap(),
            ConvexPiece::indicator_ball(vec![0.5, 0.5], 1.0).unwrap(),
            ConvexPiece::indicator_line(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
        ])
        .unwrap(),
    ];

    let config = SolveConfig { outer_tol: 1e-10, ..SolveConfig::default() };
    let mut worst_gap = 0.0f64;
    let mut worst_diag = 0.0f64;
    for (k, problem) in intersecting.iter().enumerate() {
        let x0 = seeded_start(problem.m(), problem.d(), 70 + k as u64).unwrap();
        let gen = generalized_solve(problem, &config, &x0).unwrap();
        assert_eq!(gen.status, SolveStatus::Converged);
        worst_gap = worst_gap.max(gen.y.norm());

        let naive = naive_cycle_iterate(problem, &config, &x0).unwrap();
        assert_eq!(naive.status, SolveStatus::Converged);
        let z = naive.classical_cycle.expect("intersecting sets have diagonal cycles");
        worst_diag = worst_diag.max(z.proj_diagonal_perp().norm());
    }

    // Parallel-line toy, ordered so that y_2 = (0, 1): the first line
    // sits at height 1 and the second at height 0.
    let toy = CycleProblem::new(vec![
        ConvexPiece::indicator_line(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap(),
        ConvexPiece::indicator_line(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap(),
    ])
    .unwrap();
    let x0 = BlockVector::from_blocks(&[vec![0.7, 0.3], vec![-0.4, 0.6]]).unwrap();
    let report = naive_cycle_iterate(&toy, &SolveConfig::default(), &x0).unwrap();
    let z = report.classical_cycle.as_ref().expect("parallel lines have cycles");
    let y2_err = inf_dist(&vec![report.y.block(1).to_vec()], &[0.0, 1.0]);
    let translation =
        check_fixed_point_translation(&toy, z, &report.y, 8, 77, 1e-7).unwrap();

    let ok = verdict(
        "7",
        worst_gap <= 1e-8 && worst_diag <= 1e-7 && y2_err <= 1e-7 && translation.passed,
        &format!(
            "4 intersecting problems: ||y|| <= {worst_gap:.2e} (1e-8), cycle \
             off-diagonal part <= {worst_diag:.2e} (1e-7); parallel toy: \
             |y_2 - (0,1)| = {y2_err:.2e} (1e-7), translation check measured \
             {:.2e} <= {:.1e}: {}",
            translation.measured, translation.tolerance, translation.passed
        ),
    );
    assert!(ok);
}
