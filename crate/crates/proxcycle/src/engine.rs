//! The two iterative solvers.
//!
//! `naive_cycle_iterate` runs the cyclic scheme
//! `x_{n+1} = prox_product(gamma, (1-gamma) x_n + gamma R x_n)`,
//! whose fixed points are exactly the classical cycles; it diverges in
//! norm when no classical cycle exists.
//!
//! `generalized_solve` runs the relaxed forward-backward scheme
//! `x_{n+1} = x_n + lambda_n (prox_{gamma g}((1-gamma) x_n + gamma R x_n) - x_n)`
//! on `g = cl(f_1 x ... x f_m  infconv  indicator(Delta))`, whose gap
//! sequence `R x_n - x_n` converges for every problem in the catalog.
//! The backward step is realized by alternating minimization (see
//! [`prox_closure_infconv`]), or by a direct least-squares projection
//! when every piece is an affine indicator.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::problem::CycleProblem;
use crate::vecops;

/// Relaxation parameters `lambda_n` for the generalized scheme.
#[derive(Clone, Debug, PartialEq)]
pub enum LambdaSchedule {
    /// `lambda_n = value` for every `n`.
    Constant(f64),
    /// `lambda_n = values[min(n, len - 1)]`; the last entry repeats.
    Explicit(Vec<f64>),
}

impl LambdaSchedule {
    fn at(&self, n: usize) -> f64 {
        match self {
            LambdaSchedule::Constant(l) => *l,
            LambdaSchedule::Explicit(v) => v[n.min(v.len() - 1)],
        }
    }

    fn validate(&self, gamma: f64) -> Result<()> {
        let delta = 2.0 - gamma;
        let check = |l: f64| -> Result<()> {
            if !(l > 0.0 && l < delta) {
                return Err(Error::InvalidConfig(format!(
                    "relaxation {l} outside (0, {delta}) = (0, 2 - gamma)"
                )));
            }
            Ok(())
        };
        match self {
            LambdaSchedule::Constant(l) => check(*l),
            LambdaSchedule::Explicit(v) => {
                if v.is_empty() {
                    return Err(Error::InvalidConfig("empty relaxation schedule".into()));
                }
                v.iter().try_for_each(|l| check(*l))
            }
        }
    }
}

/// Solver parameters shared by both schemes.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    /// Step size `gamma` of the forward step, in `(0, 1)`.
    pub gamma: f64,
    /// Relaxations `lambda_n`, each in `(0, 2 - gamma)`.
    pub lambda: LambdaSchedule,
    /// Outer iteration cap.
    pub max_outer_iters: usize,
    /// Fixed-point residual threshold for stopping.
    pub outer_tol: f64,
    /// Step threshold for the inner alternating minimization.
    pub inner_tol: f64,
    /// Pass cap for the inner alternating minimization.
    pub inner_cap: usize,
    /// Norm at which the naive scheme declares divergence (the
    /// signature of an empty classical cycle set).
    pub divergence_threshold: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            gamma: 0.5,
            lambda: LambdaSchedule::Constant(1.0),
            max_outer_iters: 200_000,
            outer_tol: 1e-9,
            inner_tol: 1e-11,
            inner_cap: 10_000,
            divergence_threshold: 1e8,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "gamma = {} outside (0, 1)",
                self.gamma
            )));
        }
        self.lambda.validate(self.gamma)?;
        if self.max_outer_iters == 0 {
            return Err(Error::InvalidConfig("max_outer_iters must be positive".into()));
        }
        if !(self.outer_tol > 0.0) {
            return Err(Error::InvalidConfig("outer_tol must be positive".into()));
        }
        if !(self.inner_tol > 0.0) {
            return Err(Error::InvalidConfig("inner_tol must be positive".into()));
        }
        if self.inner_cap == 0 {
            return Err(Error::InvalidConfig("inner_cap must be positive".into()));
        }
        if !(self.divergence_threshold > 0.0) {
            return Err(Error::InvalidConfig("divergence_threshold must be positive".into()));
        }
        Ok(())
    }
}

/// How a solve ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIters,
    DivergenceDetected,
}

impl SolveStatus {
    pub fn name(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "Converged",
            SolveStatus::MaxIters => "MaxIters",
            SolveStatus::DivergenceDetected => "DivergenceDetected",
        }
    }
}

/// One row of the per-iteration trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    /// `||x_n||` after the update.
    pub norm_x: f64,
    /// Fixed-point residual of the update (absolute for the naive
    /// scheme, relative for the generalized scheme).
    pub residual: f64,
    /// `||(R x_n - x_n) - (R x_{n-1} - x_{n-1})||`.
    pub gap_change: f64,
}

/// Outcome of a solve.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Generalized cycle estimate: the diagonal-orthogonal
    /// representative `P_{Delta-perp} x_n`.
    pub x: BlockVector,
    /// Gap vector estimate `R x_n - x_n`.
    pub y: BlockVector,
    /// Final unprojected iterate when it verifies the classical cycle
    /// equations within `outer_tol`; `None` otherwise.
    pub classical_cycle: Option<BlockVector>,
    pub final_residual: f64,
    pub iterations: usize,
    pub trace: Vec<TraceRecord>,
    /// Total alternating-minimization passes across all outer
    /// iterations (1 per iteration on the least-squares path).
    pub total_inner_passes: usize,
    /// Outer iterations whose inner loop stopped at `inner_cap`
    /// rather than at `inner_tol`; nonzero values flag that the
    /// backward step was inexact.
    pub inner_cap_hits: usize,
    pub warnings: Vec<String>,
}

fn check_start(problem: &CycleProblem, x0: &BlockVector) -> Result<()> {
    if x0.m() != problem.m() || x0.d() != problem.d() {
        return Err(Error::DimensionMismatch(format!(
            "start is {}x{}, problem is {}x{}",
            x0.m(),
            x0.d(),
            problem.m(),
            problem.d()
        )));
    }
    Ok(())
}

/// Deterministic pseudo-random start with coordinates in `[-1, 1)`.
pub fn seeded_start(m: usize, d: usize, seed: u64) -> Result<BlockVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..m * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    BlockVector::new(m, d, data)
}

/// Writes `(1 - gamma) x + gamma R x` into `out`.
fn forward_step(x: &BlockVector, gamma: f64, out: &mut BlockVector) {
    let m = x.m();
    let d = x.d();
    for i in 0..m {
        let prev = x.block(if i == 0 { m - 1 } else { i - 1 });
        let cur = x.block(i);
        let dst = out.block_mut(i);
        for j in 0..d {
            dst[j] = (1.0 - gamma) * cur[j] + gamma * prev[j];
        }
    }
}

/// The naive cyclic scheme. Its fixed points are exactly the
/// classical cycles, for every `gamma` in `(0, 1)`; when the cycle
/// set is empty the iterates escape to infinity and the solver
/// reports `DivergenceDetected` once `||x_n||` exceeds the threshold.
pub fn naive_cycle_iterate(
    problem: &CycleProblem,
    config: &SolveConfig,
    x0: &BlockVector,
) -> Result<SolveReport> {
    config.validate()?;
    check_start(problem, x0)?;

    let mut x = x0.clone();
    let mut v = x0.clone();
    let mut next = x0.clone();
    let mut gap_prev = x.cyclic_gap();
    let mut trace = Vec::new();
    let mut status = SolveStatus::MaxIters;
    let mut final_residual = f64::INFINITY;

    for n in 1..=config.max_outer_iters {
        forward_step(&x, config.gamma, &mut v);
        problem.prox_product_into(config.gamma, &v, &mut next)?;
        let residual = vecops::dist(next.as_slice(), x.as_slice());
        let gap = next.cyclic_gap();
        let gap_change = vecops::dist(gap.as_slice(), gap_prev.as_slice());
        trace.push(TraceRecord { iter: n, norm_x: next.norm(), residual, gap_change });
        std::mem::swap(&mut x, &mut next);
        gap_prev = gap;
        final_residual = residual;
        if x.norm() > config.divergence_threshold {
            status = SolveStatus::DivergenceDetected;
            break;
        }
        if residual <= config.outer_tol {
            status = SolveStatus::Converged;
            break;
        }
    }

    let mut warnings = Vec::new();
    let classical_cycle = if status == SolveStatus::Converged {
        Some(x.clone())
    } else {
        warnings.push(format!(
            "no classical cycle certified (status {}); x and y are the last \
             estimates, whose limiting behavior this scheme does not determine",
            status.name()
        ));
        None
    };
    Ok(SolveReport {
        status,
        x: x.proj_diagonal_perp(),
        y: x.cyclic_gap(),
        classical_cycle,
        final_residual,
        iterations: trace.len(),
        trace,
        total_inner_passes: 0,
        inner_cap_hits: 0,
        warnings,
    })
}

/// Direct least-squares projector onto `C + Delta` for problems whose
/// pieces are all affine indicators (`C` is then itself affine, so
/// `C + Delta` is closed and the infimal convolution is exact).
pub(crate) struct AffineProjector {
    base: Vec<f64>,
    /// Orthonormal basis of the direction space, one column each.
    q: DMatrix<f64>,
}

impl AffineProjector {
    pub(crate) fn new(problem: &CycleProblem) -> Result<Self> {
        let m = problem.m();
        let d = problem.d();
        let md = m * d;
        let mut base = vec![0.0; md];
        let mut cols: Vec<Vec<f64>> = Vec::new();
        for i in 0..m {
            let (anchor, basis) = problem.piece(i).affine_geometry().ok_or_else(|| {
                Error::InvalidProblem(format!(
                    "piece {i} (`{}`) is not an affine indicator",
                    problem.piece(i).kind().name()
                ))
            })?;
            base[i * d..(i + 1) * d].copy_from_slice(anchor);
            for b in basis {
                let mut col = vec![0.0; md];
                col[i * d..(i + 1) * d].copy_from_slice(&b);
                cols.push(col);
            }
        }
        for j in 0..d {
            let mut col = vec![0.0; md];
            for i in 0..m {
                col[i * d + j] = 1.0;
            }
            cols.push(col);
        }
        let a = DMatrix::from_fn(md, cols.len(), |r, c| cols[c][r]);
        let svd = a.svd(true, false);
        let u = svd.u.expect("left singular vectors requested");
        let sigma_max = svd.singular_values.max();
        let cutoff = 1e-12 * sigma_max.max(1.0);
        let rank = svd.singular_values.iter().filter(|s| **s > cutoff).count();
        Ok(Self { base, q: u.columns(0, rank).into_owned() })
    }

    pub(crate) fn project_into(&self, v: &BlockVector, out: &mut BlockVector) {
        let shifted = DVector::from_iterator(
            self.base.len(),
            v.as_slice().iter().zip(&self.base).map(|(a, b)| a - b),
        );
        let coeffs = self.q.transpose() * &shifted;
        let proj = &self.q * coeffs;
        for (o, (p, b)) in out.as_mut_slice().iter_mut().zip(proj.iter().zip(&self.base)) {
            *o = p + b;
        }
    }
}

/// Reusable state for the alternating minimization that evaluates the
/// prox of `gamma * cl(f infconv indicator(Delta))`. Keeping the
/// diagonal shift `d` across calls warm-starts consecutive proxes at
/// nearby inputs.
pub(crate) struct InfconvState {
    diag: Vec<f64>,
    shifted: BlockVector,
    u: BlockVector,
    w_prev: BlockVector,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct InfconvOutcome {
    pub passes: usize,
    pub converged: bool,
}

impl InfconvState {
    pub(crate) fn new(m: usize, d: usize) -> Result<Self> {
        Ok(Self {
            diag: vec![0.0; d],
            shifted: BlockVector::zeros(m, d)?,
            u: BlockVector::zeros(m, d)?,
            w_prev: BlockVector::zeros(m, d)?,
        })
    }

    /// One run of the alternating scheme
    /// `u <- prox_product(gamma, v - expand(diag)); diag <- blockmean(v - u)`,
    /// tracking `w = u + expand(diag)` until the step drops to `tol`
    /// or `cap` passes elapse. The final `w` lands in `out` either way.
    pub(crate) fn run(
        &mut self,
        problem: &CycleProblem,
        gamma: f64,
        v: &BlockVector,
        tol: f64,
        cap: usize,
        out: &mut BlockVector,
    ) -> Result<InfconvOutcome> {
        let m = problem.m();
        let d = problem.d();
        for pass in 1..=cap {
            for i in 0..m {
                let src = v.block(i);
                let dst = self.shifted.block_mut(i);
                for j in 0..d {
                    dst[j] = src[j] - self.diag[j];
                }
            }
            problem.prox_product_into(gamma, &self.shifted, &mut self.u)?;
            self.diag.fill(0.0);
            for i in 0..m {
                let vb = v.block(i);
                let ub = self.u.block(i);
                for j in 0..d {
                    self.diag[j] += vb[j] - ub[j];
                }
            }
            let inv_m = 1.0 / m as f64;
            self.diag.iter_mut().for_each(|c| *c *= inv_m);
            for i in 0..m {
                let ub = self.u.block(i);
                let dst = out.block_mut(i);
                for j in 0..d {
                    dst[j] = ub[j] + self.diag[j];
                }
            }
            let step = vecops::dist(out.as_slice(), self.w_prev.as_slice());
            self.w_prev.as_mut_slice().copy_from_slice(out.as_slice());
            if pass > 1 && step <= tol {
                return Ok(InfconvOutcome { passes: pass, converged: true });
            }
        }
        Ok(InfconvOutcome { passes: cap, converged: false })
    }
}

/// Prox of `gamma * cl(f_1 x ... x f_m  infconv  indicator(Delta))`
/// at `v`, cold-started. All-affine problems take the exact
/// least-squares path; everything else runs the alternating scheme to
/// `inner_tol` or at most `inner_cap` passes and returns the last
/// iterate either way (callers that must know whether the cap was hit
/// run a solve and read `inner_cap_hits` from the report).
pub fn prox_closure_infconv(
    problem: &CycleProblem,
    gamma: f64,
    v: &BlockVector,
    inner_tol: f64,
    inner_cap: usize,
) -> Result<BlockVector> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidConfig(format!("gamma = {gamma} must be positive")));
    }
    check_start(problem, v)?;
    let mut out = BlockVector::zeros(problem.m(), problem.d())?;
    if problem.all_affine_indicators() {
        AffineProjector::new(problem)?.project_into(v, &mut out);
        return Ok(out);
    }
    if inner_cap == 0 {
        return Err(Error::InvalidConfig("inner_cap must be positive".into()));
    }
    let mut state = InfconvState::new(problem.m(), problem.d())?;
    state.run(problem, gamma, v, inner_tol, inner_cap, &mut out)?;
    Ok(out)
}

/// The relaxed forward-backward scheme on the closed infimal
/// convolution. The reported `x` is the diagonal-orthogonal
/// representative of the final iterate and `y` its cyclic gap; the
/// unprojected iterate is additionally reported as a classical cycle
/// when it verifies the cycle equations within `outer_tol`.
pub fn generalized_solve(
    problem: &CycleProblem,
    config: &SolveConfig,
    x0: &BlockVector,
) -> Result<SolveReport> {
    config.validate()?;
    check_start(problem, x0)?;

    let bypass = if problem.all_affine_indicators() {
        Some(AffineProjector::new(problem)?)
    } else {
        None
    };
    let mut state = InfconvState::new(problem.m(), problem.d())?;

    let mut x = x0.clone();
    let mut v = x0.clone();
    let mut w = x0.clone();
    let mut gap_prev = x.cyclic_gap();
    let mut trace = Vec::new();
    let mut status = SolveStatus::MaxIters;
    let mut final_residual = f64::INFINITY;
    let mut total_inner_passes = 0usize;
    let mut inner_cap_hits = 0usize;
    // Vanishing-error policy: the admissible inner error shrinks with
    // the outer residual, so the inexact backward steps stay summable.
    let mut eff_inner_tol = config.inner_tol;

    for n in 1..=config.max_outer_iters {
        forward_step(&x, config.gamma, &mut v);
        match &bypass {
            Some(projector) => {
                projector.project_into(&v, &mut w);
                total_inner_passes += 1;
            }
            None => {
                let outcome =
                    state.run(problem, config.gamma, &v, eff_inner_tol, config.inner_cap, &mut w)?;
                total_inner_passes += outcome.passes;
                if !outcome.converged {
                    inner_cap_hits += 1;
                }
            }
        }
        let lambda = config.lambda.at(n - 1);
        let norm_before = x.norm();
        let mut step_sq = 0.0;
        {
            let xs = x.as_mut_slice();
            let ws = w.as_slice();
            for (xi, wi) in xs.iter_mut().zip(ws) {
                let delta = lambda * (wi - *xi);
                step_sq += delta * delta;
                *xi += delta;
            }
        }
        let residual = step_sq.sqrt() / norm_before.max(1.0);
        let gap = x.cyclic_gap();
        let gap_change = vecops::dist(gap.as_slice(), gap_prev.as_slice());
        trace.push(TraceRecord { iter: n, norm_x: x.norm(), residual, gap_change });
        gap_prev = gap;
        final_residual = residual;
        if residual <= config.outer_tol && gap_change <= config.outer_tol {
            status = SolveStatus::Converged;
            break;
        }
        eff_inner_tol = eff_inner_tol.min((residual / 10.0).max(f64::MIN_POSITIVE));
    }

    let mut warnings = Vec::new();
    if inner_cap_hits > 0 {
        warnings.push(format!(
            "inner alternating minimization hit its pass cap on {inner_cap_hits} of \
             {} outer iterations; the backward step was inexact there",
            trace.len()
        ));
    }
    if status != SolveStatus::Converged {
        warnings.push(format!(
            "stopped with status {}; reported x and y are the last estimates",
            status.name()
        ));
    }
    // Reported cycles must verify within 10 * outer_tol; the factor
    // absorbs the gap between the stopping rule (step size) and the
    // distance to the limit.
    let classical_cycle = if problem.cycle_residual(&x)? <= 10.0 * config.outer_tol {
        Some(x.clone())
    } else {
        None
    };
    Ok(SolveReport {
        status,
        x: x.proj_diagonal_perp(),
        y: x.cyclic_gap(),
        classical_cycle,
        final_residual,
        iterations: trace.len(),
        trace,
        total_inner_passes,
        inner_cap_hits,
        warnings,
    })
}

/// The dual-to-primal identity: the generalized cycle is recovered
/// from the gap vector as `x = -y/2 - T y`, with `T` the skew
/// operator of [`BlockVector::skew_t`].
pub fn gap_vector_from_dual_identity(y: &BlockVector) -> BlockVector {
    let t = y.skew_t();
    y.scale(-0.5).sub(&t).expect("same shape")
}
