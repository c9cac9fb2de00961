//! Problem files, reports, traces, and the run dispatcher.
//!
//! Problem files are strict JSON under the schema key
//! `proxcycle-problem/1`: unknown keys are errors, box bounds use the
//! sentinels `"inf"` / `"-inf"`, and every piece lists exactly the
//! fields its kind needs. Reports are deterministic JSON under
//! `proxcycle-report/1` (identical problem + seed give byte-identical
//! output), with the tolerance printed next to every measured value.
//! Traces are CSV with the fixed header `iter,norm_x,residual,gap_change`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::block::BlockVector;
use crate::engine::{
    self, LambdaSchedule, SolveConfig, SolveReport, SolveStatus, TraceRecord,
};
use crate::error::{Error, Result};
use crate::lines::{self, LineClassification, LineFamily};
use crate::piece::ConvexPiece;
use crate::problem::CycleProblem;
use crate::vecops;
use crate::verify::{self, VerificationCheck, VerificationReport};

pub const PROBLEM_SCHEMA: &str = "proxcycle-problem/1";
pub const REPORT_SCHEMA: &str = "proxcycle-report/1";
pub const TRACE_HEADER: &str = "iter,norm_x,residual,gap_change";

/// Which solver(s) a run invokes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Naive,
    Generalized,
    AnalyticLines,
    VerifyAll,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Naive => "naive",
            Mode::Generalized => "generalized",
            Mode::AnalyticLines => "analytic_lines",
            Mode::VerifyAll => "verify_all",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Mode::Naive),
            "generalized" => Ok(Mode::Generalized),
            "analytic_lines" => Ok(Mode::AnalyticLines),
            "verify_all" => Ok(Mode::VerifyAll),
            other => Err(Error::InvalidConfig(format!(
                "unknown mode `{other}` (expected naive, generalized, analytic_lines, verify_all)"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A box bound: a finite number, or the sentinels `"inf"` / `"-inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Number(f64),
    Symbol(String),
}

impl Bound {
    fn to_f64(&self) -> Result<f64> {
        match self {
            Bound::Number(x) if x.is_finite() => Ok(*x),
            Bound::Number(x) => {
                Err(Error::InvalidProblem(format!("non-finite numeric bound {x}")))
            }
            Bound::Symbol(s) if s == "inf" => Ok(f64::INFINITY),
            Bound::Symbol(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
            Bound::Symbol(s) => Err(Error::InvalidProblem(format!(
                "unknown bound sentinel `{s}` (use \"inf\" or \"-inf\")"
            ))),
        }
    }

    fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            Bound::Symbol("inf".into())
        } else if x == f64::NEG_INFINITY {
            Bound::Symbol("-inf".into())
        } else {
            Bound::Number(x)
        }
    }
}

/// Optional overrides of the structural metadata flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coercive: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounded_domain: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polyhedral: Option<bool>,
}

/// One piece as written in a problem file. The `kind` string selects
/// which of the optional parameter fields must be present; providing
/// a field the kind does not use is an error.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normal: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<Bound>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<Bound>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flags: Option<FlagOverrides>,
}

impl PieceSpec {
    fn provided(&self) -> Vec<&'static str> {
        let mut fields = Vec::new();
        if self.anchor.is_some() {
            fields.push("anchor");
        }
        if self.direction.is_some() {
            fields.push("direction");
        }
        if self.directions.is_some() {
            fields.push("directions");
        }
        if self.normal.is_some() {
            fields.push("normal");
        }
        if self.offset.is_some() {
            fields.push("offset");
        }
        if self.center.is_some() {
            fields.push("center");
        }
        if self.radius.is_some() {
            fields.push("radius");
        }
        if self.lower.is_some() {
            fields.push("lower");
        }
        if self.upper.is_some() {
            fields.push("upper");
        }
        if self.alpha.is_some() {
            fields.push("alpha");
        }
        if self.weight.is_some() {
            fields.push("weight");
        }
        if self.slope.is_some() {
            fields.push("slope");
        }
        fields
    }

    fn check_fields(&self, allowed: &[&str]) -> Result<()> {
        for field in self.provided() {
            if !allowed.contains(&field) {
                return Err(Error::InvalidProblem(format!(
                    "field `{field}` is not valid for kind `{}`",
                    self.kind
                )));
            }
        }
        for field in allowed {
            if !self.provided().contains(field) {
                return Err(Error::InvalidProblem(format!(
                    "kind `{}` requires field `{field}`",
                    self.kind
                )));
            }
        }
        Ok(())
    }

    fn require<T: Clone>(&self, field: &Option<T>, name: &str) -> Result<T> {
        field.clone().ok_or_else(|| {
            Error::InvalidProblem(format!("kind `{}` requires field `{name}`", self.kind))
        })
    }

    /// Builds the validated piece this spec describes.
    pub fn to_piece(&self) -> Result<ConvexPiece> {
        let piece = match self.kind.as_str() {
            "indicator_affine_subspace" => {
                self.check_fields(&["anchor", "directions"])?;
                ConvexPiece::indicator_affine_subspace(
                    self.require(&self.anchor, "anchor")?,
                    self.require(&self.directions, "directions")?,
                )?
            }
            "indicator_line" => {
                self.check_fields(&["anchor", "direction"])?;
                ConvexPiece::indicator_line(
                    self.require(&self.anchor, "anchor")?,
                    self.require(&self.direction, "direction")?,
                )?
            }
            "indicator_halfspace" => {
                self.check_fields(&["normal", "offset"])?;
                ConvexPiece::indicator_halfspace(
                    self.require(&self.normal, "normal")?,
                    self.require(&self.offset, "offset")?,
                )?
            }
            "indicator_ball" => {
                self.check_fields(&["center", "radius"])?;
                ConvexPiece::indicator_ball(
                    self.require(&self.center, "center")?,
                    self.require(&self.radius, "radius")?,
                )?
            }
            "indicator_box" => {
                self.check_fields(&["lower", "upper"])?;
                let lower = self
                    .require(&self.lower, "lower")?
                    .iter()
                    .map(Bound::to_f64)
                    .collect::<Result<Vec<_>>>()?;
                let upper = self
                    .require(&self.upper, "upper")?
                    .iter()
                    .map(Bound::to_f64)
                    .collect::<Result<Vec<_>>>()?;
                ConvexPiece::indicator_box(lower, upper)?
            }
            "indicator_epi_exp_shift" => {
                self.check_fields(&["alpha"])?;
                ConvexPiece::indicator_epi_exp_shift(self.require(&self.alpha, "alpha")?)?
            }
            "quadratic" => {
                self.check_fields(&["anchor", "weight"])?;
                ConvexPiece::quadratic(
                    self.require(&self.anchor, "anchor")?,
                    self.require(&self.weight, "weight")?,
                )?
            }
            "linear" => {
                self.check_fields(&["slope"])?;
                ConvexPiece::linear(self.require(&self.slope, "slope")?)?
            }
            other => {
                return Err(Error::InvalidProblem(format!("unknown piece kind `{other}`")));
            }
        };
        Ok(match &self.flags {
            Some(f) => piece.with_flag_overrides(f.coercive, f.bounded_domain, f.polyhedral),
            None => piece,
        })
    }

    /// The canonical spec of an existing piece (no flag overrides).
    pub fn from_piece(piece: &ConvexPiece) -> Self {
        use crate::piece::PieceKind as K;
        let mut spec = PieceSpec { kind: piece.kind().name().into(), ..Default::default() };
        match piece.kind() {
            K::IndicatorAffineSubspace { anchor, directions } => {
                spec.anchor = Some(anchor.clone());
                spec.directions = Some(directions.clone());
            }
            K::IndicatorLine { anchor, direction } => {
                spec.anchor = Some(anchor.clone());
                spec.direction = Some(direction.clone());
            }
            K::IndicatorHalfspace { normal, offset } => {
                spec.normal = Some(normal.clone());
                spec.offset = Some(*offset);
            }
            K::IndicatorBall { center, radius } => {
                spec.center = Some(center.clone());
                spec.radius = Some(*radius);
            }
            K::IndicatorBox { lower, upper } => {
                spec.lower = Some(lower.iter().map(|x| Bound::from_f64(*x)).collect());
                spec.upper = Some(upper.iter().map(|x| Bound::from_f64(*x)).collect());
            }
            K::IndicatorEpiExpShift { alpha } => {
                spec.alpha = Some(*alpha);
            }
            K::Quadratic { anchor, weight } => {
                spec.anchor = Some(anchor.clone());
                spec.weight = Some(*weight);
            }
            K::Linear { slope } => {
                spec.slope = Some(slope.clone());
            }
        }
        spec
    }
}

/// Relaxation schedule as written in a file: one number or a list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Constant(f64),
    Explicit(Vec<f64>),
}

impl LambdaSpec {
    fn to_schedule(&self) -> LambdaSchedule {
        match self {
            LambdaSpec::Constant(l) => LambdaSchedule::Constant(*l),
            LambdaSpec::Explicit(v) => LambdaSchedule::Explicit(v.clone()),
        }
    }
}

/// Solver settings as written in a file; omitted fields take the
/// library defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_outer_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence_threshold: Option<f64>,
}

/// A parsed problem file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub ambient_dim: usize,
    pub pieces: Vec<PieceSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Explicit start, one block per piece; defaults to a seeded
    /// pseudo-random start.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<Vec<f64>>>,
    /// Default trace output path, overridable on the command line.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
    /// Default report output path, overridable on the command line.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
}

impl ProblemFile {
    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or(Mode::Generalized)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Builds and validates the in-memory problem.
    pub fn to_problem(&self) -> Result<CycleProblem> {
        if self.schema != PROBLEM_SCHEMA {
            return Err(Error::InvalidProblem(format!(
                "schema `{}` is not `{PROBLEM_SCHEMA}`",
                self.schema
            )));
        }
        let pieces =
            self.pieces.iter().map(PieceSpec::to_piece).collect::<Result<Vec<_>>>()?;
        let problem = CycleProblem::new(pieces)?;
        if problem.d() != self.ambient_dim {
            return Err(Error::InvalidProblem(format!(
                "pieces live in dimension {}, ambient_dim says {}",
                problem.d(),
                self.ambient_dim
            )));
        }
        Ok(problem)
    }

    /// The solver configuration with file overrides applied.
    pub fn solve_config(&self) -> Result<SolveConfig> {
        let mut config = SolveConfig::default();
        if let Some(s) = &self.solver {
            if let Some(g) = s.gamma {
                config.gamma = g;
            }
            if let Some(l) = &s.lambda {
                config.lambda = l.to_schedule();
            }
            if let Some(n) = s.max_outer_iters {
                config.max_outer_iters = n;
            }
            if let Some(t) = s.outer_tol {
                config.outer_tol = t;
            }
            if let Some(t) = s.inner_tol {
                config.inner_tol = t;
            }
            if let Some(c) = s.inner_cap {
                config.inner_cap = c;
            }
            if let Some(t) = s.divergence_threshold {
                config.divergence_threshold = t;
            }
        }
        config.validate()?;
        Ok(config)
    }

    /// The start iterate: the explicit `x0` if present, otherwise a
    /// seeded pseudo-random block vector.
    pub fn start(&self, problem: &CycleProblem) -> Result<BlockVector> {
        match &self.x0 {
            Some(blocks) => {
                let x0 = BlockVector::from_blocks(blocks)?;
                if x0.m() != problem.m() || x0.d() != problem.d() {
                    return Err(Error::InvalidProblem(format!(
                        "x0 is {}x{}, problem is {}x{}",
                        x0.m(),
                        x0.d(),
                        problem.m(),
                        problem.d()
                    )));
                }
                Ok(x0)
            }
            None => engine::seeded_start(problem.m(), problem.d(), self.seed()),
        }
    }

    /// The same pieces as a line family (errors unless every piece is
    /// a line indicator).
    pub fn to_line_family(&self) -> Result<LineFamily> {
        let mut entries = Vec::with_capacity(self.pieces.len());
        for (i, spec) in self.pieces.iter().enumerate() {
            if spec.kind != "indicator_line" {
                return Err(Error::InvalidProblem(format!(
                    "analytic_lines mode needs indicator_line pieces; piece {i} is `{}`",
                    spec.kind
                )));
            }
            entries.push((
                spec.require(&spec.anchor, "anchor")?,
                spec.require(&spec.direction, "direction")?,
            ));
        }
        LineFamily::new(entries)
    }
}

/// Parses a problem file from disk with strict validation.
pub fn parse_problem(path: impl AsRef<Path>) -> Result<ProblemFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_problem_str(&text, &path.display().to_string())
}

/// Parses a problem file from a string; `origin` labels errors.
pub fn parse_problem_str(text: &str, origin: &str) -> Result<ProblemFile> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_string(),
        detail: e.to_string(),
    })?;
    // Surface schema/piece problems at parse time, not first use.
    file.to_problem()?;
    Ok(file)
}

/// Canonical serialization of a problem file (pretty JSON, trailing
/// newline).
pub fn emit_problem(file: &ProblemFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("problem files serialize");
    s.push('\n');
    s
}

/// A measured quantity paired with the bound it was compared against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasuredValue {
    pub value: f64,
    pub tolerance: f64,
}

/// One verification entry in a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub identity: String,
    pub skipped: bool,
}

impl From<&VerificationCheck> for CheckEntry {
    fn from(c: &VerificationCheck) -> Self {
        CheckEntry {
            name: c.name.clone(),
            passed: c.passed,
            measured: c.measured,
            tolerance: c.tolerance,
            identity: c.identity.clone(),
            skipped: c.skipped,
        }
    }
}

/// The analytic-lines section of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSection {
    pub determinant: f64,
    pub determinant_closed_form: f64,
    pub classification: String,
    pub t: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nullspace: Option<Vec<Vec<f64>>>,
    pub cycle_points: Vec<Vec<f64>>,
    pub gap_vector: Vec<Vec<f64>>,
}

/// Assumption / existence diagnostics echoed into reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticEntry {
    pub holds: bool,
    pub reason: String,
}

/// The report a run writes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem_name: Option<String>,
    pub mode: String,
    pub seed: u64,
    pub status: String,
    pub iterations: usize,
    pub final_residual: MeasuredValue,
    /// Generalized cycle estimate, one block per piece.
    pub x: Vec<Vec<f64>>,
    /// Gap vector estimate, one block per piece.
    pub y: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical_cycle: Option<Vec<Vec<f64>>>,
    pub total_inner_passes: usize,
    pub inner_cap_hits: usize,
    pub blanket_assumption: DiagnosticEntry,
    pub classical_existence: DiagnosticEntry,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic: Option<AnalyticSection>,
    pub verification: Vec<CheckEntry>,
    pub warnings: Vec<String>,
}

/// Command-line overrides applied on top of a problem file.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub mode: Option<Mode>,
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub trace_path: Option<String>,
    pub report_path: Option<String>,
}

/// Outcome of a run: the report, where files were written, and the
/// process exit code (0 converged and verified, 1 otherwise).
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: ReportFile,
    pub exit_code: i32,
    pub summary: String,
}

fn apply_overrides(file: &ProblemFile, opts: &RunOptions) -> ProblemFile {
    let mut file = file.clone();
    let solver = file.solver.get_or_insert_with(SolverSpec::default);
    if let Some(g) = opts.gamma {
        solver.gamma = Some(g);
    }
    if let Some(l) = opts.lambda {
        solver.lambda = Some(LambdaSpec::Constant(l));
    }
    if let Some(n) = opts.max_iters {
        solver.max_outer_iters = Some(n);
    }
    if let Some(t) = opts.tol {
        solver.outer_tol = Some(t);
    }
    if let Some(s) = opts.seed {
        file.seed = Some(s);
    }
    if let Some(m) = opts.mode {
        file.mode = Some(m);
    }
    if let Some(p) = &opts.trace_path {
        file.trace = Some(p.clone());
    }
    if let Some(p) = &opts.report_path {
        file.report = Some(p.clone());
    }
    file
}

fn blocks_of(v: &BlockVector) -> Vec<Vec<f64>> {
    v.to_blocks()
}

/// Formats one trace row; floats use the shortest round-trip form.
fn trace_row(r: &TraceRecord) -> String {
    format!("{},{},{},{}", r.iter, r.norm_x, r.residual, r.gap_change)
}

/// Serializes a trace as CSV with the fixed header.
pub fn trace_to_csv(trace: &[TraceRecord]) -> String {
    let mut out = String::with_capacity(32 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in trace {
        out.push_str(&trace_row(r));
        out.push('\n');
    }
    out
}

/// Canonical serialization of a report (pretty JSON, trailing
/// newline). Deterministic: field order is fixed and floats use the
/// shortest round-trip form.
pub fn emit_report(report: &ReportFile) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

fn cross_check(name: &str, identity: &str, measured: f64, tolerance: f64) -> CheckEntry {
    CheckEntry {
        name: name.into(),
        passed: measured <= tolerance,
        measured,
        tolerance,
        identity: identity.into(),
        skipped: false,
    }
}

/// Runs the requested mode and assembles the report. Files named by
/// the problem file or the options are written by [`run_to_files`];
/// this function performs no IO.
pub fn run(file: &ProblemFile, opts: &RunOptions) -> Result<RunOutcome> {
    let file = apply_overrides(file, opts);
    let problem = file.to_problem()?;
    let config = file.solve_config()?;
    let x0 = file.start(&problem)?;
    let mode = file.mode();
    let seed = file.seed();

    let blanket = problem.check_blanket_assumption();
    let existence = problem.existence_diagnostic();

    let mut analytic: Option<AnalyticSection> = None;
    let mut checks = VerificationReport::default();
    let mut extra_entries: Vec<CheckEntry> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();

    let solve: SolveReport = match mode {
        Mode::Naive => {
            let report = engine::naive_cycle_iterate(&problem, &config, &x0)?;
            checks = verify::standard_suite(&problem, &report, config.outer_tol, 5, seed)?;
            report
        }
        Mode::Generalized => {
            let report = engine::generalized_solve(&problem, &config, &x0)?;
            checks = verify::standard_suite(&problem, &report, config.outer_tol, 5, seed)?;
            report
        }
        Mode::AnalyticLines => {
            let family = file.to_line_family()?;
            let solution = lines::solve_line_cycles(&family)?;
            let det_formula = lines::determinant_formula(&family);
            let det_scale = solution.matrix.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1.0);
            extra_entries.push(cross_check(
                "determinant_formula_agreement",
                "|det(A) - closed_form| <= 1e-10 * scale",
                (solution.determinant - det_formula).abs(),
                1e-10 * det_scale,
            ));
            let u = &solution.cycle_points;
            let mut stationarity = 0.0f64;
            for i in 0..family.m() {
                let prev = u.block(if i == 0 { family.m() - 1 } else { i - 1 });
                let diff: Vec<f64> =
                    u.block(i).iter().zip(prev).map(|(c, p)| c - p).collect();
                stationarity = stationarity.max(vecops::dot(&diff, family.direction(i)).abs());
            }
            extra_entries.push(cross_check(
                "stationarity",
                "max_i |<b_i, u_i - u_{i-1}>|",
                stationarity,
                1e-9,
            ));
            // Cross-check the gap against the iterative solver.
            let iterative = engine::generalized_solve(&problem, &config, &x0)?;
            extra_entries.push(cross_check(
                "analytic_vs_iterative_gap",
                "||y_analytic - y_iterative||",
                vecops::dist(solution.gap_vector.as_slice(), iterative.y.as_slice()),
                1e-6,
            ));
            let (classification, t, nullspace) = match &solution.classification {
                LineClassification::Unique { t } => ("unique".to_string(), t.clone(), None),
                LineClassification::InfiniteFamily { t_particular, nullspace } => (
                    "infinite_family".to_string(),
                    t_particular.clone(),
                    Some(nullspace.clone()),
                ),
            };
            analytic = Some(AnalyticSection {
                determinant: solution.determinant,
                determinant_closed_form: det_formula,
                classification,
                t,
                nullspace,
                cycle_points: blocks_of(&solution.cycle_points),
                gap_vector: blocks_of(&solution.gap_vector),
            });
            checks.extend(verify::check_gap_identities(
                &solution.cycle_points.proj_diagonal_perp(),
                &solution.gap_vector,
                10.0 * config.outer_tol,
                100.0 * config.outer_tol,
            )?);
            checks.push(verify::check_cycle(&problem, &solution.cycle_points, 1e-9)?);
            SolveReport {
                status: SolveStatus::Converged,
                x: solution.cycle_points.proj_diagonal_perp(),
                y: solution.gap_vector.clone(),
                classical_cycle: Some(solution.cycle_points.clone()),
                final_residual: stationarity,
                iterations: 0,
                trace: iterative.trace.clone(),
                total_inner_passes: iterative.total_inner_passes,
                inner_cap_hits: iterative.inner_cap_hits,
                warnings: Vec::new(),
            }
        }
        Mode::VerifyAll => {
            let generalized = engine::generalized_solve(&problem, &config, &x0)?;
            checks = verify::standard_suite(&problem, &generalized, config.outer_tol, 5, seed)?;
            let naive = engine::naive_cycle_iterate(&problem, &config, &x0)?;
            if naive.status == SolveStatus::Converged {
                extra_entries.push(cross_check(
                    "naive_vs_generalized_gap",
                    "||y_naive - y_generalized||",
                    vecops::dist(naive.y.as_slice(), generalized.y.as_slice()),
                    1e-6,
                ));
            } else {
                warnings.push(format!(
                    "naive scheme did not converge (status {}); its gap estimate was \
                     not used for cross-checking",
                    naive.status.name()
                ));
            }
            if problem.all_affine_indicators()
                && self::all_line_specs(&file)
                && file.pieces.len() >= 2
            {
                let family = file.to_line_family()?;
                let solution = lines::solve_line_cycles(&family)?;
                extra_entries.push(cross_check(
                    "analytic_vs_generalized_gap",
                    "||y_analytic - y_generalized||",
                    vecops::dist(solution.gap_vector.as_slice(), generalized.y.as_slice()),
                    1e-6,
                ));
            }
            generalized
        }
    };

    warnings.extend(solve.warnings.iter().cloned());

    let mut verification: Vec<CheckEntry> = checks.checks.iter().map(CheckEntry::from).collect();
    verification.extend(extra_entries);

    let all_passed = verification.iter().all(|c| c.passed || c.skipped);
    let converged = solve.status == SolveStatus::Converged;
    let exit_code = i32::from(!(converged && all_passed));

    let report = ReportFile {
        schema: REPORT_SCHEMA.into(),
        problem_name: file.name.clone(),
        mode: mode.name().into(),
        seed,
        status: solve.status.name().into(),
        iterations: solve.iterations,
        final_residual: MeasuredValue { value: solve.final_residual, tolerance: config.outer_tol },
        x: blocks_of(&solve.x),
        y: blocks_of(&solve.y),
        classical_cycle: solve.classical_cycle.as_ref().map(blocks_of),
        total_inner_passes: solve.total_inner_passes,
        inner_cap_hits: solve.inner_cap_hits,
        blanket_assumption: DiagnosticEntry { holds: blanket.holds, reason: blanket.reason },
        classical_existence: DiagnosticEntry {
            holds: existence.classical_cycle_guaranteed,
            reason: existence.reason,
        },
        analytic,
        verification,
        warnings,
    };

    let passed_count = report.verification.iter().filter(|c| c.passed).count();
    let summary = format!(
        "{}: status {}, {} iterations, residual {:.3e}, ||y|| {:.6}, checks {}/{} passed",
        mode.name(),
        report.status,
        report.iterations,
        report.final_residual.value,
        solve.y.norm(),
        passed_count,
        report.verification.len(),
    );

    let outcome = RunOutcome { report, exit_code, summary };
    write_outputs(&file, &solve, &outcome)?;
    Ok(outcome)
}

fn all_line_specs(file: &ProblemFile) -> bool {
    file.pieces.iter().all(|p| p.kind == "indicator_line")
}

fn write_outputs(file: &ProblemFile, solve: &SolveReport, outcome: &RunOutcome) -> Result<()> {
    if let Some(path) = &file.trace {
        std::fs::write(path, trace_to_csv(&solve.trace))?;
    }
    if let Some(path) = &file.report {
        std::fs::write(path, emit_report(&outcome.report))?;
    }
    Ok(())
}
