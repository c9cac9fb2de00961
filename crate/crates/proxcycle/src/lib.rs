//! Cycles and gap vectors of cyclic compositions of proximal
//! mappings.
//!
//! Given convex functions `f_1, ..., f_m` on `R^d`, a *classical
//! cycle* is a tuple `(z_1, ..., z_m)` with each `z_i` the prox of
//! `f_i` at the previous point, cyclically; its *gap vector* is the
//! tuple of inter-point displacements `Rz - z` (with `R` the circular
//! right shift on the product space). Classical cycles need not exist
//! — the catalog contains a two-set example whose alternating
//! projections escape to infinity — but the *generalized* cycle and
//! gap vector, defined through the closed infimal convolution of the
//! product function with the diagonal indicator, always do, and they
//! coincide with the classical objects whenever those exist.
//!
//! The crate provides:
//!
//! - [`piece`]: a catalog of convex pieces with exact proximal
//!   mappings (affine sets, lines, halfspaces, balls, boxes, a shifted
//!   exponential epigraph, quadratics, linear functions);
//! - [`problem`]: ordered families of pieces with blockwise proxes and
//!   symbolic existence diagnostics;
//! - [`engine`]: the naive cyclic scheme (fixed points = classical
//!   cycles, divergence = nonexistence) and the relaxed
//!   forward-backward scheme on the infimal convolution (always
//!   convergent gap estimates);
//! - [`lines`]: closed-form cycles for families of lines via a small
//!   circulant-bidiagonal linear system;
//! - [`verify`]: independent checks of the structural identities
//!   (orthogonality of the gap to the diagonal, `y = Rx - x`,
//!   `x = -y/2 - Ty`, fixed-point-set translation, exhaustive
//!   desk-scale search);
//! - [`io`]: strict JSON problem files, deterministic JSON reports,
//!   CSV traces, and the run dispatcher behind the `proxcycle`
//!   binary.
//!
//! The runnable examples (`cargo run --example ...`) walk through
//! each capability on small problems with printed, checkable numbers.

pub mod block;
pub mod engine;
pub mod error;
pub mod io;
pub mod lines;
pub mod piece;
pub mod problem;
mod vecops;
pub mod verify;

pub use block::{BlockVector, DiagonalVector};
pub use engine::{
    gap_vector_from_dual_identity, generalized_solve, naive_cycle_iterate, prox_closure_infconv,
    seeded_start, LambdaSchedule, SolveConfig, SolveReport, SolveStatus, TraceRecord,
};
pub use error::{Error, Result};
pub use lines::{
    build_system, determinant_formula, solve_line_cycles, LineClassification, LineCycleSolution,
    LineFamily,
};
pub use piece::{ConvexPiece, PieceFlags, PieceKind};
pub use problem::{BlanketCheck, CycleProblem, ExistenceDiagnostic};
pub use verify::{
    brute_force_cycle_search, check_cycle, check_fixed_point_translation, check_gap_identities,
    BruteForceResult, VerificationCheck, VerificationReport,
};
