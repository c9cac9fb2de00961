//! An ordered family of convex pieces whose cycles are sought.

use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::piece::{ConvexPiece, PieceKind};

/// The ordered family `(f_1, ..., f_m)` on a common ambient space `R^d`.
///
/// A single piece is allowed (`m = 1` degenerates to an argmin search);
/// cycle structure becomes meaningful from `m = 2` on.
#[derive(Clone, Debug)]
pub struct CycleProblem {
    pieces: Vec<ConvexPiece>,
    d: usize,
}

/// Outcome of the sufficient-condition check for the duality blanket
/// assumption. `holds = false` means "no implemented condition
/// applies", not a proof of failure.
#[derive(Clone, Debug, PartialEq)]
pub struct BlanketCheck {
    pub holds: bool,
    pub reason: String,
}

/// Outcome of the classical-cycle existence diagnostic. `guaranteed =
/// false` means "not guaranteed by implemented criteria", not
/// nonexistence.
#[derive(Clone, Debug, PartialEq)]
pub struct ExistenceDiagnostic {
    pub classical_cycle_guaranteed: bool,
    pub reason: String,
}

impl CycleProblem {
    /// Builds a problem after checking that all pieces share one
    /// ambient dimension.
    pub fn new(pieces: Vec<ConvexPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidProblem("a problem needs at least one piece".into()));
        }
        let d = pieces[0].dim();
        if d == 0 {
            return Err(Error::InvalidProblem("ambient dimension must be positive".into()));
        }
        for (i, p) in pieces.iter().enumerate() {
            if p.dim() != d {
                return Err(Error::InvalidProblem(format!(
                    "piece {i} (`{}`) has ambient dimension {}, expected {d}",
                    p.kind().name(),
                    p.dim()
                )));
            }
        }
        Ok(Self { pieces, d })
    }

    pub fn pieces(&self) -> &[ConvexPiece] {
        &self.pieces
    }

    pub fn piece(&self, i: usize) -> &ConvexPiece {
        &self.pieces[i]
    }

    /// Number of pieces `m`.
    pub fn m(&self) -> usize {
        self.pieces.len()
    }

    /// Ambient dimension `d`.
    pub fn d(&self) -> usize {
        self.d
    }

    /// True when every piece is the indicator of an affine set, in
    /// which case the infimal-convolution prox admits a direct
    /// least-squares evaluation.
    pub fn all_affine_indicators(&self) -> bool {
        self.pieces.iter().all(|p| p.is_affine_indicator())
    }

    fn check_block_arg(&self, v: &BlockVector, what: &str) -> Result<()> {
        if v.m() != self.m() || v.d() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "{what} is {}x{}, problem is {}x{}",
                v.m(),
                v.d(),
                self.m(),
                self.d
            )));
        }
        Ok(())
    }

    /// Blockwise prox: block `i` of the result is `prox_{gamma f_i}`
    /// applied to block `i` of `v`.
    pub fn prox_product(&self, gamma: f64, v: &BlockVector) -> Result<BlockVector> {
        self.check_block_arg(v, "prox_product input")?;
        let mut out = BlockVector::zeros(self.m(), self.d)?;
        self.prox_product_into(gamma, v, &mut out)?;
        Ok(out)
    }

    /// Allocation-free variant of [`CycleProblem::prox_product`];
    /// `out` must have the problem's shape.
    pub fn prox_product_into(&self, gamma: f64, v: &BlockVector, out: &mut BlockVector) -> Result<()> {
        debug_assert_eq!(out.m(), self.m());
        debug_assert_eq!(out.d(), self.d);
        for (i, piece) in self.pieces.iter().enumerate() {
            piece.prox_into(gamma, v.block(i), out.block_mut(i))?;
        }
        Ok(())
    }

    /// Residual of the classical-cycle equations at a candidate `z`:
    /// `max_i ||z_i - prox_{f_i}(z_{i-1})||`, indices cyclic. Zero
    /// exactly on classical cycles.
    pub fn cycle_residual(&self, z: &BlockVector) -> Result<f64> {
        self.check_block_arg(z, "cycle candidate")?;
        let chained = self.prox_product(1.0, &z.shift())?;
        let mut worst = 0.0f64;
        for i in 0..self.m() {
            worst = worst.max(crate::vecops::dist(z.block(i), chained.block(i)));
        }
        Ok(worst)
    }

    /// Checks the implemented sufficient conditions for the duality
    /// blanket assumption: every piece bounded below, or some piece
    /// supercoercive (bounded domain, or a strongly convex quadratic).
    pub fn check_blanket_assumption(&self) -> BlanketCheck {
        let all_bounded_below = self.pieces.iter().all(|p| p.bounded_below());
        if all_bounded_below {
            let all_indicators = self.pieces.iter().all(|p| p.is_indicator());
            let reason = if all_indicators {
                "inf f_i = 0 for all i (indicator pieces)".to_string()
            } else {
                "every piece is bounded below".to_string()
            };
            return BlanketCheck { holds: true, reason };
        }
        let supercoercive = self.pieces.iter().position(|p| {
            p.flags().bounded_domain || matches!(p.kind(), PieceKind::Quadratic { .. })
        });
        if let Some(i) = supercoercive {
            return BlanketCheck {
                holds: true,
                reason: format!("piece {i} (`{}`) is supercoercive", self.pieces[i].kind().name()),
            };
        }
        BlanketCheck {
            holds: false,
            reason: "no sufficient condition verified (a piece is unbounded below and none is \
                     supercoercive); assumption status unknown"
                .to_string(),
        }
    }

    /// Sufficient conditions for the existence of a classical cycle:
    /// all pieces bounded below with at least one coercive, or all
    /// pieces polyhedral.
    pub fn existence_diagnostic(&self) -> ExistenceDiagnostic {
        let all_bounded_below = self.pieces.iter().all(|p| p.bounded_below());
        if all_bounded_below {
            if let Some(i) = self.pieces.iter().position(|p| p.flags().coercive) {
                return ExistenceDiagnostic {
                    classical_cycle_guaranteed: true,
                    reason: format!(
                        "all pieces bounded below and piece {i} (`{}`) is coercive",
                        self.pieces[i].kind().name()
                    ),
                };
            }
        }
        if self.pieces.iter().all(|p| p.flags().polyhedral) {
            return ExistenceDiagnostic {
                classical_cycle_guaranteed: true,
                reason: "every piece is polyhedral".to_string(),
            };
        }
        ExistenceDiagnostic {
            classical_cycle_guaranteed: false,
            reason: "not guaranteed by implemented criteria".to_string(),
        }
    }
}
