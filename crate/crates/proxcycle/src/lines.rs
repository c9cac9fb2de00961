//! Closed-form cycles for ordered families of lines.
//!
//! For lines `C_i = {a_i + t b_i}` the cycle equations reduce to an
//! `m x m` linear system in the parameters `t_i`: the matrix carries
//! `<b_i, b_i>` on the diagonal, `-<b_i, b_{i-1}>` below it, and
//! `-<b_1, b_m>` in the upper-right corner; the right-hand side is
//! `<b_i, a_{i-1} - a_i>` (indices cyclic). Its determinant has the
//! closed form `prod <b_i,b_i> - <b_1,b_m> prod_{i>=2} <b_i,b_{i-1}>`,
//! which vanishes exactly when all directions are pairwise parallel;
//! the system is consistent either way, so parallel families carry an
//! infinite family of cycles and everything else a unique one.

use nalgebra::{DMatrix, DVector};

use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::piece::ConvexPiece;
use crate::problem::CycleProblem;
use crate::vecops::{dot, norm};

/// An ordered family of `m >= 2` lines `{a_i + t b_i : t in R}` in a
/// common `R^d`, each with a nonzero direction.
#[derive(Clone, Debug)]
pub struct LineFamily {
    anchors: Vec<Vec<f64>>,
    directions: Vec<Vec<f64>>,
    d: usize,
}

/// Whether the cycle parameters are pinned or form an affine family.
#[derive(Clone, Debug, PartialEq)]
pub enum LineClassification {
    Unique { t: Vec<f64> },
    InfiniteFamily { t_particular: Vec<f64>, nullspace: Vec<Vec<f64>> },
}

/// The assembled system together with its solution.
#[derive(Clone, Debug)]
pub struct LineCycleSolution {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    /// Numeric determinant of `matrix` (partial-pivoting LU).
    pub determinant: f64,
    pub classification: LineClassification,
    /// Cycle points `u_i = a_i + t_i b_i` for the reported `t`.
    pub cycle_points: BlockVector,
    /// `R u - u`, the gap vector of the reported cycle.
    pub gap_vector: BlockVector,
}

impl LineFamily {
    pub fn new(lines: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        if lines.len() < 2 {
            return Err(Error::InvalidProblem("a line family needs at least two lines".into()));
        }
        let d = lines[0].0.len();
        if d == 0 {
            return Err(Error::InvalidProblem("ambient dimension must be positive".into()));
        }
        let mut anchors = Vec::with_capacity(lines.len());
        let mut directions = Vec::with_capacity(lines.len());
        for (i, (a, b)) in lines.into_iter().enumerate() {
            if a.len() != d || b.len() != d {
                return Err(Error::InvalidProblem(format!(
                    "line {i} lives in dimension {}/{}, expected {d}",
                    a.len(),
                    b.len()
                )));
            }
            if a.iter().chain(b.iter()).any(|c| !c.is_finite()) {
                return Err(Error::InvalidProblem(format!("line {i} has a non-finite coordinate")));
            }
            if norm(&b) == 0.0 {
                return Err(Error::InvalidProblem(format!("line {i} has a zero direction")));
            }
            anchors.push(a);
            directions.push(b);
        }
        Ok(Self { anchors, directions, d })
    }

    pub fn m(&self) -> usize {
        self.anchors.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn anchor(&self, i: usize) -> &[f64] {
        &self.anchors[i]
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        &self.directions[i]
    }

    /// True when every pair of directions is parallel:
    /// `|<b_i, b_j>| = ||b_i|| ||b_j||` within `1e-10` relative.
    pub fn pairwise_parallel(&self) -> bool {
        let m = self.m();
        for i in 0..m {
            for j in (i + 1)..m {
                let bi = &self.directions[i];
                let bj = &self.directions[j];
                let cos = dot(bi, bj).abs() / (norm(bi) * norm(bj));
                if (cos - 1.0).abs() > 1e-10 {
                    return false;
                }
            }
        }
        true
    }

    /// The same family as an indicator-of-line problem, for
    /// cross-checking against the iterative solvers.
    pub fn to_problem(&self) -> Result<CycleProblem> {
        let pieces = self
            .anchors
            .iter()
            .zip(&self.directions)
            .map(|(a, b)| ConvexPiece::indicator_line(a.clone(), b.clone()))
            .collect::<Result<Vec<_>>>()?;
        CycleProblem::new(pieces)
    }
}

/// Assembles the `m x m` system `A t = rhs` whose solutions
/// parameterize the cycles of the family.
pub fn build_system(family: &LineFamily) -> (DMatrix<f64>, DVector<f64>) {
    let m = family.m();
    let b = &family.directions;
    let a = &family.anchors;
    let mut mat = DMatrix::zeros(m, m);
    let mut rhs = DVector::zeros(m);
    for i in 0..m {
        let prev = if i == 0 { m - 1 } else { i - 1 };
        mat[(i, i)] = dot(&b[i], &b[i]);
        mat[(i, prev)] += -dot(&b[i], &b[prev]);
        let diff: Vec<f64> = a[prev].iter().zip(&a[i]).map(|(p, c)| p - c).collect();
        rhs[i] = dot(&b[i], &diff);
    }
    (mat, rhs)
}

/// Closed-form determinant of the system matrix:
/// `prod_i <b_i,b_i> - <b_1,b_m> prod_{i=2}^m <b_i,b_{i-1}>`.
pub fn determinant_formula(family: &LineFamily) -> f64 {
    let m = family.m();
    let b = &family.directions;
    let diag: f64 = (0..m).map(|i| dot(&b[i], &b[i])).product();
    let mut coupling = dot(&b[0], &b[m - 1]);
    for i in 1..m {
        coupling *= dot(&b[i], &b[i - 1]);
    }
    diag - coupling
}

/// Solves the cycle system: a unique parameter vector when the
/// determinant clears the scale-aware threshold
/// `1e-10 * prod ||b_i||^2`, otherwise the least-norm particular
/// solution of the (consistent) singular system plus a nullspace
/// basis.
pub fn solve_line_cycles(family: &LineFamily) -> Result<LineCycleSolution> {
    let (matrix, rhs) = build_system(family);
    let m = family.m();
    let determinant = matrix.clone().determinant();
    let scale: f64 = family.directions.iter().map(|b| dot(b, b)).product();
    let threshold = 1e-10 * scale;

    let classification = if determinant.abs() > threshold {
        let t = matrix
            .clone()
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::InvalidProblem("system factorization failed".into()))?;
        LineClassification::Unique { t: t.iter().copied().collect() }
    } else {
        let svd = matrix.clone().svd(true, true);
        let sigma_max = svd.singular_values.max();
        let eps = 1e-10 * sigma_max.max(1e-300);
        let t0 = svd
            .solve(&rhs, eps)
            .map_err(|e| Error::InvalidProblem(format!("singular solve failed: {e}")))?;
        let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
        let mut nullspace = Vec::new();
        for (k, sigma) in svd.singular_values.iter().enumerate() {
            if *sigma <= eps {
                nullspace.push(v_t.row(k).iter().copied().collect::<Vec<f64>>());
            }
        }
        LineClassification::InfiniteFamily {
            t_particular: t0.iter().copied().collect(),
            nullspace,
        }
    };

    let t = match &classification {
        LineClassification::Unique { t } => t,
        LineClassification::InfiniteFamily { t_particular, .. } => t_particular,
    };
    let blocks: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            family.anchors[i]
                .iter()
                .zip(&family.directions[i])
                .map(|(a, b)| a + t[i] * b)
                .collect()
        })
        .collect();
    let cycle_points = BlockVector::from_blocks(&blocks)?;
    let gap_vector = cycle_points.cyclic_gap();
    Ok(LineCycleSolution { matrix, rhs, determinant, classification, cycle_points, gap_vector })
}
