//! Catalog of convex pieces with exact or high-accuracy proximal
//! oracles.
//!
//! Each [`ConvexPiece`] describes one convex function `f_i` on `R^d`:
//! either the indicator of a closed convex set (affine subspace, line,
//! halfspace, ball, box, or the epigraph of `x -> exp(-x) + alpha`) or
//! a smooth function (`w/2 * ||u - a||^2`, or `<c, u>`). For indicator
//! kinds the prox is the metric projection and is independent of the
//! prox parameter; membership of a vector in the normal cone can be
//! tested as well. Metadata flags (coercive, bounded domain,
//! polyhedral) feed the existence diagnostics; they are set by the
//! constructor per kind, not inferred numerically.

use crate::error::{Error, Result};
use crate::vecops::{axpy, dist, dot, norm};

/// The supported convex function kinds.
#[derive(Clone, Debug, PartialEq)]
pub enum PieceKind {
    /// Indicator of `a + span(directions)`.
    IndicatorAffineSubspace {
        anchor: Vec<f64>,
        directions: Vec<Vec<f64>>,
    },
    /// Indicator of the line `{a + t b : t in R}`, `b != 0`.
    IndicatorLine { anchor: Vec<f64>, direction: Vec<f64> },
    /// Indicator of `{u : <normal, u> <= offset}`, `normal != 0`.
    IndicatorHalfspace { normal: Vec<f64>, offset: f64 },
    /// Indicator of the closed ball of the given center and radius.
    IndicatorBall { center: Vec<f64>, radius: f64 },
    /// Indicator of a coordinate box; infinite entries mean "no bound".
    IndicatorBox { lower: Vec<f64>, upper: Vec<f64> },
    /// Indicator of `{(x, r) in R^2 : r >= exp(-x) + alpha}`, `alpha >= 0`.
    IndicatorEpiExpShift { alpha: f64 },
    /// The function `u -> w/2 * ||u - a||^2`, `w > 0`.
    Quadratic { anchor: Vec<f64>, weight: f64 },
    /// The function `u -> <c, u>`.
    Linear { slope: Vec<f64> },
}

impl PieceKind {
    /// Short stable name of the kind, used in errors and reports.
    pub fn name(&self) -> &'static str {
        match self {
            PieceKind::IndicatorAffineSubspace { .. } => "indicator_affine_subspace",
            PieceKind::IndicatorLine { .. } => "indicator_line",
            PieceKind::IndicatorHalfspace { .. } => "indicator_halfspace",
            PieceKind::IndicatorBall { .. } => "indicator_ball",
            PieceKind::IndicatorBox { .. } => "indicator_box",
            PieceKind::IndicatorEpiExpShift { .. } => "indicator_epi_exp_shift",
            PieceKind::Quadratic { .. } => "quadratic",
            PieceKind::Linear { .. } => "linear",
        }
    }
}

/// Structural metadata attached to a piece.
#[derive(Clone, Debug, PartialEq)]
pub struct PieceFlags {
    /// `f(u) -> infinity` as `||u|| -> infinity`.
    pub coercive: bool,
    /// The effective domain of `f` is a bounded set.
    pub bounded_domain: bool,
    /// `f` is a polyhedral convex function.
    pub polyhedral: bool,
    /// Human-readable description of `argmin f`, when known.
    pub argmin_known: Option<String>,
}

/// One convex function together with its proximal oracle and flags.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPiece {
    kind: PieceKind,
    flags: PieceFlags,
    /// Orthonormal basis of the span, precomputed for affine subspaces.
    onb: Vec<Vec<f64>>,
}

fn require_finite(name: &str, v: &[f64]) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidPiece(format!("{name} has a non-finite coordinate")));
    }
    Ok(())
}

/// Modified Gram-Schmidt with re-orthogonalization; near-dependent
/// directions are dropped.
fn orthonormalize(directions: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for dir in directions {
        let mut v = dir.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&v, q);
                axpy(&mut v, -c, q);
            }
        }
        let n = norm(&v);
        if n > 1e-12 * norm(dir).max(1.0) {
            for x in &mut v {
                *x /= n;
            }
            basis.push(v);
        }
    }
    basis
}

impl ConvexPiece {
    /// Indicator of the affine subspace `anchor + span(directions)`.
    /// An empty direction list describes a single point.
    pub fn indicator_affine_subspace(anchor: Vec<f64>, directions: Vec<Vec<f64>>) -> Result<Self> {
        require_finite("anchor", &anchor)?;
        for (i, dir) in directions.iter().enumerate() {
            require_finite("direction", dir)?;
            if dir.len() != anchor.len() {
                return Err(Error::InvalidPiece(format!(
                    "direction {i} has dimension {}, anchor has {}",
                    dir.len(),
                    anchor.len()
                )));
            }
        }
        let onb = orthonormalize(&directions);
        let is_point = onb.is_empty();
        let flags = PieceFlags {
            coercive: is_point,
            bounded_domain: is_point,
            polyhedral: true,
            argmin_known: Some("every point of the subspace".into()),
        };
        Ok(Self {
            kind: PieceKind::IndicatorAffineSubspace { anchor, directions },
            flags,
            onb,
        })
    }

    /// Indicator of the line `{anchor + t * direction}`.
    pub fn indicator_line(anchor: Vec<f64>, direction: Vec<f64>) -> Result<Self> {
        require_finite("anchor", &anchor)?;
        require_finite("direction", &direction)?;
        if direction.len() != anchor.len() {
            return Err(Error::InvalidPiece(format!(
                "direction has dimension {}, anchor has {}",
                direction.len(),
                anchor.len()
            )));
        }
        if norm(&direction) == 0.0 {
            return Err(Error::InvalidPiece("zero direction".into()));
        }
        Ok(Self {
            kind: PieceKind::IndicatorLine { anchor, direction },
            flags: PieceFlags {
                coercive: false,
                bounded_domain: false,
                polyhedral: true,
                argmin_known: Some("every point of the line".into()),
            },
            onb: Vec::new(),
        })
    }

    /// Indicator of `{u : <normal, u> <= offset}`.
    pub fn indicator_halfspace(normal: Vec<f64>, offset: f64) -> Result<Self> {
        require_finite("normal", &normal)?;
        if !offset.is_finite() {
            return Err(Error::InvalidPiece("offset is not finite".into()));
        }
        if norm(&normal) == 0.0 {
            return Err(Error::InvalidPiece("zero normal".into()));
        }
        Ok(Self {
            kind: PieceKind::IndicatorHalfspace { normal, offset },
            flags: PieceFlags {
                coercive: false,
                bounded_domain: false,
                polyhedral: true,
                argmin_known: Some("every point of the halfspace".into()),
            },
            onb: Vec::new(),
        })
    }

    /// Indicator of the closed ball `{u : ||u - center|| <= radius}`.
    pub fn indicator_ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        require_finite("center", &center)?;
        if !radius.is_finite() || radius < 0.0 {
            return Err(Error::InvalidPiece(format!("radius must be >= 0, got {radius}")));
        }
        Ok(Self {
            kind: PieceKind::IndicatorBall { center, radius },
            flags: PieceFlags {
                coercive: true,
                bounded_domain: true,
                polyhedral: false,
                argmin_known: Some("every point of the ball".into()),
            },
            onb: Vec::new(),
        })
    }

    /// Indicator of the box `[lower, upper]`; use `-inf`/`+inf` entries
    /// for missing bounds.
    pub fn indicator_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::InvalidPiece(format!(
                "lower has dimension {}, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if lo.is_nan() || hi.is_nan() {
                return Err(Error::InvalidPiece(format!("box bound {i} is NaN")));
            }
            if lo > hi {
                return Err(Error::InvalidPiece(format!(
                    "box bound {i} is crossed: lower {lo} > upper {hi}"
                )));
            }
        }
        let all_finite = lower.iter().chain(&upper).all(|x| x.is_finite());
        Ok(Self {
            kind: PieceKind::IndicatorBox { lower, upper },
            flags: PieceFlags {
                coercive: all_finite,
                bounded_domain: all_finite,
                polyhedral: true,
                argmin_known: Some("every point of the box".into()),
            },
            onb: Vec::new(),
        })
    }

    /// Indicator of the epigraph of `x -> exp(-x) + alpha` in `R^2`.
    pub fn indicator_epi_exp_shift(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidPiece(format!("alpha must be >= 0, got {alpha}")));
        }
        Ok(Self {
            kind: PieceKind::IndicatorEpiExpShift { alpha },
            flags: PieceFlags {
                coercive: false,
                bounded_domain: false,
                polyhedral: false,
                argmin_known: Some("every point of the epigraph".into()),
            },
            onb: Vec::new(),
        })
    }

    /// The function `u -> weight/2 * ||u - anchor||^2`.
    pub fn quadratic(anchor: Vec<f64>, weight: f64) -> Result<Self> {
        require_finite("anchor", &anchor)?;
        if !weight.is_finite() || weight <= 0.0 {
            return Err(Error::InvalidPiece(format!("weight must be > 0, got {weight}")));
        }
        Ok(Self {
            kind: PieceKind::Quadratic { anchor, weight },
            flags: PieceFlags {
                coercive: true,
                bounded_domain: false,
                polyhedral: false,
                argmin_known: Some("the anchor point".into()),
            },
            onb: Vec::new(),
        })
    }

    /// The function `u -> <slope, u>`.
    pub fn linear(slope: Vec<f64>) -> Result<Self> {
        require_finite("slope", &slope)?;
        let constant = norm(&slope) == 0.0;
        Ok(Self {
            kind: PieceKind::Linear { slope },
            flags: PieceFlags {
                coercive: false,
                bounded_domain: false,
                polyhedral: true,
                argmin_known: if constant { Some("every point".into()) } else { None },
            },
            onb: Vec::new(),
        })
    }

    /// Overrides selected metadata flags, keeping the rest.
    pub fn with_flag_overrides(
        mut self,
        coercive: Option<bool>,
        bounded_domain: Option<bool>,
        polyhedral: Option<bool>,
    ) -> Self {
        if let Some(c) = coercive {
            self.flags.coercive = c;
        }
        if let Some(b) = bounded_domain {
            self.flags.bounded_domain = b;
        }
        if let Some(p) = polyhedral {
            self.flags.polyhedral = p;
        }
        self
    }

    pub fn kind(&self) -> &PieceKind {
        &self.kind
    }

    pub fn flags(&self) -> &PieceFlags {
        &self.flags
    }

    /// Ambient dimension the piece lives in.
    pub fn dim(&self) -> usize {
        match &self.kind {
            PieceKind::IndicatorAffineSubspace { anchor, .. } => anchor.len(),
            PieceKind::IndicatorLine { anchor, .. } => anchor.len(),
            PieceKind::IndicatorHalfspace { normal, .. } => normal.len(),
            PieceKind::IndicatorBall { center, .. } => center.len(),
            PieceKind::IndicatorBox { lower, .. } => lower.len(),
            PieceKind::IndicatorEpiExpShift { .. } => 2,
            PieceKind::Quadratic { anchor, .. } => anchor.len(),
            PieceKind::Linear { slope } => slope.len(),
        }
    }

    /// True for indicator kinds, whose prox is a metric projection.
    pub fn is_indicator(&self) -> bool {
        matches!(
            self.kind,
            PieceKind::IndicatorAffineSubspace { .. }
                | PieceKind::IndicatorLine { .. }
                | PieceKind::IndicatorHalfspace { .. }
                | PieceKind::IndicatorBall { .. }
                | PieceKind::IndicatorBox { .. }
                | PieceKind::IndicatorEpiExpShift { .. }
        )
    }

    /// True for indicators of affine sets (subspace or line).
    pub fn is_affine_indicator(&self) -> bool {
        matches!(
            self.kind,
            PieceKind::IndicatorAffineSubspace { .. } | PieceKind::IndicatorLine { .. }
        )
    }

    /// Anchor point and orthonormal direction basis for affine
    /// indicator kinds; `None` for every other kind.
    pub fn affine_geometry(&self) -> Option<(&[f64], Vec<Vec<f64>>)> {
        match &self.kind {
            PieceKind::IndicatorAffineSubspace { anchor, .. } => {
                Some((anchor.as_slice(), self.onb.clone()))
            }
            PieceKind::IndicatorLine { anchor, direction } => {
                let inv = 1.0 / norm(direction);
                let unit = direction.iter().map(|c| c * inv).collect();
                Some((anchor.as_slice(), vec![unit]))
            }
            _ => None,
        }
    }

    /// `inf f > -infinity`; fails only for a nonzero linear piece.
    pub fn bounded_below(&self) -> bool {
        match &self.kind {
            PieceKind::Linear { slope } => norm(slope) == 0.0,
            _ => true,
        }
    }

    fn check_prox_args(&self, gamma: f64, v: &[f64]) -> Result<()> {
        if !(gamma > 0.0) {
            return Err(Error::InvalidConfig(format!("prox parameter must be > 0, got {gamma}")));
        }
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "prox input has dimension {}, piece `{}` has {}",
                v.len(),
                self.kind.name(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// The proximal mapping `argmin_u gamma f(u) + 1/2 ||u - v||^2`.
    /// For indicator kinds this is the projection, independent of `gamma`.
    pub fn prox(&self, gamma: f64, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.prox_into(gamma, v, &mut out)?;
        Ok(out)
    }

    /// Allocation-free variant of [`ConvexPiece::prox`].
    pub fn prox_into(&self, gamma: f64, v: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_prox_args(gamma, v)?;
        debug_assert_eq!(out.len(), self.dim());
        match &self.kind {
            PieceKind::IndicatorAffineSubspace { anchor, .. } => {
                out.copy_from_slice(anchor);
                for q in &self.onb {
                    let mut c = 0.0;
                    for i in 0..v.len() {
                        c += (v[i] - anchor[i]) * q[i];
                    }
                    axpy(out, c, q);
                }
            }
            PieceKind::IndicatorLine { anchor, direction } => {
                let mut num = 0.0;
                for i in 0..v.len() {
                    num += (v[i] - anchor[i]) * direction[i];
                }
                let t = num / dot(direction, direction);
                for i in 0..v.len() {
                    out[i] = anchor[i] + t * direction[i];
                }
            }
            PieceKind::IndicatorHalfspace { normal, offset } => {
                let excess = dot(normal, v) - offset;
                out.copy_from_slice(v);
                if excess > 0.0 {
                    axpy(out, -excess / dot(normal, normal), normal);
                }
            }
            PieceKind::IndicatorBall { center, radius } => {
                let r = dist(v, center);
                if r <= *radius {
                    out.copy_from_slice(v);
                } else {
                    let s = radius / r;
                    for i in 0..v.len() {
                        out[i] = center[i] + s * (v[i] - center[i]);
                    }
                }
            }
            PieceKind::IndicatorBox { lower, upper } => {
                for i in 0..v.len() {
                    out[i] = v[i].clamp(lower[i], upper[i]);
                }
            }
            PieceKind::IndicatorEpiExpShift { alpha } => {
                let (x, r) = project_epi_exp(*alpha, v[0], v[1])?;
                out[0] = x;
                out[1] = r;
            }
            PieceKind::Quadratic { anchor, weight } => {
                let gw = gamma * weight;
                let s = 1.0 / (1.0 + gw);
                for i in 0..v.len() {
                    out[i] = s * (v[i] + gw * anchor[i]);
                }
            }
            PieceKind::Linear { slope } => {
                for i in 0..v.len() {
                    out[i] = v[i] - gamma * slope[i];
                }
            }
        }
        Ok(())
    }

    /// Function value; `+infinity` outside the domain of an indicator
    /// (membership tested with a small absolute slack of `1e-9`).
    pub fn value(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "value input has dimension {}, piece has {}",
                u.len(),
                self.dim()
            )));
        }
        match &self.kind {
            PieceKind::Quadratic { anchor, weight } => {
                let r = dist(u, anchor);
                Ok(0.5 * weight * r * r)
            }
            PieceKind::Linear { slope } => Ok(dot(slope, u)),
            _ => {
                let d = self.distance_to_set(u)?;
                Ok(if d <= 1e-9 { 0.0 } else { f64::INFINITY })
            }
        }
    }

    /// Distance from `u` to the underlying set of an indicator piece.
    pub fn distance_to_set(&self, u: &[f64]) -> Result<f64> {
        if !self.is_indicator() {
            return Err(Error::UnsupportedKind(self.kind.name()));
        }
        let p = self.prox(1.0, u)?;
        Ok(dist(u, &p))
    }

    /// Tests whether `g` lies within `tol` of the normal cone of the
    /// indicator's set at `u`; returns `false` when `u` itself is
    /// farther than `tol` from the set. Errors on non-indicator kinds.
    pub fn normal_cone_contains(&self, u: &[f64], g: &[f64], tol: f64) -> Result<bool> {
        if u.len() != self.dim() || g.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "normal cone test inputs must have dimension {}",
                self.dim()
            )));
        }
        if self.distance_to_set(u)? > tol {
            return Ok(false);
        }
        Ok(match &self.kind {
            PieceKind::IndicatorAffineSubspace { .. } => {
                let tangential: f64 = self.onb.iter().map(|q| dot(g, q).powi(2)).sum::<f64>().sqrt();
                tangential <= tol
            }
            PieceKind::IndicatorLine { direction, .. } => {
                dot(g, direction).abs() / norm(direction) <= tol
            }
            PieceKind::IndicatorHalfspace { normal, offset } => {
                let nn = norm(normal);
                let slack = offset - dot(normal, u);
                if slack > tol * nn.max(1.0) {
                    norm(g) <= tol
                } else {
                    let lam = dot(g, normal) / (nn * nn);
                    let mut resid = g.to_vec();
                    axpy(&mut resid, -lam, normal);
                    lam >= -tol && norm(&resid) <= tol
                }
            }
            PieceKind::IndicatorBall { center, radius } => {
                let r = dist(u, center);
                if r < radius - tol {
                    norm(g) <= tol
                } else {
                    let mut outward = vec![0.0; u.len()];
                    for i in 0..u.len() {
                        outward[i] = u[i] - center[i];
                    }
                    let denom = dot(&outward, &outward);
                    if denom == 0.0 {
                        // Zero-radius ball: the normal cone is the whole space.
                        true
                    } else {
                        let lam = dot(g, &outward) / denom;
                        let mut resid = g.to_vec();
                        axpy(&mut resid, -lam, &outward);
                        lam >= -tol && norm(&resid) <= tol
                    }
                }
            }
            PieceKind::IndicatorBox { lower, upper } => {
                let mut ok = true;
                for i in 0..u.len() {
                    let at_lower = u[i] - lower[i] <= tol;
                    let at_upper = upper[i] - u[i] <= tol;
                    let gi = g[i];
                    let admissible = match (at_lower, at_upper) {
                        (true, true) => true,
                        (true, false) => gi <= tol,
                        (false, true) => gi >= -tol,
                        (false, false) => gi.abs() <= tol,
                    };
                    if !admissible {
                        ok = false;
                        break;
                    }
                }
                ok
            }
            PieceKind::IndicatorEpiExpShift { alpha } => {
                let boundary = (-u[0]).exp() + alpha;
                if u[1] > boundary + tol {
                    norm(g) <= tol
                } else {
                    // Normal cone at a boundary point (x, exp(-x) + alpha)
                    // is the ray of lambda * (-exp(-x), -1), lambda >= 0.
                    let lam = -g[1];
                    let resid = (g[0] + lam * (-u[0]).exp()).abs();
                    lam >= -tol && resid <= tol
                }
            }
            _ => unreachable!("guarded by distance_to_set"),
        })
    }
}

/// Projection onto `{(x, r) : r >= exp(-x) + alpha}`.
///
/// For an infeasible `(x0, r0)` the projection lands on the boundary at
/// the unique root `x > x0` of
/// `phi(x) = x - x0 - (exp(-x) + alpha - r0) * exp(-x)`,
/// solved by bisection safeguarding Newton steps: the bracket
/// `[x0, x0 + 50]` is expanded geometrically until it straddles the
/// root, then every step stays inside the current bracket. Absolute
/// tolerance `1e-13`, iteration cap 200.
fn project_epi_exp(alpha: f64, x0: f64, r0: f64) -> Result<(f64, f64)> {
    let boundary_at = |x: f64| (-x).exp() + alpha;
    if r0 >= boundary_at(x0) {
        return Ok((x0, r0));
    }
    let phi = |x: f64| {
        let e = (-x).exp();
        x - x0 - (e + alpha - r0) * e
    };
    let mut lo = x0;
    let mut hi = x0 + 50.0;
    let mut expansions = 0;
    while phi(hi) <= 0.0 {
        hi = x0 + 2.0 * (hi - x0);
        expansions += 1;
        if expansions > 60 {
            return Err(Error::RootSolver(format!(
                "epigraph projection bracket did not close for input ({x0}, {r0})"
            )));
        }
    }

    // Initial guess: where the boundary crosses r0 (right tail), or one
    // fixed-point step from x0 (deep below), whichever has the smaller
    // residual inside the bracket.
    let mut x = 0.5 * (lo + hi);
    let mut best = phi(x).abs();
    if r0 - alpha > 0.0 {
        let cand = -(r0 - alpha).ln();
        if cand > lo && cand < hi {
            let p = phi(cand).abs();
            if p < best {
                x = cand;
                best = p;
            }
        }
    }
    let e0 = (-x0).exp();
    if e0 < 1e100 {
        let cand = x0 + (e0 + alpha - r0) * e0;
        if cand > lo && cand < hi {
            let p = phi(cand).abs();
            if p < best {
                x = cand;
            }
        }
    }

    let tol = 1e-13;
    // Safeguarded Newton: a step is accepted only when it stays in
    // the bracket and at least halves the step taken two iterations
    // ago, otherwise the iteration bisects. Near the left tail f
    // behaves like -exp(-2x), where raw Newton creeps by +1/2 per
    // step; without the safeguard it makes progress too slowly to
    // ever converge.
    let mut dx_old = hi - lo;
    for _ in 0..200 {
        let e = (-x).exp();
        let f = x - x0 - (e + alpha - r0) * e;
        if f.abs() <= tol {
            return Ok((x, boundary_at(x)));
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        // Width test is relative: far from the origin one ulp of x
        // already moves f by more than any absolute threshold.
        if hi - lo <= tol * lo.abs().max(hi.abs()).max(1.0) {
            let xm = 0.5 * (lo + hi);
            return Ok((xm, boundary_at(xm)));
        }
        let df = 1.0 + e * (2.0 * e + alpha - r0);
        let newton = x - f / df;
        let step = (f / df).abs();
        let dx;
        if newton.is_finite()
            && newton > lo
            && newton < hi
            && newton != x
            && 2.0 * step <= dx_old
        {
            dx = step;
            x = newton;
        } else {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        }
        dx_old = dx;
    }
    Err(Error::RootSolver(format!(
        "epigraph projection did not reach tolerance for input ({x0}, {r0})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_prox_is_midpoint_at_unit_weight() {
        let p = ConvexPiece::quadratic(vec![2.0, -4.0], 1.0).unwrap();
        let out = p.prox(1.0, &[0.0, 0.0]).unwrap();
        assert_eq!(out, vec![1.0, -2.0]);
    }

    #[test]
    fn line_prox_drops_orthogonal_component() {
        let p = ConvexPiece::indicator_line(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        let out = p.prox(0.7, &[3.0, 5.0]).unwrap();
        assert_eq!(out, vec![3.0, 0.0]);
    }

    #[test]
    fn epi_exp_projection_solves_stationarity_at_origin() {
        let p = ConvexPiece::indicator_epi_exp_shift(0.0).unwrap();
        let out = p.prox(1.0, &[0.0, 0.0]).unwrap();
        // Optimality at alpha = 0, v = 0: x = exp(-2x).
        let x = out[0];
        assert!((x - (-2.0 * x).exp()).abs() < 1e-12, "x = {x}");
        assert!((out[1] - (-x).exp()).abs() < 1e-12);
        // Validate against a fine grid of boundary points.
        let mut best = f64::INFINITY;
        let mut arg = 0.0;
        for k in 0..200001 {
            let xx = -2.0 + 4.0 * (k as f64) / 200000.0;
            let dd = xx * xx + (-2.0 * xx).exp();
            if dd < best {
                best = dd;
                arg = xx;
            }
        }
        assert!((arg - x).abs() < 1e-4);
    }

    #[test]
    fn epi_exp_projection_feasible_point_fixed() {
        let p = ConvexPiece::indicator_epi_exp_shift(1.0).unwrap();
        let v = [0.0, 3.0];
        assert_eq!(p.prox(1.0, &v).unwrap(), v.to_vec());
    }

    #[test]
    fn epi_exp_projection_far_left_input() {
        let p = ConvexPiece::indicator_epi_exp_shift(0.5).unwrap();
        let out = p.prox(1.0, &[-300.0, 0.0]).unwrap();
        let x = out[0];
        let e = (-x).exp();
        let resid = x + 300.0 - (e + 0.5) * e;
        assert!(resid.abs() < 1e-9, "resid = {resid}");
        assert!(out[1] >= e + 0.5 - 1e-12);
    }

    #[test]
    fn box_with_infinite_bounds_clamps_finite_sides_only() {
        let p =
            ConvexPiece::indicator_box(vec![0.0, f64::NEG_INFINITY], vec![1.0, f64::INFINITY])
                .unwrap();
        assert!(!p.flags().coercive);
        let out = p.prox(1.0, &[7.0, -9.0]).unwrap();
        assert_eq!(out, vec![1.0, -9.0]);
    }

    #[test]
    fn normal_cone_line_accepts_orthogonal_vectors() {
        let p = ConvexPiece::indicator_line(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        assert!(p.normal_cone_contains(&[2.0, 0.0], &[0.0, 7.0], 1e-9).unwrap());
        assert!(!p.normal_cone_contains(&[2.0, 0.0], &[1.0, 0.0], 1e-9).unwrap());
        assert!(!p.normal_cone_contains(&[2.0, 5.0], &[0.0, 1.0], 1e-9).unwrap());
    }

    #[test]
    fn normal_cone_at_interior_is_zero_only() {
        let p = ConvexPiece::indicator_ball(vec![0.0, 0.0], 2.0).unwrap();
        assert!(p.normal_cone_contains(&[0.1, 0.0], &[0.0, 0.0], 1e-9).unwrap());
        assert!(!p.normal_cone_contains(&[0.1, 0.0], &[0.0, 0.5], 1e-9).unwrap());
        assert!(p.normal_cone_contains(&[2.0, 0.0], &[3.0, 0.0], 1e-9).unwrap());
    }

    #[test]
    fn normal_cone_epi_exp_boundary_ray() {
        let p = ConvexPiece::indicator_epi_exp_shift(0.5).unwrap();
        let x = 0.3f64;
        let u = [x, (-x).exp() + 0.5];
        let lam = 2.0;
        let g = [lam * (-(-x).exp()), -lam];
        assert!(p.normal_cone_contains(&u, &g, 1e-9).unwrap());
        let bad = [lam * (-x).exp(), lam];
        assert!(!p.normal_cone_contains(&u, &bad, 1e-9).unwrap());
    }

    #[test]
    fn normal_cone_unsupported_for_smooth_pieces() {
        let p = ConvexPiece::quadratic(vec![0.0], 1.0).unwrap();
        assert!(matches!(
            p.normal_cone_contains(&[0.0], &[0.0], 1e-9),
            Err(Error::UnsupportedKind(_))
        ));
    }

    #[test]
    fn zero_direction_is_rejected() {
        assert!(ConvexPiece::indicator_line(vec![0.0, 0.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn affine_subspace_projection_via_orthonormal_basis() {
        let p = ConvexPiece::indicator_affine_subspace(
            vec![0.0, 0.0, 1.0],
            vec![vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0]],
        )
        .unwrap();
        let out = p.prox(1.0, &[3.0, -2.0, 5.0]).unwrap();
        assert!((out[0] - 3.0).abs() < 1e-12);
        assert!((out[1] + 2.0).abs() < 1e-12);
        assert!((out[2] - 1.0).abs() < 1e-12);
    }
}
