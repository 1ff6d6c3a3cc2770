pub mod polygon;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::payoff::{AffineMap, Payoff};
pub use polygon::{ConvexPolygon, HalfPlane, GEOM_TOL};

/// The strong Pareto frontier as a polyline in counterclockwise boundary
/// order: `u1` strictly decreasing, `u2` strictly increasing. Degenerates to
/// a single point when no boundary edge qualifies.
#[derive(Clone, Debug)]
pub struct ParetoChain {
    points: Vec<Payoff>,
    cum: Vec<f64>,
}

impl ParetoChain {
    /// Extracts the chain from a convex polygon: the run of boundary edges on
    /// which `u1` strictly decreases while `u2` strictly increases (walking
    /// counterclockwise). Axis-parallel edges (|delta| <= GEOM_TOL) are weakly
    /// Pareto at best and excluded.
    fn from_polygon(poly: &ConvexPolygon) -> ParetoChain {
        let vs = poly.vertices();
        let m = vs.len();
        let strict = |i: usize| {
            let d = vs[(i + 1) % m] - vs[i];
            d.u1 < -GEOM_TOL && d.u2 > GEOM_TOL
        };
        // Convexity makes the qualifying edges one contiguous cyclic run.
        let first = match (0..m).find(|&i| strict(i) && !strict((i + m - 1) % m)) {
            Some(i) => i,
            None => {
                // No strictly decreasing edge: the frontier is the single
                // vertex maximizing u1, then u2.
                let top = *vs
                    .iter()
                    .max_by(|a, b| (a.u1, a.u2).partial_cmp(&(b.u1, b.u2)).unwrap())
                    .unwrap();
                return ParetoChain { points: vec![top], cum: vec![0.0] };
            }
        };
        let mut run = vec![vs[first]];
        let mut i = first;
        while strict(i) {
            i = (i + 1) % m;
            run.push(vs[i]);
        }
        let mut cum = vec![0.0];
        for w in run.windows(2) {
            cum.push(cum.last().unwrap() + w[0].dist(w[1]));
        }
        ParetoChain { points: run, cum }
    }

    fn singleton(p: Payoff) -> ParetoChain {
        ParetoChain { points: vec![p], cum: vec![0.0] }
    }

    pub fn points(&self) -> &[Payoff] {
        &self.points
    }

    pub fn is_single_point(&self) -> bool {
        self.points.len() == 1
    }

    /// First point in boundary order: largest u1, smallest u2.
    pub fn start(&self) -> Payoff {
        self.points[0]
    }

    /// Last point in boundary order: smallest u1, largest u2.
    pub fn end(&self) -> Payoff {
        *self.points.last().unwrap()
    }

    pub fn total_len(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    /// Point at arc length `s` from the start (largest-u1) end, clamped.
    pub fn point_at(&self, s: f64) -> Payoff {
        if self.points.len() == 1 || s <= 0.0 {
            return self.points[0];
        }
        if s >= self.total_len() {
            return self.end();
        }
        let i = self.cum.partition_point(|&c| c <= s) - 1;
        let seg = self.points[i + 1] - self.points[i];
        let t = (s - self.cum[i]) / (self.cum[i + 1] - self.cum[i]);
        self.points[i] + seg * t
    }

    /// Chain height at abscissa `x`, or None outside the chain's u1 range.
    pub fn y_at_x(&self, x: f64) -> Option<f64> {
        let ps = &self.points;
        if x > ps[0].u1 + GEOM_TOL || x < self.end().u1 - GEOM_TOL {
            return None;
        }
        if ps.len() == 1 {
            return Some(ps[0].u2);
        }
        let i = ps.partition_point(|p| p.u1 > x).clamp(1, ps.len() - 1);
        let (a, b) = (ps[i - 1], ps[i]);
        let t = ((x - a.u1) / (b.u1 - a.u1)).clamp(0.0, 1.0);
        Some(a.u2 + t * (b.u2 - a.u2))
    }

    /// Chain abscissa at height `y`, or None outside the chain's u2 range.
    pub fn x_at_y(&self, y: f64) -> Option<f64> {
        let ps = &self.points;
        if y < ps[0].u2 - GEOM_TOL || y > self.end().u2 + GEOM_TOL {
            return None;
        }
        if ps.len() == 1 {
            return Some(ps[0].u1);
        }
        let i = ps.partition_point(|p| p.u2 < y).clamp(1, ps.len() - 1);
        let (a, b) = (ps[i - 1], ps[i]);
        let t = ((y - a.u2) / (b.u2 - a.u2)).clamp(0.0, 1.0);
        Some(a.u1 + t * (b.u1 - a.u1))
    }

    /// Closest chain point to `p` and the distance to it.
    pub fn project(&self, p: Payoff) -> (Payoff, f64) {
        let ps = &self.points;
        if ps.len() == 1 {
            return (ps[0], p.dist(ps[0]));
        }
        let mut best = (ps[0], f64::INFINITY);
        for w in ps.windows(2) {
            let e = w[1] - w[0];
            let t = ((p - w[0]).dot(e) / e.dot(e)).clamp(0.0, 1.0);
            let q = w[0] + e * t;
            let d = p.dist(q);
            if d < best.1 {
                best = (q, d);
            }
        }
        best
    }
}

/// A two-player bargaining problem: a convex feasible set and a disagreement
/// point inside it. The individually rational part (the intersection with
/// `{u >= c}`), its Pareto chain, and the ideal point are derived eagerly.
#[derive(Clone, Debug)]
pub struct BargainingProblem {
    feasible: ConvexPolygon,
    disagreement: Payoff,
    chain: Arc<ParetoChain>,
    full_chain: Arc<ParetoChain>,
    ideal: Payoff,
}

/// Validates the inputs and builds the problem. The vertex list is hulled
/// first, so any point order (or redundant interior points) is accepted.
pub fn make_problem(points: &[Payoff], disagreement: Payoff) -> Result<BargainingProblem> {
    let feasible = ConvexPolygon::hull(points)?;
    BargainingProblem::from_polygon(feasible, disagreement)
}

impl BargainingProblem {
    pub fn from_polygon(feasible: ConvexPolygon, disagreement: Payoff) -> Result<BargainingProblem> {
        if !feasible.contains(disagreement) {
            return Err(Error::DisagreementOutside);
        }
        let full_chain = Arc::new(ParetoChain::from_polygon(&feasible));
        let (lo, _) = feasible.bbox();
        let unclipped =
            disagreement.u1 <= lo.u1 + GEOM_TOL && disagreement.u2 <= lo.u2 + GEOM_TOL;

        let (chain, ideal) = if unclipped {
            let hi = feasible.bbox().1;
            (Arc::clone(&full_chain), hi)
        } else {
            let restricted = feasible
                .clip(Payoff::new(1.0, 0.0), disagreement.u1)
                .and_then(|p| p.clip(Payoff::new(0.0, 1.0), disagreement.u2));
            match restricted {
                Some(r) => {
                    let hi = r.bbox().1;
                    (Arc::new(ParetoChain::from_polygon(&r)), hi)
                }
                None => {
                    // The rational part has empty interior: a point or an
                    // axis-parallel segment. Its frontier is the far end.
                    let c = disagreement;
                    let mut cands = Vec::new();
                    if let Some((_, yhi)) = feasible.slice_at_x(c.u1) {
                        if yhi >= c.u2 - GEOM_TOL {
                            cands.push(Payoff::new(c.u1, yhi));
                        }
                    }
                    if let Some((_, xhi)) = feasible.slice_at_y(c.u2) {
                        if xhi >= c.u1 - GEOM_TOL {
                            cands.push(Payoff::new(xhi, c.u2));
                        }
                    }
                    cands.push(c);
                    let top = *cands
                        .iter()
                        .max_by(|a, b| (a.u1, a.u2).partial_cmp(&(b.u1, b.u2)).unwrap())
                        .unwrap();
                    let ideal = cands
                        .iter()
                        .fold(c, |m, p| Payoff::new(m.u1.max(p.u1), m.u2.max(p.u2)));
                    (Arc::new(ParetoChain::singleton(top)), ideal)
                }
            }
        };
        Ok(BargainingProblem { feasible, disagreement, chain, full_chain, ideal })
    }

    pub fn feasible(&self) -> &ConvexPolygon {
        &self.feasible
    }

    pub fn disagreement(&self) -> Payoff {
        self.disagreement
    }

    /// Strong Pareto chain of the individually rational part.
    pub fn pareto_frontier(&self) -> &ParetoChain {
        &self.chain
    }

    /// Strong Pareto chain of the full feasible set, ignoring the
    /// disagreement point. Used when sweeping alternative disagreement points.
    pub fn full_chain(&self) -> &ParetoChain {
        &self.full_chain
    }

    /// Coordinate-wise maximum over the individually rational part.
    pub fn ideal_point(&self) -> Payoff {
        self.ideal
    }

    pub fn contains(&self, p: Payoff) -> bool {
        self.feasible.contains(p)
    }

    /// Same feasible set, different disagreement point.
    pub fn with_disagreement(&self, c: Payoff) -> Result<BargainingProblem> {
        BargainingProblem::from_polygon(self.feasible.clone(), c)
    }

    /// The ideal point for an alternative disagreement point `c`, computed
    /// against the full frontier without rebuilding the problem.
    pub fn ideal_for(&self, c: Payoff) -> Payoff {
        let ch = &self.full_chain;
        let i1 =
            if c.u2 <= ch.start().u2 { ch.start().u1 } else { ch.x_at_y(c.u2).unwrap_or(ch.end().u1) };
        let i2 =
            if c.u1 <= ch.end().u1 { ch.end().u2 } else { ch.y_at_x(c.u1).unwrap_or(ch.start().u2) };
        Payoff::new(i1, i2)
    }

    /// Rescales so the disagreement point sits at the origin and the ideal
    /// point at (1, 1). Returns the map T with T(normalized) = original.
    pub fn normalize(&self) -> Result<(BargainingProblem, AffineMap)> {
        let c = self.disagreement;
        let a1 = self.ideal.u1 - c.u1;
        let a2 = self.ideal.u2 - c.u2;
        if a1 <= GEOM_TOL || a2 <= GEOM_TOL {
            return Err(Error::DegenerateNormalization);
        }
        let map = AffineMap::new(a1, c.u1, a2, c.u2);
        let inv = map.inverse();
        let verts: Vec<Payoff> = self.feasible.vertices().iter().map(|&v| inv.apply(v)).collect();
        let normalized = make_problem(&verts, Payoff::new(0.0, 0.0))?;
        Ok((normalized, map))
    }

    /// Restricts the feasible set to the individually rational part,
    /// keeping the same disagreement point.
    pub fn ir_slice(&self) -> Result<BargainingProblem> {
        let c = self.disagreement;
        let (lo, _) = self.feasible.bbox();
        if c.u1 <= lo.u1 + GEOM_TOL && c.u2 <= lo.u2 + GEOM_TOL {
            return Ok(self.clone());
        }
        let restricted = self
            .feasible
            .clip(Payoff::new(1.0, 0.0), c.u1)
            .and_then(|p| p.clip(Payoff::new(0.0, 1.0), c.u2))
            .ok_or(Error::DegenerateNormalization)?;
        BargainingProblem::from_polygon(restricted, c)
    }

    pub fn is_normalized(&self) -> bool {
        self.disagreement.norm() <= 1e-9
            && (self.ideal.u1 - 1.0).abs() <= 1e-9
            && (self.ideal.u2 - 1.0).abs() <= 1e-9
    }

    /// Whether the feasible set contains the full box spanned by any of its
    /// points down to the bounding-box corner (free disposal of utility).
    pub fn is_comprehensive(&self) -> bool {
        let (lo, hi) = self.feasible.bbox();
        self.feasible.contains(Payoff::new(hi.u1, lo.u2))
            && self.feasible.contains(Payoff::new(lo.u1, hi.u2))
    }

    /// Reflects the rational part of a normalized feasible set into all four
    /// quadrants: the boundary polygon of `{(x, y) : (|x|, |y|) in F}`.
    pub fn symmetrize(&self) -> Result<ConvexPolygon> {
        if !self.is_normalized() {
            return Err(Error::NotNormalized);
        }
        let q1 = self
            .feasible
            .clip(Payoff::new(1.0, 0.0), 0.0)
            .and_then(|p| p.clip(Payoff::new(0.0, 1.0), 0.0))
            .ok_or(Error::DegenerateSet)?;
        if q1.slack(Payoff::new(1.0, 0.0)) < -1e-9 || q1.slack(Payoff::new(0.0, 1.0)) < -1e-9 {
            return Err(Error::NotComprehensive);
        }
        let mut pts = Vec::with_capacity(4 * q1.vertices().len());
        for &v in q1.vertices() {
            pts.push(v);
            pts.push(Payoff::new(-v.u1, v.u2));
            pts.push(Payoff::new(-v.u1, -v.u2));
            pts.push(Payoff::new(v.u1, -v.u2));
        }
        ConvexPolygon::hull(&pts)
    }
}

/// Named example feasible sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Trapezoid,
    Triangle,
    Parabola,
    Fig3Left,
    Fig3Right,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Trapezoid => "trapezoid",
            Preset::Triangle => "triangle",
            Preset::Parabola => "parabola",
            Preset::Fig3Left => "fig3-left",
            Preset::Fig3Right => "fig3-right",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Preset> {
        match s {
            "trapezoid" => Ok(Preset::Trapezoid),
            "triangle" => Ok(Preset::Triangle),
            "parabola" => Ok(Preset::Parabola),
            "fig3-left" => Ok(Preset::Fig3Left),
            "fig3-right" => Ok(Preset::Fig3Right),
            other => Err(Error::UnknownPreset(other.into())),
        }
    }
}

/// Vertex list for a preset. `n` is the segment count for sampled curves and
/// is ignored by the polygonal presets.
pub fn curve_preset(preset: Preset, n: usize) -> Result<Vec<Payoff>> {
    let pts = |v: &[(f64, f64)]| v.iter().map(|&(x, y)| Payoff::new(x, y)).collect();
    match preset {
        Preset::Trapezoid => Ok(pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 0.5), (0.0, 1.0)])),
        Preset::Triangle => Ok(pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])),
        Preset::Fig3Left => Ok(pts(&[(0.0, 0.0), (1.0, 0.0), (0.7, 0.7), (0.0, 1.0)])),
        Preset::Fig3Right => {
            Ok(pts(&[(0.0, 0.0), (1.0, 0.0), (0.8, 0.65), (0.7, 0.7), (0.0, 1.0)]))
        }
        Preset::Parabola => {
            if n < 2 {
                return Err(Error::InvalidSegmentCount(n));
            }
            let mut v = Vec::with_capacity(n + 3);
            v.push(Payoff::new(0.0, 0.0));
            v.push(Payoff::new(1.0, 0.0));
            for k in 0..=n {
                let x = k as f64 / n as f64;
                v.push(Payoff::new(x, 1.0 - x * x));
            }
            Ok(v)
        }
    }
}

/// Default segment count for sampled curve presets.
pub const DEFAULT_PRESET_SEGMENTS: usize = 512;

/// Builds a preset problem with the given disagreement point.
pub fn preset_problem(preset: Preset, n: usize, disagreement: Payoff) -> Result<BargainingProblem> {
    make_problem(&curve_preset(preset, n)?, disagreement)
}
