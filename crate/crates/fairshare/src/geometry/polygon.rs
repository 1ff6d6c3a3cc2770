use crate::error::{Error, Result};
use crate::payoff::Payoff;

/// Absolute tolerance for membership, collinearity and duplicate tests.
/// All problem coordinates are O(1), so an absolute tolerance is adequate.
pub const GEOM_TOL: f64 = 1e-12;

#[inline]
pub fn cross(o: Payoff, a: Payoff, b: Payoff) -> f64 {
    (a.u1 - o.u1) * (b.u2 - o.u2) - (a.u2 - o.u2) * (b.u1 - o.u1)
}

/// One edge constraint `n . p >= offset`, with `n` the inward unit normal.
#[derive(Clone, Copy, Debug)]
pub struct HalfPlane {
    pub n: Payoff,
    pub offset: f64,
}

impl HalfPlane {
    #[inline]
    pub fn slack(&self, p: Payoff) -> f64 {
        self.n.dot(p) - self.offset
    }
}

/// A closed convex polygon with positive area.
///
/// Vertices are stored counterclockwise starting from the lexicographically
/// smallest vertex, so equal sets always compare and serialize identically.
#[derive(Clone, Debug)]
pub struct ConvexPolygon {
    verts: Vec<Payoff>,
    halfplanes: Vec<HalfPlane>,
}

impl ConvexPolygon {
    /// Convex hull of `points` with duplicate and collinear vertices removed.
    ///
    /// Points that the hull drops must still lie inside it (within `GEOM_TOL`);
    /// anything else means the input was not in convex position in a way the
    /// cleanup cannot represent, and is rejected.
    pub fn hull(points: &[Payoff]) -> Result<ConvexPolygon> {
        for p in points {
            if !p.u1.is_finite() || !p.u2.is_finite() {
                return Err(Error::NonConvexInput("non-finite coordinate".into()));
            }
        }
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| (a.u1, a.u2).partial_cmp(&(b.u1, b.u2)).unwrap());
        pts.dedup_by(|a, b| (a.u1 - b.u1).abs() <= GEOM_TOL && (a.u2 - b.u2).abs() <= GEOM_TOL);
        if pts.len() < 3 {
            return Err(Error::DegenerateSet);
        }

        // Andrew's monotone chain. A non-left turn pops the middle point:
        // exactly collinear points are redundant, right turns are interior.
        let chain = |iter: &mut dyn Iterator<Item = Payoff>| -> Vec<Payoff> {
            let mut out: Vec<Payoff> = Vec::new();
            for p in iter {
                while out.len() >= 2 && cross(out[out.len() - 2], out[out.len() - 1], p) <= 0.0 {
                    out.pop();
                }
                out.push(p);
            }
            out
        };
        let mut lower = chain(&mut pts.iter().copied());
        let mut upper = chain(&mut pts.iter().rev().copied());
        lower.pop();
        upper.pop();
        lower.append(&mut upper);
        let verts = lower;
        if verts.len() < 3 {
            return Err(Error::DegenerateSet);
        }

        let poly = ConvexPolygon::from_ccw_verts(verts)?;
        // Only points the chain dropped can disagree with the hull; the kept
        // ones are its vertices. Key by bit pattern to find them.
        if poly.verts.len() < pts.len() {
            let kept: std::collections::HashSet<(u64, u64)> = poly
                .verts
                .iter()
                .map(|v| (v.u1.to_bits(), v.u2.to_bits()))
                .collect();
            for p in &pts {
                if !kept.contains(&(p.u1.to_bits(), p.u2.to_bits())) && poly.slack(*p) < -GEOM_TOL {
                    return Err(Error::NonConvexInput(format!(
                        "point ({}, {}) falls outside the cleaned hull",
                        p.u1, p.u2
                    )));
                }
            }
        }
        Ok(poly)
    }

    /// Wraps an already counterclockwise, strictly convex vertex list.
    fn from_ccw_verts(mut verts: Vec<Payoff>) -> Result<ConvexPolygon> {
        let start = verts
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (a.u1, a.u2).partial_cmp(&(b.u1, b.u2)).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        verts.rotate_left(start);

        let mut area2 = 0.0;
        for i in 0..verts.len() {
            let a = verts[i];
            let b = verts[(i + 1) % verts.len()];
            area2 += a.u1 * b.u2 - b.u1 * a.u2;
        }
        if area2 <= 2.0 * GEOM_TOL {
            return Err(Error::DegenerateSet);
        }

        let halfplanes = verts
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let b = verts[(i + 1) % verts.len()];
                let e = b - a;
                let len = e.norm();
                let n = Payoff::new(-e.u2 / len, e.u1 / len);
                HalfPlane { n, offset: n.dot(a) }
            })
            .collect();
        Ok(ConvexPolygon { verts, halfplanes })
    }

    pub fn vertices(&self) -> &[Payoff] {
        &self.verts
    }

    pub fn halfplanes(&self) -> &[HalfPlane] {
        &self.halfplanes
    }

    pub fn area(&self) -> f64 {
        let mut area2 = 0.0;
        for i in 0..self.verts.len() {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % self.verts.len()];
            area2 += a.u1 * b.u2 - b.u1 * a.u2;
        }
        area2 / 2.0
    }

    /// Smallest signed distance to the edge lines; >= 0 strictly inside.
    pub fn slack(&self, p: Payoff) -> f64 {
        self.halfplanes
            .iter()
            .map(|h| h.slack(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Closed membership with `GEOM_TOL` of boundary slop.
    pub fn contains(&self, p: Payoff) -> bool {
        self.slack(p) >= -GEOM_TOL
    }

    pub fn bbox(&self) -> (Payoff, Payoff) {
        let mut lo = Payoff::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Payoff::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.verts {
            lo.u1 = lo.u1.min(v.u1);
            lo.u2 = lo.u2.min(v.u2);
            hi.u1 = hi.u1.max(v.u1);
            hi.u2 = hi.u2.max(v.u2);
        }
        (lo, hi)
    }

    /// The x-range of the horizontal slice at height `y`, if nonempty.
    pub fn slice_at_y(&self, y: f64) -> Option<(f64, f64)> {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for h in &self.halfplanes {
            let rem = h.offset - h.n.u2 * y;
            if h.n.u1.abs() <= GEOM_TOL {
                if rem > GEOM_TOL {
                    return None;
                }
            } else if h.n.u1 > 0.0 {
                lo = lo.max(rem / h.n.u1);
            } else {
                hi = hi.min(rem / h.n.u1);
            }
        }
        (lo <= hi + GEOM_TOL).then_some((lo, hi))
    }

    /// The y-range of the vertical slice at `x`, if nonempty.
    pub fn slice_at_x(&self, x: f64) -> Option<(f64, f64)> {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for h in &self.halfplanes {
            let rem = h.offset - h.n.u1 * x;
            if h.n.u2.abs() <= GEOM_TOL {
                if rem > GEOM_TOL {
                    return None;
                }
            } else if h.n.u2 > 0.0 {
                lo = lo.max(rem / h.n.u2);
            } else {
                hi = hi.min(rem / h.n.u2);
            }
        }
        (lo <= hi + GEOM_TOL).then_some((lo, hi))
    }

    /// Like [`slice_at_y`](Self::slice_at_y), but also reports which edge
    /// bounds the slice on each end.
    pub fn slice_at_y_edges(&self, y: f64) -> Option<(f64, usize, f64, usize)> {
        self.slice_edges(|h| (h.n.u1, h.offset - h.n.u2 * y))
    }

    /// Like [`slice_at_x`](Self::slice_at_x), but also reports which edge
    /// bounds the slice on each end.
    pub fn slice_at_x_edges(&self, x: f64) -> Option<(f64, usize, f64, usize)> {
        self.slice_edges(|h| (h.n.u2, h.offset - h.n.u1 * x))
    }

    fn slice_edges(&self, line: impl Fn(&HalfPlane) -> (f64, f64)) -> Option<(f64, usize, f64, usize)> {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        let (mut elo, mut ehi) = (usize::MAX, usize::MAX);
        for (i, h) in self.halfplanes.iter().enumerate() {
            let (coef, rem) = line(h);
            if coef.abs() <= GEOM_TOL {
                if rem > GEOM_TOL {
                    return None;
                }
            } else if coef > 0.0 {
                let b = rem / coef;
                if b > lo {
                    lo = b;
                    elo = i;
                }
            } else {
                let b = rem / coef;
                if b < hi {
                    hi = b;
                    ehi = i;
                }
            }
        }
        (lo <= hi + GEOM_TOL && elo != usize::MAX && ehi != usize::MAX)
            .then_some((lo, elo, hi, ehi))
    }

    /// Largest `t >= 0` with `from + t*dir` still inside, and the index of the
    /// edge through which the ray leaves. `from` must be inside.
    pub fn ray_exit(&self, from: Payoff, dir: Payoff) -> (f64, usize) {
        let mut t_max = f64::INFINITY;
        let mut edge = 0;
        for (i, h) in self.halfplanes.iter().enumerate() {
            let speed = h.n.dot(dir);
            if speed < -GEOM_TOL {
                let t = (h.slack(from) / -speed).max(0.0);
                if t < t_max {
                    t_max = t;
                    edge = i;
                }
            }
        }
        (t_max, edge)
    }

    /// Intersection with the half-plane `n . p >= offset`, or None if the
    /// clipped region has (near-)zero area.
    pub fn clip(&self, n: Payoff, offset: f64) -> Option<ConvexPolygon> {
        let mut out: Vec<Payoff> = Vec::new();
        let m = self.verts.len();
        for i in 0..m {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % m];
            let sa = n.dot(a) - offset;
            let sb = n.dot(b) - offset;
            if sa >= -GEOM_TOL {
                out.push(a);
            }
            if (sa > GEOM_TOL && sb < -GEOM_TOL) || (sa < -GEOM_TOL && sb > GEOM_TOL) {
                let t = sa / (sa - sb);
                out.push(a + (b - a) * t);
            }
        }
        if out.len() < 3 {
            return None;
        }
        ConvexPolygon::hull(&out).ok()
    }

    /// Euclidean distance from `p` to the polygon boundary.
    pub fn boundary_distance(&self, p: Payoff) -> f64 {
        let m = self.verts.len();
        let mut best = f64::INFINITY;
        for i in 0..m {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % m];
            let e = b - a;
            let t = ((p - a).dot(e) / e.dot(e)).clamp(0.0, 1.0);
            best = best.min(p.dist(a + e * t));
        }
        best
    }
}
