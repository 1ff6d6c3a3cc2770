use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::BargainingProblem;
use crate::payoff::Payoff;

/// Identifies which rule produced a solution point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    Nash,
    KalaiSmorodinsky,
    Egalitarian,
    EqualLoss,
    YuLp(f64),
    /// Harmonic-measure rule, computed by finite differences.
    HarmonicDelta,
    /// Harmonic-measure rule, estimated by random walks.
    HarmonicDeltaMc,
    /// Fixed point of repeatedly moving the disagreement point to the
    /// harmonic-measure value.
    IteratedDelta,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Nash => "nash",
            Method::KalaiSmorodinsky => "ks",
            Method::Egalitarian => "egalitarian",
            Method::EqualLoss => "equal-loss",
            Method::YuLp(_) => "yu-lp",
            Method::HarmonicDelta => "s-delta",
            Method::HarmonicDeltaMc => "s-delta-mc",
            Method::IteratedDelta => "iterated-s-delta",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub payoff: Payoff,
    pub method: Method,
    pub diagnostics: BTreeMap<String, f64>,
}

impl Solution {
    pub(crate) fn new(method: Method, payoff: Payoff) -> Solution {
        Solution { payoff, method, diagnostics: BTreeMap::new() }
    }

    pub(crate) fn with(mut self, key: &str, value: f64) -> Solution {
        self.diagnostics.insert(key.into(), value);
        self
    }
}

/// Errors with DegenerateNormalization unless the ideal point strictly
/// dominates the disagreement point; rules anchored to the ideal point need
/// that room.
fn require_room(problem: &BargainingProblem) -> Result<()> {
    let c = problem.disagreement();
    let ideal = problem.ideal_point();
    if ideal.u1 - c.u1 <= 1e-12 || ideal.u2 - c.u2 <= 1e-12 {
        return Err(Error::DegenerateNormalization);
    }
    Ok(())
}

/// Maximizes the gain product (u1 - c1)(u2 - c2) over the rational frontier.
///
/// The product is strictly concave along the chain, so its derivative in
/// boundary order changes sign exactly once; a binary search over edges
/// followed by the per-edge quadratic formula locates the maximizer.
pub fn nash(problem: &BargainingProblem) -> Solution {
    let c = problem.disagreement();
    let p = nash_point(problem.pareto_frontier().points(), c);
    let product = (p.u1 - c.u1) * (p.u2 - c.u2);
    Solution::new(Method::Nash, p).with("product", product)
}

/// The product maximizer over a frontier chain, for any feasible
/// disagreement point. No frontier point is strictly dominated by a feasible
/// one, so restricting the chain to the rational part beforehand changes
/// nothing.
pub(crate) fn nash_point(ps: &[Payoff], c: Payoff) -> Payoff {
    if ps.len() == 1 {
        return ps[0];
    }
    // Derivative of the product at the start of edge j, moving along the edge.
    let deriv = |j: usize| {
        let v = ps[j];
        let e = ps[j + 1] - v;
        e.u1 * (v.u2 - c.u2) + e.u2 * (v.u1 - c.u1)
    };
    let edges = ps.len() - 1;
    let (mut lo, mut hi) = (0usize, edges);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if deriv(mid) > 0.0 {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if lo == 0 {
        return ps[0];
    }
    let j = lo - 1;
    let v = ps[j];
    let e = ps[j + 1] - v;
    let quad = 2.0 * e.u1 * e.u2; // strictly negative on the frontier
    let t = if quad == 0.0 { 1.0 } else { (-deriv(j) / quad).clamp(0.0, 1.0) };
    v + e * t
}

/// Crossing of the frontier with the segment from the disagreement point to
/// the ideal point.
pub fn kalai_smorodinsky(problem: &BargainingProblem) -> Result<Solution> {
    require_room(problem)?;
    let c = problem.disagreement();
    let ideal = problem.ideal_point();
    let dir = ideal - c;
    let ps = problem.pareto_frontier().points();
    if ps.len() == 1 {
        return Ok(Solution::new(Method::KalaiSmorodinsky, ps[0]));
    }
    // Signed side of a chain point relative to the ray c -> ideal; negative
    // below the ray, strictly increasing in boundary order.
    let side = |p: Payoff| dir.u1 * (p.u2 - c.u2) - dir.u2 * (p.u1 - c.u1);
    let (mut lo, mut hi) = (0usize, ps.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if side(ps[mid]) < 0.0 {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if lo == 0 {
        return Ok(Solution::new(Method::KalaiSmorodinsky, ps[0]));
    }
    if lo == ps.len() {
        // The ray leaves through a weakly-Pareto edge past the chain's end.
        let (t, _) = problem.feasible().ray_exit(c, dir);
        let sol = Solution::new(Method::KalaiSmorodinsky, c + dir * t).with("weak-pareto-hit", 1.0);
        return Ok(sol);
    }
    let v = ps[lo - 1];
    let e = ps[lo] - v;
    let ds = dir.u1 * e.u2 - dir.u2 * e.u1;
    let t = if ds == 0.0 { 0.0 } else { (-side(v) / ds).clamp(0.0, 1.0) };
    Ok(Solution::new(Method::KalaiSmorodinsky, v + e * t))
}

/// Largest equal gain over the disagreement point that stays feasible.
pub fn egalitarian(problem: &BargainingProblem) -> Solution {
    let c = problem.disagreement();
    let (t, _) = problem.feasible().ray_exit(c, Payoff::new(1.0, 1.0));
    Solution::new(Method::Egalitarian, c + Payoff::new(t, t)).with("gain", t)
}

/// Frontier point at which both players give up the same amount relative to
/// the ideal point.
pub fn equal_loss(problem: &BargainingProblem) -> Result<Solution> {
    require_room(problem)?;
    let ideal = problem.ideal_point();
    let ch = problem.pareto_frontier();
    let ps = ch.points();
    if ps.len() == 1 {
        return Ok(Solution::new(Method::EqualLoss, ps[0]));
    }
    // Loss difference (I1 - u1) - (I2 - u2); strictly increasing in boundary
    // order, negative at the chain start.
    let diff = |p: Payoff| (ideal.u1 - p.u1) - (ideal.u2 - p.u2);
    let (mut lo, mut hi) = (0usize, ps.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if diff(ps[mid]) < 0.0 {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let (point, clamped) = if lo == 0 {
        (ps[0], diff(ps[0]) != 0.0)
    } else if lo == ps.len() {
        (ch.end(), true)
    } else {
        let v = ps[lo - 1];
        let e = ps[lo] - v;
        let ds = e.u2 - e.u1;
        let t = if ds == 0.0 { 0.0 } else { (-diff(v) / ds).clamp(0.0, 1.0) };
        (v + e * t, false)
    };
    let mut sol = Solution::new(Method::EqualLoss, point).with("loss", ideal.u1 - point.u1);
    if clamped {
        sol = sol.with("clamped", 1.0);
    }
    Ok(sol)
}

/// Frontier point closest to the ideal point in the l^p norm, for p >= 1.
/// `p = inf` minimizes the larger loss, which coincides with equal loss.
pub fn yu_lp(problem: &BargainingProblem, p: f64) -> Result<Solution> {
    if !(p >= 1.0) {
        return Err(Error::InvalidP(p));
    }
    if p.is_infinite() {
        let mut sol = equal_loss(problem)?;
        sol.method = Method::YuLp(p);
        return Ok(sol);
    }
    require_room(problem)?;
    let ideal = problem.ideal_point();
    let ps = problem.pareto_frontier().points();
    if ps.len() == 1 {
        return Ok(Solution::new(Method::YuLp(p), ps[0]).with("p", p));
    }
    // The distance is convex along the chain, so the sign of its directional
    // derivative flips exactly once. In log form the sign on edge (v, v + e)
    // at parameter t compares ln|ex| + (p-1) ln l1 against ln ey + (p-1) ln l2,
    // which stays well scaled for any p.
    let wt = |l: f64| if p == 1.0 { 0.0 } else { (p - 1.0) * l.ln() };
    let dsign = |j: usize, t: f64| {
        let v = ps[j];
        let e = ps[j + 1] - v;
        let l1 = (ideal.u1 - v.u1 - t * e.u1).max(0.0);
        let l2 = (ideal.u2 - v.u2 - t * e.u2).max(0.0);
        ((-e.u1).ln() + wt(l1)) - (e.u2.ln() + wt(l2))
    };
    let edges = ps.len() - 1;
    let (mut lo, mut hi) = (0usize, edges);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if dsign(mid, 0.0) < 0.0 {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let point = if lo == 0 {
        ps[0]
    } else {
        let j = lo - 1;
        if dsign(j, 1.0) <= 0.0 {
            ps[j + 1]
        } else {
            let (mut ta, mut tb) = (0.0f64, 1.0f64);
            for _ in 0..60 {
                let tm = 0.5 * (ta + tb);
                if dsign(j, tm) < 0.0 {
                    ta = tm;
                } else {
                    tb = tm;
                }
            }
            let t = 0.5 * (ta + tb);
            ps[j] + (ps[j + 1] - ps[j]) * t
        }
    };
    let dist = ((ideal.u1 - point.u1).max(0.0).powf(p) + (ideal.u2 - point.u2).max(0.0).powf(p))
        .powf(1.0 / p);
    Ok(Solution::new(Method::YuLp(p), point).with("p", p).with("distance", dist))
}
