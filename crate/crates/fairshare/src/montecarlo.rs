//! Reflected random walks that estimate the harmonic-measure solution.
//!
//! A token starts at the disagreement point (the origin after normalization)
//! and takes tiny steps in uniformly random directions. Crossing the
//! absorbing part of the boundary ends the walk at the crossing point, whose
//! payoff under the `(|x|, |y|)` rule is the outcome; reflecting edges bounce
//! the overshoot back specularly. Averaging over many walkers gives an
//! estimator that is independent of the finite-difference route and agrees
//! with it up to sampling noise and O(step) bias.
//!
//! Determinism is part of the contract: every random draw is addressed by
//! (seed, walker, move), and aggregation is pairwise over the walker order,
//! so the result is a pure function of the configuration no matter how many
//! workers run the walkers.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{BargainingProblem, ConvexPolygon, GEOM_TOL};
use crate::payoff::Payoff;
use crate::rng::CounterStream;
use crate::solutions::{Method, Solution};

/// Walk parameters. `step` is in normalized units.
#[derive(Clone, Copy, Debug)]
pub struct WalkConfig {
    pub step: f64,
    pub walkers: usize,
    pub seed: u64,
    pub max_moves: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig { step: 0.01, walkers: 200_000, seed: 0, max_moves: 10_000_000 }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step <= 0.05) {
            return Err(Error::InvalidConfig(format!(
                "step {} outside (0, 0.05]",
                self.step
            )));
        }
        if self.walkers < 1 {
            return Err(Error::InvalidConfig("walker count must be at least 1".into()));
        }
        if self.max_moves < 1 {
            return Err(Error::InvalidConfig("move budget must be at least 1".into()));
        }
        Ok(())
    }
}

/// Radially symmetric step laws; all share the same mean squared displacement
/// per move, so they estimate the same limit.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StepLaw {
    /// Fixed length `step`, uniform direction.
    UniformAngle,
    /// Uniform direction, length scaled by |N(0,1)|.
    GaussianIsotropic,
    /// `±step` along a uniformly random axis.
    TwoPointAxis,
}

impl StepLaw {
    pub fn label(&self) -> &'static str {
        match self {
            StepLaw::UniformAngle => "uniform-angle",
            StepLaw::GaussianIsotropic => "gaussian-isotropic",
            StepLaw::TwoPointAxis => "two-point-axis",
        }
    }

    /// The displacement for move `mv`. Each move owns four counter slots so
    /// the laws stay aligned on the same addressing scheme.
    fn draw(&self, rng: &CounterStream, step: f64, mv: u64) -> Payoff {
        let base = mv * 4;
        match self {
            StepLaw::UniformAngle => {
                let (s, c) = rng.angle(base).sin_cos();
                Payoff::new(step * c, step * s)
            }
            StepLaw::GaussianIsotropic => {
                let (s, c) = rng.angle(base).sin_cos();
                let m = rng.normal(base + 1).abs();
                Payoff::new(step * m * c, step * m * s)
            }
            StepLaw::TwoPointAxis => {
                let axis = rng.u01(base) * std::f64::consts::PI;
                let sign = if rng.u01(base + 1) < 0.5 { -1.0 } else { 1.0 };
                let (s, c) = axis.sin_cos();
                Payoff::new(sign * step * c, sign * step * s)
            }
        }
    }
}

impl std::str::FromStr for StepLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<StepLaw> {
        match s {
            "uniform-angle" => Ok(StepLaw::UniformAngle),
            "gaussian-isotropic" => Ok(StepLaw::GaussianIsotropic),
            "two-point-axis" => Ok(StepLaw::TwoPointAxis),
            other => Err(Error::UnknownVariant(other.into())),
        }
    }
}

/// Where one walk ended.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkOutcome {
    /// Crossing point with the `(|x|, |y|)` payoff rule applied.
    pub absorbed_at: Payoff,
    pub moves: u64,
}

/// What an edge does to a walker that crosses it.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum EdgeRule {
    Absorb,
    Reflect,
}

/// Certified lower bounds on the distance to the boundary, sampled on a
/// lattice. Lets the walk take runs of moves with no boundary tests at all
/// while it is deep inside the region.
struct BudgetGrid {
    lo: Payoff,
    cell: f64,
    n: usize,
    vals: Vec<f64>,
    diag: f64,
}

impl BudgetGrid {
    fn build(polygon: &ConvexPolygon) -> BudgetGrid {
        let (lo, hi) = polygon.bbox();
        let n = 129;
        let cell = ((hi.u1 - lo.u1) / (n - 1) as f64).max((hi.u2 - lo.u2) / (n - 1) as f64);
        let verts = polygon.vertices();
        let m = verts.len();
        let mut vals = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                let p = Payoff::new(lo.u1 + i as f64 * cell, lo.u2 + j as f64 * cell);
                let mut d = f64::INFINITY;
                for k in 0..m {
                    d = d.min(seg_dist(p, verts[k], verts[(k + 1) % m]));
                }
                vals[j * n + i] = d;
            }
        }
        BudgetGrid { lo, cell, n, vals, diag: cell * std::f64::consts::SQRT_2 }
    }

    /// A distance the walker can certainly travel from `p` without touching
    /// the boundary (zero near it).
    fn lower_bound(&self, p: Payoff) -> f64 {
        let fx = ((p.u1 - self.lo.u1) / self.cell).clamp(0.0, (self.n - 2) as f64);
        let fy = ((p.u2 - self.lo.u2) / self.cell).clamp(0.0, (self.n - 2) as f64);
        let (i, j) = (fx as usize, fy as usize);
        let at = |a: usize, b: usize| self.vals[b * self.n + a];
        let m = at(i, j).min(at(i + 1, j)).min(at(i, j + 1)).min(at(i + 1, j + 1));
        (m - self.diag).max(0.0)
    }
}

fn seg_dist(p: Payoff, a: Payoff, b: Payoff) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 <= GEOM_TOL { 0.0 } else { ((p - a).dot(ab) / len2).clamp(0.0, 1.0) };
    p.dist(a + ab * t)
}

/// The region a walk lives in: a convex polygon with a rule per edge, plus
/// the acceleration structures the walk uses.
///
/// Both boundary treatments reduce to this. The symmetrized construction
/// walks the four-quadrant reflection of the feasible set with every edge
/// absorbing; the mixed construction walks the feasible set itself with the
/// strong Pareto chain absorbing and the rest reflecting.
pub struct WalkDomain {
    polygon: ConvexPolygon,
    rules: Vec<EdgeRule>,
    anchor: Payoff,
    /// Vertex angles around `anchor`, unwrapped to be increasing; the wedge
    /// between consecutive angles is ruled by exactly one edge.
    angles: Vec<f64>,
    budget: BudgetGrid,
}

impl WalkDomain {
    /// Four-quadrant reflected region of a normalized comprehensive problem;
    /// the entire outer boundary absorbs.
    pub fn symmetrized(problem: &BargainingProblem) -> Result<WalkDomain> {
        let polygon = problem.symmetrize()?;
        let rules = vec![EdgeRule::Absorb; polygon.vertices().len()];
        Ok(Self::assemble(polygon, rules))
    }

    /// The normalized feasible set itself: strictly decreasing edges absorb,
    /// everything else reflects. Weakly Pareto edges (at the top of either
    /// coordinate) absorb only when `weak_pareto_absorbs` is set.
    pub fn mixed(problem: &BargainingProblem, weak_pareto_absorbs: bool) -> Result<WalkDomain> {
        if !problem.is_normalized() {
            return Err(Error::NotNormalized);
        }
        let polygon = problem.feasible().clone();
        let verts = polygon.vertices();
        let m = verts.len();
        let (_, hi) = polygon.bbox();
        let rules = (0..m)
            .map(|i| {
                let (a, b) = (verts[i], verts[(i + 1) % m]);
                let d = b - a;
                let strong = d.u1 < -GEOM_TOL && d.u2 > GEOM_TOL;
                let weak_vertical = d.u1.abs() <= GEOM_TOL && (a.u1 - hi.u1).abs() <= 1e-9;
                let weak_horizontal = d.u2.abs() <= GEOM_TOL && (a.u2 - hi.u2).abs() <= 1e-9;
                if strong || (weak_pareto_absorbs && (weak_vertical || weak_horizontal)) {
                    EdgeRule::Absorb
                } else {
                    EdgeRule::Reflect
                }
            })
            .collect();
        Ok(Self::assemble(polygon, rules))
    }

    fn assemble(polygon: ConvexPolygon, rules: Vec<EdgeRule>) -> WalkDomain {
        let verts = polygon.vertices();
        let m = verts.len();
        let mut anchor = Payoff::new(0.0, 0.0);
        for v in verts {
            anchor = anchor + *v;
        }
        anchor = anchor * (1.0 / m as f64);
        let first = (verts[0] - anchor).u2.atan2((verts[0] - anchor).u1);
        let mut angles = Vec::with_capacity(m);
        let mut prev = first;
        for v in verts {
            let mut t = (v.u2 - anchor.u2).atan2(v.u1 - anchor.u1);
            while t < prev - 1e-12 {
                t += std::f64::consts::TAU;
            }
            angles.push(t);
            prev = t;
        }
        let budget = BudgetGrid::build(&polygon);
        WalkDomain { polygon, rules, anchor, angles, budget }
    }

    pub fn polygon(&self) -> &ConvexPolygon {
        &self.polygon
    }

    /// Index of the edge whose wedge (seen from the anchor) contains `p`.
    fn wedge(&self, p: Payoff) -> usize {
        let mut t = (p.u2 - self.anchor.u2).atan2(p.u1 - self.anchor.u1);
        let first = self.angles[0];
        while t < first {
            t += std::f64::consts::TAU;
        }
        while t >= first + std::f64::consts::TAU {
            t -= std::f64::consts::TAU;
        }
        let k = self.angles.partition_point(|&a| a <= t);
        (k + self.angles.len() - 1) % self.angles.len()
    }

    /// Signed distance factor to the wedge edge: negative means outside.
    fn wedge_slack(&self, p: Payoff) -> f64 {
        let verts = self.polygon.vertices();
        let m = verts.len();
        let e = self.wedge(p);
        let (a, b) = (verts[e], verts[(e + 1) % m]);
        cross(b - a, p - a)
    }

    fn inside(&self, p: Payoff) -> bool {
        self.wedge_slack(p) >= 0.0
    }

    /// Earliest crossing of the segment `from -> to` with the boundary,
    /// as (edge, parameter, point). `from` must not be strictly outside.
    fn exit(&self, from: Payoff, to: Payoff) -> Option<(usize, Payoff)> {
        let verts = self.polygon.vertices();
        let m = verts.len();
        let mut best: Option<(f64, usize)> = None;
        for e in 0..m {
            let (a, b) = (verts[e], verts[(e + 1) % m]);
            let ed = b - a;
            let sa = cross(ed, from - a);
            let sb = cross(ed, to - a);
            if sa >= 0.0 && sb < 0.0 {
                let t = sa / (sa - sb);
                let hit = from + (to - from) * t;
                // The crossing must happen within the edge's extent.
                let along = (hit - a).dot(ed) / ed.dot(ed);
                if (-1e-9..=1.0 + 1e-9).contains(&along)
                    && best.map_or(true, |(bt, _)| t < bt)
                {
                    best = Some((t, e));
                }
            }
        }
        best.map(|(t, e)| (e, from + (to - from) * t))
    }

    /// Reflects `p` across the line of edge `e`.
    fn mirror(&self, e: usize, p: Payoff) -> Payoff {
        let h = &self.polygon.halfplanes()[e];
        let d = h.n.dot(p) - h.offset;
        p - h.n * (2.0 * d)
    }

    fn touches_absorbing(&self, p: Payoff, tol: f64) -> bool {
        let verts = self.polygon.vertices();
        let m = verts.len();
        (0..m).any(|e| {
            self.rules[e] == EdgeRule::Absorb && seg_dist(p, verts[e], verts[(e + 1) % m]) <= tol
        })
    }
}

fn cross(a: Payoff, b: Payoff) -> f64 {
    a.u1 * b.u2 - a.u2 * b.u1
}

fn fold(p: Payoff) -> Payoff {
    Payoff::new(p.u1.abs(), p.u2.abs())
}

/// Runs one walker to absorption. Draw `mv` of walker `w` is addressed by
/// counter slots `4*mv..` of stream `w`, so outcomes are reproducible
/// independent of scheduling.
pub fn walk_once(
    domain: &WalkDomain,
    start: Payoff,
    config: &WalkConfig,
    walker: u64,
) -> Result<WalkOutcome> {
    walk_law(domain, start, config, walker, StepLaw::UniformAngle)
}

fn walk_law(
    domain: &WalkDomain,
    start: Payoff,
    config: &WalkConfig,
    walker: u64,
    law: StepLaw,
) -> Result<WalkOutcome> {
    config.validate()?;
    // A start outside the region or already on absorbing boundary is a
    // configuration error. Touching a reflecting edge is fine: the first
    // bounce handles it.
    if domain.wedge_slack(start) < -GEOM_TOL || domain.touches_absorbing(start, GEOM_TOL) {
        return Err(Error::BoundaryStart);
    }
    let rng = CounterStream::new(config.seed, walker);
    let step = config.step;
    let mut p = start;
    let mut mv = 0u64;
    loop {
        if mv >= config.max_moves {
            return Err(Error::MaxMovesExceeded { walker });
        }
        let lb = domain.budget.lower_bound(p);
        if lb > 2.5 * step {
            // Deep inside: burn through moves with no boundary tests. A draw
            // that would overrun the certified budget is left to the careful
            // path, which re-reads the same slots.
            let mut rem = lb;
            let mut advanced = false;
            while mv < config.max_moves {
                let d = law.draw(&rng, step, mv);
                if d.norm() >= rem - 1e-12 {
                    break;
                }
                p = p + d;
                rem -= d.norm();
                mv += 1;
                advanced = true;
            }
            if advanced {
                continue;
            }
            // An oversized first draw would re-trip forever; hand it to the
            // careful path below instead.
        }
        let d = law.draw(&rng, step, mv);
        mv += 1;
        let q = p + d;
        if domain.inside(q) {
            p = q;
            continue;
        }
        // The segment leaves the region: absorb or bounce, possibly more
        // than once near a corner.
        let mut cur = p;
        let mut target = q;
        let mut bounces = 0;
        loop {
            let Some((e, hit)) = domain.exit(cur, target) else {
                p = target;
                break;
            };
            if domain.rules[e] == EdgeRule::Absorb {
                return Ok(WalkOutcome { absorbed_at: fold(hit), moves: mv });
            }
            bounces += 1;
            if bounces > 100 {
                p = hit;
                break;
            }
            target = domain.mirror(e, target);
            cur = hit;
            if domain.inside(target) {
                p = target;
                break;
            }
        }
    }
}

struct Tally {
    sum: Payoff,
    sq: Payoff,
    moves: f64,
}

/// Pairwise summation over the walker order; the grouping is fixed by the
/// index range, not by scheduling.
fn tally(outcomes: &[WalkOutcome]) -> Tally {
    if outcomes.len() <= 32 {
        let mut t = Tally {
            sum: Payoff::new(0.0, 0.0),
            sq: Payoff::new(0.0, 0.0),
            moves: 0.0,
        };
        for o in outcomes {
            t.sum = t.sum + o.absorbed_at;
            t.sq = t.sq
                + Payoff::new(
                    o.absorbed_at.u1 * o.absorbed_at.u1,
                    o.absorbed_at.u2 * o.absorbed_at.u2,
                );
            t.moves += o.moves as f64;
        }
        return t;
    }
    let mid = outcomes.len() / 2;
    let (a, b) = (tally(&outcomes[..mid]), tally(&outcomes[mid..]));
    Tally { sum: a.sum + b.sum, sq: a.sq + b.sq, moves: a.moves + b.moves }
}

fn run_walkers(
    domain: &WalkDomain,
    start: Payoff,
    config: &WalkConfig,
    law: StepLaw,
) -> Result<Vec<WalkOutcome>> {
    (0..config.walkers as u64)
        .into_par_iter()
        .map(|w| walk_law(domain, start, config, w, law))
        .collect()
}

fn estimate_with_law(
    problem: &BargainingProblem,
    config: &WalkConfig,
    law: StepLaw,
) -> Result<Solution> {
    estimate_in(problem, config, law, None)
}

fn estimate_in(
    problem: &BargainingProblem,
    config: &WalkConfig,
    law: StepLaw,
    force_mixed: Option<bool>,
) -> Result<Solution> {
    config.validate()?;
    let ir = problem.ir_slice()?;
    let (norm, map) = ir.normalize()?;
    let domain = match force_mixed {
        Some(weak) => WalkDomain::mixed(&norm, weak)?,
        None if norm.is_comprehensive() => WalkDomain::symmetrized(&norm)?,
        None => WalkDomain::mixed(&norm, false)?,
    };
    let outcomes = run_walkers(&domain, Payoff::new(0.0, 0.0), config, law)?;
    let n = outcomes.len() as f64;
    let t = tally(&outcomes);
    let mean = t.sum * (1.0 / n);
    let var = |sum: f64, sq: f64| ((sq - sum * sum / n) / (n - 1.0).max(1.0)).max(0.0);
    let se1 = (var(t.sum.u1, t.sq.u1) / n).sqrt();
    let se2 = (var(t.sum.u2, t.sq.u2) / n).sqrt();
    Ok(Solution::new(Method::HarmonicDeltaMc, map.apply(mean))
        .with("step", config.step)
        .with("walkers", n)
        .with("stderr1", se1 * map.a1)
        .with("stderr2", se2 * map.a2)
        .with("mean-moves", t.moves / n))
}

/// Monte Carlo estimate of the harmonic-measure solution: normalize,
/// symmetrize, start every walker at the origin, average the absorbed
/// payoffs, and map back. Standard errors per coordinate ride along in the
/// diagnostics. Problems that cannot be symmetrized fall back to the mixed
/// walk on the feasible set.
pub fn estimate_s_delta_mc(problem: &BargainingProblem, config: &WalkConfig) -> Result<Solution> {
    estimate_with_law(problem, config, StepLaw::UniformAngle)
}

/// The individual absorption records behind [`estimate_s_delta_mc`], in
/// walker order and in the problem's original coordinates. Same walks, same
/// seed discipline; the estimate is the mean of these rows.
pub fn walker_outcomes(
    problem: &BargainingProblem,
    config: &WalkConfig,
) -> Result<Vec<WalkOutcome>> {
    config.validate()?;
    let ir = problem.ir_slice()?;
    let (norm, map) = ir.normalize()?;
    let symmetric = norm.is_comprehensive();
    let domain = if symmetric {
        WalkDomain::symmetrized(&norm)?
    } else {
        WalkDomain::mixed(&norm, false)?
    };
    let outcomes =
        run_walkers(&domain, Payoff::new(0.0, 0.0), config, StepLaw::UniformAngle)?;
    Ok(outcomes
        .into_iter()
        .map(|o| {
            let at = if symmetric { fold(o.absorbed_at) } else { o.absorbed_at };
            WalkOutcome { absorbed_at: map.apply(at), moves: o.moves }
        })
        .collect())
}

/// Same estimator under a different radially symmetric step law; all laws
/// agree in the limit, which makes this a consistency probe.
pub fn step_distribution_variant(
    problem: &BargainingProblem,
    config: &WalkConfig,
    variant: StepLaw,
) -> Result<Solution> {
    estimate_with_law(problem, config, variant)
}

/// Estimator on the feasible set itself rather than the symmetrized region,
/// with only the strictly decreasing boundary absorbing. The flag also makes
/// weakly Pareto edges absorb, mirroring the matching finite-difference
/// switch.
pub fn estimate_s_delta_mc_mixed(
    problem: &BargainingProblem,
    config: &WalkConfig,
    weak_pareto_absorbs: bool,
) -> Result<Solution> {
    estimate_in(problem, config, StepLaw::UniformAngle, Some(weak_pareto_absorbs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{preset_problem, Preset, DEFAULT_PRESET_SEGMENTS};

    fn triangle_domain() -> WalkDomain {
        let prob =
            preset_problem(Preset::Triangle, DEFAULT_PRESET_SEGMENTS, Payoff::new(0.0, 0.0))
                .unwrap();
        WalkDomain::symmetrized(&prob).unwrap()
    }

    fn quick(walkers: usize, step: f64, seed: u64) -> WalkConfig {
        WalkConfig { step, walkers, seed, ..WalkConfig::default() }
    }

    #[test]
    fn config_bounds_are_enforced() {
        assert!(WalkConfig { step: 0.06, ..WalkConfig::default() }.validate().is_err());
        assert!(WalkConfig { step: 0.0, ..WalkConfig::default() }.validate().is_err());
        assert!(WalkConfig { walkers: 0, ..WalkConfig::default() }.validate().is_err());
        assert!(WalkConfig::default().validate().is_ok());
        assert!(matches!("spiral".parse::<StepLaw>(), Err(Error::UnknownVariant(_))));
        assert_eq!("two-point-axis".parse::<StepLaw>().unwrap(), StepLaw::TwoPointAxis);
    }

    #[test]
    fn starting_on_the_boundary_is_refused() {
        let dom = triangle_domain();
        let cfg = quick(1, 0.01, 7);
        assert!(matches!(
            walk_once(&dom, Payoff::new(0.5, 0.5), &cfg, 0),
            Err(Error::BoundaryStart)
        ));
        assert!(walk_once(&dom, Payoff::new(0.0, 0.0), &cfg, 0).is_ok());
    }

    #[test]
    fn outward_first_step_absorbs_in_one_move() {
        let dom = triangle_domain();
        let cfg = quick(1, 0.01, 0);
        // Start half a step from the hypotenuse and scan seeds until the
        // first draw points outward along its normal.
        let start = Payoff::new(0.5 - 0.0025 * std::f64::consts::FRAC_1_SQRT_2, 0.5 - 0.0025 * std::f64::consts::FRAC_1_SQRT_2);
        for seed in 0..2000u64 {
            let rng = CounterStream::new(seed, 0);
            let theta = rng.angle(0);
            if (theta - std::f64::consts::FRAC_PI_4).abs() < 0.2 {
                let out = walk_once(&dom, start, &WalkConfig { seed, ..cfg }, 0).unwrap();
                assert_eq!(out.moves, 1);
                assert!((out.absorbed_at.u1 + out.absorbed_at.u2 - 1.0).abs() < 1e-9);
                return;
            }
        }
        panic!("no outward seed found");
    }

    #[test]
    fn identical_keys_give_identical_outcomes() {
        let dom = triangle_domain();
        let cfg = quick(1, 0.01, 42);
        let a = walk_once(&dom, Payoff::new(0.1, 0.0), &cfg, 3).unwrap();
        let b = walk_once(&dom, Payoff::new(0.1, 0.0), &cfg, 3).unwrap();
        assert_eq!(a.absorbed_at.u1.to_bits(), b.absorbed_at.u1.to_bits());
        assert_eq!(a.absorbed_at.u2.to_bits(), b.absorbed_at.u2.to_bits());
        assert_eq!(a.moves, b.moves);
        let c = walk_once(&dom, Payoff::new(0.1, 0.0), &cfg, 4).unwrap();
        assert!(a.absorbed_at.u1.to_bits() != c.absorbed_at.u1.to_bits() || a.moves != c.moves);
    }

    #[test]
    fn absorbed_points_lie_on_the_boundary() {
        let dom = triangle_domain();
        let cfg = quick(1, 0.02, 11);
        for w in 0..200 {
            let out = walk_once(&dom, Payoff::new(0.0, 0.0), &cfg, w).unwrap();
            // The symmetrized triangle boundary is |x| + |y| = 1.
            assert!(
                (out.absorbed_at.u1 + out.absorbed_at.u2 - 1.0).abs() < 1e-9,
                "walker {w} off the boundary at {}",
                out.absorbed_at
            );
            assert!(out.absorbed_at.u1 >= 0.0 && out.absorbed_at.u2 >= 0.0);
        }
    }

    #[test]
    fn triangle_estimate_is_centered() {
        let prob =
            preset_problem(Preset::Triangle, DEFAULT_PRESET_SEGMENTS, Payoff::new(0.0, 0.0))
                .unwrap();
        let sol = estimate_s_delta_mc(&prob, &quick(20_000, 0.02, 5)).unwrap();
        let (se1, se2) = (sol.diagnostics["stderr1"], sol.diagnostics["stderr2"]);
        assert!((sol.payoff.u1 - 0.5).abs() <= 3.0 * se1, "{} vs 0.5", sol.payoff.u1);
        assert!((sol.payoff.u2 - 0.5).abs() <= 3.0 * se2, "{} vs 0.5", sol.payoff.u2);
    }

    #[test]
    fn estimates_are_reproducible_bit_for_bit() {
        let prob =
            preset_problem(Preset::Trapezoid, DEFAULT_PRESET_SEGMENTS, Payoff::new(0.0, 0.0))
                .unwrap();
        let a = estimate_s_delta_mc(&prob, &quick(2_000, 0.02, 9)).unwrap();
        let b = estimate_s_delta_mc(&prob, &quick(2_000, 0.02, 9)).unwrap();
        assert_eq!(a.payoff.u1.to_bits(), b.payoff.u1.to_bits());
        assert_eq!(a.payoff.u2.to_bits(), b.payoff.u2.to_bits());
    }

    #[test]
    fn step_laws_agree_within_noise() {
        let prob =
            preset_problem(Preset::Trapezoid, DEFAULT_PRESET_SEGMENTS, Payoff::new(0.0, 0.0))
                .unwrap();
        let base = estimate_s_delta_mc(&prob, &quick(20_000, 0.02, 1)).unwrap();
        for law in [StepLaw::GaussianIsotropic, StepLaw::TwoPointAxis] {
            let alt = step_distribution_variant(&prob, &quick(20_000, 0.02, 2), law).unwrap();
            for (d, k1, k2) in [
                (base.payoff.u1 - alt.payoff.u1, "stderr1", "stderr1"),
                (base.payoff.u2 - alt.payoff.u2, "stderr2", "stderr2"),
            ] {
                let band = 3.0
                    * (base.diagnostics[k1] * base.diagnostics[k1]
                        + alt.diagnostics[k2] * alt.diagnostics[k2])
                        .sqrt();
                assert!(d.abs() <= band + 0.02 * 0.5, "{:?}: {d} vs {band}", law);
            }
        }
    }

    #[test]
    fn mixed_walk_matches_the_symmetrized_one() {
        // Reflection on the axes is the same dynamics as walking the
        // reflected region, so the two constructions must agree.
        let prob =
            preset_problem(Preset::Triangle, DEFAULT_PRESET_SEGMENTS, Payoff::new(0.0, 0.0))
                .unwrap();
        let dom_mixed = WalkDomain::mixed(&prob, false).unwrap();
        let cfg = quick(20_000, 0.02, 3);
        let outcomes = run_walkers(&dom_mixed, Payoff::new(0.0, 0.0), &cfg, StepLaw::UniformAngle)
            .unwrap();
        let t = tally(&outcomes);
        let mean = t.sum * (1.0 / outcomes.len() as f64);
        let sym = estimate_s_delta_mc(&prob, &cfg).unwrap();
        let se = sol_band(&sym);
        assert!((mean.u1 - sym.payoff.u1).abs() <= 3.0 * se + 1e-3);
        assert!((mean.u2 - sym.payoff.u2).abs() <= 3.0 * se + 1e-3);
    }

    fn sol_band(s: &Solution) -> f64 {
        s.diagnostics["stderr1"].hypot(s.diagnostics["stderr2"])
    }

    #[test]
    fn tiny_move_budget_trips_the_guard() {
        let prob =
            preset_problem(Preset::Triangle, DEFAULT_PRESET_SEGMENTS, Payoff::new(0.0, 0.0))
                .unwrap();
        let cfg = WalkConfig { step: 0.001, walkers: 1, seed: 0, max_moves: 50 };
        let err = estimate_s_delta_mc(&prob, &cfg).unwrap_err();
        assert!(matches!(err, Error::MaxMovesExceeded { .. }));
    }
}
