//! Harmonic payoff fields over the feasible set and the solution they induce.
//!
//! Each player gets a field that is harmonic inside the region and equals that
//! player's coordinate on the absorbing part of the boundary. Reading both
//! fields at the disagreement point (the origin, after normalization) gives
//! the expected payoff of a diffusing token and defines the delta solution.
//!
//! Two boundary treatments are supported. The default reflects the feasible
//! set across both axes and absorbs on the entire outer boundary with payoff
//! `(|x|, |y|)`; by symmetry the solve runs on the first-quadrant part with
//! mirror conditions on the axes. The mixed variant solves on the feasible set
//! directly, absorbing only on the strong Pareto chain (optionally also on
//! weakly Pareto edges) and reflecting elsewhere.

mod solver;

use crate::error::{Error, Result};
use crate::geometry::{BargainingProblem, ConvexPolygon, GEOM_TOL};
use crate::payoff::Payoff;
use crate::solutions::{Method, Solution};

use solver::EdgeKind;

/// Lattice spacing plus an integer-aligned node range. Node `(i, j)` sits at
/// `((ix0 + i) * h, (iy0 + j) * h)`, so the axes always pass through grid
/// lines exactly.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    h: f64,
    ix0: i64,
    iy0: i64,
    nx: usize,
    ny: usize,
}

impl GridSpec {
    /// A grid covering `domain` with one extra cell of margin on every side.
    /// Spacing must lie in `(0, 0.1]`.
    pub fn cover(domain: &ConvexPolygon, h: f64) -> Result<GridSpec> {
        Self::check_h(h)?;
        let (lo, hi) = domain.bbox();
        let ix0 = (lo.u1 / h).floor() as i64 - 1;
        let iy0 = (lo.u2 / h).floor() as i64 - 1;
        let ix1 = (hi.u1 / h).ceil() as i64 + 1;
        let iy1 = (hi.u2 / h).ceil() as i64 + 1;
        Ok(GridSpec {
            h,
            ix0,
            iy0,
            nx: (ix1 - ix0 + 1) as usize,
            ny: (iy1 - iy0 + 1) as usize,
        })
    }

    /// A grid covering `[-1, 1]^2` with margin: enough for any normalized
    /// comprehensive problem and its reflections.
    pub fn with_resolution(h: f64) -> Result<GridSpec> {
        Self::check_h(h)?;
        let n = (1.0 / h).ceil() as i64 + 1;
        Ok(GridSpec {
            h,
            ix0: -n,
            iy0: -n,
            nx: (2 * n + 1) as usize,
            ny: (2 * n + 1) as usize,
        })
    }

    fn check_h(h: f64) -> Result<()> {
        if !(h > 0.0 && h <= 0.1) {
            return Err(Error::InvalidConfig(format!(
                "grid spacing {h} outside (0, 0.1]"
            )));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Lower corner of the node range.
    pub fn lo(&self) -> Payoff {
        Payoff::new(self.x(0), self.y(0))
    }

    /// Upper corner of the node range.
    pub fn hi(&self) -> Payoff {
        Payoff::new(self.x(self.nx - 1), self.y(self.ny - 1))
    }

    pub(crate) fn x(&self, i: usize) -> f64 {
        (self.ix0 + i as i64) as f64 * self.h
    }

    pub(crate) fn y(&self, j: usize) -> f64 {
        (self.iy0 + j as i64) as f64 * self.h
    }

    /// Global (signed) lattice index of column `i`; column 0 of the lattice
    /// is the y-axis.
    pub(crate) fn gx(&self, i: usize) -> i64 {
        self.ix0 + i as i64
    }

    pub(crate) fn gy(&self, j: usize) -> i64 {
        self.iy0 + j as i64
    }
}

/// Role of a lattice node in the discretization.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NodeKind {
    /// Outside the solve region; carries no value.
    Exterior,
    /// Unknown updated by relaxation.
    Interior,
    /// Pinned to the absorbing boundary data.
    Dirichlet,
}

/// Boundary treatment for [`solve_harmonic`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SolveMode {
    /// Reflect the feasible set across both axes and absorb on the whole
    /// outer boundary with payoff `(|x|, |y|)`.
    Symmetrized,
    /// Solve on the feasible set itself: absorb on the strong Pareto chain,
    /// reflect elsewhere. Weakly Pareto edges absorb only when asked to.
    MixedBc { weak_pareto_absorbs: bool },
}

impl SolveMode {
    pub fn label(&self) -> &'static str {
        match self {
            SolveMode::Symmetrized => "symmetrized",
            SolveMode::MixedBc { .. } => "mixed-bc",
        }
    }
}

impl std::str::FromStr for SolveMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<SolveMode> {
        match s {
            "symmetrized" => Ok(SolveMode::Symmetrized),
            "mixed-bc" => Ok(SolveMode::MixedBc { weak_pareto_absorbs: false }),
            other => Err(Error::InvalidConfig(format!("unknown solve mode `{other}`"))),
        }
    }
}

/// One player's payoff field on a lattice clipped to the solve region.
///
/// Fields produced by the symmetrized mode store only the first-quadrant part
/// and evaluate everywhere else through the even reflection `(|x|, |y|)`.
#[derive(Clone, Debug)]
pub struct HarmonicField {
    spec: GridSpec,
    domain: ConvexPolygon,
    fold: bool,
    kinds: Vec<NodeKind>,
    values: Vec<f64>,
    data_range: (f64, f64),
    sweeps: u64,
    residual: f64,
}

impl HarmonicField {
    /// Samples `f` at every node inside `domain`. Handy for checking the
    /// evaluator and the mean-value diagnostics against known functions.
    pub fn from_fn(
        domain: &ConvexPolygon,
        h: f64,
        f: impl Fn(Payoff) -> f64,
    ) -> Result<HarmonicField> {
        let spec = GridSpec::cover(domain, h)?;
        let total = spec.nx * spec.ny;
        let mut kinds = vec![NodeKind::Exterior; total];
        let mut values = vec![0.0; total];
        let mut range = (f64::INFINITY, f64::NEG_INFINITY);
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                let p = Payoff::new(spec.x(i), spec.y(j));
                if domain.contains(p) {
                    let v = f(p);
                    kinds[j * spec.nx + i] = NodeKind::Interior;
                    values[j * spec.nx + i] = v;
                    range = (range.0.min(v), range.1.max(v));
                }
            }
        }
        Ok(HarmonicField {
            spec,
            domain: domain.clone(),
            fold: false,
            kinds,
            values,
            data_range: range,
            sweeps: 0,
            residual: 0.0,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        self.spec_ref()
    }

    fn spec_ref(&self) -> &GridSpec {
        &self.spec
    }

    /// Region the field is defined on (the full symmetrized polygon for
    /// folded fields).
    pub fn domain(&self) -> &ConvexPolygon {
        &self.domain
    }

    pub fn kind_at(&self, i: usize, j: usize) -> NodeKind {
        self.kinds[j * self.spec.nx + i]
    }

    pub fn value_at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.nx + i]
    }

    /// Relaxation sweeps spent on this field.
    pub fn sweeps(&self) -> u64 {
        self.sweeps
    }

    /// Final diagonal-normalized residual in the max norm.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Range of the absorbing boundary data seen during assembly.
    pub fn data_range(&self) -> (f64, f64) {
        self.data_range
    }

    /// Range of the stored values over non-exterior nodes.
    pub fn value_range(&self) -> (f64, f64) {
        let mut r = (f64::INFINITY, f64::NEG_INFINITY);
        for (k, &v) in self.values.iter().enumerate() {
            if self.kinds[k] != NodeKind::Exterior {
                r = (r.0.min(v), r.1.max(v));
            }
        }
        r
    }

    fn node(&self, gi: i64, gj: i64) -> Option<f64> {
        let (gi, gj) = if self.fold { (gi.abs(), gj.abs()) } else { (gi, gj) };
        let i = gi - self.spec.ix0;
        let j = gj - self.spec.iy0;
        if i < 0 || j < 0 || i as usize >= self.spec.nx || j as usize >= self.spec.ny {
            return None;
        }
        let at = j as usize * self.spec.nx + i as usize;
        (self.kinds[at] != NodeKind::Exterior).then(|| self.values[at])
    }

    /// Bilinear interpolation. Cells with some exterior corners renormalize
    /// over the covered ones, so values near the boundary stay usable.
    pub fn eval(&self, p: Payoff) -> f64 {
        let q = if self.fold { p.abs() } else { p };
        let h = self.spec.h;
        let fx = (q.u1 / h - self.spec.ix0 as f64).clamp(0.0, (self.spec.nx - 1) as f64);
        let fy = (q.u2 / h - self.spec.iy0 as f64).clamp(0.0, (self.spec.ny - 1) as f64);
        let i = (fx.floor() as usize).min(self.spec.nx - 2);
        let j = (fy.floor() as usize).min(self.spec.ny - 2);
        let tx = fx - i as f64;
        let ty = fy - j as f64;
        let gi = self.spec.ix0 + i as i64;
        let gj = self.spec.iy0 + j as i64;
        let corners = [
            (self.node(gi, gj), (1.0 - tx) * (1.0 - ty)),
            (self.node(gi + 1, gj), tx * (1.0 - ty)),
            (self.node(gi, gj + 1), (1.0 - tx) * ty),
            (self.node(gi + 1, gj + 1), tx * ty),
        ];
        let mut acc = 0.0;
        let mut wsum = 0.0;
        for (v, w) in corners {
            if let Some(v) = v {
                acc += w * v;
                wsum += w;
            }
        }
        if wsum > 0.0 {
            acc / wsum
        } else {
            0.0
        }
    }

    /// Catmull-Rom interpolation over a 4x4 node block; falls back to
    /// [`eval`](Self::eval) wherever the block leaves the covered region.
    pub fn eval_bicubic(&self, p: Payoff) -> f64 {
        let q = if self.fold { p.abs() } else { p };
        let h = self.spec.h;
        let fx = q.u1 / h - self.spec.ix0 as f64;
        let fy = q.u2 / h - self.spec.iy0 as f64;
        let i = fx.floor() as i64;
        let j = fy.floor() as i64;
        let tx = fx - i as f64;
        let ty = fy - j as f64;
        let gi = self.spec.ix0 + i;
        let gj = self.spec.iy0 + j;
        let mut rows = [0.0; 4];
        for (r, row) in rows.iter_mut().enumerate() {
            let mut vals = [0.0; 4];
            for (c, val) in vals.iter_mut().enumerate() {
                match self.node(gi + c as i64 - 1, gj + r as i64 - 1) {
                    Some(v) => *val = v,
                    None => return self.eval(p),
                }
            }
            *row = catmull_rom(vals, tx);
        }
        catmull_rom(rows, ty)
    }
}

fn catmull_rom(f: [f64; 4], t: f64) -> f64 {
    0.5 * (2.0 * f[1]
        + t * ((f[2] - f[0])
            + t * ((2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3])
                + t * (3.0 * (f[1] - f[2]) + f[3] - f[0]))))
}

fn classify_symmetrized(q1: &ConvexPolygon) -> Vec<EdgeKind> {
    let verts = q1.vertices();
    let m = verts.len();
    (0..m)
        .map(|i| {
            let (a, b) = (verts[i], verts[(i + 1) % m]);
            let on_x_axis = a.u2.abs() <= 1e-9 && b.u2.abs() <= 1e-9;
            let on_y_axis = a.u1.abs() <= 1e-9 && b.u1.abs() <= 1e-9;
            if on_x_axis || on_y_axis {
                EdgeKind::Reflect
            } else {
                EdgeKind::Absorb
            }
        })
        .collect()
}

fn classify_mixed(feasible: &ConvexPolygon, weak_pareto_absorbs: bool) -> Vec<EdgeKind> {
    let (_, hi) = feasible.bbox();
    let verts = feasible.vertices();
    let m = verts.len();
    (0..m)
        .map(|i| {
            let (a, b) = (verts[i], verts[(i + 1) % m]);
            let d = b - a;
            let strong = d.u1 < -GEOM_TOL && d.u2 > GEOM_TOL;
            let weak_vertical = d.u1.abs() <= GEOM_TOL && (a.u1 - hi.u1).abs() <= 1e-9;
            let weak_horizontal = d.u2.abs() <= GEOM_TOL && (a.u2 - hi.u2).abs() <= 1e-9;
            if strong || (weak_pareto_absorbs && (weak_vertical || weak_horizontal)) {
                EdgeKind::Absorb
            } else {
                EdgeKind::Reflect
            }
        })
        .collect()
}

/// Cascade of spacings, coarse to fine, used to seed the fine solve.
fn cascade(h: f64) -> Vec<f64> {
    let mut hs = vec![h];
    while hs.len() < 3 {
        let next = hs.last().unwrap() * 2.0;
        if next > 0.05 + 1e-12 {
            break;
        }
        hs.push(next);
    }
    hs.reverse();
    hs
}

/// Solves the two payoff fields of a normalized problem on `spec`'s lattice.
///
/// The grid must cover the solve region (the first-quadrant part under
/// [`SolveMode::Symmetrized`], the whole feasible set under mixed conditions).
/// Returns the fields for player 1 and player 2.
pub fn solve_harmonic(
    problem: &BargainingProblem,
    spec: &GridSpec,
    mode: SolveMode,
) -> Result<(HarmonicField, HarmonicField)> {
    if !problem.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let feasible = problem.feasible();
    let (solve_dom, eval_dom, fold, edge_kinds) = match mode {
        SolveMode::Symmetrized => {
            let eval_dom = problem.symmetrize()?;
            let q1 = feasible
                .clip(Payoff::new(1.0, 0.0), 0.0)
                .and_then(|p| p.clip(Payoff::new(0.0, 1.0), 0.0))
                .ok_or(Error::DegenerateSet)?;
            let kinds = classify_symmetrized(&q1);
            (q1, eval_dom, true, kinds)
        }
        SolveMode::MixedBc { weak_pareto_absorbs } => {
            let kinds = classify_mixed(feasible, weak_pareto_absorbs);
            (feasible.clone(), feasible.clone(), false, kinds)
        }
    };

    let (lo, hi) = solve_dom.bbox();
    let tol = 1e-9;
    if spec.lo().u1 > lo.u1 + tol
        || spec.lo().u2 > lo.u2 + tol
        || spec.hi().u1 < hi.u1 - tol
        || spec.hi().u2 < hi.u2 - tol
    {
        return Err(Error::InvalidConfig(
            "grid does not cover the solve region".into(),
        ));
    }

    let levels = cascade(spec.h);
    let mut fields: Option<(HarmonicField, HarmonicField)> = None;
    for (k, &h_level) in levels.iter().enumerate() {
        let last = k == levels.len() - 1;
        let lspec = if last {
            *spec
        } else {
            GridSpec::cover(&solve_dom, h_level)?
        };
        let mut disc = solver::build(&solve_dom, &edge_kinds, &lspec)?;
        if let Some((p1, p2)) = &fields {
            for j in 0..lspec.ny {
                for i in 0..lspec.nx {
                    let at = j * lspec.nx + i;
                    if disc.kinds[at] == NodeKind::Interior {
                        let p = Payoff::new(lspec.x(i), lspec.y(j));
                        disc.v1[at] = p1.eval(p);
                        disc.v2[at] = p2.eval(p);
                    }
                }
            }
        }
        let stats = solver::relax(&mut disc)?;
        let mk = |values: Vec<f64>, data_range, kinds: Vec<NodeKind>| HarmonicField {
            spec: lspec,
            domain: eval_dom.clone(),
            fold,
            kinds,
            values,
            data_range,
            sweeps: stats.sweeps,
            residual: stats.residual,
        };
        let kinds2 = disc.kinds.clone();
        fields = Some((
            mk(disc.v1, disc.g1_range, disc.kinds),
            mk(disc.v2, disc.g2_range, kinds2),
        ));
    }
    Ok(fields.expect("at least one cascade level"))
}

/// How far `field` is from its own average on the circle of radius `r`
/// around `p`, using 32-point trapezoidal quadrature and bilinear reads.
/// Discrete harmonic fields should make this small; curvature shows up
/// directly. Requires `r >= 4h` and the disk (plus an interpolation margin
/// of `2h`) inside the field's domain.
pub fn mean_value_residual(field: &HarmonicField, p: Payoff, r: f64) -> Result<f64> {
    let h = field.spec.h;
    if !(r >= 4.0 * h) {
        return Err(Error::InvalidConfig(format!(
            "radius {r} below four grid cells"
        )));
    }
    if !field.domain.contains(p) || field.domain.boundary_distance(p) < r + 2.0 * h {
        return Err(Error::DiskOutsideDomain);
    }
    let n = 32;
    let mut acc = 0.0;
    for k in 0..n {
        let t = std::f64::consts::TAU * k as f64 / n as f64;
        acc += field.eval(p + Payoff::new(r * t.cos(), r * t.sin()));
    }
    Ok((acc / n as f64 - field.eval(p)).abs())
}

/// The harmonic-measure solution: restrict to the rational part, normalize,
/// solve the two fields, read them at the origin, and map back.
///
/// Comprehensive problems use the symmetrized construction; the rest fall
/// back to mixed conditions on the feasible set itself.
pub fn s_delta(problem: &BargainingProblem, spec: &GridSpec) -> Result<Solution> {
    let ir = problem.ir_slice()?;
    let (norm, map) = ir.normalize()?;
    let mode = if norm.is_comprehensive() {
        SolveMode::Symmetrized
    } else {
        SolveMode::MixedBc { weak_pareto_absorbs: false }
    };
    let tight = GridSpec::cover(norm.feasible(), spec.h())?;
    let (f1, f2) = solve_harmonic(&norm, &tight, mode)?;
    let origin = Payoff::new(0.0, 0.0);
    let at = Payoff::new(f1.eval(origin), f2.eval(origin));
    Ok(Solution::new(Method::HarmonicDelta, map.apply(at))
        .with("h", spec.h())
        .with("residual", f1.residual())
        .with("sweeps", f1.sweeps() as f64))
}

/// Re-solves with the previous answer as the disagreement point until the
/// step drops below `tol` (at most 200 rounds). Returns the limit, projected
/// onto the Pareto chain when it lands within two grid cells of it, plus the
/// full iterate trace.
///
/// When an iterate reaches the frontier the next normalization degenerates;
/// the walk then stops where it stands and that point is the answer.
pub fn iterate_s_delta(
    problem: &BargainingProblem,
    tol: f64,
) -> Result<(Solution, Vec<Payoff>)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance {tol} must be positive")));
    }
    let h = 1.0 / 128.0;
    let spec = GridSpec::with_resolution(h)?;
    let mut trace: Vec<Payoff> = Vec::new();
    let mut point = problem.disagreement();
    let mut step = f64::NAN;
    let mut settled = false;
    for _ in 0..200 {
        let current = problem.with_disagreement(point)?;
        let s = match s_delta(&current, &spec) {
            Ok(s) => s,
            Err(Error::DegenerateNormalization) => {
                settled = true;
                break;
            }
            Err(e) => return Err(e),
        };
        let next = s.payoff;
        step = next.dist(point);
        point = next;
        trace.push(next);
        if step < tol {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(Error::NoConvergence { sweeps: trace.len() as u64, residual: step });
    }
    let (on_chain, _) = problem.pareto_frontier().project(point);
    if on_chain.dist(point) <= 2.0 * h {
        point = on_chain;
    }
    let sol = Solution::new(Method::IteratedDelta, point)
        .with("h", h)
        .with("rounds", trace.len() as f64)
        .with("final-step", if step.is_nan() { 0.0 } else { step });
    Ok((sol, trace))
}
