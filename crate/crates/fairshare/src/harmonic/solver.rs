//! Cut-cell finite differences and red-black overrelaxation.
//!
//! The grid is a uniform lattice clipped against a convex polygon. Interior
//! nodes get the five-point Laplacian; where an arm of the stencil crosses the
//! boundary the arm is shortened to the crossing point (Shortley-Weller) and
//! the neighbor is replaced by either boundary data (absorbing edges) or a
//! mirror image (reflecting edges). Both payoff fields share one stencil and
//! are relaxed in the same sweep.

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, GEOM_TOL};

use super::{GridSpec, NodeKind};

/// How one polygon edge enters the boundary-value problem.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(super) enum EdgeKind {
    /// Dirichlet data `(x, y)` read off the crossing point.
    Absorb,
    /// Zero normal derivative.
    Reflect,
}

/// Nodes closer than this to an absorbing edge are pinned to the boundary
/// data outright; a cut arm that short would wreck the stencil scaling.
const SNAP: f64 = 1e-6;

const OMEGA: f64 = 1.9;
const TOL: f64 = 1e-10;
const MAX_SWEEPS: u64 = 1_000_000;
const CHECK_EVERY: u64 = 16;

/// One unknown node: neighbor slots, diagonal-normalized weights, and the
/// boundary contribution for each field.
struct Cell {
    at: u32,
    nb: [u32; 4],
    w: [f64; 4],
    rhs1: f64,
    rhs2: f64,
}

/// How a single arm of the stencil resolves.
#[derive(Clone, Copy)]
enum Arm {
    /// Full step to another lattice node.
    Link(u32),
    /// Shortened step to an absorbing edge, with the data there.
    Cut { a: f64, g1: f64, g2: f64 },
    /// Node sits on a grid-aligned reflecting line; copy the opposite arm.
    Mirror,
    /// Reflecting edge not aligned with the grid; fold the arm into the
    /// diagonal (first-order ghost).
    Drop,
}

pub(super) struct Discretization {
    pub kinds: Vec<NodeKind>,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub g1_range: (f64, f64),
    pub g2_range: (f64, f64),
    pub unknowns: usize,
    red: Vec<Cell>,
    black: Vec<Cell>,
}

#[derive(Clone, Copy, Debug)]
pub(super) struct SolveStats {
    pub sweeps: u64,
    pub residual: f64,
}

/// Classifies every lattice node of `spec` against `domain` and assembles the
/// stencils. `edge_kinds[i]` says how the polygon's `i`-th edge behaves.
pub(super) fn build(
    domain: &ConvexPolygon,
    edge_kinds: &[EdgeKind],
    spec: &GridSpec,
) -> Result<Discretization> {
    let (nx, ny) = (spec.nx(), spec.ny());
    let h = spec.h();
    let total = nx * ny;
    let idx = |i: usize, j: usize| (j * nx + i) as u32;

    let rows: Vec<_> = (0..ny).map(|j| domain.slice_at_y_edges(spec.y(j))).collect();
    let cols: Vec<_> = (0..nx).map(|i| domain.slice_at_x_edges(spec.x(i))).collect();

    let mut kinds = vec![NodeKind::Exterior; total];
    let mut v1 = vec![0.0; total];
    let mut v2 = vec![0.0; total];
    let mut g1_range = (f64::INFINITY, f64::NEG_INFINITY);
    let mut g2_range = (f64::INFINITY, f64::NEG_INFINITY);
    let track = |g1: f64, g2: f64, g1r: &mut (f64, f64), g2r: &mut (f64, f64)| {
        g1r.0 = g1r.0.min(g1);
        g1r.1 = g1r.1.max(g1);
        g2r.0 = g2r.0.min(g2);
        g2r.1 = g2r.1.max(g2);
    };

    for j in 0..ny {
        let Some((xlo, exlo, xhi, exhi)) = rows[j] else { continue };
        let y = spec.y(j);
        for i in 0..nx {
            let Some((ylo, eylo, yhi, eyhi)) = cols[i] else { continue };
            let x = spec.x(i);
            if x < xlo - GEOM_TOL || x > xhi + GEOM_TOL || y < ylo - GEOM_TOL || y > yhi + GEOM_TOL
            {
                continue;
            }
            let dist = [xhi - x, x - xlo, yhi - y, y - ylo];
            let bind = [exhi, exlo, eyhi, eylo];
            let pinned = (0..4)
                .any(|d| dist[d] < SNAP && edge_kinds[bind[d]] == EdgeKind::Absorb);
            if pinned {
                kinds[idx(i, j) as usize] = NodeKind::Dirichlet;
                v1[idx(i, j) as usize] = x;
                v2[idx(i, j) as usize] = y;
                track(x, y, &mut g1_range, &mut g2_range);
            } else {
                kinds[idx(i, j) as usize] = NodeKind::Interior;
                v1[idx(i, j) as usize] = 0.5;
                v2[idx(i, j) as usize] = 0.5;
            }
        }
    }

    let mut red = Vec::new();
    let mut black = Vec::new();
    let mut unknowns = 0usize;
    for j in 0..ny {
        let Some((xlo, exlo, xhi, exhi)) = rows[j] else { continue };
        let y = spec.y(j);
        for i in 0..nx {
            if kinds[idx(i, j) as usize] != NodeKind::Interior {
                continue;
            }
            let (ylo, eylo, yhi, eyhi) = cols[i].expect("interior node in empty column");
            let x = spec.x(i);
            let dist = [xhi - x, x - xlo, yhi - y, y - ylo];
            let bind = [exhi, exlo, eyhi, eylo];
            // Crossing points in E, W, N, S order.
            let cut_pt = [
                (xhi, y),
                (xlo, y),
                (x, yhi),
                (x, ylo),
            ];
            let nb_at = [
                (i + 1, j),
                (i.wrapping_sub(1), j),
                (i, j + 1),
                (i, j.wrapping_sub(1)),
            ];
            let mut arms = [Arm::Drop; 4];
            for d in 0..4 {
                arms[d] = if dist[d] >= h - 1e-9 * h {
                    Arm::Link(idx(nb_at[d].0, nb_at[d].1))
                } else if edge_kinds[bind[d]] == EdgeKind::Absorb {
                    let (gx, gy) = cut_pt[d];
                    Arm::Cut { a: dist[d].max(SNAP), g1: gx, g2: gy }
                } else if dist[d] <= 1e-9 {
                    Arm::Mirror
                } else {
                    Arm::Drop
                };
            }
            for d in 0..4 {
                if matches!(arms[d], Arm::Mirror) {
                    let opp = d ^ 1;
                    arms[d] = match arms[opp] {
                        Arm::Mirror => Arm::Drop,
                        other => other,
                    };
                }
            }
            let arm = |a: &Arm| match a {
                Arm::Cut { a, .. } => *a,
                _ => h,
            };
            let (ae, aw) = (arm(&arms[0]), arm(&arms[1]));
            let (an, aso) = (arm(&arms[2]), arm(&arms[3]));
            let raw = [
                2.0 / (ae * (ae + aw)),
                2.0 / (aw * (ae + aw)),
                2.0 / (an * (an + aso)),
                2.0 / (aso * (an + aso)),
            ];
            let mut diag: f64 = raw.iter().sum();
            let me = idx(i, j);
            let mut cell = Cell { at: me, nb: [me; 4], w: [0.0; 4], rhs1: 0.0, rhs2: 0.0 };
            for d in 0..4 {
                match arms[d] {
                    Arm::Link(t) => {
                        cell.nb[d] = t;
                        cell.w[d] = raw[d];
                        debug_assert_ne!(kinds[t as usize], NodeKind::Exterior);
                    }
                    Arm::Cut { g1, g2, .. } => {
                        cell.rhs1 += raw[d] * g1;
                        cell.rhs2 += raw[d] * g2;
                        track(g1, g2, &mut g1_range, &mut g2_range);
                    }
                    Arm::Drop => diag -= raw[d],
                    Arm::Mirror => unreachable!("mirrors resolved above"),
                }
            }
            for d in 0..4 {
                cell.w[d] /= diag;
            }
            cell.rhs1 /= diag;
            cell.rhs2 /= diag;
            unknowns += 1;
            if (spec.gx(i) + spec.gy(j)) & 1 == 0 {
                red.push(cell);
            } else {
                black.push(cell);
            }
        }
    }

    Ok(Discretization { kinds, v1, v2, g1_range, g2_range, unknowns, red, black })
}

fn sweep(cells: &[Cell], v1: &mut [f64], v2: &mut [f64]) {
    for c in cells {
        let n = [c.nb[0] as usize, c.nb[1] as usize, c.nb[2] as usize, c.nb[3] as usize];
        let s1 = c.rhs1 + c.w[0] * v1[n[0]] + c.w[1] * v1[n[1]] + c.w[2] * v1[n[2]] + c.w[3] * v1[n[3]];
        let s2 = c.rhs2 + c.w[0] * v2[n[0]] + c.w[1] * v2[n[1]] + c.w[2] * v2[n[2]] + c.w[3] * v2[n[3]];
        let i = c.at as usize;
        v1[i] += OMEGA * (s1 - v1[i]);
        v2[i] += OMEGA * (s2 - v2[i]);
    }
}

fn residual(cells: &[Cell], v1: &[f64], v2: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for c in cells {
        let n = [c.nb[0] as usize, c.nb[1] as usize, c.nb[2] as usize, c.nb[3] as usize];
        let s1 = c.rhs1 + c.w[0] * v1[n[0]] + c.w[1] * v1[n[1]] + c.w[2] * v1[n[2]] + c.w[3] * v1[n[3]];
        let s2 = c.rhs2 + c.w[0] * v2[n[0]] + c.w[1] * v2[n[1]] + c.w[2] * v2[n[2]] + c.w[3] * v2[n[3]];
        let i = c.at as usize;
        worst = worst.max((s1 - v1[i]).abs()).max((s2 - v2[i]).abs());
    }
    worst
}

/// Relaxes both fields in place until the diagonal-normalized residual drops
/// to `1e-10` in the max norm.
pub(super) fn relax(disc: &mut Discretization) -> Result<SolveStats> {
    if disc.unknowns == 0 {
        return Ok(SolveStats { sweeps: 0, residual: 0.0 });
    }
    let mut sweeps = 0u64;
    loop {
        sweep(&disc.red, &mut disc.v1, &mut disc.v2);
        sweep(&disc.black, &mut disc.v1, &mut disc.v2);
        sweeps += 1;
        if sweeps % CHECK_EVERY == 0 || sweeps >= MAX_SWEEPS {
            let r = residual(&disc.red, &disc.v1, &disc.v2)
                .max(residual(&disc.black, &disc.v1, &disc.v2));
            if r <= TOL {
                return Ok(SolveStats { sweeps, residual: r });
            }
            if sweeps >= MAX_SWEEPS {
                return Err(Error::NoConvergence { sweeps, residual: r });
            }
        }
    }
}
