//! Acceptance suite: one test per release criterion, each printing its own
//! pass line. Heavy shared computations (quarter-million-walker estimates,
//! fine-grid fields) are cached so criteria that share an input pay for it
//! once.

use std::process::Command;
use std::sync::OnceLock;

use fairshare::analysis::{
    assess_dominance, check_axiom, domination_sweep, incentive_regions, isc_residual,
    perturbed_expectation, AxiomInstance, DominationRecord, PayoffMap, SweepConfig,
    DEFAULT_EPS_LADDER, DEFAULT_FD_ARM, DEFAULT_REGION_STEP,
};
use fairshare::geometry::{make_problem, preset_problem, ConvexPolygon, Preset};
use fairshare::harmonic::{
    iterate_s_delta, mean_value_residual, s_delta, solve_harmonic, NodeKind, SolveMode,
};
use fairshare::montecarlo::estimate_s_delta_mc;
use fairshare::solutions::{egalitarian, equal_loss, kalai_smorodinsky, nash, yu_lp, Solution};
use fairshare::{BargainingProblem, GridSpec, Payoff, SolverId, WalkConfig};

const ORIGIN: Payoff = Payoff::new(0.0, 0.0);
const FINE_H: f64 = 1.0 / 256.0;

fn canonical(preset: Preset) -> BargainingProblem {
    preset_problem(preset, 512, ORIGIN).unwrap()
}

fn pde_cell(preset: Preset) -> &'static OnceLock<Solution> {
    static TRAPEZOID: OnceLock<Solution> = OnceLock::new();
    static TRIANGLE: OnceLock<Solution> = OnceLock::new();
    static PARABOLA: OnceLock<Solution> = OnceLock::new();
    match preset {
        Preset::Trapezoid => &TRAPEZOID,
        Preset::Triangle => &TRIANGLE,
        _ => &PARABOLA,
    }
}

/// Fine-grid PDE answer for a canonical preset, solved once.
fn pde_fine(preset: Preset) -> &'static Solution {
    pde_cell(preset).get_or_init(|| {
        s_delta(&canonical(preset), &GridSpec::with_resolution(FINE_H).unwrap()).unwrap()
    })
}

fn mc_cell(preset: Preset) -> &'static OnceLock<Solution> {
    static TRAPEZOID: OnceLock<Solution> = OnceLock::new();
    static TRIANGLE: OnceLock<Solution> = OnceLock::new();
    static PARABOLA: OnceLock<Solution> = OnceLock::new();
    match preset {
        Preset::Trapezoid => &TRAPEZOID,
        Preset::Triangle => &TRIANGLE,
        _ => &PARABOLA,
    }
}

/// Full-size Monte Carlo estimate for a canonical preset, run once.
fn mc_full(preset: Preset) -> &'static Solution {
    mc_cell(preset).get_or_init(|| {
        let config = WalkConfig { step: 0.01, walkers: 200_000, seed: 7, ..WalkConfig::default() };
        estimate_s_delta_mc(&canonical(preset), &config).unwrap()
    })
}

/// Parabola sampled finely enough that the chain argmax sits within 1e-6 of
/// the smooth one even where it falls on a vertex.
fn dense_parabola() -> &'static BargainingProblem {
    static CELL: OnceLock<BargainingProblem> = OnceLock::new();
    CELL.get_or_init(|| preset_problem(Preset::Parabola, 1 << 21, ORIGIN).unwrap())
}

struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// Least squares coefficient of x^2 in a + q x^2.
fn fit_quadratic(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let s2: f64 = xs.iter().map(|x| x * x).sum();
    let s4: f64 = xs.iter().map(|x| x.powi(4)).sum();
    let sy: f64 = ys.iter().sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * x * y).sum();
    (n * sxy - s2 * sy) / (n * s4 - s2 * s2)
}

#[test]
fn criterion_01_shifted_trapezoid_closed_forms() {
    let problem = preset_problem(Preset::Trapezoid, 512, Payoff::new(0.2, 0.1)).unwrap();
    assert!(nash(&problem).payoff.dist(Payoff::new(1.0, 0.5)) <= 1e-9);
    let ks = kalai_smorodinsky(&problem).unwrap().payoff;
    assert!(ks.dist(Payoff::new(22.0 / 30.0, 19.0 / 30.0)) <= 1e-9);
    println!("criterion 01 (shifted trapezoid closed forms): pass");
}

#[test]
fn criterion_02_trapezoid_closed_forms_and_harmonic_point() {
    let problem = canonical(Preset::Trapezoid);
    assert!(nash(&problem).payoff.dist(Payoff::new(1.0, 0.5)) <= 1e-9);
    let ks = kalai_smorodinsky(&problem).unwrap().payoff;
    assert!(ks.dist(Payoff::new(2.0 / 3.0, 2.0 / 3.0)) <= 1e-9);
    let sd = pde_fine(Preset::Trapezoid).payoff;
    assert!((sd.u1 - 0.60).abs() <= 0.015, "harmonic u1 = {}", sd.u1);
    assert!((sd.u2 - 0.63).abs() <= 0.015, "harmonic u2 = {}", sd.u2);
    println!("criterion 02 (trapezoid solutions): pass");
}

#[test]
fn criterion_03_parabola_closed_forms_and_harmonic_point() {
    let problem = canonical(Preset::Parabola);
    let n = nash(&problem).payoff;
    assert!((n.u1 - 1.0 / 3f64.sqrt()).abs() <= 1e-3, "nash u1 = {}", n.u1);
    assert!((n.u2 - 2.0 / 3.0).abs() <= 1e-3, "nash u2 = {}", n.u2);
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let ks = kalai_smorodinsky(&problem).unwrap().payoff;
    assert!((ks.u1 - golden).abs() <= 1e-3 && (ks.u2 - golden).abs() <= 1e-3);
    let sd = pde_fine(Preset::Parabola).payoff;
    assert!((sd.u1 - 0.59).abs() <= 0.015, "harmonic u1 = {}", sd.u1);
    assert!((sd.u2 - 0.59).abs() <= 0.015, "harmonic u2 = {}", sd.u2);
    println!("criterion 03 (parabola solutions): pass");
}

#[test]
fn criterion_04_symmetric_triangle_agreement() {
    let problem = canonical(Preset::Triangle);
    let center = Payoff::new(0.5, 0.5);
    assert!(nash(&problem).payoff.dist(center) <= 1e-9);
    assert!(kalai_smorodinsky(&problem).unwrap().payoff.dist(center) <= 1e-9);
    assert!(egalitarian(&problem).payoff.dist(center) <= 1e-9);
    assert!(equal_loss(&problem).unwrap().payoff.dist(center) <= 1e-9);
    assert!(yu_lp(&problem, 2.0).unwrap().payoff.dist(center) <= 1e-9);
    let pde = pde_fine(Preset::Triangle).payoff;
    assert!(pde.dist(center) <= 0.01, "pde landed at {pde:?}");
    let mc = mc_full(Preset::Triangle).payoff;
    assert!(mc.dist(center) <= 0.01, "mc landed at {mc:?}");
    println!("criterion 04 (symmetric triangle agreement): pass");
}

#[test]
fn criterion_05_walk_confirms_the_field_on_all_presets() {
    for preset in [Preset::Trapezoid, Preset::Triangle, Preset::Parabola] {
        let pde = pde_fine(preset).payoff;
        let mc = mc_full(preset);
        let stderr = |k: &str| mc.diagnostics[k];
        let slack = 0.01 + FINE_H * FINE_H;
        let d1 = (mc.payoff.u1 - pde.u1).abs();
        let d2 = (mc.payoff.u2 - pde.u2).abs();
        assert!(
            d1 <= 3.0 * stderr("stderr1") + slack,
            "{}: player 1 off by {d1}",
            preset.name()
        );
        assert!(
            d2 <= 3.0 * stderr("stderr2") + slack,
            "{}: player 2 off by {d2}",
            preset.name()
        );
    }
    println!("criterion 05 (walk and field agree on the presets): pass");
}

#[test]
fn criterion_06_perturbation_coefficients() {
    let problem = preset_problem(Preset::Trapezoid, 512, Payoff::new(0.2, 0.1)).unwrap();
    let ladder = [0.005, 0.01, 0.02];

    let e_nash: Vec<Payoff> = ladder
        .iter()
        .map(|&eps| perturbed_expectation(SolverId::Nash, &problem, eps, 256).unwrap())
        .collect();
    let s1 = fit_slope(&ladder, &e_nash.iter().map(|p| p.u1).collect::<Vec<_>>());
    let s2 = fit_slope(&ladder, &e_nash.iter().map(|p| p.u2).collect::<Vec<_>>());
    assert!((s1 + 0.35).abs() <= 0.02, "player 1 slope {s1}");
    assert!((s2 - 0.17).abs() <= 0.02, "player 2 slope {s2}");

    let e_ks: Vec<Payoff> = ladder
        .iter()
        .map(|&eps| {
            perturbed_expectation(SolverId::KalaiSmorodinsky, &problem, eps, 256).unwrap()
        })
        .collect();
    let q1 = fit_quadratic(&ladder, &e_ks.iter().map(|p| p.u1).collect::<Vec<_>>());
    let q2 = fit_quadratic(&ladder, &e_ks.iter().map(|p| p.u2).collect::<Vec<_>>());
    assert!((q1 + 0.115).abs() <= 0.010, "player 1 curvature {q1}");
    assert!((q2 - 0.057).abs() <= 0.006, "player 2 curvature {q2}");
    println!("criterion 06 (perturbation coefficients): pass");
}

#[test]
fn criterion_07_nash_map_matches_its_closed_form() {
    let problem = dense_parabola();
    let map = PayoffMap::new(SolverId::Nash, problem, 1.0 / 128.0).unwrap();
    let phi1 = |c: Payoff| (c.u1 + (3.0 + c.u1 * c.u1 - 3.0 * c.u2).sqrt()) / 3.0;

    let at_origin = map.eval(ORIGIN).unwrap();
    assert!((at_origin.u1 - 0.5774).abs() <= 1e-4, "origin payoff {at_origin:?}");

    let mut rng = Lcg(0x5eed);
    let mut checked = 0;
    while checked < 1000 {
        let c1 = 0.01 + 0.91 * rng.next();
        let c2 = (0.02 + 0.90 * rng.next()) * (1.0 - c1 * c1);
        let c = Payoff::new(c1, c2);
        if phi1(c) > 0.97 {
            continue;
        }
        let numeric = map.eval(c).unwrap();
        let gap = (numeric.u1 - phi1(c)).abs();
        assert!(gap <= 1e-6, "map off by {gap} at {c:?}");
        checked += 1;
    }

    let regions =
        incentive_regions(SolverId::Nash, problem, DEFAULT_REGION_STEP, DEFAULT_FD_ARM).unwrap();
    let boundary = regions.gain_boundary_height(0).unwrap();
    assert!(
        (boundary - 0.25).abs() <= 2.0 * DEFAULT_REGION_STEP,
        "gain boundary at {boundary}"
    );
    println!("criterion 07 (nash payoff map closed form): pass");
}

#[test]
fn criterion_08_contraction_and_independence() {
    let left = preset_problem(Preset::Fig3Left, 512, ORIGIN).unwrap();
    let right = preset_problem(Preset::Fig3Right, 512, ORIGIN).unwrap();

    let nash_left = nash(&left).payoff;
    let nash_right = nash(&right).payoff;
    assert!((nash_left.u2 - 0.7).abs() <= 1e-9);
    assert!((nash_right.u2 - 0.65).abs() <= 1e-9);
    assert!(((nash_left.u2 - nash_right.u2) - 0.05).abs() <= 1e-9);

    let target = Payoff::new(0.7, 0.7);
    assert!(kalai_smorodinsky(&left).unwrap().payoff.dist(target) <= 1e-9);
    assert!(kalai_smorodinsky(&right).unwrap().payoff.dist(target) <= 1e-9);

    let nested = make_problem(
        &[
            Payoff::new(0.0, 0.0),
            Payoff::new(1.0, 0.0),
            Payoff::new(0.7, 0.7),
            Payoff::new(0.0, 0.8),
        ],
        ORIGIN,
    )
    .unwrap();
    let triangle = canonical(Preset::Triangle);
    let clipped = make_problem(
        &[
            Payoff::new(0.0, 0.0),
            Payoff::new(1.0, 0.0),
            Payoff::new(0.5, 0.5),
            Payoff::new(0.0, 0.6),
        ],
        ORIGIN,
    )
    .unwrap();
    let pairs = [
        AxiomInstance::Pair(left.clone(), nested),
        AxiomInstance::Pair(right.clone(), left.clone()),
        AxiomInstance::Pair(triangle, clipped),
    ];
    let report = check_axiom(4, SolverId::Nash, &pairs).unwrap();
    for check in &report.checks {
        assert!(check.violation <= 1e-9, "{}: {}", check.description, check.violation);
    }
    println!("criterion 08 (contraction and independence): pass");
}

#[test]
fn criterion_09_fields_are_harmonic_and_the_point_is_feasible() {
    let h = 1.0 / 128.0;
    let presets = [
        Preset::Trapezoid,
        Preset::Triangle,
        Preset::Parabola,
        Preset::Fig3Left,
        Preset::Fig3Right,
    ];
    let mut rng = Lcg(0xfeed);
    let mut fields = Vec::new();
    for preset in presets {
        let (norm, _) = canonical(preset).ir_slice().unwrap().normalize().unwrap();
        let spec = GridSpec::cover(norm.feasible(), h).unwrap();
        let (f1, f2) = solve_harmonic(&norm, &spec, SolveMode::Symmetrized).unwrap();
        fields.push(f1);
        fields.push(f2);
        if preset == Preset::Trapezoid {
            let (m1, m2) =
                solve_harmonic(&norm, &spec, SolveMode::MixedBc { weak_pareto_absorbs: false })
                    .unwrap();
            fields.push(m1);
            fields.push(m2);
        }
    }

    for field in &fields {
        let (data_lo, data_hi) = field.data_range();
        for j in 0..field.spec().ny() {
            for i in 0..field.spec().nx() {
                if field.kind_at(i, j) != NodeKind::Exterior {
                    let v = field.value_at(i, j);
                    assert!(
                        v >= data_lo - 1e-9 && v <= data_hi + 1e-9,
                        "node ({i},{j}) = {v} escapes [{data_lo}, {data_hi}]"
                    );
                }
            }
        }

        let r = 6.0 * h;
        let domain = field.domain();
        let (lo, hi) = domain.bbox();
        let mut accepted = 0;
        while accepted < 100 {
            let p = Payoff::new(
                lo.u1 + (hi.u1 - lo.u1) * rng.next(),
                lo.u2 + (hi.u2 - lo.u2) * rng.next(),
            );
            if !domain.contains(p) || domain.boundary_distance(p) < r + 2.0 * h + 1e-9 {
                continue;
            }
            let residual = mean_value_residual(field, p, r).unwrap();
            assert!(residual <= 5.0 * h * h, "residual {residual} at {p:?}");
            accepted += 1;
        }
    }

    let coarse = GridSpec::with_resolution(1.0 / 64.0).unwrap();
    let membership = |problem: &BargainingProblem| {
        let sd = s_delta(problem, &coarse).unwrap().payoff;
        let chain = problem.pareto_frontier();
        let c = problem.disagreement();
        let mut pts = chain.points().to_vec();
        pts.push(Payoff::new(chain.start().u1, c.u2));
        pts.push(Payoff::new(c.u1, chain.end().u2));
        match ConvexPolygon::hull(&pts) {
            Ok(hull) => assert!(
                hull.slack(sd) >= -1e-5,
                "point {sd:?} leaves the undominated hull by {}",
                -hull.slack(sd)
            ),
            Err(_) => {
                let (_, gap) = chain.project(sd);
                assert!(gap <= 1e-4, "point {sd:?} sits {gap} off the frontier segment");
            }
        }
    };
    for preset in presets {
        membership(&canonical(preset));
    }
    let mut made = 0;
    let mut attempt = 0;
    while made < 100 {
        attempt += 1;
        assert!(attempt < 1000, "random problem generation stalled");
        let k = 3 + (rng.next() * 6.0) as usize;
        let mut pts: Vec<Payoff> =
            (0..k).map(|_| Payoff::new(rng.next(), rng.next())).collect();
        pts.push(Payoff::new(0.0, 0.0));
        pts.push(Payoff::new(1.0, 0.0));
        pts.push(Payoff::new(0.0, 1.0));
        let Ok(problem) = make_problem(&pts, ORIGIN) else { continue };
        membership(&problem);
        made += 1;
    }
    println!("criterion 09 (harmonicity and feasibility): pass");
}

#[test]
fn criterion_10_stability_classification() {
    let problem = preset_problem(Preset::Trapezoid, 512, Payoff::new(0.2, 0.1)).unwrap();

    let report = isc_residual(SolverId::Nash, &problem, &DEFAULT_EPS_LADDER).unwrap();
    assert!(!report.satisfies_stability());
    assert!(
        report.first_order.u1.abs() > 0.1,
        "first-order term {:?} does not diverge",
        report.first_order
    );

    let report = isc_residual(SolverId::KalaiSmorodinsky, &problem, &DEFAULT_EPS_LADDER).unwrap();
    assert!(!report.satisfies_stability());
    assert!((report.second_order.u1 + 0.115).abs() <= 0.010);
    assert!((report.second_order.u2 - 0.057).abs() <= 0.006);

    let report = isc_residual(SolverId::SDelta, &problem, &DEFAULT_EPS_LADDER).unwrap();
    assert!(
        report.satisfies_stability(),
        "harmonic solution drifts: first {:?}, second {:?}, residual {:?}",
        report.first_order,
        report.second_order,
        report.fit_residual
    );
    println!("criterion 10 (stability classification): pass");
}

#[test]
fn criterion_11_iteration_contracts_to_the_frontier() {
    let problem = canonical(Preset::Trapezoid);
    let (sol, trace) = iterate_s_delta(&problem, 1e-6).unwrap();
    let edge_gap = (sol.payoff.u1 / 2.0 + sol.payoff.u2 - 1.0).abs() / 1.25f64.sqrt();
    assert!(edge_gap <= 1e-3, "limit {:?} sits {edge_gap} off the edge", sol.payoff);

    let limit = *trace.last().unwrap();
    let dists: Vec<f64> = trace.iter().map(|p| p.dist(limit)).collect();
    for k in 3..dists.len() - 1 {
        if dists[k] < 1e-9 {
            break;
        }
        assert!(
            dists[k + 1] <= 0.9 * dists[k] + 1e-12,
            "step {k} contracted only {} -> {}",
            dists[k],
            dists[k + 1]
        );
    }
    println!("criterion 11 (iterated solution contracts): pass");
}

#[test]
fn criterion_12_domination_sweep_is_clean_and_the_flag_path_works() {
    let report = domination_sweep(100, 1, &SweepConfig::default()).unwrap();
    assert_eq!(report.records.len(), 103);
    assert!(
        report.violations.is_empty(),
        "unexpected violations: {:?}",
        report.violations
    );

    let mut records = report.records.clone();
    records.push(DominationRecord {
        source: "synthetic:inverted".into(),
        ks: Payoff::new(0.5, 0.5),
        harmonic: Payoff::new(0.62, 0.62),
        margin: Payoff::new(-0.12, -0.12),
    });
    let flagged = assess_dominance(records, report.band);
    assert_eq!(flagged.records.len(), 104);
    assert_eq!(flagged.violations, vec!["synthetic:inverted".to_string()]);
    assert!(flagged.min_margin.u1 <= -0.12);
    println!("criterion 12 (domination sweep): pass");
}

#[test]
fn criterion_13_byte_identical_reruns() {
    let exe = env!("CARGO_BIN_EXE_fairshare");
    let run = |extra: &[&str]| {
        let base = ["walk", "--preset", "parabola", "--seed", "17", "--walkers", "5000"];
        let out = Command::new(exe)
            .args(base)
            .args(extra)
            .env_remove("FAIRSHARE_SEED")
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let first = run(&[]);
    assert_eq!(first, run(&[]), "identical walk reruns differ");
    assert_eq!(first, run(&["--threads", "1"]), "single worker changes walk output");
    assert_eq!(first, run(&["--threads", "3"]), "worker count changes walk output");

    let check = |extra: &[&str]| {
        let base = ["check", "domination", "--count", "8", "--seed", "3"];
        let out = Command::new(exe)
            .args(base)
            .args(extra)
            .env_remove("FAIRSHARE_SEED")
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let first = check(&[]);
    assert_eq!(first, check(&[]), "identical check reruns differ");
    assert_eq!(first, check(&["--threads", "3"]), "worker count changes check output");
    println!("criterion 13 (byte-identical reruns): pass");
}
