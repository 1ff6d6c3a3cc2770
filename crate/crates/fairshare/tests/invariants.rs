//! Randomized cross-module invariants. Deterministic edge values live next
//! to the code they pin; these properties hold over whole problem families.

use fairshare::geometry::{make_problem, preset_problem, ConvexPolygon, Preset, GEOM_TOL};
use fairshare::io::{parse_problem, problem_to_string, ProblemFile};
use fairshare::montecarlo::walker_outcomes;
use fairshare::solutions::{kalai_smorodinsky, nash};
use fairshare::{AffineMap, BargainingProblem, Payoff, WalkConfig};
use proptest::prelude::*;

fn cloud() -> impl Strategy<Value = Vec<Payoff>> {
    proptest::collection::vec(
        (0.01f64..0.99, 0.01f64..0.99).prop_map(|(x, y)| Payoff::new(x, y)),
        3..12,
    )
}

/// A problem whose disagreement point sits at a hull corner, so the rational
/// part never degenerates.
fn anchored_problem(mut points: Vec<Payoff>) -> BargainingProblem {
    points.push(Payoff::new(0.0, 0.0));
    make_problem(&points, Payoff::new(0.0, 0.0)).unwrap()
}

/// Adding the unit-square corners makes the set normalized and
/// comprehensive as it stands.
fn normalized_problem(mut points: Vec<Payoff>) -> BargainingProblem {
    points.push(Payoff::new(0.0, 0.0));
    points.push(Payoff::new(1.0, 0.0));
    points.push(Payoff::new(0.0, 1.0));
    make_problem(&points, Payoff::new(0.0, 0.0)).unwrap()
}

proptest! {
    #[test]
    fn hull_contains_inputs_and_turns_left(points in cloud()) {
        let hull = ConvexPolygon::hull(&points).unwrap();
        for p in &points {
            prop_assert!(hull.contains(*p));
        }
        let vs = hull.vertices();
        let n = vs.len();
        for i in 0..n {
            let cross = fairshare::geometry::polygon::cross(
                vs[i], vs[(i + 1) % n], vs[(i + 2) % n]);
            prop_assert!(cross > 0.0, "reflex corner at vertex {i}");
        }
    }

    #[test]
    fn hull_ignores_input_order(points in cloud().prop_shuffle()) {
        let mut sorted = points.clone();
        sorted.sort_by(|a, b| (a.u1, a.u2).partial_cmp(&(b.u1, b.u2)).unwrap());
        let direct = ConvexPolygon::hull(&points).unwrap();
        let resorted = ConvexPolygon::hull(&sorted).unwrap();
        prop_assert_eq!(direct.vertices(), resorted.vertices());
    }

    #[test]
    fn frontier_is_monotone_and_undominated(points in cloud()) {
        let problem = anchored_problem(points);
        let chain = problem.pareto_frontier().points();
        for w in chain.windows(2) {
            prop_assert!(w[1].u1 < w[0].u1);
            prop_assert!(w[1].u2 > w[0].u2);
        }
        for v in problem.feasible().vertices() {
            for p in chain {
                let beats = v.u1 > p.u1 + 1e-9 && v.u2 > p.u2 + 1e-9;
                prop_assert!(!beats, "{v:?} dominates frontier point {p:?}");
            }
        }
    }

    #[test]
    fn normalization_round_trips(points in cloud()) {
        let problem = anchored_problem(points);
        let ir = problem.ir_slice().unwrap();
        let (norm, map) = ir.normalize().unwrap();
        prop_assert!(norm.is_normalized());
        let c_back = map.apply(norm.disagreement());
        prop_assert!(c_back.dist(ir.disagreement()) < 1e-12);
        let ideal_back = map.apply(Payoff::new(1.0, 1.0));
        prop_assert!(ideal_back.dist(ir.ideal_point()) < 1e-9);
        let inv = map.inverse();
        for v in norm.feasible().vertices() {
            prop_assert!(inv.apply(map.apply(*v)).dist(*v) < 1e-9);
        }
    }

    #[test]
    fn nash_product_is_the_chain_maximum(points in cloud()) {
        let problem = anchored_problem(points);
        let c = problem.disagreement();
        let best = nash(&problem).payoff;
        let best_product = (best.u1 - c.u1) * (best.u2 - c.u2);
        let chain = problem.pareto_frontier();
        let mut s = 0.0;
        while s <= chain.total_len() {
            let p = chain.point_at(s);
            let product = (p.u1 - c.u1) * (p.u2 - c.u2);
            prop_assert!(product <= best_product + 1e-12);
            s += chain.total_len() / 37.0 + 1e-9;
        }
    }

    #[test]
    fn ks_sits_on_the_frontier_along_the_ideal_ray(points in cloud()) {
        let problem = anchored_problem(points);
        let ks = kalai_smorodinsky(&problem).unwrap().payoff;
        let c = problem.disagreement();
        let ideal = problem.ideal_point();
        let along = ks - c;
        let ray = ideal - c;
        prop_assert!((along.u1 * ray.u2 - along.u2 * ray.u1).abs() < 1e-9);
        let (_, gap) = problem.pareto_frontier().project(ks);
        prop_assert!(gap < 1e-9);
    }

    #[test]
    fn nash_and_ks_commute_with_scaling(
        points in cloud(),
        a1 in 0.2f64..3.0, b1 in -2.0f64..2.0,
        a2 in 0.2f64..3.0, b2 in -2.0f64..2.0,
    ) {
        let problem = anchored_problem(points);
        let map = AffineMap::new(a1, b1, a2, b2);
        let moved_points: Vec<Payoff> =
            problem.feasible().vertices().iter().map(|v| map.apply(*v)).collect();
        let moved = make_problem(&moved_points, map.apply(problem.disagreement())).unwrap();
        let nash_gap = nash(&moved).payoff.dist(map.apply(nash(&problem).payoff));
        prop_assert!(nash_gap < 1e-7, "nash moved by {nash_gap}");
        let ks_gap = kalai_smorodinsky(&moved).unwrap().payoff
            .dist(map.apply(kalai_smorodinsky(&problem).unwrap().payoff));
        prop_assert!(ks_gap < 1e-7, "ks moved by {ks_gap}");
    }

    #[test]
    fn problem_files_survive_reserialization(points in cloud()) {
        let problem = anchored_problem(points);
        let text = problem_to_string(&problem).unwrap();
        let back = parse_problem(&text).unwrap();
        prop_assert_eq!(problem.feasible().vertices(), back.feasible().vertices());
        prop_assert_eq!(problem.disagreement(), back.disagreement());
        let again = ProblemFile::from_problem(&back);
        prop_assert_eq!(text, serde_json::to_string_pretty(&again).unwrap() + "\n");
    }

    #[test]
    fn symmetrized_set_folds_back_into_the_feasible_set(points in cloud()) {
        let problem = normalized_problem(points);
        let sym = problem.symmetrize().unwrap();
        for v in problem.feasible().vertices() {
            prop_assert!(sym.contains(*v));
        }
        for v in sym.vertices() {
            prop_assert!(sym.contains(Payoff::new(-v.u1, v.u2)));
            prop_assert!(sym.contains(Payoff::new(v.u1, -v.u2)));
            prop_assert!(problem.feasible().contains(v.abs()),
                "fold of {v:?} escapes the feasible set");
        }
    }
}

#[test]
fn walkers_absorb_on_the_undominated_boundary() {
    let problem =
        preset_problem(Preset::Trapezoid, 64, Payoff::new(0.1, 0.05)).unwrap();
    let config = WalkConfig { step: 0.02, walkers: 200, seed: 3, ..WalkConfig::default() };
    let outcomes = walker_outcomes(&problem, &config).unwrap();
    assert_eq!(outcomes.len(), 200);
    let ir = problem.ir_slice().unwrap();
    let nudge = Payoff::new(1e-6, 1e-6);
    for o in &outcomes {
        let p = o.absorbed_at;
        assert!(
            ir.feasible().boundary_distance(p).abs() < 1e-9,
            "absorbed strictly off the boundary at {p:?}"
        );
        assert!(
            !ir.feasible().contains(p + nudge),
            "a feasible point dominates the absorption point {p:?}"
        );
        assert!(o.moves > 0);
    }
}

#[test]
fn preset_problems_are_comprehensive_after_normalization() {
    for preset in [
        Preset::Triangle,
        Preset::Trapezoid,
        Preset::Parabola,
        Preset::Fig3Left,
        Preset::Fig3Right,
    ] {
        let problem = preset_problem(preset, 128, Payoff::new(0.0, 0.0)).unwrap();
        let (norm, _) = problem.ir_slice().unwrap().normalize().unwrap();
        assert!(norm.is_comprehensive(), "{} not comprehensive", preset.name());
        assert!((norm.ideal_point().dist(Payoff::new(1.0, 1.0))) < GEOM_TOL);
    }
}
