//! Subcommand implementations: problem sourcing, run headers, artifacts,
//! check suites, and the exit-code mapping.

use std::fs;
use std::path::PathBuf;

use fairshare::analysis::{
    check_axiom, domination_sweep, incentive_regions, AxiomInstance, SweepConfig,
};
use fairshare::geometry::{make_problem, preset_problem, BargainingProblem, Preset};
use fairshare::harmonic::{iterate_s_delta, s_delta, solve_harmonic, GridSpec, SolveMode};
use fairshare::io::{
    parse_problem, write_field_csv, write_region_csv, write_solutions_csv, write_walkers_csv,
};
use fairshare::montecarlo::{
    estimate_s_delta_mc, estimate_s_delta_mc_mixed, step_distribution_variant, walker_outcomes,
    StepLaw, WalkConfig,
};
use fairshare::solutions::{egalitarian, equal_loss, kalai_smorodinsky, nash, yu_lp, Solution};
use fairshare::{Error, Payoff, SolverId};

use crate::{svg, CheckArgs, OutputArgs, RegionsArgs, SolveArgs, SourceArgs, WalkArgs};

pub const DEFAULTS_HELP: &str = "\
Defaults and bands (echoed into every run header):
  grid-h 1/128 (1/256 in check cross-validate), step 0.01, walkers 200000
  region grid-step 0.05, fd-arm 0.02, neutral band 1e-6/fd-arm^2
  cross-validate band per coordinate: 3*stderr + step + grid-h^2
  domination band: 3*grid-h; axiom tolerance 1e-7 (5e-3 for s-delta)
  geometric tolerance 1e-12; seed falls back to FAIRSHARE_SEED
Exit codes: 0 ok, 1 check suite failed, 2 bad input or configuration,
3 solver gave up.";

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonConvexInput(_)
        | Error::DegenerateSet
        | Error::DisagreementOutside
        | Error::NotNormalized
        | Error::NotComprehensive
        | Error::UnknownPreset(_)
        | Error::InvalidSegmentCount(_)
        | Error::InvalidP(_)
        | Error::InvalidConfig(_)
        | Error::UnknownVariant(_)
        | Error::MalformedInstance(_)
        | Error::Io(_)
        | Error::Json(_) => 2,
        Error::DegenerateNormalization
        | Error::NoConvergence { .. }
        | Error::DiskOutsideDomain
        | Error::DiskOutsideFeasible
        | Error::MaxMovesExceeded { .. }
        | Error::BoundaryStart => 3,
    }
}

fn finish(result: Result<u8, Error>) -> u8 {
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

type Header = Vec<(&'static str, String)>;

fn print_header(command: &str, entries: &Header) {
    println!("# command={command}");
    for (k, v) in entries {
        println!("# {k}={v}");
    }
}

fn parse_pair(text: &str) -> Result<Payoff, Error> {
    let parts: Vec<&str> = text.split(',').collect();
    let bad = || Error::InvalidConfig(format!("`{text}` is not a `c1,c2` pair"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let c1: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let c2: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    Ok(Payoff::new(c1, c2))
}

fn load_source(src: &SourceArgs) -> Result<(BargainingProblem, Header), Error> {
    let mut hdr: Header = Vec::new();
    let problem = match (&src.preset, &src.file) {
        (Some(name), None) => {
            let preset: Preset = name.parse()?;
            hdr.push(("preset", preset.name().into()));
            hdr.push(("preset-n", src.preset_n.to_string()));
            let c = match &src.disagreement {
                Some(d) => parse_pair(d)?,
                None => Payoff::new(0.0, 0.0),
            };
            preset_problem(preset, src.preset_n, c)?
        }
        (None, Some(path)) => {
            hdr.push(("file", path.display().to_string()));
            let text = fs::read_to_string(path).map_err(|e| {
                Error::InvalidConfig(format!("cannot read {}: {e}", path.display()))
            })?;
            let loaded = parse_problem(&text)?;
            match &src.disagreement {
                Some(d) => loaded.with_disagreement(parse_pair(d)?)?,
                None => loaded,
            }
        }
        _ => {
            return Err(Error::InvalidConfig(
                "exactly one of --preset or --file is required".into(),
            ))
        }
    };
    let c = problem.disagreement();
    hdr.push(("disagreement", format!("{},{}", c.u1, c.u2)));
    Ok((problem, hdr))
}

fn resolve_seed(flag: Option<u64>) -> Result<Option<u64>, Error> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("FAIRSHARE_SEED") {
        Ok(text) => text
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidConfig(format!("FAIRSHARE_SEED=`{text}` is not a seed"))),
        Err(_) => Ok(None),
    }
}

fn require_seed(flag: Option<u64>) -> Result<u64, Error> {
    resolve_seed(flag)?.ok_or_else(|| {
        Error::InvalidConfig("a seed is required: pass --seed or set FAIRSHARE_SEED".into())
    })
}

fn setup_threads(output: &OutputArgs) -> Result<(), Error> {
    let n = if output.deterministic { 1 } else { output.threads.unwrap_or(0) };
    if n == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
}

/// Creates the output directory and drops run-config.json into it before any
/// long computation starts. Execution-only switches stay out of the config:
/// they cannot change results.
fn ensure_out(output: &OutputArgs, config: serde_json::Value) -> Result<(), Error> {
    let Some(dir) = &output.out else { return Ok(()) };
    fs::create_dir_all(dir)?;
    fs::write(dir.join("run-config.json"), serde_json::to_string_pretty(&config)? + "\n")?;
    Ok(())
}

fn artifact(output: &OutputArgs, name: &str) -> Option<PathBuf> {
    output.out.as_ref().map(|dir| dir.join(name))
}

fn diagnostics_cell(s: &Solution) -> String {
    let parts: Vec<String> = s.diagnostics.iter().map(|(k, v)| format!("{k}={v}")).collect();
    parts.join(";")
}

#[derive(Clone, Copy, PartialEq)]
enum MethodSpec {
    Nash,
    Ks,
    Egalitarian,
    EqualLoss,
    Yu(f64),
    SDelta,
    SDeltaMc,
    Iterated,
}

const ALL_METHODS: [MethodSpec; 8] = [
    MethodSpec::Nash,
    MethodSpec::Ks,
    MethodSpec::Egalitarian,
    MethodSpec::EqualLoss,
    MethodSpec::Yu(2.0),
    MethodSpec::SDelta,
    MethodSpec::SDeltaMc,
    MethodSpec::Iterated,
];

fn parse_methods(text: &str) -> Result<Vec<MethodSpec>, Error> {
    if text.trim() == "all" {
        return Ok(ALL_METHODS.to_vec());
    }
    let mut out = Vec::new();
    for token in text.split(',') {
        let m = match token.trim() {
            "nash" => MethodSpec::Nash,
            "ks" => MethodSpec::Ks,
            "egalitarian" => MethodSpec::Egalitarian,
            "equal-loss" => MethodSpec::EqualLoss,
            "yu-l1" => MethodSpec::Yu(1.0),
            "yu-l2" => MethodSpec::Yu(2.0),
            "yu-linf" => MethodSpec::Yu(f64::INFINITY),
            "s-delta" => MethodSpec::SDelta,
            "s-delta-mc" => MethodSpec::SDeltaMc,
            "iterated-s-delta" => MethodSpec::Iterated,
            other => return Err(Error::UnknownVariant(other.into())),
        };
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidConfig("empty method list".into()));
    }
    Ok(out)
}

pub fn solve(args: SolveArgs) -> u8 {
    finish(run_solve(args))
}

fn run_solve(args: SolveArgs) -> Result<u8, Error> {
    setup_threads(&args.output)?;
    let (problem, mut hdr) = load_source(&args.source)?;
    let methods = parse_methods(&args.methods)?;
    let needs_mc = methods.iter().any(|m| *m == MethodSpec::SDeltaMc);
    let seed = if needs_mc { Some(require_seed(args.seed)?) } else { resolve_seed(args.seed)? };
    let spec = GridSpec::with_resolution(args.grid_h)?;
    hdr.push(("methods", args.methods.clone()));
    hdr.push(("grid-h", args.grid_h.to_string()));
    if needs_mc {
        hdr.push(("step", args.step.to_string()));
        hdr.push(("walkers", args.walkers.to_string()));
        hdr.push(("seed", seed.unwrap().to_string()));
    }
    ensure_out(
        &args.output,
        serde_json::json!({
            "command": "solve",
            "preset": args.source.preset,
            "preset-n": args.source.preset_n,
            "file": args.source.file,
            "disagreement": [problem.disagreement().u1, problem.disagreement().u2],
            "methods": args.methods,
            "grid-h": args.grid_h,
            "step": args.step,
            "walkers": args.walkers,
            "seed": seed,
        }),
    )?;

    let walk_cfg = WalkConfig {
        step: args.step,
        walkers: args.walkers,
        seed: seed.unwrap_or(0),
        ..WalkConfig::default()
    };
    let mut rows = Vec::new();
    for m in &methods {
        let row = match m {
            MethodSpec::Nash => nash(&problem),
            MethodSpec::Ks => kalai_smorodinsky(&problem)?,
            MethodSpec::Egalitarian => egalitarian(&problem),
            MethodSpec::EqualLoss => equal_loss(&problem)?,
            MethodSpec::Yu(p) => yu_lp(&problem, *p)?,
            MethodSpec::SDelta => s_delta(&problem, &spec)?,
            MethodSpec::SDeltaMc => estimate_s_delta_mc(&problem, &walk_cfg)?,
            MethodSpec::Iterated => iterate_s_delta(&problem, 1e-6)?.0,
        };
        rows.push(row);
    }

    print_header("solve", &hdr);
    println!("{:<18} {:<22} {:<22} diagnostics", "method", "u1", "u2");
    for s in &rows {
        println!(
            "{:<18} {:<22} {:<22} {}",
            s.method.label(),
            s.payoff.u1,
            s.payoff.u2,
            diagnostics_cell(s)
        );
    }
    if let Some(path) = artifact(&args.output, "solutions.csv") {
        write_solutions_csv(fs::File::create(path)?, &rows)?;
    }
    if args.dump_field {
        let path = artifact(&args.output, "field.csv").ok_or_else(|| {
            Error::InvalidConfig("--dump-field needs --out".into())
        })?;
        let ir = problem.ir_slice()?;
        let (norm, _) = ir.normalize()?;
        let mode = if norm.is_comprehensive() {
            SolveMode::Symmetrized
        } else {
            SolveMode::MixedBc { weak_pareto_absorbs: false }
        };
        let tight = GridSpec::cover(norm.feasible(), args.grid_h)?;
        let (f1, f2) = solve_harmonic(&norm, &tight, mode)?;
        write_field_csv(fs::File::create(path)?, &f1, &f2)?;
    }
    Ok(0)
}

pub fn walk(args: WalkArgs) -> u8 {
    finish(run_walk(args))
}

fn run_walk(args: WalkArgs) -> Result<u8, Error> {
    setup_threads(&args.output)?;
    let (problem, mut hdr) = load_source(&args.source)?;
    let seed = require_seed(args.seed)?;
    let law: StepLaw = args.variant.parse()?;
    if args.mixed && law != StepLaw::UniformAngle {
        return Err(Error::InvalidConfig("--mixed only supports uniform-angle".into()));
    }
    if args.dump_walkers && (args.mixed || law != StepLaw::UniformAngle) {
        return Err(Error::InvalidConfig(
            "--dump-walkers covers the default symmetrized uniform-angle walk".into(),
        ));
    }
    let cfg = WalkConfig {
        step: args.step,
        walkers: args.walkers,
        seed,
        max_moves: args.max_moves,
    };
    hdr.push(("step", args.step.to_string()));
    hdr.push(("walkers", args.walkers.to_string()));
    hdr.push(("seed", seed.to_string()));
    hdr.push(("law", law.label().into()));
    hdr.push(("max-moves", args.max_moves.to_string()));
    hdr.push((
        "mode",
        if args.mixed {
            if args.weak_pareto_absorbs { "mixed-weak-absorbing".into() } else { "mixed".into() }
        } else {
            "auto".to_string()
        },
    ));
    ensure_out(
        &args.output,
        serde_json::json!({
            "command": "walk",
            "preset": args.source.preset,
            "preset-n": args.source.preset_n,
            "file": args.source.file,
            "disagreement": [problem.disagreement().u1, problem.disagreement().u2],
            "step": args.step,
            "walkers": args.walkers,
            "seed": seed,
            "variant": law.label(),
            "max-moves": args.max_moves,
            "mixed": args.mixed,
            "weak-pareto-absorbs": args.weak_pareto_absorbs,
        }),
    )?;

    let sol = if args.mixed {
        estimate_s_delta_mc_mixed(&problem, &cfg, args.weak_pareto_absorbs)?
    } else {
        step_distribution_variant(&problem, &cfg, law)?
    };
    print_header("walk", &hdr);
    println!("estimate-u1={}", sol.payoff.u1);
    println!("estimate-u2={}", sol.payoff.u2);
    let diag = |k: &str| sol.diagnostics.get(k).copied().unwrap_or(f64::NAN);
    println!("stderr-u1={}", diag("stderr1"));
    println!("stderr-u2={}", diag("stderr2"));
    println!("walkers={}", args.walkers);
    println!("mean-moves={}", diag("mean-moves"));

    if args.dump_walkers {
        let path = artifact(&args.output, "walkers.csv").ok_or_else(|| {
            Error::InvalidConfig("--dump-walkers needs --out".into())
        })?;
        let outcomes = walker_outcomes(&problem, &cfg)?;
        write_walkers_csv(fs::File::create(path)?, &outcomes)?;
    }
    Ok(0)
}

pub fn regions(args: RegionsArgs) -> u8 {
    finish(run_regions(args))
}

fn run_regions(args: RegionsArgs) -> Result<u8, Error> {
    setup_threads(&args.output)?;
    let (problem, mut hdr) = load_source(&args.source)?;
    let solver: SolverId = args.solver.parse()?;
    hdr.push(("solver", solver.label().into()));
    hdr.push(("grid-step", args.grid_step.to_string()));
    hdr.push(("fd-arm", args.fd_arm.to_string()));
    ensure_out(
        &args.output,
        serde_json::json!({
            "command": "regions",
            "preset": args.source.preset,
            "preset-n": args.source.preset_n,
            "file": args.source.file,
            "disagreement": [problem.disagreement().u1, problem.disagreement().u2],
            "solver": solver.label(),
            "grid-step": args.grid_step,
            "fd-arm": args.fd_arm,
        }),
    )?;

    let map = incentive_regions(solver, &problem, args.grid_step, args.fd_arm)?;
    hdr.push(("neutral-band", map.neutral_band().to_string()));
    for player in [0, 1] {
        if let Some(h) = map.gain_boundary_height(player) {
            let key = if player == 0 { "gain-boundary-u1" } else { "gain-boundary-u2" };
            hdr.push((key, h.to_string()));
        }
    }
    print_header("regions", &hdr);
    let stdout = std::io::stdout();
    write_region_csv(stdout.lock(), &map)?;
    if let Some(path) = artifact(&args.output, "regions.csv") {
        write_region_csv(fs::File::create(path)?, &map)?;
    }
    if let Some(path) = artifact(&args.output, "regions.svg") {
        let title = format!("incentive regions: {}", solver.label());
        let image = svg::render(&map, problem.feasible().vertices(), &title);
        fs::write(path, image)?;
    }
    Ok(0)
}

pub fn check(args: CheckArgs) -> u8 {
    finish(run_check(args))
}

fn run_check(args: CheckArgs) -> Result<u8, Error> {
    setup_threads(&args.output)?;
    match args.suite.as_str() {
        "axioms" => check_axioms(&args),
        "domination" => check_domination(&args),
        "cross-validate" => check_cross_validate(&args),
        other => Err(Error::UnknownVariant(other.into())),
    }
}

/// Expected verdict per (axiom, solver) on the scripted instances. The
/// failures are as much part of the fixture as the passes: the suite goes
/// red when an expected violation disappears, not only when a pass breaks.
const AXIOM_PLAN: [(u8, SolverId, bool); 30] = {
    use SolverId::*;
    [
        (1, Nash, true),
        (1, KalaiSmorodinsky, true),
        (1, Egalitarian, true),
        (1, EqualLoss, true),
        (1, SDelta, true),
        (2, Nash, true),
        (2, KalaiSmorodinsky, true),
        (2, Egalitarian, false),
        (2, EqualLoss, false),
        (2, SDelta, true),
        (3, Nash, true),
        (3, KalaiSmorodinsky, true),
        (3, Egalitarian, true),
        (3, EqualLoss, true),
        (3, SDelta, false),
        (4, Nash, true),
        (4, KalaiSmorodinsky, false),
        (4, Egalitarian, true),
        (4, EqualLoss, false),
        (4, SDelta, false),
        (5, Nash, false),
        (5, KalaiSmorodinsky, true),
        (5, Egalitarian, true),
        (5, EqualLoss, true),
        (5, SDelta, true),
        (6, Nash, false),
        (6, KalaiSmorodinsky, false),
        (6, Egalitarian, true),
        (6, EqualLoss, true),
        (6, SDelta, true),
    ]
};

fn check_axioms(args: &CheckArgs) -> Result<u8, Error> {
    let n = fairshare::geometry::DEFAULT_PRESET_SEGMENTS;
    let triangle = preset_problem(Preset::Triangle, n, Payoff::new(0.0, 0.0))?;
    let trapezoid = preset_problem(Preset::Trapezoid, n, Payoff::new(0.2, 0.1))?;
    let fig3l = preset_problem(Preset::Fig3Left, n, Payoff::new(0.0, 0.0))?;
    let fig3r = preset_problem(Preset::Fig3Right, n, Payoff::new(0.0, 0.0))?;
    let nested = make_problem(
        &[
            Payoff::new(0.0, 0.0),
            Payoff::new(1.0, 0.0),
            Payoff::new(0.7, 0.7),
            Payoff::new(0.0, 0.8),
        ],
        Payoff::new(0.0, 0.0),
    )?;
    let instances = |axiom: u8| -> Vec<AxiomInstance> {
        match axiom {
            1 => vec![AxiomInstance::Single(triangle.clone())],
            2 | 3 | 6 => vec![AxiomInstance::Single(trapezoid.clone())],
            4 => vec![
                AxiomInstance::Pair(fig3l.clone(), nested.clone()),
                AxiomInstance::Pair(fig3r.clone(), fig3l.clone()),
            ],
            _ => vec![AxiomInstance::Pair(fig3l.clone(), fig3r.clone())],
        }
    };

    let hdr: Header = vec![("suite", "axioms".into())];
    ensure_out(&args.output, serde_json::json!({"command": "check", "suite": "axioms"}))?;
    print_header("check", &hdr);
    println!("{:<7} {:<12} {:<24} {:<9} verdict", "axiom", "solver", "violation", "expected");
    let mut all_ok = true;
    let mut report = String::from("axiom,solver,violation,expected,verdict\n");
    for (axiom, solver, expect_pass) in AXIOM_PLAN {
        let r = check_axiom(axiom, solver, &instances(axiom))?;
        let violation =
            r.checks.iter().map(|c| c.violation).fold(0.0, f64::max);
        let ok = r.all_pass() == expect_pass;
        all_ok &= ok;
        let expected = if expect_pass { "pass" } else { "violate" };
        let verdict = if ok { "ok" } else { "MISMATCH" };
        println!("{:<7} {:<12} {:<24} {:<9} {}", axiom, solver.label(), violation, expected, verdict);
        report.push_str(&format!(
            "{axiom},{},{violation},{expected},{verdict}\n",
            solver.label()
        ));
    }
    println!("result={}", if all_ok { "pass" } else { "fail" });
    if let Some(path) = artifact(&args.output, "axioms.csv") {
        fs::write(path, report)?;
    }
    Ok(if all_ok { 0 } else { 1 })
}

fn check_domination(args: &CheckArgs) -> Result<u8, Error> {
    let seed = resolve_seed(args.seed)?.unwrap_or(1);
    let config = SweepConfig {
        grid_h: args.grid_h.unwrap_or(SweepConfig::default().grid_h),
        include_presets: true,
    };
    let hdr: Header = vec![
        ("suite", "domination".into()),
        ("count", args.count.to_string()),
        ("seed", seed.to_string()),
        ("grid-h", config.grid_h.to_string()),
    ];
    ensure_out(
        &args.output,
        serde_json::json!({
            "command": "check",
            "suite": "domination",
            "count": args.count,
            "seed": seed,
            "grid-h": config.grid_h,
        }),
    )?;
    let report = domination_sweep(args.count, seed, &config)?;
    print_header("check", &hdr);
    println!("# band={}", report.band);
    println!("source,ks-u1,ks-u2,sd-u1,sd-u2,margin-u1,margin-u2");
    let mut csv = String::from("source,ks-u1,ks-u2,sd-u1,sd-u2,margin-u1,margin-u2\n");
    for r in &report.records {
        let line = format!(
            "{},{},{},{},{},{},{}",
            r.source, r.ks.u1, r.ks.u2, r.harmonic.u1, r.harmonic.u2, r.margin.u1, r.margin.u2
        );
        println!("{line}");
        csv.push_str(&line);
        csv.push('\n');
    }
    println!("min-margin-u1={}", report.min_margin.u1);
    println!("min-margin-u2={}", report.min_margin.u2);
    println!("violations={}", report.violations.len());
    for v in &report.violations {
        println!("violation={v}");
    }
    let ok = report.violations.is_empty();
    println!("result={}", if ok { "pass" } else { "fail" });
    if let Some(path) = artifact(&args.output, "domination.csv") {
        fs::write(path, csv)?;
    }
    Ok(if ok { 0 } else { 1 })
}

fn check_cross_validate(args: &CheckArgs) -> Result<u8, Error> {
    let seed = resolve_seed(args.seed)?.unwrap_or(1);
    let grid_h = args.grid_h.unwrap_or(1.0 / 256.0);
    let spec = GridSpec::with_resolution(grid_h)?;
    let cfg = WalkConfig {
        step: args.step,
        walkers: args.walkers,
        seed,
        ..WalkConfig::default()
    };
    let hdr: Header = vec![
        ("suite", "cross-validate".into()),
        ("grid-h", grid_h.to_string()),
        ("step", args.step.to_string()),
        ("walkers", args.walkers.to_string()),
        ("seed", seed.to_string()),
        ("band", "3*stderr + step + grid-h^2".into()),
    ];
    ensure_out(
        &args.output,
        serde_json::json!({
            "command": "check",
            "suite": "cross-validate",
            "grid-h": grid_h,
            "step": args.step,
            "walkers": args.walkers,
            "seed": seed,
        }),
    )?;
    print_header("check", &hdr);
    println!("preset,pde-u1,pde-u2,mc-u1,mc-u2,diff-u1,diff-u2,bound-u1,bound-u2,verdict");
    let mut all_ok = true;
    for preset in [
        Preset::Trapezoid,
        Preset::Triangle,
        Preset::Parabola,
        Preset::Fig3Left,
        Preset::Fig3Right,
    ] {
        let problem = preset_problem(
            preset,
            fairshare::geometry::DEFAULT_PRESET_SEGMENTS,
            Payoff::new(0.0, 0.0),
        )?;
        let pde = s_delta(&problem, &spec)?;
        let mc = estimate_s_delta_mc(&problem, &cfg)?;
        let diag = |k: &str| mc.diagnostics.get(k).copied().unwrap_or(f64::NAN);
        let slack = args.step + grid_h * grid_h;
        let bound1 = 3.0 * diag("stderr1") + slack;
        let bound2 = 3.0 * diag("stderr2") + slack;
        let d1 = (mc.payoff.u1 - pde.payoff.u1).abs();
        let d2 = (mc.payoff.u2 - pde.payoff.u2).abs();
        let ok = d1 <= bound1 && d2 <= bound2;
        all_ok &= ok;
        println!(
            "{},{},{},{},{},{},{},{},{},{}",
            preset.name(),
            pde.payoff.u1,
            pde.payoff.u2,
            mc.payoff.u1,
            mc.payoff.u2,
            d1,
            d2,
            bound1,
            bound2,
            if ok { "ok" } else { "FAIL" }
        );
    }
    println!("result={}", if all_ok { "pass" } else { "fail" });
    Ok(if all_ok { 0 } else { 1 })
}
