//! Command-line front end: solve, walk, regions, and the check suites.

mod cmd;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fairshare::geometry::DEFAULT_PRESET_SEGMENTS;

#[derive(Parser)]
#[command(
    name = "fairshare",
    version,
    about = "Two-player bargaining solutions over convex feasible sets",
    after_help = cmd::DEFAULTS_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute solution points with one or more rules.
    Solve(SolveArgs),
    /// Estimate the harmonic-measure point by reflected random walks.
    Walk(WalkArgs),
    /// Classify gain/lose regions of a payoff map over disagreement points.
    Regions(RegionsArgs),
    /// Run a check suite: axioms, domination, or cross-validate.
    Check(CheckArgs),
}

/// Where the problem comes from.
#[derive(Args)]
struct SourceArgs {
    /// Named example set: trapezoid, triangle, parabola, fig3-left, fig3-right.
    #[arg(long, conflicts_with = "file")]
    preset: Option<String>,

    /// Segment count for sampled curved frontiers.
    #[arg(long, default_value_t = DEFAULT_PRESET_SEGMENTS)]
    preset_n: usize,

    /// Problem file: JSON with `vertices`, `disagreement`, optional `preset`.
    #[arg(long)]
    file: Option<PathBuf>,

    /// Disagreement point as `c1,c2`, overriding the source's own.
    #[arg(long)]
    disagreement: Option<String>,
}

/// Artifact and execution switches shared by all subcommands.
#[derive(Args)]
struct OutputArgs {
    /// Directory for artifacts (run-config.json, CSV, SVG); created up front.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads for the parallel parts. Results do not depend on this.
    #[arg(long, conflicts_with = "deterministic")]
    threads: Option<usize>,

    /// Pin the parallel parts to one worker. Output is identical either way;
    /// this only removes scheduling variance from run times.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: SourceArgs,

    /// Comma list of nash, ks, egalitarian, equal-loss, yu-l1, yu-l2,
    /// yu-linf, s-delta, s-delta-mc, iterated-s-delta; or `all`.
    #[arg(long, default_value = "nash,ks,egalitarian,equal-loss,yu-l2,s-delta")]
    methods: String,

    /// Lattice spacing for the finite-difference solver.
    #[arg(long, default_value_t = 1.0 / 128.0)]
    grid_h: f64,

    /// Walk step length (s-delta-mc only).
    #[arg(long, default_value_t = 0.01)]
    step: f64,

    /// Walker count (s-delta-mc only).
    #[arg(long, default_value_t = 200_000)]
    walkers: usize,

    /// RNG seed (s-delta-mc only); falls back to FAIRSHARE_SEED.
    #[arg(long)]
    seed: Option<u64>,

    /// Also write the two payoff fields to field.csv (needs --out).
    #[arg(long)]
    dump_field: bool,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct WalkArgs {
    #[command(flatten)]
    source: SourceArgs,

    /// Step length in normalized units, in (0, 0.05].
    #[arg(long, default_value_t = 0.01)]
    step: f64,

    #[arg(long, default_value_t = 200_000)]
    walkers: usize,

    /// RNG seed; falls back to FAIRSHARE_SEED; required.
    #[arg(long)]
    seed: Option<u64>,

    /// Step law: uniform-angle, gaussian-isotropic, or two-point-axis.
    #[arg(long, default_value = "uniform-angle")]
    variant: String,

    /// Per-walker move budget.
    #[arg(long, default_value_t = 10_000_000)]
    max_moves: u64,

    /// Walk the feasible set itself (reflecting non-Pareto edges) instead of
    /// the symmetrized region.
    #[arg(long)]
    mixed: bool,

    /// With --mixed: weakly Pareto edges absorb instead of reflecting.
    #[arg(long, requires = "mixed")]
    weak_pareto_absorbs: bool,

    /// Also write per-walker rows to walkers.csv (needs --out).
    #[arg(long)]
    dump_walkers: bool,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RegionsArgs {
    #[command(flatten)]
    source: SourceArgs,

    /// Payoff map to classify: nash, ks, egalitarian, equal-loss, s-delta.
    #[arg(long, default_value = "nash")]
    solver: String,

    /// Lattice spacing of disagreement points.
    #[arg(long, default_value_t = fairshare::analysis::DEFAULT_REGION_STEP)]
    grid_step: f64,

    /// Finite-difference arm of the Laplacian stencil.
    #[arg(long, default_value_t = fairshare::analysis::DEFAULT_FD_ARM)]
    fd_arm: f64,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CheckArgs {
    /// Which suite: axioms, domination, or cross-validate.
    suite: String,

    /// Random instances for the domination sweep.
    #[arg(long, default_value_t = 100)]
    count: usize,

    /// RNG seed; falls back to FAIRSHARE_SEED, then to 1.
    #[arg(long)]
    seed: Option<u64>,

    /// Lattice spacing override for the PDE runs in this suite.
    #[arg(long)]
    grid_h: Option<f64>,

    /// Walk step length (cross-validate only).
    #[arg(long, default_value_t = 0.01)]
    step: f64,

    /// Walker count (cross-validate only).
    #[arg(long, default_value_t = 200_000)]
    walkers: usize,

    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve(args) => cmd::solve(args),
        Command::Walk(args) => cmd::walk(args),
        Command::Regions(args) => cmd::regions(args),
        Command::Check(args) => cmd::check(args),
    };
    ExitCode::from(code)
}
