//! `epsnet` command-line tool.

mod commands;
mod output;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

use epsnet::sampling::NetRadius;
use epsnet::Eps;

use output::Failure;

/// Epsilon-net sampling for probabilistic roadmaps in the unit cube [0,1]^d.
///
/// Every randomized command takes --seed (default 0) and produces identical
/// output for identical flags, whatever the thread count. JSON artifacts
/// carry a "provenance" member echoing the tool version, the full
/// configuration and the seed. Exit codes: 1 no result, 2 usage, 3 input
/// file, 4 parameter domain; errors are printed to stderr as JSON.
#[derive(Debug, Parser)]
#[command(name = "epsnet", version)]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

fn parse_eps(s: &str) -> Result<Eps, String> {
    s.parse().map_err(|e: epsnet::Error| e.to_string())
}

fn parse_net_radius(s: &str) -> Result<NetRadius, String> {
    s.parse().map_err(|e: epsnet::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
enum Command {
    Bounds(BoundsArgs),
    BuildNet(BuildNetArgs),
    Ens(EnsArgs),
    Grid(GridArgs),
    Template(TemplateArgs),
    Replicate(ReplicateArgs),
    Prm(PrmArgs),
    Adversary(AdversaryArgs),
    Coverage(CoverageArgs),
    #[command(subcommand)]
    Bench(BenchCommand),
}

/// Closed-form sample-complexity bounds for (delta, eps)-complete PRM.
///
/// With a = eps/sqrt(1+eps^2) (a = 1 for eps = inf):
///
///   n_lb  = sqrt(e/2) (1 - 2δ/(1-2δ))^2 (sqrt((d-1)/(2πe)) (1-2δ)/δ)^d, 0 once δ >= 1/4
///   r_lb  = (1-2δ) (sqrt(πd))^(1/d) sqrt(d/(2πe)) n^(-1/d)
///   n_ub  = sqrt(πd) (sqrt(2d/(πe)) (1-(2-a)δ)/(aδ))^d
///   r_ub  = 2(1+1/eps) (sqrt(πd))^(1/d) sqrt(d/(2πe)) n^(-1/d)   (as stated)
///   r_ub' = 2(1+1/eps) sqrt(2d/(πe)) (sqrt(πd)/n)^(1/d)          (as derived; twice r_ub)
///   grid  = (sqrt(d)/2 (1-2δ)/(aδ))^d
///   net   in [vol(A) sqrt(πd) (sqrt(d/(2πe))/ε)^d, vol(A ⊕ B(ε/2)) sqrt(πd) (sqrt(2d/(πe))/ε)^d]
///   ratio = sqrt(πd) (sqrt(8)(1+eps)/sqrt(πe))^d   (net size over grid size)
///
/// Radii are evaluated at n = ceil(n_ub); the net sandwich is for an aδ-net
/// of [δ, 1-δ]^d. Plain output prints n_lb (floored) and n_ub (rounded up).
#[derive(Debug, Args, Serialize)]
struct BoundsArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    delta: f64,
    /// Stretch tolerance, or `inf` for feasibility only.
    #[arg(long, value_parser = parse_eps)]
    eps: Eps,
    /// Print the full report as JSON.
    #[arg(long)]
    json: bool,
}

/// Greedy Build-Net: keep each input point farther than eps from all points
/// kept so far. The result covers the input within eps and is pairwise
/// more than eps apart.
///
/// Input is either a sample-set JSON file (--input) or the cube
/// [lo, hi]^d discretized by --dense seeded uniform points.
#[derive(Debug, Args, Serialize)]
struct BuildNetArgs {
    #[arg(long)]
    eps: f64,
    #[arg(long, conflicts_with_all = ["d", "lo", "hi", "dense"])]
    input: Option<PathBuf>,
    #[arg(long, required_unless_present = "input")]
    d: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    lo: f64,
    #[arg(long, default_value_t = 1.0)]
    hi: f64,
    #[arg(long, default_value_t = epsnet::sampling::DEFAULT_DENSE_N)]
    dense: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

/// Epsilon-net sampling: sample set and connection radius for a budget of
/// n samples.
///
///   a       = eps / sqrt(1 + eps^2)
///   n_δ     = min(sqrt(πd) (sqrt(2d/(πe)) (1-(2-a)δ)/(aδ))^d, n)
///   δ_min   solves n_δ = sqrt(πd) (sqrt(2d/(πe)) (1-(2-a)δ_min)/(aδ_min))^d
///   r       = 2 (a + sqrt(1 - a^2)) δ_min
///   samples = Build-Net over [δ_min, 1-δ_min]^d at radius aδ_min (proof) or δ_min (alg2)
#[derive(Debug, Args, Serialize)]
struct EnsArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    d: usize,
    #[arg(long, value_parser = parse_eps)]
    eps: Eps,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Build-Net radius: `proof` (aδ_min, the default) or `alg2` (δ_min).
    #[arg(long, default_value = "proof", value_parser = parse_net_radius)]
    net_radius: NetRadius,
    #[arg(long, default_value_t = epsnet::sampling::DEFAULT_DENSE_N)]
    dense: usize,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

/// Sukharev grid: cell centres with spacing w. On the unit cube 1/w must be
/// an integer; with --margin m the grid is the centred lattice of
/// ceil((1-2m)/w) points per axis inside [m, 1-m]^d. A grid is an eps-net of
/// the cube exactly when w <= 2 eps / sqrt(d).
#[derive(Debug, Args, Serialize)]
struct GridArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    w: f64,
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

/// Template: Build-Net over --dense uniform points of [0,1]^d at radius
/// sqrt(d)/(2k). Reports rho = |T|/k^d and the Monte Carlo uncovered
/// fraction p_hat. Warns when |T| moves by 5% or more as --dense doubles.
#[derive(Debug, Args, Serialize)]
struct TemplateArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: u32,
    #[arg(long, default_value_t = epsnet::coverage::DEFAULT_DENSE_N)]
    dense: usize,
    #[arg(long, default_value_t = epsnet::coverage::DEFAULT_MC_SAMPLES)]
    mc: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip the doubled-density rebuild.
    #[arg(long)]
    no_convergence_check: bool,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

/// Tile a template: the m^d translates (t + offset)/m, offset in {0..m-1}^d.
/// Covers [0,1]^d at cover_radius/m wherever the template covers its cell.
#[derive(Debug, Args, Serialize)]
struct ReplicateArgs {
    #[arg(long)]
    template: PathBuf,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

/// Build the roadmap over (samples ∪ {start, goal}) ∩ F with collision-free
/// edges of length <= radius and report the shortest start-goal path.
#[derive(Debug, Args, Serialize)]
struct PrmArgs {
    #[arg(long)]
    env: PathBuf,
    #[arg(long)]
    samples: PathBuf,
    /// Connection radius; defaults to the `radius` recorded by `ens`.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, default_value_t = epsnet::DEFAULT_TOL)]
    tol: f64,
    /// Also write path, graph statistics and provenance here.
    #[arg(long)]
    #[serde(skip)]
    report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum VariantArg {
    Shell,
    Ring,
}

/// Delta-clear instance on which the roadmap over the samples is
/// disconnected for every radius.
///
/// shell: a point y in [2δ, 1-2δ]^d farther than 2δ from all samples; the
/// obstacles are {y} and the sphere ||x - y|| = 2δ, start/goal y ∓ δe1.
///
/// ring: x* in [2δ, 1-2δ]^2 × [δ, 1-δ]^(d-2) whose solid ring R(x*, δ, δ)
/// holds no sample; the obstacle is its bounding torus, start/goal x* ± δe1.
///
/// Both record a half-circle solution of length πδ.
#[derive(Debug, Args, Serialize)]
struct AdversaryArgs {
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    delta: f64,
    #[arg(long, value_enum)]
    variant: VariantArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Objective evaluations allowed to the witness search.
    #[arg(long, default_value_t = epsnet::prm::DEFAULT_SEARCH_BUDGET)]
    budget: usize,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

/// Monte Carlo estimate of p_hat, the fraction of [0,1]^d farther than
/// --radius from every sample.
#[derive(Debug, Args, Serialize)]
struct CoverageArgs {
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    radius: f64,
    #[arg(long, default_value_t = epsnet::coverage::DEFAULT_MC_SAMPLES)]
    mc: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Minimum-image (torus) distance instead of plain distance in the cube.
    #[arg(long)]
    periodic: bool,
    /// Also estimate the dispersion (largest probe-to-sample distance).
    #[arg(long)]
    dispersion: bool,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

/// Reproduce the reference tables.
#[derive(Debug, Subcommand)]
enum BenchCommand {
    /// Sample-complexity table: n_lb and n_ub at eps = inf, 1, 0.25 for
    /// δ in {0.25, 0.1, 0.05} and d in {4, 5, 6}.
    Table1(Table1Args),
    /// Template sizes |T|, rho and p_hat for d in 4..=9 and k in {2, 3}.
    Table2(Table2Args),
}

#[derive(Debug, Args, Serialize)]
struct Table1Args {
    /// JSON with raw values alongside the rounded cells instead of CSV.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct Table2Args {
    #[arg(long, default_value_t = epsnet::coverage::DEFAULT_DENSE_N)]
    dense: usize,
    #[arg(long, default_value_t = epsnet::coverage::DEFAULT_MC_SAMPLES)]
    mc: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    seeds: Vec<u64>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => fail(Failure::Usage(e.to_string().trim().to_string())),
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            fail(Failure::Usage("--threads must be >= 1".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            fail(Failure::Usage(format!("cannot set thread count: {e}")));
        }
    }
    if let Err(f) = commands::run(cli.command) {
        fail(f);
    }
}

fn fail(f: Failure) -> ! {
    eprintln!("{}", f.to_json());
    std::process::exit(f.exit_code());
}
