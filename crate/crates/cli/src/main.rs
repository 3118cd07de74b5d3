use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use navbeam::bench::{
    self, match_recall, sweep, write_curve_csv, write_histogram_csv, RuleFamily, SweepSpec,
    TunerOptions, Workload,
};
use navbeam::graphs::{self, Distances, DEFAULT_MEMORY_BUDGET};
use navbeam::search::beam_search;
use navbeam::{
    io, synthetic, CountedEvaluator, Dataset, GroundTruth, Metric, SearchGraph, TerminationRule,
};

/// Graph-based nearest neighbor search with distance-based termination rules.
#[derive(Parser, Debug)]
#[command(name = "navbeam", version, about)]
struct Cli {
    /// Worker threads; defaults to the number of available cores
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a seeded synthetic base set (and optional queries) as fvecs
    Generate(GenerateArgs),
    /// Build a navigable graph over a dataset and save it as NAVG
    BuildNavigable(BuildArgs),
    /// Remove edges from a navigable graph while keeping it navigable
    Prune(PruneArgs),
    /// Check that every node can make strict progress towards every other
    CheckNavigable(GraphArgs),
    /// Check the alpha-shortcut strengthening of navigability
    CheckAlpha(CheckAlphaArgs),
    /// Compute exact nearest neighbors of a query set and save them as ivecs
    GroundTruth(GroundTruthArgs),
    /// Run one search per query and report results and costs
    Search(SearchArgs),
    /// Sweep a rule parameter and write the recall/cost curve as CSV
    Sweep(SweepArgs),
    /// Tune a rule to a target recall and write the per-query cost histogram
    Histogram(HistogramArgs),
    /// Write the instance on which fixed-width beam search fails
    Counterexample(CounterexampleArgs),
    /// Check the approximation guarantee of adaptive search against brute force
    VerifyTheorem1(VerifyArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value_t = Kind::LowRank)]
    kind: Kind,
    /// Number of base points
    #[arg(long)]
    n: usize,
    /// Number of query points
    #[arg(long, default_value_t = 0)]
    queries: usize,
    #[arg(long, default_value_t = 128)]
    dim: usize,
    /// Intrinsic dimension of the low-rank mixture
    #[arg(long, default_value_t = 24)]
    latent: usize,
    #[arg(long, default_value_t = 20)]
    clusters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Destination of the queries; required when --queries is positive
    #[arg(long)]
    query_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Uniform,
    LowRank,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest pairwise distance table to precompute, in bytes
    #[arg(long, default_value_t = DEFAULT_MEMORY_BUDGET)]
    memory_budget: usize,
}

#[derive(Args, Debug)]
struct PruneArgs {
    #[command(flatten)]
    input: GraphArgs,
    #[arg(long)]
    out: PathBuf,
    /// Largest pairwise distance table to precompute, in bytes
    #[arg(long, default_value_t = DEFAULT_MEMORY_BUDGET)]
    memory_budget: usize,
}

#[derive(Args, Debug)]
struct GraphArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args, Debug)]
struct CheckAlphaArgs {
    #[command(flatten)]
    input: GraphArgs,
    #[arg(long)]
    alpha: f64,
}

#[derive(Args, Debug)]
struct GroundTruthArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    queries: PathBuf,
    /// Neighbors stored per query
    #[arg(long, default_value_t = 100)]
    k: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct QueryArgs {
    #[command(flatten)]
    input: GraphArgs,
    #[arg(long)]
    queries: PathBuf,
    /// Cached ground truth (ivecs); computed by brute force when absent
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Entry point: `medoid` or a node id
    #[arg(long, default_value = "medoid")]
    start: Start,
    #[arg(long, default_value_t = 10)]
    k: usize,
}

#[derive(Clone, Copy, Debug)]
enum Start {
    Medoid,
    Node(u32),
}

impl FromStr for Start {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "medoid" {
            return Ok(Start::Medoid);
        }
        s.parse()
            .map(Start::Node)
            .map_err(|_| format!("expected `medoid` or a node id, got {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RuleName {
    Greedy,
    Beam,
    Adaptive,
    AdaptiveV2,
    Hybrid,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[command(flatten)]
    query: QueryArgs,
    #[arg(long, value_enum)]
    rule: RuleName,
    /// Beam width for beam and hybrid
    #[arg(long)]
    b: Option<usize>,
    /// Slack for adaptive, adaptive-v2 and hybrid
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    query: QueryArgs,
    #[arg(long, value_enum)]
    rule: RuleName,
    /// Comma-separated values: widths for beam, gammas for adaptive rules, `b:gamma` for hybrid
    #[arg(long)]
    grid: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct HistogramArgs {
    #[command(flatten)]
    query: QueryArgs,
    #[arg(long, value_enum)]
    rule: RuleName,
    #[arg(long, default_value_t = 0.9)]
    target_recall: f64,
    #[arg(long, default_value_t = 0.005)]
    tolerance: f64,
    #[arg(long, default_value_t = 50.0)]
    bin_width: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CounterexampleArgs {
    #[arg(long)]
    n: usize,
    /// Approximation factor the instance forces on beam search
    #[arg(long = "C")]
    c: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving data.fvecs, graph.navg and query.fvecs
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    query: QueryArgs,
    #[arg(long)]
    gamma: f64,
    #[arg(long, value_enum, default_value_t = RuleName::Adaptive)]
    rule: RuleName,
}

/// Successful runs either pass or report a failed verification.
enum Outcome {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Generate(a) => generate(a),
        Command::BuildNavigable(a) => build(a),
        Command::Prune(a) => prune(a),
        Command::CheckNavigable(a) => check_navigable(a),
        Command::CheckAlpha(a) => check_alpha(a),
        Command::GroundTruth(a) => ground_truth(a),
        Command::Search(a) => search(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Histogram(a) => histogram(a),
        Command::Counterexample(a) => counterexample(a),
        Command::VerifyTheorem1(a) => verify(a),
    }
}

fn load_data(path: &Path) -> Result<Dataset> {
    io::load_fvecs(path).with_context(|| format!("loading {}", path.display()))
}

fn load_graph_for(path: &Path, data: &Dataset) -> Result<SearchGraph> {
    let graph = graphs::load_graph(path).with_context(|| format!("loading {}", path.display()))?;
    if graph.len() != data.len() {
        bail!(
            "graph has {} nodes but the dataset has {} points",
            graph.len(),
            data.len()
        );
    }
    Ok(graph)
}

fn generate(a: GenerateArgs) -> Result<Outcome> {
    if a.queries > 0 && a.query_out.is_none() {
        bail!("--query-out is required when --queries is positive");
    }
    let (base, queries) = match a.kind {
        Kind::Uniform => (
            synthetic::uniform(a.n, a.dim, a.seed),
            (a.queries > 0).then(|| synthetic::uniform(a.queries, a.dim, a.seed.wrapping_add(1))),
        ),
        Kind::LowRank => {
            let (base, q) = synthetic::low_rank_mixture(
                a.n,
                a.queries.max(1),
                a.dim,
                a.latent,
                a.clusters,
                a.seed,
            );
            (base, (a.queries > 0).then_some(q))
        }
    };
    io::save_fvecs(&a.out, &base)?;
    if let (Some(q), Some(path)) = (queries, &a.query_out) {
        io::save_fvecs(path, &q)?;
    }
    println!(
        "seed={} n={} queries={} dim={}",
        a.seed, a.n, a.queries, a.dim
    );
    Ok(Outcome::Ok)
}

fn build(a: BuildArgs) -> Result<Outcome> {
    let data = load_data(&a.data)?;
    let graph = graphs::build_navigable_with(&Distances::new(&data, a.memory_budget), a.seed)?;
    graphs::save_graph(&graph, &a.out)?;
    println!(
        "seed={} n={} edges={} average_degree={}",
        a.seed,
        graph.len(),
        graph.num_edges(),
        graph.average_degree()
    );
    Ok(Outcome::Ok)
}

fn prune(a: PruneArgs) -> Result<Outcome> {
    let data = load_data(&a.input.data)?;
    let graph = load_graph_for(&a.input.graph, &data)?;
    let pruned = match graphs::prune_navigable(&graph, &data, a.memory_budget) {
        Err(navbeam::Error::NotNavigable { x, y }) => {
            println!("not navigable: no out-neighbor of {x} is closer to {y}; refusing to prune");
            return Ok(Outcome::Failed);
        }
        other => other?,
    };
    graphs::save_graph(&pruned, &a.out)?;
    println!(
        "average_degree_before={} average_degree_after={} edges_before={} edges_after={}",
        graph.average_degree(),
        pruned.average_degree(),
        graph.num_edges(),
        pruned.num_edges()
    );
    Ok(Outcome::Ok)
}

fn report_navigability(report: graphs::NavigabilityReport, what: &str) -> Outcome {
    match report.witness {
        None => {
            println!("{what}");
            Outcome::Ok
        }
        Some((x, y)) => {
            println!("not {what}: witness x={x} y={y}");
            Outcome::Failed
        }
    }
}

fn check_navigable(a: GraphArgs) -> Result<Outcome> {
    let data = load_data(&a.data)?;
    let graph = load_graph_for(&a.graph, &data)?;
    Ok(report_navigability(
        graphs::is_navigable(&graph, &data),
        "navigable",
    ))
}

fn check_alpha(a: CheckAlphaArgs) -> Result<Outcome> {
    let data = load_data(&a.input.data)?;
    let graph = load_graph_for(&a.input.graph, &data)?;
    let report = graphs::is_alpha_shortcut_reachable(&graph, &data, a.alpha)?;
    Ok(report_navigability(
        report,
        &format!("alpha-shortcut reachable (alpha={})", a.alpha),
    ))
}

fn ground_truth(a: GroundTruthArgs) -> Result<Outcome> {
    let data = load_data(&a.data)?;
    let queries = load_data(&a.queries)?;
    let truth = GroundTruth::compute(&data, Metric::Euclidean, &queries, a.k)?;
    io::save_ground_truth(&a.out, &truth)?;
    println!("queries={} depth={}", truth.len(), truth.depth());
    Ok(Outcome::Ok)
}

fn termination_rule(
    name: RuleName,
    b: Option<usize>,
    gamma: Option<f64>,
) -> Result<TerminationRule> {
    let need_b = || b.ok_or_else(|| anyhow!("--b is required for this rule"));
    let need_gamma = || gamma.ok_or_else(|| anyhow!("--gamma is required for this rule"));
    Ok(match name {
        RuleName::Greedy => TerminationRule::Greedy,
        RuleName::Beam => TerminationRule::Beam { b: need_b()? },
        RuleName::Adaptive => TerminationRule::Adaptive {
            gamma: need_gamma()?,
        },
        RuleName::AdaptiveV2 => TerminationRule::AdaptiveV2 {
            gamma: need_gamma()?,
        },
        RuleName::Hybrid => TerminationRule::Hybrid {
            b: need_b()?,
            gamma: need_gamma()?,
        },
    })
}

fn family(name: RuleName) -> Result<RuleFamily> {
    Ok(match name {
        RuleName::Beam => RuleFamily::Beam,
        RuleName::Adaptive => RuleFamily::Adaptive,
        RuleName::AdaptiveV2 => RuleFamily::AdaptiveV2,
        RuleName::Hybrid => RuleFamily::Hybrid,
        RuleName::Greedy => bail!("greedy has no parameter to vary"),
    })
}

/// Loaded inputs shared by the query-driven commands.
struct Loaded {
    data: Dataset,
    graph: SearchGraph,
    queries: Dataset,
    truth: GroundTruth,
    start: u32,
}

impl Loaded {
    fn new(a: &QueryArgs) -> Result<Self> {
        let data = load_data(&a.input.data)?;
        let graph = load_graph_for(&a.input.graph, &data)?;
        let queries = load_data(&a.queries)?;
        let truth = match &a.truth {
            Some(path) => io::load_ground_truth(path, data.len())
                .with_context(|| format!("loading {}", path.display()))?,
            None => GroundTruth::compute(&data, Metric::Euclidean, &queries, a.k.min(data.len()))?,
        };
        let start = match a.start {
            Start::Medoid => data.medoid(),
            Start::Node(id) => id,
        };
        Ok(Self {
            data,
            graph,
            queries,
            truth,
            start,
        })
    }

    fn workload(&self) -> Workload<'_> {
        Workload {
            graph: &self.graph,
            dataset: &self.data,
            queries: &self.queries,
            truth: &self.truth,
            start: self.start,
        }
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

fn search(a: SearchArgs) -> Result<Outcome> {
    let rule = termination_rule(a.rule, a.b, a.gamma)?;
    let k = a.query.k;
    let ctx = Loaded::new(&a.query)?;
    let mut out = String::new();
    let mut recall_sum = 0.0;
    let mut cost_sum = 0u64;
    let mut worst_factor: f64 = 0.0;
    for (i, q) in ctx.queries.rows().enumerate() {
        let mut ev = CountedEvaluator::new(Metric::Euclidean);
        let result = beam_search(&ctx.graph, &ctx.data, &mut ev, ctx.start, q, k, rule)?;
        if result.stats.underfilled {
            eprintln!("warning: query {i} reached only {} nodes", result.ids.len());
        }
        let truth = ctx.truth.get(i);
        let recall = bench::recall(&result, truth, k)?;
        let true_kth = Metric::Euclidean.eval(q, ctx.data.row(truth[k - 1] as usize));
        let found_kth = result.distances.last().copied().unwrap_or(f64::INFINITY);
        let factor = if found_kth == true_kth {
            1.0
        } else {
            found_kth / true_kth
        };
        recall_sum += recall;
        cost_sum += result.stats.distance_computations;
        worst_factor = worst_factor.max(factor);
        writeln!(
            out,
            "query={i} ids={} distances={} distance_computations={} expanded={} terminated_early={} recall={recall} approximation_factor={factor}",
            join(&result.ids),
            join(&result.distances),
            result.stats.distance_computations,
            result.stats.expanded,
            result.stats.terminated_early,
        )?;
    }
    let nq = ctx.queries.len() as f64;
    writeln!(
        out,
        "summary queries={} start={} mean_recall={} mean_distance_computations={} max_approximation_factor={worst_factor}",
        ctx.queries.len(),
        ctx.start,
        recall_sum / nq,
        cost_sum as f64 / nq,
    )?;
    print!("{out}");
    Ok(Outcome::Ok)
}

fn sweep_cmd(a: SweepArgs) -> Result<Outcome> {
    let family = family(a.rule)?;
    let spec = SweepSpec::new(family, family.parse_grid(&a.grid)?, a.query.k)?;
    let ctx = Loaded::new(&a.query)?;
    let curve = sweep(&spec, &ctx.workload())?;
    write_curve_csv(&curve, &a.out)?;
    println!("param,recall,mean_distance_computations,num_queries");
    for p in &curve.points {
        println!(
            "{},{},{},{}",
            p.param, p.recall, p.mean_distance_computations, p.num_queries
        );
    }
    Ok(Outcome::Ok)
}

fn histogram(a: HistogramArgs) -> Result<Outcome> {
    let family = family(a.rule)?;
    let ctx = Loaded::new(&a.query)?;
    let opts = TunerOptions {
        target: a.target_recall,
        tolerance: a.tolerance,
        ..TunerOptions::default()
    };
    let matched = match_recall(&ctx.workload(), family, a.query.k, opts)?;
    let hist = bench::histogram(&matched.report, a.bin_width)?;
    write_histogram_csv(&hist, &a.out)?;
    if !matched.within_tolerance {
        eprintln!(
            "warning: recall {} is outside {} +- {}",
            matched.report.mean_recall, a.target_recall, a.tolerance
        );
    }
    println!(
        "rule={} recall={} within_tolerance={} mean_distance_computations={} variance={} evaluations={}",
        matched.rule,
        matched.report.mean_recall,
        matched.within_tolerance,
        matched.report.mean_distance_computations,
        matched.report.cost_variance(),
        matched.evaluations
    );
    Ok(Outcome::Ok)
}

fn counterexample(a: CounterexampleArgs) -> Result<Outcome> {
    let ce = graphs::counterexample_instance(a.n, a.c, a.seed)?;
    fs::create_dir_all(&a.out_dir)?;
    io::save_fvecs(a.out_dir.join("data.fvecs"), &ce.dataset)?;
    graphs::save_graph(&ce.graph, a.out_dir.join("graph.navg"))?;
    io::save_fvecs(
        a.out_dir.join("query.fvecs"),
        &Dataset::from_rows(std::slice::from_ref(&ce.query))?,
    )?;
    println!(
        "seed={} n={} C={} m={} start={} nearest={}",
        a.seed, a.n, a.c, ce.m, ce.start, ce.nearest
    );
    Ok(Outcome::Ok)
}

fn verify(a: VerifyArgs) -> Result<Outcome> {
    let rule = match a.rule {
        RuleName::Adaptive => TerminationRule::Adaptive { gamma: a.gamma },
        RuleName::AdaptiveV2 => TerminationRule::AdaptiveV2 { gamma: a.gamma },
        _ => bail!("the guarantee covers adaptive and adaptive-v2 only"),
    };
    if !(a.gamma > 0.0 && a.gamma <= 2.0) {
        return Err(navbeam::Error::GammaOutOfRange(a.gamma).into());
    }
    let ctx = Loaded::new(&a.query)?;
    if let Some((x, y)) = graphs::is_navigable(&ctx.graph, &ctx.data).witness {
        println!("graph is not navigable (witness x={x} y={y}); the guarantee does not apply");
        return Ok(Outcome::Failed);
    }
    let mut failures = 0usize;
    for (i, q) in ctx.queries.rows().enumerate() {
        let mut ev = CountedEvaluator::new(Metric::Euclidean);
        let result = beam_search(
            &ctx.graph, &ctx.data, &mut ev, ctx.start, q, a.query.k, rule,
        )?;
        let verdict = bench::verify_theorem1(&ctx.data, Metric::Euclidean, q, a.gamma, &result)?;
        if let Some(v) = verdict.violator {
            failures += 1;
            println!(
                "query={i} violated: node {v} is closer than {}",
                verdict.bound
            );
        }
    }
    println!(
        "passed={} failed={failures} rule={rule}",
        ctx.queries.len() - failures
    );
    Ok(if failures == 0 {
        Outcome::Ok
    } else {
        Outcome::Failed
    })
}
