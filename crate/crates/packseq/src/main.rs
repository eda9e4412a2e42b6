use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use packseq::formats::{self, cached_level_table, load_catalog, load_chain, load_dataset};
use packseq::pool::{build_pool, Pool, PoolConfig};
use packseq::service::{self, AppState, LogRecord};
use packseq_core::describe::{dataset_stats, placement_stats, DatasetSummary, PlacementSummary};
use packseq_core::evaluation::{tally, PairTestConfig, ResultsTable, SourceKind};
use packseq_core::fixtures::{grocery_catalog, grocery_container};
use packseq_core::levels::{build_level_table, LevelTable};
use packseq_core::markov::{build_chain, extract_pairs, mine, validate_chain, EdgeWeighting, DEFAULT_SUPPORT_THRESHOLD};
use packseq_core::planner::{plan, SearchConfig, Strategy, BEAM3_MAX_LEN, DEFAULT_BEAM_WIDTH};
use packseq_core::scene::{sample_scene, synth_demos};
use packseq_core::stats::{
    boschloo_one_sided, cohens_h, fisher_one_sided, power_two_prop, Contingency2x2, EffectBand, DEFAULT_GRID_SIZE,
};
use packseq_core::{ContainerSpec, MarkovChain, MiningConfig, ObjectCatalog, ObjectId, PackingPlan};
use serde::Serialize;

/// Learn packing orders from demonstrations, plan new ones, and run the
/// human evaluation.
#[derive(Debug, Parser)]
#[command(name = "packseq", version)]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, global = true, default_value_t = Format::Human)]
    format: Format,

    /// Object catalog (JSON Lines). Defaults to the built-in 24-object grocery catalog.
    #[arg(long, global = true, env = "PACKSEQ_CATALOG")]
    catalog: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Learn a Markov chain from a dataset.
    Train(TrainArgs),
    /// Predict a packing order for a set of objects.
    Plan(PlanArgs),
    /// Describe a dataset: durations, scene sizes and placements.
    Analyze(AnalyzeArgs),
    /// Exact tests, effect size and power for a 2x2 table.
    Stats(StatsArgs),
    /// Generate synthetic demonstrations from a ground-truth chain.
    Synth(SynthArgs),
    /// Evaluation pool tools.
    #[command(subcommand)]
    Evaluate(EvaluateCommand),
    /// Run the evaluation HTTP service.
    Serve(ServeArgs),
    /// Print the catalog as JSON Lines.
    Catalog,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Dataset of demonstrations (JSON Lines).
    #[arg(long)]
    dataset: PathBuf,
    /// Minimum support for a pair to become an edge.
    #[arg(long, default_value_t = DEFAULT_SUPPORT_THRESHOLD)]
    threshold: f64,
    /// Edge weight before normalization.
    #[arg(long, value_enum, default_value_t = Weighting::Support)]
    weighting: Weighting,
    /// Write the chain here instead of standard output.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Weighting {
    Support,
    Count,
}

impl From<Weighting> for EdgeWeighting {
    fn from(w: Weighting) -> Self {
        match w {
            Weighting::Support => EdgeWeighting::Support,
            Weighting::Count => EdgeWeighting::Count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    BeamN,
    #[value(name = "beam-3")]
    Beam3,
    Random,
}

#[derive(Debug, Args)]
struct PlanArgs {
    /// Chain file written by `train`.
    #[arg(long)]
    chain: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::BeamN)]
    mode: Mode,
    /// Objects to pack, comma separated.
    #[arg(long, value_delimiter = ',', required_unless_present = "scene_seed")]
    objects: Vec<String>,
    /// Sample the objects as a scene of the catalog instead of listing them.
    #[arg(long, conflicts_with = "objects")]
    scene_seed: Option<u64>,
    /// Container inner dimensions `W,D,H` in meters for scene sampling.
    #[arg(long, value_parser = parse_container)]
    container: Option<ContainerSpec>,
    #[arg(long, default_value_t = DEFAULT_BEAM_WIDTH)]
    beam_width: usize,
    /// Maximum sequence length per search; beam-3 defaults to 3.
    #[arg(long)]
    max_len: Option<usize>,
    /// Seed of the random baseline.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for cached level tables.
    #[arg(long, env = "PACKSEQ_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Histogram bin width in seconds.
    #[arg(long, default_value_t = 10.0)]
    bin_width: f64,
    /// Objects to report placements for; all placed objects when omitted.
    #[arg(long = "object")]
    objects: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PairTest {
    Boschloo,
    Fisher,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Counts `s1,f1,s2,f2`: successes and failures of group 1, then group 2.
    #[arg(long, value_parser = parse_table)]
    table: Contingency2x2,
    /// Test reported as the p-value; Fisher is always included.
    #[arg(long, value_enum, default_value_t = PairTest::Boschloo)]
    pair_test: PairTest,
    /// Number of nuisance-parameter grid points for Boschloo.
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    grid: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Ground-truth chain.
    #[arg(long)]
    chain: PathBuf,
    /// Number of demonstrations.
    #[arg(long, short, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Container inner dimensions `W,D,H` in meters.
    #[arg(long, value_parser = parse_container)]
    container: Option<ContainerSpec>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum EvaluateCommand {
    /// Generate a trial pool from a dataset and a chain.
    BuildPool(BuildPoolArgs),
    /// Tally a judgment log offline.
    Results(ResultsArgs),
}

#[derive(Debug, Args)]
struct BuildPoolArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    chain: PathBuf,
    /// Trials per source.
    #[arg(long, default_value_t = 8)]
    per_source: usize,
    #[arg(long, default_value_t = DEFAULT_BEAM_WIDTH)]
    beam_width: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Creation time stamped on trials, Unix seconds; defaults to now.
    #[arg(long, env = "SOURCE_DATE_EPOCH")]
    created_at: Option<u64>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ResultsArgs {
    #[arg(long, env = "PACKSEQ_POOL")]
    pool: PathBuf,
    #[arg(long, env = "PACKSEQ_LOG")]
    log: PathBuf,
    /// Sources to compare, e.g. `beam_3,beam_n`.
    #[arg(long, value_parser = parse_pair)]
    pair: Option<(SourceKind, SourceKind)>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, env = "PACKSEQ_POOL")]
    pool: PathBuf,
    /// Judgment log; created if missing and replayed on start.
    #[arg(long, env = "PACKSEQ_LOG")]
    log: PathBuf,
    #[arg(long, env = "PACKSEQ_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, env = "PACKSEQ_BIND", default_value = "127.0.0.1")]
    bind: std::net::IpAddr,
    /// Seed of the per-session trial assignment.
    #[arg(long, env = "PACKSEQ_SEED", default_value_t = 0)]
    seed: u64,
}

fn parse_numbers<T: std::str::FromStr>(s: &str, n: usize, what: &str) -> Result<Vec<T>, String> {
    let parts: Vec<T> = s
        .split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| format!("`{p}` is not a valid number")))
        .collect::<Result<_, _>>()?;
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated {what}, got {}", parts.len()));
    }
    Ok(parts)
}

fn parse_table(s: &str) -> Result<Contingency2x2, String> {
    let v = parse_numbers::<u64>(s, 4, "counts")?;
    Contingency2x2::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

fn parse_container(s: &str) -> Result<ContainerSpec, String> {
    let v = parse_numbers::<f64>(s, 3, "dimensions")?;
    ContainerSpec::new(v[0], v[1], v[2]).map_err(|e| e.to_string())
}

fn parse_pair(s: &str) -> Result<(SourceKind, SourceKind), String> {
    service::parse_pair(s)
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let catalog = match &cli.catalog {
        Some(path) => load_catalog(path).with_context(|| format!("loading catalog {}", path.display()))?,
        None => grocery_catalog(),
    };
    let out = Output { format: cli.format };
    match cli.command {
        Command::Train(args) => train(&catalog, args),
        Command::Plan(args) => plan_cmd(&catalog, args, &out),
        Command::Analyze(args) => analyze(&catalog, args, &out),
        Command::Stats(args) => stats(args, &out),
        Command::Synth(args) => synth(&catalog, args),
        Command::Evaluate(EvaluateCommand::BuildPool(args)) => build_pool_cmd(&catalog, args, &out),
        Command::Evaluate(EvaluateCommand::Results(args)) => results_cmd(args, &out),
        Command::Serve(args) => serve(args),
        Command::Catalog => formats::write_catalog(io::stdout().lock(), &catalog).map_err(Into::into),
    }
}

struct Output {
    format: Format,
}

impl Output {
    /// Prints `value` as JSON or as the given human-readable text.
    fn emit<T: Serialize>(&self, value: &T, human: impl FnOnce() -> String) -> Result<()> {
        let mut stdout = io::stdout().lock();
        match self.format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut stdout, value)?;
                writeln!(stdout)?;
            }
            Format::Human => write!(stdout, "{}", human())?,
        }
        Ok(())
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().lock().write_all(text.as_bytes()).map_err(Into::into),
    }
}

fn train(catalog: &ObjectCatalog, args: TrainArgs) -> Result<()> {
    if !(args.threshold >= 0.0) {
        bail!("threshold must be a non-negative number");
    }
    let demos = load_dataset(&args.dataset, catalog).with_context(|| format!("loading {}", args.dataset.display()))?;
    let pairs = extract_pairs(&demos)?;
    let config = MiningConfig { support_threshold: args.threshold, weighting: args.weighting.into() };
    let kept = mine(&pairs, &config);
    if kept.is_empty() {
        eprintln!(
            "warning: none of the {} pairs reaches support {}; the chain would be empty",
            pairs.len(),
            args.threshold
        );
    }
    let chain = build_chain(&kept, config.weighting)?;
    let report = validate_chain(&chain, catalog);
    if !report.is_clean() {
        eprintln!("{report}");
    }
    eprintln!(
        "{} demonstrations, {} of {} pairs kept, {} edges",
        demos.len(),
        kept.len(),
        pairs.len(),
        chain.edge_count()
    );
    write_or_print(args.out.as_deref(), &(formats::chain_to_json(&chain) + "\n"))
}

fn level_table(chain: &MarkovChain, cache_dir: Option<&Path>) -> Result<LevelTable> {
    Ok(match cache_dir {
        Some(dir) => cached_level_table(chain, dir)?,
        None => build_level_table(chain, None),
    })
}

fn plan_cmd(catalog: &ObjectCatalog, args: PlanArgs, out: &Output) -> Result<()> {
    let chain = load_chain(&args.chain).with_context(|| format!("loading {}", args.chain.display()))?;
    let scene: BTreeSet<ObjectId> = match args.scene_seed {
        Some(seed) => sample_scene(catalog, &args.container.unwrap_or_else(grocery_container), seed)?,
        None => args
            .objects
            .iter()
            .map(|s| {
                let id = ObjectId::new(s.trim())?;
                if !catalog.contains(id.as_str()) {
                    return Err(anyhow!("unknown object `{id}`"));
                }
                Ok(id)
            })
            .collect::<Result<_>>()?,
    };
    if scene.is_empty() {
        bail!("no objects to pack");
    }
    let table = level_table(&chain, args.cache_dir.as_deref())?;
    let config = SearchConfig { beam_width: args.beam_width, max_len: args.max_len, seed: args.seed };
    config.validate()?;
    let strategy = match args.mode {
        Mode::Random => Strategy::Random,
        Mode::BeamN => Strategy::BeamN,
        Mode::Beam3 => Strategy::BeamLimited(args.max_len.unwrap_or(BEAM3_MAX_LEN)),
    };
    let result = match strategy {
        // an explicit length limit on beam-n is a single bounded search
        Strategy::BeamN if args.max_len.is_some() => packseq_core::planner::predict(&table, &scene, &config)?,
        _ => plan(&table, &scene, strategy, &config)?,
    };
    out.emit(&result, || render_plan(&result))
}

fn render_plan(p: &PackingPlan) -> String {
    let ids = |v: &[ObjectId]| v.iter().map(ObjectId::as_str).collect::<Vec<_>>().join(" ");
    let mut s = String::new();
    let _ = writeln!(s, "sequence:  {}", ids(&p.sequence));
    match p.log_prob {
        Some(lp) => {
            let _ = writeln!(s, "log prob:  {lp:.6} (p = {:.4e})", lp.exp());
        }
        None => {
            let _ = writeln!(s, "log prob:  -");
        }
    }
    if !p.leftovers.is_empty() {
        let _ = writeln!(s, "leftovers: {} (not reachable in the chain)", ids(&p.leftovers));
    }
    for (i, step) in p.steps.iter().enumerate() {
        let via = if step.path.is_empty() { String::new() } else { format!(" via {}", ids(&step.path)) };
        let _ = writeln!(s, "  {:>2}. {} level {} p={:.4}{}", i + 1, step.object, step.level, step.prob, via);
    }
    if p.chunks.len() > 1 {
        let chunks: Vec<String> = p.chunks.iter().map(|c| format!("[{}]", ids(&c.objects))).collect();
        let _ = writeln!(s, "chunks:    {}", chunks.join(" "));
    }
    s
}

#[derive(Serialize)]
struct Analysis {
    summary: DatasetSummary,
    placements: Vec<PlacementSummary>,
}

fn analyze(catalog: &ObjectCatalog, args: AnalyzeArgs, out: &Output) -> Result<()> {
    let demos = load_dataset(&args.dataset, catalog).with_context(|| format!("loading {}", args.dataset.display()))?;
    let summary = dataset_stats(&demos, args.bin_width)?;
    let objects: Vec<String> = if args.objects.is_empty() {
        demos
            .iter()
            .filter_map(|d| d.placements.as_ref())
            .flatten()
            .map(|p| p.object_id.as_str().to_string())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    } else {
        args.objects.clone()
    };
    let placements = objects.iter().map(|id| placement_stats(&demos, id)).collect::<Result<Vec<_>, _>>()?;
    let analysis = Analysis { summary, placements };
    out.emit(&analysis, || render_analysis(&analysis))
}

fn render_analysis(a: &Analysis) -> String {
    let s = &a.summary;
    let mut t = String::new();
    let _ = writeln!(t, "scenes:          {}", s.scenes);
    let _ = writeln!(t, "manipulations:   {}", s.manipulations);
    let _ = writeln!(t, "duration mean:   {:.2} s", s.duration_mean_s);
    let _ = writeln!(t, "duration std:    {:.2} s (population)", s.duration_std_s);
    match &s.duration_per_object {
        Some(fit) => {
            let _ = writeln!(
                t,
                "duration fit:    {:.3} s/object + {:.3} s (r = {:.3})",
                fit.slope, fit.intercept, fit.r
            );
        }
        None => {
            let _ = writeln!(t, "duration fit:    - (all scenes have the same size)");
        }
    }
    let _ = writeln!(t, "duration histogram ({} s bins):", s.duration_histogram.bin_width);
    for (i, c) in s.duration_histogram.counts.iter().enumerate() {
        let lo = i as f64 * s.duration_histogram.bin_width;
        let _ = writeln!(t, "  [{:>6.1}, {:>6.1})  {}", lo, lo + s.duration_histogram.bin_width, c);
    }
    if !a.placements.is_empty() {
        let _ = writeln!(t, "placements (top-down, normalized):");
        for p in &a.placements {
            let _ = writeln!(
                t,
                "  {:<18} mean ({:.3}, {:.3})  std ({:.3}, {:.3})  n={}",
                p.object_id, p.mean.0, p.mean.1, p.std.0, p.std.1, p.samples
            );
        }
    }
    t
}

#[derive(Serialize)]
struct StatsReport {
    table: Contingency2x2,
    test: &'static str,
    p_value: f64,
    fisher_p: f64,
    boschloo_p: Option<f64>,
    grid: usize,
    cohens_h: f64,
    effect: EffectBand,
    power: Option<f64>,
    alpha: f64,
}

fn stats(args: StatsArgs, out: &Output) -> Result<()> {
    let t = args.table;
    let fisher_p = fisher_one_sided(&t).p_value;
    let boschloo_p = match args.pair_test {
        PairTest::Boschloo => Some(boschloo_one_sided(&t, args.grid)?.p_value),
        PairTest::Fisher => None,
    };
    let h = cohens_h(t.p1(), t.p2())?;
    let power = if t.n1() >= 2 && t.n2() >= 2 { Some(power_two_prop(h, t.n1(), t.n2(), args.alpha, true)?) } else { None };
    let report = StatsReport {
        table: t,
        test: match args.pair_test {
            PairTest::Boschloo => "boschloo",
            PairTest::Fisher => "fisher",
        },
        p_value: boschloo_p.unwrap_or(fisher_p),
        fisher_p,
        boschloo_p,
        grid: args.grid,
        cohens_h: h,
        effect: EffectBand::of(h),
        power,
        alpha: args.alpha,
    };
    out.emit(&report, || {
        let mut s = String::new();
        let _ = writeln!(s, "table:        group 1 {}/{}  group 2 {}/{}", t.s1, t.n1(), t.s2, t.n2());
        let _ = writeln!(s, "alternative:  p1 > p2 (one-sided)");
        let _ = writeln!(s, "fisher p:     {:.4}", fisher_p);
        if let Some(p) = boschloo_p {
            let _ = writeln!(s, "boschloo p:   {:.4} (grid {})", p, args.grid);
        }
        let _ = writeln!(s, "cohen's h:    {:.4} ({:?})", h, report.effect);
        match power {
            Some(p) => {
                let _ = writeln!(s, "power:        {:.4} (alpha {})", p, args.alpha);
            }
            None => {
                let _ = writeln!(s, "power:        - (needs at least 2 per group)");
            }
        }
        s
    })
}

fn synth(catalog: &ObjectCatalog, args: SynthArgs) -> Result<()> {
    let chain = load_chain(&args.chain).with_context(|| format!("loading {}", args.chain.display()))?;
    let container = args.container.unwrap_or_else(grocery_container);
    let synth = synth_demos(&chain, catalog, &container, args.n, args.seed)?;
    if !synth.fallbacks.is_empty() {
        eprintln!("{} steps fell back to a uniform choice", synth.fallbacks.len());
    }
    let mut buf = Vec::new();
    formats::write_dataset(&mut buf, &synth.demos)?;
    write_or_print(args.out.as_deref(), std::str::from_utf8(&buf)?)
}

fn build_pool_cmd(catalog: &ObjectCatalog, args: BuildPoolArgs, out: &Output) -> Result<()> {
    let demos = load_dataset(&args.dataset, catalog).with_context(|| format!("loading {}", args.dataset.display()))?;
    let chain = load_chain(&args.chain).with_context(|| format!("loading {}", args.chain.display()))?;
    let table = build_level_table(&chain, None);
    let created_at = args
        .created_at
        .unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
    let config = PoolConfig { per_source: args.per_source, beam_width: args.beam_width, seed: args.seed, created_at };
    let pool = build_pool(&demos, catalog, &table, &config)?;
    pool.save(&args.out)?;
    let counts: Vec<(SourceKind, usize)> = SourceKind::ALL.iter().map(|k| (*k, pool.count(*k))).collect();
    out.emit(&serde_json::json!({ "pool": args.out, "trials": pool.trials.len() }), || {
        let parts: Vec<String> = counts.iter().map(|(k, n)| format!("{k} {n}")).collect();
        format!("{} trials written to {} ({})\n", pool.trials.len(), args.out.display(), parts.join(", "))
    })
}

fn results_cmd(args: ResultsArgs, out: &Output) -> Result<()> {
    let pool = Pool::load(&args.pool)?;
    let text = std::fs::read_to_string(&args.log).with_context(|| format!("reading {}", args.log.display()))?;
    let mut judgments = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: LogRecord = serde_json::from_str(line).with_context(|| format!("log line {}", i + 1))?;
        if let LogRecord::Judgment { trial_id, verdict, .. } = record {
            let trial = pool
                .trials
                .iter()
                .find(|t| t.trial_id == trial_id)
                .ok_or_else(|| anyhow!("log line {}: unknown trial `{trial_id}`", i + 1))?;
            judgments.push((trial.source, verdict));
        }
    }
    let table = tally(judgments, args.pair, &PairTestConfig::default())?;
    out.emit(&table, || render_results(&table))
}

fn render_results(t: &ResultsTable) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<8} {:>7} {:>10} {:>4}", "source", "human%", "computer%", "n");
    for r in &t.rows {
        let _ = writeln!(s, "{:<8} {:>7} {:>10} {:>4}", r.source.as_str(), r.human_pct, r.computer_pct, r.samples);
    }
    if let Some(p) = &t.pair {
        let _ = writeln!(s, "{} vs {}:", p.first, p.second);
        let _ = writeln!(s, "  boschloo p {:.4}  fisher p {:.4}", p.boschloo_p, p.fisher_p);
        let _ = writeln!(s, "  cohen's h  {:.4} ({:?})", p.cohens_h, p.effect);
        if let Some(power) = p.power {
            let _ = writeln!(s, "  power      {:.4}", power);
        }
    }
    s
}

fn serve(args: ServeArgs) -> Result<()> {
    let pool = Pool::load(&args.pool).with_context(|| format!("loading pool {}", args.pool.display()))?;
    let state = AppState::open(pool, &args.log, args.seed)?;
    let addr = SocketAddr::new(args.bind, args.port);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, service::router(state))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}
