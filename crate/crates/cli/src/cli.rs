//! Command-line surface.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use paretoscore_core::bncv::{popularity_baseline, random_baseline, run_bncv, BncvSettings, SuiteMetric};
use paretoscore_core::scoring::{rank_legacy_within, rank_models_within};
use paretoscore_core::synth::{
    backtest_with_curves_within, generate_population, synthetic_embeddings, synthetic_interactions, InteractionSpec,
    PopulationSpec, DEFAULT_WEIGHT_GRID,
};
use paretoscore_core::tradeoff::{canonical_pairs, fit_curves};
use paretoscore_core::{fit_tradeoff, pareto_front, CurveFamily, MetricRegistry, ModelRecord, TradeoffCurve};

use crate::backtest::write_backtest;
use crate::config::RunConfig;
use crate::embeddings::{parse_embeddings, write_embeddings};
use crate::error::{Error, Result};
use crate::interactions::{parse_interactions, write_interactions};
use crate::output::{resolve_output, write_atomic, OUTPUT_DIR_ENV};
use crate::real::{parse_real, PARSED_SCORE_TOLERANCE};
use crate::report::{emit_curves, emit_front, emit_leaderboard, parse_curves, LeaderboardRow, Method};
use crate::table::{metric_table_string, parse_metric_table};

#[derive(Debug, Parser)]
#[command(
    name = "paretoscore",
    version,
    about = "Pareto trade-off scoring and evaluation of recommender models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report which models of a metric table are on the Pareto front.
    Pareto(ParetoArgs),
    /// Fit base-vs-auxiliary trade-off curves on the Pareto front.
    Fit(FitArgs),
    /// Score and rank models into a leaderboard document.
    Score(ScoreArgs),
    /// Bootstrapped cross-validation of baseline recommenders into a metric table.
    Evaluate(EvaluateArgs),
    /// Synthetic model population on a known linear front, as a metric table.
    Simulate(SimulateArgs),
    /// Synthetic long-tailed interaction log, optionally with item embeddings.
    SimulateInteractions(SimulateInteractionsArgs),
    /// Proposed vs legacy scores over a grid of uniform weights, as CSV.
    Backtest(BacktestArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Metric table (`-` for standard input); defaults to `paths.metric_table`
    /// of the config.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ParetoArgs {
    #[command(flatten)]
    io: InputArgs,
    /// RunConfig giving metric directions; all metrics are maximized without it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base metric recorded in the report when no config is given.
    #[arg(long)]
    base: Option<String>,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    io: InputArgs,
    /// RunConfig giving metric directions and the base metric.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base metric id (required without --config).
    #[arg(long)]
    base: Option<String>,
    /// Auxiliary metric id; repeat for several. Defaults to every non-base metric.
    #[arg(long)]
    aux: Vec<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Proposed,
    Legacy,
    Both,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[command(flatten)]
    io: InputArgs,
    /// RunConfig with registry, weights and legacy references.
    #[arg(long)]
    config: PathBuf,
    /// Scoring method reported in the leaderboard.
    #[arg(long, value_enum, default_value = "both")]
    method: MethodArg,
    /// Curves written by `fit`; fitted from the input table when absent.
    #[arg(long)]
    curves: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum AlgoArg {
    Popularity,
    Random,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Interaction log; defaults to `paths.dataset` of the config.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Item embeddings; enables the latent-space metrics.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Algorithm to evaluate; repeat for several.
    #[arg(long, value_enum, default_values = ["popularity"])]
    algo: Vec<AlgoArg>,
    /// Bootstrap folds (default 4, or the config's value).
    #[arg(long)]
    folds: Option<usize>,
    /// Bootstrap seed (default 0, or the config's value).
    #[arg(long)]
    seed: Option<u64>,
    /// Recommendation list length (default 10, or the config's value).
    #[arg(long)]
    k: Option<usize>,
    /// RunConfig supplying defaults for paths and evaluation settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Metric table output; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Slope of the true front, base units per aux unit.
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    slope: f64,
    /// Intercept of the true front.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    intercept: f64,
    /// Number of models.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Largest downward displacement of off-front models, in base units.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `low,high` range of the auxiliary metric.
    #[arg(long, default_value = "0,0.5", allow_hyphen_values = true)]
    aux_range: String,
    /// Column name of the base metric.
    #[arg(long, default_value = "hr")]
    base_id: String,
    /// Column name of the auxiliary metric.
    #[arg(long, default_value = "aux")]
    aux_id: String,
    /// Metric table output; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateInteractionsArgs {
    /// Number of users.
    #[arg(long, default_value_t = 500)]
    users: usize,
    /// Events per user.
    #[arg(long, default_value_t = 10)]
    events: usize,
    /// Catalog size.
    #[arg(long, default_value_t = 400)]
    items: usize,
    /// Number of artists the items are spread over.
    #[arg(long, default_value_t = 50)]
    artists: usize,
    /// Random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write random unit item embeddings to this file.
    #[arg(long)]
    embeddings_output: Option<PathBuf>,
    /// Embedding dimension.
    #[arg(long, default_value_t = 16)]
    dim: usize,
    /// Interaction log output; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BacktestArgs {
    #[command(flatten)]
    io: InputArgs,
    /// RunConfig with registry, weights and legacy references.
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated uniform weights.
    #[arg(long, default_value = "0.3,0.4,0.5,0.55")]
    weights: String,
    /// Curves written by `fit`; fitted from the input table when absent.
    #[arg(long)]
    curves: Option<PathBuf>,
}

/// Runs the CLI on `args` (program name first) and returns the exit status.
/// Relative output paths honor the `PARETOSCORE_OUTPUT_DIR` override.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let output_dir = std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from);
    run_with(args, output_dir)
}

/// [`run`] with the output-directory override passed explicitly.
pub fn run_with<I, T>(args: I, output_dir: Option<PathBuf>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let ctx = Context { output_dir };
    match dispatch(cli.command, &ctx) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

struct Context {
    output_dir: Option<PathBuf>,
}

impl Context {
    fn emit(&self, output: Option<&Path>, contents: &str) -> Result<()> {
        match output {
            Some(path) => write_atomic(&resolve_output(path, self.output_dir.as_deref()), contents.as_bytes()),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(contents.as_bytes())
                    .and_then(|()| stdout.flush())
                    .map_err(|e| Error::io("<stdout>", e))
            }
        }
    }
}

fn dispatch(command: Command, ctx: &Context) -> Result<()> {
    match command {
        Command::Pareto(a) => pareto(a, ctx),
        Command::Fit(a) => fit(a, ctx),
        Command::Score(a) => score(a, ctx),
        Command::Evaluate(a) => evaluate(a, ctx),
        Command::Simulate(a) => simulate(a, ctx),
        Command::SimulateInteractions(a) => simulate_interactions(a, ctx),
        Command::Backtest(a) => backtest(a, ctx),
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Io { .. } => e,
        other => Error::Format(format!("{}: {other}", path.display())),
    }
}

fn load_records(input: Option<&Path>, config: Option<&RunConfig>) -> Result<Vec<ModelRecord>> {
    let path = input
        .or_else(|| config.and_then(|c| c.paths.metric_table.as_deref()))
        .ok_or_else(|| Error::Usage("no metric table: pass --input or set paths.metric_table".into()))?;
    let text = if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Error::io("<stdin>", e))?;
        text
    } else {
        read_text(path)?
    };
    parse_metric_table(text.as_bytes()).map_err(|e| in_file(path, e))
}

fn load_config(path: Option<&Path>) -> Result<Option<RunConfig>> {
    path.map(RunConfig::load).transpose()
}

fn output_path<'a>(flag: Option<&'a Path>, config: Option<&'a RunConfig>) -> Option<&'a Path> {
    flag.or_else(|| config.and_then(|c| c.paths.output.as_deref()))
}

/// All-maximize registry over the table's metrics.
fn inferred_registry(records: &[ModelRecord], base: Option<&str>) -> Result<MetricRegistry> {
    let ids: Vec<&str> = records[0].aggregate.keys().collect();
    let base = base.unwrap_or(ids[0]);
    Ok(MetricRegistry::all_maximize(ids.iter().copied(), base)?)
}

fn load_curves(path: &Path, base_id: &str) -> Result<BTreeMap<String, TradeoffCurve>> {
    parse_curves(&read_text(path)?, base_id).map_err(|e| in_file(path, e))
}

fn pareto(a: ParetoArgs, ctx: &Context) -> Result<()> {
    let config = load_config(a.config.as_deref())?;
    let records = load_records(a.io.input.as_deref(), config.as_ref())?;
    let registry = match &config {
        Some(c) => c.registry.clone(),
        None => inferred_registry(&records, a.base.as_deref())?,
    };
    let points: Vec<_> = records.iter().map(|r| r.aggregate.clone()).collect();
    let front = pareto_front(&points, &registry)?;
    ctx.emit(
        output_path(a.io.output.as_deref(), config.as_ref()),
        &emit_front(&records, &registry, &front)?,
    )
}

fn fit(a: FitArgs, ctx: &Context) -> Result<()> {
    if a.config.is_none() && a.base.is_none() {
        return Err(Error::Usage("fit needs --base or --config".into()));
    }
    let config = load_config(a.config.as_deref())?;
    let records = load_records(a.io.input.as_deref(), config.as_ref())?;
    let registry = match (&config, a.base.as_deref()) {
        (Some(c), Some(base)) if c.registry.base().id != base => {
            return Err(Error::Format(format!(
                "--base `{base}` differs from the config's base metric `{}`",
                c.registry.base().id
            )))
        }
        (Some(c), _) => c.registry.clone(),
        (None, Some(base)) => inferred_registry(&records, Some(base))?,
        (None, None) => unreachable!("checked before loading"),
    };
    let base_id = registry.base().id.clone();
    let aux_ids: Vec<String> = if a.aux.is_empty() {
        registry.auxiliary().map(|s| s.id.clone()).collect()
    } else {
        a.aux.clone()
    };
    let mut curves = BTreeMap::new();
    for aux in aux_ids {
        if aux == base_id || !registry.contains(&aux) {
            return Err(Error::Format(format!(
                "`{aux}` is not an auxiliary metric of the registry"
            )));
        }
        let pairs = canonical_pairs(&records, &registry, &aux)?;
        let curve = fit_tradeoff(&base_id, &aux, &pairs, CurveFamily::Linear)?;
        curves.insert(aux, curve);
    }
    ctx.emit(
        output_path(a.io.output.as_deref(), config.as_ref()),
        &emit_curves(&registry, &curves)?,
    )
}

fn score(a: ScoreArgs, ctx: &Context) -> Result<()> {
    let config = RunConfig::load(&a.config)?;
    let records = load_records(a.io.input.as_deref(), Some(&config))?;
    let registry = &config.registry;
    let (method, curves, rows) = match a.method {
        MethodArg::Legacy => {
            let legacy = config.require_legacy("--method legacy")?;
            let rows = rank_legacy_within(&records, registry, legacy, PARSED_SCORE_TOLERANCE)?;
            (
                Method::Legacy,
                BTreeMap::new(),
                rows.iter().map(LeaderboardRow::from).collect::<Vec<_>>(),
            )
        }
        MethodArg::Proposed | MethodArg::Both => {
            let curves = match &a.curves {
                Some(path) => load_curves(path, &registry.base().id)?,
                None => fit_curves(&records, registry, CurveFamily::Linear)?,
            };
            let (method, legacy) = match a.method {
                MethodArg::Both => (Method::Both, Some(config.require_legacy("--method both")?)),
                _ => (Method::Proposed, None),
            };
            let reports = rank_models_within(
                &records,
                registry,
                &curves,
                &config.weights,
                legacy,
                PARSED_SCORE_TOLERANCE,
            )?;
            (method, curves, reports.iter().map(LeaderboardRow::from).collect())
        }
    };
    let doc = emit_leaderboard(method, registry, &config.weights, &curves, &rows)?;
    ctx.emit(output_path(a.io.output.as_deref(), Some(&config)), &doc)
}

fn evaluate(a: EvaluateArgs, ctx: &Context) -> Result<()> {
    let config = load_config(a.config.as_deref())?;
    let defaults = config.as_ref().map_or_else(BncvSettings::default, |c| c.bncv);
    let settings = BncvSettings {
        n_folds: a.folds.unwrap_or(defaults.n_folds),
        seed: a.seed.unwrap_or(defaults.seed),
        k_top: a.k.unwrap_or(defaults.k_top),
    };
    if settings.n_folds == 0 || settings.k_top == 0 {
        return Err(Error::Usage("--folds and --k must be positive".into()));
    }
    let dataset_path = a
        .dataset
        .as_deref()
        .or_else(|| config.as_ref().and_then(|c| c.paths.dataset.as_deref()))
        .ok_or_else(|| Error::Usage("no dataset: pass --dataset or set paths.dataset".into()))?;
    let dataset = parse_interactions(read_text(dataset_path)?.as_bytes()).map_err(|e| in_file(dataset_path, e))?;
    let embeddings_path = a
        .embeddings
        .as_deref()
        .or_else(|| config.as_ref().and_then(|c| c.paths.embeddings.as_deref()));
    let embeddings = match embeddings_path {
        Some(path) => {
            let (emb, report) = parse_embeddings(read_text(path)?.as_bytes()).map_err(|e| in_file(path, e))?;
            if !report.normalized.is_empty() {
                eprintln!(
                    "note: {}: rescaled {} embedding vectors to unit length",
                    path.display(),
                    report.normalized.len()
                );
            }
            Some(emb)
        }
        None => None,
    };
    let suite = SuiteMetric::standard_suite(&dataset, embeddings.is_some());
    let mut algos = a.algo.clone();
    algos.sort();
    algos.dedup();
    let records = algos
        .iter()
        .map(|algo| match algo {
            AlgoArg::Popularity => run_bncv(&popularity_baseline(), &dataset, &settings, &suite, embeddings.as_ref()),
            AlgoArg::Random => run_bncv(
                &random_baseline(settings.seed),
                &dataset,
                &settings,
                &suite,
                embeddings.as_ref(),
            ),
        })
        .collect::<paretoscore_core::Result<Vec<_>>>()?;
    ctx.emit(
        output_path(a.output.as_deref(), config.as_ref()),
        &metric_table_string(&records)?,
    )
}

fn parse_range(text: &str) -> Result<(f64, f64)> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| Error::Usage(format!("--aux-range `{text}` must be `low,high`")))?;
    let what = || "--aux-range".to_string();
    let range = (
        parse_real(lo, what).map_err(usage)?,
        parse_real(hi, what).map_err(usage)?,
    );
    Ok(range)
}

fn usage(e: Error) -> Error {
    Error::Usage(e.to_string())
}

fn simulate(a: SimulateArgs, ctx: &Context) -> Result<()> {
    let spec = PopulationSpec {
        base_id: a.base_id,
        aux_id: a.aux_id,
        true_slope: a.slope,
        true_intercept: a.intercept,
        n_models: a.n,
        aux_range: parse_range(&a.aux_range)?,
        noise_scale: a.noise,
        seed: a.seed,
    };
    let records = generate_population(&spec)?;
    ctx.emit(a.output.as_deref(), &metric_table_string(&records)?)
}

fn simulate_interactions(a: SimulateInteractionsArgs, ctx: &Context) -> Result<()> {
    let dataset = synthetic_interactions(&InteractionSpec {
        n_users: a.users,
        events_per_user: a.events,
        n_items: a.items,
        n_artists: a.artists,
        seed: a.seed,
    })?;
    if let Some(path) = &a.embeddings_output {
        let emb = synthetic_embeddings(&dataset, a.dim, a.seed)?;
        let mut buf = Vec::new();
        write_embeddings(&emb, &mut buf)?;
        write_atomic(&resolve_output(path, ctx.output_dir.as_deref()), &buf)?;
    }
    let mut buf = Vec::new();
    write_interactions(&dataset, &mut buf)?;
    ctx.emit(
        a.output.as_deref(),
        &String::from_utf8(buf).expect("csv output is utf-8"),
    )
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|w| parse_real(w, || "--weights".to_string()).map_err(usage))
        .collect()
}

fn backtest(a: BacktestArgs, ctx: &Context) -> Result<()> {
    let config = RunConfig::load(&a.config)?;
    let records = load_records(a.io.input.as_deref(), Some(&config))?;
    let legacy = config.require_legacy("backtest")?;
    let grid = if a.weights.is_empty() {
        DEFAULT_WEIGHT_GRID.to_vec()
    } else {
        parse_grid(&a.weights)?
    };
    let curves = match &a.curves {
        Some(path) => load_curves(path, &config.registry.base().id)?,
        None => fit_curves(&records, &config.registry, CurveFamily::Linear)?,
    };
    let table = backtest_with_curves_within(
        &records,
        &config.registry,
        curves,
        &grid,
        legacy,
        PARSED_SCORE_TOLERANCE,
    )?;
    let mut buf = Vec::new();
    write_backtest(&table, &mut buf)?;
    ctx.emit(
        output_path(a.io.output.as_deref(), Some(&config)),
        &String::from_utf8(buf).expect("csv output is utf-8"),
    )
}
