use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use pce::error::{io_error, Error, Result};
use pce::harness::{
    compute_baseline, fingerprint_hex, read_records, run_plan, Baseline, BaselineCache,
    BaselineMethod, ExperimentPlan, RunMetrics, RunOptions, RunRecord, RunRole, VERSION,
};
use pce::io::{read_graph, write_graph};
use pce::report::{aggregate, emit_report, history_csv, plot_data_csv, ReportFormat};
use pce_core::graph::{GraphGenerator, WeightMode};
use pce_core::metrics::binarization;
use pce_core::oracles::{normalized_cut, SaConfig};
use pce_core::solver::{solve, AlphaMode, IterativeSettings, PceConfig, UpdateRule};

#[derive(Parser)]
#[command(
    name = "pce",
    version,
    about = "Pauli correlation encoding for budget-constrained MinCut"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph instance.
    Generate(GenerateArgs),
    /// Classical reference cut for a graph and budget.
    Baseline(BaselineArgs),
    /// Run one solve and print its record as JSON.
    Solve(SolveArgs),
    /// Execute an experiment plan.
    Bench(BenchArgs),
    /// Rebuild tables and plot data from a record file.
    Report(ReportArgs),
    /// Re-run every record and check the outcomes are identical.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Weights {
    Unit,
    Uniform,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "unit")]
    weights: Weights,
    #[arg(long, default_value_t = 0.0)]
    lo: f64,
    #[arg(long, default_value_t = 1.0)]
    hi: f64,
    #[arg(long, default_value_t = 0.0)]
    deletion_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `.json` for JSON, anything else for an edge list. Stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
enum BaselineKind {
    Sa,
    Exhaustive,
    None,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    c: usize,
    #[arg(long, value_enum, default_value = "sa")]
    method: BaselineKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON side file of cached baselines.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ModeArg {
    Fixed,
    Iterative,
}

#[derive(Clone, Copy, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RuleArg {
    ArctanhRatio,
    LargeScale,
}

/// Every field may also come from `--config`; file values win.
#[derive(Args, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SolveOptions {
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    c: Option<usize>,
    #[arg(long, value_enum)]
    alpha_mode: Option<ModeArg>,
    /// Fixed α, or the starting α of the iterative schedule.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, value_enum)]
    update_rule: Option<RuleArg>,
    #[arg(long)]
    max_outer_iters: Option<usize>,
    #[arg(long)]
    alpha_cap: Option<f64>,
    #[arg(long)]
    max_evals: Option<usize>,
    #[arg(long)]
    x_tol: Option<f64>,
    #[arg(long)]
    f_tol: Option<f64>,
    #[arg(long, value_enum)]
    baseline: Option<BaselineKind>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    opts: SolveOptions,
    /// JSON object with any of the flag names (snake_case) as keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    plan: PathBuf,
    /// Output directory for records, reports and plot data.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    /// Baseline cache; defaults to `baselines.json` in the output directory.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    records: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// json, csv or markdown; all three when omitted.
    #[arg(long)]
    format: Vec<ReportFormat>,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    records: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Baseline(a) => baseline(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Bench(a) => bench(a),
        Command::Report(a) => report(a),
        Command::Replay(a) => replay(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn generate(a: GenerateArgs) -> Result<ExitCode> {
    let gen = GraphGenerator {
        n: a.n,
        weights: match a.weights {
            Weights::Unit => WeightMode::Unit,
            Weights::Uniform => WeightMode::UniformRandom { lo: a.lo, hi: a.hi },
        },
        deletion_prob: a.deletion_prob,
        seed: a.seed,
    };
    let g = gen.generate()?;
    match a.out {
        Some(path) => write_graph(&g, path)?,
        None => print!("{}", pce::io::graph_to_json(&g)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn baseline_method(kind: BaselineKind, seed: u64) -> Option<BaselineMethod> {
    match kind {
        BaselineKind::Sa => Some(BaselineMethod::Sa(SaConfig::with_seed(seed))),
        BaselineKind::Exhaustive => Some(BaselineMethod::Exhaustive),
        BaselineKind::None => None,
    }
}

fn baseline(a: BaselineArgs) -> Result<ExitCode> {
    let g = read_graph(&a.graph)?;
    let Some(method) = baseline_method(a.method, a.seed) else {
        return Err(Error::Invalid(
            "baseline method `none` computes nothing".into(),
        ));
    };
    let b = match &a.cache {
        Some(path) => {
            let mut cache = BaselineCache::open(path)?;
            let b = cache.get_or_compute(&g, a.c, &method)?;
            cache.save()?;
            b
        }
        None => compute_baseline(&g, a.c, &method)?,
    };
    let out = serde_json::json!({
        "graph_fingerprint": fingerprint_hex(&g),
        "n": g.n(),
        "c": a.c,
        "cut": b.cut,
        "method": b.method,
        "optimal": b.optimal,
    });
    println!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn merge(flags: SolveOptions, file: SolveOptions) -> SolveOptions {
    macro_rules! pick {
        ($($f:ident),*) => {
            SolveOptions { $($f: file.$f.or(flags.$f)),* }
        };
    }
    pick!(
        graph,
        c,
        alpha_mode,
        alpha,
        beta,
        eta,
        layers,
        seed,
        threshold,
        update_rule,
        max_outer_iters,
        alpha_cap,
        max_evals,
        x_tol,
        f_tol,
        baseline
    )
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        origin: path.display().to_string(),
        message: format!("line {}, column {}: {e}", e.line(), e.column()),
    })
}

fn build_config(
    o: &SolveOptions,
    graph: pce_core::graph::WeightedGraph,
    c: usize,
) -> Result<PceConfig> {
    let seed = o.seed.unwrap_or(0);
    let mut cfg = match o.alpha_mode.unwrap_or(ModeArg::Iterative) {
        ModeArg::Fixed => {
            let alpha = o.alpha.ok_or_else(|| {
                Error::Invalid("--alpha is required with --alpha-mode fixed".into())
            })?;
            PceConfig::fixed(graph, c, alpha, seed)?
        }
        ModeArg::Iterative => {
            let n = graph.n();
            let mut cfg = PceConfig::iterative_defaults(graph, c, seed)?;
            if let Some(a) = o.alpha {
                cfg.objective.alpha = a;
            }
            let d = IterativeSettings::default_for(n);
            cfg.alpha_mode = AlphaMode::Iterative(IterativeSettings {
                threshold: o.threshold.unwrap_or(d.threshold),
                update_rule: match o.update_rule {
                    Some(RuleArg::ArctanhRatio) => UpdateRule::ArctanhRatio,
                    Some(RuleArg::LargeScale) => UpdateRule::LargeScale,
                    None => d.update_rule,
                },
                max_outer_iters: o.max_outer_iters.unwrap_or(d.max_outer_iters),
                alpha_cap: o.alpha_cap.unwrap_or(d.alpha_cap),
            });
            cfg
        }
    };
    if let Some(b) = o.beta {
        cfg.objective.beta = b;
    }
    if let Some(e) = o.eta {
        cfg.objective.eta = e;
    }
    if let Some(l) = o.layers {
        cfg.layers = l;
    }
    if o.max_evals.is_some() {
        cfg.optimizer.max_evals = o.max_evals;
    }
    if let Some(t) = o.x_tol {
        cfg.optimizer.x_tol = t;
    }
    if let Some(t) = o.f_tol {
        cfg.optimizer.f_tol = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn solve_cmd(a: SolveArgs) -> Result<ExitCode> {
    let file = match &a.config {
        Some(p) => read_json::<SolveOptions>(p)?,
        None => SolveOptions::default(),
    };
    let o = merge(a.opts, file);
    let graph_path = o
        .graph
        .clone()
        .ok_or_else(|| Error::Invalid("--graph is required".into()))?;
    let c =
        o.c.ok_or_else(|| Error::Invalid("--c is required".into()))?;
    let g = read_graph(&graph_path)?;
    let baseline = match baseline_method(o.baseline.unwrap_or(BaselineKind::Sa), 0) {
        Some(m) => Some(compute_baseline(&g, c, &m)?),
        None => None,
    };
    let fingerprint = fingerprint_hex(&g);
    let cfg = build_config(&o, g, c)?;
    let rec = single_record(cfg, fingerprint, c, baseline);
    let text = if a.pretty {
        serde_json::to_string_pretty(&rec)?
    } else {
        serde_json::to_string(&rec)?
    };
    println!("{text}");
    Ok(if rec.succeeded() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn single_record(
    cfg: PceConfig,
    fingerprint: String,
    c: usize,
    baseline: Option<Baseline>,
) -> RunRecord {
    let start = Instant::now();
    let result = solve(&cfg);
    let wall = start.elapsed().as_secs_f64();
    let label = match cfg.alpha_mode {
        AlphaMode::Fixed => format!("pce(alpha={})", cfg.objective.alpha),
        AlphaMode::Iterative(_) => "iterative".to_string(),
    };
    let (outcome, error) = match result {
        Ok(o) => (Some(o), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let metrics = outcome.as_ref().map(|o| RunMetrics {
        feasible: o.feasible,
        binarization: binarization(&o.soft),
        normalized_cut: baseline
            .as_ref()
            .filter(|_| o.feasible)
            .and_then(|b| normalized_cut(o.cut, b.cut).ok()),
    });
    RunRecord {
        version: VERSION.to_string(),
        run_id: 0,
        pair_id: None,
        graph_index: 0,
        graph_fingerprint: fingerprint,
        n: cfg.objective.graph.n(),
        c,
        repetition: 0,
        label,
        role: RunRole::Single,
        ansatz: cfg.ansatz().map(|a| a.describe()).unwrap_or_default(),
        config: cfg,
        outcome,
        metrics,
        baseline,
        wall_time_s: wall,
        error,
    }
}

fn bench(a: BenchArgs) -> Result<ExitCode> {
    let plan = ExperimentPlan::read(&a.plan)?;
    fs::create_dir_all(&a.out).map_err(io_error(&a.out))?;
    let mut cache = BaselineCache::open(a.cache.unwrap_or_else(|| a.out.join("baselines.json")))?;
    let records_path = a.out.join("records.jsonl");
    let opts = RunOptions {
        workers: a.workers,
        records_path: Some(records_path.clone()),
        plan_dir: a.plan.parent().map(Path::to_path_buf),
    };
    let records = run_plan(&plan, &mut cache, &opts)?;
    // The report is built from what was written, not from memory.
    let written = read_records(&records_path)?;
    write_outputs(
        &written,
        &a.out,
        &[
            ReportFormat::Json,
            ReportFormat::Csv,
            ReportFormat::Markdown,
        ],
    )?;
    let failed = records.iter().filter(|r| !r.succeeded()).count();
    eprintln!(
        "{} runs, {failed} failed; results in {}",
        records.len(),
        a.out.display()
    );
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn write_outputs(records: &[RunRecord], out: &Path, formats: &[ReportFormat]) -> Result<()> {
    let report = aggregate(records);
    for f in formats {
        emit_report(&report, *f, out)?;
    }
    for (name, body) in [
        ("plot_data.csv", plot_data_csv(records)),
        ("history.csv", history_csv(records)),
    ] {
        let path = out.join(name);
        fs::write(&path, body).map_err(io_error(&path))?;
    }
    Ok(())
}

fn report(a: ReportArgs) -> Result<ExitCode> {
    let records = read_records(&a.records)?;
    let formats = if a.format.is_empty() {
        vec![
            ReportFormat::Json,
            ReportFormat::Csv,
            ReportFormat::Markdown,
        ]
    } else {
        a.format
    };
    fs::create_dir_all(&a.out).map_err(io_error(&a.out))?;
    write_outputs(&records, &a.out, &formats)?;
    Ok(ExitCode::SUCCESS)
}

fn replay(a: ReplayArgs) -> Result<ExitCode> {
    let records = read_records(&a.records)?;
    let mut mismatches = 0;
    let mut checked = 0;
    for rec in records.iter().filter(|r| r.outcome.is_some()) {
        checked += 1;
        let again = rec.replay()?;
        if Some(&again) != rec.outcome.as_ref() {
            mismatches += 1;
            eprintln!("run {}: outcome differs on replay", rec.run_id);
        }
    }
    println!("{checked} records replayed, {mismatches} mismatches");
    Ok(if mismatches == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
