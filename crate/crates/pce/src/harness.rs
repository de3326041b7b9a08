//! Experiment plans, run records and the concurrent plan runner.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::Instant;

use pce_core::graph::{GraphGenerator, WeightedGraph};
use pce_core::metrics::binarization;
use pce_core::optimize::OptimizerConfig;
use pce_core::oracles::{exhaustive_best, normalized_cut, sa_solve, SaConfig};
use pce_core::solver::{
    control_config, solve, AlphaMode, IterativeSettings, PceConfig, SolveOutcome, UpdateRule,
};
use serde::{Deserialize, Serialize};

use crate::error::{format_error, io_error, Error, Result};
use crate::io::read_graph;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphSource {
    Generate(GraphGenerator),
    /// Relative paths resolve against the plan file's directory.
    File(PathBuf),
}

impl GraphSource {
    pub fn load(&self, base_dir: Option<&Path>) -> Result<WeightedGraph> {
        match self {
            Self::Generate(gen) => Ok(gen.generate()?),
            Self::File(p) => match base_dir {
                Some(dir) if p.is_relative() => read_graph(dir.join(p)),
                _ => read_graph(p),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverSpec {
    /// Standard PCE at a fixed α.
    Fixed { alpha: f64 },
    /// Iterative-α PCE. Unset fields take the size-dependent defaults.
    Iterative {
        #[serde(default)]
        alpha0: Option<f64>,
        #[serde(default)]
        threshold: Option<f64>,
        #[serde(default)]
        update_rule: Option<UpdateRule>,
        #[serde(default)]
        max_outer_iters: Option<usize>,
        #[serde(default)]
        alpha_cap: Option<f64>,
        /// Also run a fixed-α control at each run's final α.
        #[serde(default = "yes")]
        paired_control: bool,
    },
}

fn yes() -> bool {
    true
}

impl SolverSpec {
    pub fn iterative() -> Self {
        Self::Iterative {
            alpha0: None,
            threshold: None,
            update_rule: None,
            max_outer_iters: None,
            alpha_cap: None,
            paired_control: true,
        }
    }

    /// Short name used to group records in reports.
    pub fn label(&self) -> String {
        match self {
            Self::Fixed { alpha } => format!("pce(alpha={alpha})"),
            Self::Iterative { .. } => "iterative".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum BaselineMethod {
    Sa(SaConfig),
    Exhaustive,
}

impl Default for BaselineMethod {
    fn default() -> Self {
        Self::Sa(SaConfig::default())
    }
}

impl BaselineMethod {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Sa(_) => "sa",
            Self::Exhaustive => "exhaustive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    #[serde(default)]
    pub name: String,
    pub graphs: Vec<GraphSource>,
    /// Budgets to run; `None` means `2..=n/2` per graph (`[1]` below 4 nodes).
    #[serde(default)]
    pub c_values: Option<Vec<usize>>,
    #[serde(default = "ten")]
    pub repetitions: usize,
    pub solvers: Vec<SolverSpec>,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default = "one")]
    pub layers: usize,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    /// Penalty strength; `None` uses β_c.
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub baseline: BaselineMethod,
}

fn ten() -> usize {
    10
}

fn one() -> usize {
    1
}

impl ExperimentPlan {
    pub fn new(graphs: Vec<GraphSource>, solvers: Vec<SolverSpec>) -> Self {
        Self {
            name: String::new(),
            graphs,
            c_values: None,
            repetitions: 10,
            solvers,
            seed_base: 0,
            layers: 1,
            optimizer: OptimizerConfig::default(),
            beta: None,
            eta: 0.0,
            baseline: BaselineMethod::default(),
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(io_error(path))?;
        serde_json::from_str(&text).map_err(|e| {
            format_error(
                path.display().to_string(),
                format!("line {}, column {}: {e}", e.line(), e.column()),
            )
        })
    }

    pub fn c_values_for(&self, n: usize) -> Vec<usize> {
        match &self.c_values {
            Some(cs) => cs.clone(),
            None if n >= 4 => (2..=n / 2).collect(),
            None => vec![1],
        }
    }

    fn validate(&self, graphs: &[WeightedGraph]) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Invalid("repetitions must be at least 1".into()));
        }
        if self.solvers.is_empty() || self.graphs.is_empty() {
            return Err(Error::Invalid(
                "plan needs at least one graph and one solver".into(),
            ));
        }
        for g in graphs {
            for c in self.c_values_for(g.n()) {
                if c == 0 || c > g.n() / 2 {
                    return Err(Error::Invalid(format!(
                        "c = {c} outside [1, {}] for an {}-node graph",
                        g.n() / 2,
                        g.n()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Configuration of one planned run.
    pub fn config(
        &self,
        graph: &WeightedGraph,
        c: usize,
        solver: &SolverSpec,
        seed: u64,
    ) -> Result<PceConfig> {
        let mut cfg = match solver {
            SolverSpec::Fixed { alpha } => PceConfig::fixed(graph.clone(), c, *alpha, seed)?,
            SolverSpec::Iterative {
                alpha0,
                threshold,
                update_rule,
                max_outer_iters,
                alpha_cap,
                ..
            } => {
                let mut cfg = PceConfig::iterative_defaults(graph.clone(), c, seed)?;
                if let Some(a) = alpha0 {
                    cfg.objective.alpha = *a;
                }
                let d = IterativeSettings::default_for(graph.n());
                cfg.alpha_mode = AlphaMode::Iterative(IterativeSettings {
                    threshold: threshold.unwrap_or(d.threshold),
                    update_rule: update_rule.unwrap_or(d.update_rule),
                    max_outer_iters: max_outer_iters.unwrap_or(d.max_outer_iters),
                    alpha_cap: alpha_cap.unwrap_or(d.alpha_cap),
                });
                cfg
            }
        };
        cfg.layers = self.layers;
        cfg.optimizer = self.optimizer.clone();
        if let Some(beta) = self.beta {
            cfg.objective.beta = beta;
        }
        cfg.objective.eta = self.eta;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunRole {
    Single,
    Iterative,
    Control,
}

impl RunRole {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Single => "single",
            Self::Iterative => "iterative",
            Self::Control => "control",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub cut: f64,
    pub method: String,
    pub optimal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub feasible: bool,
    pub binarization: f64,
    /// Only for feasible runs with a positive baseline.
    pub normalized_cut: Option<f64>,
}

/// One execution. `config` alone reproduces `outcome`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub version: String,
    pub run_id: usize,
    /// Shared by an iterative run and its control.
    pub pair_id: Option<usize>,
    pub graph_index: usize,
    pub graph_fingerprint: String,
    pub n: usize,
    pub c: usize,
    pub repetition: usize,
    pub label: String,
    pub role: RunRole,
    pub ansatz: String,
    pub config: PceConfig,
    pub outcome: Option<SolveOutcome>,
    pub metrics: Option<RunMetrics>,
    pub baseline: Option<Baseline>,
    pub wall_time_s: f64,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn succeeded(&self) -> bool {
        self.outcome.is_some()
    }

    /// Reruns the stored configuration.
    pub fn replay(&self) -> Result<SolveOutcome> {
        Ok(solve(&self.config)?)
    }
}

pub fn fingerprint_hex(g: &WeightedGraph) -> String {
    format!("{:016x}", g.fingerprint())
}

/// Baseline cuts persisted between runs, keyed by `fingerprint:c`.
#[derive(Debug, Default, Serialize, Deserialize)]
pub struct BaselineCache {
    entries: BTreeMap<String, Baseline>,
    #[serde(skip)]
    path: Option<PathBuf>,
    #[serde(skip)]
    dirty: bool,
}

impl BaselineCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens the cache at `path`, starting empty when the file is missing.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let mut cache = match fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str::<Self>(&text)
                .map_err(|e| format_error(path.display().to_string(), e.to_string()))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Self::default(),
            Err(e) => return Err(io_error(&path)(e)),
        };
        cache.path = Some(path);
        Ok(cache)
    }

    fn key(g: &WeightedGraph, c: usize) -> String {
        format!("{}:{c}", fingerprint_hex(g))
    }

    /// Cached baseline, recomputed when missing or produced by another method.
    pub fn get_or_compute(
        &mut self,
        g: &WeightedGraph,
        c: usize,
        method: &BaselineMethod,
    ) -> Result<Baseline> {
        let key = Self::key(g, c);
        if let Some(b) = self.entries.get(&key) {
            if b.method == method.name() {
                return Ok(b.clone());
            }
        }
        let b = compute_baseline(g, c, method)?;
        self.entries.insert(key, b.clone());
        self.dirty = true;
        Ok(b)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn save(&mut self) -> Result<()> {
        if let (Some(path), true) = (&self.path, self.dirty) {
            let text = serde_json::to_string_pretty(&*self)?;
            fs::write(path, text + "\n").map_err(io_error(path))?;
            self.dirty = false;
        }
        Ok(())
    }
}

pub fn compute_baseline(g: &WeightedGraph, c: usize, method: &BaselineMethod) -> Result<Baseline> {
    let r = match method {
        BaselineMethod::Sa(cfg) => sa_solve(g, c, cfg)?,
        BaselineMethod::Exhaustive => exhaustive_best(g, c)?,
    };
    Ok(Baseline {
        cut: r.cut,
        method: method.name().to_string(),
        optimal: r.optimal,
    })
}

/// One unit of work: a single run, or an iterative run with its control.
struct Job {
    pair_base: usize,
    graph_index: usize,
    c: usize,
    repetition: usize,
    label: String,
    config: PceConfig,
    paired: bool,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
    /// Where records are streamed as JSON Lines.
    pub records_path: Option<PathBuf>,
    pub plan_dir: Option<PathBuf>,
}

/// Executes every cell of `plan`. Records are written as they complete and
/// returned sorted by `run_id`. Failures of individual solves are recorded,
/// not raised; an invalid plan is rejected before anything runs.
pub fn run_plan(
    plan: &ExperimentPlan,
    cache: &mut BaselineCache,
    opts: &RunOptions,
) -> Result<Vec<RunRecord>> {
    let graphs = plan
        .graphs
        .iter()
        .map(|s| s.load(opts.plan_dir.as_deref()))
        .collect::<Result<Vec<_>>>()?;
    plan.validate(&graphs)?;

    let mut baselines: BTreeMap<(usize, usize), Result<Baseline, String>> = BTreeMap::new();
    for (gi, g) in graphs.iter().enumerate() {
        for c in plan.c_values_for(g.n()) {
            let b = cache
                .get_or_compute(g, c, &plan.baseline)
                .map_err(|e| e.to_string());
            baselines.insert((gi, c), b);
        }
    }
    cache.save()?;

    let mut jobs = Vec::new();
    let mut next_id = 0;
    for (gi, g) in graphs.iter().enumerate() {
        for c in plan.c_values_for(g.n()) {
            for solver in &plan.solvers {
                for rep in 0..plan.repetitions {
                    let seed = plan.seed_base.wrapping_add(rep as u64);
                    let paired = matches!(
                        solver,
                        SolverSpec::Iterative {
                            paired_control: true,
                            ..
                        }
                    );
                    jobs.push(Job {
                        pair_base: next_id,
                        graph_index: gi,
                        c,
                        repetition: rep,
                        label: solver.label(),
                        config: plan.config(g, c, solver, seed)?,
                        paired,
                    });
                    next_id += if paired { 2 } else { 1 };
                }
            }
        }
    }

    let mut writer = match &opts.records_path {
        Some(p) => Some(BufWriter::new(fs::File::create(p).map_err(io_error(p))?)),
        None => None,
    };
    let workers = opts
        .workers
        .unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get()))
        .clamp(1, jobs.len().max(1));

    let cursor = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<RunRecord>();
    let mut records = Vec::with_capacity(next_id);
    thread::scope(|scope| -> Result<()> {
        for _ in 0..workers {
            let tx = tx.clone();
            let (jobs, cursor, graphs, baselines) = (&jobs, &cursor, &graphs, &baselines);
            scope.spawn(move || {
                while let Some(job) = jobs.get(cursor.fetch_add(1, Ordering::Relaxed)) {
                    let g = &graphs[job.graph_index];
                    let baseline = baselines[&(job.graph_index, job.c)].as_ref().ok();
                    for rec in execute(job, g, baseline) {
                        if tx.send(rec).is_err() {
                            return;
                        }
                    }
                }
            });
        }
        drop(tx);
        for rec in rx {
            if let Some(w) = writer.as_mut() {
                serde_json::to_writer(&mut *w, &rec)?;
                w.write_all(b"\n")
                    .map_err(io_error(opts.records_path.clone().unwrap_or_default()))?;
                w.flush()
                    .map_err(io_error(opts.records_path.clone().unwrap_or_default()))?;
            }
            records.push(rec);
        }
        Ok(())
    })?;
    records.sort_by_key(|r| r.run_id);
    Ok(records)
}

fn execute(job: &Job, g: &WeightedGraph, baseline: Option<&Baseline>) -> Vec<RunRecord> {
    let make = |run_id, role, label: String, config: PceConfig| RunRecord {
        version: VERSION.to_string(),
        run_id,
        pair_id: job.paired.then_some(job.pair_base),
        graph_index: job.graph_index,
        graph_fingerprint: fingerprint_hex(g),
        n: g.n(),
        c: job.c,
        repetition: job.repetition,
        label,
        role,
        ansatz: config.ansatz().map(|a| a.describe()).unwrap_or_default(),
        config,
        outcome: None,
        metrics: None,
        baseline: baseline.cloned(),
        wall_time_s: 0.0,
        error: None,
    };
    let config = job.config.clone();
    let role = if job.paired {
        RunRole::Iterative
    } else {
        RunRole::Single
    };
    let mut main = make(job.pair_base, role, job.label.clone(), config.clone());
    fill(&mut main, baseline);
    let mut out = vec![];
    if job.paired {
        if let Some(outcome) = &main.outcome {
            let ctl = control_config(outcome, &config);
            let mut rec = make(
                job.pair_base + 1,
                RunRole::Control,
                "control".to_string(),
                ctl,
            );
            fill(&mut rec, baseline);
            out.push(rec);
        } else {
            let mut rec = make(
                job.pair_base + 1,
                RunRole::Control,
                "control".to_string(),
                config,
            );
            rec.error = Some("iterative run failed, no final alpha for the control".into());
            out.push(rec);
        }
    }
    out.insert(0, main);
    out
}

fn fill(rec: &mut RunRecord, baseline: Option<&Baseline>) {
    let start = Instant::now();
    let result = solve(&rec.config);
    rec.wall_time_s = start.elapsed().as_secs_f64();
    match result {
        Ok(outcome) => {
            let normalized = match baseline {
                Some(b) if outcome.feasible => normalized_cut(outcome.cut, b.cut).ok(),
                _ => None,
            };
            rec.metrics = Some(RunMetrics {
                feasible: outcome.feasible,
                binarization: binarization(&outcome.soft),
                normalized_cut: normalized,
            });
            rec.outcome = Some(outcome);
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
}

pub fn write_records(records: &[RunRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = BufWriter::new(fs::File::create(path).map_err(io_error(path))?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(io_error(path))?;
    }
    w.flush().map_err(io_error(path))
}

/// Reads a JSON Lines record file. Blank lines are skipped.
pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(io_error(path))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_error(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| {
            format_error(path.display().to_string(), format!("line {}: {e}", idx + 1))
        })?;
        out.push(rec);
    }
    out.sort_by_key(|r: &RunRecord| r.run_id);
    Ok(out)
}
