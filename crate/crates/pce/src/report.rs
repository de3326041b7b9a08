//! Aggregation of run records into tables and plot data.
//!
//! Reports are always rebuilt from records. CutSize averages only ever see
//! feasible runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use pce_core::metrics::epsilon_c;
use serde::{Deserialize, Serialize};

use crate::error::{io_error, Result};
use crate::harness::{RunRecord, RunRole};

/// Placeholder for an aggregate over an empty set.
pub const EMPTY_CELL: &str = "−";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub graph_index: usize,
    pub n: usize,
    /// `None` when the row covers every budget of the graph.
    pub c: Option<usize>,
    pub label: String,
    pub runs: usize,
    pub failed: usize,
    pub epsilon_c: Option<f64>,
    pub binarization: Option<f64>,
    /// Mean over feasible runs only.
    pub normalized_cut: Option<f64>,
    pub outer_iters: Option<f64>,
    pub median_final_alpha: Option<f64>,
}

/// Paired outcomes of iterative runs and their controls for one graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContingencyRow {
    pub graph_index: usize,
    pub n: usize,
    pub pairs: usize,
    pub both: usize,
    pub iterative_only: usize,
    pub control_only: usize,
    pub neither: usize,
}

impl ContingencyRow {
    fn percent(&self, count: usize) -> f64 {
        if self.pairs == 0 {
            0.0
        } else {
            100.0 * count as f64 / self.pairs as f64
        }
    }

    /// `(iterative ok, control ok, percentage)` in table order.
    pub fn cells(&self) -> [(bool, bool, f64); 4] {
        [
            (true, true, self.percent(self.both)),
            (true, false, self.percent(self.iterative_only)),
            (false, true, self.percent(self.control_only)),
            (false, false, self.percent(self.neither)),
        ]
    }
}

/// Mean normalized cut over pairs where both runs are feasible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutComparisonRow {
    pub graph_index: usize,
    pub n: usize,
    pub matched_pairs: usize,
    pub iterative: Option<f64>,
    pub control: Option<f64>,
    /// `(iterative − control) / control × 100`.
    pub delta_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub total_runs: usize,
    pub failed_runs: usize,
    pub groups: Vec<GroupSummary>,
    pub cells: Vec<GroupSummary>,
    pub contingency: Vec<ContingencyRow>,
    pub cut_comparison: Vec<CutComparisonRow>,
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values
        .into_iter()
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn median(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    })
}

fn summarize(
    graph_index: usize,
    n: usize,
    c: Option<usize>,
    label: &str,
    recs: &[&RunRecord],
) -> GroupSummary {
    let ok: Vec<&RunRecord> = recs.iter().copied().filter(|r| r.succeeded()).collect();
    let metrics = || ok.iter().filter_map(|r| r.metrics.as_ref());
    let outcomes = || ok.iter().filter_map(|r| r.outcome.as_ref());
    GroupSummary {
        graph_index,
        n,
        c,
        label: label.to_string(),
        runs: recs.len(),
        failed: recs.len() - ok.len(),
        epsilon_c: epsilon_c(metrics().map(|m| m.feasible)).ok(),
        binarization: mean(metrics().map(|m| m.binarization)),
        normalized_cut: mean(
            metrics()
                .filter(|m| m.feasible)
                .filter_map(|m| m.normalized_cut),
        ),
        outer_iters: mean(outcomes().map(|o| o.outer_iters as f64)),
        median_final_alpha: median(outcomes().map(|o| o.final_alpha).collect()),
    }
}

pub fn aggregate(records: &[RunRecord]) -> AggregateReport {
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.run_id);

    let mut groups: BTreeMap<(usize, usize, String), Vec<&RunRecord>> = BTreeMap::new();
    let mut cells: BTreeMap<(usize, usize, usize, String), Vec<&RunRecord>> = BTreeMap::new();
    for r in &sorted {
        groups
            .entry((r.graph_index, r.n, r.label.clone()))
            .or_default()
            .push(r);
        cells
            .entry((r.graph_index, r.n, r.c, r.label.clone()))
            .or_default()
            .push(r);
    }

    let by_id: BTreeMap<usize, &RunRecord> = sorted.iter().map(|r| (r.run_id, *r)).collect();
    let mut contingency: BTreeMap<(usize, usize), ContingencyRow> = BTreeMap::new();
    let mut matched: BTreeMap<(usize, usize), Vec<(f64, f64)>> = BTreeMap::new();
    for ctl in sorted.iter().filter(|r| r.role == RunRole::Control) {
        let Some(it) = ctl.pair_id.and_then(|id| by_id.get(&id)) else {
            continue;
        };
        let (Some(mi), Some(mc)) = (&it.metrics, &ctl.metrics) else {
            continue;
        };
        let row = contingency
            .entry((it.graph_index, it.n))
            .or_insert(ContingencyRow {
                graph_index: it.graph_index,
                n: it.n,
                pairs: 0,
                both: 0,
                iterative_only: 0,
                control_only: 0,
                neither: 0,
            });
        row.pairs += 1;
        match (mi.feasible, mc.feasible) {
            (true, true) => row.both += 1,
            (true, false) => row.iterative_only += 1,
            (false, true) => row.control_only += 1,
            (false, false) => row.neither += 1,
        }
        if let (Some(a), Some(b)) = (mi.normalized_cut, mc.normalized_cut) {
            matched
                .entry((it.graph_index, it.n))
                .or_default()
                .push((a, b));
        }
    }

    let cut_comparison = contingency
        .keys()
        .map(|&(gi, n)| {
            let pairs = matched.get(&(gi, n)).map(Vec::as_slice).unwrap_or(&[]);
            let iterative = mean(pairs.iter().map(|p| p.0));
            let control = mean(pairs.iter().map(|p| p.1));
            CutComparisonRow {
                graph_index: gi,
                n,
                matched_pairs: pairs.len(),
                iterative,
                control,
                delta_percent: iterative.zip(control).map(|(i, c)| (i - c) / c * 100.0),
            }
        })
        .collect();

    AggregateReport {
        total_runs: records.len(),
        failed_runs: records.iter().filter(|r| !r.succeeded()).count(),
        groups: groups
            .iter()
            .map(|((gi, n, label), recs)| summarize(*gi, *n, None, label, recs))
            .collect(),
        cells: cells
            .iter()
            .map(|((gi, n, c, label), recs)| summarize(*gi, *n, Some(*c), label, recs))
            .collect(),
        contingency: contingency.into_values().collect(),
        cut_comparison,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "markdown" | "md" => Ok(Self::Markdown),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

/// Writes `report` into `dir` and returns the files created.
pub fn emit_report(
    report: &AggregateReport,
    format: ReportFormat,
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    let files: Vec<(&str, String)> = match format {
        ReportFormat::Json => vec![("report.json", serde_json::to_string_pretty(report)? + "\n")],
        ReportFormat::Csv => vec![
            ("summary.csv", summary_csv(&report.groups)),
            ("summary_by_c.csv", summary_csv(&report.cells)),
            ("contingency.csv", contingency_csv(report)),
            ("cut_comparison.csv", cut_comparison_csv(report)),
        ],
        ReportFormat::Markdown => vec![("report.md", markdown(report))],
    };
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(io_error(&path))?;
        written.push(path);
    }
    Ok(written)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn cell(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| EMPTY_CELL.to_string(), |x| format!("{x:.digits$}"))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn summary_csv(rows: &[GroupSummary]) -> String {
    let mut out = String::from(
        "graph_index,n,c,label,runs,failed,epsilon_c,binarization,normalized_cut,outer_iters,median_final_alpha\n",
    );
    for g in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            g.graph_index,
            g.n,
            g.c.map(|c| c.to_string()).unwrap_or_default(),
            csv_field(&g.label),
            g.runs,
            g.failed,
            opt(g.epsilon_c),
            opt(g.binarization),
            opt(g.normalized_cut),
            opt(g.outer_iters),
            opt(g.median_final_alpha),
        );
    }
    out
}

fn contingency_csv(report: &AggregateReport) -> String {
    let mut out = String::from("graph_index,n,iterative_feasible,control_feasible,percent,pairs\n");
    for row in &report.contingency {
        for (i, c, pct) in row.cells() {
            let _ = writeln!(
                out,
                "{},{},{i},{c},{pct},{}",
                row.graph_index, row.n, row.pairs
            );
        }
    }
    out
}

fn cut_comparison_csv(report: &AggregateReport) -> String {
    let mut out = String::from("graph_index,n,matched_pairs,iterative,control,delta_percent\n");
    for r in &report.cut_comparison {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.graph_index,
            r.n,
            r.matched_pairs,
            opt(r.iterative),
            opt(r.control),
            opt(r.delta_percent)
        );
    }
    out
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "✓"
    } else {
        "×"
    }
}

pub fn markdown(report: &AggregateReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "## Summary\n");
    let _ = writeln!(
        out,
        "| Nodes | Solver | ε_c | Binarization | CutSize | Iterations | Runs |"
    );
    let _ = writeln!(out, "|---:|:---|---:|---:|---:|---:|---:|");
    for g in &report.groups {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} |",
            g.n,
            g.label,
            cell(g.epsilon_c, 2),
            cell(g.binarization, 2),
            cell(g.normalized_cut, 2),
            cell(g.outer_iters, 1),
            g.runs
        );
    }
    if !report.contingency.is_empty() {
        let _ = writeln!(out, "\n## Constraint satisfaction, paired runs\n");
        let _ = writeln!(out, "| Nodes | Iterative-α | PCE (α_f) | % |");
        let _ = writeln!(out, "|---:|:---:|:---:|---:|");
        for row in &report.contingency {
            for (i, c, pct) in row.cells() {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {:.0}% |",
                    row.n,
                    mark(i),
                    mark(c),
                    pct
                );
            }
        }
        let _ = writeln!(out, "\n## CutSize over matched feasible pairs\n");
        let _ = writeln!(out, "| Nodes | Iterative-α | PCE (α_f) | Δ (%) |");
        let _ = writeln!(out, "|---:|---:|---:|---:|");
        for r in &report.cut_comparison {
            let delta = r
                .delta_percent
                .map_or_else(|| EMPTY_CELL.to_string(), |d| format!("{d:.2} %"));
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} |",
                r.n,
                cell(r.iterative, 4),
                cell(r.control, 4),
                delta
            );
        }
    }
    if report.failed_runs > 0 {
        let _ = writeln!(
            out,
            "\n{} of {} runs failed.",
            report.failed_runs, report.total_runs
        );
    }
    out
}

/// One row per run: the tidy form behind the α-sweep, β and regularization
/// plots.
pub fn plot_data_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(
        "run_id,graph_index,n,c,label,role,seed,alpha,beta,eta,feasible,binarization,cut,normalized_cut,outer_iters,final_alpha,wall_time_s,error\n",
    );
    for r in records {
        let o = r.outcome.as_ref();
        let m = r.metrics.as_ref();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.run_id,
            r.graph_index,
            r.n,
            r.c,
            csv_field(&r.label),
            r.role.as_str(),
            r.config.seed,
            r.config.objective.alpha,
            r.config.objective.beta,
            r.config.objective.eta,
            m.map(|m| m.feasible.to_string()).unwrap_or_default(),
            opt(m.map(|m| m.binarization)),
            opt(o.map(|o| o.cut)),
            opt(m.and_then(|m| m.normalized_cut)),
            o.map(|o| o.outer_iters.to_string()).unwrap_or_default(),
            opt(o.map(|o| o.final_alpha)),
            r.wall_time_s,
            csv_field(r.error.as_deref().unwrap_or("")),
        );
    }
    out
}

/// Per-iteration history of every iterative run.
pub fn history_csv(records: &[RunRecord]) -> String {
    let mut out =
        String::from("run_id,n,c,iter,alpha,loss,binarization,minus_count,minus_over_c,stalled\n");
    for r in records {
        let Some(o) = &r.outcome else { continue };
        for h in &o.history {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.run_id,
                r.n,
                r.c,
                h.iter,
                h.alpha,
                h.loss,
                h.binarization,
                h.minus_count,
                h.minus_count as f64 / r.c as f64,
                h.stalled
            );
        }
    }
    out
}
