//! Fixed-α PCE and the iterative-α schedule.
//!
//! A fixed-α run draws random circuit parameters, minimizes the loss once and
//! decodes the signs of the final expectation values. The iterative schedule
//! repeats the minimization, warm-started from the previous parameters, and
//! raises α after each pass until every soft label satisfies
//! `|tanh(α⟨Π_i⟩)| ≥ M`. The multiplier is taken from the unsaturated label
//! closest to the threshold:
//!
//! ```text
//! arctanh ratio:  α ← α · artanh(M) / artanh(|v*|)
//! large scale:    α ← α · artanh(M) / |v*|
//! ```

use alloc::vec;
use alloc::vec::Vec;

use crate::encoding::PauliString;
use crate::error::{param_error, Result};
use crate::graph::{CutAssignment, WeightedGraph};
use crate::metrics::binarization;
use crate::objective::{is_feasible, relaxed_loss, soft_values, ObjectiveSpec, SoftAssignment};
use crate::optimize::{minimize, random_init, OptimizerConfig};
use crate::quantum::{BrickworkAnsatz, QuantumState};

/// Added to a run's seed to seed its fixed-α control run.
pub const CONTROL_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

/// Soft values are clamped into `[ε, 1 − ε]` before the α update.
const CLAMP_EPS: f64 = 1e-12;

/// Multipliers below `1 + STALL_TOL` are flagged as stalled updates.
pub const STALL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum UpdateRule {
    ArctanhRatio,
    LargeScale,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterativeSettings {
    /// Saturation threshold `M`.
    pub threshold: f64,
    pub update_rule: UpdateRule,
    pub max_outer_iters: usize,
    pub alpha_cap: f64,
}

impl IterativeSettings {
    /// Threshold 0.90 with the arctanh-ratio rule up to 25 nodes; the
    /// large-scale rule above that, and threshold 0.95 from 150 nodes on.
    pub fn default_for(n: usize) -> Self {
        Self {
            threshold: if n >= 150 { 0.95 } else { 0.90 },
            update_rule: if n <= 25 {
                UpdateRule::ArctanhRatio
            } else {
                UpdateRule::LargeScale
            },
            max_outer_iters: 50,
            alpha_cap: 1e16,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(param_error(alloc::format!(
                "threshold {} outside (0, 1)",
                self.threshold
            )));
        }
        if self.max_outer_iters == 0 {
            return Err(param_error("need at least one outer iteration"));
        }
        if !(self.alpha_cap > 0.0) {
            return Err(param_error("alpha cap must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "mode", rename_all = "snake_case")
)]
pub enum AlphaMode {
    Fixed,
    Iterative(IterativeSettings),
}

/// Complete description of one solve. Replaying it reproduces the outcome.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PceConfig {
    /// Loss definition; `objective.alpha` is the fixed α, or the starting α
    /// of the iterative schedule.
    pub objective: ObjectiveSpec,
    pub layers: usize,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
    pub alpha_mode: AlphaMode,
}

impl PceConfig {
    /// Iterative-α defaults for a budget-`c` cut of `graph`: starting α of 3
    /// (1 from 150 nodes on), `β = β_c`, one ansatz layer.
    pub fn iterative_defaults(graph: WeightedGraph, c: usize, seed: u64) -> Result<Self> {
        let n = graph.n();
        let alpha0 = if n >= 150 { 1.0 } else { 3.0 };
        Ok(Self {
            objective: ObjectiveSpec::new(graph, c, alpha0)?,
            layers: 1,
            optimizer: OptimizerConfig::default(),
            seed,
            alpha_mode: AlphaMode::Iterative(IterativeSettings::default_for(n)),
        })
    }

    /// Fixed-α run with otherwise default settings.
    pub fn fixed(graph: WeightedGraph, c: usize, alpha: f64, seed: u64) -> Result<Self> {
        Ok(Self {
            objective: ObjectiveSpec::new(graph, c, alpha)?,
            layers: 1,
            optimizer: OptimizerConfig::default(),
            seed,
            alpha_mode: AlphaMode::Fixed,
        })
    }

    pub fn ansatz(&self) -> Result<BrickworkAnsatz> {
        BrickworkAnsatz::new(self.objective.encoding.qubits, self.layers)
    }

    pub fn validate(&self) -> Result<()> {
        self.objective.validate()?;
        let ansatz = self.ansatz()?;
        self.optimizer.validate(ansatz.parameter_count())?;
        if let AlphaMode::Iterative(s) = &self.alpha_mode {
            s.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum ExitReason {
    /// Single minimization at a fixed α.
    FixedAlpha,
    /// Every soft label reached the threshold.
    Binarized,
    /// The next α would exceed the cap.
    AlphaCap,
    /// The outer-iteration cap was reached.
    MaxOuterIters,
}

/// One pass of the iterative schedule.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationRecord {
    /// 1-based pass index.
    pub iter: usize,
    /// α used for this pass.
    pub alpha: f64,
    pub loss: f64,
    pub binarization: f64,
    /// Number of `-1` labels after decoding.
    pub minus_count: usize,
    pub evals: usize,
    pub optimizer_converged: bool,
    /// Ratio of the next α to this one; `None` on the final pass.
    pub multiplier: Option<f64>,
    pub stalled: bool,
    pub soft: SoftAssignment,
    pub theta_start: Vec<f64>,
    pub theta_end: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveOutcome {
    pub z: CutAssignment,
    pub soft: SoftAssignment,
    pub feasible: bool,
    pub cut: f64,
    pub final_alpha: f64,
    /// Number of minimization passes (1 for a fixed-α run).
    pub outer_iters: usize,
    pub inner_evals: usize,
    pub theta_final: Vec<f64>,
    pub loss_final: f64,
    pub exit: ExitReason,
    pub optimizer_converged: bool,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Vec::is_empty")
    )]
    pub history: Vec<IterationRecord>,
}

impl SolveOutcome {
    pub fn binarization(&self) -> f64 {
        binarization(&self.soft)
    }
}

/// Circuit, strings and scratch buffers for repeated loss evaluation.
struct LossEvaluator<'a> {
    spec: &'a ObjectiveSpec,
    ansatz: BrickworkAnsatz,
    strings: Vec<PauliString>,
    state: QuantumState,
    expectations: Vec<f64>,
    soft: Vec<f64>,
}

impl<'a> LossEvaluator<'a> {
    fn new(spec: &'a ObjectiveSpec, ansatz: BrickworkAnsatz) -> Result<Self> {
        let strings = spec.encoding.enumerate_strings()?;
        let n = strings.len();
        Ok(Self {
            spec,
            ansatz,
            strings,
            state: QuantumState::zero(ansatz.qubits),
            expectations: vec![0.0; n],
            soft: vec![0.0; n],
        })
    }

    fn expectations(&mut self, theta: &[f64]) -> Result<&[f64]> {
        self.ansatz.prepare_into(theta, &mut self.state)?;
        self.state
            .expectations_into(&self.strings, &mut self.expectations)?;
        Ok(&self.expectations)
    }

    fn loss(&mut self, theta: &[f64], alpha: f64) -> f64 {
        if self.expectations(theta).is_err() {
            return f64::NAN;
        }
        for (s, e) in self.soft.iter_mut().zip(&self.expectations) {
            *s = libm::tanh(alpha * e);
        }
        let spec = self.spec;
        relaxed_loss(&spec.graph, &self.soft, spec.beta, spec.c, spec.eta)
    }

    fn minimize(
        &mut self,
        theta0: &[f64],
        alpha: f64,
        cfg: &OptimizerConfig,
    ) -> Result<crate::optimize::OptimizeResult> {
        minimize(|theta| self.loss(theta, alpha), theta0, cfg)
    }

    fn soft(&mut self, theta: &[f64], alpha: f64) -> Result<SoftAssignment> {
        let e = self.expectations(theta)?;
        Ok(soft_values(e, alpha))
    }
}

/// Runs the configured schedule.
pub fn solve(cfg: &PceConfig) -> Result<SolveOutcome> {
    match cfg.alpha_mode {
        AlphaMode::Fixed => solve_pce(cfg),
        AlphaMode::Iterative(_) => solve_iterative(cfg),
    }
}

/// One minimization at `cfg.objective.alpha` from a seeded random start.
pub fn solve_pce(cfg: &PceConfig) -> Result<SolveOutcome> {
    cfg.validate()?;
    let ansatz = cfg.ansatz()?;
    let alpha = cfg.objective.alpha;
    let mut eval = LossEvaluator::new(&cfg.objective, ansatz)?;
    let theta0 = random_init(ansatz.parameter_count(), cfg.seed);
    let res = eval.minimize(&theta0, alpha, &cfg.optimizer)?;
    let soft = eval.soft(&res.best_params, alpha)?;
    finish(
        cfg,
        soft,
        alpha,
        1,
        res.evals,
        res.best_params,
        res.best_value,
        ExitReason::FixedAlpha,
        res.converged,
        Vec::new(),
    )
}

/// Iterative-α schedule with warm starts between passes.
pub fn solve_iterative(cfg: &PceConfig) -> Result<SolveOutcome> {
    cfg.validate()?;
    let AlphaMode::Iterative(settings) = cfg.alpha_mode else {
        return Err(param_error("solve_iterative needs an iterative alpha mode"));
    };
    let ansatz = cfg.ansatz()?;
    let mut eval = LossEvaluator::new(&cfg.objective, ansatz)?;
    let mut theta = random_init(ansatz.parameter_count(), cfg.seed);
    let mut alpha = cfg.objective.alpha;
    let mut history: Vec<IterationRecord> = Vec::new();
    let mut total_evals = 0;

    let exit = loop {
        let res = eval.minimize(&theta, alpha, &cfg.optimizer)?;
        total_evals += res.evals;
        let soft = eval.soft(&res.best_params, alpha)?;
        let update = alpha_update(&soft, alpha, settings.threshold, settings.update_rule);
        let mut record = IterationRecord {
            iter: history.len() + 1,
            alpha,
            loss: res.best_value,
            binarization: binarization(&soft),
            minus_count: soft.decode().partition_count().0,
            evals: res.evals,
            optimizer_converged: res.converged,
            multiplier: None,
            stalled: false,
            soft,
            theta_start: core::mem::replace(&mut theta, res.best_params.clone()),
            theta_end: res.best_params,
        };

        let exit = match update {
            None => Some(ExitReason::Binarized),
            Some(next) => {
                let multiplier = next / alpha;
                record.multiplier = Some(multiplier);
                record.stalled = multiplier < 1.0 + STALL_TOL;
                if !(next <= settings.alpha_cap) {
                    Some(ExitReason::AlphaCap)
                } else if history.len() + 1 >= settings.max_outer_iters {
                    Some(ExitReason::MaxOuterIters)
                } else {
                    alpha = next;
                    None
                }
            }
        };
        history.push(record);
        if let Some(exit) = exit {
            break exit;
        }
    };

    let last = history.last().expect("at least one pass runs");
    let (soft, loss, converged, final_alpha) = (
        last.soft.clone(),
        last.loss,
        last.optimizer_converged,
        last.alpha,
    );
    finish(
        cfg,
        soft,
        final_alpha,
        history.len(),
        total_evals,
        theta,
        loss,
        exit,
        converged,
        history,
    )
}

/// Control run for an iterative outcome: a fresh fixed-α run at the final α
/// reached, seeded with `cfg.seed + CONTROL_SEED_OFFSET`.
pub fn solve_pce_at_final_alpha(iterative: &SolveOutcome, cfg: &PceConfig) -> Result<SolveOutcome> {
    solve_pce(&control_config(iterative, cfg))
}

/// The configuration [`solve_pce_at_final_alpha`] runs.
pub fn control_config(iterative: &SolveOutcome, cfg: &PceConfig) -> PceConfig {
    let mut control = cfg.clone();
    control.objective.alpha = iterative.final_alpha;
    control.alpha_mode = AlphaMode::Fixed;
    control.seed = cfg.seed.wrapping_add(CONTROL_SEED_OFFSET);
    control
}

#[allow(clippy::too_many_arguments)]
fn finish(
    cfg: &PceConfig,
    soft: SoftAssignment,
    final_alpha: f64,
    outer_iters: usize,
    inner_evals: usize,
    theta_final: Vec<f64>,
    loss_final: f64,
    exit: ExitReason,
    optimizer_converged: bool,
    history: Vec<IterationRecord>,
) -> Result<SolveOutcome> {
    let z = soft.decode();
    let cut = cfg.objective.graph.cut_size(&z)?;
    Ok(SolveOutcome {
        feasible: is_feasible(&z, cfg.objective.c),
        z,
        soft,
        cut,
        final_alpha,
        outer_iters,
        inner_evals,
        theta_final,
        loss_final,
        exit,
        optimizer_converged,
        history,
    })
}

/// Index of the unsaturated label closest to the threshold, or `None` when
/// every `|v_i| ≥ threshold`. Ties go to the lowest index.
pub fn pivot_index(soft: &SoftAssignment, threshold: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in soft.values().iter().enumerate() {
        let a = v.abs();
        if a < threshold {
            let gap = threshold - a;
            if best.map_or(true, |(_, g)| gap < g) {
                best = Some((i, gap));
            }
        }
    }
    best.map(|(i, _)| i)
}

fn alpha_update(
    soft: &SoftAssignment,
    alpha: f64,
    threshold: f64,
    rule: UpdateRule,
) -> Option<f64> {
    let i = pivot_index(soft, threshold)?;
    let v = soft.values()[i].abs().clamp(CLAMP_EPS, 1.0 - CLAMP_EPS);
    let target = libm::atanh(threshold);
    let multiplier = match rule {
        UpdateRule::ArctanhRatio => target / libm::atanh(v),
        UpdateRule::LargeScale => target / v,
    };
    Some(alpha * multiplier)
}

/// Next α of the schedule; returns `alpha` unchanged when every label is
/// already saturated.
pub fn next_alpha(soft: &SoftAssignment, alpha: f64, threshold: f64, rule: UpdateRule) -> f64 {
    alpha_update(soft, alpha, threshold, rule).unwrap_or(alpha)
}
