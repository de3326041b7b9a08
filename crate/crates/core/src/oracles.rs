//! Classical reference solvers for the budget-constrained cut.
//!
//! Both solvers only ever visit assignments with exactly `c` nodes on the
//! `-1` side, so every result is feasible by construction.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encoding::next_combination;
use crate::error::{param_error, Error, Result};
use crate::graph::{CutAssignment, WeightedGraph};

/// Largest graph [`exhaustive_best`] accepts.
pub const EXHAUSTIVE_LIMIT: usize = 22;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(default)
)]
pub struct SaConfig {
    /// Starting temperature; `None` uses `max edge weight × n`.
    pub initial_temp: Option<f64>,
    /// Geometric cooling factor applied after every step.
    pub cooling: f64,
    /// Swap proposals per restart.
    pub steps: usize,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self {
            initial_temp: None,
            cooling: 0.995,
            steps: 20_000,
            seed: 0,
            restarts: 5,
        }
    }
}

impl SaConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(param_error(alloc::format!(
                "cooling {} outside (0, 1)",
                self.cooling
            )));
        }
        if self.steps == 0 || self.restarts == 0 {
            return Err(param_error(
                "annealing needs at least one step and one restart",
            ));
        }
        if let Some(t) = self.initial_temp {
            if !(t > 0.0 && t.is_finite()) {
                return Err(param_error(alloc::format!(
                    "initial temperature {t} is not positive"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OracleResult {
    pub z: CutAssignment,
    pub cut: f64,
    /// Proven optimal; only set by exhaustive search.
    pub optimal: bool,
}

fn check_budget(n: usize, c: usize) -> Result<()> {
    if c == 0 || c > n / 2 {
        return Err(param_error(alloc::format!(
            "budget c = {c} outside [1, {}]",
            n / 2
        )));
    }
    Ok(())
}

/// Minimum cut over every assignment with `c` nodes at `-1`. Ties go to the
/// lexicographically smallest `-1` set.
pub fn exhaustive_best(g: &WeightedGraph, c: usize) -> Result<OracleResult> {
    let n = g.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge {
            method: "exhaustive search",
            n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    check_budget(n, c)?;
    let mut subset: Vec<usize> = (0..c).collect();
    let mut inside = vec![false; n];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        inside.fill(false);
        for &i in &subset {
            inside[i] = true;
        }
        let mut cut = 0.0;
        for &i in &subset {
            for (j, &w) in g.row(i).iter().enumerate() {
                if !inside[j] {
                    cut += w;
                }
            }
        }
        if best.as_ref().map_or(true, |(b, _)| cut < *b) {
            best = Some((cut, subset.clone()));
        }
        if !next_combination(&mut subset, n) {
            break;
        }
    }
    let (_, set) = best.expect("at least one subset exists");
    let z = CutAssignment::from_minus_set(n, &set)?;
    Ok(OracleResult {
        cut: g.cut_size(&z)?,
        z,
        optimal: true,
    })
}

/// Simulated annealing with swap moves. Restart `r` uses stream `r` of a
/// ChaCha8 generator keyed by `cfg.seed`; the best restart wins, earlier
/// restarts on ties.
pub fn sa_solve(g: &WeightedGraph, c: usize, cfg: &SaConfig) -> Result<OracleResult> {
    cfg.validate()?;
    let n = g.n();
    check_budget(n, c)?;
    let t0 = cfg.initial_temp.unwrap_or(g.max_weight() * n as f64);

    let mut best: Option<OracleResult> = None;
    for restart in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(restart as u64);
        let r = anneal(g, c, t0, cfg, &mut rng)?;
        if best.as_ref().map_or(true, |b| r.cut < b.cut) {
            best = Some(r);
        }
    }
    Ok(best.expect("restarts ≥ 1"))
}

fn anneal(
    g: &WeightedGraph,
    c: usize,
    t0: f64,
    cfg: &SaConfig,
    rng: &mut ChaCha8Rng,
) -> Result<OracleResult> {
    let n = g.n();
    let mut s = vec![1.0f64; n];
    for i in sample(rng, n, c) {
        s[i] = -1.0;
    }
    let mut minus: Vec<usize> = (0..n).filter(|&i| s[i] < 0.0).collect();
    let mut plus: Vec<usize> = (0..n).filter(|&i| s[i] > 0.0).collect();
    // field[u] = Σ_j d_uj s_j; flipping u alone changes the cut by s_u·field[u].
    let mut field: Vec<f64> = (0..n)
        .map(|u| g.row(u).iter().zip(&s).map(|(w, sj)| w * sj).sum())
        .collect();

    let snapshot = |s: &[f64]| -> Result<(CutAssignment, f64)> {
        let z = CutAssignment::new(s.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect())?;
        let cut = g.cut_size(&z)?;
        Ok((z, cut))
    };
    let (mut best_z, mut best_cut) = snapshot(&s)?;
    let mut current = best_cut;
    let mut temp = t0;

    for _ in 0..cfg.steps {
        let a = rng.gen_range(0..minus.len());
        let b = rng.gen_range(0..plus.len());
        let (u, v) = (minus[a], plus[b]);
        let delta = s[u] * field[u] + s[v] * field[v] + 2.0 * g.weight(u, v);
        let accept = delta <= 0.0 || (temp > 0.0 && rng.gen::<f64>() < libm::exp(-delta / temp));
        if accept {
            for (j, f) in field.iter_mut().enumerate() {
                *f -= 2.0 * (g.weight(j, u) * s[u] + g.weight(j, v) * s[v]);
            }
            s[u] = -s[u];
            s[v] = -s[v];
            minus[a] = v;
            plus[b] = u;
            current += delta;
            if current < best_cut - 1e-12 * best_cut.abs().max(1.0) {
                let (z, cut) = snapshot(&s)?;
                current = cut;
                if cut < best_cut {
                    best_z = z;
                    best_cut = cut;
                }
            }
        }
        temp *= cfg.cooling;
    }
    Ok(OracleResult {
        z: best_z,
        cut: best_cut,
        optimal: false,
    })
}

/// `pce_cut / baseline_cut`.
pub fn normalized_cut(pce_cut: f64, baseline_cut: f64) -> Result<f64> {
    if !(baseline_cut > 0.0) {
        return Err(Error::ZeroBaseline);
    }
    Ok(pce_cut / baseline_cut)
}
