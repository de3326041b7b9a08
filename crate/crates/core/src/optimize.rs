//! Derivative-free minimization of the PCE loss over circuit parameters.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{param_error, Error, Result};

/// Available minimizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum Method {
    #[default]
    NelderMead,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(default)
)]
pub struct OptimizerConfig {
    pub method: Method,
    /// Evaluation budget; `None` means `400 × dimension`.
    pub max_evals: Option<usize>,
    /// Largest coordinate offset of the simplex from its best vertex.
    pub x_tol: f64,
    /// Largest spread of function values across the simplex.
    pub f_tol: f64,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    /// Keep a per-iteration `(evaluations, best value)` trace.
    pub record_trace: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            method: Method::NelderMead,
            max_evals: None,
            x_tol: 1e-6,
            f_tol: 1e-8,
            initial_step: 0.5,
            record_trace: false,
        }
    }
}

impl OptimizerConfig {
    pub fn budget(&self, dim: usize) -> usize {
        self.max_evals.unwrap_or(400 * dim)
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.x_tol > 0.0 && self.f_tol > 0.0) {
            return Err(param_error("optimizer tolerances must be positive"));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(param_error("initial simplex step must be positive"));
        }
        if self.budget(dim) < dim + 1 {
            return Err(param_error(alloc::format!(
                "budget of {} evaluations cannot build a {}-vertex simplex",
                self.budget(dim),
                dim + 1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimizeResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub evals: usize,
    pub converged: bool,
    /// `(evaluations so far, best value)` after every iteration.
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Vec::is_empty")
    )]
    pub trace: Vec<(usize, f64)>,
}

/// Minimizes `f` starting from `x0`.
pub fn minimize<F>(f: F, x0: &[f64], cfg: &OptimizerConfig) -> Result<OptimizeResult>
where
    F: FnMut(&[f64]) -> f64,
{
    if x0.is_empty() {
        return Err(param_error("cannot minimize over zero parameters"));
    }
    cfg.validate(x0.len())?;
    match cfg.method {
        Method::NelderMead => nelder_mead(f, x0, cfg),
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

struct Counted<F> {
    f: F,
    evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                value: v,
                params: x.to_vec(),
            })
        }
    }
}

fn nelder_mead<F>(f: F, x0: &[f64], cfg: &OptimizerConfig) -> Result<OptimizeResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    let budget = cfg.budget(dim);
    let mut f = Counted { f, evals: 0 };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += cfg.initial_step;
        simplex.push(v);
    }
    let mut values = Vec::with_capacity(dim + 1);
    for v in &simplex {
        values.push(f.eval(v)?);
    }

    let mut trace = Vec::new();
    let mut order: Vec<usize> = (0..=dim).collect();
    let mut centroid = vec![0.0; dim];
    let mut reflected = vec![0.0; dim];
    let mut trial = vec![0.0; dim];
    let mut converged = false;

    loop {
        // Stable sort keeps earlier vertices ahead on ties.
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order
            .iter()
            .map(|&i| core::mem::take(&mut simplex[i]))
            .collect();
        values = order.iter().map(|&i| values[i]).collect();
        order.iter_mut().enumerate().for_each(|(i, o)| *o = i);

        if cfg.record_trace {
            trace.push((f.evals, values[0]));
        }

        let f_spread = values[dim] - values[0];
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if f_spread <= cfg.f_tol && x_spread <= cfg.x_tol {
            converged = true;
            break;
        }
        if f.evals >= budget {
            break;
        }

        centroid.fill(0.0);
        for v in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= dim as f64);

        let worst = &simplex[dim];
        for k in 0..dim {
            reflected[k] = centroid[k] + REFLECT * (centroid[k] - worst[k]);
        }
        let f_reflected = f.eval(&reflected)?;

        if f_reflected < values[0] {
            for k in 0..dim {
                trial[k] = centroid[k] + EXPAND * (centroid[k] - worst[k]);
            }
            let f_expanded = f.eval(&trial)?;
            if f_expanded < f_reflected {
                simplex[dim].copy_from_slice(&trial);
                values[dim] = f_expanded;
            } else {
                simplex[dim].copy_from_slice(&reflected);
                values[dim] = f_reflected;
            }
            continue;
        }
        if f_reflected < values[dim - 1] {
            simplex[dim].copy_from_slice(&reflected);
            values[dim] = f_reflected;
            continue;
        }

        let accepted = if f_reflected < values[dim] {
            for k in 0..dim {
                trial[k] = centroid[k] + CONTRACT * (reflected[k] - centroid[k]);
            }
            let f_contracted = f.eval(&trial)?;
            (f_contracted <= f_reflected).then_some(f_contracted)
        } else {
            for k in 0..dim {
                trial[k] = centroid[k] + CONTRACT * (worst[k] - centroid[k]);
            }
            let f_contracted = f.eval(&trial)?;
            (f_contracted < values[dim]).then_some(f_contracted)
        };
        if let Some(v) = accepted {
            simplex[dim].copy_from_slice(&trial);
            values[dim] = v;
            continue;
        }

        let (best, rest) = simplex
            .split_first_mut()
            .expect("simplex has dim + 1 vertices");
        for (v, fv) in rest.iter_mut().zip(values[1..].iter_mut()) {
            for (x, b) in v.iter_mut().zip(best.iter()) {
                *x = b + SHRINK * (*x - b);
            }
            *fv = f.eval(v)?;
        }
    }

    Ok(OptimizeResult {
        best_params: simplex.swap_remove(0),
        best_value: values[0],
        evals: f.evals,
        converged,
        trace,
    })
}

/// Uniform i.i.d. entries in `[lo, hi]`, reproducible per seed.
pub fn random_init_in(dim: usize, seed: u64, lo: f64, hi: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// Uniform i.i.d. angles in `[-π, π]`.
pub fn random_init(dim: usize, seed: u64) -> Vec<f64> {
    random_init_in(dim, seed, -PI, PI)
}
