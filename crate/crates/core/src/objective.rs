//! The relaxed, budget-constrained MinCut loss and helpers around it.
//!
//! With soft labels `s_i = tanh(α⟨Π_i⟩)` the loss is
//!
//! ```text
//! L = Σ_{i<j} ½ d_ij (1 − s_i s_j) + β (Σ_i s_i − (n − 2c))² + η [(1/n) Σ_i s_i²]²
//! ```
//!
//! The penalty is minimized when exactly `c` labels are `-1`. Feasibility is
//! judged symmetrically: a `c : n − c` split and an `n − c : c` split cut the
//! same edges.

use alloc::format;
use alloc::vec::Vec;

use crate::encoding::EncodingSpec;
use crate::error::{param_error, Error, Result};
use crate::graph::{CutAssignment, WeightedGraph};

/// Everything that defines the loss for one instance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObjectiveSpec {
    pub graph: WeightedGraph,
    pub encoding: EncodingSpec,
    /// tanh sharpness; the starting value in iterative mode.
    pub alpha: f64,
    /// Penalty strength.
    pub beta: f64,
    /// Target size of the smaller side.
    pub c: usize,
    /// Regularization strength.
    #[cfg_attr(feature = "serde", serde(default))]
    pub eta: f64,
}

impl ObjectiveSpec {
    /// Loss for `graph` with target `c`, using the default encoding,
    /// `β = β_c` and no regularization.
    pub fn new(graph: WeightedGraph, c: usize, alpha: f64) -> Result<Self> {
        let encoding = EncodingSpec::default_for(graph.n())?;
        let beta = beta_c(&graph, c)?;
        let spec = Self {
            graph,
            encoding,
            alpha,
            beta,
            c,
            eta: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        self.beta = beta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        self.eta = eta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_encoding(mut self, encoding: EncodingSpec) -> Result<Self> {
        self.encoding = encoding;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.graph.n();
        check_budget(n, self.c)?;
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(param_error(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(param_error(format!(
                "beta must be non-negative, got {}",
                self.beta
            )));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(param_error(format!(
                "eta must be non-negative, got {}",
                self.eta
            )));
        }
        if self.encoding.n_vars != n {
            return Err(param_error(format!(
                "encoding holds {} variables but the graph has {n} nodes",
                self.encoding.n_vars
            )));
        }
        let capacity = self.encoding.capacity()?;
        if capacity < n {
            return Err(Error::Capacity {
                required: n,
                capacity,
            });
        }
        Ok(())
    }

    /// Loss at the objective's own α.
    pub fn loss(&self, expectations: &[f64]) -> Result<f64> {
        self.loss_at(expectations, self.alpha)
    }

    /// Loss with α overridden.
    pub fn loss_at(&self, expectations: &[f64], alpha: f64) -> Result<f64> {
        let soft = soft_values(expectations, alpha);
        self.loss_from_soft(&soft)
    }

    /// Loss as a function of the soft labels directly.
    pub fn loss_from_soft(&self, soft: &SoftAssignment) -> Result<f64> {
        let n = self.graph.n();
        if soft.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: soft.len(),
            });
        }
        Ok(relaxed_loss(
            &self.graph,
            soft.values(),
            self.beta,
            self.c,
            self.eta,
        ))
    }
}

/// Loss terms evaluated on raw soft values. Callers guarantee the length.
pub(crate) fn relaxed_loss(g: &WeightedGraph, s: &[f64], beta: f64, c: usize, eta: f64) -> f64 {
    let n = g.n();
    let mut cut = 0.0;
    for i in 0..n {
        let row = g.row(i);
        let si = s[i];
        for j in (i + 1)..n {
            cut += 0.5 * row[j] * (1.0 - si * s[j]);
        }
    }
    let sum: f64 = s.iter().sum();
    let target = n as f64 - 2.0 * c as f64;
    let penalty = beta * (sum - target) * (sum - target);
    let reg = if eta > 0.0 {
        regularization_raw(s, eta)
    } else {
        0.0
    };
    cut + penalty + reg
}

fn check_budget(n: usize, c: usize) -> Result<()> {
    if c == 0 || c > n / 2 {
        return Err(param_error(format!(
            "budget c = {c} outside [1, {}]",
            n / 2
        )));
    }
    Ok(())
}

/// Soft labels `tanh(α⟨Π_i⟩)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(transparent)
)]
pub struct SoftAssignment(Vec<f64>);

impl SoftAssignment {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sign of each value, zero mapped to `+1`.
    pub fn decode(&self) -> CutAssignment {
        decode(&self.0)
    }
}

pub fn soft_values(expectations: &[f64], alpha: f64) -> SoftAssignment {
    SoftAssignment(
        expectations
            .iter()
            .map(|&e| libm::tanh(alpha * e))
            .collect(),
    )
}

/// `η [(1/n) Σ v_i²]²`.
pub fn regularization(values: &SoftAssignment, eta: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    regularization_raw(values.values(), eta)
}

fn regularization_raw(s: &[f64], eta: f64) -> f64 {
    let mean_sq = s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64;
    eta * mean_sq * mean_sq
}

/// Penalty strength from the `c` largest weighted degrees. Any cut that
/// isolates `c` nodes is bounded above by this value.
pub fn beta_c(g: &WeightedGraph, c: usize) -> Result<f64> {
    check_budget(g.n(), c)?;
    let mut degrees = g.degrees();
    degrees.sort_by(|a, b| b.total_cmp(a));
    Ok(degrees[..c].iter().sum())
}

/// Elementwise sign, with `sign(0) = +1`.
pub fn decode(expectations: &[f64]) -> CutAssignment {
    let spins = expectations
        .iter()
        .map(|&e| if e < 0.0 { -1 } else { 1 })
        .collect();
    CutAssignment::new(spins).expect("spins are ±1 by construction")
}

/// True when the smaller side of `z` has exactly `c` nodes.
pub fn is_feasible(z: &CutAssignment, c: usize) -> bool {
    let (minus, plus) = z.partition_count();
    minus.min(plus) == c
}

/// Distance between the `±level` crossings of `tanh(αx)`:
/// `2·artanh(level)/α`.
pub fn plateau_width(alpha: f64, level: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(param_error(format!("alpha must be positive, got {alpha}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(param_error(format!(
            "level must lie in (0, 1), got {level}"
        )));
    }
    Ok(2.0 * libm::atanh(level) / alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn k(n: usize) -> WeightedGraph {
        WeightedGraph::complete_unit(n).unwrap()
    }

    fn path4() -> WeightedGraph {
        WeightedGraph::from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap()
    }

    #[test]
    fn soft_value_examples() {
        let s = soft_values(&[0.0, 0.5, -0.5], 1.0);
        assert_eq!(s.values()[0], 0.0);
        assert!((s.values()[1] - 0.462_117_157_260_009_8).abs() < 1e-15);
        assert_eq!(s.values()[2], -s.values()[1]);
        assert!((soft_values(&[1.0], 100.0).values()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn loss_at_zero_expectations() {
        let spec = ObjectiveSpec::new(k(3), 1, 7.0)
            .unwrap()
            .with_beta(10.0)
            .unwrap();
        // 3 edges × ½ + 10 · (0 − 1)²
        assert_eq!(spec.loss(&[0.0; 3]).unwrap(), 11.5);
    }

    #[test]
    fn loss_saturated_limit() {
        let beta = 3.25;
        let spec = ObjectiveSpec::new(k(3), 1, 1e3)
            .unwrap()
            .with_beta(beta)
            .unwrap();
        let l = spec.loss(&[1.0, -1.0, -1.0]).unwrap();
        assert!((l - (2.0 + 4.0 * beta)).abs() < 1e-6);
    }

    #[test]
    fn regularization_examples() {
        assert_eq!(regularization(&SoftAssignment::new(vec![0.0; 4]), 5.0), 0.0);
        assert_eq!(
            regularization(&SoftAssignment::new(vec![1.0, -1.0, 1.0]), 1.0),
            1.0
        );
        assert_eq!(
            regularization(&SoftAssignment::new(vec![0.5, 0.5]), 2.0),
            0.125
        );
    }

    #[test]
    fn loss_includes_regularization() {
        let spec = ObjectiveSpec::new(k(4), 2, 1.0)
            .unwrap()
            .with_beta(0.0)
            .unwrap();
        let e = [0.3, -0.2, 0.1, 0.4];
        let base = spec.loss(&e).unwrap();
        let with_reg = spec.clone().with_eta(2.0).unwrap().loss(&e).unwrap();
        let soft = soft_values(&e, 1.0);
        assert!((with_reg - base - regularization(&soft, 2.0)).abs() < 1e-14);
    }

    #[test]
    fn beta_c_examples() {
        assert_eq!(beta_c(&k(4), 2).unwrap(), 6.0);
        for n in 2..9 {
            for c in 1..=n / 2 {
                assert_eq!(beta_c(&k(n), c).unwrap(), (c * (n - 1)) as f64);
            }
        }
        assert_eq!(beta_c(&path4(), 2).unwrap(), 4.0);
        assert!(beta_c(&path4(), 3).is_err());
        assert!(beta_c(&path4(), 0).is_err());
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode(&[0.3, -0.7, 0.0]).spins(), &[1, -1, 1]);
        let e = [0.2, -0.9, 0.4];
        let neg: Vec<f64> = e.iter().map(|v| -v).collect();
        assert_eq!(decode(&neg), -decode(&e));
    }

    #[test]
    fn feasibility_is_symmetric() {
        let z = |minus: &[usize]| CutAssignment::from_minus_set(6, minus).unwrap();
        assert!(is_feasible(&z(&[0, 1]), 2));
        assert!(is_feasible(&z(&[0, 1, 2, 3]), 2));
        assert!(!is_feasible(&z(&[0, 1, 2]), 2));
        assert!(is_feasible(&-z(&[0, 1]), 2));
    }

    #[test]
    fn plateau_examples() {
        let w = plateau_width(1.0, 0.99).unwrap();
        assert!((w - 5.293_304_824_724_491).abs() < 1e-12);
        assert_eq!(plateau_width(2.0, 0.99).unwrap(), w / 2.0);
        assert!(plateau_width(1e12, 0.99).unwrap() < 1e-11);
        assert!(plateau_width(0.0, 0.99).is_err());
        assert!(plateau_width(1.0, 1.0).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(ObjectiveSpec::new(k(6), 4, 1.0).is_err());
        assert!(ObjectiveSpec::new(k(6), 3, 0.0).is_err());
        assert!(ObjectiveSpec::new(k(6), 3, 1.0)
            .unwrap()
            .with_beta(-1.0)
            .is_err());
        assert!(ObjectiveSpec::new(k(6), 3, 1.0)
            .unwrap()
            .with_eta(-1.0)
            .is_err());
        let spec = ObjectiveSpec::new(k(6), 3, 1.0).unwrap();
        assert!(spec.loss(&[0.0; 5]).is_err());
        assert_eq!(spec.beta, 15.0);
    }
}
