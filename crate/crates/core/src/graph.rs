//! Weighted undirected graphs and two-sided cut assignments.
//!
//! Instances are stored as dense symmetric matrices: the benchmark families
//! are complete graphs, so a sparse layout buys nothing. Node indices are
//! 0-based everywhere.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Neg;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{param_error, Error, Result};

/// Symmetric, non-negative edge weights with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "EdgeListRepr", into = "EdgeListRepr")
)]
pub struct WeightedGraph {
    n: usize,
    weights: Vec<f64>,
}

impl WeightedGraph {
    /// Builds a graph from a row-major `n × n` matrix.
    pub fn from_dense(n: usize, weights: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(param_error(format!(
                "graph needs at least 2 nodes, got {n}"
            )));
        }
        if weights.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                actual: weights.len(),
            });
        }
        for i in 0..n {
            if weights[i * n + i] != 0.0 {
                return Err(param_error(format!("self loop on node {i}")));
            }
            for j in (i + 1)..n {
                let w = weights[i * n + j];
                if !w.is_finite() || w < 0.0 {
                    return Err(param_error(format!(
                        "weight d[{i}][{j}] = {w} is not a finite non-negative number"
                    )));
                }
                if w != weights[j * n + i] {
                    return Err(param_error(format!(
                        "asymmetric weights d[{i}][{j}] = {w} but d[{j}][{i}] = {}",
                        weights[j * n + i]
                    )));
                }
            }
        }
        Ok(Self { n, weights })
    }

    /// Builds a graph from `(i, j, w)` triples. Unlisted pairs get weight 0.
    ///
    /// A pair may be listed more than once (in either orientation) only if
    /// every listing carries the same weight.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n < 2 {
            return Err(param_error(format!(
                "graph needs at least 2 nodes, got {n}"
            )));
        }
        let mut weights = vec![0.0; n * n];
        let mut seen = vec![false; n * n];
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(param_error(format!(
                    "edge ({i}, {j}) out of range for {n} nodes"
                )));
            }
            if i == j {
                return Err(param_error(format!("self loop on node {i}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(param_error(format!(
                    "edge ({i}, {j}) has invalid weight {w}"
                )));
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            if seen[a * n + b] && weights[a * n + b] != w {
                return Err(param_error(format!(
                    "edge ({i}, {j}) listed with conflicting weights {} and {w}",
                    weights[a * n + b]
                )));
            }
            seen[a * n + b] = true;
            weights[a * n + b] = w;
            weights[b * n + a] = w;
        }
        Ok(Self { n, weights })
    }

    /// Complete graph with unit weights.
    pub fn complete_unit(n: usize) -> Result<Self> {
        GraphGenerator::complete(n).generate()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    /// Row `i` of the weight matrix.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    /// Edges with positive weight as `(i, j, w)`, `i < j`, in row order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            ((i + 1)..self.n).filter_map(move |j| {
                let w = self.weight(i, j);
                (w != 0.0).then_some((i, j, w))
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Weighted degree `d_i = Σ_j d_ij` of every node.
    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Mean number of incident edges per node.
    pub fn average_degree(&self) -> f64 {
        2.0 * self.edge_count() as f64 / self.n as f64
    }

    /// Fraction of node pairs joined by an edge.
    pub fn density(&self) -> f64 {
        let pairs = self.n * (self.n - 1) / 2;
        self.edge_count() as f64 / pairs as f64
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// Stable 64-bit FNV-1a hash of the node count and weight bits.
    pub fn fingerprint(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut feed = |bytes: [u8; 8]| {
            for b in bytes {
                h ^= u64::from(b);
                h = h.wrapping_mul(PRIME);
            }
        };
        feed((self.n as u64).to_le_bytes());
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                feed(self.weight(i, j).to_bits().to_le_bytes());
            }
        }
        h
    }

    /// Total weight of edges whose endpoints lie on opposite sides.
    pub fn cut_size(&self, z: &CutAssignment) -> Result<f64> {
        if z.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: z.len(),
            });
        }
        let s = z.spins();
        let mut cut = 0.0;
        for i in 0..self.n {
            let row = self.row(i);
            for j in (i + 1)..self.n {
                if s[i] != s[j] {
                    cut += row[j];
                }
            }
        }
        Ok(cut)
    }
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
struct EdgeListRepr {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

#[cfg(feature = "serde")]
impl TryFrom<EdgeListRepr> for WeightedGraph {
    type Error = Error;

    fn try_from(r: EdgeListRepr) -> Result<Self> {
        WeightedGraph::from_edges(r.n, r.edges)
    }
}

#[cfg(feature = "serde")]
impl From<WeightedGraph> for EdgeListRepr {
    fn from(g: WeightedGraph) -> Self {
        EdgeListRepr {
            n: g.n,
            edges: g.edges().collect(),
        }
    }
}

/// A ±1 label per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "Vec<i8>", into = "Vec<i8>")
)]
pub struct CutAssignment(Vec<i8>);

impl CutAssignment {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(pos) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(param_error(format!(
                "spin {} at index {pos} is not ±1",
                spins[pos]
            )));
        }
        Ok(Self(spins))
    }

    /// `n` labels, `-1` on the nodes in `minus` and `+1` elsewhere.
    pub fn from_minus_set(n: usize, minus: &[usize]) -> Result<Self> {
        let mut spins = vec![1i8; n];
        for &i in minus {
            if i >= n {
                return Err(param_error(format!("node {i} out of range for {n} nodes")));
            }
            spins[i] = -1;
        }
        Ok(Self(spins))
    }

    /// Labels from the `n` lowest bits of `mask`; a set bit means `-1`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self(
            (0..n)
                .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                .collect(),
        )
    }

    #[inline]
    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(count of -1, count of +1)`.
    pub fn partition_count(&self) -> (usize, usize) {
        let minus = self.0.iter().filter(|&&s| s == -1).count();
        (minus, self.0.len() - minus)
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().map(|&s| i64::from(s)).sum()
    }
}

impl Neg for CutAssignment {
    type Output = CutAssignment;

    fn neg(self) -> Self::Output {
        CutAssignment(self.0.into_iter().map(|s| -s).collect())
    }
}

impl From<CutAssignment> for Vec<i8> {
    fn from(z: CutAssignment) -> Self {
        z.0
    }
}

impl TryFrom<Vec<i8>> for CutAssignment {
    type Error = Error;

    fn try_from(v: Vec<i8>) -> Result<Self> {
        CutAssignment::new(v)
    }
}

/// How edge weights of a generated instance are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", rename_all = "snake_case")
)]
pub enum WeightMode {
    Unit,
    UniformRandom { lo: f64, hi: f64 },
}

/// Seeded generator for complete instances, optionally with random edge
/// deletion.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GraphGenerator {
    pub n: usize,
    pub weights: WeightMode,
    /// Probability that each pair is left without an edge.
    #[cfg_attr(feature = "serde", serde(default))]
    pub deletion_prob: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub seed: u64,
}

impl GraphGenerator {
    pub fn complete(n: usize) -> Self {
        Self {
            n,
            weights: WeightMode::Unit,
            deletion_prob: 0.0,
            seed: 0,
        }
    }

    pub fn generate(&self) -> Result<WeightedGraph> {
        let n = self.n;
        if n < 2 {
            return Err(param_error(format!(
                "graph needs at least 2 nodes, got {n}"
            )));
        }
        if let WeightMode::UniformRandom { lo, hi } = self.weights {
            if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi) {
                return Err(param_error(format!("invalid weight range [{lo}, {hi}]")));
            }
        }
        if !(0.0..1.0).contains(&self.deletion_prob) {
            return Err(param_error(format!(
                "deletion probability {} outside [0, 1)",
                self.deletion_prob
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                if self.deletion_prob > 0.0 && rng.gen::<f64>() < self.deletion_prob {
                    continue;
                }
                let w = match self.weights {
                    WeightMode::Unit => 1.0,
                    WeightMode::UniformRandom { lo, hi } => lo + (hi - lo) * rng.gen::<f64>(),
                };
                weights[i * n + j] = w;
                weights[j * n + i] = w;
            }
        }
        Ok(WeightedGraph { n, weights })
    }
}
