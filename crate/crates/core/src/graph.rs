//! Network topology and consensus weight matrices.
//!
//! Agents are numbered `1..=n` in every public signature; storage is 0-based.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{self, Matrix};
use crate::rng::{substream, StreamRng};

/// Tolerance for symmetry and row sums, relative to `max(1, ‖A‖_F)`.
pub const WEIGHT_TOL: f64 = 1e-12;
/// Margin used when comparing eigenvalues against 1.
pub const SPECTRUM_TOL: f64 = 1e-10;

/// Undirected simple graph on agents `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adjacency: Vec<BTreeSet<usize>>,
    connected: bool,
}

impl Graph {
    /// Builds a graph from 1-indexed agent pairs. Duplicates and reversed
    /// pairs collapse onto one undirected edge.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut adjacency = vec![BTreeSet::new(); n];
        for &(i, j) in edges {
            for agent in [i, j] {
                if agent == 0 || agent > n {
                    return Err(Error::AgentOutOfRange { agent, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            adjacency[i - 1].insert(j - 1);
            adjacency[j - 1].insert(i - 1);
        }
        let connected = is_connected(&adjacency);
        Ok(Graph {
            n,
            adjacency,
            connected,
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .collect();
        Graph::new(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        let mut edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        if n > 2 {
            edges.push((1, n));
        }
        Graph::new(n, &edges)
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        Graph::new(n, &edges)
    }

    /// Star with hub 1 and leaves `2..=n`.
    pub fn star(n: usize) -> Result<Self> {
        let edges: Vec<_> = (2..=n).map(|j| (1, j)).collect();
        Graph::new(n, &edges)
    }

    /// Random connected graph: a random spanning tree plus each remaining
    /// pair with probability `extra_edge_prob`.
    pub fn random_connected<R: Rng + ?Sized>(
        n: usize,
        extra_edge_prob: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut order: Vec<usize> = (1..=n).collect();
        order.shuffle(rng);
        let mut edges = Vec::new();
        for idx in 1..n {
            let parent = order[rng.random_range(0..idx)];
            edges.push((parent, order[idx]));
        }
        for i in 1..=n {
            for j in i + 1..=n {
                if rng.random::<f64>() < extra_edge_prob {
                    edges.push((i, j));
                }
            }
        }
        Graph::new(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Undirected edges as 1-indexed pairs `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, nbrs)| nbrs.iter().filter(move |&&j| j > i).map(move |&j| (i + 1, j + 1)))
            .collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i >= 1 && i <= self.n && j >= 1 && j <= self.n && self.adjacency[i - 1].contains(&(j - 1))
    }

    pub fn check_agent(&self, agent: usize) -> Result<()> {
        if agent == 0 || agent > self.n {
            Err(Error::AgentOutOfRange { agent, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn degree(&self, agent: usize) -> Result<usize> {
        self.check_agent(agent)?;
        Ok(self.adjacency[agent - 1].len())
    }

    /// Neighbors of `agent`, ascending, excluding the agent itself.
    pub fn neighborhood(&self, agent: usize) -> Result<Vec<usize>> {
        self.check_agent(agent)?;
        Ok(self.adjacency[agent - 1].iter().map(|j| j + 1).collect())
    }

    /// Neighbors of `agent` together with the agent.
    pub fn closed_neighborhood(&self, agent: usize) -> Result<BTreeSet<usize>> {
        let mut set: BTreeSet<usize> = self.neighborhood(agent)?.into_iter().collect();
        set.insert(agent);
        Ok(set)
    }
}

fn is_connected(adjacency: &[BTreeSet<usize>]) -> bool {
    let mut seen = vec![false; adjacency.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for &j in &adjacency[i] {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

pub fn build_graph(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
    Graph::new(n, edges)
}

pub fn neighborhood(graph: &Graph, agent: usize) -> Result<Vec<usize>> {
    graph.neighborhood(agent)
}

/// Square consensus weight matrix. Only shape and finiteness are enforced
/// here; the consensus assumptions are checked by [`validate_weight_matrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix(Matrix);

impl WeightMatrix {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() || matrix.is_empty() {
            return Err(Error::dims(
                "weight matrix",
                "non-empty square matrix",
                format!("{}x{}", matrix.nrows(), matrix.ncols()),
            ));
        }
        numerics::ensure_finite(&matrix, "weight matrix")?;
        Ok(WeightMatrix(matrix))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::dims("weight matrix row", n, bad.len()));
        }
        WeightMatrix::new(Matrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_inner(self) -> Matrix {
        self.0
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.0.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

/// Metropolis–Hastings weights: `1 / (1 + max(deg_i, deg_j))` on edges,
/// diagonal filled so each row sums to one.
pub fn metropolis_weights(graph: &Graph) -> Result<WeightMatrix> {
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = graph.n();
    let deg: Vec<usize> = graph.adjacency.iter().map(BTreeSet::len).collect();
    let mut a = Matrix::zeros(n, n);
    for (i, nbrs) in graph.adjacency.iter().enumerate() {
        for &j in nbrs {
            a[(i, j)] = 1.0 / (1 + deg[i].max(deg[j])) as f64;
        }
    }
    for i in 0..n {
        let off: f64 = a.row(i).iter().sum();
        a[(i, i)] = 1.0 - off;
    }
    WeightMatrix::new(a)
}

/// Metropolis weights with each edge weight scaled by an independent factor
/// in `[1 - scale, 1 + scale]`, redrawn until the result satisfies every
/// consensus assumption.
pub fn random_weights(graph: &Graph, seed: u64, scale: f64) -> Result<WeightMatrix> {
    if !(0.0..1.0).contains(&scale) {
        return Err(Error::InvalidParameter(format!(
            "perturbation scale must lie in [0, 1), got {scale}"
        )));
    }
    let base = metropolis_weights(graph)?;
    let mut rng = substream(seed, 0);
    perturbed_weights(graph, &base, scale, &mut rng)
}

pub(crate) fn perturbed_weights(
    graph: &Graph,
    base: &WeightMatrix,
    scale: f64,
    rng: &mut StreamRng,
) -> Result<WeightMatrix> {
    const MAX_ATTEMPTS: usize = 1000;
    let n = graph.n();
    for _ in 0..MAX_ATTEMPTS {
        let mut a = base.matrix().clone();
        for (i, j) in graph.edges() {
            let factor = 1.0 + scale * (2.0 * rng.random::<f64>() - 1.0);
            let w = a[(i - 1, j - 1)] * factor;
            a[(i - 1, j - 1)] = w;
            a[(j - 1, i - 1)] = w;
        }
        for i in 0..n {
            a[(i, i)] = 0.0;
            let off: f64 = a.row(i).iter().sum();
            a[(i, i)] = 1.0 - off;
        }
        let candidate = WeightMatrix::new(a)?;
        if validate_weight_matrix(&candidate, graph)?.passed() {
            return Ok(candidate);
        }
    }
    Err(Error::Numerical(
        "no perturbed weight matrix satisfied the consensus assumptions".into(),
    ))
}

/// Outcome of checking a weight matrix against the consensus assumptions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub symmetric: bool,
    pub row_stochastic: bool,
    pub sparsity_matches_graph: bool,
    pub spectrum_ok: bool,
    /// Descending; `None` when the matrix is not symmetric.
    pub eigenvalues: Option<Vec<f64>>,
    pub max_asymmetry: f64,
    pub max_row_sum_error: f64,
    /// Off-graph nonzero entries, as 1-indexed pairs.
    pub sparsity_violations: Vec<(usize, usize)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.symmetric && self.row_stochastic && self.sparsity_matches_graph && self.spectrum_ok
    }
}

pub fn validate_weight_matrix(weights: &WeightMatrix, graph: &Graph) -> Result<ValidationReport> {
    let a = weights.matrix();
    let n = graph.n();
    if a.nrows() != n {
        return Err(Error::dims("weight matrix vs graph", n, a.nrows()));
    }
    let tol = WEIGHT_TOL * a.norm().max(1.0);

    let max_asymmetry = (a - a.transpose()).amax();
    let symmetric = max_asymmetry <= tol;

    let max_row_sum_error = a
        .row_iter()
        .map(|r| (r.sum() - 1.0).abs())
        .fold(0.0, f64::max);
    let row_stochastic = max_row_sum_error <= tol;

    let mut sparsity_violations = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && a[(i, j)].abs() > tol && !graph.adjacency[i].contains(&j) {
                sparsity_violations.push((i + 1, j + 1));
            }
        }
    }

    let eigenvalues = if symmetric {
        Some(numerics::eigenvalues_symmetric(a)?)
    } else {
        None
    };
    let spectrum_ok = eigenvalues.as_ref().is_some_and(|ev| {
        (ev[0] - 1.0).abs() <= SPECTRUM_TOL && ev[1..].iter().all(|l| l.abs() < 1.0 - SPECTRUM_TOL)
    });

    Ok(ValidationReport {
        symmetric,
        row_stochastic,
        sparsity_matches_graph: sparsity_violations.is_empty(),
        spectrum_ok,
        eigenvalues,
        max_asymmetry,
        max_row_sum_error,
        sparsity_violations,
    })
}
