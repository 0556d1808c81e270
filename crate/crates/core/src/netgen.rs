//! Erdős–Rényi graph generation, degree statistics, and eigenvector
//! centrality.
//!
//! A [`NetworkModel`] is immutable after construction: the dynamics only ever
//! read neighbor lists and centrality scores, so one model can be shared
//! across simulation workers without synchronization.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::error::{Error, Result};

/// Default tolerance for the power iteration.
pub const CENTRALITY_TOL: f64 = 1e-10;
/// Default iteration budget for the power iteration.
pub const CENTRALITY_MAX_ITER: usize = 10_000;

/// Final scaling applied to the centrality vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CentralityMode {
    /// Scale so the maximum entry is exactly 1. Matches the scenario
    /// arithmetic, where the most central node carries C = 1.
    #[default]
    MaxNorm,
    /// Scale to unit Euclidean length, the convention of the reference
    /// implementation's library routine.
    EuclidNorm,
}

/// An undirected Erdős–Rényi graph together with its centrality vector.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    n: usize,
    p_c: f64,
    seed: u64,
    edges: Vec<(u32, u32)>,
    neighbors: Vec<Vec<u32>>,
    centrality: Vec<f64>,
}

impl NetworkModel {
    /// Node count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Connection probability used at generation (0 for hand-built graphs).
    pub fn p_c(&self) -> f64 {
        self.p_c
    }

    /// Generation seed (0 for hand-built graphs).
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Edges as unordered pairs `(i, j)` with `i < j`, lexicographically
    /// sorted.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of node `i` in ascending order.
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    /// Per-node centrality scores; entries lie in [0, 1] and isolated nodes
    /// score 0.
    pub fn centrality(&self) -> &[f64] {
        &self.centrality
    }

    /// Builds a model from an explicit edge list (tests and hand-crafted
    /// topologies). Pairs may be given in either order; self-loops and
    /// duplicates are rejected. Generation metadata (`p_c`, `seed`) is
    /// recorded as zero.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "node count must be at least 1"));
        }
        let mut normalized: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(Error::invalid("edges", format!("self-loop ({a}, {b})")));
            }
            if a as usize >= n || b as usize >= n {
                return Err(Error::invalid("edges", format!("node out of range in ({a}, {b})")));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("edges", "duplicate edge"));
        }
        Self::assemble(n, 0.0, 0, normalized, CentralityMode::MaxNorm)
    }

    /// Edge-list export: header line followed by one `i j` pair per line,
    /// 0-based ids, ascending.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# er n={} p={} seed={}\n", self.n, self.p_c, self.seed);
        for &(i, j) in &self.edges {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }

    fn assemble(
        n: usize,
        p_c: f64,
        seed: u64,
        edges: Vec<(u32, u32)>,
        mode: CentralityMode,
    ) -> Result<Self> {
        let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(i, j) in &edges {
            neighbors[i as usize].push(j);
            neighbors[j as usize].push(i);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        let centrality = if edges.is_empty() {
            vec![0.0; n]
        } else {
            centrality_of_neighbors(&neighbors, CENTRALITY_TOL, CENTRALITY_MAX_ITER, mode)?
        };
        Ok(NetworkModel {
            n,
            p_c,
            seed,
            edges,
            neighbors,
            centrality,
        })
    }
}

/// Generates an Erdős–Rényi graph: each of the n(n-1)/2 candidate edges is
/// included independently with probability `p_c`. Pure function of
/// `(n, p_c, seed)`; centrality is populated with the default max-norm
/// scaling (see [`generate_er_with_mode`]).
pub fn generate_er(n: usize, p_c: f64, seed: u64) -> Result<NetworkModel> {
    generate_er_with_mode(n, p_c, seed, CentralityMode::MaxNorm)
}

/// [`generate_er`] with an explicit centrality scaling mode.
pub fn generate_er_with_mode(
    n: usize,
    p_c: f64,
    seed: u64,
    mode: CentralityMode,
) -> Result<NetworkModel> {
    if n == 0 {
        return Err(Error::invalid("n", "node count must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p_c) {
        return Err(Error::invalid("p_c", format!("{p_c} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    // Candidate pairs are visited in lexicographic order so the edge set is a
    // fixed function of the seed.
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            if rng.random::<f64>() < p_c {
                edges.push((i, j));
            }
        }
    }
    NetworkModel::assemble(n, p_c, seed, edges, mode)
}

/// Eigenvector centrality of `net` by power iteration.
///
/// Iterates x <- x + Ax from the uniform vector, max-normalizing each
/// iterate, until successive iterates differ by less than `tol` in max-norm.
/// The shift by the identity keeps bipartite structures (paths, stars) from
/// oscillating without changing the leading eigenvector. Isolated nodes decay
/// to 0.
pub fn eigenvector_centrality(
    net: &NetworkModel,
    tol: f64,
    max_iter: usize,
    mode: CentralityMode,
) -> Result<Vec<f64>> {
    if net.edge_count() == 0 {
        return Err(Error::DegenerateGraph);
    }
    if tol <= 0.0 {
        return Err(Error::invalid("tol", "tolerance must be positive"));
    }
    centrality_of_neighbors(&net.neighbors, tol, max_iter, mode)
}

fn centrality_of_neighbors(
    neighbors: &[Vec<u32>],
    tol: f64,
    max_iter: usize,
    mode: CentralityMode,
) -> Result<Vec<f64>> {
    let n = neighbors.len();
    let mut x = vec![1.0 / n as f64; n];
    let mut y = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        for i in 0..n {
            let mut acc = x[i];
            for &j in &neighbors[i] {
                acc += x[j as usize];
            }
            y[i] = acc;
        }
        let max = y.iter().cloned().fold(0.0_f64, f64::max);
        // max > 0 always: entries start positive and x[i] carries over.
        for v in &mut y {
            *v /= max;
        }
        residual = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        std::mem::swap(&mut x, &mut y);
        if residual < tol {
            return Ok(match mode {
                CentralityMode::MaxNorm => x,
                CentralityMode::EuclidNorm => {
                    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    x.iter().map(|v| v / norm).collect()
                }
            });
        }
    }
    Err(Error::Convergence {
        residual,
        iterations: max_iter,
    })
}

/// Probability that a node of an Erdős–Rényi graph G(n, p_c) has degree `d`:
/// C(n-1, d) p_c^d (1-p_c)^(n-1-d).
pub fn degree_pmf(n: usize, p_c: f64, d: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "node count must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p_c) {
        return Err(Error::invalid("p_c", format!("{p_c} outside [0, 1]")));
    }
    if d > n - 1 {
        return Err(Error::invalid(
            "d",
            format!("degree {d} exceeds n - 1 = {}", n - 1),
        ));
    }
    let trials = (n - 1) as u64;
    let k = d as u64;
    Ok(binomial_coefficient(trials, k) * p_c.powi(k as i32) * (1.0 - p_c).powi((trials - k) as i32))
}

/// C(n, k) via the multiplicative formula; exact in f64 for the desk-scale
/// inputs used here.
pub(crate) fn binomial_coefficient(n: u64, k: u64) -> f64 {
    let k = k.min(n - k.min(n));
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (n - i) as f64 / (i + 1) as f64;
    }
    acc
}
