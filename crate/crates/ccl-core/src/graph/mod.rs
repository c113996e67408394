//! Graph data model shared by every algorithm.
//!
//! Node IDs are 1-based in files and in the labeling API. Inside the crate a
//! node is addressed by its index `id - 1`.

mod gen;
mod io;
mod label;

pub use gen::{gen_random_graph, gen_spanning_graph};
pub use io::{parse_graph, parse_instance, serialize_graph, serialize_instance, ParsedInstance};
pub use label::{
    build_partitions, fourth_root, label_to_id, next_fourth_power, triple_label, PartitionScheme, TripleLabel,
};

use crate::error::{Error, Result};

/// Absent-edge sentinel. Every finite weight handled by the crate is far below it.
pub const INF: i64 = i64::MAX / 4;

/// Saturating addition on the extended integers: anything involving `INF` is `INF`.
#[inline]
pub fn sat_add(a: i64, b: i64) -> i64 {
    if a >= INF || b >= INF {
        INF
    } else {
        (a + b).min(INF)
    }
}

#[inline]
pub fn is_finite(w: i64) -> bool {
    w < INF
}

/// Dense integer-weighted graph. `weights[u * n + v]` is the weight of `u -> v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    directed: bool,
    w_max: i64,
    weights: Vec<i64>,
}

impl WeightedGraph {
    pub fn new(n: usize, directed: bool, w_max: i64) -> Self {
        let mut weights = vec![INF; n * n];
        for v in 0..n {
            weights[v * n + v] = 0;
        }
        WeightedGraph {
            n,
            directed,
            w_max,
            weights,
        }
    }

    /// Builds a graph from a full row-major matrix. The diagonal is forced to 0.
    pub fn from_matrix(n: usize, directed: bool, w_max: i64, mut weights: Vec<i64>) -> Result<Self> {
        if weights.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "matrix has {} entries, expected {}",
                weights.len(),
                n * n
            )));
        }
        for v in 0..n {
            weights[v * n + v] = 0;
        }
        if !directed {
            for u in 0..n {
                for v in (u + 1)..n {
                    if weights[u * n + v] != weights[v * n + u] {
                        return Err(Error::InvalidArgument(format!(
                            "undirected matrix is not symmetric at ({}, {})",
                            u + 1,
                            v + 1
                        )));
                    }
                }
            }
        }
        Ok(WeightedGraph {
            n,
            directed,
            w_max,
            weights,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn w_max(&self) -> i64 {
        self.w_max
    }

    pub fn set_w_max(&mut self, w_max: i64) {
        self.w_max = w_max;
    }

    #[inline]
    pub fn weight(&self, u: usize, v: usize) -> i64 {
        self.weights[u * self.n + v]
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn row(&self, u: usize) -> &[i64] {
        &self.weights[u * self.n..(u + 1) * self.n]
    }

    /// Sets `u -> v` (and `v -> u` when undirected). Use `INF` to delete.
    pub fn set_weight(&mut self, u: usize, v: usize, w: i64) {
        assert!(u != v, "self-loops are not supported");
        let n = self.n;
        self.weights[u * n + v] = w;
        if !self.directed {
            self.weights[v * n + u] = w;
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && is_finite(self.weight(u, v))
    }

    /// Edges as `(u, v, w)`. Undirected graphs list each edge once with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize, i64)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            let start = if self.directed { 0 } else { u + 1 };
            for v in start..self.n {
                if u != v && is_finite(self.weight(u, v)) {
                    out.push((u, v, self.weight(u, v)));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Largest finite off-diagonal weight magnitude, or 0 for an edgeless graph.
    pub fn max_abs_weight(&self) -> i64 {
        let mut m = 0;
        for u in 0..self.n {
            for v in 0..self.n {
                let w = self.weight(u, v);
                if u != v && is_finite(w) {
                    m = m.max(w.abs());
                }
            }
        }
        m
    }

    /// Nodes reachable from `src` along finite edges.
    pub fn reachable_from(&self, src: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![src];
        seen[src] = true;
        while let Some(u) = stack.pop() {
            for v in 0..self.n {
                if !seen[v] && self.has_edge(u, v) {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Weak connectivity (plain connectivity for undirected graphs).
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..self.n {
                if !seen[v] && (self.has_edge(u, v) || self.has_edge(v, u)) {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Returns a copy on `n_new >= n` nodes; the extra nodes are isolated.
    pub fn with_isolated_nodes(&self, n_new: usize) -> WeightedGraph {
        assert!(n_new >= self.n);
        let mut g = WeightedGraph::new(n_new, self.directed, self.w_max);
        for u in 0..self.n {
            for v in 0..self.n {
                g.weights[u * n_new + v] = self.weight(u, v);
            }
        }
        g
    }

    /// Checks the user-input invariants: zero diagonal, symmetry, weights in `[1, w_max]`.
    pub fn validate_input(&self) -> Result<()> {
        for u in 0..self.n {
            if self.weight(u, u) != 0 {
                return Err(Error::InvalidArgument(format!("nonzero diagonal at node {}", u + 1)));
            }
            for v in 0..self.n {
                let w = self.weight(u, v);
                if u == v || !is_finite(w) {
                    continue;
                }
                if w < 1 || w > self.w_max {
                    return Err(Error::InvalidArgument(format!(
                        "weight {} on ({}, {}) outside [1, {}]",
                        w,
                        u + 1,
                        v + 1,
                        self.w_max
                    )));
                }
                if !self.directed && self.weight(v, u) != w {
                    return Err(Error::InvalidArgument(format!(
                        "asymmetric undirected weight on ({}, {})",
                        u + 1,
                        v + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Pads to the smallest perfect fourth power `>= n` with isolated nodes.
pub fn pad_to_fourth_power(g: &WeightedGraph) -> WeightedGraph {
    let target = next_fourth_power(g.n());
    if target == g.n() {
        g.clone()
    } else {
        g.with_isolated_nodes(target)
    }
}

/// Undirected graph with a terminal set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerInstance {
    pub graph: WeightedGraph,
    /// Terminal node indices, sorted and deduplicated.
    pub terminals: Vec<usize>,
}

impl SteinerInstance {
    pub fn new(graph: WeightedGraph, terminals: Vec<usize>) -> Result<Self> {
        let mut terminals = terminals;
        terminals.sort_unstable();
        terminals.dedup();
        if graph.directed() {
            return Err(Error::InvalidArgument("Steiner instances must be undirected".into()));
        }
        if terminals.is_empty() {
            return Err(Error::InvalidArgument("terminal set is empty".into()));
        }
        if let Some(&t) = terminals.iter().find(|&&t| t >= graph.n()) {
            return Err(Error::InvalidArgument(format!("terminal {} is not a node", t + 1)));
        }
        if !graph.is_connected() {
            return Err(Error::Infeasible("Steiner instance graph is disconnected".into()));
        }
        Ok(SteinerInstance { graph, terminals })
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.terminals.binary_search(&v).is_ok()
    }
}

/// Directed graph with a root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DmstInstance {
    pub graph: WeightedGraph,
    pub root: usize,
}

impl DmstInstance {
    pub fn new(graph: WeightedGraph, root: usize) -> Result<Self> {
        if !graph.directed() {
            return Err(Error::InvalidArgument("DMST instances must be directed".into()));
        }
        if root >= graph.n() {
            return Err(Error::InvalidArgument(format!("root {} is not a node", root + 1)));
        }
        Ok(DmstInstance { graph, root })
    }
}
