//! Negative-triangle finding, min-plus products with witnesses, and APSP with
//! routing tables on top of them.
//!
//! Triangle searches run on a [`TriangleSource`]: either a plain graph or the
//! virtual tripartite graph that encodes one step of a distance product.

mod fewp;
mod find_edges;
pub mod oracle;
mod product;
mod triangles;

use serde::Serialize;

pub use fewp::{
    evaluation_a, evaluation_b, fewp, fewp_on, identify_class, identify_class_on, paper_fewp_ledger,
    max_class, phases, ClassAssignment, EvalOutcome, EvalRequest, FewpOutcome, FewpStats,
};
pub use find_edges::{c_n, sampling_schedule, PHASE_FIND_EDGES, fewp_calls_per_find_edges, find_edges, find_edges_on, FindEdgesOutcome};
pub use oracle::{find_edges_oracle, floyd_warshall, hop_bounded_distances, min_plus};
pub use product::{
    apsp_with_routing, distance_product, distance_product_with_witness, ApspResult, ProductOutcome,
    SquaringTrace, PHASE_REDISTRIBUTE,
};
pub use triangles::{EdgeFilter, GraphTriangles, ProductTriangles, TriangleSource};

use crate::graph::{is_finite, WeightedGraph, INF};
use crate::grover::GroverParams;
use crate::sim::CostModel;

/// Row-major `n x n` matrix over the integers extended with [`INF`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl DistanceMatrix {
    pub fn new(n: usize, entries: Vec<i64>) -> Self {
        assert_eq!(entries.len(), n * n);
        DistanceMatrix { n, entries }
    }

    pub fn filled(n: usize, value: i64) -> Self {
        DistanceMatrix {
            n,
            entries: vec![value; n * n],
        }
    }

    /// The one-hop matrix of `g`: edge weights, zero diagonal, `INF` elsewhere.
    pub fn from_graph(g: &WeightedGraph) -> Self {
        DistanceMatrix::new(g.n(), g.weights().to_vec())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    /// Largest finite entry, if any.
    pub fn max_finite(&self) -> Option<i64> {
        self.entries.iter().copied().filter(|&x| is_finite(x)).max()
    }

    pub fn min_entry(&self) -> i64 {
        self.entries.iter().copied().min().unwrap_or(0)
    }

    /// Nested rows with `null` for `INF`.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<Option<i64>>> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| Some(self.get(i, j)).filter(|&x| x < INF))
                    .collect()
            })
            .collect();
        serde_json::json!(rows)
    }
}

/// Argmin indices of a min-plus product, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessMatrix {
    n: usize,
    entries: Vec<usize>,
}

impl WitnessMatrix {
    pub fn new(n: usize, entries: Vec<usize>) -> Self {
        assert_eq!(entries.len(), n * n);
        WitnessMatrix { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries[i * self.n + j]
    }

    /// 1-based node IDs, row-major.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<usize>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) + 1).collect())
            .collect();
        serde_json::json!(rows)
    }
}

/// First-hop tables: `next_hop(v, u)` is the neighbour of `v` on a shortest
/// `v -> u` path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingTables {
    n: usize,
    next: Vec<Option<usize>>,
}

impl RoutingTables {
    /// Tables for the one-hop matrix: every edge routes directly.
    pub fn direct(d: &DistanceMatrix) -> Self {
        let n = d.n();
        let mut next = vec![None; n * n];
        for v in 0..n {
            for u in 0..n {
                if u != v && is_finite(d.get(v, u)) {
                    next[v * n + u] = Some(u);
                }
            }
        }
        RoutingTables { n, next }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn next_hop(&self, v: usize, u: usize) -> Option<usize> {
        self.next[v * self.n + u]
    }

    fn set(&mut self, v: usize, u: usize, hop: Option<usize>) {
        self.next[v * self.n + u] = hop;
    }

    /// Follows first hops from `v` to `u`. `None` if the walk breaks or
    /// exceeds `n` hops.
    pub fn walk(&self, v: usize, u: usize) -> Option<Vec<usize>> {
        let mut path = vec![v];
        let mut cur = v;
        while cur != u {
            if path.len() > self.n {
                return None;
            }
            cur = self.next_hop(cur, u)?;
            path.push(cur);
        }
        Some(path)
    }

    /// Per-node maps with 1-based IDs: `{ "v": { "u": first_hop } }`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut outer = serde_json::Map::new();
        for v in 0..self.n {
            let mut inner = serde_json::Map::new();
            for u in 0..self.n {
                if let Some(h) = self.next_hop(v, u) {
                    inner.insert((u + 1).to_string(), serde_json::json!(h + 1));
                }
            }
            outer.insert((v + 1).to_string(), serde_json::Value::Object(inner));
        }
        serde_json::Value::Object(outer)
    }
}

/// Which reading of the step-2 overload threshold to enforce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Cp2Threshold {
    /// `100 n^(1/4) log n`
    QuarterRoot,
    /// `100 sqrt(n) log n`
    SquareRoot,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApspConfig {
    pub model: CostModel,
    pub seed: u64,
    /// Extra attempts after a sampling abort inside one FindEdges call.
    pub retry_limit: u32,
    pub grover: GroverParams,
    pub cp2_threshold: Cp2Threshold,
}

impl Default for ApspConfig {
    fn default() -> Self {
        ApspConfig {
            model: CostModel::paper_charged(),
            seed: 0,
            retry_limit: 3,
            grover: GroverParams::default(),
            cp2_threshold: Cp2Threshold::QuarterRoot,
        }
    }
}

impl ApspConfig {
    pub fn with_model(model: CostModel, seed: u64) -> Self {
        ApspConfig {
            model,
            seed,
            ..Self::default()
        }
    }
}

/// `max(1, ceil(log W / log n))`: how many messages one weight occupies.
pub fn weight_factor(n: usize, w: i64) -> u64 {
    if n < 2 || w < 2 {
        return 1;
    }
    let q = (w as f64).log2() / (n as f64).log2();
    (q.ceil() as u64).max(1)
}

pub(crate) fn log2(x: usize) -> f64 {
    (x.max(1) as f64).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_factor_is_one_below_n() {
        assert_eq!(weight_factor(16, 15), 1);
        assert_eq!(weight_factor(16, 16), 1);
        assert_eq!(weight_factor(16, 17), 2);
        assert_eq!(weight_factor(16, 1), 1);
    }

    #[test]
    fn routing_walk_stops_on_cycles() {
        let mut d = DistanceMatrix::filled(3, INF);
        for v in 0..3 {
            d.set(v, v, 0);
        }
        d.set(0, 1, 1);
        d.set(1, 0, 1);
        let mut r = RoutingTables::direct(&d);
        assert_eq!(r.walk(0, 1), Some(vec![0, 1]));
        r.set(0, 2, Some(1));
        r.set(1, 2, Some(0));
        assert_eq!(r.walk(0, 2), None);
    }
}
