//! Exact minimum Steiner trees for small instances.

use super::mst::kruskal;
use super::{SteinerTree, WeightedGraph};
use crate::apsp::floyd_warshall;
use crate::error::{Error, Result};
use crate::graph::{is_finite, sat_add, SteinerInstance, INF};

/// Terminal counts up to this use the subset dynamic program.
pub const MAX_DP_TERMINALS: usize = 10;
/// Otherwise the non-terminals are enumerated, up to this many.
pub const MAX_ENUMERATED_STEINER_NODES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalSteiner {
    pub tree: SteinerTree,
    pub weight: i64,
    /// Leaves of the returned optimal tree (all of them terminals).
    pub terminal_leaves: usize,
}

/// Optimal Steiner tree by the Dreyfus–Wagner recursion over terminal
/// subsets, or by enumerating Steiner-node subsets when there are many
/// terminals but few other nodes.
pub fn steiner_exact_oracle(inst: &SteinerInstance) -> Result<OptimalSteiner> {
    let k = inst.terminals.len();
    let n = inst.graph.n();
    if k <= MAX_DP_TERMINALS {
        dreyfus_wagner(inst)
    } else if n - k <= MAX_ENUMERATED_STEINER_NODES {
        steiner_bruteforce(inst)
    } else {
        Err(Error::TooLarge(format!(
            "exact Steiner oracle needs at most {MAX_DP_TERMINALS} terminals or {MAX_ENUMERATED_STEINER_NODES} other nodes"
        )))
    }
}

/// Shortest-path successor matrix for path expansion.
fn successors(g: &WeightedGraph) -> Vec<usize> {
    let n = g.n();
    let mut d = g.weights().to_vec();
    let mut next: Vec<usize> = (0..n * n).map(|i| i % n).collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let c = sat_add(d[i * n + k], d[k * n + j]);
                if c < d[i * n + j] {
                    d[i * n + j] = c;
                    next[i * n + j] = next[i * n + k];
                }
            }
        }
    }
    next
}

fn finish(g: &WeightedGraph, inst: &SteinerInstance, edges: Vec<(usize, usize)>) -> OptimalSteiner {
    // The union of expanded paths is already optimal; taking its MST and
    // pruning only guards against zero-weight cycles.
    let n = g.n();
    let mut sub = WeightedGraph::new(n, false, g.w_max());
    for &(u, v) in &edges {
        sub.set_weight(u, v, g.weight(u, v));
    }
    let forest = kruskal(&sub);
    let tree = super::prune(inst, &forest, &crate::sim::CostModel::paper_charged())
        .expect("paper-charged pruning cannot fail")
        .0;
    OptimalSteiner {
        weight: tree.weight,
        terminal_leaves: tree.leaves().len(),
        tree,
    }
}

fn dreyfus_wagner(inst: &SteinerInstance) -> Result<OptimalSteiner> {
    let g = &inst.graph;
    let n = g.n();
    let z = &inst.terminals;
    let k = z.len();
    let d = floyd_warshall(g);
    let full = (1usize << k) - 1;
    // dp[mask * n + v]: cheapest tree spanning the terminals in mask plus v.
    // split[..] is the submask that formed the value before path relaxation,
    // attach[..] the node whose pre-relaxation tree is extended by a path to v.
    let mut dp = vec![INF; (full + 1) * n];
    let mut split = vec![0usize; (full + 1) * n];
    let mut attach: Vec<usize> = (0..(full + 1) * n).map(|i| i % n).collect();
    for (i, &t) in z.iter().enumerate() {
        for v in 0..n {
            dp[(1 << i) * n + v] = d.get(t, v);
        }
    }
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        for v in 0..n {
            let mut sub = (mask - 1) & mask;
            while sub > 0 {
                if sub < (mask ^ sub) {
                    let c = sat_add(dp[sub * n + v], dp[(mask ^ sub) * n + v]);
                    if c < dp[mask * n + v] {
                        dp[mask * n + v] = c;
                        split[mask * n + v] = sub;
                    }
                }
                sub = (sub - 1) & mask;
            }
        }
        let base: Vec<i64> = dp[mask * n..(mask + 1) * n].to_vec();
        for v in 0..n {
            for u in 0..n {
                let c = sat_add(base[u], d.get(u, v));
                if c < dp[mask * n + v] {
                    dp[mask * n + v] = c;
                    attach[mask * n + v] = u;
                }
            }
        }
    }
    let root = z[0];
    if !is_finite(dp[full * n + root]) {
        return Err(Error::Infeasible("terminals are not connected".into()));
    }
    let next = successors(g);
    let add_path = |a: usize, b: usize, edges: &mut Vec<(usize, usize)>| {
        let mut cur = a;
        while cur != b {
            let nx = next[cur * n + b];
            edges.push((cur.min(nx), cur.max(nx)));
            cur = nx;
        }
    };
    let mut edges = Vec::new();
    let mut stack = vec![(full, root)];
    while let Some((mask, v)) = stack.pop() {
        if mask.count_ones() == 1 {
            add_path(z[mask.trailing_zeros() as usize], v, &mut edges);
            continue;
        }
        let u = attach[mask * n + v];
        add_path(u, v, &mut edges);
        let sub = split[mask * n + u];
        stack.push((sub, u));
        stack.push((mask ^ sub, u));
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(finish(g, inst, edges))
}

/// Exhaustive search: for every set of Steiner nodes, the MST of the
/// subgraph induced with the terminals.
pub fn steiner_bruteforce(inst: &SteinerInstance) -> Result<OptimalSteiner> {
    let g = &inst.graph;
    let n = g.n();
    let others: Vec<usize> = (0..n).filter(|&v| !inst.is_terminal(v)).collect();
    if others.len() > 24 {
        return Err(Error::TooLarge(format!("{} Steiner nodes to enumerate", others.len())));
    }
    let mut best: Option<(i64, Vec<(usize, usize)>)> = None;
    for mask in 0u64..(1u64 << others.len()) {
        let mut keep = vec![false; n];
        for &t in &inst.terminals {
            keep[t] = true;
        }
        for (i, &v) in others.iter().enumerate() {
            if mask >> i & 1 == 1 {
                keep[v] = true;
            }
        }
        let count = keep.iter().filter(|&&b| b).count();
        let mut sub = WeightedGraph::new(n, false, g.w_max());
        for (u, v, w) in g.edges() {
            if keep[u] && keep[v] {
                sub.set_weight(u, v, w);
            }
        }
        let t = kruskal(&sub);
        if t.len() + 1 != count {
            continue;
        }
        let w: i64 = t.iter().map(|&(u, v)| g.weight(u, v)).sum();
        if best.as_ref().map_or(true, |b| w < b.0) {
            best = Some((w, t));
        }
    }
    let (_, edges) = best.ok_or_else(|| Error::Infeasible("terminals are not connected".into()))?;
    Ok(finish(g, inst, edges))
}
