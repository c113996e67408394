//! Approximate Steiner trees from APSP output: a shortest-path forest rooted
//! at the terminals, a reweighting that makes crossing edges carry the full
//! terminal-to-terminal path length, an MST of the reweighted graph, and
//! pruning of non-terminal leaves.

mod mst;
pub mod oracle;

use serde::Serialize;

pub use mst::{kruskal, mst_modified, EdgeKey};
pub use oracle::{steiner_bruteforce, steiner_exact_oracle, OptimalSteiner};

use crate::apsp::{apsp_with_routing, ApspConfig, ApspResult, DistanceMatrix, RoutingTables};
use crate::error::{Error, Result};
use crate::graph::{is_finite, SteinerInstance, WeightedGraph, INF};
use crate::sim::{broadcast_all, exchange, id_bits, width_for, CostLedger, CostModel};

pub mod phases {
    pub const SPF: &str = "SPF";
    pub const REWEIGHT: &str = "Reweight";
    pub const MST: &str = "MST";
    pub const PRUNE: &str = "Prune";
}

/// Paper-charged rounds per step.
pub const SPF_ROUNDS: u64 = 2;
pub const REWEIGHT_ROUNDS: u64 = 1;
pub const MST_ROUNDS: u64 = 54;
pub const PRUNE_ROUNDS: u64 = 2;

/// Rounds one invocation of a Steiner step may take.
pub fn phase_bound(phase: &str) -> Option<f64> {
    match phase {
        phases::SPF => Some(SPF_ROUNDS as f64),
        phases::REWEIGHT => Some(2.0),
        phases::MST => Some(MST_ROUNDS as f64),
        phases::PRUNE => Some(PRUNE_ROUNDS as f64),
        _ => None,
    }
}

/// Every node attached to its closest terminal (smallest ID on ties) through
/// its first hop towards it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShortestPathForest {
    pub terminal: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    /// Distance to the chosen terminal.
    pub dist: Vec<i64>,
}

impl ShortestPathForest {
    pub fn n(&self) -> usize {
        self.terminal.len()
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.n()).filter(|&c| self.parent[c] == Some(v)).collect()
    }

    /// Forest edges as `(child, parent)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n()).filter_map(|v| self.parent[v].map(|p| (v, p))).collect()
    }

    pub fn is_forest_edge(&self, u: usize, v: usize) -> bool {
        self.parent[u] == Some(v) || self.parent[v] == Some(u)
    }

    /// Nodes whose tree is rooted at terminal `z`.
    pub fn members(&self, z: usize) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.terminal[v] == z).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeClass {
    /// Edge of the shortest-path forest.
    Forest,
    /// Joins two nodes of the same tree without being a forest edge.
    IntraTree,
    /// Joins two different trees.
    InterTree,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassifiedEdge {
    pub u: usize,
    pub v: usize,
    pub class: EdgeClass,
    pub weight: i64,
    pub modified: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeClassification {
    pub edges: Vec<ClassifiedEdge>,
}

impl EdgeClassification {
    /// The graph on the same nodes with modified weights; `INF` edges dropped.
    pub fn reweighted(&self, n: usize) -> WeightedGraph {
        let w = self.edges.iter().map(|e| e.modified).filter(|&m| is_finite(m)).max().unwrap_or(0);
        let mut g = WeightedGraph::new(n, false, w.max(1));
        for e in &self.edges {
            if is_finite(e.modified) {
                g.set_weight(e.u, e.v, e.modified);
            }
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SteinerTree {
    /// Edges `(u, v, w)` with `u < v` and original weights.
    pub edges: Vec<(usize, usize, i64)>,
    /// Nodes touched by the tree; a lone terminal when there are no edges.
    pub nodes: Vec<usize>,
    pub weight: i64,
}

impl SteinerTree {
    fn from_edges(g: &WeightedGraph, mut edges: Vec<(usize, usize)>, fallback: usize) -> Self {
        edges.iter_mut().for_each(|e| *e = (e.0.min(e.1), e.0.max(e.1)));
        edges.sort_unstable();
        let weighted: Vec<_> = edges.iter().map(|&(u, v)| (u, v, g.weight(u, v))).collect();
        let mut nodes: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        nodes.sort_unstable();
        nodes.dedup();
        if nodes.is_empty() {
            nodes.push(fallback);
        }
        SteinerTree {
            weight: weighted.iter().map(|e| e.2).sum(),
            edges: weighted,
            nodes,
        }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v || e.1 == v).count()
    }

    pub fn leaves(&self) -> Vec<usize> {
        if self.edges.is_empty() {
            return self.nodes.clone();
        }
        self.nodes.iter().copied().filter(|&v| self.degree(v) == 1).collect()
    }

    /// Connected and acyclic on its node set.
    pub fn is_tree(&self) -> bool {
        if self.edges.len() + 1 != self.nodes.len() {
            return false;
        }
        let idx = |v: usize| self.nodes.binary_search(&v).expect("edge endpoint is a node");
        let mut uf = petgraph::unionfind::UnionFind::<usize>::new(self.nodes.len());
        self.edges.iter().all(|&(u, v, _)| uf.union(idx(u), idx(v)))
    }

    pub fn spans(&self, terminals: &[usize]) -> bool {
        terminals.iter().all(|t| self.nodes.binary_search(t).is_ok())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "edges": self.edges.iter().map(|&(u, v, w)| [u as i64 + 1, v as i64 + 1, w]).collect::<Vec<_>>(),
            "nodes": self.nodes.iter().map(|v| v + 1).collect::<Vec<_>>(),
            "weight": self.weight,
        })
    }
}

/// Closest terminal per node (minimum ID among the closest), with the first
/// hop towards it as parent.
pub fn build_spf(
    inst: &SteinerInstance,
    d: &DistanceMatrix,
    routing: &RoutingTables,
    model: &CostModel,
) -> Result<(ShortestPathForest, CostLedger)> {
    let n = inst.graph.n();
    let mut terminal = vec![0; n];
    let mut parent = vec![None; n];
    let mut dist = vec![0; n];
    for v in 0..n {
        let best = inst
            .terminals
            .iter()
            .map(|&z| (d.get(v, z), z))
            .filter(|(dz, _)| is_finite(*dz))
            .min()
            .ok_or_else(|| Error::Infeasible(format!("node {} reaches no terminal", v + 1)))?;
        terminal[v] = best.1;
        dist[v] = best.0;
        if best.1 != v {
            parent[v] = Some(routing.next_hop(v, best.1).ok_or_else(|| {
                Error::InvalidArgument(format!("routing table of node {} has no hop to {}", v + 1, best.1 + 1))
            })?);
        }
    }
    let spf = ShortestPathForest { terminal, parent, dist };
    let mut ledger = CostLedger::new();
    if model.is_paper() {
        ledger.charge(phases::SPF, SPF_ROUNDS, 0);
        ledger.note_invocations(phases::SPF, 1);
    } else {
        // Terminals announce themselves, then every other node tells its parent.
        let flags = (0..n).map(|v| if inst.is_terminal(v) { vec![1] } else { Vec::new() }).collect();
        let (_, l1) = broadcast_all(flags, 1, model, phases::SPF)?;
        let outboxes = (0..n)
            .map(|v| spf.parent[v].map(|p| vec![(p, vec![v as u64])]).unwrap_or_default())
            .collect();
        let (_, l2) = exchange(n, outboxes, id_bits(n) as u32, model, phases::SPF)?;
        ledger.merge(&l1);
        ledger.merge(&l2);
        ledger.phases.get_mut(phases::SPF).expect("phase recorded").invocations = 1;
    }
    Ok((spf, ledger))
}

/// Splits the edges into forest, intra-tree and inter-tree edges. Forest
/// edges cost 0, intra-tree edges are removed, and an inter-tree edge `uv`
/// costs `d(u, s(u)) + W(u, v) + d(v, s(v))`.
pub fn classify_and_reweight(
    inst: &SteinerInstance,
    spf: &ShortestPathForest,
    model: &CostModel,
) -> Result<(EdgeClassification, CostLedger)> {
    let g = &inst.graph;
    let n = g.n();
    let mut edges = Vec::new();
    for (u, v, w) in g.edges() {
        let (class, modified) = if spf.is_forest_edge(u, v) {
            (EdgeClass::Forest, 0)
        } else if spf.terminal[u] == spf.terminal[v] {
            (EdgeClass::IntraTree, INF)
        } else {
            (EdgeClass::InterTree, spf.dist[u] + w + spf.dist[v])
        };
        edges.push(ClassifiedEdge { u, v, class, weight: w, modified });
    }
    let mut ledger = CostLedger::new();
    if model.is_paper() {
        ledger.charge(phases::REWEIGHT, REWEIGHT_ROUNDS, 0);
        ledger.note_invocations(phases::REWEIGHT, 1);
    } else {
        // Each node sends its neighbours its terminal, its distance to it and
        // whether the shared edge is its parent edge.
        let top = spf.dist.iter().copied().max().unwrap_or(0).max(n as i64) as u64;
        let outboxes = (0..n)
            .map(|v| {
                (0..n)
                    .filter(|&u| g.has_edge(v, u))
                    .map(|u| (u, vec![spf.terminal[v] as u64, spf.dist[v] as u64, (spf.parent[v] == Some(u)) as u64]))
                    .collect()
            })
            .collect();
        let (_, l) = exchange(n, outboxes, width_for(top), model, phases::REWEIGHT)?;
        ledger.merge(&l);
    }
    Ok((EdgeClassification { edges }, ledger))
}

/// Strips non-terminal leaves from a spanning tree until every leaf is a terminal.
pub fn prune(
    inst: &SteinerInstance,
    tree: &[(usize, usize)],
    model: &CostModel,
) -> Result<(SteinerTree, CostLedger)> {
    let g = &inst.graph;
    let n = g.n();
    let mut alive: Vec<(usize, usize)> = tree.to_vec();
    let mut degree = vec![0usize; n];
    for &(u, v) in &alive {
        degree[u] += 1;
        degree[v] += 1;
    }
    loop {
        let doomed: Vec<usize> = (0..n).filter(|&v| degree[v] == 1 && !inst.is_terminal(v)).collect();
        if doomed.is_empty() {
            break;
        }
        alive.retain(|&(u, v)| {
            let drop = doomed.contains(&u) && degree[u] == 1 || doomed.contains(&v) && degree[v] == 1;
            !drop
        });
        degree = vec![0; n];
        for &(u, v) in &alive {
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    let out = SteinerTree::from_edges(g, alive, inst.terminals[0]);
    let mut ledger = CostLedger::new();
    if model.is_paper() {
        ledger.charge(phases::PRUNE, PRUNE_ROUNDS, 0);
        ledger.note_invocations(phases::PRUNE, 1);
    } else {
        // Everyone knows the whole MST; each node tells its tree neighbours
        // whether the shared edge survives.
        let kept: std::collections::HashSet<(usize, usize)> = out.edges.iter().map(|e| (e.0, e.1)).collect();
        let outboxes = (0..n)
            .map(|v| {
                tree.iter()
                    .filter_map(|&(a, b)| {
                        let other = if a == v { b } else if b == v { a } else { return None };
                        Some((other, vec![kept.contains(&(a.min(b), a.max(b))) as u64]))
                    })
                    .collect()
            })
            .collect();
        let (_, l) = exchange(n, outboxes, 1, model, phases::PRUNE)?;
        ledger.merge(&l);
    }
    Ok((out, ledger))
}

#[derive(Debug, Clone)]
pub struct SteinerRun {
    pub tree: SteinerTree,
    pub ledger: CostLedger,
    pub apsp: ApspResult,
    pub forest: ShortestPathForest,
    pub classification: EdgeClassification,
    pub mst: Vec<(usize, usize)>,
}

impl SteinerRun {
    pub fn to_json(&self, optimum: Option<&OptimalSteiner>) -> serde_json::Value {
        let mut v = serde_json::json!({
            "tree": self.tree.to_json(),
            "ledger": self.ledger.to_json(),
        });
        if let Some(opt) = optimum {
            v["optimum"] = serde_json::json!(opt.weight);
            v["terminal_leaves"] = serde_json::json!(opt.terminal_leaves);
            v["ratio"] = serde_json::json!(if opt.weight == 0 { 1.0 } else { self.tree.weight as f64 / opt.weight as f64 });
        }
        v
    }
}

/// The full pipeline: APSP with routing tables, forest, reweighting, MST, pruning.
pub fn run_steiner(inst: &SteinerInstance, cfg: &ApspConfig) -> Result<SteinerRun> {
    inst.graph.validate_input()?;
    let apsp = apsp_with_routing(&inst.graph, cfg)?;
    let mut ledger = apsp.ledger.clone();
    let (forest, l) = build_spf(inst, &apsp.distances, &apsp.routing, &cfg.model)?;
    ledger.merge(&l);
    let (classification, l) = classify_and_reweight(inst, &forest, &cfg.model)?;
    ledger.merge(&l);
    let (mst, l) = mst_modified(&classification.reweighted(inst.graph.n()), &cfg.model)?;
    ledger.merge(&l);
    let (tree, l) = prune(inst, &mst, &cfg.model)?;
    ledger.merge(&l);
    Ok(SteinerRun {
        tree,
        ledger,
        apsp,
        forest,
        classification,
        mst,
    })
}

/// `weight <= 2 (1 - 1/l) * optimum`, compared exactly in integers.
pub fn within_ratio(weight: i64, optimum: i64, terminal_leaves: usize) -> bool {
    let l = terminal_leaves.max(1) as i128;
    (weight as i128) * l <= 2 * (l - 1) * optimum as i128
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apsp::floyd_warshall;
    use crate::graph::gen_spanning_graph;

    fn path3() -> SteinerInstance {
        let mut g = WeightedGraph::new(3, false, 1);
        g.set_weight(0, 1, 1);
        g.set_weight(1, 2, 1);
        SteinerInstance::new(g, vec![0, 2]).unwrap()
    }

    fn spf_for(inst: &SteinerInstance) -> ShortestPathForest {
        let r = apsp_with_routing(&inst.graph, &ApspConfig::default()).unwrap();
        build_spf(inst, &r.distances, &r.routing, &CostModel::paper_charged()).unwrap().0
    }

    #[test]
    fn tie_goes_to_smaller_terminal() {
        let spf = spf_for(&path3());
        assert_eq!(spf.terminal, vec![0, 0, 2]);
        assert_eq!(spf.parent, vec![None, Some(0), None]);
    }

    #[test]
    fn all_terminals_means_singleton_trees_and_no_messages() {
        let g = gen_spanning_graph(6, 0.5, 4, false, 0, 1);
        let inst = SteinerInstance::new(g, (0..6).collect()).unwrap();
        let r = apsp_with_routing(&inst.graph, &ApspConfig::default()).unwrap();
        let (spf, l) = build_spf(&inst, &r.distances, &r.routing, &CostModel::measured()).unwrap();
        assert!(spf.parent.iter().all(|p| p.is_none()));
        // only the terminal announcement; no child notifications
        assert_eq!(l.rounds, 1);
    }

    #[test]
    fn forest_chains_realise_terminal_distances() {
        for seed in 0..10 {
            let g = gen_spanning_graph(12, 0.3, 9, false, 0, seed);
            let inst = SteinerInstance::new(g, vec![1, 5, 9]).unwrap();
            let spf = spf_for(&inst);
            let fw = floyd_warshall(&inst.graph);
            for v in 0..12 {
                let best = inst.terminals.iter().map(|&z| fw.get(v, z)).min().unwrap();
                assert_eq!(spf.dist[v], best);
                let mut cur = v;
                let mut walked = 0;
                while let Some(p) = spf.parent[cur] {
                    walked += inst.graph.weight(cur, p);
                    cur = p;
                    assert_eq!(spf.terminal[cur], spf.terminal[v]);
                }
                assert_eq!(cur, spf.terminal[v]);
                assert_eq!(walked, best);
            }
        }
    }

    #[test]
    fn classification_rules() {
        let g = gen_spanning_graph(12, 0.4, 9, false, 0, 4);
        let inst = SteinerInstance::new(g, vec![0, 6]).unwrap();
        let spf = spf_for(&inst);
        let (c, l) = classify_and_reweight(&inst, &spf, &CostModel::paper_charged()).unwrap();
        assert_eq!(l.rounds, 1);
        let fw = floyd_warshall(&inst.graph);
        assert_eq!(c.edges.len(), inst.graph.edge_count());
        for e in &c.edges {
            match e.class {
                EdgeClass::Forest => assert_eq!(e.modified, 0),
                EdgeClass::IntraTree => assert_eq!(e.modified, INF),
                EdgeClass::InterTree => {
                    let (su, sv) = (spf.terminal[e.u], spf.terminal[e.v]);
                    assert_ne!(su, sv);
                    assert_eq!(e.modified, fw.get(e.u, su) + e.weight + fw.get(e.v, sv));
                }
            }
        }
    }

    #[test]
    fn pruning_examples() {
        // star centred on terminal 0
        let mut g = WeightedGraph::new(4, false, 1);
        for v in 1..4 {
            g.set_weight(0, v, 1);
        }
        let inst = SteinerInstance::new(g, vec![0]).unwrap();
        let (t, _) = prune(&inst, &[(0, 1), (0, 2), (0, 3)], &CostModel::paper_charged()).unwrap();
        assert!(t.edges.is_empty());
        assert_eq!(t.nodes, vec![0]);
        // a path whose ends are terminals stays as is
        let inst = path3();
        let (t, l) = prune(&inst, &[(0, 1), (1, 2)], &CostModel::paper_charged()).unwrap();
        assert_eq!(t.edges.len(), 2);
        assert_eq!(l.rounds, 2);
    }

    #[test]
    fn single_terminal_gives_weight_zero() {
        let g = gen_spanning_graph(9, 0.3, 5, false, 0, 2);
        let inst = SteinerInstance::new(g, vec![4]).unwrap();
        let r = run_steiner(&inst, &ApspConfig::default()).unwrap();
        assert_eq!(r.tree.weight, 0);
        assert_eq!(r.tree.nodes, vec![4]);
    }

    #[test]
    fn two_terminals_give_the_shortest_path() {
        for seed in 0..8 {
            let g = gen_spanning_graph(10, 0.3, 7, false, 0, seed);
            let inst = SteinerInstance::new(g, vec![2, 7]).unwrap();
            let r = run_steiner(&inst, &ApspConfig::default()).unwrap();
            assert_eq!(r.tree.weight, floyd_warshall(&inst.graph).get(2, 7));
        }
    }

    #[test]
    fn paper_charged_pipeline_adds_fifty_nine() {
        let g = gen_spanning_graph(9, 0.4, 5, false, 0, 7);
        let inst = SteinerInstance::new(g, vec![0, 3, 8]).unwrap();
        let r = run_steiner(&inst, &ApspConfig::default()).unwrap();
        assert_eq!(r.ledger.rounds, r.apsp.ledger.rounds + 59);
        assert!(r.ledger.is_consistent());
    }

    #[test]
    fn measured_pipeline_matches_paper_output() {
        let g = gen_spanning_graph(11, 0.3, 6, false, 0, 3);
        let inst = SteinerInstance::new(g, vec![1, 4, 10]).unwrap();
        let a = run_steiner(&inst, &ApspConfig::default()).unwrap();
        let b = run_steiner(&inst, &ApspConfig::with_model(CostModel::measured(), 0)).unwrap();
        assert_eq!(a.tree, b.tree);
        assert!(b.ledger.phase_rounds(phases::MST) > 0);
    }

    #[test]
    fn ratio_check_is_exact() {
        assert!(within_ratio(3, 2, 4));
        assert!(!within_ratio(4, 2, 2));
        assert!(within_ratio(2, 2, 2));
        assert!(!within_ratio(1, 0, 1));
        assert!(within_ratio(0, 0, 1));
    }
}
