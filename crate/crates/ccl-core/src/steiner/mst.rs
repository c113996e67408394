use petgraph::unionfind::UnionFind;

use super::{phases, MST_ROUNDS};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::sim::{broadcast_all, width_for, CostLedger, CostModel};

/// Total order on undirected edges: weight, then smaller endpoint, then larger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct EdgeKey {
    pub weight: i64,
    pub lo: usize,
    pub hi: usize,
}

impl EdgeKey {
    pub fn new(u: usize, v: usize, weight: i64) -> Self {
        EdgeKey {
            weight,
            lo: u.min(v),
            hi: u.max(v),
        }
    }
}

/// Centralised Kruskal under [`EdgeKey`] order; a spanning forest when disconnected.
pub fn kruskal(g: &WeightedGraph) -> Vec<(usize, usize)> {
    let mut keys: Vec<EdgeKey> = g.edges().into_iter().map(|(u, v, w)| EdgeKey::new(u, v, w)).collect();
    keys.sort_unstable();
    let mut uf = UnionFind::<usize>::new(g.n());
    keys.into_iter()
        .filter(|k| uf.union(k.lo, k.hi))
        .map(|k| (k.lo, k.hi))
        .collect()
}

/// Minimum spanning tree of an undirected graph by Borůvka phases: every node
/// broadcasts its lightest edge leaving its component, then all nodes apply
/// the same merges. Paper-charged mode books a flat 54 rounds instead.
pub fn mst_modified(g: &WeightedGraph, model: &CostModel) -> Result<(Vec<(usize, usize)>, CostLedger)> {
    let n = g.n();
    if n > 1 && !g.is_connected() {
        return Err(Error::Infeasible("reweighted graph is disconnected".into()));
    }
    let mut uf = UnionFind::<usize>::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    let mut ledger = CostLedger::new();
    let width = width_for((g.max_abs_weight().max(0) as u64).max(n as u64));
    while tree.len() + 1 < n {
        let comp: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
        let proposals: Vec<Option<EdgeKey>> = (0..n)
            .map(|v| {
                (0..n)
                    .filter(|&u| comp[u] != comp[v] && g.has_edge(v, u))
                    .map(|u| EdgeKey::new(v, u, g.weight(v, u)))
                    .min()
            })
            .collect();
        if !model.is_paper() {
            let payload = proposals
                .iter()
                .map(|p| p.map(|k| vec![k.weight as u64, k.lo as u64, k.hi as u64]).unwrap_or_default())
                .collect();
            let (_, l) = broadcast_all(payload, width, model, phases::MST)?;
            ledger.merge(&l);
        }
        let mut best: Vec<Option<EdgeKey>> = vec![None; n];
        for v in 0..n {
            if let Some(k) = proposals[v] {
                let slot = &mut best[comp[v]];
                if slot.map_or(true, |b| k < b) {
                    *slot = Some(k);
                }
            }
        }
        let mut merged = false;
        for k in best.into_iter().flatten() {
            if uf.union(k.lo, k.hi) {
                tree.push((k.lo, k.hi));
                merged = true;
            }
        }
        if !merged {
            return Err(Error::Infeasible("no edge leaves a component".into()));
        }
    }
    if model.is_paper() {
        ledger.charge(phases::MST, MST_ROUNDS, 0);
    }
    ledger.note_invocations(phases::MST, 1);
    if let Some(p) = ledger.phases.get_mut(phases::MST) {
        p.invocations = 1;
    }
    tree.sort_unstable();
    Ok((tree, ledger))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_spanning_graph, INF};

    fn weight(g: &WeightedGraph, t: &[(usize, usize)]) -> i64 {
        t.iter().map(|&(u, v)| g.weight(u, v)).sum()
    }

    #[test]
    fn matches_kruskal_on_random_graphs() {
        for seed in 0..100 {
            let g = gen_spanning_graph(14, 0.3, 6, false, 0, seed);
            let (t, _) = mst_modified(&g, &CostModel::measured()).unwrap();
            let mut k = kruskal(&g);
            k.sort_unstable();
            assert_eq!(t, k, "seed {seed}");
        }
    }

    #[test]
    fn kruskal_weight_matches_petgraph() {
        use petgraph::algo::min_spanning_tree;
        use petgraph::data::Element;
        use petgraph::graph::UnGraph;
        for seed in 0..20 {
            let g = gen_spanning_graph(12, 0.4, 9, false, 0, seed);
            let pg = UnGraph::<(), i64>::from_edges(g.edges().into_iter().map(|(u, v, w)| (u as u32, v as u32, w)));
            let total: i64 = min_spanning_tree(&pg)
                .filter_map(|e| match e {
                    Element::Edge { weight, .. } => Some(weight),
                    _ => None,
                })
                .sum();
            assert_eq!(weight(&g, &kruskal(&g)), total);
        }
    }

    #[test]
    fn uniform_weights() {
        let mut g = WeightedGraph::new(5, false, 3);
        for u in 0..5 {
            for v in (u + 1)..5 {
                g.set_weight(u, v, 3);
            }
        }
        let (t, _) = mst_modified(&g, &CostModel::measured()).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(weight(&g, &t), 12);
    }

    #[test]
    fn paper_charge_is_flat() {
        let g = gen_spanning_graph(10, 0.5, 4, false, 0, 1);
        let (_, l) = mst_modified(&g, &CostModel::paper_charged()).unwrap();
        assert_eq!(l.rounds, 54);
        assert_eq!(l.invocations(phases::MST), 1);
    }

    #[test]
    fn measured_rounds_grow_logarithmically() {
        let g = gen_spanning_graph(32, 0.2, 4, false, 0, 3);
        let (_, l) = mst_modified(&g, &CostModel::measured()).unwrap();
        // at most five Borůvka phases, each a broadcast of three short values
        assert!(l.rounds <= 5 * 3, "{}", l.rounds);
    }

    #[test]
    fn disconnected_is_infeasible() {
        let mut g = WeightedGraph::new(4, false, 1);
        g.set_weight(0, 1, 1);
        g.set_weight(2, 3, INF);
        assert!(matches!(mst_modified(&g, &CostModel::measured()), Err(Error::Infeasible(_))));
    }
}
