//! Centralised Chu–Liu/Edmonds minimum arborescence.

use super::{check_reachable, DmstResult};
use crate::error::{Error, Result};
use crate::graph::{DmstInstance, WeightedGraph};

#[derive(Debug, Clone, Copy)]
struct Arc {
    u: usize,
    v: usize,
    w: i64,
    /// Index of this arc in the level above (or in the input list at the top).
    up: usize,
}

/// Minimum-weight arborescence rooted at `inst.root`, or `Infeasible` when
/// some node cannot be reached from the root.
pub fn edmonds_oracle(inst: &DmstInstance) -> Result<DmstResult> {
    check_reachable(inst)?;
    let g = &inst.graph;
    let input: Vec<(usize, usize, i64)> = g.edges();
    let arcs: Vec<Arc> = input
        .iter()
        .enumerate()
        .map(|(i, &(u, v, w))| Arc { u, v, w, up: i })
        .collect();
    let chosen = solve(g.n(), inst.root, &arcs)
        .ok_or_else(|| Error::Infeasible("a non-root node has no incoming edge".into()))?;
    let edges = chosen.into_iter().map(|i| (input[i].0, input[i].1)).collect();
    Ok(DmstResult::from_edges(g, edges))
}

/// Returns indices into `arcs` forming a minimum arborescence.
fn solve(n: usize, root: usize, arcs: &[Arc]) -> Option<Vec<usize>> {
    let mut best: Vec<Option<usize>> = vec![None; n];
    for (i, a) in arcs.iter().enumerate() {
        if a.v == root || a.u == a.v {
            continue;
        }
        let better = match best[a.v] {
            None => true,
            Some(b) => (a.w, a.u, i) < (arcs[b].w, arcs[b].u, b),
        };
        if better {
            best[a.v] = Some(i);
        }
    }
    if (0..n).any(|v| v != root && best[v].is_none()) {
        return None;
    }

    const NONE: usize = usize::MAX;
    let mut comp = vec![NONE; n];
    let mut mark = vec![NONE; n];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        let mut v = s;
        while v != root && mark[v] == NONE && comp[v] == NONE {
            mark[v] = s;
            v = arcs[best[v].unwrap()].u;
        }
        if v != root && mark[v] == s && comp[v] == NONE {
            let id = cycles.len();
            let mut cyc = vec![v];
            comp[v] = id;
            let mut x = arcs[best[v].unwrap()].u;
            while x != v {
                comp[x] = id;
                cyc.push(x);
                x = arcs[best[x].unwrap()].u;
            }
            cycles.push(cyc);
        }
    }
    if cycles.is_empty() {
        return Some((0..n).filter(|&v| v != root).map(|v| best[v].unwrap()).collect());
    }

    let mut next = cycles.len();
    for c in comp.iter_mut() {
        if *c == NONE {
            *c = next;
            next += 1;
        }
    }
    let in_cycle = |v: usize| comp[v] < cycles.len();
    let contracted: Vec<Arc> = arcs
        .iter()
        .enumerate()
        .filter(|(_, a)| comp[a.u] != comp[a.v])
        .map(|(i, a)| Arc {
            u: comp[a.u],
            v: comp[a.v],
            w: if in_cycle(a.v) { a.w - arcs[best[a.v].unwrap()].w } else { a.w },
            up: i,
        })
        .collect();
    let inner = solve(next, comp[root], &contracted)?;

    let mut out: Vec<usize> = inner.iter().map(|&j| contracted[j].up).collect();
    for cyc in &cycles {
        let entered = out
            .iter()
            .map(|&i| arcs[i].v)
            .find(|v| cyc.contains(v))
            .expect("every contracted cycle is entered");
        out.extend(cyc.iter().filter(|&&x| x != entered).map(|&x| best[x].unwrap()));
    }
    Some(out)
}

/// Exhaustive search over one incoming edge per non-root node.
pub fn arborescence_bruteforce(g: &WeightedGraph, root: usize) -> Option<i64> {
    let n = g.n();
    let choices: Vec<Vec<usize>> = (0..n)
        .map(|v| if v == root { vec![] } else { (0..n).filter(|&u| g.has_edge(u, v)).collect() })
        .collect();
    let mut pick = vec![0usize; n];
    let mut best: Option<i64> = None;
    loop {
        let parent: Vec<Option<usize>> = (0..n)
            .map(|v| if v == root { None } else { choices[v].get(pick[v]).copied() })
            .collect();
        if (0..n).all(|v| v == root || parent[v].is_some()) {
            let reaches = (0..n).all(|mut v| {
                for _ in 0..n {
                    match parent[v] {
                        None => return v == root,
                        Some(p) => v = p,
                    }
                }
                v == root
            });
            if reaches {
                let w: i64 = (0..n).filter_map(|v| parent[v].map(|p| g.weight(p, v))).sum();
                best = Some(best.map_or(w, |b| b.min(w)));
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            if i != root && pick[i] + 1 < choices[i].len() {
                pick[i] += 1;
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_spanning_graph;

    pub(crate) fn two_cycle() -> DmstInstance {
        let mut g = WeightedGraph::new(3, true, 2);
        g.set_weight(0, 1, 2);
        g.set_weight(0, 2, 2);
        g.set_weight(1, 2, 1);
        g.set_weight(2, 1, 1);
        DmstInstance::new(g, 0).unwrap()
    }

    #[test]
    fn directed_path_is_its_own_arborescence() {
        let mut g = WeightedGraph::new(3, true, 5);
        g.set_weight(0, 1, 4);
        g.set_weight(1, 2, 5);
        let r = edmonds_oracle(&DmstInstance::new(g, 0).unwrap()).unwrap();
        assert_eq!(r.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(r.weight, 9);
    }

    #[test]
    fn two_node_cycle_weighs_three() {
        let inst = two_cycle();
        assert_eq!(arborescence_bruteforce(&inst.graph, 0), Some(3));
        assert_eq!(edmonds_oracle(&inst).unwrap().weight, 3);
    }

    #[test]
    fn unreachable_node_is_infeasible() {
        let mut g = WeightedGraph::new(3, true, 5);
        g.set_weight(0, 1, 1);
        g.set_weight(2, 1, 1);
        let inst = DmstInstance::new(g, 0).unwrap();
        assert!(matches!(edmonds_oracle(&inst), Err(Error::Infeasible(_))));
    }

    #[test]
    fn matches_enumeration_on_small_digraphs() {
        for seed in 0..60 {
            let g = gen_spanning_graph(6, 0.45, 7, true, 0, seed);
            let inst = DmstInstance::new(g.clone(), 0).unwrap();
            let r = edmonds_oracle(&inst).unwrap();
            assert!(r.is_arborescence(&g, 0), "seed {seed}");
            assert_eq!(Some(r.weight), arborescence_bruteforce(&g, 0), "seed {seed}");
        }
    }

    #[test]
    fn reduction_leaves_the_edge_set_unchanged() {
        for seed in 0..20 {
            let g = gen_spanning_graph(10, 0.4, 9, true, 0, seed);
            let mut reduced = g.clone();
            for v in 1..10 {
                let m = (0..10).filter(|&u| g.has_edge(u, v)).map(|u| g.weight(u, v)).min().unwrap();
                for u in 0..10 {
                    if g.has_edge(u, v) {
                        reduced.set_weight(u, v, g.weight(u, v) - m);
                    }
                }
            }
            let a = edmonds_oracle(&DmstInstance::new(g, 0).unwrap()).unwrap();
            let b = edmonds_oracle(&DmstInstance::new(reduced, 0).unwrap()).unwrap();
            assert_eq!(a.edges, b.edges);
        }
    }
}
