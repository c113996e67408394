use crate::graph::{is_finite, sat_add, WeightedGraph, INF};

/// A directed graph on the original nodes plus a super-vertex label per node.
///
/// The label of a super-vertex is its smallest member. Nodes sharing a label
/// are joined by zero-weight edges both ways, so distances in the annotated
/// graph equal distances between super-vertices in the minor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedGraph {
    pub graph: WeightedGraph,
    pub sid: Vec<usize>,
}

impl AnnotatedGraph {
    pub fn identity(g: &WeightedGraph) -> Self {
        AnnotatedGraph {
            graph: g.clone(),
            sid: (0..g.n()).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Super-vertex labels in increasing order.
    pub fn super_vertices(&self) -> Vec<usize> {
        let mut s = self.sid.clone();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn members(&self, s: usize) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.sid[v] == s).collect()
    }

    /// Minor weight from super-vertex `x` to `y` with the lexicographically
    /// smallest node pair attaining it.
    pub fn minor_edge(&self, x: usize, y: usize) -> Option<(i64, (usize, usize))> {
        let mut best: Option<(i64, (usize, usize))> = None;
        for a in self.members(x) {
            for b in self.members(y) {
                let w = self.graph.weight(a, b);
                if a != b && is_finite(w) && best.map_or(true, |(bw, _)| w < bw) {
                    best = Some((w, (a, b)));
                }
            }
        }
        best
    }

    /// The explicit minor, one node per super-vertex in label order, with the
    /// label of each minor node.
    pub fn minor(&self) -> (WeightedGraph, Vec<usize>) {
        let svs = self.super_vertices();
        let m = svs.len();
        let index = |s: usize| svs.binary_search(&s).expect("label exists");
        let mut w = vec![INF; m * m];
        for i in 0..m {
            w[i * m + i] = 0;
        }
        for a in 0..self.n() {
            for b in 0..self.n() {
                let (i, j) = (index(self.sid[a]), index(self.sid[b]));
                let x = self.graph.weight(a, b);
                if i != j && a != b && x < w[i * m + j] {
                    w[i * m + j] = x;
                }
            }
        }
        let top = w.iter().copied().filter(|&x| is_finite(x)).max().unwrap_or(1).max(1);
        let g = WeightedGraph::from_matrix(m, true, top, w).expect("minor matrix is well formed");
        (g, svs)
    }

    /// The graph with every edge between different groups removed; `group`
    /// maps a super-vertex label to its group.
    pub fn restricted(&self, group: impl Fn(usize) -> usize) -> WeightedGraph {
        let mut g = self.graph.clone();
        for a in 0..self.n() {
            for b in 0..self.n() {
                if a != b && group(self.sid[a]) != group(self.sid[b]) {
                    g.set_weight(a, b, INF);
                }
            }
        }
        g
    }
}

/// Soft contraction of the super-vertices in `a` (labels) at level `beta`:
/// edges inside the merged super-vertex become 0, an edge `uv` entering it
/// becomes `W_uv + dist[v] - beta`, all others keep their weight. The merged
/// super-vertex takes the smallest label among its members.
pub fn soft_contract(ag: &AnnotatedGraph, a: &[usize], dist: &[i64], beta: i64) -> AnnotatedGraph {
    let n = ag.n();
    let inside = |v: usize| a.contains(&ag.sid[v]);
    let new_label = a.iter().copied().min().expect("non-empty contraction");
    let sid: Vec<usize> = (0..n).map(|v| if inside(v) { new_label } else { ag.sid[v] }).collect();
    let mut g = ag.graph.clone();
    let mut top = g.w_max();
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let w = ag.graph.weight(u, v);
            let nw = if sid[u] == sid[v] {
                0
            } else if !inside(u) && inside(v) && is_finite(w) {
                sat_add(w, dist[v]) - beta
            } else {
                w
            };
            if is_finite(nw) {
                top = top.max(nw);
            }
            g.set_weight(u, v, nw);
        }
    }
    g.set_w_max(top.max(1));
    AnnotatedGraph { graph: g, sid }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> AnnotatedGraph {
        let mut g = WeightedGraph::new(4, true, 9);
        g.set_weight(0, 1, 5);
        g.set_weight(1, 2, 0);
        g.set_weight(2, 1, 0);
        g.set_weight(3, 2, 4);
        g.set_weight(0, 3, 2);
        AnnotatedGraph::identity(&g)
    }

    #[test]
    fn co_super_vertex_edges_vanish() {
        let ag = soft_contract(&small(), &[1, 2], &[INF, 0, 0, INF], 4);
        assert_eq!(ag.graph.weight(1, 2), 0);
        assert_eq!(ag.graph.weight(2, 1), 0);
        assert_eq!(ag.sid, vec![0, 1, 1, 3]);
    }

    #[test]
    fn entering_edge_at_distance_beta_keeps_weight() {
        let ag = small();
        let dist = [INF, 4, 0, INF];
        let c = soft_contract(&ag, &[1, 2], &dist, 4);
        // head at distance 4 == beta: unchanged
        assert_eq!(c.graph.weight(0, 1), 5);
        // head on the cycle: lowered by beta
        assert_eq!(c.graph.weight(3, 2), 0);
        // edges not entering the set are untouched
        assert_eq!(c.graph.weight(0, 3), 2);
    }

    #[test]
    fn minor_takes_minimum_over_members() {
        let c = soft_contract(&small(), &[1, 2], &[INF, 1, 0, INF], 1);
        let (m, svs) = c.minor();
        assert_eq!(svs, vec![0, 1, 3]);
        assert_eq!(m.weight(0, 1), 5);
        assert_eq!(m.weight(2, 1), 3);
        assert_eq!(c.minor_edge(3, 1), Some((3, (3, 2))));
    }
}
