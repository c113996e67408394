use super::DistanceMatrix;
use crate::graph::{is_finite, sat_add, WeightedGraph, INF};
use crate::sim::sampling::Coin;

/// Which edges of the full graph survive into the sampled subgraph.
#[derive(Debug, Clone, Copy)]
pub enum EdgeFilter {
    All,
    Sampled(Coin),
}

impl EdgeFilter {
    #[inline]
    pub fn keep(&self, a: usize, b: usize) -> bool {
        match self {
            EdgeFilter::All => true,
            EdgeFilter::Sampled(c) => c.flip_pair(a, b),
        }
    }

    pub fn is_all(&self) -> bool {
        matches!(self, EdgeFilter::All)
    }
}

/// An undirected weighted graph as seen by the triangle-search routines.
///
/// For a candidate pair `uv` the pair's own weight always comes from the full
/// graph; the other two triangle edges must pass the filter.
pub trait TriangleSource {
    /// Nodes of the simulated network (a perfect fourth power).
    fn size(&self) -> usize;
    /// Node count the closed-form round charges are stated for.
    fn charge_size(&self) -> usize;
    /// Largest weight magnitude carried by an edge.
    fn weight_bound(&self) -> i64;
    /// The default candidate set `S`, as pairs `u < v`.
    fn candidate_pairs(&self) -> Vec<(usize, usize)>;
    fn has_edge(&self, a: usize, b: usize) -> bool;
    fn closes(&self, u: usize, v: usize, keep: &EdgeFilter) -> bool;
    /// All third nodes closing a negative triangle with `uv`.
    fn closers(&self, u: usize, v: usize, keep: &EdgeFilter) -> Vec<usize>;
}

/// A plain undirected graph, already padded to a fourth power.
pub struct GraphTriangles<'a> {
    g: &'a WeightedGraph,
}

impl<'a> GraphTriangles<'a> {
    pub fn new(g: &'a WeightedGraph) -> Self {
        GraphTriangles { g }
    }

    #[inline]
    fn closes_via(&self, u: usize, v: usize, w: usize, keep: &EdgeFilter) -> bool {
        if w == u || w == v {
            return false;
        }
        let (uw, wv) = (self.g.weight(u, w), self.g.weight(w, v));
        is_finite(uw)
            && is_finite(wv)
            && self.g.weight(u, v) + uw + wv < 0
            && keep.keep(u, w)
            && keep.keep(w, v)
    }
}

impl TriangleSource for GraphTriangles<'_> {
    fn size(&self) -> usize {
        self.g.n()
    }

    fn charge_size(&self) -> usize {
        self.g.n()
    }

    fn weight_bound(&self) -> i64 {
        self.g.max_abs_weight().max(1)
    }

    fn candidate_pairs(&self) -> Vec<(usize, usize)> {
        self.g.edges().into_iter().map(|(u, v, _)| (u.min(v), u.max(v))).collect()
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.g.has_edge(a, b)
    }

    fn closes(&self, u: usize, v: usize, keep: &EdgeFilter) -> bool {
        is_finite(self.g.weight(u, v)) && (0..self.g.n()).any(|w| self.closes_via(u, v, w, keep))
    }

    fn closers(&self, u: usize, v: usize, keep: &EdgeFilter) -> Vec<usize> {
        if !is_finite(self.g.weight(u, v)) {
            return Vec::new();
        }
        (0..self.g.n()).filter(|&w| self.closes_via(u, v, w, keep)).collect()
    }
}

const TOP: usize = 16;

/// The tripartite graph behind one min-plus product `A * B`.
///
/// Rows sit at `0..n`, the middle index at `n..2n` and columns at `2n..3n`;
/// the network is padded with isolated nodes up to a fourth power. Edges are
/// `A` (row to middle), `B` (middle to column) and `D` (row to column) with
/// `D_ij = -t_ij`, so the triangle `(i, k, j)` is negative exactly when
/// `A_ik + B_kj < t_ij`.
pub struct ProductTriangles {
    n: usize,
    size: usize,
    a: Vec<i64>,
    b: Vec<i64>,
    thresholds: Vec<i64>,
    weight_bound: i64,
    /// Per pair, the `TOP` smallest sums with their middle index, sorted.
    top_sum: Vec<i64>,
    top_mid: Vec<u32>,
    top_len: Vec<u8>,
}

impl ProductTriangles {
    /// `threshold_cap` bounds every threshold that will be installed.
    pub fn new(a: &DistanceMatrix, b: &DistanceMatrix, threshold_cap: i64) -> Self {
        let n = a.n();
        assert_eq!(b.n(), n);
        let size = crate::graph::next_fourth_power(3 * n);
        let mut top_sum = vec![INF; n * n * TOP];
        let mut top_mid = vec![0u32; n * n * TOP];
        let mut top_len = vec![0u8; n * n];
        for i in 0..n {
            let base = i * n;
            for k in 0..n {
                let aik = a.get(i, k);
                if !is_finite(aik) {
                    continue;
                }
                for j in 0..n {
                    let bkj = b.get(k, j);
                    if !is_finite(bkj) {
                        continue;
                    }
                    let s = aik + bkj;
                    let slot = (base + j) * TOP;
                    let len = top_len[base + j] as usize;
                    if len == TOP && s >= top_sum[slot + TOP - 1] {
                        continue;
                    }
                    let mut pos = len.min(TOP - 1);
                    while pos > 0 && top_sum[slot + pos - 1] > s {
                        top_sum[slot + pos] = top_sum[slot + pos - 1];
                        top_mid[slot + pos] = top_mid[slot + pos - 1];
                        pos -= 1;
                    }
                    top_sum[slot + pos] = s;
                    top_mid[slot + pos] = k as u32;
                    if len < TOP {
                        top_len[base + j] += 1;
                    }
                }
            }
        }
        let finite_max = |m: &DistanceMatrix| {
            m.entries().iter().filter(|x| is_finite(**x)).map(|x| x.abs()).max().unwrap_or(0)
        };
        let weight_bound = finite_max(a).max(finite_max(b)).max(threshold_cap.abs()).max(1);
        ProductTriangles {
            n,
            size,
            a: a.entries().to_vec(),
            b: b.entries().to_vec(),
            thresholds: vec![0; n * n],
            weight_bound,
            top_sum,
            top_mid,
            top_len,
        }
    }

    /// Matrix dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Virtual node of row `i`, middle `k`, column `j`.
    pub fn row(&self, i: usize) -> usize {
        i
    }
    pub fn mid(&self, k: usize) -> usize {
        self.n + k
    }
    pub fn col(&self, j: usize) -> usize {
        2 * self.n + j
    }

    pub fn pair(&self, i: usize, j: usize) -> (usize, usize) {
        (self.row(i), self.col(j))
    }

    pub fn set_threshold(&mut self, i: usize, j: usize, t: i64) {
        self.thresholds[i * self.n + j] = t;
    }

    /// The exact product entry `min_k A_ik + B_kj`.
    pub fn product_entry(&self, i: usize, j: usize) -> i64 {
        if self.top_len[i * self.n + j] == 0 {
            INF
        } else {
            self.top_sum[(i * self.n + j) * TOP]
        }
    }

    fn part(&self, x: usize) -> usize {
        (x / self.n).min(3)
    }

    fn decode(&self, u: usize, v: usize) -> Option<(usize, usize)> {
        let (r, c) = if u < v { (u, v) } else { (v, u) };
        (self.part(r) == 0 && self.part(c) == 2).then(|| (r, c - 2 * self.n))
    }

    #[inline]
    fn sum(&self, i: usize, k: usize, j: usize) -> i64 {
        sat_add(self.a[i * self.n + k], self.b[k * self.n + j])
    }
}

impl TriangleSource for ProductTriangles {
    fn size(&self) -> usize {
        self.size
    }

    fn charge_size(&self) -> usize {
        3 * self.n
    }

    fn weight_bound(&self) -> i64 {
        self.weight_bound
    }

    fn candidate_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n * self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.push(self.pair(i, j));
            }
        }
        out
    }

    fn has_edge(&self, x: usize, y: usize) -> bool {
        let (p, q) = (self.part(x), self.part(y));
        let (lo, hi, plo, phi) = if p <= q { (x, y, p, q) } else { (y, x, q, p) };
        let n = self.n;
        match (plo, phi) {
            (0, 1) => is_finite(self.a[lo * n + hi - n]),
            (1, 2) => is_finite(self.b[(lo - n) * n + hi - 2 * n]),
            (0, 2) => true,
            _ => false,
        }
    }

    fn closes(&self, u: usize, v: usize, keep: &EdgeFilter) -> bool {
        let Some((i, j)) = self.decode(u, v) else {
            return false;
        };
        let idx = i * self.n + j;
        let t = self.thresholds[idx];
        let len = self.top_len[idx] as usize;
        if len == 0 || self.top_sum[idx * TOP] >= t {
            return false;
        }
        let coin = match keep {
            EdgeFilter::All => return true,
            EdgeFilter::Sampled(c) => c,
        };
        let (r, c) = (self.row(i), self.col(j));
        for p in 0..len {
            if self.top_sum[idx * TOP + p] >= t {
                return false;
            }
            let m = self.mid(self.top_mid[idx * TOP + p] as usize);
            if coin.flip_pair(r, m) && coin.flip_pair(m, c) {
                return true;
            }
        }
        if len < TOP {
            return false;
        }
        (0..self.n).any(|k| {
            let m = self.mid(k);
            self.sum(i, k, j) < t && coin.flip_pair(r, m) && coin.flip_pair(m, c)
        })
    }

    fn closers(&self, u: usize, v: usize, keep: &EdgeFilter) -> Vec<usize> {
        let Some((i, j)) = self.decode(u, v) else {
            return Vec::new();
        };
        let t = self.thresholds[i * self.n + j];
        let (r, c) = (self.row(i), self.col(j));
        (0..self.n)
            .filter(|&k| {
                let m = self.mid(k);
                self.sum(i, k, j) < t && keep.keep(r, m) && keep.keep(m, c)
            })
            .map(|k| self.mid(k))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_random_graph;

    #[test]
    fn product_entries_match_brute_force() {
        let g = gen_random_graph(20, 0.4, 9, true, 5);
        let a = DistanceMatrix::from_graph(&g);
        let p = ProductTriangles::new(&a, &a, 100);
        let (c, _) = super::super::min_plus(&a, &a);
        for i in 0..20 {
            for j in 0..20 {
                assert_eq!(p.product_entry(i, j), c.get(i, j));
            }
        }
        assert_eq!(p.size(), 81);
    }

    #[test]
    fn sampled_closes_agrees_with_closers() {
        let g = gen_random_graph(24, 0.9, 5, true, 2);
        let a = DistanceMatrix::from_graph(&g);
        let mut p = ProductTriangles::new(&a, &a, 20);
        for i in 0..24 {
            for j in 0..24 {
                p.set_threshold(i, j, ((i * 7 + j) % 11) as i64);
            }
        }
        let f = EdgeFilter::Sampled(Coin::new(9, 1, 0.4));
        for i in 0..24 {
            for j in 0..24 {
                let (u, v) = p.pair(i, j);
                assert_eq!(p.closes(u, v, &f), !p.closers(u, v, &f).is_empty());
                assert_eq!(p.closes(u, v, &EdgeFilter::All), !p.closers(u, v, &EdgeFilter::All).is_empty());
            }
        }
    }

    #[test]
    fn graph_source_finds_the_cycle() {
        let mut g = WeightedGraph::new(16, false, 1);
        g.set_weight(0, 1, -1);
        g.set_weight(1, 2, 0);
        g.set_weight(0, 2, 0);
        let s = GraphTriangles::new(&g);
        assert!(s.closes(0, 1, &EdgeFilter::All));
        assert_eq!(s.closers(1, 2, &EdgeFilter::All), vec![0]);
        assert!(!s.closes(3, 4, &EdgeFilter::All));
    }
}
