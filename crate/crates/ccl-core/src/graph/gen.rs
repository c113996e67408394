use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::WeightedGraph;

/// Erdős–Rényi style graph: every pair (ordered if `directed`) independently
/// carries a uniform weight in `[1, w_max]` with probability `density`.
pub fn gen_random_graph(n: usize, density: f64, w_max: i64, directed: bool, seed: u64) -> WeightedGraph {
    assert!(density > 0.0 && density <= 1.0, "density must lie in (0, 1]");
    assert!(w_max >= 1, "w_max must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = WeightedGraph::new(n, directed, w_max);
    for u in 0..n {
        let start = if directed { 0 } else { u + 1 };
        for v in start..n {
            if u == v {
                continue;
            }
            if rng.gen_bool(density) {
                g.set_weight(u, v, rng.gen_range(1..=w_max));
            }
        }
    }
    g
}

/// A random graph guaranteed to be connected (undirected) or to reach every
/// node from `root` (directed): a random tree hung from `root` first, then
/// extra edges with probability `density`.
pub fn gen_spanning_graph(
    n: usize,
    density: f64,
    w_max: i64,
    directed: bool,
    root: usize,
    seed: u64,
) -> WeightedGraph {
    assert!(root < n.max(1), "root outside the graph");
    let mut g = gen_random_graph(n, density, w_max, directed, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7ee5_eed5);
    let mut order: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    order.insert(0, root);
    for i in 1..order.len() {
        let parent = order[rng.gen_range(0..i)];
        if !g.has_edge(parent, order[i]) {
            g.set_weight(parent, order[i], rng.gen_range(1..=w_max));
        }
    }
    g
}
