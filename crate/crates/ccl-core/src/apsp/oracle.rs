//! Brute-force reference computations.

use std::collections::BTreeSet;

use super::{DistanceMatrix, WitnessMatrix};
use crate::graph::{is_finite, sat_add, WeightedGraph, INF};

/// Every edge `{u, v}` (as `u < v`) of an undirected graph that lies on a
/// triangle of negative total weight.
pub fn find_edges_oracle(g: &WeightedGraph) -> BTreeSet<(usize, usize)> {
    let n = g.n();
    let mut out = BTreeSet::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let uv = g.weight(u, v);
            if !is_finite(uv) {
                continue;
            }
            for w in (v + 1)..n {
                let (vw, wu) = (g.weight(v, w), g.weight(w, u));
                if is_finite(vw) && is_finite(wu) && uv + vw + wu < 0 {
                    out.insert((u, v));
                    out.insert((v, w));
                    out.insert((u, w));
                }
            }
        }
    }
    out
}

pub fn floyd_warshall(g: &WeightedGraph) -> DistanceMatrix {
    let n = g.n();
    let mut d = g.weights().to_vec();
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if !is_finite(dik) {
                continue;
            }
            for j in 0..n {
                let cand = sat_add(dik, d[k * n + j]);
                if cand < d[i * n + j] {
                    d[i * n + j] = cand;
                }
            }
        }
    }
    DistanceMatrix::new(n, d)
}

/// Min-plus product with the smallest minimizing index as witness.
pub fn min_plus(a: &DistanceMatrix, b: &DistanceMatrix) -> (DistanceMatrix, WitnessMatrix) {
    let n = a.n();
    let mut c = vec![INF; n * n];
    let mut h = vec![0usize; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut best = INF;
            let mut arg = 0;
            for k in 0..n {
                let s = sat_add(a.get(i, k), b.get(k, j));
                if s < best {
                    best = s;
                    arg = k;
                }
            }
            c[i * n + j] = best;
            h[i * n + j] = arg;
        }
    }
    (DistanceMatrix::new(n, c), WitnessMatrix::new(n, h))
}

/// Shortest distances using at most `hops` edges.
pub fn hop_bounded_distances(g: &WeightedGraph, hops: usize) -> DistanceMatrix {
    let n = g.n();
    let mut cur = DistanceMatrix::filled(n, INF);
    for v in 0..n {
        cur.set(v, v, 0);
    }
    for _ in 0..hops {
        let mut next = cur.clone();
        for i in 0..n {
            for k in 0..n {
                let dik = cur.get(i, k);
                if !is_finite(dik) {
                    continue;
                }
                for j in 0..n {
                    let cand = sat_add(dik, g.weight(k, j));
                    if cand < next.get(i, j) {
                        next.set(i, j, cand);
                    }
                }
            }
        }
        cur = next;
    }
    cur
}
