use serde::Serialize;

use super::fewp::paper_fewp_ledger;
use super::find_edges::{fewp_calls_per_find_edges, find_edges_on, PHASE_FIND_EDGES};
use super::{
    weight_factor, ApspConfig, DistanceMatrix, ProductTriangles, RoutingTables, TriangleSource,
    WitnessMatrix,
};
use crate::error::{Error, Result};
use crate::graph::{is_finite, WeightedGraph, INF};
use crate::sim::sampling::splitmix64;
use crate::sim::CostLedger;

pub const PHASE_REDISTRIBUTE: &str = "Redistribute";

/// Bookkeeping for one distance product.
#[derive(Debug, Clone, Serialize)]
pub struct SquaringTrace {
    pub index: usize,
    /// Nodes of the simulated tripartite network.
    pub node_count: usize,
    /// Node count the closed-form charges use (three copies of each node).
    pub charge_size: usize,
    pub weight_factor: u64,
    /// Largest finite value the binary search had to consider.
    pub search_range: i64,
    pub findedges_calls: u64,
    pub findedges_charged: u64,
    /// `ceil(log2(n * max_min_sum + n))` for witnessed products,
    /// `ceil(log2(2M))` otherwise.
    pub findedges_bound: u64,
    pub max_min_sum: Option<i64>,
    pub fewp_calls_per_findedges: u64,
    /// FEWP calls the ledger pays for.
    pub fewp_calls_charged: u64,
    pub retries: u32,
    #[serde(skip)]
    pub distances: DistanceMatrix,
    #[serde(skip)]
    pub witness: Option<WitnessMatrix>,
}

#[derive(Debug, Clone)]
pub struct ProductOutcome {
    pub product: DistanceMatrix,
    pub witness: Option<WitnessMatrix>,
    pub ledger: CostLedger,
    pub trace: SquaringTrace,
}

fn ceil_log2(x: i64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - ((x - 1) as u64).leading_zeros() as u64
    }
}

fn check_nonnegative(m: &DistanceMatrix) -> Result<()> {
    if m.min_entry() < 0 {
        return Err(Error::Domain("distance products need nonnegative entries".into()));
    }
    Ok(())
}

struct Search {
    values: Vec<i64>,
    calls: u64,
    ledger: CostLedger,
    fewp_per_call: u64,
    wasted_fewp: u64,
    retries: u32,
    node_count: usize,
    charge_size: usize,
    weight_factor: u64,
}

/// Binary search of every entry of `a * b` over `[0, range] + {INF}`,
/// one FindEdges call per halving, all entries sharing each call.
fn search_product(a: &DistanceMatrix, b: &DistanceMatrix, range: i64, cfg: &ApspConfig, seed: u64) -> Result<Search> {
    let n = a.n();
    let mut src = ProductTriangles::new(a, b, range + 1);
    let mut lo = vec![0i64; n * n];
    let mut hi = vec![range + 1; n * n];
    let mut open: Vec<usize> = (0..n * n).collect();
    let mut search = Search {
        values: Vec::new(),
        calls: 0,
        ledger: CostLedger::new(),
        fewp_per_call: 0,
        wasted_fewp: 0,
        retries: 0,
        node_count: src.size(),
        charge_size: src.charge_size(),
        weight_factor: weight_factor(src.charge_size(), src.weight_bound()),
    };
    while !open.is_empty() {
        let mut pairs = Vec::with_capacity(open.len());
        for &idx in &open {
            let (i, j) = (idx / n, idx % n);
            let mid = lo[idx] + (hi[idx] - lo[idx]) / 2;
            src.set_threshold(i, j, mid + 1);
            pairs.push(src.pair(i, j));
        }
        let out = find_edges_on(&src, &pairs, cfg, splitmix64(seed ^ search.calls.wrapping_mul(0x51)))?;
        for (pos, &idx) in open.iter().enumerate() {
            let mid = lo[idx] + (hi[idx] - lo[idx]) / 2;
            if out.flags[pos] {
                hi[idx] = mid;
            } else {
                lo[idx] = mid + 1;
            }
        }
        open.retain(|&idx| lo[idx] < hi[idx]);
        search.calls += 1;
        search.fewp_per_call = search.fewp_per_call.max(out.fewp_calls);
        search.wasted_fewp += out.wasted_fewp_calls;
        search.retries += out.retries;
        if !cfg.model.is_paper() {
            search.ledger.merge(&out.ledger);
        }
    }
    search.values = lo.into_iter().map(|v| if v > range { INF } else { v }).collect();
    // injected search failures may legitimately break exactness
    if cfg.grover.failure_rate == 0.0 {
        for i in 0..n {
            for j in 0..n {
                debug_assert_eq!(search.values[i * n + j], src.product_entry(i, j));
            }
        }
    }
    Ok(search)
}

fn paper_ledger(s: &Search, charged_calls: u64) -> (CostLedger, u64) {
    let per_call = paper_fewp_ledger(s.charge_size, s.weight_factor);
    let fewp = charged_calls * fewp_calls_per_find_edges(s.node_count) + s.wasted_fewp;
    let mut l = CostLedger::new();
    l.merge_scaled(&per_call, fewp);
    l.note_invocations(PHASE_FIND_EDGES, charged_calls);
    (l, fewp)
}

fn finish(s: Search, product: DistanceMatrix, witness: Option<WitnessMatrix>, range: i64, bound: u64, mms: Option<i64>, cfg: &ApspConfig) -> ProductOutcome {
    let charged = if cfg.model.is_paper() { bound } else { s.calls };
    let (ledger, fewp_charged) = if cfg.model.is_paper() {
        paper_ledger(&s, charged)
    } else {
        let total = s.ledger.invocations(super::fewp::phases::CP1);
        (s.ledger.clone(), total)
    };
    ProductOutcome {
        trace: SquaringTrace {
            index: 0,
            node_count: s.node_count,
            charge_size: s.charge_size,
            weight_factor: s.weight_factor,
            search_range: range,
            findedges_calls: s.calls,
            findedges_charged: charged,
            findedges_bound: bound,
            max_min_sum: mms,
            fewp_calls_per_findedges: s.fewp_per_call,
            fewp_calls_charged: fewp_charged,
            retries: s.retries,
            distances: product.clone(),
            witness: witness.clone(),
        },
        product,
        witness,
        ledger,
    }
}

/// Min-plus product of matrices with entries in `[0, M] + {INF}`.
pub fn distance_product(a: &DistanceMatrix, b: &DistanceMatrix, cfg: &ApspConfig) -> Result<ProductOutcome> {
    if a.n() != b.n() {
        return Err(Error::InvalidArgument("matrix sizes differ".into()));
    }
    check_nonnegative(a)?;
    check_nonnegative(b)?;
    let m = a.max_finite().unwrap_or(0).max(b.max_finite().unwrap_or(0));
    let range = 2 * m;
    let s = search_product(a, b, range, cfg, cfg.seed)?;
    let product = DistanceMatrix::new(a.n(), s.values.clone());
    let bound = ceil_log2(range.max(2));
    Ok(finish(s, product, None, range, bound, None, cfg))
}

/// `W * W` together with the smallest minimizing index, via one product of
/// `W'_ij = n W_ij + j` and `W''_ij = n W_ij`: the result `K` satisfies
/// `K = n (W * W) + witness`.
pub fn distance_product_with_witness(w: &DistanceMatrix, cfg: &ApspConfig) -> Result<ProductOutcome> {
    check_nonnegative(w)?;
    let n = w.n();
    let ni = n as i64;
    let scale = |v: i64| if is_finite(v) { v * ni } else { INF };
    let mut wp = DistanceMatrix::filled(n, INF);
    let mut wpp = DistanceMatrix::filled(n, INF);
    for i in 0..n {
        for j in 0..n {
            let v = w.get(i, j);
            wpp.set(i, j, scale(v));
            if is_finite(v) {
                wp.set(i, j, v * ni + j as i64);
            }
        }
    }
    let m = w.max_finite().unwrap_or(0);
    let range = ni * 2 * m + ni - 1;
    let s = search_product(&wp, &wpp, range, cfg, cfg.seed)?;
    let mut dist = DistanceMatrix::filled(n, INF);
    let mut wit = vec![0usize; n * n];
    for i in 0..n {
        for j in 0..n {
            let k = s.values[i * n + j];
            if is_finite(k) {
                dist.set(i, j, k / ni);
                wit[i * n + j] = (k % ni) as usize;
            }
        }
    }
    let mms = dist.max_finite();
    let bound = ceil_log2(ni * mms.unwrap_or(0) + ni);
    Ok(finish(s, dist, Some(WitnessMatrix::new(n, wit)), range, bound, mms, cfg))
}

#[derive(Debug, Clone)]
pub struct ApspResult {
    pub distances: DistanceMatrix,
    pub routing: RoutingTables,
    pub ledger: CostLedger,
    pub squarings: Vec<SquaringTrace>,
}

impl ApspResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.distances.n(),
            "distances": self.distances.to_json(),
            "routing": self.routing.to_json(),
            "ledger": self.ledger.to_json(),
            "squarings": self.squarings,
        })
    }
}

/// Number of squarings for an `n`-node graph: `ceil(log2 n)`.
pub fn squaring_count(n: usize) -> usize {
    ceil_log2(n as i64) as usize
}

/// All-pairs shortest paths by repeated witnessed squaring; each squaring
/// also advances every node's first-hop table along the witness.
pub fn apsp_with_routing(g: &WeightedGraph, cfg: &ApspConfig) -> Result<ApspResult> {
    let n = g.n();
    let mut d = DistanceMatrix::from_graph(g);
    check_nonnegative(&d)?;
    let mut routing = RoutingTables::direct(&d);
    let mut ledger = CostLedger::new();
    let mut squarings = Vec::new();
    let bits = cfg.model.message_bits(n.max(2));
    for step in 0..squaring_count(n) {
        let step_cfg = ApspConfig {
            seed: splitmix64(cfg.seed ^ (step as u64 + 1)),
            ..*cfg
        };
        let out = distance_product_with_witness(&d, &step_cfg)?;
        let h = out.witness.as_ref().expect("witnessed product");
        let old = routing.clone();
        for v in 0..n {
            for u in 0..n {
                let hop = if u == v || !is_finite(out.product.get(v, u)) {
                    None
                } else {
                    let k = h.get(v, u);
                    if k == v {
                        old.next_hop(v, u)
                    } else {
                        old.next_hop(v, k)
                    }
                };
                routing.set(v, u, hop);
            }
        }
        ledger.merge(&out.ledger);
        if !cfg.model.is_paper() {
            // Each node ships its new row so the next squaring finds columns in place.
            let wf = out.trace.weight_factor;
            ledger.charge(PHASE_REDISTRIBUTE, 2 * wf, (n * n) as u64 * wf * bits);
            ledger.note_invocations(PHASE_REDISTRIBUTE, 1);
        }
        let mut trace = out.trace;
        trace.index = step;
        squarings.push(trace);
        d = out.product;
    }
    Ok(ApspResult {
        distances: d,
        routing,
        ledger,
        squarings,
    })
}
