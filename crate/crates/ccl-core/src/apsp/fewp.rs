//! Negative-triangle detection under the `Gamma(u, v) <= 90 log n` promise.
//!
//! Outputs come from exact classical evaluation of the search predicates.
//! Costs are either the closed-form per-step charges (paper-charged mode) or
//! routing loads measured on the actual lists (measured mode).

use std::collections::HashMap;

use serde::Serialize;

use super::{log2, weight_factor, ApspConfig, Cp2Threshold, EdgeFilter, GraphTriangles, TriangleSource};
use crate::error::{Error, Result};
use crate::graph::{build_partitions, PartitionScheme, WeightedGraph};
use crate::grover::{self, check_multi_search_preconditions, SearchSpec};
use crate::sim::sampling::{splitmix64, Coin};
use crate::sim::{id_bits, CostLedger, CostModel};

pub mod phases {
    pub const CP1: &str = "CP1";
    pub const CP2: &str = "CP2";
    pub const IDENTIFY_CLASS: &str = "IdentifyClass";
    pub const EVAL_A: &str = "EvaluationA";
    pub const EVAL_B: &str = "EvaluationB";
    pub const EVAL_B_DUP: &str = "EvaluationB-dup";
}

fn quarter(n: usize) -> f64 {
    (n as f64).powf(0.25)
}

/// Largest class index: `floor(log n / 2)`.
pub fn max_class(n: usize) -> u32 {
    (log2(n) / 2.0).floor() as u32
}

/// Closed-form charge of one FEWP call on an `n`-node network whose weights
/// occupy `wf` messages each.
pub fn paper_fewp_ledger(n: usize, wf: u64) -> CostLedger {
    let ln = log2(n);
    let q = quarter(n);
    let mut l = CostLedger::new();
    l.charge(phases::CP1, (2.0 * q).floor() as u64 * wf, 0);
    l.note_invocations(phases::CP1, 1);
    l.charge(phases::CP2, (200.0 * ln).floor() as u64 * wf, 0);
    l.note_invocations(phases::CP2, 1);
    l.charge(phases::IDENTIFY_CLASS, (20.0 * ln).floor() as u64, 0);
    l.note_invocations(phases::IDENTIFY_CLASS, 1);
    let calls = (ln * q).floor() as u64;
    let eval = (3200.0 * ln).floor() as u64;
    for alpha in 0..=max_class(n) {
        let phase = if alpha == 0 { phases::EVAL_A } else { phases::EVAL_B };
        l.charge_quantum(phase, calls * eval, 0);
        l.note_invocations(phase, calls);
        if alpha > 0 {
            l.charge(phases::EVAL_B_DUP, calls * q.floor() as u64, 0);
            l.note_invocations(phases::EVAL_B_DUP, calls);
        }
    }
    l
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FewpStats {
    pub pairs: usize,
    pub found: usize,
    pub cp2_probability: f64,
    /// Candidate pairs that no node sampled in step 2.
    pub uncovered: usize,
    pub max_lambda: usize,
    /// Nodes per class (measured mode only).
    pub class_sizes: Vec<usize>,
    /// Largest `Gamma(u, v)` over the candidates (measured mode only).
    pub max_gamma: usize,
    pub promise_violations: usize,
    pub list_promise_violations: usize,
    pub grover_precondition_failures: usize,
    /// Positive searches turned negative by failure injection.
    pub injected_failures: usize,
}

#[derive(Debug, Clone)]
pub struct FewpOutcome {
    /// Aligned with the candidate list: whether the pair closes a negative triangle.
    pub flags: Vec<bool>,
    pub ledger: CostLedger,
    pub stats: FewpStats,
}

impl FewpOutcome {
    pub fn found(&self, s: &[(usize, usize)]) -> Vec<(usize, usize)> {
        s.iter().zip(&self.flags).filter(|(_, &f)| f).map(|(p, _)| *p).collect()
    }
}

/// `2 * ceil(load / n)` rounds by the two-round routing lemma.
fn routed_rounds(load: usize, n: usize) -> u64 {
    2 * load.div_ceil(n.max(1)) as u64
}

/// Coarse block pair `(i, j)` a candidate belongs to (0-based).
fn block_pair(parts: &PartitionScheme, u: usize, v: usize) -> (usize, usize) {
    (parts.coarse_of(u + 1) - 1, parts.coarse_of(v + 1) - 1)
}

fn node_of(parts: &PartitionScheme, i: usize, j: usize, k: usize) -> usize {
    let r = parts.coarse.len();
    let s = parts.fine.len();
    (i * r + j) * s + k
}

/// Per-node class assignment produced by IdentifyClass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassAssignment {
    /// Class per node index; all zero when counts were not computed.
    pub alpha: Vec<u32>,
    /// Sampled triangle counts `d` per node.
    pub counts: Vec<usize>,
    pub max_lambda: usize,
    /// Whether counts and classes were computed (measured mode).
    pub computed: bool,
    /// Nodes whose class hit the `floor(log n / 2)` cap.
    pub capped: usize,
}

/// Samples `Lambda(u)` for every node, aborts on overload and, when
/// `with_counts`, derives the per-node classes.
pub fn identify_class_on<T: TriangleSource + ?Sized>(
    src: &T,
    s: &[(usize, usize)],
    keep: &EdgeFilter,
    seed: u64,
    with_counts: bool,
) -> Result<ClassAssignment> {
    let n = src.size();
    let parts = build_partitions(n)?;
    let ln = log2(n);
    let p = 10.0 * ln / n as f64;
    let coin = Coin::new(seed, 0x1c, p);
    let mut lambda = vec![0usize; n];
    let mut sampled = vec![false; s.len()];
    for (idx, &(u, v)) in s.iter().enumerate() {
        let by_u = coin.flip((u as u64) << 32 | v as u64);
        let by_v = coin.flip((v as u64) << 32 | u as u64);
        lambda[u] += by_u as usize;
        lambda[v] += by_v as usize;
        sampled[idx] = by_u || by_v;
    }
    let max_lambda = lambda.iter().copied().max().unwrap_or(0);
    if max_lambda as f64 > 20.0 * ln {
        return Err(Error::SamplingAbort {
            phase: phases::IDENTIFY_CLASS.into(),
            msg: format!("a node sampled {max_lambda} partners, limit {:.1}", 20.0 * ln),
        });
    }
    let mut out = ClassAssignment {
        alpha: vec![0; n],
        counts: vec![0; n],
        max_lambda,
        computed: with_counts,
        capped: 0,
    };
    if !with_counts {
        return Ok(out);
    }
    let fine = parts.fine.len();
    for (idx, &(u, v)) in s.iter().enumerate() {
        if !sampled[idx] {
            continue;
        }
        let (i, j) = block_pair(&parts, u, v);
        let mut hit = vec![false; fine];
        for w in src.closers(u, v, keep) {
            hit[parts.fine_of(w + 1) - 1] = true;
        }
        for (k, h) in hit.into_iter().enumerate() {
            if h {
                out.counts[node_of(&parts, i, j, k)] += 1;
            }
        }
    }
    let cap = max_class(n);
    for x in 0..n {
        let d = out.counts[x] as f64;
        let mut c = 0u32;
        while d >= 10.0 * (1u64 << c) as f64 * ln && c < cap {
            c += 1;
        }
        if d >= 10.0 * (1u64 << c) as f64 * ln {
            out.capped += 1;
        }
        out.alpha[x] = c;
    }
    Ok(out)
}

/// [`identify_class_on`] for a plain graph, computing the classes.
pub fn identify_class(g: &WeightedGraph, s: &[(usize, usize)], seed: u64) -> Result<ClassAssignment> {
    identify_class_on(&GraphTriangles::new(g), s, &EdgeFilter::All, seed, true)
}

/// One evaluation query: node `node` asks whether some `w` in fine block
/// `block` closes a negative triangle with `uv`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalRequest {
    pub node: usize,
    pub u: usize,
    pub v: usize,
    pub block: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOutcome {
    pub truths: Vec<bool>,
    /// Rounds of the list routing and answer steps.
    pub rounds: u64,
    /// Rounds of the duplication step (zero for the class-0 procedure).
    pub dup_rounds: u64,
    pub max_list: usize,
    pub promise_ok: bool,
}

fn evaluate<T: TriangleSource + ?Sized>(
    src: &T,
    keep: &EdgeFilter,
    requests: &[EvalRequest],
    alpha: u32,
) -> Result<EvalOutcome> {
    let n = src.size();
    let parts = build_partitions(n)?;
    let ln = log2(n);
    let fine = parts.fine.len();
    let relays = ((1u64 << alpha) as f64 / (720.0 * ln)).floor().max(1.0) as usize;
    let wf = weight_factor(n, src.weight_bound()) as usize;

    let mut lists: HashMap<(usize, usize), usize> = HashMap::new();
    let mut sent = vec![0usize; n];
    let mut recv = vec![0usize; n];
    let mut truths = Vec::with_capacity(requests.len());
    let mut cache: HashMap<(usize, usize), Vec<bool>> = HashMap::new();
    for r in requests {
        if r.block >= fine || r.node >= n {
            return Err(Error::InvalidArgument(format!("evaluation request {r:?} out of range")));
        }
        *lists.entry((r.node, r.block)).or_default() += 1;
        sent[r.node] += 1;
        let (i, j) = block_pair(&parts, r.u, r.v);
        let target = node_of(&parts, i, j, r.block);
        recv[target] += 1;
        let hits = cache.entry((r.u, r.v)).or_insert_with(|| {
            let mut h = vec![false; fine];
            for w in src.closers(r.u, r.v, keep) {
                h[parts.fine_of(w + 1) - 1] = true;
            }
            h
        });
        truths.push(hits[r.block]);
    }
    let max_list = lists.values().copied().max().unwrap_or(0);
    let bound = 800.0 * (1u64 << alpha) as f64 * (n as f64).sqrt() * ln;
    let load = sent
        .iter()
        .copied()
        .max()
        .unwrap_or(0)
        .max(recv.iter().copied().max().unwrap_or(0).div_ceil(relays));
    let rounds = routed_rounds(load * wf, n) + routed_rounds(load, n);
    let dup_rounds = if alpha == 0 { 0 } else { quarter(n).ceil() as u64 };
    Ok(EvalOutcome {
        truths,
        rounds,
        dup_rounds,
        max_list,
        promise_ok: max_list as f64 <= bound,
    })
}

/// Class-0 evaluation: lists go straight to the block owners.
pub fn evaluation_a<T: TriangleSource + ?Sized>(
    src: &T,
    keep: &EdgeFilter,
    requests: &[EvalRequest],
) -> Result<EvalOutcome> {
    evaluate(src, keep, requests, 0)
}

/// Class-`alpha` evaluation: information is duplicated to relay nodes first
/// and lists are split across them.
pub fn evaluation_b<T: TriangleSource + ?Sized>(
    src: &T,
    keep: &EdgeFilter,
    requests: &[EvalRequest],
    alpha: u32,
) -> Result<EvalOutcome> {
    if alpha > max_class(src.size()) {
        return Err(Error::InvalidArgument(format!(
            "class {alpha} exceeds the label capacity {}",
            max_class(src.size())
        )));
    }
    evaluate(src, keep, requests, alpha)
}

/// Solves FEWP for the candidates `s` on the subgraph admitted by `keep`.
pub fn fewp_on<T: TriangleSource + ?Sized>(
    src: &T,
    s: &[(usize, usize)],
    keep: &EdgeFilter,
    cfg: &ApspConfig,
    call_seed: u64,
) -> Result<FewpOutcome> {
    let n = src.size();
    let parts = build_partitions(n)?;
    let ln = log2(n);
    let fine = parts.fine.len();
    let measured = !cfg.model.is_paper();
    let mut stats = FewpStats {
        pairs: s.len(),
        ..FewpStats::default()
    };

    // Step 2: each node (i, j, k) samples pairs of P(U_i, U_j).
    let p2 = 10.0 * ln / (n as f64).sqrt();
    stats.cp2_probability = p2.min(1.0);
    let limit = match cfg.cp2_threshold {
        Cp2Threshold::QuarterRoot => 100.0 * quarter(n) * ln,
        Cp2Threshold::SquareRoot => 100.0 * (n as f64).sqrt() * ln,
    };
    let coarse = parts.coarse_size();
    let coins: Vec<Coin> = (0..fine)
        .map(|k| Coin::new(call_seed, 0x2000 + k as u64, p2))
        .collect();
    if p2 >= 1.0 {
        if coarse as f64 > limit {
            return Err(Error::SamplingAbort {
                phase: phases::CP2.into(),
                msg: format!("{coarse} sampled partners exceed {limit:.1}"),
            });
        }
    } else {
        for (k, coin) in coins.iter().enumerate() {
            for bi in 0..parts.coarse.len() {
                for bj in 0..parts.coarse.len() {
                    for u in bj * coarse..(bj + 1) * coarse {
                        let c = (bi * coarse..(bi + 1) * coarse)
                            .filter(|&v| v != u && coin.flip_pair(u, v))
                            .count();
                        if c as f64 > limit {
                            return Err(Error::SamplingAbort {
                                phase: phases::CP2.into(),
                                msg: format!("node {} of block {} holds {c} pairs, limit {limit:.1}", u + 1, k + 1),
                            });
                        }
                    }
                }
            }
        }
    }
    let covered: Vec<bool> = if p2 >= 1.0 {
        vec![true; s.len()]
    } else {
        s.iter()
            .map(|&(u, v)| coins.iter().any(|c| c.flip_pair(u, v)))
            .collect()
    };
    stats.uncovered = covered.iter().filter(|c| !**c).count();

    // Step 3.1.
    let classes = identify_class_on(src, s, keep, splitmix64(call_seed ^ 0x1d), measured)?;
    stats.max_lambda = classes.max_lambda;

    // Step 3.2: exact evaluation of every search.
    let flags: Vec<bool> = s
        .iter()
        .zip(&covered)
        .enumerate()
        .map(|(i, (&(u, v), &c))| {
            let hit = c && src.closes(u, v, keep);
            if hit && grover::search_fails(&cfg.grover, call_seed, i as u64) {
                stats.injected_failures += 1;
                return false;
            }
            hit
        })
        .collect();
    stats.found = flags.iter().filter(|f| **f).count();

    let ledger = if measured {
        measured_ledger(src, s, keep, cfg, call_seed, &parts, &covered, &classes, &mut stats)?
    } else {
        paper_fewp_ledger(src.charge_size(), weight_factor(src.charge_size(), src.weight_bound()))
    };
    Ok(FewpOutcome { flags, ledger, stats })
}

#[allow(clippy::too_many_arguments)]
fn measured_ledger<T: TriangleSource + ?Sized>(
    src: &T,
    s: &[(usize, usize)],
    keep: &EdgeFilter,
    cfg: &ApspConfig,
    call_seed: u64,
    parts: &PartitionScheme,
    covered: &[bool],
    classes: &ClassAssignment,
    stats: &mut FewpStats,
) -> Result<CostLedger> {
    let n = src.size();
    let ln = log2(n);
    let r = parts.coarse.len();
    let fine = parts.fine.len();
    let coarse = parts.coarse_size();
    let fsize = parts.fine_size();
    let wf = weight_factor(n, src.weight_bound());
    let bits = CostModel::message_bits(&cfg.model, n);
    let mut l = CostLedger::new();

    // Step 1: node (i, j, k) loads the kept edges of P(U_i, U_j) and P(U_j, U'_k).
    let mut block_edges = vec![0usize; r * r];
    for bi in 0..r {
        for bj in 0..r {
            let mut c = 0;
            for u in bi * coarse..(bi + 1) * coarse {
                for v in bj * coarse..(bj + 1) * coarse {
                    if u != v && src.has_edge(u, v) && keep.keep(u, v) {
                        c += 1;
                    }
                }
            }
            block_edges[bi * r + bj] = c;
        }
    }
    let mut cp1_load = 0usize;
    let mut cp1_total = 0usize;
    for bi in 0..r {
        for bj in 0..r {
            for k in 0..fine {
                let mut c = block_edges[bi * r + bj];
                for v in bj * coarse..(bj + 1) * coarse {
                    for w in k * fsize..(k + 1) * fsize {
                        if v != w && src.has_edge(v, w) && keep.keep(v, w) {
                            c += 1;
                        }
                    }
                }
                cp1_load = cp1_load.max(c);
                cp1_total += c;
            }
        }
    }
    l.charge(phases::CP1, routed_rounds(cp1_load, n) * wf, cp1_total as u64 * wf * bits);
    l.note_invocations(phases::CP1, 1);

    // Step 2: node (i, j, k) receives the weights of its sampled candidates.
    let mut held: Vec<Vec<usize>> = vec![Vec::new(); n];
    let p2 = stats.cp2_probability;
    let coins: Vec<Coin> = (0..fine)
        .map(|k| Coin::new(call_seed, 0x2000 + k as u64, p2))
        .collect();
    for (idx, &(u, v)) in s.iter().enumerate() {
        if !covered[idx] {
            continue;
        }
        let (i, j) = block_pair(parts, u, v);
        for (k, coin) in coins.iter().enumerate() {
            if p2 >= 1.0 || coin.flip_pair(u, v) {
                held[node_of(parts, i, j, k)].push(idx);
            }
        }
    }
    let cp2_load = held.iter().map(Vec::len).max().unwrap_or(0);
    let cp2_total: usize = held.iter().map(Vec::len).sum();
    l.charge(phases::CP2, routed_rounds(cp2_load, n) * wf, cp2_total as u64 * wf * bits);
    l.note_invocations(phases::CP2, 1);

    // Step 3.1: every node broadcasts its sampled partners.
    let ml = classes.max_lambda as u64;
    l.charge(phases::IDENTIFY_CLASS, ml, ml * (n as u64 - 1) * n as u64 * id_bits(n));
    l.note_invocations(phases::IDENTIFY_CLASS, 1);

    let top = max_class(n) as usize;
    stats.class_sizes = vec![0; top + 1];
    for &a in &classes.alpha {
        stats.class_sizes[a as usize] += 1;
    }
    for &(u, v) in s {
        let gamma = src.closers(u, v, &EdgeFilter::All).len();
        stats.max_gamma = stats.max_gamma.max(gamma);
        if gamma as f64 > 90.0 * ln {
            stats.promise_violations += 1;
        }
    }

    // Step 3.2: one representative evaluation per class drives the charge.
    for alpha in 0..=top as u32 {
        let members: Vec<usize> = (0..n)
            .filter(|&x| classes.alpha[x] == alpha && !held[x].is_empty())
            .collect();
        if members.is_empty() {
            continue;
        }
        let mut allowed: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for x in 0..n {
            if classes.alpha[x] == alpha {
                let (ij, k) = (x / fine, x % fine);
                allowed.entry((ij / r, ij % r)).or_default().push(k);
            }
        }
        let mut requests = Vec::new();
        let mut domain = 0usize;
        for &x in &members {
            let ij = x / fine;
            let blocks = if alpha == 0 {
                (0..fine).collect()
            } else {
                allowed[&(ij / r, ij % r)].clone()
            };
            domain = domain.max(blocks.len());
            for (l_idx, &idx) in held[x].iter().enumerate() {
                let (u, v) = s[idx];
                let h = splitmix64(call_seed ^ ((x as u64) << 24) ^ l_idx as u64);
                requests.push(EvalRequest {
                    node: x,
                    u,
                    v,
                    block: blocks[(h % blocks.len() as u64) as usize],
                });
            }
        }
        let out = if alpha == 0 {
            evaluation_a(src, keep, &requests)?
        } else {
            evaluation_b(src, keep, &requests, alpha)?
        };
        if !out.promise_ok {
            stats.list_promise_violations += 1;
        }
        let spec = SearchSpec {
            domain_size: domain as u64,
            eval_rounds: out.rounds,
            multiplicity: requests.len() as u64,
            collision_bound: (800.0 * (1u64 << alpha) as f64 * (n as f64).sqrt() * ln) as u64,
        };
        if !check_multi_search_preconditions(&spec).is_empty() {
            stats.grover_precondition_failures += 1;
        }
        let iters = grover::iterations(domain as u64, &cfg.grover) * cfg.grover.repetition_count;
        let phase = if alpha == 0 { phases::EVAL_A } else { phases::EVAL_B };
        l.charge_quantum(phase, iters * out.rounds, iters * 2 * requests.len() as u64);
        l.note_invocations(phase, iters);
        if alpha > 0 {
            l.charge(phases::EVAL_B_DUP, iters * out.dup_rounds, 0);
            l.note_invocations(phases::EVAL_B_DUP, iters);
        }
    }
    Ok(l)
}

/// FEWP on a plain undirected graph whose size is a perfect fourth power.
pub fn fewp(g: &WeightedGraph, s: &[(usize, usize)], cfg: &ApspConfig) -> Result<FewpOutcome> {
    fewp_on(&GraphTriangles::new(g), s, &EdgeFilter::All, cfg, cfg.seed)
}
