use std::collections::BTreeSet;

use super::fewp::{fewp_on, paper_fewp_ledger, FewpStats};
use super::{log2, weight_factor, ApspConfig, EdgeFilter, GraphTriangles, TriangleSource};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::sim::sampling::{splitmix64, Coin};
use crate::sim::CostLedger;

pub const PHASE_FIND_EDGES: &str = "FindEdges";

/// Sampling probabilities of the successive FEWP calls before the final
/// unsampled one: `sqrt(60 * 2^i * log n / n)` while `60 * 2^i * log n <= n`.
pub fn sampling_schedule(n: usize) -> Vec<f64> {
    let ln = log2(n);
    let mut out = Vec::new();
    let mut i = 0u32;
    while 60.0 * (1u64 << i) as f64 * ln <= n as f64 {
        out.push((60.0 * (1u64 << i) as f64 * ln / n as f64).sqrt().min(1.0));
        i += 1;
    }
    out
}

pub fn fewp_calls_per_find_edges(n: usize) -> u64 {
    sampling_schedule(n).len() as u64 + 1
}

/// `ceil(log(n / (60 log n))) + 1`, read as a call count and so never below 0.
pub fn c_n(n: usize) -> u64 {
    let x = (n as f64 / (60.0 * log2(n))).log2().ceil() + 1.0;
    x.max(0.0) as u64
}

#[derive(Debug, Clone)]
pub struct FindEdgesOutcome {
    /// Aligned with the candidate list.
    pub flags: Vec<bool>,
    pub ledger: CostLedger,
    /// FEWP calls of the successful attempt.
    pub fewp_calls: u64,
    /// FEWP calls spent in aborted attempts.
    pub wasted_fewp_calls: u64,
    pub retries: u32,
    pub stats: Vec<FewpStats>,
}

impl FindEdgesOutcome {
    pub fn edges(&self, s: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
        s.iter().zip(&self.flags).filter(|(_, &f)| f).map(|(p, _)| *p).collect()
    }
}

struct Attempt {
    flags: Vec<bool>,
    calls: u64,
    stats: Vec<FewpStats>,
}

fn attempt<T: TriangleSource + ?Sized>(
    src: &T,
    s: &[(usize, usize)],
    cfg: &ApspConfig,
    seed: u64,
    calls_made: &mut u64,
    ledger: &mut CostLedger,
) -> Result<Attempt> {
    let mut flags = vec![false; s.len()];
    let mut open: Vec<usize> = (0..s.len()).collect();
    let mut stats = Vec::new();
    let schedule = sampling_schedule(src.size());
    let mut call = 0u64;
    for p in schedule.iter().copied().map(Some).chain(std::iter::once(None)) {
        let keep = match p {
            Some(p) if p < 1.0 => EdgeFilter::Sampled(Coin::new(seed, 2 * call, p)),
            _ => EdgeFilter::All,
        };
        let cand: Vec<(usize, usize)> = open.iter().map(|&i| s[i]).collect();
        *calls_made += 1;
        let out = fewp_on(src, &cand, &keep, cfg, splitmix64(seed ^ (2 * call + 1)))?;
        ledger.merge(&out.ledger);
        let mut still = Vec::with_capacity(open.len());
        for (pos, &idx) in open.iter().enumerate() {
            if out.flags[pos] {
                flags[idx] = true;
            } else {
                still.push(idx);
            }
        }
        open = still;
        stats.push(out.stats);
        call += 1;
    }
    Ok(Attempt {
        flags,
        calls: call,
        stats,
    })
}

/// FindEdges on an arbitrary triangle source for the candidate pairs `s`.
///
/// An aborted attempt is retried with a fresh seed up to `cfg.retry_limit`
/// times. In paper-charged mode the ledger holds the closed-form charge of
/// every FEWP call made, including those of aborted attempts.
pub fn find_edges_on<T: TriangleSource + ?Sized>(
    src: &T,
    s: &[(usize, usize)],
    cfg: &ApspConfig,
    seed: u64,
) -> Result<FindEdgesOutcome> {
    let mut measured = CostLedger::new();
    let mut wasted_calls = 0u64;
    let mut last_err = None;
    for retry in 0..=cfg.retry_limit {
        let mut calls = 0;
        let attempt_seed = splitmix64(seed.wrapping_add(retry as u64 * 0x9E37));
        match attempt(src, s, cfg, attempt_seed, &mut calls, &mut measured) {
            Ok(a) => {
                let mut ledger = if cfg.model.is_paper() {
                    let per_call = paper_fewp_ledger(
                        src.charge_size(),
                        weight_factor(src.charge_size(), src.weight_bound()),
                    );
                    let mut l = CostLedger::new();
                    l.merge_scaled(&per_call, a.calls + wasted_calls);
                    l
                } else {
                    measured
                };
                ledger.note_invocations(PHASE_FIND_EDGES, 1);
                return Ok(FindEdgesOutcome {
                    flags: a.flags,
                    ledger,
                    fewp_calls: a.calls,
                    wasted_fewp_calls: wasted_calls,
                    retries: retry,
                    stats: a.stats,
                });
            }
            Err(e @ Error::SamplingAbort { .. }) => {
                wasted_calls += calls;
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt ran"))
}

/// FindEdges on a plain undirected graph; `g.n()` must be a perfect fourth power.
pub fn find_edges(g: &WeightedGraph, cfg: &ApspConfig) -> Result<(BTreeSet<(usize, usize)>, FindEdgesOutcome)> {
    if g.directed() {
        return Err(Error::InvalidArgument("FindEdges expects an undirected graph".into()));
    }
    let src = GraphTriangles::new(g);
    let s = src.candidate_pairs();
    let out = find_edges_on(&src, &s, cfg, cfg.seed)?;
    Ok((out.edges(&s), out))
}
