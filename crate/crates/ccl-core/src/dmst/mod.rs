//! Directed minimum spanning trees (minimum arborescences).
//!
//! The distributed algorithm keeps the working graph on the original nodes,
//! grouping them into super-vertices by label. Each iteration picks the
//! zero-weight active edges, finds the cycles of the resulting functional
//! graph, computes distances to each cycle inside its active component, and
//! soft-contracts every node close enough to its cycle. The stack of frames
//! is unwound at the end to recover an arborescence of the input.

mod annotated;
mod edmonds;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde_json::json;

pub use annotated::{soft_contract, AnnotatedGraph};
pub use edmonds::{arborescence_bruteforce, edmonds_oracle};

use crate::apsp::{apsp_with_routing, floyd_warshall, ApspConfig, DistanceMatrix};
use crate::error::{Error, Result};
use crate::graph::{is_finite, DmstInstance, WeightedGraph, INF};
use crate::sim::sampling::splitmix64;
use crate::sim::{broadcast_all, exchange, width_for, CostLedger, CostModel, Outbox};

pub mod phases {
    /// Every non-APSP step of one iteration.
    pub const STEP: &str = "DmstStep";
    /// Expanding one layer of contractions.
    pub const UNPACK: &str = "Unpack";
}

/// Rounds charged per non-APSP step.
pub const STEP_ROUNDS: u64 = 2;
/// Non-APSP steps per iteration: broadcast of active edges, cycle detection,
/// choice of the entering edge, contraction.
pub const STEPS_PER_ITERATION: u64 = 4;
/// Rounds charged per unpacked layer.
pub const UNPACK_ROUNDS: u64 = 5;

/// Round bound per invocation of a DMST phase.
pub fn phase_bound(phase: &str) -> Option<f64> {
    match phase {
        phases::STEP => Some(STEP_ROUNDS as f64),
        phases::UNPACK => Some(UNPACK_ROUNDS as f64),
        _ => None,
    }
}

/// `ceil(log2 n)`, 0 for `n <= 1`.
pub fn iteration_bound(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DmstResult {
    /// `(parent, child)` pairs sorted by child.
    pub edges: Vec<(usize, usize)>,
    pub weight: i64,
}

impl DmstResult {
    pub fn from_edges(g: &WeightedGraph, mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable_by_key(|&(u, v)| (v, u));
        let weight = edges.iter().map(|&(u, v)| g.weight(u, v)).sum();
        DmstResult { edges, weight }
    }

    /// One incoming edge per non-root node, all edges present in `g`, every
    /// node reachable from `root`.
    pub fn is_arborescence(&self, g: &WeightedGraph, root: usize) -> bool {
        is_arborescence(g.n(), root, &self.edges, |u, v| g.has_edge(u, v))
    }

    pub fn to_json(&self, root: usize) -> serde_json::Value {
        json!({
            "root": root + 1,
            "weight": self.weight,
            "edges": self.edges.iter().map(|&(u, v)| json!([u + 1, v + 1])).collect::<Vec<_>>(),
        })
    }
}

fn is_arborescence(n: usize, root: usize, edges: &[(usize, usize)], exists: impl Fn(usize, usize) -> bool) -> bool {
    let mut parent = vec![None; n];
    for &(u, v) in edges {
        if v == root || parent[v].is_some() || !exists(u, v) {
            return false;
        }
        parent[v] = Some(u);
    }
    (0..n).all(|mut v| {
        for _ in 0..=n {
            if v == root {
                return true;
            }
            match parent[v] {
                Some(p) => v = p,
                None => return false,
            }
        }
        false
    })
}

pub(crate) fn check_reachable(inst: &DmstInstance) -> Result<()> {
    let seen = inst.graph.reachable_from(inst.root);
    match seen.iter().position(|&s| !s) {
        Some(v) => Err(Error::Infeasible(format!(
            "node {} is not reachable from root {}",
            v + 1,
            inst.root + 1
        ))),
        None => Ok(()),
    }
}

/// Zero-weight active edges: for each non-root super-vertex, one node pair
/// `(tail, head)` realising its incoming edge in the minor.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActiveEdgeSet {
    pub parent: BTreeMap<usize, (usize, usize)>,
}

/// A non-root component of the active edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveComponent {
    /// Super-vertex labels, increasing.
    pub members: Vec<usize>,
    /// Labels on the unique cycle, increasing.
    pub cycle: Vec<usize>,
    /// Largest original node on the cycle.
    pub representative: usize,
}

/// Group of every super-vertex: an index into the component list, or `ROOT_GROUP`.
pub const ROOT_GROUP: usize = usize::MAX;

impl ActiveEdgeSet {
    pub fn parent_label(&self, ag: &AnnotatedGraph, s: usize) -> Option<usize> {
        self.parent.get(&s).map(|&(a, _)| ag.sid[a])
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parent.values().copied().collect()
    }

    /// Non-root components and the group of each super-vertex.
    pub fn components(&self, ag: &AnnotatedGraph) -> (Vec<ActiveComponent>, BTreeMap<usize, usize>) {
        let mut group: BTreeMap<usize, usize> = BTreeMap::new();
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        for s in ag.super_vertices() {
            let mut path = Vec::new();
            let mut on_path = BTreeSet::new();
            let mut cur = s;
            let label = loop {
                if let Some(&g) = group.get(&cur) {
                    break g;
                }
                if on_path.contains(&cur) {
                    let at = path.iter().position(|&x| x == cur).unwrap();
                    let mut c: Vec<usize> = path[at..].to_vec();
                    c.sort_unstable();
                    cycles.push(c);
                    break cycles.len() - 1;
                }
                on_path.insert(cur);
                path.push(cur);
                match self.parent_label(ag, cur) {
                    Some(p) => cur = p,
                    None => break ROOT_GROUP,
                }
            };
            for x in path {
                group.insert(x, label);
            }
        }
        let comps = cycles
            .into_iter()
            .enumerate()
            .map(|(i, cycle)| ActiveComponent {
                members: group.iter().filter(|(_, &g)| g == i).map(|(&s, _)| s).collect(),
                representative: (0..ag.n()).filter(|&v| cycle.contains(&ag.sid[v])).max().unwrap(),
                cycle,
            })
            .collect();
        (comps, group)
    }
}

/// One soft contraction inside an iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    pub component: ActiveComponent,
    pub beta: i64,
    /// The edge `(v, u)` attaining `beta`; it becomes the active edge of the
    /// merged super-vertex.
    pub entry: (usize, usize),
    /// Contracted super-vertex labels (the component members within `beta`
    /// of the cycle).
    pub members: Vec<usize>,
    /// Label of the merged super-vertex.
    pub label: usize,
}

/// Everything needed to expand one iteration's contractions again.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionFrame {
    pub before: AnnotatedGraph,
    pub active: ActiveEdgeSet,
    /// Per original node: distance to its component's representative inside
    /// the component, `INF` outside non-root components.
    pub dist: Vec<i64>,
    pub contractions: Vec<Contraction>,
    /// Shortest paths used when unpacking, as super-vertex label sequences;
    /// filled in by [`unpack`].
    pub paths: Vec<Vec<usize>>,
}

/// Subtracts the cheapest incoming weight at every non-root node and picks,
/// per node, the zero edge with the smallest tail.
fn reduce_and_select(g: &WeightedGraph, root: usize) -> Result<(WeightedGraph, ActiveEdgeSet)> {
    let n = g.n();
    let mut reduced = g.clone();
    let mut active = ActiveEdgeSet::default();
    for v in (0..n).filter(|&v| v != root) {
        let (m, u) = (0..n)
            .filter(|&u| g.has_edge(u, v))
            .map(|u| (g.weight(u, v), u))
            .min()
            .ok_or_else(|| Error::Infeasible(format!("node {} has no incoming edge", v + 1)))?;
        for x in (0..n).filter(|&x| g.has_edge(x, v)) {
            reduced.set_weight(x, v, g.weight(x, v) - m);
        }
        active.parent.insert(v, (u, v));
    }
    Ok((reduced, active))
}

/// Distance of every node to its component representative.
fn cycle_distances(ag: &AnnotatedGraph, comps: &[ActiveComponent], group: &BTreeMap<usize, usize>, d: &DistanceMatrix) -> Vec<i64> {
    (0..ag.n())
        .map(|v| match group[&ag.sid[v]] {
            ROOT_GROUP => INF,
            g => d.get(v, comps[g].representative),
        })
        .collect()
}

/// The graph on which cycle distances are measured: edges between different
/// active components removed.
fn component_graph(ag: &AnnotatedGraph, group: &BTreeMap<usize, usize>) -> WeightedGraph {
    ag.restricted(|s| group[&s])
}

fn plan_contractions(
    ag: &AnnotatedGraph,
    comps: &[ActiveComponent],
    group: &BTreeMap<usize, usize>,
    dist: &[i64],
) -> Result<Vec<Contraction>> {
    let n = ag.n();
    let gid = |v: usize| group[&ag.sid[v]];
    comps
        .iter()
        .enumerate()
        .map(|(ci, comp)| {
            let mut best: Option<(i64, usize, usize)> = None;
            for u in (0..n).filter(|&u| gid(u) == ci && is_finite(dist[u])) {
                for v in (0..n).filter(|&v| gid(v) != ci) {
                    let w = ag.graph.weight(v, u);
                    if is_finite(w) {
                        let c = (w + dist[u], v, u);
                        if best.map_or(true, |b| c < b) {
                            best = Some(c);
                        }
                    }
                }
            }
            let (beta, v, u) = best.ok_or_else(|| Error::Infeasible("an active cycle cannot be entered".into()))?;
            let members: Vec<usize> = comp
                .members
                .iter()
                .copied()
                .filter(|&s| dist[ag.members(s)[0]] <= beta)
                .collect();
            Ok(Contraction {
                component: comp.clone(),
                beta,
                entry: (v, u),
                label: members[0],
                members,
            })
        })
        .collect()
}

fn apply_contractions(
    ag: &AnnotatedGraph,
    active: &ActiveEdgeSet,
    plan: &[Contraction],
    dist: &[i64],
) -> (AnnotatedGraph, ActiveEdgeSet) {
    let mut next = ag.clone();
    for c in plan {
        next = soft_contract(&next, &c.members, dist, c.beta);
    }
    let contracted: BTreeSet<usize> = plan.iter().flat_map(|c| c.members.iter().copied()).collect();
    let mut h = ActiveEdgeSet::default();
    for (&s, &pair) in &active.parent {
        if !contracted.contains(&s) {
            h.parent.insert(s, pair);
        }
    }
    for c in plan {
        h.parent.insert(c.label, c.entry);
    }
    debug_assert!(h.parent.values().all(|&(a, b)| next.graph.weight(a, b) == 0));
    (next, h)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LsiOutcome {
    /// The active edges form an arborescence `(tail, head)`.
    Success(Vec<(usize, usize)>),
    /// One round of contractions: the explicit minor (one node per group),
    /// the original nodes of each minor node, the root's minor index, and
    /// the `beta` of every contraction.
    Contracted {
        minor: WeightedGraph,
        groups: Vec<Vec<usize>>,
        root: usize,
        betas: Vec<i64>,
    },
}

/// One centralised shrinking iteration on `g`: reduce incoming weights, pick
/// active edges, stop if they are acyclic, otherwise contract around every
/// cycle and return the minor.
pub fn lovasz_iteration(g: &WeightedGraph, root: usize) -> Result<LsiOutcome> {
    let (reduced, active) = reduce_and_select(g, root)?;
    let ag = AnnotatedGraph::identity(&reduced);
    let (comps, group) = active.components(&ag);
    if comps.is_empty() {
        return Ok(LsiOutcome::Success(active.edges()));
    }
    let d = floyd_warshall(&component_graph(&ag, &group));
    let dist = cycle_distances(&ag, &comps, &group, &d);
    let plan = plan_contractions(&ag, &comps, &group, &dist)?;
    let (next, _) = apply_contractions(&ag, &active, &plan, &dist);
    let (minor, labels) = next.minor();
    Ok(LsiOutcome::Contracted {
        groups: labels.iter().map(|&s| next.members(s)).collect(),
        root: labels.binary_search(&next.sid[root]).unwrap(),
        betas: plan.iter().map(|c| c.beta).collect(),
        minor,
    })
}

#[derive(Debug, Clone)]
pub enum QdlsiOutcome {
    Success,
    Contracted {
        graph: AnnotatedGraph,
        active: ActiveEdgeSet,
        frame: Box<ContractionFrame>,
    },
}

fn local_step(ledger: &mut CostLedger, model: &CostModel) {
    if model.is_paper() {
        ledger.charge(phases::STEP, STEP_ROUNDS, 0);
    }
    ledger.note_invocations(phases::STEP, 1);
}

/// One distributed iteration. Returns `Success` without cost when the active
/// edges already form a single component.
pub fn qdlsi(ag: &AnnotatedGraph, active: &ActiveEdgeSet, cfg: &ApspConfig) -> Result<(QdlsiOutcome, CostLedger)> {
    let n = ag.n();
    let model = &cfg.model;
    let mut ledger = CostLedger::new();
    let (comps, group) = active.components(ag);
    if comps.is_empty() {
        return Ok((QdlsiOutcome::Success, ledger));
    }
    let id_width = width_for(n as u64);

    // Step 1: everyone learns the active edges and labels.
    if model.is_paper() {
        local_step(&mut ledger, model);
    } else {
        let mut tail = vec![0u64; n];
        for &(a, b) in active.parent.values() {
            tail[b] = a as u64 + 1;
        }
        let payload = (0..n).map(|v| vec![ag.sid[v] as u64, tail[v]]).collect();
        let (_, l) = broadcast_all(payload, id_width, model, phases::STEP)?;
        ledger.merge(&l);
    }

    // Step 2: components, cycles and representatives, computed locally.
    local_step(&mut ledger, model);

    // Step 3: distances inside each component.
    let apsp = apsp_with_routing(&component_graph(ag, &group), cfg)?;
    ledger.merge(&apsp.ledger);
    let dist = cycle_distances(ag, &comps, &group, &apsp.distances);

    // Step 4: each component agrees on its cheapest entering edge.
    let plan = plan_contractions(ag, &comps, &group, &dist)?;
    if model.is_paper() {
        local_step(&mut ledger, model);
    } else {
        let gid = |v: usize| group[&ag.sid[v]];
        let mut top = n as u64;
        let offers: Vec<Option<(u64, u64)>> = (0..n)
            .map(|u| {
                if gid(u) == ROOT_GROUP || !is_finite(dist[u]) {
                    return None;
                }
                (0..n)
                    .filter(|&v| gid(v) != gid(u) && ag.graph.has_edge(v, u))
                    .map(|v| ((ag.graph.weight(v, u) + dist[u]) as u64, v as u64))
                    .min()
            })
            .collect();
        for (c, _) in offers.iter().flatten() {
            top = top.max(*c);
        }
        let outboxes: Vec<Outbox> = (0..n)
            .map(|u| match offers[u] {
                Some((c, v)) => (0..n)
                    .filter(|&x| x != u && gid(x) == gid(u))
                    .map(|x| (x, vec![c, v]))
                    .collect(),
                None => Vec::new(),
            })
            .collect();
        let (_, l) = exchange(n, outboxes, width_for(top), model, phases::STEP)?;
        ledger.merge(&l);
    }

    // Step 5: contracted nodes announce their new label and weight shift.
    let (next, h) = apply_contractions(ag, active, &plan, &dist);
    if model.is_paper() {
        local_step(&mut ledger, model);
    } else {
        let mut top = n as u64;
        let mut payload = vec![Vec::new(); n];
        for c in &plan {
            top = top.max(c.beta as u64);
            for &s in &c.members {
                for v in ag.members(s) {
                    payload[v] = vec![c.label as u64, (c.beta - dist[v]) as u64];
                }
            }
        }
        let (_, l) = broadcast_all(payload, width_for(top), model, phases::STEP)?;
        ledger.merge(&l);
    }

    let frame = ContractionFrame {
        before: ag.clone(),
        active: active.clone(),
        dist,
        contractions: plan,
        paths: Vec::new(),
    };
    Ok((
        QdlsiOutcome::Contracted {
            graph: next,
            active: h,
            frame: Box::new(frame),
        },
        ledger,
    ))
}

/// Super-vertex path from `start` to the cycle of `c`, along edges tight for
/// the cycle distances, inside the contracted set. Breadth-first, so zero
/// weights cannot make it loop.
fn path_to_cycle(frame: &ContractionFrame, c: &Contraction, start: usize) -> Vec<usize> {
    let ag = &frame.before;
    let d = |s: usize| frame.dist[ag.members(s)[0]];
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([start]);
    let mut seen = BTreeSet::from([start]);
    while let Some(x) = queue.pop_front() {
        if c.component.cycle.contains(&x) {
            let mut path = vec![x];
            let mut cur = x;
            while let Some(&p) = prev.get(&cur) {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return path;
        }
        for &y in &c.members {
            if seen.contains(&y) {
                continue;
            }
            if let Some((w, _)) = ag.minor_edge(x, y) {
                if w + d(y) == d(x) {
                    seen.insert(y);
                    prev.insert(y, x);
                    queue.push_back(y);
                }
            }
        }
    }
    unreachable!("every contracted super-vertex reaches its cycle")
}

/// Expands one frame: `tree` holds one `(tail, head)` pair per non-root
/// super-vertex after the frame's contractions; the result holds one per
/// super-vertex before them.
pub fn unpack_layer(frame: &mut ContractionFrame, tree: &[(usize, usize)], model: &CostModel) -> Result<(Vec<(usize, usize)>, CostLedger)> {
    let ag = frame.before.clone();
    let n = ag.n();
    let mut out = tree.to_vec();
    let mut paths = Vec::new();
    let mut zeta_nodes: Vec<usize> = Vec::new();
    for c in &frame.contractions {
        let inside = |v: usize| c.members.contains(&ag.sid[v]);
        let &(_, head) = tree
            .iter()
            .find(|&&(a, b)| inside(b) && !inside(a))
            .expect("the merged super-vertex has an incoming tree edge");
        let path = path_to_cycle(frame, c, ag.sid[head]);
        for w in path.windows(2) {
            out.push(ag.minor_edge(w[0], w[1]).expect("tight edge exists").1);
        }
        for &s in c.members.iter().filter(|s| !path.contains(s)) {
            out.push(frame.active.parent[&s]);
        }
        for &s in &path {
            zeta_nodes.extend(ag.members(s));
        }
        paths.push(path);
    }
    frame.paths = paths;

    let mut ledger = CostLedger::new();
    if model.is_paper() {
        ledger.charge(phases::UNPACK, UNPACK_ROUNDS, 0);
    } else {
        // 1. candidate entering weights within each merged set;
        // 2. routing entries towards the chosen entry node;
        // 3. the entry node marks the path;
        // 4. candidate leaving weights within each merged set;
        // 5. path nodes tell their in-neighbours which edge survives.
        let label_of = |v: usize| frame.contractions.iter().position(|c| c.members.contains(&ag.sid[v]));
        let top = ag.graph.weights().iter().copied().filter(|&w| is_finite(w)).max().unwrap_or(1).max(n as i64) as u64;
        let within = |v: usize, val: Vec<u64>| -> Outbox {
            match label_of(v) {
                Some(ci) => (0..n)
                    .filter(|&x| x != v && label_of(x) == Some(ci))
                    .map(|x| (x, val.clone()))
                    .collect(),
                None => Vec::new(),
            }
        };
        let w = width_for(top);
        let boxes: Vec<Outbox> = (0..n).map(|v| within(v, vec![frame.dist[v].min(top as i64) as u64])).collect();
        ledger.merge(&exchange(n, boxes, w, model, phases::UNPACK)?.1);
        let boxes: Vec<Outbox> = (0..n)
            .map(|v| match label_of(v) {
                Some(ci) => {
                    let entry = frame.contractions[ci].entry.1;
                    if entry == v { Vec::new() } else { vec![(entry, vec![v as u64])] }
                }
                None => Vec::new(),
            })
            .collect();
        ledger.merge(&exchange(n, boxes, width_for(n as u64), model, phases::UNPACK)?.1);
        let boxes: Vec<Outbox> = (0..n)
            .map(|v| {
                if frame.contractions.iter().any(|c| c.entry.1 == v) {
                    zeta_nodes.iter().filter(|&&x| x != v).map(|&x| (x, vec![1])).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        ledger.merge(&exchange(n, boxes, 1, model, phases::UNPACK)?.1);
        let boxes: Vec<Outbox> = (0..n).map(|v| within(v, vec![v as u64])).collect();
        ledger.merge(&exchange(n, boxes, width_for(n as u64), model, phases::UNPACK)?.1);
        let boxes: Vec<Outbox> = (0..n)
            .map(|v| {
                if zeta_nodes.contains(&v) {
                    (0..n).filter(|&u| ag.graph.has_edge(u, v)).map(|u| (u, vec![1])).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        ledger.merge(&exchange(n, boxes, 1, model, phases::UNPACK)?.1);
        // the five exchanges make up one invocation
        if let Some(p) = ledger.phases.get_mut(phases::UNPACK) {
            p.invocations = 0;
        }
    }
    ledger.note_invocations(phases::UNPACK, 1);
    Ok((out, ledger))
}

/// Unwinds `frames` (last pushed first) starting from `tree`. Also returns
/// the tree after every layer, topmost first.
pub fn unpack(
    frames: &mut [ContractionFrame],
    tree: Vec<(usize, usize)>,
    model: &CostModel,
) -> Result<(Vec<(usize, usize)>, Vec<Vec<(usize, usize)>>, CostLedger)> {
    let mut ledger = CostLedger::new();
    let mut layers = Vec::new();
    let mut t = tree;
    for frame in frames.iter_mut().rev() {
        let (next, l) = unpack_layer(frame, &t, model)?;
        ledger.merge(&l);
        layers.push(next.clone());
        t = next;
    }
    Ok((t, layers, ledger))
}

/// True when `tree` gives every non-root super-vertex of `ag` exactly one
/// incoming pair from another super-vertex and all reach the root's.
pub fn is_minor_arborescence(ag: &AnnotatedGraph, root: usize, tree: &[(usize, usize)]) -> bool {
    let svs = ag.super_vertices();
    let idx = |v: usize| svs.binary_search(&ag.sid[v]).unwrap();
    let edges: Vec<(usize, usize)> = tree.iter().map(|&(a, b)| (idx(a), idx(b))).collect();
    tree.iter().all(|&(a, b)| ag.graph.has_edge(a, b))
        && is_arborescence(svs.len(), idx(root), &edges, |u, v| u != v)
}

#[derive(Debug, Clone)]
pub struct DmstRun {
    pub result: DmstResult,
    pub ledger: CostLedger,
    pub iterations: usize,
    pub frames: Vec<ContractionFrame>,
    /// The tree on every layer from the final minor down to the input.
    pub layers: Vec<Vec<(usize, usize)>>,
}

impl DmstRun {
    pub fn to_json(&self, root: usize, optimum: Option<i64>) -> serde_json::Value {
        json!({
            "arborescence": self.result.to_json(root),
            "iterations": self.iterations,
            "betas": self.frames.iter().map(|f| f.contractions.iter().map(|c| c.beta).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "optimum": optimum,
            "ledger": self.ledger.to_json(),
        })
    }
}

/// The APSP configuration of iteration `i`: same settings, derived seed.
pub fn iteration_config(cfg: &ApspConfig, i: usize) -> ApspConfig {
    ApspConfig {
        seed: splitmix64(cfg.seed ^ (0xD0 + i as u64)),
        ..*cfg
    }
}

/// Minimum arborescence by repeated distributed shrinking iterations and
/// unpacking.
pub fn run_dmst(inst: &DmstInstance, cfg: &ApspConfig) -> Result<DmstRun> {
    inst.graph.validate_input()?;
    check_reachable(inst)?;
    let (reduced, h0) = reduce_and_select(&inst.graph, inst.root)?;
    let mut ag = AnnotatedGraph::identity(&reduced);
    let mut active = h0;
    let mut frames = Vec::new();
    let mut ledger = CostLedger::new();
    loop {
        let (outcome, l) = qdlsi(&ag, &active, &iteration_config(cfg, frames.len()))?;
        ledger.merge(&l);
        match outcome {
            QdlsiOutcome::Success => break,
            QdlsiOutcome::Contracted { graph, active: h, frame } => {
                frames.push(*frame);
                ag = graph;
                active = h;
            }
        }
    }
    let top = active.edges();
    debug_assert!(is_minor_arborescence(&ag, inst.root, &top));
    let mut layers = vec![top.clone()];
    let (edges, lower, l) = unpack(&mut frames, top, &cfg.model)?;
    ledger.merge(&l);
    layers.extend(lower);
    Ok(DmstRun {
        result: DmstResult::from_edges(&inst.graph, edges),
        ledger,
        iterations: frames.len(),
        frames,
        layers,
    })
}
