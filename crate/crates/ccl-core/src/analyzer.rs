//! Closed-form round and memory cost formulas, crossover search against the
//! trivial `n`-round strategy, and checks of recorded ledgers against the
//! per-phase bounds.
//!
//! All logarithms are base 2. Formulas take `n` as `f64` so they can be
//! evaluated far beyond the sizes the simulator reaches.

use serde::Serialize;

use crate::apsp::{c_n, phases, ApspResult, SquaringTrace};
use crate::error::{Error, Result};
use crate::sim::CostLedger;

fn lg(x: f64) -> f64 {
    x.log2()
}

/// A named cost expression in the network size.
#[derive(Clone, Copy)]
pub struct CostFormula {
    pub name: &'static str,
    pub description: &'static str,
    eval: fn(f64) -> f64,
}

impl std::fmt::Debug for CostFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CostFormula").field("name", &self.name).finish()
    }
}

impl CostFormula {
    pub const fn new(name: &'static str, description: &'static str, eval: fn(f64) -> f64) -> Self {
        CostFormula { name, description, eval }
    }

    pub fn eval(&self, n: f64) -> f64 {
        (self.eval)(n)
    }
}

/// The per-FEWP-call round expression at product size `m = 3n`, split into
/// its parts so ledgers can be checked term by term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FewpTerms {
    pub pair_loading: f64,
    pub overload_check: f64,
    pub class_sampling: f64,
    pub duplication: f64,
    pub evaluations: f64,
}

impl FewpTerms {
    pub fn at(m: f64, weight_factor: f64) -> Self {
        let lm = lg(m);
        let q = m.powf(0.25);
        FewpTerms {
            pair_loading: 2.0 * q * weight_factor,
            overload_check: 200.0 * lm * weight_factor,
            class_sampling: 20.0 * lm,
            duplication: 2.0 * q,
            evaluations: 0.5 * lm * lm * q * 3200.0 * lm,
        }
    }

    pub fn total(&self) -> f64 {
        self.pair_loading + self.overload_check + self.class_sampling + self.duplication + self.evaluations
    }
}

/// FindEdges calls over all witnessed squarings: `ceil(log n)(ceil(log n)+1)/2`.
pub fn squaring_find_edges_calls(n: f64) -> f64 {
    let c = lg(n).ceil();
    c * (c + 1.0) / 2.0
}

/// FEWP calls per FindEdges in the closed form: `log(3n / (60 log 3n))`.
pub fn fewp_calls_closed_form(n: f64) -> f64 {
    let m = 3.0 * n;
    lg(m / (60.0 * lg(m)))
}

fn weight_factor_f(n: f64, w: f64) -> f64 {
    if w < 2.0 {
        1.0
    } else {
        (lg(w) / lg(n)).ceil().max(1.0)
    }
}

/// Round count of APSP with routing tables, weights ignored.
pub fn eval_f(n: f64) -> f64 {
    eval_f_full_w(n, 1.0)
}

/// [`eval_f`] with the weight-size factor kept on the loading and overload terms.
pub fn eval_f_full_w(n: f64, w: f64) -> f64 {
    let m = 3.0 * n;
    squaring_find_edges_calls(n) * fewp_calls_closed_form(n) * FewpTerms::at(m, weight_factor_f(m, w)).total()
}

/// Distances only: the leading call count becomes `ceil(log n)`.
pub fn eval_f_distances(n: f64) -> f64 {
    lg(n).ceil() * fewp_calls_closed_form(n) * FewpTerms::at(3.0 * n, 1.0).total()
}

/// The dominant term `800 log^6 n * n^(1/4)`, a lower estimate of `f`.
pub fn eval_h(n: f64) -> f64 {
    800.0 * lg(n).powi(6) * n.powf(0.25)
}

/// Rounds of the classical algebraic APSP: `20 n^(1/3) log^4 n`.
pub fn eval_g(n: f64) -> f64 {
    20.0 * n.cbrt() * lg(n).powi(4)
}

pub fn eval_g_full_w(n: f64, w: f64) -> f64 {
    eval_g(n) * weight_factor_f(n, w)
}

pub fn eval_trivial(n: f64) -> f64 {
    n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MemoryKind {
    QuantumApsp,
    Trivial,
    ClassicalApsp,
}

impl std::str::FromStr for MemoryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantum-apsp" | "quantum" => Ok(MemoryKind::QuantumApsp),
            "trivial" => Ok(MemoryKind::Trivial),
            "classical-apsp" | "classical" => Ok(MemoryKind::ClassicalApsp),
            other => Err(Error::InvalidArgument(format!("unknown memory kind '{other}'"))),
        }
    }
}

/// Peak memory in bits at the busiest node.
pub fn eval_memory(kind: MemoryKind, n: f64, w: f64) -> Result<f64> {
    if n < 2.0 || w < 1.0 {
        return Err(Error::Domain(format!("memory formulas need n >= 2 and W >= 1, got n={n}, W={w}")));
    }
    let base = lg(n) * lg(n * w);
    Ok(match kind {
        MemoryKind::QuantumApsp => 720.0 * n.powf(1.75) * base,
        MemoryKind::Trivial => 2.0 * n * n * base,
        MemoryKind::ClassicalApsp => 4.0 * n.powf(4.0 / 3.0) * base + n * base,
    })
}

pub const F: CostFormula = CostFormula::new("f", "APSP with routing tables, quantum", eval_f);
pub const F_DISTANCES: CostFormula = CostFormula::new("f_distances", "APSP distances only, quantum", eval_f_distances);
pub const H: CostFormula = CostFormula::new("h", "dominant term 800 log^6 n n^(1/4)", eval_h);
pub const G: CostFormula = CostFormula::new("g", "classical algebraic APSP", eval_g);
pub const LOG_F: CostFormula = CostFormula::new("log_f", "log n calls to quantum APSP (DMST)", |n| lg(n) * eval_f(n));
pub const LOG_G: CostFormula = CostFormula::new("log_g", "log n calls to classical APSP (DMST)", |n| lg(n) * eval_g(n));
pub const TRIVIAL: CostFormula = CostFormula::new("trivial", "gather everything at one node", eval_trivial);
pub const MEMORY_QUANTUM: CostFormula = CostFormula::new("memory_quantum", "quantum APSP memory, W = 1", |n| {
    720.0 * n.powf(1.75) * lg(n) * lg(n)
});
pub const MEMORY_TRIVIAL: CostFormula = CostFormula::new("memory_trivial", "leader memory, W = 1", |n| 2.0 * n * n * lg(n) * lg(n));
pub const MEMORY_CLASSICAL: CostFormula = CostFormula::new("memory_classical", "classical APSP memory, W = 1", |n| {
    (4.0 * n.powf(4.0 / 3.0) + n) * lg(n) * lg(n)
});

pub fn formulas() -> Vec<CostFormula> {
    vec![F, F_DISTANCES, H, G, LOG_F, LOG_G, TRIVIAL, MEMORY_QUANTUM, MEMORY_TRIVIAL, MEMORY_CLASSICAL]
}

pub fn formula_by_name(name: &str) -> Result<CostFormula> {
    formulas()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown formula '{name}'")))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossoverResult {
    pub formula: &'static str,
    pub comparator: &'static str,
    /// Smallest scanned `n` with `formula(n) < comparator(n)`.
    pub threshold: f64,
    pub formula_at_threshold: f64,
    pub comparator_at_threshold: f64,
    /// The scan point just before the threshold, where the formula was not below.
    pub previous: f64,
    pub formula_at_previous: f64,
    pub comparator_at_previous: f64,
    pub formula_at_half: f64,
    pub comparator_at_half: f64,
    pub granularity: f64,
}

pub const DEFAULT_GRANULARITY: f64 = 0.01;
pub const DEFAULT_START: f64 = 1024.0;
pub const DEFAULT_CAP: f64 = 1e40;

/// Smallest `n` (doubling from `start`, then multiplicative steps of
/// `1 + granularity` from the last doubling point) where `formula < comparator`.
pub fn crossover(formula: &CostFormula, comparator: &CostFormula, granularity: f64) -> Result<CrossoverResult> {
    crossover_within(formula, comparator, granularity, DEFAULT_START, DEFAULT_CAP)
}

pub fn crossover_within(
    formula: &CostFormula,
    comparator: &CostFormula,
    granularity: f64,
    start: f64,
    cap: f64,
) -> Result<CrossoverResult> {
    if !(granularity > 0.0) {
        return Err(Error::InvalidArgument("granularity must be positive".into()));
    }
    let below = |x: f64| formula.eval(x) < comparator.eval(x);
    if below(start) {
        return Err(Error::Domain(format!(
            "{} is already below {} at the scan start {start}",
            formula.name, comparator.name
        )));
    }
    let mut x = start;
    let mut last_above = start;
    while !below(x) {
        last_above = x;
        x *= 2.0;
        if x > cap {
            return Err(Error::Domain(format!(
                "no crossover of {} below {} up to {cap:e}",
                formula.name, comparator.name
            )));
        }
    }
    let step = 1.0 + granularity;
    let mut prev = last_above;
    let mut y = last_above;
    while !below(y) {
        prev = y;
        y *= step;
    }
    Ok(CrossoverResult {
        formula: formula.name,
        comparator: comparator.name,
        threshold: y,
        formula_at_threshold: formula.eval(y),
        comparator_at_threshold: comparator.eval(y),
        previous: prev,
        formula_at_previous: formula.eval(prev),
        comparator_at_previous: comparator.eval(prev),
        formula_at_half: formula.eval(y / 2.0),
        comparator_at_half: comparator.eval(y / 2.0),
        granularity,
    })
}

/// The seven crossovers the analysis reports, in a fixed order.
pub fn standard_crossovers(granularity: f64) -> Result<Vec<CrossoverResult>> {
    [
        (H, TRIVIAL),
        (F, TRIVIAL),
        (F_DISTANCES, TRIVIAL),
        (G, TRIVIAL),
        (LOG_F, TRIVIAL),
        (LOG_G, TRIVIAL),
        (MEMORY_QUANTUM, MEMORY_TRIVIAL),
    ]
    .iter()
    .map(|(a, b)| crossover(a, b, granularity))
    .collect()
}

/// One row per `n` with the columns `n, f, h, g, trivial` and the three memory
/// expressions at weight bound `w`.
pub fn formula_table_csv(ns: &[f64], w: f64) -> Result<String> {
    let mut out = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::InvalidArgument(e.to_string());
    out.write_record(["n", "f", "h", "g", "trivial", "memory_quantum", "memory_trivial", "memory_classical"])
        .map_err(csv_err)?;
    for &n in ns {
        let row = [
            n,
            eval_f_full_w(n, w),
            eval_h(n),
            eval_g_full_w(n, w),
            eval_trivial(n),
            eval_memory(MemoryKind::QuantumApsp, n, w)?,
            eval_memory(MemoryKind::Trivial, n, w)?,
            eval_memory(MemoryKind::ClassicalApsp, n, w)?,
        ];
        out.write_record(row.iter().map(|v| format!("{v:e}"))).map_err(csv_err)?;
    }
    let bytes = out.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}

/// Outcome of comparing one recorded quantity with its closed-form bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub actual: f64,
    pub bound: f64,
    pub pass: bool,
}

impl BoundCheck {
    fn new(name: impl Into<String>, actual: f64, bound: f64) -> Self {
        BoundCheck {
            name: name.into(),
            actual,
            bound,
            pass: actual <= bound,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BoundReport {
    pub checks: Vec<BoundCheck>,
}

impl BoundReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&BoundCheck> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn get(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Rounds one invocation of `phase` may take at charge size `n` and weight
/// bound `w`; `None` for phases without a stated bound.
pub fn phase_bound_per_call(phase: &str, n: usize, w: i64) -> Option<f64> {
    let nf = n as f64;
    let wf = crate::apsp::weight_factor(n, w) as f64;
    let ln = lg(nf);
    match phase {
        phases::CP1 => Some(2.0 * nf.powf(0.25) * wf),
        phases::CP2 => Some(200.0 * ln * wf),
        phases::IDENTIFY_CLASS => Some(20.0 * ln),
        phases::EVAL_A | phases::EVAL_B => Some(3200.0 * ln),
        phases::EVAL_B_DUP => Some(nf.powf(0.25)),
        _ => crate::steiner::phase_bound(phase).or_else(|| crate::dmst::phase_bound(phase)),
    }
}

/// Checks every phase of `ledger` with a known bound: its rounds may not
/// exceed invocations times the per-call bound at charge size `n`, weight `w`.
pub fn ledger_bound_check(ledger: &CostLedger, n: usize, w: i64) -> BoundReport {
    let mut report = BoundReport::default();
    for (name, cost) in &ledger.phases {
        if let Some(per_call) = phase_bound_per_call(name, n, w) {
            report
                .checks
                .push(BoundCheck::new(name.clone(), cost.rounds as f64, cost.invocations as f64 * per_call));
        }
    }
    report
}

/// Per-squaring checks of an APSP run: each squaring's phases against its own
/// charge size and weight bound, its FEWP calls per FindEdges against
/// `c_n + 1`, and its FindEdges count against the witnessed-product bound.
pub fn apsp_bound_check(result: &ApspResult) -> BoundReport {
    let mut report = BoundReport::default();
    let mut totals: std::collections::BTreeMap<String, (f64, f64)> = Default::default();
    for t in &result.squarings {
        for (phase, per_call) in squaring_phase_bounds(t) {
            let e = totals.entry(phase.to_string()).or_default();
            e.1 += per_call * t.fewp_calls_charged as f64 * calls_per_fewp(phase, t.charge_size);
        }
        report.checks.push(BoundCheck::new(
            format!("squaring {} FEWP calls per FindEdges", t.index),
            t.fewp_calls_per_findedges as f64,
            (c_n(t.node_count) + 1) as f64,
        ));
        report.checks.push(BoundCheck::new(
            format!("squaring {} FindEdges calls", t.index),
            t.findedges_charged as f64,
            t.findedges_bound as f64,
        ));
    }
    for (phase, cost) in &result.ledger.phases {
        if let Some(e) = totals.get_mut(phase) {
            e.0 = cost.rounds as f64;
        }
    }
    for (phase, (actual, bound)) in totals {
        report.checks.push(BoundCheck::new(phase, actual, bound));
    }
    report
}

/// The run's total rounds against `f(n)`.
pub fn apsp_total_check(result: &ApspResult) -> BoundCheck {
    let n = result.distances.n() as f64;
    BoundCheck::new("total", result.ledger.rounds as f64, eval_f(n.max(2.0)))
}

fn squaring_phase_bounds(t: &SquaringTrace) -> Vec<(&'static str, f64)> {
    let wf = t.weight_factor as f64;
    let nf = t.charge_size as f64;
    let ln = lg(nf);
    vec![
        (phases::CP1, 2.0 * nf.powf(0.25) * wf),
        (phases::CP2, 200.0 * ln * wf),
        (phases::IDENTIFY_CLASS, 20.0 * ln),
        (phases::EVAL_A, 3200.0 * ln),
        (phases::EVAL_B, 3200.0 * ln),
        (phases::EVAL_B_DUP, nf.powf(0.25)),
    ]
}

/// Evaluation calls one FEWP call may make for `phase`.
fn calls_per_fewp(phase: &str, n: usize) -> f64 {
    let nf = n as f64;
    let per_class = (lg(nf) * nf.powf(0.25)).floor();
    let classes = crate::apsp::max_class(n) as f64;
    match phase {
        phases::EVAL_A => per_class,
        phases::EVAL_B | phases::EVAL_B_DUP => per_class * classes,
        _ => 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        ((a - b) / b).abs() <= rel
    }

    // Reference values from tools/formula_oracle.py (60-digit evaluation).
    #[test]
    fn formula_values_match_reference() {
        assert!(close(eval_f(4096.0), 12895167457.4435, 1e-12));
        assert!(close(eval_h(4096.0), 19110297600.0, 1e-12));
        assert!(close(eval_f_distances(4096.0), 1983871916.52977, 1e-12));
        assert!(close(eval_f(1e18), 1.39579105308998e18, 1e-12));
        assert!(close(eval_h(1e18), 1.1562889717838e18, 1e-12));
        assert!(close(eval_g(2.6e11), 263925668079.419, 1e-12));
        assert!(close(eval_f_distances(1e18), 4.57636410849175e16, 1e-12));
    }

    #[test]
    fn g_examples() {
        assert_eq!(eval_g(4096.0).round(), 6_635_520.0);
        let mut prev = 0.0;
        for k in 2..80 {
            let v = eval_g((1u128 << k) as f64);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn h_exceeds_n_at_ten_to_eighteen() {
        let v = eval_h(1e18);
        assert!(v > 1e18 && close(v, 1.16e18, 0.01));
    }

    #[test]
    fn f_dominates_h_from_two_to_twenty_two() {
        for k in 22..=80 {
            let n = (1u128 << k) as f64;
            assert!(eval_f(n) >= eval_h(n), "2^{k}");
        }
        assert!(eval_f((1u64 << 21) as f64) < eval_h((1u64 << 21) as f64));
    }

    #[test]
    fn crossovers_match_reference() {
        let r = standard_crossovers(DEFAULT_GRANULARITY).unwrap();
        let expect = [
            1.2735426028511e18,
            1.76855598580737e18,
            6.90842181956005e15,
            267696000700.967,
            1.75774004826429e21,
            394790324516982.0,
            16898310044.2486,
        ];
        for (got, want) in r.iter().zip(expect) {
            assert!(close(got.threshold, want, 1e-9), "{} {} vs {want}", got.formula, got.threshold);
            assert!(got.formula_at_threshold < got.comparator_at_threshold);
            assert!(got.formula_at_previous >= got.comparator_at_previous);
            assert!(close(got.previous * 1.01, got.threshold, 1e-12));
        }
    }

    #[test]
    fn crossovers_against_stated_magnitudes() {
        let h = crossover(&H, &TRIVIAL, 0.01).unwrap().threshold;
        assert!((1e17..1e19).contains(&h));
        let g = crossover(&G, &TRIVIAL, 0.01).unwrap().threshold;
        assert!(close(g, 2.6e11, 0.10));
        let lf = crossover(&LOG_F, &TRIVIAL, 0.01).unwrap().threshold;
        assert!(lf > 1e21);
        let lg_ = crossover(&LOG_G, &TRIVIAL, 0.01).unwrap().threshold;
        assert!(lg_ > 1e14);
        let d = crossover(&F_DISTANCES, &TRIVIAL, 0.01).unwrap().threshold;
        assert!((1e15..1e17).contains(&d));
        let m = crossover(&MEMORY_QUANTUM, &MEMORY_TRIVIAL, 0.01).unwrap().threshold;
        assert!(close(m, 1.6e10, 0.10));
    }

    #[test]
    fn classical_memory_beats_trivial_everywhere() {
        for n in [4.0, 5.0, 16.0, 100.0, 1e4, 1e9, 1e20] {
            for w in [1.0, 7.0, 1e6] {
                let c = eval_memory(MemoryKind::ClassicalApsp, n, w).unwrap();
                let t = eval_memory(MemoryKind::Trivial, n, w).unwrap();
                assert!(c < t, "n={n} w={w}");
            }
        }
    }

    #[test]
    fn crossover_reports_missing_threshold() {
        let never = CostFormula::new("never", "", |n| 2.0 * n);
        assert!(crossover_within(&never, &TRIVIAL, 0.01, 1024.0, 1e30).is_err());
        assert!(crossover(&TRIVIAL, &H, 0.01).is_err());
    }

    #[test]
    fn memory_kind_parsing() {
        assert_eq!("trivial".parse::<MemoryKind>().unwrap(), MemoryKind::Trivial);
        assert!("bogus".parse::<MemoryKind>().is_err());
        assert!(eval_memory(MemoryKind::Trivial, 1.0, 1.0).is_err());
    }

    #[test]
    fn empty_ledger_passes() {
        assert!(ledger_bound_check(&CostLedger::new(), 256, 3).all_pass());
    }

    #[test]
    fn inflated_cp2_fails() {
        let mut l = CostLedger::new();
        l.charge(phases::CP2, (300.0 * 8.0) as u64, 0);
        l.note_invocations(phases::CP2, 1);
        let r = ledger_bound_check(&l, 256, 3);
        assert!(!r.get(phases::CP2).unwrap().pass);
        let mut ok = CostLedger::new();
        ok.charge(phases::CP2, 1600, 0);
        ok.note_invocations(phases::CP2, 1);
        assert!(ledger_bound_check(&ok, 256, 3).all_pass());
    }

    #[test]
    fn full_w_factor_raises_f() {
        assert_eq!(eval_f_full_w(4096.0, 1.0), eval_f(4096.0));
        assert!(eval_f_full_w(4096.0, 1e9) > eval_f(4096.0));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let s = formula_table_csv(&[1024.0, 4096.0], 1.0).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("n,f,h,g,trivial"));
    }
}
