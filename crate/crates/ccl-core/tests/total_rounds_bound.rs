//! The whole-run clause of the ledger criterion: total paper-charged APSP
//! rounds at most f(n). Kept separate because it does not hold at simulable
//! sizes: f(n) is negative below n = 2^10 or so (its FEWP-call factor
//! log(n / (60 log n)) + 1 is negative there), and at n = 256 it is about
//! 1.1e8 while the charged total of the per-phase bounds is about 2e9.

use ccl_core::analyzer::{apsp_total_check, eval_f};
use ccl_core::apsp::{apsp_with_routing, ApspConfig};
use ccl_core::graph::gen_random_graph;

#[test]
fn total_rounds_within_f() {
    let mut failures = Vec::new();
    for (i, n) in [16usize, 81, 256].into_iter().enumerate() {
        let g = gen_random_graph(n, 0.3, 16, false, i as u64);
        let r = apsp_with_routing(&g, &ApspConfig::default()).unwrap();
        let check = apsp_total_check(&r);
        println!("n = {n}: total {} vs f(n) = {:.4e}", r.ledger.rounds, eval_f(n as f64));
        if !check.pass {
            failures.push(format!("n = {n}: {} > {:.4e}", check.actual, check.bound));
        }
    }
    assert!(failures.is_empty(), "total exceeds f(n): {failures:?}");
}
