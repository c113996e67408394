//! DMST runs that need several contraction layers.

use ccl_core::apsp::ApspConfig;
use ccl_core::dmst::{edmonds_oracle, is_minor_arborescence, iteration_bound, run_dmst, phases, UNPACK_ROUNDS};
use ccl_core::graph::{DmstInstance, WeightedGraph};
use ccl_core::sim::CostModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Cheap 2-cycles between neighbouring nodes, then cheap 2-cycles between
/// neighbouring pairs, and so on, over a background of expensive edges.
fn nested_cycles(levels: u32, seed: u64) -> DmstInstance {
    let n = 1usize << levels;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = WeightedGraph::new(n + 1, true, 1000);
    for v in 1..=n {
        g.set_weight(0, v, rng.gen_range(500..1000));
    }
    for level in 0..levels {
        let block = 1usize << level;
        let cost = 1 + 10 * level as i64;
        for start in (0..n).step_by(2 * block) {
            let a = 1 + start + rng.gen_range(0..block);
            let b = 1 + start + block + rng.gen_range(0..block);
            g.set_weight(a, b, cost + rng.gen_range(0..3));
            g.set_weight(b, a, cost + rng.gen_range(0..3));
        }
    }
    for _ in 0..n {
        let (u, v) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
        if u != v && !g.has_edge(u, v) {
            g.set_weight(u, v, rng.gen_range(200..400));
        }
    }
    DmstInstance::new(g, 0).unwrap()
}

#[test]
fn nested_cycles_use_several_layers() {
    let mut deepest = 0;
    for seed in 0..12 {
        let inst = nested_cycles(4, seed);
        for model in [CostModel::paper_charged(), CostModel::measured()] {
            let run = run_dmst(&inst, &ApspConfig::with_model(model, seed)).unwrap();
            let want = edmonds_oracle(&inst).unwrap();
            assert_eq!(run.result.weight, want.weight, "seed {seed}");
            assert!(run.result.is_arborescence(&inst.graph, 0));
            assert!(run.iterations <= iteration_bound(inst.graph.n()));
            for (k, frame) in run.frames.iter().enumerate() {
                assert!(is_minor_arborescence(&frame.before, 0, &run.layers[run.frames.len() - k]));
                assert_eq!(frame.paths.len(), frame.contractions.len());
            }
            deepest = deepest.max(run.iterations);
        }
    }
    assert!(deepest >= 2, "deepest stack {deepest}");
}

#[test]
fn unpacking_charge_per_layer() {
    let inst = nested_cycles(3, 7);
    let run = run_dmst(&inst, &ApspConfig::default()).unwrap();
    assert_eq!(run.ledger.phase_rounds(phases::UNPACK), UNPACK_ROUNDS * run.iterations as u64);
    assert!(run.ledger.phase_rounds(phases::UNPACK) <= UNPACK_ROUNDS * iteration_bound(inst.graph.n()) as u64);
}

#[test]
fn measured_steps_are_reported_per_invocation() {
    let inst = nested_cycles(3, 2);
    let run = run_dmst(&inst, &ApspConfig::with_model(CostModel::measured(), 2)).unwrap();
    let it = run.iterations as u64;
    assert_eq!(run.ledger.invocations(phases::STEP), 4 * it);
    assert_eq!(run.ledger.invocations(phases::UNPACK), it);
    assert!(run.ledger.is_consistent());
}
