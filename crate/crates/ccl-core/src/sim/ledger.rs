use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Cost attributed to one named phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseCost {
    pub rounds: u64,
    pub classical_bits: u64,
    pub quantum_messages: u64,
    /// How many times the phase ran (one invocation may charge many rounds).
    pub invocations: u64,
}

impl PhaseCost {
    fn add(&mut self, other: &PhaseCost, factor: u64) {
        self.rounds += other.rounds * factor;
        self.classical_bits += other.classical_bits * factor;
        self.quantum_messages += other.quantum_messages * factor;
        self.invocations += other.invocations * factor;
    }
}

/// Per-phase accounting of rounds, classical bits and modeled qubit messages.
/// Totals always equal the sum over phases.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostLedger {
    pub rounds: u64,
    pub classical_bits: u64,
    pub quantum_messages: u64,
    pub phases: BTreeMap<String, PhaseCost>,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    fn entry(&mut self, phase: &str) -> &mut PhaseCost {
        self.phases.entry(phase.to_string()).or_default()
    }

    /// Adds classical cost to `phase`. Zero charges leave the ledger untouched.
    pub fn charge(&mut self, phase: &str, rounds: u64, bits: u64) {
        if rounds == 0 && bits == 0 {
            return;
        }
        let e = self.entry(phase);
        e.rounds += rounds;
        e.classical_bits += bits;
        self.rounds += rounds;
        self.classical_bits += bits;
    }

    /// Adds rounds that carry modeled quantum messages.
    pub fn charge_quantum(&mut self, phase: &str, rounds: u64, messages: u64) {
        if rounds == 0 && messages == 0 {
            return;
        }
        let e = self.entry(phase);
        e.rounds += rounds;
        e.quantum_messages += messages;
        self.rounds += rounds;
        self.quantum_messages += messages;
    }

    /// Records that `phase` ran `count` more times without charging cost.
    pub fn note_invocations(&mut self, phase: &str, count: u64) {
        if count > 0 {
            self.entry(phase).invocations += count;
        }
    }

    pub fn invocations(&self, phase: &str) -> u64 {
        self.phases.get(phase).map_or(0, |p| p.invocations)
    }

    pub fn phase_rounds(&self, phase: &str) -> u64 {
        self.phases.get(phase).map_or(0, |p| p.rounds)
    }

    pub fn merge(&mut self, other: &CostLedger) {
        self.merge_scaled(other, 1);
    }

    /// Adds `factor` copies of `other`.
    pub fn merge_scaled(&mut self, other: &CostLedger, factor: u64) {
        self.rounds += other.rounds * factor;
        self.classical_bits += other.classical_bits * factor;
        self.quantum_messages += other.quantum_messages * factor;
        for (name, cost) in &other.phases {
            self.entry(name).add(cost, factor);
        }
    }

    /// True when totals match the phase sums.
    pub fn is_consistent(&self) -> bool {
        let r: u64 = self.phases.values().map(|p| p.rounds).sum();
        let b: u64 = self.phases.values().map(|p| p.classical_bits).sum();
        let q: u64 = self.phases.values().map(|p| p.quantum_messages).sum();
        r == self.rounds && b == self.classical_bits && q == self.quantum_messages
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("ledger serializes")
    }
}
