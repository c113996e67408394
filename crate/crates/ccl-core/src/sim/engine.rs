use std::collections::HashSet;

use super::{CostLedger, CostModel, Message, MessageKind};
use crate::error::{Error, Result};

/// A node's behaviour in the synchronous round loop. Every round each active
/// node sends, then every node receives what was addressed to it.
pub trait NodeProgram {
    type Output;

    fn send(&mut self, round: u64) -> Vec<Message>;
    fn receive(&mut self, round: u64, inbox: Vec<Message>);
    fn is_done(&self) -> bool;
    fn output(self) -> Self::Output;
}

pub const DEFAULT_ROUND_CAP: u64 = 1_000_000;

/// Runs one program per node of an `n`-node clique until all are done.
pub fn run_protocol<P: NodeProgram>(
    programs: Vec<P>,
    n: usize,
    model: &CostModel,
    phase: &str,
) -> Result<(Vec<P::Output>, CostLedger)> {
    run_protocol_capped(programs, n, model, phase, DEFAULT_ROUND_CAP)
}

pub fn run_protocol_capped<P: NodeProgram>(
    mut programs: Vec<P>,
    n: usize,
    model: &CostModel,
    phase: &str,
    max_rounds: u64,
) -> Result<(Vec<P::Output>, CostLedger)> {
    if programs.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} programs for {} nodes",
            programs.len(),
            n
        )));
    }
    let cap = model.message_bits(n);
    let mut ledger = CostLedger::new();
    let mut round = 0u64;
    while programs.iter().any(|p| !p.is_done()) {
        if round >= max_rounds {
            return Err(Error::ProtocolViolation {
                phase: phase.into(),
                round,
                msg: format!("no termination within {max_rounds} rounds"),
            });
        }
        let violation = |msg: String| Error::ProtocolViolation {
            phase: phase.into(),
            round,
            msg,
        };
        let mut inboxes: Vec<Vec<Message>> = vec![Vec::new(); n];
        let mut bits = 0u64;
        let mut qmsgs = 0u64;
        for (node, prog) in programs.iter_mut().enumerate() {
            if prog.is_done() {
                continue;
            }
            let mut targets = HashSet::new();
            for m in prog.send(round) {
                if m.src != node {
                    return Err(violation(format!("node {} forged source {}", node + 1, m.src + 1)));
                }
                if m.dst >= n || m.dst == node {
                    return Err(violation(format!("node {} sent to invalid destination", node + 1)));
                }
                if m.bits() > cap {
                    return Err(violation(format!(
                        "message {} -> {} carries {} bits, capacity {}",
                        node + 1,
                        m.dst + 1,
                        m.bits(),
                        cap
                    )));
                }
                if !targets.insert(m.dst) {
                    return Err(violation(format!(
                        "node {} sent two messages to {} in one round",
                        node + 1,
                        m.dst + 1
                    )));
                }
                match m.kind {
                    MessageKind::Classical => bits += m.bits(),
                    MessageKind::QuantumModeled => qmsgs += 1,
                }
                inboxes[m.dst].push(m);
            }
        }
        for (prog, inbox) in programs.iter_mut().zip(inboxes) {
            prog.receive(round, inbox);
        }
        ledger.charge(phase, 1, bits);
        ledger.charge_quantum(phase, 0, qmsgs);
        round += 1;
    }
    ledger.note_invocations(phase, 1);
    Ok((programs.into_iter().map(P::output).collect(), ledger))
}
