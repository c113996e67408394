use super::{CostLedger, CostModel, Message, MessageKind};
use crate::error::{Error, Result};

fn tally(messages: &[Message], n: usize, model: &CostModel) -> Result<(Vec<usize>, Vec<usize>, u64, u64)> {
    let cap = model.message_bits(n);
    let mut out_deg = vec![0usize; n];
    let mut in_deg = vec![0usize; n];
    let mut bits = 0;
    let mut qmsgs = 0;
    for m in messages {
        if m.src >= n || m.dst >= n {
            return Err(Error::RoutingPrecondition(format!(
                "message {} -> {} names a node outside the network",
                m.src + 1,
                m.dst + 1
            )));
        }
        if m.bits() > cap {
            return Err(Error::RoutingPrecondition(format!(
                "message {} -> {} exceeds {} bits",
                m.src + 1,
                m.dst + 1,
                cap
            )));
        }
        out_deg[m.src] += 1;
        in_deg[m.dst] += 1;
        match m.kind {
            MessageKind::Classical => bits += m.bits(),
            MessageKind::QuantumModeled => qmsgs += 1,
        }
    }
    Ok((out_deg, in_deg, bits, qmsgs))
}

fn deliver(messages: Vec<Message>, n: usize) -> Vec<Vec<Message>> {
    let mut inboxes = vec![Vec::new(); n];
    for m in messages {
        let d = m.dst;
        inboxes[d].push(m);
    }
    inboxes
}

/// Delivers a batch in which every node sources and sinks at most `n`
/// messages. Always charges 2 rounds, including for an empty batch.
pub fn route_all(
    messages: Vec<Message>,
    n: usize,
    model: &CostModel,
    phase: &str,
) -> Result<(Vec<Vec<Message>>, CostLedger)> {
    let (out_deg, in_deg, bits, qmsgs) = tally(&messages, n, model)?;
    for v in 0..n {
        if out_deg[v] > n {
            return Err(Error::RoutingPrecondition(format!(
                "node {} sources {} messages (limit {})",
                v + 1,
                out_deg[v],
                n
            )));
        }
        if in_deg[v] > n {
            return Err(Error::RoutingPrecondition(format!(
                "node {} sinks {} messages (limit {})",
                v + 1,
                in_deg[v],
                n
            )));
        }
    }
    let mut ledger = CostLedger::new();
    ledger.charge(phase, 2, bits);
    ledger.charge_quantum(phase, 0, qmsgs);
    ledger.note_invocations(phase, 1);
    Ok((deliver(messages, n), ledger))
}

/// One-round direct delivery; every ordered pair may carry at most one message.
pub fn route_direct(
    messages: Vec<Message>,
    n: usize,
    model: &CostModel,
    phase: &str,
) -> Result<(Vec<Vec<Message>>, CostLedger)> {
    let (_, _, bits, qmsgs) = tally(&messages, n, model)?;
    let mut pairs = std::collections::HashSet::new();
    for m in &messages {
        if !pairs.insert((m.src, m.dst)) {
            return Err(Error::RoutingPrecondition(format!(
                "pair {} -> {} carries more than one message",
                m.src + 1,
                m.dst + 1
            )));
        }
    }
    let mut ledger = CostLedger::new();
    ledger.charge(phase, 1, bits);
    ledger.charge_quantum(phase, 0, qmsgs);
    ledger.note_invocations(phase, 1);
    Ok((deliver(messages, n), ledger))
}
