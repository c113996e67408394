//! Point-to-point delivery of fixed-width integer lists, split into
//! bandwidth-sized chunks and run through the round engine.

use super::{run_protocol, CostLedger, CostModel, Message, NodeProgram};
use crate::error::Result;

/// What one node wants delivered: `(destination, values)` pairs.
pub type Outbox = Vec<(usize, Vec<u64>)>;

struct Sender {
    me: usize,
    cap: usize,
    queues: Vec<(usize, Vec<bool>, usize)>,
    inbox: Vec<Vec<bool>>,
}

impl NodeProgram for Sender {
    type Output = Vec<Vec<bool>>;

    fn send(&mut self, _round: u64) -> Vec<Message> {
        let mut out = Vec::new();
        for (dst, bits, pos) in &mut self.queues {
            if *pos < bits.len() {
                let end = (*pos + self.cap).min(bits.len());
                out.push(Message::classical(self.me, *dst, bits[*pos..end].to_vec()));
                *pos = end;
            }
        }
        out
    }

    fn receive(&mut self, _round: u64, inbox: Vec<Message>) {
        for m in inbox {
            self.inbox[m.src].extend(m.payload);
        }
    }

    fn is_done(&self) -> bool {
        self.queues.iter().all(|(_, b, p)| *p >= b.len())
    }

    fn output(self) -> Vec<Vec<bool>> {
        self.inbox
    }
}

fn encode(values: &[u64], width: u32) -> Vec<bool> {
    values
        .iter()
        .flat_map(|&v| (0..width).rev().map(move |b| (v >> b) & 1 == 1))
        .collect()
}

fn decode(bits: &[bool], width: u32) -> Vec<u64> {
    bits.chunks(width as usize)
        .filter(|c| c.len() == width as usize)
        .map(|c| c.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
        .collect()
}

/// Delivers every outbox, each value encoded in `width` bits. Returns, per
/// node, the values received from each source (empty when nothing came).
pub fn exchange(
    n: usize,
    outboxes: Vec<Outbox>,
    width: u32,
    model: &CostModel,
    phase: &str,
) -> Result<(Vec<Vec<Vec<u64>>>, CostLedger)> {
    assert!((1..=64).contains(&width));
    assert_eq!(outboxes.len(), n);
    let cap = model.message_bits(n) as usize;
    let programs = outboxes
        .into_iter()
        .enumerate()
        .map(|(me, ob)| Sender {
            me,
            cap,
            queues: ob.into_iter().map(|(d, v)| (d, encode(&v, width), 0)).collect(),
            inbox: vec![Vec::new(); n],
        })
        .collect();
    let (raw, ledger) = run_protocol(programs, n, model, phase)?;
    let received = raw
        .into_iter()
        .map(|per_src| per_src.iter().map(|b| decode(b, width)).collect())
        .collect();
    Ok((received, ledger))
}

/// Every node with a non-empty list sends it to all other nodes.
pub fn broadcast_all(
    values: Vec<Vec<u64>>,
    width: u32,
    model: &CostModel,
    phase: &str,
) -> Result<(Vec<Vec<Vec<u64>>>, CostLedger)> {
    let n = values.len();
    let outboxes = values
        .into_iter()
        .enumerate()
        .map(|(me, v)| {
            if v.is_empty() {
                Vec::new()
            } else {
                (0..n).filter(|&d| d != me).map(|d| (d, v.clone())).collect()
            }
        })
        .collect();
    exchange(n, outboxes, width, model, phase)
}

/// Bits needed to write any value in `0..=max`.
pub fn width_for(max: u64) -> u32 {
    (64 - max.leading_zeros()).max(1)
}
