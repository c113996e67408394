use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostMode {
    /// Charge what the simulation actually does.
    Measured,
    /// Charge the closed-form per-phase counts of the analysed algorithm.
    PaperCharged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostModel {
    pub mode: CostMode,
    /// Messages carry `bandwidth_factor * ceil(log2 n)` bits.
    pub bandwidth_factor: u32,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            mode: CostMode::Measured,
            bandwidth_factor: 2,
        }
    }
}

impl CostModel {
    pub fn measured() -> Self {
        Self::default()
    }

    pub fn paper_charged() -> Self {
        CostModel {
            mode: CostMode::PaperCharged,
            bandwidth_factor: 2,
        }
    }

    pub fn is_paper(&self) -> bool {
        self.mode == CostMode::PaperCharged
    }

    /// Message capacity in bits for an `n`-node network.
    pub fn message_bits(&self, n: usize) -> u64 {
        self.bandwidth_factor.max(1) as u64 * id_bits(n)
    }
}

/// `ceil(log2 n)`, at least 1.
pub fn id_bits(n: usize) -> u64 {
    if n <= 2 {
        1
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as u64
    }
}

/// Bits needed for a weight bounded by `n * w_max` in magnitude.
pub fn weight_bits(n: usize, w_max: i64) -> u64 {
    let span = (n as u128).saturating_mul(w_max.max(1) as u128).max(2);
    (128 - (span - 1).leading_zeros()) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MessageKind {
    Classical,
    /// Counted as a qubit register; the payload is computed classically.
    QuantumModeled,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Message {
    pub src: usize,
    pub dst: usize,
    pub payload: Vec<bool>,
    pub kind: MessageKind,
}

impl Message {
    pub fn classical(src: usize, dst: usize, payload: Vec<bool>) -> Self {
        Message {
            src,
            dst,
            payload,
            kind: MessageKind::Classical,
        }
    }

    /// Encodes `value` in exactly `bits` bits, most significant first.
    pub fn with_value(src: usize, dst: usize, value: u64, bits: u64) -> Self {
        let payload = (0..bits).rev().map(|b| (value >> b) & 1 == 1).collect();
        Self::classical(src, dst, payload)
    }

    pub fn value(&self) -> u64 {
        self.payload.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn bits(&self) -> u64 {
        self.payload.len() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_bits_is_ceil_log2() {
        assert_eq!(id_bits(1), 1);
        assert_eq!(id_bits(2), 1);
        assert_eq!(id_bits(3), 2);
        assert_eq!(id_bits(16), 4);
        assert_eq!(id_bits(17), 5);
        assert_eq!(id_bits(1296), 11);
    }

    #[test]
    fn bandwidth_scales_with_factor() {
        let m = CostModel::default();
        assert_eq!(m.message_bits(16), 8);
        let m = CostModel {
            bandwidth_factor: 3,
            ..m
        };
        assert_eq!(m.message_bits(16), 12);
    }

    #[test]
    fn value_round_trip() {
        let m = Message::with_value(0, 1, 13, 6);
        assert_eq!(m.bits(), 6);
        assert_eq!(m.value(), 13);
    }

    #[test]
    fn weight_bits_covers_range() {
        assert_eq!(weight_bits(16, 1), 4);
        assert_eq!(weight_bits(16, 32), 9);
    }
}
