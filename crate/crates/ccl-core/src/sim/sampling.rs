//! Counter-based coins. A coin is a pure function of (seed, stream, key), so
//! every node can evaluate another node's sample without communicating.

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coin {
    state: u64,
    /// Acceptance threshold on the top 53 bits; `u64::MAX` means always.
    threshold: u64,
}

impl Coin {
    pub fn new(seed: u64, stream: u64, p: f64) -> Self {
        let state = splitmix64(seed ^ splitmix64(stream.wrapping_add(0x5151)));
        let threshold = if p >= 1.0 {
            u64::MAX
        } else if p <= 0.0 {
            0
        } else {
            (p * (1u64 << 53) as f64) as u64
        };
        Coin { state, threshold }
    }

    pub fn always(&self) -> bool {
        self.threshold == u64::MAX
    }

    #[inline]
    pub fn flip(&self, key: u64) -> bool {
        if self.threshold == u64::MAX {
            return true;
        }
        (splitmix64(self.state ^ key.wrapping_mul(0xD6E8_FEB8_6659_FD93)) >> 11) < self.threshold
    }

    /// Coin for an unordered pair.
    #[inline]
    pub fn flip_pair(&self, a: usize, b: usize) -> bool {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.flip(((lo as u64) << 32) | hi as u64)
    }
}
