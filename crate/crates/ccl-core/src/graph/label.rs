use serde::Serialize;

use crate::error::{Error, Result};

/// Position of a node in the lexicographic order of `[r] x [r] x [r^2]`, `r = n^(1/4)`.
/// All components are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TripleLabel {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

/// Exact integer fourth root, if `n` is a perfect fourth power.
pub fn fourth_root(n: usize) -> Option<usize> {
    if n == 0 {
        return None;
    }
    let mut r = (n as f64).powf(0.25).round() as usize;
    while r.pow(4) > n {
        r -= 1;
    }
    while (r + 1).pow(4) <= n {
        r += 1;
    }
    (r.pow(4) == n).then_some(r)
}

/// Smallest perfect fourth power `>= n` (and `>= 1`).
pub fn next_fourth_power(n: usize) -> usize {
    let mut r = 1usize;
    while r.pow(4) < n {
        r += 1;
    }
    r.pow(4)
}

fn require_root(n: usize) -> Result<usize> {
    fourth_root(n).ok_or(Error::PaddingRequired(n))
}

/// Maps a 1-based node ID to its triple.
pub fn triple_label(id: usize, n: usize) -> Result<TripleLabel> {
    let r = require_root(n)?;
    if id == 0 || id > n {
        return Err(Error::InvalidArgument(format!("node id {id} outside [1, {n}]")));
    }
    let s = r * r;
    let x = id - 1;
    Ok(TripleLabel {
        i: x / (r * s) + 1,
        j: (x / s) % r + 1,
        k: x % s + 1,
    })
}

/// Inverse of [`triple_label`].
pub fn label_to_id(t: TripleLabel, n: usize) -> Result<usize> {
    let r = require_root(n)?;
    let s = r * r;
    if t.i == 0 || t.i > r || t.j == 0 || t.j > r || t.k == 0 || t.k > s {
        return Err(Error::InvalidArgument(format!("label {t:?} outside the label space")));
    }
    Ok(((t.i - 1) * r + (t.j - 1)) * s + t.k)
}

/// Coarse blocks of `n^(3/4)` consecutive IDs and fine blocks of `n^(1/2)`.
/// Blocks are inclusive 1-based ID ranges `(first, last)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionScheme {
    pub n: usize,
    pub coarse: Vec<(usize, usize)>,
    pub fine: Vec<(usize, usize)>,
}

impl PartitionScheme {
    pub fn coarse_size(&self) -> usize {
        self.n / self.coarse.len()
    }

    pub fn fine_size(&self) -> usize {
        self.n / self.fine.len()
    }

    /// 1-based coarse block index of a 1-based ID.
    pub fn coarse_of(&self, id: usize) -> usize {
        (id - 1) / self.coarse_size() + 1
    }

    /// 1-based fine block index of a 1-based ID.
    pub fn fine_of(&self, id: usize) -> usize {
        (id - 1) / self.fine_size() + 1
    }
}

pub fn build_partitions(n: usize) -> Result<PartitionScheme> {
    let r = require_root(n)?;
    let big = r * r * r;
    let small = r * r;
    let blocks = |size: usize| (0..n / size).map(|b| (b * size + 1, (b + 1) * size)).collect();
    Ok(PartitionScheme {
        n,
        coarse: blocks(big),
        fine: blocks(small),
    })
}
