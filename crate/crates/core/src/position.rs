//! Position <-> subset decoding for the doubling residual sequence.
//!
//! Position `k` (1-indexed) holds the residual for the subset whose mask is
//! `k - 1`: weight `j` is subtracted iff bit `j - 1` of `k - 1` is set. Reading
//! the binary string of `2(k - 1)` as `b_i ... b_1 b_0` gives the same subset
//! with `b_j` selecting `w_j`; the trailing `b_0` is always zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Largest weight count whose positions fit in a `u64`.
pub const MAX_POSITION_BITS: usize = 63;

fn check_range(k: u64, n: usize) -> Result<()> {
    if n > MAX_POSITION_BITS {
        return Err(Error::Resource {
            what: "weight count for positional decoding",
            got: n as u64,
            limit: MAX_POSITION_BITS as u64,
        });
    }
    let last = 1u64 << n;
    if k == 0 || k > last {
        return Err(Error::PositionOutOfRange { k, n });
    }
    Ok(())
}

/// Subset mask for position `k`, i.e. `k - 1`.
pub fn mask_of(k: u64, n: usize) -> Result<u64> {
    check_range(k, n)?;
    Ok(k - 1)
}

/// Indices `j` in `1..=n` selected by position `k`, ascending.
pub fn decode_position(k: u64, n: usize) -> Result<Vec<usize>> {
    let mask = mask_of(k, n)?;
    Ok(mask_indices(mask))
}

/// Ascending 1-indexed positions of the set bits of `mask`.
pub fn mask_indices(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize + 1);
        mask &= mask - 1;
    }
    out
}

/// Inverse of [`decode_position`]: `1 + sum 2^(j-1)` over the subset.
pub fn position_of(subset: &[usize], n: usize) -> Result<u64> {
    if n > MAX_POSITION_BITS {
        return Err(Error::Resource {
            what: "weight count for positional decoding",
            got: n as u64,
            limit: MAX_POSITION_BITS as u64,
        });
    }
    let mut mask = 0u64;
    for &j in subset {
        if j == 0 || j > n {
            return Err(Error::IndexOutOfRange { index: j, n });
        }
        mask |= 1 << (j - 1);
    }
    Ok(mask + 1)
}

/// Residual `t - w(X)` at position `k`, computed without materializing the
/// sequence.
pub fn residual_at(instance: &Instance, k: u64) -> Result<i64> {
    let mut mask = mask_of(k, instance.len())?;
    let weights = instance.weights();
    let mut residual = instance.target();
    while mask != 0 {
        residual -= weights[mask.trailing_zeros() as usize];
        mask &= mask - 1;
    }
    Ok(residual)
}

/// A contiguous run of the doubling sequence starting at global position
/// `start`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualBlock {
    pub start: u64,
    pub values: Vec<i64>,
}

impl ResidualBlock {
    /// The one-element sequence before any weight is processed.
    pub fn seed(target: i64) -> Self {
        Self {
            start: 1,
            values: vec![target],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Global position of the element at `offset`.
    pub fn position(&self, offset: usize) -> u64 {
        self.start + offset as u64
    }

    /// Global positions of every zero in the block.
    pub fn zero_positions(&self) -> impl Iterator<Item = u64> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 0)
            .map(|(i, _)| self.position(i))
    }

    /// Checks every stored value against [`residual_at`].
    pub fn verify(&self, instance: &Instance) -> Result<()> {
        for (offset, &value) in self.values.iter().enumerate() {
            let k = self.position(offset);
            let expected = residual_at(instance, k)?;
            if expected != value {
                return Err(Error::Precondition(format!(
                    "block value {value} at position {k} should be {expected}"
                )));
            }
        }
        Ok(())
    }
}
