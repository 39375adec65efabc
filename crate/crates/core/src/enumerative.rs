//! Exhaustive enumeration over the doubling residual sequence.
//!
//! The sequence is never stored whole. Weights `1..c` (with `2^c` the chunk
//! size) form the low bits of every mask; for each assignment of the high
//! bits a block is grown from the single residual `t - w(high)` by repeated
//! [`expand_round`], scanned for zeros and reused for the next high prefix.
//! Visiting high prefixes in ascending order yields zeros in ascending
//! position order, so the output matches a left-to-right scan of the full
//! sequence.

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::position::{decode_position, ResidualBlock};
use crate::solution::SubsetSolution;

pub const DEFAULT_MAX_N: usize = 30;
pub const DEFAULT_CHUNK_SIZE: usize = 1 << 20;
/// Hard ceiling on `max_n`; positions must fit in 64 bits with headroom.
pub const MAX_N_CEILING: usize = 62;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationConfig {
    pub max_n: usize,
    /// Residuals materialized per block; a power of two.
    pub chunk_size: usize,
    pub solution_limit: Option<usize>,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        Self {
            max_n: DEFAULT_MAX_N,
            chunk_size: DEFAULT_CHUNK_SIZE,
            solution_limit: None,
        }
    }
}

impl EnumerationConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.chunk_size.is_power_of_two() {
            return Err(Error::Config(format!(
                "chunk_size {} is not a power of two",
                self.chunk_size
            )));
        }
        if self.max_n > MAX_N_CEILING {
            return Err(Error::Config(format!(
                "max_n {} exceeds {MAX_N_CEILING}",
                self.max_n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationStats {
    /// Residuals computed, i.e. subtractions performed.
    pub residuals: u64,
    pub blocks: u64,
    /// Largest number of residuals held at once.
    pub peak_residuals: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enumeration {
    /// Zero positions `k >= 2`, ascending.
    pub positions: Vec<u64>,
    /// One solution per entry of `positions`, in the same order.
    pub solutions: Vec<SubsetSolution>,
    /// Set when `solution_limit` cut the scan short.
    pub truncated: bool,
    pub stats: EnumerationStats,
}

/// Appends `block - w` to `block`, doubling its length.
pub fn expand_round(mut block: ResidualBlock, w: i64) -> ResidualBlock {
    expand_in_place(&mut block.values, w);
    block
}

fn expand_in_place(values: &mut Vec<i64>, w: i64) {
    let len = values.len();
    values.reserve(len);
    for i in 0..len {
        let r = values[i] - w;
        values.push(r);
    }
}

/// Builds the complete sequence in memory. Test and teaching aid only.
pub fn materialize(instance: &Instance) -> Result<ResidualBlock> {
    const LIMIT: usize = 24;
    if instance.len() > LIMIT {
        return Err(Error::Resource {
            what: "weight count for full materialization",
            got: instance.len() as u64,
            limit: LIMIT as u64,
        });
    }
    Ok(instance
        .weights()
        .iter()
        .fold(ResidualBlock::seed(instance.target()), |block, &w| {
            expand_round(block, w)
        }))
}

pub fn solve_all(instance: &Instance, config: &EnumerationConfig) -> Result<Enumeration> {
    solve_all_within(instance, config, &Budget::unlimited())
}

/// [`solve_all`] that gives up with [`Error::TimedOut`] once `budget` expires.
pub fn solve_all_within(
    instance: &Instance,
    config: &EnumerationConfig,
    budget: &Budget,
) -> Result<Enumeration> {
    config.validate()?;
    let n = instance.len();
    if n > config.max_n {
        return Err(Error::Resource {
            what: "weight count",
            got: n as u64,
            limit: config.max_n as u64,
        });
    }

    let weights = instance.weights();
    let low_bits = (config.chunk_size.trailing_zeros() as usize).min(n);
    let (low, high) = weights.split_at(low_bits);
    let block_len = 1usize << low_bits;
    let limit = config.solution_limit;

    let mut values: Vec<i64> = Vec::with_capacity(block_len);
    let mut positions = Vec::new();
    let mut truncated = false;
    let mut stats = EnumerationStats::default();

    'prefixes: for prefix in 0..(1u64 << high.len()) {
        budget.check()?;
        let mut base = instance.target();
        let mut bits = prefix;
        while bits != 0 {
            base -= high[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }

        values.clear();
        values.push(base);
        for &w in low {
            expand_in_place(&mut values, w);
        }
        stats.blocks += 1;
        stats.residuals += values.len() as u64;
        stats.peak_residuals = stats.peak_residuals.max(values.len());

        let start = 1 + (prefix << low_bits);
        for (offset, _) in values.iter().enumerate().filter(|(_, &v)| v == 0) {
            let k = start + offset as u64;
            if k == 1 {
                // Empty subset; only reachable when t = 0.
                continue;
            }
            if limit.is_some_and(|cap| positions.len() >= cap) {
                truncated = true;
                break 'prefixes;
            }
            positions.push(k);
        }
    }
    // The block buffer is released before decoding.
    drop(values);

    let solutions = positions
        .iter()
        .map(|&k| SubsetSolution::new(instance, decode_position(k, n)?))
        .collect::<Result<Vec<_>>>()?;

    Ok(Enumeration {
        positions,
        solutions,
        truncated,
        stats,
    })
}
