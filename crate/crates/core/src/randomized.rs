//! Probabilistic solver: expand the doubling sequence over short random
//! pieces of the weight list and stop at the first zero.
//!
//! A piece is drawn by sampling `piece_length` indices uniformly with
//! replacement and discarding repeats, so it holds between one and
//! `piece_length` distinct weights in ascending index order. Output is
//! one-sided: a returned solution is always certified, a failure says
//! nothing about whether a solution exists.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::enumerative::DEFAULT_MAX_N;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::solution::SubsetSolution;
use crate::SeededRng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub piece_length: usize,
    pub repeat_times: usize,
    pub seed: u64,
    /// Largest allowed `piece_length`; pieces are expanded exhaustively.
    pub max_n: usize,
}

impl ProbeConfig {
    pub fn new(piece_length: usize, repeat_times: usize, seed: u64) -> Self {
        Self {
            piece_length,
            repeat_times,
            seed,
            max_n: DEFAULT_MAX_N,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.piece_length == 0 {
            return Err(Error::Config("piece_length must be at least 1".into()));
        }
        if self.repeat_times == 0 {
            return Err(Error::Config("repeat_times must be at least 1".into()));
        }
        if self.piece_length > self.max_n {
            return Err(Error::Resource {
                what: "piece length",
                got: self.piece_length as u64,
                limit: self.max_n as u64,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    /// `None` is the failure outcome.
    pub solution: Option<SubsetSolution>,
    pub rounds_used: usize,
    /// Residuals computed across all rounds.
    pub residuals: u64,
}

/// Builds a piece from explicit 1-indexed draws: dedup, sort, attach weights.
pub fn piece_from_draws(instance: &Instance, draws: &[usize]) -> Result<Vec<(usize, i64)>> {
    let mut indices = draws.to_vec();
    indices.sort_unstable();
    indices.dedup();
    indices
        .into_iter()
        .map(|i| instance.weight(i).map(|w| (i, w)))
        .collect()
}

/// Draws `piece_length` indices from `1..=n` with replacement and keeps the
/// distinct ones.
pub fn sample_piece<R: Rng + ?Sized>(
    instance: &Instance,
    piece_length: usize,
    rng: &mut R,
) -> Vec<(usize, i64)> {
    let n = instance.len();
    let draws: Vec<usize> = (0..piece_length).map(|_| rng.gen_range(1..=n)).collect();
    piece_from_draws(instance, &draws).expect("draws lie in 1..=n")
}

/// Expands the sequence over `piece`, stopping after the first round that
/// produces a zero at a position `k >= 2`. Returns the piece-local mask of
/// that zero and the number of residuals computed.
fn first_zero(target: i64, piece: &[(usize, i64)]) -> (Option<u64>, u64) {
    let mut seq = Vec::with_capacity(1 << piece.len());
    seq.push(target);
    let mut computed = 0u64;
    for &(_, w) in piece {
        let len = seq.len();
        for i in 0..len {
            let r = seq[i] - w;
            seq.push(r);
        }
        computed += len as u64;
        // Only the new half can hold the first zero past position 1.
        if let Some(offset) = seq[len..].iter().position(|&r| r == 0) {
            return (Some((len + offset) as u64), computed);
        }
    }
    (None, computed)
}

pub fn solve_probabilistic(instance: &Instance, config: &ProbeConfig) -> Result<ProbeOutcome> {
    solve_probabilistic_within(instance, config, &Budget::unlimited())
}

pub fn solve_probabilistic_within(
    instance: &Instance,
    config: &ProbeConfig,
    budget: &Budget,
) -> Result<ProbeOutcome> {
    config.validate()?;
    let mut rng = SeededRng::seed_from_u64(config.seed);
    let mut residuals = 0u64;

    for round in 1..=config.repeat_times {
        budget.check()?;
        let piece = sample_piece(instance, config.piece_length, &mut rng);
        let (hit, computed) = first_zero(instance.target(), &piece);
        residuals += computed;
        if let Some(mut mask) = hit {
            let mut indices = Vec::with_capacity(mask.count_ones() as usize);
            while mask != 0 {
                indices.push(piece[mask.trailing_zeros() as usize].0);
                mask &= mask - 1;
            }
            let solution = SubsetSolution::new(instance, indices)?;
            return Ok(ProbeOutcome {
                solution: Some(solution),
                rounds_used: round,
                residuals,
            });
        }
    }
    Ok(ProbeOutcome {
        solution: None,
        rounds_used: config.repeat_times,
        residuals,
    })
}
