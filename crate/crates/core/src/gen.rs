//! Seeded instance generators.
//!
//! Weights are uniform in `[1, 2^bit_length - 1]`. Random instances draw the
//! target uniformly from `[1, sum w]`; planted instances set it to the sum of
//! a uniformly chosen index subset.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::solution::SubsetSolution;
use crate::SeededRng;

pub const MAX_BIT_LENGTH: u32 = 40;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub bit_length: u32,
    pub planted_size: Option<usize>,
    pub seed: u64,
}

impl GenSpec {
    pub fn random(n: usize, bit_length: u32, seed: u64) -> Self {
        Self {
            n,
            bit_length,
            planted_size: None,
            seed,
        }
    }

    pub fn planted(n: usize, bit_length: u32, planted_size: usize, seed: u64) -> Self {
        Self {
            n,
            bit_length,
            planted_size: Some(planted_size),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if !(1..=MAX_BIT_LENGTH).contains(&self.bit_length) {
            return Err(Error::Config(format!(
                "bit_length {} outside 1..={MAX_BIT_LENGTH}",
                self.bit_length
            )));
        }
        match self.planted_size {
            Some(0) => Err(Error::Config("planted_size must be at least 1".into())),
            Some(k) if k > self.n => Err(Error::Config(format!(
                "planted_size {k} exceeds n = {}",
                self.n
            ))),
            _ => Ok(()),
        }
    }

    pub fn max_weight(&self) -> i64 {
        (1i64 << self.bit_length) - 1
    }
}

fn draw_weights(spec: &GenSpec, rng: &mut SeededRng) -> Vec<i64> {
    let hi = spec.max_weight();
    (0..spec.n).map(|_| rng.gen_range(1..=hi)).collect()
}

pub fn gen_random(spec: &GenSpec) -> Result<Instance> {
    spec.validate()?;
    if spec.planted_size.is_some() {
        return Err(Error::Config("use gen_planted for planted specs".into()));
    }
    let mut rng = SeededRng::seed_from_u64(spec.seed);
    let weights = draw_weights(spec, &mut rng);
    let total: i64 = weights.iter().sum();
    let target = rng.gen_range(1..=total);
    Instance::new(target, weights)
}

pub fn gen_planted(spec: &GenSpec) -> Result<(Instance, SubsetSolution)> {
    spec.validate()?;
    let size = spec
        .planted_size
        .ok_or_else(|| Error::Config("planted spec needs planted_size".into()))?;
    let mut rng = SeededRng::seed_from_u64(spec.seed);
    let weights = draw_weights(spec, &mut rng);
    let mut indices: Vec<usize> = sample(&mut rng, spec.n, size)
        .into_iter()
        .map(|i| i + 1)
        .collect();
    indices.sort_unstable();
    let target = indices.iter().map(|&i| weights[i - 1]).sum();
    let instance = Instance::new(target, weights)?;
    let witness = SubsetSolution::new(&instance, indices)?;
    Ok((instance, witness))
}
