//! Reference algorithms: exhaustive brute force (the test oracle), Bellman's
//! pseudo-polynomial table, capped sumsets and the color-coding subroutine.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::solution::SubsetSolution;
use crate::SeededRng;

pub const BRUTE_FORCE_MAX_N: usize = 20;
/// Largest DP table width (in cells) the Bellman baseline will allocate.
pub const DP_MAX_TARGET: i64 = 1 << 34;

/// Every non-empty subset summing to the target, in ascending mask order.
///
/// Sums are recomputed from scratch for each subset so that this stays
/// independent of the doubling sequence it is used to check.
pub fn brute_force_all(instance: &Instance) -> Result<Vec<SubsetSolution>> {
    let n = instance.len();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::Resource {
            what: "weight count for brute force",
            got: n as u64,
            limit: BRUTE_FORCE_MAX_N as u64,
        });
    }
    let weights = instance.weights();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let sum: i64 = (0..n)
            .filter(|&j| mask & (1 << j) != 0)
            .map(|j| weights[j])
            .sum();
        if sum == instance.target() {
            let indices = (0..n)
                .filter(|&j| mask & (1 << j) != 0)
                .map(|j| j + 1)
                .collect();
            out.push(SubsetSolution::new(instance, indices)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DpDecision {
    pub reachable: bool,
    /// Table cells evaluated: `n * (t + 1)`.
    pub cells: u64,
}

/// Bellman's table `T[j][s] = T[j-1][s] or T[j-1][s - w_j]` over
/// `s in 0..=t`, rows kept as a rolling bitset.
pub fn bellman(instance: &Instance) -> Result<DpDecision> {
    bellman_within(instance, &Budget::unlimited())
}

pub fn bellman_within(instance: &Instance, budget: &Budget) -> Result<DpDecision> {
    let t = instance.target();
    if t < 0 {
        return Err(Error::Precondition(format!("DP needs t >= 0, got {t}")));
    }
    if let Some(w) = instance.weights().iter().find(|&&w| w < 1) {
        return Err(Error::Precondition(format!(
            "DP needs weights >= 1, found {w}"
        )));
    }
    if t > DP_MAX_TARGET {
        return Err(Error::Resource {
            what: "DP target",
            got: t as u64,
            limit: DP_MAX_TARGET as u64,
        });
    }
    let cap = t as usize;
    let mut row = SumsetSet::zero(cap);
    let mut cells = 0u64;
    for &w in instance.weights() {
        budget.check()?;
        // T[j][s] |= T[j-1][s - w], evaluated for all s at once.
        row.include_shifted(w as u64);
        cells += cap as u64 + 1;
    }
    Ok(DpDecision {
        reachable: row.contains(cap as u64),
        cells,
    })
}

pub fn bellman_decides(instance: &Instance) -> Result<bool> {
    bellman(instance).map(|d| d.reachable)
}

/// Set of integers in `[0, cap]`, stored as a dense bitmap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SumsetSet {
    cap: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for SumsetSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl SumsetSet {
    pub fn empty(cap: usize) -> Self {
        Self {
            cap,
            words: vec![0; cap / 64 + 1],
        }
    }

    /// `{0}`, the identity of the capped sumset.
    pub fn zero(cap: usize) -> Self {
        let mut s = Self::empty(cap);
        s.insert(0);
        s
    }

    /// Members above `cap` are dropped.
    pub fn from_values<I: IntoIterator<Item = u64>>(cap: usize, values: I) -> Self {
        let mut s = Self::empty(cap);
        for v in values {
            s.insert(v);
        }
        s
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Inserts `v` if it is within `[0, cap]`; returns whether it fit.
    pub fn insert(&mut self, v: u64) -> bool {
        if v > self.cap as u64 {
            return false;
        }
        let v = v as usize;
        self.words[v / 64] |= 1 << (v % 64);
        true
    }

    pub fn contains(&self, v: u64) -> bool {
        v <= self.cap as u64 && self.words[v as usize / 64] >> (v % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as u64;
                bits &= bits - 1;
                Some(i as u64 * 64 + b)
            })
        })
    }

    pub fn is_subset(&self, other: &SumsetSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn union_with(&mut self, other: &SumsetSet) {
        for v in other.iter() {
            self.insert(v);
        }
    }

    /// `self |= {s + shift : s in self}`, truncated to `[0, cap]`.
    pub fn include_shifted(&mut self, shift: u64) {
        if shift == 0 || shift > self.cap as u64 {
            return;
        }
        // Words are rewritten top-down, so every source word is still unread.
        let (ws, bs) = (shift as usize / 64, shift as usize % 64);
        for i in (ws..self.words.len()).rev() {
            let j = i - ws;
            let mut v = self.words[j] << bs;
            if bs > 0 && j > 0 {
                v |= self.words[j - 1] >> (64 - bs);
            }
            self.words[i] |= v;
        }
        self.clear_above_cap();
    }

    /// Number of members `<= bound`.
    pub fn count_at_most(&self, bound: u64) -> usize {
        if bound >= self.cap as u64 {
            return self.len();
        }
        let (wi, b) = (bound as usize / 64, bound % 64);
        let full: usize = self.words[..wi]
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum();
        let mask = if b == 63 { !0 } else { (1u64 << (b + 1)) - 1 };
        full + (self.words[wi] & mask).count_ones() as usize
    }

    /// `self |= {s + shift : s in src}`, truncated to `[0, cap]`.
    fn or_shifted(&mut self, src: &SumsetSet, shift: usize) {
        if shift > self.cap {
            return;
        }
        let word_shift = shift / 64;
        let bit_shift = shift % 64;
        let n = self.words.len();
        for i in (word_shift..n).rev() {
            let j = i - word_shift;
            let mut v = src.words.get(j).copied().unwrap_or(0) << bit_shift;
            if bit_shift > 0 && j > 0 {
                v |= src.words.get(j - 1).copied().unwrap_or(0) >> (64 - bit_shift);
            }
            self.words[i] |= v;
        }
        self.clear_above_cap();
    }

    fn clear_above_cap(&mut self) {
        let used = self.cap % 64 + 1;
        if used < 64 {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << used) - 1;
        }
    }
}

/// `{a + b : a in A + {0}, b in B + {0}}` restricted to `[0, cap]`.
pub fn capped_sumset(a: &SumsetSet, b: &SumsetSet, cap: usize) -> SumsetSet {
    capped_sumset_counted(a, b, cap).0
}

/// [`capped_sumset`] plus the number of pairwise additions it stands for,
/// `|A + {0}| * |B + {0}|`.
pub fn capped_sumset_counted(a: &SumsetSet, b: &SumsetSet, cap: usize) -> (SumsetSet, u64) {
    let mut a0 = SumsetSet::from_values(cap, a.iter());
    a0.insert(0);
    let mut out = a0.clone();
    let mut b_len = 1u64;
    for shift in b.iter().filter(|&v| v != 0) {
        b_len += 1;
        if shift <= cap as u64 {
            out.or_shifted(&a0, shift as usize);
        }
    }
    (out, a0.len() as u64 * b_len)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorCodingConfig {
    /// Solution-size bound; elements go into `k^2` buckets.
    pub k: usize,
    /// Per-sum failure probability.
    pub delta: f64,
    pub seed: u64,
}

impl ColorCodingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        Ok(())
    }

    /// `ceil(log_{4/3}(1 / delta))`, at least 1.
    pub fn rounds(&self) -> usize {
        let exact = (1.0 / self.delta).ln() / (4.0f64 / 3.0).ln();
        // Absorb rounding noise when delta is an exact power of 3/4.
        ((exact - 1e-9).ceil() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorCodingRun {
    pub sums: SumsetSet,
    pub rounds: usize,
    /// Pairwise additions summed over all folds.
    pub additions: u64,
}

/// Color coding: per round, scatter `z` into `k^2` buckets uniformly at
/// random, fold the buckets left to right with the capped sumset, and union
/// the results over all rounds.
///
/// Round `j` draws from ChaCha8 stream `j` of `seed`, so rounds are
/// independent of evaluation order.
pub fn color_coding(z: &[u64], t: usize, config: &ColorCodingConfig) -> Result<ColorCodingRun> {
    config.validate()?;
    if z.contains(&0) {
        return Err(Error::Precondition(
            "color coding needs positive integers".into(),
        ));
    }
    let mut seen = z.to_vec();
    seen.sort_unstable();
    if seen.windows(2).any(|p| p[0] == p[1]) {
        return Err(Error::Precondition(
            "color coding needs distinct integers".into(),
        ));
    }
    let buckets = config
        .k
        .checked_mul(config.k)
        .ok_or_else(|| Error::Config(format!("k = {} is too large", config.k)))?;

    let rounds = config.rounds();
    let mut sums = SumsetSet::empty(t);
    let mut additions = 0u64;
    for round in 0..rounds {
        let mut rng = SeededRng::seed_from_u64(config.seed);
        rng.set_stream(round as u64);
        let mut parts: Vec<Vec<u64>> = vec![Vec::new(); buckets];
        for &v in z {
            parts[rng.gen_range(0..buckets)].push(v);
        }
        let mut acc = SumsetSet::zero(t);
        for part in &parts {
            let bucket = SumsetSet::from_values(t, part.iter().copied());
            let (next, adds) = capped_sumset_counted(&acc, &bucket, t);
            acc = next;
            additions += adds;
        }
        sums.union_with(&acc);
    }
    Ok(ColorCodingRun {
        sums,
        rounds,
        additions,
    })
}
