//! Prune-and-merge greedy for positive weights.
//!
//! Weights are sorted decreasingly (stable on ties) and processed one per
//! round. Each round forms the candidates `r - w` for every live residual
//! `r`, drops negatives, merges equal values and keeps the set sorted
//! decreasingly. Every residual carries the set of indices subtracted to
//! reach it, so the solution is known as soon as a zero appears.
//!
//! When two residuals merge, the survivor is the one whose chosen weights,
//! listed decreasingly, are lexicographically greatest; equal weight lists
//! fall back to the smaller original indices. This favours large elements.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::baselines::{brute_force_all, SumsetSet};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::solution::SubsetSolution;

/// Provenance masks are 128 bits wide.
pub const MAX_GREEDY_N: usize = 128;

/// Set of 1-indexed weight indices, at most [`MAX_GREEDY_N`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexMask(u128);

impl IndexMask {
    pub fn empty() -> Self {
        Self(0)
    }

    pub fn with(self, index: usize) -> Self {
        debug_assert!((1..=MAX_GREEDY_N).contains(&index));
        Self(self.0 | 1 << (index - 1))
    }

    pub fn contains(self, index: usize) -> bool {
        (1..=MAX_GREEDY_N).contains(&index) && self.0 >> (index - 1) & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize + 1;
            bits &= bits - 1;
            Some(i)
        })
    }
}

impl FromIterator<usize> for IndexMask {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(Self::empty(), Self::with)
    }
}

/// A non-negative residual with the indices subtracted to reach it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackedResidual {
    pub value: i64,
    pub chosen: IndexMask,
    /// Round that produced this residual; 0 for the initial target.
    pub round: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyConfig {
    /// Maximum number of rounds.
    pub round_bound: usize,
    /// Cap on live residuals per round. When it bites, the lowest values are
    /// dropped and a failure only means "not found".
    pub beam_limit: Option<usize>,
}

impl GreedyConfig {
    pub fn new(round_bound: usize) -> Self {
        Self {
            round_bound,
            beam_limit: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.round_bound == 0 {
            return Err(Error::Config("round bound must be at least 1".into()));
        }
        if self.beam_limit == Some(0) {
            return Err(Error::Config("beam limit must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyOutcome {
    /// `None` is the failure outcome.
    pub solution: Option<SubsetSolution>,
    /// Sample variance of the solution values; 0 for a singleton.
    pub variance: Option<f64>,
    /// Set for singleton solutions, whose sample variance is undefined.
    pub degenerate: bool,
    pub rounds_used: usize,
    /// False when the beam dropped residuals, weakening a failure to
    /// "not found".
    pub exhaustive: bool,
    pub peak_residuals: usize,
    /// Candidate residuals formed, i.e. subtractions performed.
    pub candidates: u64,
}

/// `sum (v - mean)^2 / (m - 1)`.
pub fn sample_variance(values: &[f64]) -> Result<f64> {
    let m = values.len();
    if m < 2 {
        return Err(Error::Precondition(format!(
            "sample variance needs at least 2 values, got {m}"
        )));
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    Ok(ss / (m - 1) as f64)
}

/// Variance convention used in reports: singletons count as 0.
pub fn solution_variance(solution: &SubsetSolution) -> f64 {
    let values: Vec<f64> = solution.values().iter().map(|&v| v as f64).collect();
    sample_variance(&values).unwrap_or(0.0)
}

/// Bit masks over sorted ranks (1-based), used inside the sweep.
trait RankMask: Copy + Eq + Default {
    fn with(self, rank: usize) -> Self;
    fn to_u128(self) -> u128;
    /// True when the lowest bit where `self` and `other` differ is set in `self`.
    fn owns_lowest_difference(self, other: Self) -> bool;
}

macro_rules! rank_mask {
    ($t:ty) => {
        impl RankMask for $t {
            #[inline]
            fn with(self, rank: usize) -> Self {
                self | 1 << (rank - 1)
            }
            #[inline]
            fn to_u128(self) -> u128 {
                self as u128
            }
            #[inline]
            fn owns_lowest_difference(self, other: Self) -> bool {
                let diff = self ^ other;
                self & diff & diff.wrapping_neg() != 0
            }
        }
    };
}

rank_mask!(u64);
rank_mask!(u128);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Entry<M> {
    value: i64,
    mask: M,
}

/// Ordering of provenance sets for merge ties, over a fixed weight list.
#[derive(Debug, Clone, Copy)]
enum TieBreak<'a> {
    /// Weights strictly decreasing: weight-lex order is bit order.
    Distinct,
    /// Weights non-increasing with repeats; `classes[r - 1]` holds every
    /// rank whose weight equals that of rank `r`.
    Classes(&'a [u128]),
    General(&'a [i64]),
}

/// Per-rank masks of equal-weight runs in a non-increasing list.
fn class_masks(sorted: &[i64]) -> Vec<u128> {
    let mut out = vec![0u128; sorted.len()];
    let mut start = 0;
    while start < sorted.len() {
        let end = start
            + sorted[start..]
                .iter()
                .take_while(|&&w| w == sorted[start])
                .count();
        let run = (start..end).fold(0u128, |m, r| m | 1 << r);
        out[start..end].iter_mut().for_each(|m| *m = run);
        start = end;
    }
    out
}

impl TieBreak<'_> {
    /// True when `a` should survive a merge against `b`.
    #[inline]
    fn prefers<M: RankMask>(self, a: M, b: M) -> bool {
        match self {
            TieBreak::Distinct => a.owns_lowest_difference(b),
            TieBreak::Classes(classes) => prefers_by_class(a.to_u128(), b.to_u128(), classes),
            TieBreak::General(w) => {
                compare_general(IndexMask(a.to_u128()), IndexMask(b.to_u128()), w)
                    == Ordering::Greater
            }
        }
    }
}

/// Weight-lex comparison via per-class counts: at the first weight class
/// where the sets differ, more members means a larger element sits earlier
/// in the decreasing listing. Equal listings fall back to the lowest
/// differing index.
fn prefers_by_class(a: u128, b: u128, classes: &[u128]) -> bool {
    let mut diff = a ^ b;
    let by_index = a & diff & diff.wrapping_neg() != 0;
    while diff != 0 {
        let class = classes[diff.trailing_zeros() as usize];
        let (ca, cb) = ((a & class).count_ones(), (b & class).count_ones());
        if ca != cb {
            return ca > cb;
        }
        diff &= !class;
    }
    by_index
}

/// Compares chosen sets by their weights listed decreasingly, then by
/// smaller indices. `weights` must be non-increasing. Reference for
/// [`prefers_by_class`].
#[cfg(test)]
fn compare_sorted(a: IndexMask, b: IndexMask, weights: &[i64]) -> Ordering {
    let (mut ia, mut ib) = (a.iter(), b.iter());
    let mut index_tiebreak = Ordering::Equal;
    loop {
        match (ia.next(), ib.next()) {
            (Some(x), Some(y)) => {
                let by_weight = weights[x - 1].cmp(&weights[y - 1]);
                if by_weight != Ordering::Equal {
                    return by_weight;
                }
                if index_tiebreak == Ordering::Equal {
                    index_tiebreak = y.cmp(&x);
                }
            }
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (None, None) => return index_tiebreak,
        }
    }
}

fn compare_general(a: IndexMask, b: IndexMask, weights: &[i64]) -> Ordering {
    let key = |m: IndexMask| {
        let mut k: Vec<(i64, usize)> = m.iter().map(|i| (weights[i - 1], i)).collect();
        k.sort_by(|p, q| q.0.cmp(&p.0).then(p.1.cmp(&q.1)));
        k
    };
    let (ka, kb) = (key(a), key(b));
    ka.iter()
        .map(|p| p.0)
        .cmp(kb.iter().map(|p| p.0))
        .then_with(|| kb.iter().map(|p| p.1).cmp(ka.iter().map(|p| p.1)))
}

/// One round over a decreasing, duplicate-free residual list: merges `src`
/// with its non-negative `r - w` into `dst`.
fn merge_round<M: RankMask>(
    src: &[Entry<M>],
    dst: &mut Vec<Entry<M>>,
    w: i64,
    rank: usize,
    tie: TieBreak,
) {
    // Values are decreasing, so the survivors of `r - w >= 0` are a prefix.
    let keep = src.partition_point(|r| r.value >= w);
    dst.clear();
    dst.reserve(src.len() + keep);
    let shifted = |e: &Entry<M>| Entry {
        value: e.value - w,
        mask: e.mask.with(rank),
    };

    let (mut i, mut j) = (0, 0);
    while i < src.len() && j < keep {
        let old = src[i];
        let new = shifted(&src[j]);
        match old.value.cmp(&new.value) {
            Ordering::Greater => {
                dst.push(old);
                i += 1;
            }
            Ordering::Less => {
                dst.push(new);
                j += 1;
            }
            Ordering::Equal => {
                dst.push(if tie.prefers(new.mask, old.mask) {
                    new
                } else {
                    old
                });
                i += 1;
                j += 1;
            }
        }
    }
    dst.extend_from_slice(&src[i..]);
    dst.extend(src[j..keep].iter().map(shifted));
}

fn sort_and_dedup(residuals: &[TrackedResidual], tie: TieBreak) -> Vec<Entry<u128>> {
    let mut v: Vec<Entry<u128>> = residuals
        .iter()
        .map(|r| Entry {
            value: r.value,
            mask: r.chosen.0,
        })
        .collect();
    v.sort_by_key(|r| std::cmp::Reverse(r.value));
    let mut out: Vec<Entry<u128>> = Vec::with_capacity(v.len());
    for r in v {
        match out.last_mut() {
            Some(last) if last.value == r.value => {
                if tie.prefers(r.mask, last.mask) {
                    *last = r;
                }
            }
            _ => out.push(r),
        }
    }
    out
}

/// Round that produced a residual: the last weight it subtracted.
fn producing_round(mask: u128) -> u32 {
    128 - mask.leading_zeros()
}

/// Union of `residuals` and the non-negative `r - w` (with `index` added to
/// the provenance), merged on equal value and sorted decreasingly.
///
/// `weights` is the list `index` and every provenance refers to; it decides
/// merge ties. The `round` of each output is the largest index it holds, as
/// in a sweep over `weights` in order.
pub fn prune_and_merge(
    residuals: &[TrackedResidual],
    w: i64,
    index: usize,
    weights: &[i64],
) -> Result<Vec<TrackedResidual>> {
    if w <= 0 {
        return Err(Error::Precondition(format!("weight {w} is not positive")));
    }
    if index == 0 || index > weights.len().min(MAX_GREEDY_N) {
        return Err(Error::IndexOutOfRange {
            index,
            n: weights.len(),
        });
    }
    if let Some(r) = residuals.iter().find(|r| r.value < 0) {
        return Err(Error::Precondition(format!(
            "residual {} is negative",
            r.value
        )));
    }
    let classes;
    let tie = if weights.windows(2).all(|p| p[0] > p[1]) {
        TieBreak::Distinct
    } else if weights.windows(2).all(|p| p[0] >= p[1]) {
        classes = class_masks(weights);
        TieBreak::Classes(&classes)
    } else {
        TieBreak::General(weights)
    };
    let live = sort_and_dedup(residuals, tie);
    let mut out = Vec::new();
    merge_round(&live, &mut out, w, index, tie);
    Ok(out
        .into_iter()
        .map(|e| TrackedResidual {
            value: e.value,
            chosen: IndexMask(e.mask),
            round: producing_round(e.mask),
        })
        .collect())
}

/// Largest target for which the dense layout is chosen automatically.
pub const DENSE_MAX_TARGET: i64 = (1 << 26) - 1;

/// Storage for the live residuals of a [`Sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layout {
    /// Decreasing list of (value, provenance), merged each round.
    Sparse,
    /// Membership bitmap over `[0, t]` with a provenance slot per value.
    /// Needs at most 64 weights and no beam.
    Dense,
}

#[derive(Debug, Clone)]
enum Live {
    /// Live list plus a spare buffer the next round merges into.
    Narrow(Vec<Entry<u64>>, Vec<Entry<u64>>),
    Wide(Vec<Entry<u128>>, Vec<Entry<u128>>),
    Dense(DenseLive),
}

/// Dense state: live residuals are `t - s` for `s` in the capped subset sums
/// of the weights processed so far. Provenance is rebuilt on demand.
#[derive(Debug, Clone)]
struct DenseLive {
    target: i64,
    sums: SumsetSet,
}

impl DenseLive {
    fn new(target: i64) -> Self {
        Self {
            target,
            sums: SumsetSet::zero(target as usize),
        }
    }

    /// Returns the number of candidates formed.
    fn round(&mut self, w: i64) -> u64 {
        let formed = if w > self.target {
            0
        } else {
            self.sums.count_at_most((self.target - w) as u64) as u64
        };
        self.sums.include_shifted(w as u64);
        formed
    }

    fn has_zero(&self) -> bool {
        self.sums.contains(self.target as u64)
    }
}

/// Rebuilds merge-survivor provenance over ranks `1..=weights.len()`.
///
/// A survivor is the greatest subset under the merge order among all
/// subsets reaching its value, and that order is compatible with adding the
/// newest (smallest) weight, so it can be rebuilt front to back: take the
/// smallest rank whose weight still leaves the remainder reachable from the
/// later ranks.
struct Provenance<'a> {
    weights: &'a [i64],
    /// `suffix[j]`: sums reachable from ranks `j + 1..=len`, capped.
    suffix: Vec<SumsetSet>,
}

impl<'a> Provenance<'a> {
    fn new(weights: &'a [i64], cap: i64) -> Self {
        let mut suffix = vec![SumsetSet::zero(cap as usize)];
        for &w in weights.iter().rev() {
            let mut next = suffix.last().unwrap().clone();
            next.include_shifted(w as u64);
            suffix.push(next);
        }
        suffix.reverse();
        Self { weights, suffix }
    }

    /// Rank mask of the survivor whose subtracted weights sum to `sum`.
    fn survivor(&self, mut sum: i64) -> Option<u128> {
        let mut mask = 0u128;
        let mut from = 0;
        while sum > 0 {
            let r = (from..self.weights.len()).find(|&r| {
                let w = self.weights[r];
                w <= sum && self.suffix[r + 1].contains((sum - w) as u64)
            })?;
            mask |= 1 << r;
            sum -= self.weights[r];
            from = r + 1;
        }
        Some(mask)
    }
}

impl Live {
    fn len(&self) -> usize {
        match self {
            Live::Narrow(v, _) => v.len(),
            Live::Wide(v, _) => v.len(),
            Live::Dense(d) => d.sums.len(),
        }
    }

    /// (value, rank mask) pairs, values decreasing. `weights` are the sorted
    /// weights processed so far.
    fn entries(&self, weights: &[i64]) -> Vec<(i64, u128)> {
        match self {
            Live::Narrow(v, _) => v.iter().map(|e| (e.value, e.mask as u128)).collect(),
            Live::Wide(v, _) => v.iter().map(|e| (e.value, e.mask)).collect(),
            Live::Dense(d) => {
                let prov = Provenance::new(weights, d.target);
                d.sums
                    .iter()
                    .map(|s| {
                        let mask = prov.survivor(s as i64).expect("live sums are reachable");
                        (d.target - s as i64, mask)
                    })
                    .collect()
            }
        }
    }

    fn zero_mask(&self, weights: &[i64]) -> Option<u128> {
        match self {
            Live::Narrow(v, _) => v.last().filter(|e| e.value == 0).map(|e| e.mask as u128),
            Live::Wide(v, _) => v.last().filter(|e| e.value == 0).map(|e| e.mask),
            Live::Dense(d) => d
                .has_zero()
                .then(|| Provenance::new(weights, d.target).survivor(d.target))
                .flatten(),
        }
    }

    fn truncate(&mut self, len: usize) {
        match self {
            Live::Narrow(v, _) => v.truncate(len),
            Live::Wide(v, _) => v.truncate(len),
            Live::Dense(_) => unreachable!("dense layout runs without a beam"),
        }
    }
}

/// Round-by-round state of the greedy sweep over the sorted weights.
#[derive(Debug, Clone)]
pub struct Sweep {
    /// `order[r]` is the original index of the weight processed in round `r + 1`.
    order: Vec<usize>,
    sorted_weights: Vec<i64>,
    /// Empty when the sorted weights are distinct.
    classes: Vec<u128>,
    /// Provenance is kept over sorted ranks and mapped back on export.
    live: Live,
    round: usize,
    beam_limit: Option<usize>,
    dropped: bool,
    peak: usize,
    candidates: u64,
}

impl Sweep {
    /// Picks the dense layout when it fits and pays off, sparse otherwise.
    pub fn new(instance: &Instance, beam_limit: Option<usize>) -> Result<Self> {
        let t = instance.target();
        let dense = beam_limit.is_none()
            && instance.len() <= 64
            && t <= DENSE_MAX_TARGET
            // Dense rounds scan t/64 words; skip it when 2^n is far smaller.
            && (instance.len() >= 40 || t <= 16i64 << instance.len());
        let layout = if dense { Layout::Dense } else { Layout::Sparse };
        Self::with_layout(instance, beam_limit, layout)
    }

    pub fn with_layout(
        instance: &Instance,
        beam_limit: Option<usize>,
        layout: Layout,
    ) -> Result<Self> {
        if let Some(w) = instance.weights().iter().find(|&&w| w <= 0) {
            return Err(Error::Precondition(format!(
                "greedy needs positive weights, found {w}"
            )));
        }
        let t = instance.target();
        if t <= 0 {
            return Err(Error::Precondition(format!(
                "greedy needs a positive target, got {t}"
            )));
        }
        if instance.len() > MAX_GREEDY_N {
            return Err(Error::Resource {
                what: "weight count for greedy",
                got: instance.len() as u64,
                limit: MAX_GREEDY_N as u64,
            });
        }
        if layout == Layout::Dense {
            if instance.len() > 64 || beam_limit.is_some() {
                return Err(Error::Config(
                    "dense layout needs at most 64 weights and no beam".into(),
                ));
            }
            if t > DENSE_MAX_TARGET {
                return Err(Error::Resource {
                    what: "target for dense layout",
                    got: t as u64,
                    limit: DENSE_MAX_TARGET as u64,
                });
            }
        }

        let mut order: Vec<usize> = (1..=instance.len()).collect();
        let weights = instance.weights();
        order.sort_by(|&a, &b| weights[b - 1].cmp(&weights[a - 1]));
        let sorted_weights: Vec<i64> = order.iter().map(|&i| weights[i - 1]).collect();
        let classes = if sorted_weights.windows(2).all(|p| p[0] > p[1]) {
            Vec::new()
        } else {
            class_masks(&sorted_weights)
        };
        let live = match layout {
            Layout::Dense => Live::Dense(DenseLive::new(t)),
            Layout::Sparse if instance.len() <= 64 => {
                Live::Narrow(vec![Entry { value: t, mask: 0 }], Vec::new())
            }
            Layout::Sparse => Live::Wide(vec![Entry { value: t, mask: 0 }], Vec::new()),
        };
        Ok(Self {
            order,
            sorted_weights,
            classes,
            live,
            round: 0,
            beam_limit,
            dropped: false,
            peak: 1,
            candidates: 0,
        })
    }

    pub fn layout(&self) -> Layout {
        match self.live {
            Live::Dense(_) => Layout::Dense,
            _ => Layout::Sparse,
        }
    }

    pub fn rounds_done(&self) -> usize {
        self.round
    }

    pub fn is_finished(&self) -> bool {
        self.round == self.order.len()
    }

    pub fn live_count(&self) -> usize {
        self.live.len()
    }

    /// Live residual values, decreasing.
    pub fn values(&self) -> Vec<i64> {
        match &self.live {
            Live::Narrow(v, _) => v.iter().map(|e| e.value).collect(),
            Live::Wide(v, _) => v.iter().map(|e| e.value).collect(),
            Live::Dense(d) => d.sums.iter().map(|s| d.target - s as i64).collect(),
        }
    }

    /// Live residuals with provenance in original indices.
    pub fn residuals(&self) -> Vec<TrackedResidual> {
        self.live
            .entries(&self.sorted_weights[..self.round])
            .into_iter()
            .map(|(value, ranks)| TrackedResidual {
                value,
                chosen: self.to_original(IndexMask(ranks)),
                round: producing_round(ranks),
            })
            .collect()
    }

    fn to_original(&self, ranks: IndexMask) -> IndexMask {
        ranks.iter().map(|r| self.order[r - 1]).collect()
    }

    /// Processes the next weight. Returns the provenance of a zero residual
    /// if one is now live.
    pub fn step(&mut self) -> Option<IndexMask> {
        if self.is_finished() {
            return None;
        }
        self.round += 1;
        let w = self.sorted_weights[self.round - 1];
        let tie = if self.classes.is_empty() {
            TieBreak::Distinct
        } else {
            TieBreak::Classes(&self.classes)
        };
        match &mut self.live {
            Live::Narrow(v, spare) => {
                self.candidates += v.partition_point(|r| r.value >= w) as u64;
                merge_round(v, spare, w, self.round, tie);
                std::mem::swap(v, spare);
            }
            Live::Wide(v, spare) => {
                self.candidates += v.partition_point(|r| r.value >= w) as u64;
                merge_round(v, spare, w, self.round, tie);
                std::mem::swap(v, spare);
            }
            Live::Dense(d) => {
                self.candidates += d.round(w);
            }
        }
        if let Some(cap) = self.beam_limit {
            if self.live.len() > cap {
                self.live.truncate(cap);
                self.dropped = true;
            }
        }
        self.peak = self.peak.max(self.live.len());
        self.live
            .zero_mask(&self.sorted_weights[..self.round])
            .map(|ranks| self.to_original(IndexMask(ranks)))
    }
}

pub fn solve_greedy(instance: &Instance, config: &GreedyConfig) -> Result<GreedyOutcome> {
    solve_greedy_within(instance, config, &Budget::unlimited())
}

pub fn solve_greedy_within(
    instance: &Instance,
    config: &GreedyConfig,
    budget: &Budget,
) -> Result<GreedyOutcome> {
    config.validate()?;
    let mut sweep = Sweep::new(instance, config.beam_limit)?;
    let rounds = config.round_bound.min(instance.len());
    let mut found = None;
    while sweep.rounds_done() < rounds {
        budget.check()?;
        if let Some(chosen) = sweep.step() {
            found = Some(chosen);
            break;
        }
    }

    let solution = found
        .map(|mask| SubsetSolution::new(instance, mask.iter().collect()))
        .transpose()?;
    let variance = solution.as_ref().map(solution_variance);
    Ok(GreedyOutcome {
        degenerate: solution.as_ref().is_some_and(|s| s.len() < 2),
        variance,
        solution,
        rounds_used: sweep.rounds_done(),
        exhaustive: !sweep.dropped,
        peak_residuals: sweep.peak,
        candidates: sweep.candidates,
    })
}

/// Greedy variance against the true minimum over all solutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceGap {
    pub greedy: Option<f64>,
    pub minimum: Option<f64>,
    /// `greedy - minimum` when both exist.
    pub gap: Option<f64>,
}

/// Diagnostic only; brute force limits this to small instances.
pub fn variance_gap(instance: &Instance, config: &GreedyConfig) -> Result<VarianceGap> {
    let greedy = solve_greedy(instance, config)?.variance;
    let minimum = brute_force_all(instance)?
        .iter()
        .map(solution_variance)
        .min_by(f64::total_cmp);
    let gap = greedy.zip(minimum).map(|(g, m)| g - m);
    Ok(VarianceGap {
        greedy,
        minimum,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(t: i64, w: &[i64]) -> Instance {
        Instance::new(t, w.to_vec()).unwrap()
    }

    fn values(rs: &[TrackedResidual]) -> Vec<i64> {
        rs.iter().map(|r| r.value).collect()
    }

    #[test]
    fn variance_examples() {
        let s = sample_variance(&[8.0, 7.0, 5.0, 4.0]).unwrap();
        assert!((s - 3.3333).abs() < 1e-4);
        let s = sample_variance(&[8.0, 7.0, 6.0, 3.0]).unwrap();
        assert!((s - 4.6667).abs() < 1e-4);
        assert_eq!(sample_variance(&[2.5, 2.5]).unwrap(), 0.0);
        assert!(sample_variance(&[1.0]).is_err());
        assert!(sample_variance(&[]).is_err());
    }

    #[test]
    fn walkthrough_rounds() {
        let weights: Vec<i64> = (1..=8).rev().collect();
        let start = [TrackedResidual {
            value: 24,
            chosen: IndexMask::empty(),
            round: 0,
        }];
        let r1 = prune_and_merge(&start, 8, 1, &weights).unwrap();
        assert_eq!(values(&r1), vec![24, 16]);
        let r2 = prune_and_merge(&r1, 7, 2, &weights).unwrap();
        assert_eq!(values(&r2), vec![24, 17, 16, 9]);
        assert_eq!(r2[3].chosen.iter().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(r2[3].round, 2);
    }

    #[test]
    fn total_pruning_leaves_values_unchanged() {
        let weights = [100, 3, 2];
        let rs = [
            TrackedResidual {
                value: 5,
                chosen: IndexMask::empty(),
                round: 0,
            },
            TrackedResidual {
                value: 2,
                chosen: [2].into_iter().collect(),
                round: 1,
            },
        ];
        let out = prune_and_merge(&rs, 100, 1, &weights).unwrap();
        assert_eq!(values(&out), vec![5, 2]);
    }

    #[test]
    fn merge_prefers_larger_elements() {
        // 9 = 8 + 1 = 6 + 3; the survivor should hold 8.
        let weights = [8, 6, 3, 1];
        let rs = [
            TrackedResidual {
                value: 10,
                chosen: IndexMask::empty(),
                round: 0,
            },
            TrackedResidual {
                value: 1,
                chosen: [2, 3].into_iter().collect(),
                round: 3,
            },
        ];
        // 10 - 8 = 2 is new; collide 1 against 2 - 1 after the next round.
        let r = prune_and_merge(&rs, 8, 1, &weights).unwrap();
        let r = prune_and_merge(&r, 1, 4, &weights).unwrap();
        let one = r.iter().find(|x| x.value == 1).unwrap();
        assert_eq!(one.chosen.iter().collect::<Vec<_>>(), vec![1, 4]);
    }

    #[test]
    fn tie_break_compares_weights_not_positions() {
        // Sorted weights [5, 5, 3, 2, 1]: {1,4,5} = 5+2+1 and {2,3} = 5+3
        // both reach 8. Decreasingly [5,3] beats [5,2,1].
        let weights = [5, 5, 3, 2, 1];
        let a: IndexMask = [1, 4, 5].into_iter().collect();
        let b: IndexMask = [2, 3].into_iter().collect();
        assert_eq!(compare_sorted(b, a, &weights), Ordering::Greater);
        assert_eq!(compare_general(b, a, &weights), Ordering::Greater);
        // Equal weight lists: smaller indices win.
        let c: IndexMask = [1, 3].into_iter().collect();
        assert_eq!(compare_sorted(c, b, &weights), Ordering::Greater);
        assert_eq!(compare_general(c, b, &weights), Ordering::Greater);
    }

    #[test]
    fn class_tie_break_matches_listing_order() {
        use rand::{Rng, SeedableRng};
        let mut rng = crate::SeededRng::seed_from_u64(1);
        for _ in 0..2000 {
            let n = rng.gen_range(1..=12);
            let mut weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
            weights.sort_by(|a, b| b.cmp(a));
            let classes = class_masks(&weights);
            let a: u128 = rng.gen_range(0..1 << n);
            let b: u128 = rng.gen_range(0..1 << n);
            let want = compare_sorted(IndexMask(a), IndexMask(b), &weights) == Ordering::Greater;
            assert_eq!(
                prefers_by_class(a, b, &classes),
                want,
                "{weights:?} {a:b} {b:b}"
            );
            assert_eq!(
                compare_general(IndexMask(a), IndexMask(b), &weights),
                compare_sorted(IndexMask(a), IndexMask(b), &weights)
            );
        }
    }

    #[test]
    fn layouts_agree() {
        let instance = inst(40, &[9, 4, 7, 7, 3, 12, 5, 1, 8, 2, 6]);
        let mut sparse = Sweep::with_layout(&instance, None, Layout::Sparse).unwrap();
        let mut dense = Sweep::with_layout(&instance, None, Layout::Dense).unwrap();
        while !sparse.is_finished() {
            assert_eq!(sparse.step(), dense.step());
            assert_eq!(sparse.residuals(), dense.residuals());
        }
        assert!(Sweep::with_layout(&instance, Some(3), Layout::Dense).is_err());
    }

    #[test]
    fn unsorted_weight_lists_use_general_order() {
        let weights = [1, 8, 6, 3];
        let a: IndexMask = [1, 2].into_iter().collect(); // 8,1
        let b: IndexMask = [3, 4].into_iter().collect(); // 6,3
        assert_eq!(compare_general(a, b, &weights), Ordering::Greater);
    }

    #[test]
    fn table_instance_picks_min_variance_row() {
        let out =
            solve_greedy(&inst(24, &[1, 2, 3, 4, 5, 6, 7, 8]), &GreedyConfig::new(8)).unwrap();
        let s = out.solution.unwrap();
        assert_eq!(s.values_descending(), vec![8, 7, 5, 4]);
        assert!((out.variance.unwrap() - 3.3333).abs() < 1e-4);
        assert_eq!(out.rounds_used, 5);
        assert!(!out.degenerate);
    }

    #[test]
    fn small_examples() {
        let out = solve_greedy(&inst(7, &[7, 1]), &GreedyConfig::new(2)).unwrap();
        assert_eq!(out.solution.as_ref().unwrap().values(), &[7]);
        assert!(out.degenerate);
        assert_eq!(out.variance, Some(0.0));
        assert_eq!(out.rounds_used, 1);

        let out = solve_greedy(&inst(6, &[4, 4, 3]), &GreedyConfig::new(3)).unwrap();
        assert_eq!(out.solution, None);
        assert!(out.exhaustive);
        assert_eq!(out.rounds_used, 3);
    }

    #[test]
    fn duplicate_weights_keep_index_order() {
        let out = solve_greedy(&inst(4, &[2, 4, 4]), &GreedyConfig::new(3)).unwrap();
        assert_eq!(out.solution.unwrap().indices(), &[2]);
    }

    #[test]
    fn round_bound_limits_search() {
        // Needs the fourth-largest weight.
        let out = solve_greedy(&inst(1, &[9, 8, 7, 1]), &GreedyConfig::new(3)).unwrap();
        assert_eq!(out.solution, None);
        assert_eq!(out.rounds_used, 3);
        let out = solve_greedy(&inst(1, &[9, 8, 7, 1]), &GreedyConfig::new(4)).unwrap();
        assert!(out.solution.is_some());
    }

    #[test]
    fn beam_marks_search_inexhaustive() {
        let cfg = GreedyConfig {
            round_bound: 10,
            beam_limit: Some(2),
        };
        let out = solve_greedy(&inst(100, &[1, 2, 3, 4, 5, 6]), &cfg).unwrap();
        assert_eq!(out.solution, None);
        assert!(!out.exhaustive);
        assert!(out.peak_residuals <= 2);
    }

    #[test]
    fn preconditions() {
        assert!(matches!(
            solve_greedy(&inst(5, &[1, -2]), &GreedyConfig::new(2)),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            solve_greedy(&inst(5, &[1, 0]), &GreedyConfig::new(2)),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            solve_greedy(&inst(0, &[1]), &GreedyConfig::new(1)),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            solve_greedy(&inst(1, &[1]), &GreedyConfig::new(0)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            solve_greedy(&inst(1, &vec![1; 129]), &GreedyConfig::new(1)),
            Err(Error::Resource { .. })
        ));
        let start = [TrackedResidual {
            value: -1,
            chosen: IndexMask::empty(),
            round: 0,
        }];
        assert!(prune_and_merge(&start, 1, 1, &[1]).is_err());
        assert!(prune_and_merge(&[], 0, 1, &[1]).is_err());
        assert!(prune_and_merge(&[], 1, 2, &[1]).is_err());
    }

    #[test]
    fn gap_is_zero_on_the_table_instance() {
        let g = variance_gap(&inst(24, &[1, 2, 3, 4, 5, 6, 7, 8]), &GreedyConfig::new(8)).unwrap();
        assert!(g.gap.unwrap().abs() < 1e-12);
    }
}
