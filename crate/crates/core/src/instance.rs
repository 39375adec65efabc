use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest permitted value of `|t| + sum |w_i|`, exclusive.
pub const MAGNITUDE_LIMIT: u64 = 1 << 62;

/// A subset-sum instance: target `t` and weights `w1..wn`, addressed 1-indexed.
///
/// Weights may repeat. Construction rejects empty weight lists and any
/// instance whose total magnitude could overflow a residual.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct Instance {
    target: i64,
    weights: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    target: i64,
    weights: Vec<i64>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        Instance::new(raw.target, raw.weights)
    }
}

impl From<Instance> for RawInstance {
    fn from(instance: Instance) -> Self {
        RawInstance {
            target: instance.target,
            weights: instance.weights,
        }
    }
}

impl Instance {
    pub fn new(target: i64, weights: Vec<i64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyWeights);
        }
        let mut total = target.unsigned_abs();
        for w in &weights {
            total = total
                .checked_add(w.unsigned_abs())
                .ok_or(Error::MagnitudeBound)?;
            if total >= MAGNITUDE_LIMIT {
                return Err(Error::MagnitudeBound);
            }
        }
        if total >= MAGNITUDE_LIMIT {
            return Err(Error::MagnitudeBound);
        }
        Ok(Self { target, weights })
    }

    pub fn target(&self) -> i64 {
        self.target
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// Number of weights `n`.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Weight `w_index`, 1-indexed.
    pub fn weight(&self, index: usize) -> Result<i64> {
        if index == 0 || index > self.weights.len() {
            return Err(Error::IndexOutOfRange {
                index,
                n: self.weights.len(),
            });
        }
        Ok(self.weights[index - 1])
    }

    pub fn all_positive(&self) -> bool {
        self.weights.iter().all(|&w| w > 0)
    }

    /// Parses the two-line text format: the target, then the weights
    /// separated by whitespace.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let target_line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing target line".into()))?;
        let target = parse_int(target_line, "target")?;
        let weights = match lines.next() {
            Some(line) => line
                .split_whitespace()
                .map(|tok| parse_int(tok, "weight"))
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        if let Some(extra) = lines.next() {
            return Err(Error::Parse(format!("unexpected trailing line {extra:?}")));
        }
        Self::new(target, weights)
    }

    /// Parses `{"target": t, "weights": [...]}`.
    pub fn parse_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Accepts either format, picking JSON when the input starts with `{`.
    pub fn parse_any(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_text(text)
        }
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialization is infallible")
    }

    /// Stable 64-bit FNV-1a digest of the text encoding.
    pub fn digest(&self) -> String {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in self.to_text().bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{hash:016x}")
    }
}

fn parse_int(token: &str, what: &str) -> Result<i64> {
    token
        .parse::<i64>()
        .map_err(|e| Error::Parse(format!("bad {what} {token:?}: {e}")))
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.target)?;
        let mut first = true;
        for w in &self.weights {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{w}")?;
            first = false;
        }
        writeln!(f)
    }
}

impl FromStr for Instance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_any(s)
    }
}
