use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;

/// A certified solution: a non-empty, strictly increasing list of 1-indexed
/// weight positions whose weights sum to the target.
///
/// The only constructor runs the sum check, so holding a value is proof.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsetSolution {
    indices: Vec<usize>,
    values: Vec<i64>,
}

impl SubsetSolution {
    /// Certifies `indices` against `instance`. The indices may come in any
    /// order but must be distinct.
    pub fn new(instance: &Instance, mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Precondition("a solution must be non-empty".into()));
        }
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Precondition(format!(
                "index {} appears more than once",
                w[0]
            )));
        }
        let values = indices
            .iter()
            .map(|&i| instance.weight(i))
            .collect::<Result<Vec<_>>>()?;
        let sum: i64 = values.iter().sum();
        if sum != instance.target() {
            return Err(Error::NotASolution {
                indices,
                sum,
                target: instance.target(),
            });
        }
        Ok(Self { indices, values })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn sum(&self) -> i64 {
        self.values.iter().sum()
    }

    /// Re-runs the certificate against `instance`.
    pub fn verify(&self, instance: &Instance) -> Result<()> {
        let again = Self::new(instance, self.indices.clone())?;
        if again.values != self.values {
            return Err(Error::Precondition(
                "stored values disagree with the instance weights".into(),
            ));
        }
        Ok(())
    }

    /// Values sorted decreasingly, the order the greedy solver reports.
    pub fn values_descending(&self) -> Vec<i64> {
        let mut v = self.values.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }
}

impl fmt::Display for SubsetSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
