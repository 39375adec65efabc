use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Wall-clock budget that long-running solvers poll between blocks or rounds.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    deadline: Option<Instant>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self { deadline: None }
    }

    pub fn with_limit(limit: Duration) -> Self {
        Self {
            deadline: Some(Instant::now() + limit),
        }
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    pub fn check(&self) -> Result<()> {
        if self.expired() {
            Err(Error::TimedOut)
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_limit_expires_immediately() {
        let budget = Budget::with_limit(Duration::ZERO);
        assert_eq!(budget.check(), Err(Error::TimedOut));
        assert!(Budget::unlimited().check().is_ok());
    }
}
