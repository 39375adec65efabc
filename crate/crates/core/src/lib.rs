//! Subset-sum solvers built around the doubling residual sequence.
//!
//! Given a target `t` and weights `w1..wn`, the sequence
//! `t, t-w1, t-w2, t-w1-w2, t-w3, ...` lists every residual `t - w(X)` exactly
//! once, and the residual for subset `X` sits at position `k = 1 + sum 2^(j-1)`
//! over `j` in `X`. Every zero in the sequence is a solution, and its subset is
//! read straight off the binary digits of `k - 1`.
//!
//! The crate provides:
//!
//! - [`enumerative`]: all solutions, streamed in bounded memory.
//! - [`randomized`]: one solution from short random pieces, one-sided error.
//! - [`greedy`]: positive weights only; prunes negative residuals, merges
//!   duplicates and tracks provenance so the solution survives merging.
//! - [`baselines`]: brute force, Bellman's table, capped sumsets and color coding.
//! - [`gen`]: seeded random and planted instances.
//!
//! ```
//! use subsum::{enumerative, EnumerationConfig, Instance};
//!
//! let instance = Instance::new(5, vec![1, 2, 3, 4]).unwrap();
//! let found = enumerative::solve_all(&instance, &EnumerationConfig::default()).unwrap();
//! let sets: Vec<Vec<usize>> = found.solutions.iter().map(|s| s.indices().to_vec()).collect();
//! assert_eq!(sets, vec![vec![2, 3], vec![1, 4]]);
//! ```

pub mod baselines;
pub mod budget;
pub mod enumerative;
pub mod error;
pub mod gen;
pub mod greedy;
pub mod instance;
pub mod position;
pub mod randomized;
pub mod solution;

pub use baselines::{ColorCodingConfig, SumsetSet};
pub use budget::Budget;
pub use enumerative::{Enumeration, EnumerationConfig};
pub use error::{Error, ErrorKind, Result};
pub use gen::GenSpec;
pub use greedy::{GreedyConfig, GreedyOutcome, TrackedResidual};
pub use instance::Instance;
pub use position::{decode_position, position_of, residual_at, ResidualBlock};
pub use randomized::{ProbeConfig, ProbeOutcome};
pub use solution::SubsetSolution;

/// Seeded generator used by every randomized component.
///
/// ChaCha8 seeded through `SeedableRng::seed_from_u64`; streams are stable
/// across platforms for a given `rand_chacha` release.
pub type SeededRng = rand_chacha::ChaCha8Rng;
