use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use subsum::{Instance, SubsetSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every solution, by exhaustive enumeration.
    All,
    /// Random pieces, one-sided error.
    Prob,
    /// Prune-and-merge greedy, low-variance solution.
    Greedy,
    /// Bellman dynamic program, yes/no.
    Dp,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::All => "all",
            Mode::Prob => "prob",
            Mode::Greedy => "greedy",
            Mode::Dp => "dp",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Solved,
    Failure,
    Reachable,
    Unreachable,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Solved | Outcome::Reachable => crate::EXIT_OK,
            Outcome::Failure | Outcome::Unreachable => crate::EXIT_NO_SOLUTION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportedSolution {
    /// 1-based weight indices, ascending.
    pub indices: Vec<usize>,
    pub values: Vec<i64>,
}

impl From<&SubsetSolution> for ReportedSolution {
    fn from(s: &SubsetSolution) -> Self {
        Self {
            indices: s.indices().to_vec(),
            values: s.values().to_vec(),
        }
    }
}

/// Solver settings echoed back in the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeConfig {
    All {
        max_n: usize,
        chunk_size: usize,
        solution_limit: Option<usize>,
    },
    Prob {
        piece_length: usize,
        repeat_times: usize,
    },
    Greedy {
        round_bound: usize,
        beam_limit: Option<usize>,
    },
    Dp {},
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: Mode,
    pub digest: String,
    pub n: usize,
    pub target: i64,
    pub outcome: Outcome,
    pub solutions: Vec<ReportedSolution>,
    /// The search stopped early (solution limit or beam), so absence of a
    /// solution proves nothing.
    pub truncated: bool,
    pub variance: Option<f64>,
    pub wall_micros: u64,
    pub counters: BTreeMap<String, u64>,
    pub config: ModeConfig,
    pub seed: Option<u64>,
}

impl RunReport {
    /// Re-checks every reported solution against `instance`.
    pub fn validate(&self, instance: &Instance) -> subsum::Result<()> {
        if self.digest != instance.digest() {
            return Err(subsum::Error::Precondition(format!(
                "report digest {} does not match instance {}",
                self.digest,
                instance.digest()
            )));
        }
        for reported in &self.solutions {
            let checked = SubsetSolution::new(instance, reported.indices.clone())?;
            if checked.values() != reported.values.as_slice() {
                return Err(subsum::Error::Precondition(format!(
                    "reported values {:?} do not match indices {:?}",
                    reported.values, reported.indices
                )));
            }
        }
        Ok(())
    }

    pub fn exit_code(&self) -> u8 {
        self.outcome.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Human-readable rendering: one line per solution, then mode extras.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        match self.outcome {
            Outcome::Reachable => out.push_str("yes\n"),
            Outcome::Unreachable => out.push_str("no\n"),
            Outcome::Failure => {
                out.push_str("FAILURE\n");
                if self.truncated {
                    out.push_str("search was cut short; a solution may still exist\n");
                }
            }
            Outcome::Solved => {
                for s in &self.solutions {
                    let mut values = s.values.clone();
                    if self.mode == Mode::Greedy {
                        values.sort_unstable_by(|a, b| b.cmp(a));
                    }
                    out.push_str(&join(&values));
                    out.push('\n');
                }
                if let Some(v) = self.variance {
                    let _ = writeln!(out, "variance {v:.4}");
                }
                if self.truncated {
                    let _ = writeln!(out, "stopped after {} solutions", self.solutions.len());
                }
            }
        }
        if let Some(rounds) = self.counters.get("rounds_used") {
            let _ = writeln!(out, "rounds {rounds}");
        }
        out
    }
}

fn join(values: &[i64]) -> String {
    values
        .iter()
        .map(i64::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}
