use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use subsum::baselines::{bellman_within, color_coding};
use subsum::enumerative::{solve_all_within, DEFAULT_CHUNK_SIZE, DEFAULT_MAX_N};
use subsum::gen::{gen_planted, gen_random};
use subsum::greedy::solve_greedy_within;
use subsum::randomized::solve_probabilistic_within;
use subsum::{
    decode_position, Budget, ColorCodingConfig, EnumerationConfig, GenSpec, GreedyConfig, Instance,
    ProbeConfig, Result, SubsetSolution,
};

use crate::report::{Mode, ModeConfig, Outcome, ReportedSolution, RunReport};

pub const DEFAULT_REPEATS: usize = 100;
pub const DEFAULT_PIECE_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub mode: Mode,
    /// Largest n the exhaustive modes will expand.
    pub max_n: usize,
    pub solution_limit: Option<usize>,
    /// Defaults to `min(n, 20)`.
    pub piece: Option<usize>,
    pub repeats: usize,
    pub seed: u64,
    /// Defaults to n.
    pub rounds: Option<usize>,
    pub beam: Option<usize>,
    pub time_limit: Option<Duration>,
}

impl SolveOptions {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            max_n: DEFAULT_MAX_N,
            solution_limit: None,
            piece: None,
            repeats: DEFAULT_REPEATS,
            seed: 0,
            rounds: None,
            beam: None,
            time_limit: None,
        }
    }

    fn budget(&self) -> Budget {
        self.time_limit
            .map_or_else(Budget::unlimited, Budget::with_limit)
    }
}

/// Runs the selected solver. Solver errors, including a blown time limit,
/// come back as `Err`.
pub fn solve(instance: &Instance, opts: &SolveOptions) -> Result<RunReport> {
    let budget = opts.budget();
    let n = instance.len();
    let mut counters = BTreeMap::new();
    let mut solutions: Vec<ReportedSolution> = Vec::new();
    let mut truncated = false;
    let mut variance = None;
    let mut seed = None;

    let start = Instant::now();
    let (outcome, config) = match opts.mode {
        Mode::All => {
            let config = EnumerationConfig {
                max_n: opts.max_n,
                chunk_size: DEFAULT_CHUNK_SIZE,
                solution_limit: opts.solution_limit,
            };
            let found = solve_all_within(instance, &config, &budget)?;
            counters.insert("residuals".into(), found.stats.residuals);
            counters.insert("blocks".into(), found.stats.blocks);
            counters.insert("peak_residuals".into(), found.stats.peak_residuals as u64);
            solutions.extend(found.solutions.iter().map(ReportedSolution::from));
            truncated = found.truncated;
            let outcome = if solutions.is_empty() {
                Outcome::Failure
            } else {
                Outcome::Solved
            };
            let echo = ModeConfig::All {
                max_n: config.max_n,
                chunk_size: config.chunk_size,
                solution_limit: config.solution_limit,
            };
            (outcome, echo)
        }
        Mode::Prob => {
            let mut config = ProbeConfig::new(
                opts.piece.unwrap_or(n.min(DEFAULT_PIECE_CAP)),
                opts.repeats,
                opts.seed,
            );
            config.max_n = opts.max_n;
            let out = solve_probabilistic_within(instance, &config, &budget)?;
            counters.insert("rounds_used".into(), out.rounds_used as u64);
            counters.insert("residuals".into(), out.residuals);
            seed = Some(opts.seed);
            solutions.extend(out.solution.as_ref().map(ReportedSolution::from));
            let outcome = if out.solution.is_some() {
                Outcome::Solved
            } else {
                Outcome::Failure
            };
            let echo = ModeConfig::Prob {
                piece_length: config.piece_length,
                repeat_times: config.repeat_times,
            };
            (outcome, echo)
        }
        Mode::Greedy => {
            let config = GreedyConfig {
                round_bound: opts.rounds.unwrap_or(n),
                beam_limit: opts.beam,
            };
            let out = solve_greedy_within(instance, &config, &budget)?;
            counters.insert("rounds_used".into(), out.rounds_used as u64);
            counters.insert("peak_residuals".into(), out.peak_residuals as u64);
            counters.insert("candidates".into(), out.candidates);
            solutions.extend(out.solution.as_ref().map(ReportedSolution::from));
            variance = out.variance;
            truncated = !out.exhaustive;
            let outcome = if out.solution.is_some() {
                Outcome::Solved
            } else {
                Outcome::Failure
            };
            let echo = ModeConfig::Greedy {
                round_bound: config.round_bound,
                beam_limit: config.beam_limit,
            };
            (outcome, echo)
        }
        Mode::Dp => {
            let decision = bellman_within(instance, &budget)?;
            counters.insert("cells".into(), decision.cells);
            let outcome = if decision.reachable {
                Outcome::Reachable
            } else {
                Outcome::Unreachable
            };
            (outcome, ModeConfig::Dp {})
        }
    };
    let wall_micros = start.elapsed().as_micros() as u64;

    let report = RunReport {
        mode: opts.mode,
        digest: instance.digest(),
        n,
        target: instance.target(),
        outcome,
        solutions,
        truncated,
        variance,
        wall_micros,
        counters,
        config,
        seed,
    };
    report.validate(instance)?;
    Ok(report)
}

/// Sidecar written next to a planted instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub digest: String,
    pub seed: u64,
    pub indices: Vec<usize>,
    pub values: Vec<i64>,
}

impl Witness {
    pub fn new(instance: &Instance, seed: u64, solution: &SubsetSolution) -> Self {
        Self {
            digest: instance.digest(),
            seed,
            indices: solution.indices().to_vec(),
            values: solution.values().to_vec(),
        }
    }
}

pub fn generate(spec: &GenSpec) -> Result<(Instance, Option<Witness>)> {
    match spec.planted_size {
        None => Ok((gen_random(spec)?, None)),
        Some(_) => {
            let (instance, solution) = gen_planted(spec)?;
            let witness = Witness::new(&instance, spec.seed, &solution);
            Ok((instance, Some(witness)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumsetReport {
    pub target: usize,
    pub k: usize,
    pub delta: f64,
    pub seed: u64,
    pub rounds: usize,
    pub additions: u64,
    pub sums: Vec<u64>,
}

pub fn sumset_cover(z: &[u64], target: usize, config: &ColorCodingConfig) -> Result<SumsetReport> {
    let run = color_coding(z, target, config)?;
    Ok(SumsetReport {
        target,
        k: config.k,
        delta: config.delta,
        seed: config.seed,
        rounds: run.rounds,
        additions: run.additions,
        sums: run.sums.iter().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Small end-to-end checks against known answers.
pub fn selftest() -> Vec<Check> {
    let mut checks = Vec::new();
    let mut record = |name, outcome: std::result::Result<String, String>| {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        checks.push(Check {
            name,
            passed,
            detail,
        });
    };

    record("enumerate (5; 1 2 3 4)", check_enumeration());
    record("decode positions 14, 9, 5", check_decoding());
    record("greedy (24; 1..8)", check_greedy());
    record("dp (1; 2 3)", check_dp());
    record("probe planted instances", check_probe());
    record("color coding Z={1,2,4}", check_color_coding());
    checks
}

fn check_enumeration() -> std::result::Result<String, String> {
    let instance = Instance::new(5, vec![1, 2, 3, 4]).map_err(|e| e.to_string())?;
    let report = solve(&instance, &SolveOptions::new(Mode::All)).map_err(|e| e.to_string())?;
    let mut sets: Vec<_> = report.solutions.iter().map(|s| s.indices.clone()).collect();
    sets.sort();
    if sets == vec![vec![1, 4], vec![2, 3]] {
        Ok("{1,4} and {2,3}".into())
    } else {
        Err(format!("got {sets:?}"))
    }
}

fn check_decoding() -> std::result::Result<String, String> {
    let want: [(u64, &[usize]); 3] = [(14, &[1, 3, 4]), (9, &[4]), (5, &[3])];
    for (k, expected) in want {
        let got = decode_position(k, 4).map_err(|e| e.to_string())?;
        if got != expected {
            return Err(format!("k={k}: got {got:?}"));
        }
    }
    Ok("{1,3,4}, {4}, {3}".into())
}

fn check_greedy() -> std::result::Result<String, String> {
    let instance = Instance::new(24, (1..=8).collect()).map_err(|e| e.to_string())?;
    let report = solve(&instance, &SolveOptions::new(Mode::Greedy)).map_err(|e| e.to_string())?;
    let values = report.solutions.first().map(|s| s.values.clone());
    let variance = report.variance.unwrap_or(f64::NAN);
    if values == Some(vec![4, 5, 7, 8]) && (variance - 3.3333).abs() <= 1e-4 {
        Ok(format!("8 7 5 4, variance {variance:.4}"))
    } else {
        Err(format!("got {values:?}, variance {variance}"))
    }
}

fn check_dp() -> std::result::Result<String, String> {
    let instance = Instance::new(1, vec![2, 3]).map_err(|e| e.to_string())?;
    let report = solve(&instance, &SolveOptions::new(Mode::Dp)).map_err(|e| e.to_string())?;
    match report.outcome {
        Outcome::Unreachable => Ok("no".into()),
        other => Err(format!("got {other:?}")),
    }
}

fn check_probe() -> std::result::Result<String, String> {
    let mut solved = 0;
    for seed in 0..20 {
        let spec = GenSpec::planted(12, 16, 3, seed);
        let (instance, _) = gen_planted(&spec).map_err(|e| e.to_string())?;
        let mut opts = SolveOptions::new(Mode::Prob);
        opts.piece = Some(8);
        opts.repeats = 200;
        opts.seed = seed;
        let report = solve(&instance, &opts).map_err(|e| e.to_string())?;
        solved += usize::from(report.outcome == Outcome::Solved);
    }
    if solved >= 18 {
        Ok(format!("{solved}/20 solved"))
    } else {
        Err(format!("only {solved}/20 solved"))
    }
}

fn check_color_coding() -> std::result::Result<String, String> {
    let config = ColorCodingConfig {
        k: 3,
        delta: 0.1,
        seed: 7,
    };
    let report = sumset_cover(&[1, 2, 4], 7, &config).map_err(|e| e.to_string())?;
    if report.sums.iter().all(|&s| s <= 7) && report.sums.contains(&0) {
        Ok(format!(
            "{} of 8 sums in {} rounds",
            report.sums.len(),
            report.rounds
        ))
    } else {
        Err(format!("got {:?}", report.sums))
    }
}
