use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use subsum::{ErrorKind, GenSpec};

use crate::commands::{solve, SolveOptions, DEFAULT_REPEATS};
use crate::report::{Mode, Outcome};

pub const CSV_HEADER: [&str; 8] = [
    "mode",
    "n",
    "bit_length",
    "trial",
    "seed",
    "outcome",
    "millis",
    "ops",
];

pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, PartialEq)]
pub struct BenchPlan {
    pub n_values: Vec<usize>,
    pub modes: Vec<Mode>,
    pub trials: usize,
    pub bit_length: u32,
    pub seed: u64,
    pub time_limit: Duration,
    pub piece: Option<usize>,
    pub repeats: usize,
    pub max_n: usize,
}

impl BenchPlan {
    pub fn new(n_values: Vec<usize>, modes: Vec<Mode>, trials: usize) -> Self {
        Self {
            n_values,
            modes,
            trials,
            bit_length: 20,
            seed: 0,
            time_limit: DEFAULT_TIME_LIMIT,
            piece: None,
            repeats: DEFAULT_REPEATS,
            max_n: subsum::enumerative::DEFAULT_MAX_N,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub mode: Mode,
    pub n: usize,
    pub bit_length: u32,
    pub trial: usize,
    pub seed: u64,
    /// solution, failure, timeout, resource or precondition.
    pub outcome: String,
    pub millis: f64,
    /// Mode-specific work counter; empty when the run did not finish.
    pub ops: Option<u64>,
}

/// Instance seed for one (n, trial) cell. Every mode sees the same instance.
pub fn row_seed(base: u64, n: usize, trial: usize) -> u64 {
    splitmix(base ^ splitmix(((n as u64) << 32) | trial as u64))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn run_trial(plan: &BenchPlan, mode: Mode, n: usize, trial: usize) -> BenchRow {
    let seed = row_seed(plan.seed, n, trial);
    let mut row = BenchRow {
        mode,
        n,
        bit_length: plan.bit_length,
        trial,
        seed,
        outcome: String::new(),
        millis: 0.0,
        ops: None,
    };
    let instance = match subsum::gen::gen_random(&GenSpec::random(n, plan.bit_length, seed)) {
        Ok(instance) => instance,
        Err(e) => {
            row.outcome = outcome_for_error(e.kind()).into();
            return row;
        }
    };

    let opts = SolveOptions {
        max_n: plan.max_n,
        piece: plan.piece,
        repeats: plan.repeats,
        seed,
        time_limit: Some(plan.time_limit),
        ..SolveOptions::new(mode)
    };
    let start = std::time::Instant::now();
    let result = solve(&instance, &opts);
    row.millis = (start.elapsed().as_secs_f64() * 1e6).round() / 1e3;
    match result {
        Ok(report) => {
            row.outcome = match report.outcome {
                Outcome::Solved | Outcome::Reachable => "solution",
                Outcome::Failure | Outcome::Unreachable => "failure",
            }
            .into();
            let key = match mode {
                Mode::All | Mode::Prob => "residuals",
                Mode::Greedy => "candidates",
                Mode::Dp => "cells",
            };
            row.ops = report.counters.get(key).copied();
        }
        Err(e) => row.outcome = outcome_for_error(e.kind()).into(),
    }
    row
}

fn outcome_for_error(kind: ErrorKind) -> &'static str {
    match kind {
        ErrorKind::Timeout => "timeout",
        ErrorKind::Resource => "resource",
        ErrorKind::Precondition => "precondition",
        ErrorKind::Usage | ErrorKind::Parse => "invalid",
    }
}

/// CSV writer that emits the header only when the destination is empty.
pub struct Sink<W: Write> {
    writer: csv::Writer<W>,
}

impl<W: Write> Sink<W> {
    pub fn new(inner: W, write_header: bool) -> io::Result<Self> {
        let mut writer = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(inner);
        if write_header {
            writer.write_record(CSV_HEADER)?;
            writer.flush()?;
        }
        Ok(Self { writer })
    }

    pub fn write(&mut self, row: &BenchRow) -> io::Result<()> {
        self.writer.serialize(row).map_err(io::Error::other)?;
        // Flush per row so an interrupted sweep keeps what it measured.
        self.writer.flush()
    }
}

pub fn append_to(path: &Path) -> io::Result<Sink<std::fs::File>> {
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let empty = file.metadata()?.len() == 0;
    Sink::new(file, empty)
}

/// Runs every (n, mode, trial) cell in order, calling `sink` per row.
pub fn run_bench<W: Write>(plan: &BenchPlan, sink: &mut Sink<W>) -> io::Result<usize> {
    let mut rows = 0;
    for &n in &plan.n_values {
        for &mode in &plan.modes {
            for trial in 0..plan.trials {
                sink.write(&run_trial(plan, mode, n, trial))?;
                rows += 1;
            }
        }
    }
    Ok(rows)
}
