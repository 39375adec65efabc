//! Command-line front end for the `subsum` solvers: solve instances, generate
//! them, and sweep runtimes into CSV.

pub mod bench;
pub mod commands;
pub mod report;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use subsum::{ColorCodingConfig, ErrorKind, GenSpec, Instance};

use crate::bench::BenchPlan;
use crate::commands::{SolveOptions, DEFAULT_REPEATS};
use crate::report::Mode;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NO_SOLUTION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;
pub const EXIT_RESOURCE: u8 = 4;

/// Overrides the largest n the exhaustive modes will expand.
pub const MAX_N_ENV: &str = "SUBSUM_MAX_N";

#[derive(Debug, Parser)]
#[command(
    name = "subsum",
    version,
    about = "Exact and heuristic subset-sum solvers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance read from a file or stdin.
    Solve(SolveArgs),
    /// Generate a random or planted instance.
    Gen(GenArgs),
    /// Time solvers over a range of n and write CSV rows.
    Bench(BenchArgs),
    /// Run built-in checks against known answers.
    Selftest,
    /// Capped subset sums of a set by color coding.
    SumsetCover(SumsetArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance file, text or JSON. Reads stdin when absent or "-".
    pub path: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::All)]
    pub mode: Mode,
    /// Piece length for prob mode [default: min(n, 20)].
    #[arg(long)]
    pub piece: Option<usize>,
    /// Number of pieces tried in prob mode.
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Round bound for greedy mode [default: n].
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Cap on live residuals per greedy round.
    #[arg(long)]
    pub beam: Option<usize>,
    /// Stop after this many solutions in all mode.
    #[arg(long)]
    pub limit: Option<usize>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Print the JSON report instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    /// Weights are drawn from [1, 2^bits - 1].
    #[arg(long, default_value_t = 20)]
    pub bits: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Plant a solution of this size and set the target to its sum.
    #[arg(long)]
    pub planted: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Witness sidecar path [default: <out>.witness.json, or stderr].
    #[arg(long)]
    pub witness: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 8)]
    pub n_min: usize,
    #[arg(long, default_value_t = 24)]
    pub n_max: usize,
    #[arg(long, default_value_t = 1)]
    pub n_step: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub modes: Vec<Mode>,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 20)]
    pub bits: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-run limit in seconds; a run that hits it is recorded as a timeout.
    #[arg(long, default_value_t = 10.0)]
    pub time_limit: f64,
    #[arg(long)]
    pub piece: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    pub repeats: usize,
    /// CSV file to append to; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SumsetArgs {
    /// Distinct positive integers, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub z: Vec<u64>,
    #[arg(long)]
    pub target: usize,
    /// Largest solution size to recover with high probability.
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

/// An error that ends the process with `code`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(path: &Path, err: io::Error) -> Self {
        Self {
            code: EXIT_RESOURCE,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl From<subsum::Error> for Failure {
    fn from(e: subsum::Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Usage | ErrorKind::Parse => EXIT_USAGE,
            ErrorKind::Precondition => EXIT_PRECONDITION,
            ErrorKind::Resource | ErrorKind::Timeout => EXIT_RESOURCE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self {
            code: EXIT_RESOURCE,
            message: e.to_string(),
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Solve(args) => cmd_solve(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Selftest => Ok(cmd_selftest()),
        Command::SumsetCover(args) => cmd_sumset_cover(args),
    }
}

fn max_n_from_env() -> Result<usize, Failure> {
    match std::env::var(MAX_N_ENV) {
        Err(_) => Ok(subsum::enumerative::DEFAULT_MAX_N),
        Ok(raw) => raw
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("{MAX_N_ENV}={raw:?} is not a count"))),
    }
}

fn seconds(value: f64, flag: &str) -> Result<Duration, Failure> {
    Duration::try_from_secs_f64(value)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| Failure::usage(format!("{flag} must be a positive number of seconds")))
}

fn read_instance(path: Option<&Path>) -> Result<Instance, Failure> {
    let text = match path {
        Some(p) if p != Path::new("-") => {
            fs::read_to_string(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?
        }
        _ => {
            let mut buf = String::new();
            io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    Ok(Instance::parse_any(&text)?)
}

fn cmd_solve(args: SolveArgs) -> Result<u8, Failure> {
    let instance = read_instance(args.path.as_deref())?;
    let opts = SolveOptions {
        mode: args.mode,
        max_n: max_n_from_env()?,
        solution_limit: args.limit,
        piece: args.piece,
        repeats: args.repeats,
        seed: args.seed,
        rounds: args.rounds,
        beam: args.beam,
        time_limit: args
            .time_limit
            .map(|s| seconds(s, "--time-limit"))
            .transpose()?,
    };
    let report = commands::solve(&instance, &opts)?;
    if args.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render_text());
    }
    Ok(report.exit_code())
}

fn cmd_gen(args: GenArgs) -> Result<u8, Failure> {
    let spec = GenSpec {
        n: args.n,
        bit_length: args.bits,
        planted_size: args.planted,
        seed: args.seed,
    };
    let (instance, witness) = commands::generate(&spec)?;
    let body = match args.format {
        Format::Text => instance.to_text(),
        Format::Json => instance.to_json() + "\n",
    };
    match &args.out {
        Some(path) => fs::write(path, body).map_err(|e| Failure::io(path, e))?,
        None => print!("{body}"),
    }

    if let Some(witness) = witness {
        let json = serde_json::to_string_pretty(&witness).expect("witness serializes") + "\n";
        let sidecar = args.witness.clone().or_else(|| {
            args.out.as_ref().map(|p| {
                let mut name = p.clone().into_os_string();
                name.push(".witness.json");
                PathBuf::from(name)
            })
        });
        match sidecar {
            Some(path) => fs::write(&path, json).map_err(|e| Failure::io(&path, e))?,
            None => eprint!("{json}"),
        }
    }
    Ok(EXIT_OK)
}

fn cmd_bench(args: BenchArgs) -> Result<u8, Failure> {
    if args.n_step == 0 || args.n_min == 0 || args.n_min > args.n_max {
        return Err(Failure::usage(
            "need 1 <= --n-min <= --n-max and --n-step >= 1",
        ));
    }
    let plan = BenchPlan {
        n_values: (args.n_min..=args.n_max).step_by(args.n_step).collect(),
        modes: args.modes,
        trials: args.trials,
        bit_length: args.bits,
        seed: args.seed,
        time_limit: seconds(args.time_limit, "--time-limit")?,
        piece: args.piece,
        repeats: args.repeats,
        max_n: max_n_from_env()?,
    };
    GenSpec::random(args.n_max, plan.bit_length, 0).validate()?;

    match &args.out {
        Some(path) => {
            let mut sink = bench::append_to(path).map_err(|e| Failure::io(path, e))?;
            bench::run_bench(&plan, &mut sink).map_err(|e| Failure::io(path, e))?;
        }
        None => {
            let mut sink = bench::Sink::new(io::stdout().lock(), true)?;
            bench::run_bench(&plan, &mut sink)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_selftest() -> u8 {
    let checks = commands::selftest();
    let mut out = io::stdout().lock();
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{status}  {}: {}", c.name, c.detail);
    }
    if checks.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        EXIT_NO_SOLUTION
    }
}

fn cmd_sumset_cover(args: SumsetArgs) -> Result<u8, Failure> {
    let config = ColorCodingConfig {
        k: args.k,
        delta: args.delta,
        seed: args.seed,
    };
    let report = commands::sumset_cover(&args.z, args.target, &config)?;
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        let sums: Vec<String> = report.sums.iter().map(u64::to_string).collect();
        println!("{}", sums.join(" "));
        println!("rounds {}", report.rounds);
        println!("additions {}", report.additions);
    }
    Ok(EXIT_OK)
}
