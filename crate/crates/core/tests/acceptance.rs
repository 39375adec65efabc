//! Acceptance suite. Every criterion runs inside one test so the counting
//! allocator used by the memory criterion sees no concurrent test traffic.
//! Run with `cargo test -p subsum-core --test acceptance -- --nocapture` to
//! see the per-criterion report.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use subsum::baselines::{bellman_decides, brute_force_all, color_coding};
use subsum::enumerative::{solve_all, DEFAULT_CHUNK_SIZE, DEFAULT_MAX_N};
use subsum::gen::{gen_planted, gen_random};
use subsum::greedy::{sample_variance, solve_greedy, solve_greedy_within};
use subsum::randomized::solve_probabilistic;
use subsum::{
    decode_position, Budget, ColorCodingConfig, EnumerationConfig, GenSpec, GreedyConfig, Instance,
    ProbeConfig, SeededRng,
};

struct CountingAlloc;

static LIVE: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for CountingAlloc {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            let now = LIVE.fetch_add(layout.size(), Ordering::SeqCst) + layout.size();
            PEAK.fetch_max(now, Ordering::SeqCst);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        LIVE.fetch_sub(layout.size(), Ordering::SeqCst);
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = System.realloc(ptr, layout, new_size);
        if !p.is_null() {
            if new_size >= layout.size() {
                let now = LIVE.fetch_add(new_size - layout.size(), Ordering::SeqCst)
                    + (new_size - layout.size());
                PEAK.fetch_max(now, Ordering::SeqCst);
            } else {
                LIVE.fetch_sub(layout.size() - new_size, Ordering::SeqCst);
            }
        }
        p
    }
}

#[global_allocator]
static ALLOC: CountingAlloc = CountingAlloc;

/// Peak bytes allocated above the level at entry while `f` runs.
fn peak_bytes_during<T>(f: impl FnOnce() -> T) -> (T, usize) {
    let base = LIVE.load(Ordering::SeqCst);
    PEAK.store(base, Ordering::SeqCst);
    let out = f();
    (out, PEAK.load(Ordering::SeqCst) - base)
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn inst(t: i64, w: &[i64]) -> Instance {
    Instance::new(t, w.to_vec()).unwrap()
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c1_small_example() -> Outcome {
    let instance = inst(5, &[1, 2, 3, 4]);
    let start = Instant::now();
    let found = solve_all(&instance, &EnumerationConfig::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let mut sets: Vec<Vec<usize>> = found
        .solutions
        .iter()
        .map(|s| s.indices().to_vec())
        .collect();
    sets.sort();
    check(
        sets == vec![vec![1, 4], vec![2, 3]],
        format!("got {sets:?}"),
    )?;
    check(
        elapsed < Duration::from_millis(1),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!("solutions {sets:?} in {elapsed:?}"))
}

fn c2_decoding() -> Outcome {
    let cases = [(14u64, vec![1usize, 3, 4]), (9, vec![4]), (5, vec![3])];
    for (k, want) in &cases {
        let got = decode_position(*k, 4).map_err(|e| e.to_string())?;
        check(&got == want, format!("k={k}: got {got:?}, want {want:?}"))?;
    }
    Ok("k=14 -> {1,3,4}, k=9 -> {4}, k=5 -> {3}".into())
}

fn c3_greedy_table() -> Outcome {
    let out = solve_greedy(&inst(24, &[1, 2, 3, 4, 5, 6, 7, 8]), &GreedyConfig::new(8))
        .map_err(|e| e.to_string())?;
    let s = out.solution.ok_or("greedy failed on the table instance")?;
    check(
        s.values_descending() == vec![8, 7, 5, 4],
        format!("got {s}"),
    )?;
    let v = out.variance.unwrap();
    check((v - 3.3333).abs() <= 1e-4, format!("variance {v}"))?;

    let table: [(&[f64], f64); 10] = [
        (&[8., 7., 6., 2., 1.], 9.7000),
        (&[8., 7., 5., 3., 1.], 8.2000),
        (&[8., 6., 4., 3., 2., 1.], 6.8000),
        (&[8., 6., 5., 4., 1.], 6.7000),
        (&[8., 7., 4., 3., 2.], 6.7000),
        (&[8., 6., 5., 3., 2.], 5.7000),
        (&[7., 6., 5., 3., 2., 1.], 5.6000),
        (&[8., 7., 6., 3.], 4.6667),
        (&[7., 6., 5., 4., 2.], 3.7000),
        (&[8., 7., 5., 4.], 3.3333),
    ];
    for (row, want) in table {
        check(
            row.iter().sum::<f64>() == 24.0,
            format!("{row:?} does not sum to 24"),
        )?;
        let got = sample_variance(row).map_err(|e| e.to_string())?;
        check(
            (got - want).abs() <= 1e-4,
            format!("{row:?}: {got} vs {want}"),
        )?;
    }
    Ok(format!(
        "greedy -> {{8,7,5,4}}, s^2 = {v:.4}; 10/10 table rows match"
    ))
}

fn c4_oracle_equivalence() -> Outcome {
    let mut rng = SeededRng::seed_from_u64(0xC4);
    let trials = 300;
    let mut with_solutions = 0;
    for trial in 0..trials {
        let n = rng.gen_range(1..=16);
        let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(-50..=50)).collect();
        let target = if trial % 2 == 0 {
            // Solvable by construction: sum of a random non-empty subset.
            let mask: u32 = rng.gen_range(1..1 << n);
            (0..n)
                .filter(|&j| mask >> j & 1 == 1)
                .map(|j| weights[j])
                .sum()
        } else {
            rng.gen_range(-200..=200)
        };
        let instance = Instance::new(target, weights).unwrap();
        let fast =
            solve_all(&instance, &EnumerationConfig::default()).map_err(|e| e.to_string())?;
        let slow = brute_force_all(&instance).map_err(|e| e.to_string())?;
        let a: Vec<_> = fast
            .solutions
            .iter()
            .map(|s| s.indices().to_vec())
            .collect();
        let b: Vec<_> = slow.iter().map(|s| s.indices().to_vec()).collect();
        check(a == b, format!("trial {trial}: {instance:?}"))?;
        with_solutions += usize::from(!a.is_empty());
    }
    Ok(format!(
        "{trials} instances, 0 discrepancies ({with_solutions} solvable)"
    ))
}

fn c5_one_sided_error() -> Outcome {
    let mut rng = SeededRng::seed_from_u64(0xC5);
    let runs = 10_000;
    let (mut returned, mut solvable) = (0, 0);
    for run in 0..runs {
        let n = rng.gen_range(1..=12);
        let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(-30..=30)).collect();
        let target = if run % 2 == 0 {
            let mask: u32 = rng.gen_range(1..1 << n);
            (0..n)
                .filter(|&j| mask >> j & 1 == 1)
                .map(|j| weights[j])
                .sum()
        } else {
            rng.gen_range(-100..=100)
        };
        let instance = Instance::new(target, weights).unwrap();
        let cfg = ProbeConfig::new(rng.gen_range(1..=n), rng.gen_range(1..=20), rng.gen());
        let out = solve_probabilistic(&instance, &cfg).map_err(|e| e.to_string())?;
        let truth = brute_force_all(&instance).unwrap();
        solvable += usize::from(!truth.is_empty());
        if let Some(s) = out.solution {
            returned += 1;
            check(
                s.verify(&instance).is_ok(),
                format!("run {run}: invalid {s:?}"),
            )?;
            check(
                truth.contains(&s),
                format!("run {run}: {s:?} not in oracle set"),
            )?;
        }
    }

    let seeds = 100;
    let mut successes = 0;
    for seed in 0..seeds {
        let size = 1 + (seed as usize % 4);
        let (instance, _) = gen_planted(&GenSpec::planted(12, 16, size, seed)).unwrap();
        let out = solve_probabilistic(&instance, &ProbeConfig::new(8, 200, seed ^ 0xABCD))
            .map_err(|e| e.to_string())?;
        successes += usize::from(out.solution.is_some());
    }
    let rate = successes as f64 / seeds as f64;
    check(rate >= 0.9, format!("planted success rate {rate}"))?;
    Ok(format!(
        "{runs} runs ({solvable} solvable, {returned} returned), 0 invalid; planted success {rate:.2}"
    ))
}

fn c6_dp_cross_check() -> Outcome {
    let mut rng = SeededRng::seed_from_u64(0xC6);
    let trials = 300;
    let mut yes = 0;
    for trial in 0..trials {
        let n = rng.gen_range(1..=16);
        let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=60)).collect();
        let total: i64 = weights.iter().sum();
        let target = rng.gen_range(1..=total + 5);
        let instance = Instance::new(target, weights).unwrap();
        let dp = bellman_decides(&instance).map_err(|e| e.to_string())?;
        let all = solve_all(&instance, &EnumerationConfig::default()).map_err(|e| e.to_string())?;
        check(
            dp == !all.solutions.is_empty(),
            format!("trial {trial}: {instance:?}"),
        )?;
        yes += usize::from(dp);
    }
    Ok(format!("{trials} instances agree ({yes} reachable)"))
}

/// All subset sums of `z` within `[0, t]`, with the fewest elements reaching each.
fn min_witness_sizes(z: &[u64], t: u64) -> Vec<Option<u32>> {
    let mut best = vec![None; t as usize + 1];
    for mask in 0u32..1 << z.len() {
        let sum: u64 = (0..z.len())
            .filter(|&j| mask >> j & 1 == 1)
            .map(|j| z[j])
            .sum();
        if sum <= t {
            let size = mask.count_ones();
            let slot = &mut best[sum as usize];
            if slot.is_none_or(|s| size < s) {
                *slot = Some(size);
            }
        }
    }
    best
}

fn c7_color_coding() -> Outcome {
    let mut rng = SeededRng::seed_from_u64(0xC7);
    let trials = 10_000;
    for trial in 0..trials {
        let size = rng.gen_range(1..=10);
        let mut z: Vec<u64> = Vec::new();
        while z.len() < size {
            let v = rng.gen_range(1..=60);
            if !z.contains(&v) {
                z.push(v);
            }
        }
        let t = rng.gen_range(1..=150);
        let cfg = ColorCodingConfig {
            k: rng.gen_range(1..=4),
            delta: [0.1, 0.25, 0.5][rng.gen_range(0..3)],
            seed: rng.gen(),
        };
        let run = color_coding(&z, t, &cfg).map_err(|e| e.to_string())?;
        let truth = min_witness_sizes(&z, t as u64);
        for v in run.sums.iter() {
            check(
                truth[v as usize].is_some(),
                format!("trial {trial}: {v} is not a subset sum"),
            )?;
        }
    }

    let rounds = ColorCodingConfig {
        k: 1,
        delta: 0.25,
        seed: 0,
    }
    .rounds();
    check(rounds == 5, format!("rounds at delta=0.25: {rounds}"))?;

    let delta = 0.1;
    let reps = 500;
    let sigma = (delta * (1.0 - delta) / reps as f64).sqrt();
    let bound = delta + 3.0 * sigma;
    let mut families: Vec<(Vec<u64>, u64, usize)> = vec![
        (vec![3, 5, 7, 11, 13, 17, 19, 23, 29, 31], 60, 3),
        (vec![1, 2, 4, 8, 16, 32], 63, 6),
        (vec![6, 9, 10, 14, 15, 21, 22, 25], 50, 2),
    ];
    for _ in 0..5 {
        let size = rng.gen_range(2..=10);
        let mut z: Vec<u64> = Vec::new();
        while z.len() < size {
            let v = rng.gen_range(1..=40);
            if !z.contains(&v) {
                z.push(v);
            }
        }
        families.push((z, rng.gen_range(20..=120), rng.gen_range(2..=4)));
    }
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (z, t, k) in &families {
        let (z, t, k) = (z.as_slice(), *t, *k);
        let truth = min_witness_sizes(z, t);
        let targets: Vec<u64> = (0..=t)
            .filter(|&v| truth[v as usize].is_some_and(|s| s as usize <= k))
            .collect();
        let mut misses = vec![0usize; targets.len()];
        for seed in 0..reps {
            let cfg = ColorCodingConfig { k, delta, seed };
            let run = color_coding(z, t as usize, &cfg).map_err(|e| e.to_string())?;
            for (i, &v) in targets.iter().enumerate() {
                misses[i] += usize::from(!run.sums.contains(v));
            }
        }
        for (i, &m) in misses.iter().enumerate() {
            let rate = m as f64 / reps as f64;
            worst = worst.max(rate);
            check(
                rate <= bound,
                format!("Z={z:?}: sum {} missed at rate {rate}", targets[i]),
            )?;
        }
        checked += targets.len();
    }
    Ok(format!(
        "{trials} sound trials; 5 rounds at delta=0.25; worst miss rate {worst:.3} <= {bound:.3} over {checked} sums"
    ))
}

fn c8_performance() -> Outcome {
    let mut enum_times = Vec::new();
    for seed in 0..3 {
        let instance = gen_random(&GenSpec::random(24, 20, seed)).unwrap();
        let start = Instant::now();
        let found =
            solve_all(&instance, &EnumerationConfig::default()).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        check(
            elapsed <= Duration::from_secs(60),
            format!("n=24 seed {seed}: {elapsed:?}"),
        )?;
        check(
            found.solutions.iter().all(|s| s.verify(&instance).is_ok()),
            "bad solution",
        )?;
        enum_times.push(elapsed);
    }

    let mut slowest = Duration::ZERO;
    let mut found = 0;
    for seed in 0..20 {
        let instance = gen_random(&GenSpec::random(64, 20, seed)).unwrap();
        let budget = Budget::with_limit(Duration::from_secs(10));
        let start = Instant::now();
        let out = solve_greedy_within(&instance, &GreedyConfig::new(64), &budget)
            .map_err(|e| format!("greedy seed {seed}: {e}"))?;
        slowest = slowest.max(start.elapsed());
        found += usize::from(out.solution.is_some());
    }
    Ok(format!(
        "enumerative n=24: {:?}; greedy n=64: 20/20 within 10 s (slowest {slowest:?}, {found} solved)",
        enum_times
    ))
}

fn c9_memory() -> Outcome {
    let runs = [
        (22, 1usize << 12),
        (22, DEFAULT_CHUNK_SIZE),
        (26, DEFAULT_CHUNK_SIZE),
        (DEFAULT_MAX_N, DEFAULT_CHUNK_SIZE),
    ];
    let mut lines = Vec::new();
    for (n, chunk) in runs {
        let instance = gen_random(&GenSpec::random(n, 20, 9)).unwrap();
        let cfg = EnumerationConfig {
            chunk_size: chunk,
            ..Default::default()
        };
        let (found, peak) = peak_bytes_during(|| solve_all(&instance, &cfg));
        let found = found.map_err(|e| e.to_string())?;
        let residual_bytes = chunk * std::mem::size_of::<i64>();
        // Everything besides the block: zero positions and decoded solutions.
        let output_bytes = found.positions.capacity() * 8
            + found
                .solutions
                .iter()
                .map(|s| s.len() * 16 + 64)
                .sum::<usize>();
        let allowance = residual_bytes + output_bytes + 1024;
        check(
            found.stats.peak_residuals <= chunk,
            format!(
                "n={n}, chunk {chunk}: held {} residuals",
                found.stats.peak_residuals
            ),
        )?;
        check(
            peak <= allowance,
            format!("n={n}, chunk {chunk}: peak {peak} B exceeds {allowance} B"),
        )?;
        lines.push(format!(
            "n={n}, chunk {chunk}: peak {peak} B (block {residual_bytes} B)"
        ));
    }
    Ok(lines.join("; "))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("1 small example regression", c1_small_example),
        ("2 decoding regression", c2_decoding),
        ("3 greedy table regression", c3_greedy_table),
        ("4 oracle equivalence", c4_oracle_equivalence),
        ("5 one-sided error", c5_one_sided_error),
        ("6 DP cross-check", c6_dp_cross_check),
        ("7 color coding", c7_color_coding),
        ("8 performance", c8_performance),
        ("9 memory", c9_memory),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                println!("FAIL  criterion {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
