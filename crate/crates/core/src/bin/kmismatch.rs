use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use kmismatch::decider::approx_bounded_hamming_decider;
use kmismatch::harness::{
    bench_sweep, generate_instance, judge_report, parse_grid, run_trials, write_bench_csv, PlantSpec, TrialAggregate,
    TrialOutcome, DEFAULT_ALPHABET,
};
use kmismatch::oracles::{counting_error_bound, hamming_distance, Distance};
use kmismatch::{
    approx_bounded_dist_matching, validate_instance, BackendHandle, BackendKind, ExecMode, MatcherConfig, QueryCounter,
    RngSeed,
};

#[derive(Parser)]
#[command(
    name = "kmismatch",
    version,
    about = "Simulated quantum approximate k-mismatch matching"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunOpts {
    #[arg(long, value_enum, default_value_t = BackendKind::Analytic)]
    backend: BackendKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
}

impl RunOpts {
    fn mode(&self) -> ExecMode {
        if self.sequential {
            ExecMode::Sequential
        } else {
            ExecMode::Parallel
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Search a text for a window within distance k of a pattern.
    Match {
        #[arg(long)]
        text: PathBuf,
        #[arg(long)]
        pattern: PathBuf,
        #[arg(short = 'k')]
        k: i64,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Run the Hamming gap decider on two equal-length strings.
    Decide {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(short = 'k')]
        k: i64,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Histogram of counting estimates for t marked labels out of n.
    Count {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        t: u64,
        #[arg(long = "m-param")]
        m_param: u64,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Generate a random instance with a planted structure.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(short = 'k')]
        k: i64,
        #[arg(long)]
        eps: f64,
        /// `match:D@J` or `none:D`.
        #[arg(long)]
        plant: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ALPHABET)]
        alphabet: u8,
        /// Output prefix; writes PREFIX.text, PREFIX.pattern and PREFIX.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep a parameter grid and write a CSV table.
    Bench {
        /// e.g. `n=1024;m=256;k=4,16,64;eps=1`.
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = BackendKind::Analytic)]
        backend: BackendKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        sequential: bool,
    },
}

fn read_bytes(path: &Path) -> anyhow::Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn emit<T: Serialize>(out: &mut impl Write, value: &T) -> anyhow::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Match {
            text,
            pattern,
            k,
            eps,
            run,
        } => {
            let inst = validate_instance(&read_bytes(&text)?, &read_bytes(&pattern)?, k, eps)?;
            let backend = BackendHandle::of_kind(run.backend);
            let cfg = MatcherConfig::default();
            let reports = run_trials(run.trials, RngSeed::new(run.seed), run.mode(), |_, s| {
                approx_bounded_dist_matching(&inst, &backend, &cfg, s)
            })?;
            for r in &reports {
                emit(&mut out, r)?;
            }
            let outcomes: Vec<TrialOutcome> = reports.iter().map(|r| judge_report(&inst, r)).collect();
            emit(
                &mut out,
                &json!({ "aggregate": TrialAggregate::from_outcomes(&outcomes) }),
            )?;
        }
        Command::Decide { x, y, k, eps, run } => {
            if k <= 0 {
                return Err(kmismatch::Error::NonPositiveK(k).into());
            }
            let (x, y) = (read_bytes(&x)?, read_bytes(&y)?);
            let backend = BackendHandle::of_kind(run.backend);
            let answers = run_trials(run.trials, RngSeed::new(run.seed), run.mode(), |_, s| {
                let mut counter = QueryCounter::new();
                let yes = approx_bounded_hamming_decider(&x, &y, k as u64, eps, &backend, &mut s.rng(), &mut counter)?;
                Ok((yes, counter.oracle_queries, s))
            })?;
            for (yes, queries, seed) in &answers {
                emit(
                    &mut out,
                    &json!({ "answer": yes, "queries": queries, "backend": run.backend, "seed": seed }),
                )?;
            }
            let distance = match hamming_distance(&x, &y) {
                Distance::Finite(d) => Some(d),
                Distance::Infinite => None,
            };
            let yes_count = answers.iter().filter(|a| a.0).count();
            emit(
                &mut out,
                &json!({ "aggregate": { "trials": answers.len(), "yes_count": yes_count, "distance": distance } }),
            )?;
        }
        Command::Count { n, t, m_param, run } => {
            let backend = BackendHandle::of_kind(run.backend);
            if n < 2 || t > n {
                return Err(
                    kmismatch::Error::InvalidConfig(format!("need 2 ≤ n and t ≤ n, got n = {n}, t = {t}")).into(),
                );
            }
            let dist = backend.count_distribution(n, t, m_param)?;
            let samples = run_trials(run.trials, RngSeed::new(run.seed), run.mode(), |_, s| {
                Ok(dist.sample(&mut s.rng()).0)
            })?;
            let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
            for y in samples {
                *histogram.entry(y).or_default() += 1;
            }
            let m_eff = backend.effective_m(m_param);
            let bound = counting_error_bound(n, t, m_eff, 1);
            let mut within = 0;
            let rows: Vec<_> = histogram
                .iter()
                .map(|(&y, &count)| {
                    let estimate = dist.estimate(y);
                    if (estimate - t as f64).abs() <= bound {
                        within += count;
                    }
                    json!({ "y": y, "estimate": estimate, "count": count })
                })
                .collect();
            emit(
                &mut out,
                &json!({
                    "n": n, "t": t, "m_param": m_eff, "backend": run.backend, "seed": run.seed,
                    "trials": run.trials, "queries_per_trial": m_eff, "error_bound": bound,
                    "within_bound": within, "histogram": rows,
                }),
            )?;
        }
        Command::Gen {
            n,
            m,
            k,
            eps,
            plant,
            seed,
            alphabet,
            out: prefix,
        } => {
            let plant: PlantSpec = plant.parse()?;
            if k <= 0 {
                return Err(kmismatch::Error::NonPositiveK(k).into());
            }
            let g = generate_instance(n, m, k as u64, eps, plant, alphabet, RngSeed::new(seed))?;
            fs::write(with_suffix(&prefix, ".text"), g.instance.text())?;
            fs::write(with_suffix(&prefix, ".pattern"), g.instance.pattern())?;
            let sidecar = serde_json::to_string_pretty(&g.sidecar())?;
            fs::write(with_suffix(&prefix, ".json"), sidecar + "\n")?;
            emit(&mut out, &g.sidecar())?;
        }
        Command::Bench {
            grid,
            trials,
            out: path,
            backend,
            seed,
            sequential,
        } => {
            let grid = parse_grid(&grid)?;
            let mode = if sequential {
                ExecMode::Sequential
            } else {
                ExecMode::Parallel
            };
            let rows = bench_sweep(
                &grid,
                trials,
                &BackendHandle::of_kind(backend),
                RngSeed::new(seed),
                mode,
            )?;
            let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            write_bench_csv(&rows, file)?;
            for row in &rows {
                emit(&mut out, row)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<kmismatch::Error>() {
                Some(e) if e.is_validation() => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
