//! Planted-instance generation, seeded Monte Carlo trials and query-scaling
//! sweeps for the matcher.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::backend::BackendHandle;
use crate::error::{Error, Result};
use crate::matcher::{approx_bounded_dist_matching, MatchReport, MatcherConfig};
use crate::oracles::{brute_force_kmismatch, min_window_distance, window_distance};
use crate::par::{map_indexed, ExecMode};
use crate::types::{validate_instance, MatchInstance, RngSeed};

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.5758293035489004;

/// Attempts before a rejection-sampled plant is declared infeasible.
const MAX_PLANT_ATTEMPTS: usize = 200;

/// Requested structure of a generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlantSpec {
    /// A window at `position` with exactly `distance` mismatches.
    MatchAt { distance: u64, position: usize },
    /// Every window has more than `distance` mismatches.
    NoneBelow { distance: u64 },
}

impl fmt::Display for PlantSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlantSpec::MatchAt { distance, position } => write!(f, "match:{distance}@{position}"),
            PlantSpec::NoneBelow { distance } => write!(f, "none:{distance}"),
        }
    }
}

impl FromStr for PlantSpec {
    type Err = Error;

    /// Accepts `match:D@J` / `match-at-distance-D@J` and `none:D` /
    /// `none-above-distance-D`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("unrecognised plant spec {s:?}"));
        let num = |v: &str| v.trim().parse::<u64>().map_err(|_| bad());
        if let Some(rest) = s
            .strip_prefix("match:")
            .or_else(|| s.strip_prefix("match-at-distance-"))
        {
            let (d, j) = rest.split_once('@').ok_or_else(bad)?;
            Ok(PlantSpec::MatchAt {
                distance: num(d)?,
                position: num(j)? as usize,
            })
        } else if let Some(rest) = s
            .strip_prefix("none:")
            .or_else(|| s.strip_prefix("none-above-distance-"))
        {
            Ok(PlantSpec::NoneBelow { distance: num(rest)? })
        } else {
            Err(bad())
        }
    }
}

/// A generated instance with the facts established by exhaustive scan.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub instance: MatchInstance,
    pub plant: PlantSpec,
    pub seed: RngSeed,
    pub alphabet: u8,
    pub verified_min_distance: u64,
}

/// Contents of the JSON sidecar written next to instance files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSidecar {
    pub n: usize,
    pub m: usize,
    pub k: u64,
    pub epsilon: f64,
    pub plant: String,
    pub seed: RngSeed,
    pub verified_min_distance: u64,
}

impl GeneratedInstance {
    pub fn sidecar(&self) -> InstanceSidecar {
        InstanceSidecar {
            n: self.instance.n(),
            m: self.instance.m(),
            k: self.instance.k(),
            epsilon: self.instance.epsilon().value(),
            plant: self.plant.to_string(),
            seed: self.seed,
            verified_min_distance: self.verified_min_distance,
        }
    }
}

fn symbol(i: u8, alphabet: u8) -> u8 {
    if alphabet <= 26 {
        b'A' + i
    } else {
        i
    }
}

fn random_string(len: usize, alphabet: u8, rng: &mut impl Rng) -> Vec<u8> {
    (0..len)
        .map(|_| symbol(rng.random_range(0..alphabet), alphabet))
        .collect()
}

/// Random text and pattern over `alphabet` symbols with the requested plant.
pub fn generate_instance(
    n: usize,
    m: usize,
    k: u64,
    epsilon: f64,
    plant: PlantSpec,
    alphabet: u8,
    seed: RngSeed,
) -> Result<GeneratedInstance> {
    if alphabet < 2 {
        return Err(Error::InfeasiblePlant(format!("alphabet of size {alphabet}")));
    }
    // Validate sizes and parameters before generating anything.
    validate_instance(&vec![0; n], &vec![0; m], k as i64, epsilon)?;
    let mut rng = seed.rng();
    let instance = match plant {
        PlantSpec::MatchAt { distance, position } => {
            if distance > m as u64 || position > n - m {
                return Err(Error::InfeasiblePlant(plant.to_string()));
            }
            let mut text = random_string(n, alphabet, &mut rng);
            let pattern = random_string(m, alphabet, &mut rng);
            text[position..position + m].copy_from_slice(&pattern);
            for i in sample(&mut rng, m, distance as usize) {
                let old = pattern[i];
                let mut new = old;
                while new == old {
                    new = symbol(rng.random_range(0..alphabet), alphabet);
                }
                text[position + i] = new;
            }
            validate_instance(&text, &pattern, k as i64, epsilon)?
        }
        PlantSpec::NoneBelow { distance } => {
            if distance >= m as u64 {
                return Err(Error::InfeasiblePlant(plant.to_string()));
            }
            let mut found = None;
            for _ in 0..MAX_PLANT_ATTEMPTS {
                let text = random_string(n, alphabet, &mut rng);
                let pattern = random_string(m, alphabet, &mut rng);
                let inst = validate_instance(&text, &pattern, k as i64, epsilon)?;
                if min_window_distance(&inst) > distance {
                    found = Some(inst);
                    break;
                }
            }
            found.ok_or_else(|| Error::InfeasiblePlant(format!("{plant} after {MAX_PLANT_ATTEMPTS} attempts")))?
        }
    };
    let verified_min_distance = min_window_distance(&instance);
    match plant {
        PlantSpec::MatchAt { distance, position } => {
            assert_eq!(window_distance(&instance, position), Some(distance));
        }
        PlantSpec::NoneBelow { distance } => assert!(verified_min_distance > distance),
    }
    Ok(GeneratedInstance {
        instance,
        plant,
        seed,
        alphabet,
        verified_min_distance,
    })
}

/// Result of one trial as judged by the classical recheck.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub success: bool,
    pub false_positive: bool,
    pub queries: u64,
}

/// Judges a matcher report against exact window distances.
///
/// With a window within `k`, success means flag 1 on a window within
/// `(1 + ε)k`. With every window beyond `(1 + ε)k`, success means flag 0.
/// Otherwise any output not flagged on a far window is acceptable.
pub fn judge_report(inst: &MatchInstance, report: &MatchReport) -> TrialOutcome {
    let eps = inst.epsilon();
    let close_enough = report
        .recheck_distance
        .is_some_and(|d| !eps.exceeds_relaxed(d, inst.k()));
    let false_positive = report.flag && !close_enough;
    let success = if brute_force_kmismatch(inst).is_some() {
        report.flag && close_enough
    } else if eps.exceeds_relaxed(min_window_distance(inst), inst.k()) {
        !report.flag
    } else {
        !false_positive
    };
    TrialOutcome {
        success,
        false_positive,
        queries: report.queries,
    }
}

/// Counts, mean query cost and a Wilson 99% interval for the success rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialAggregate {
    pub trials: u64,
    pub success_count: u64,
    pub false_positive_count: u64,
    pub mean_queries: f64,
    pub success_rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub half_width: f64,
}

/// Wilson score interval for `successes` out of `trials` at quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

impl TrialAggregate {
    pub fn from_outcomes(outcomes: &[TrialOutcome]) -> Self {
        assert!(!outcomes.is_empty());
        let trials = outcomes.len() as u64;
        let success_count = outcomes.iter().filter(|o| o.success).count() as u64;
        let false_positive_count = outcomes.iter().filter(|o| o.false_positive).count() as u64;
        let mean_queries = outcomes.iter().map(|o| o.queries as f64).sum::<f64>() / trials as f64;
        let (wilson_low, wilson_high) = wilson_interval(success_count, trials, Z_99);
        Self {
            trials,
            success_count,
            false_positive_count,
            mean_queries,
            success_rate: success_count as f64 / trials as f64,
            wilson_low,
            wilson_high,
            half_width: (wilson_high - wilson_low) / 2.0,
        }
    }

    pub fn false_positive_rate(&self) -> f64 {
        self.false_positive_count as f64 / self.trials as f64
    }
}

/// Runs `trials` independent trials; trial `i` gets stream `i` of `seed`.
pub fn run_trials<T, F>(trials: usize, seed: RngSeed, mode: ExecMode, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, RngSeed) -> Result<T> + Sync + Send,
{
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    map_indexed(trials, mode, |i| trial(i, seed.derive_stream(i as u64)))
        .into_iter()
        .collect()
}

/// Runs the matcher `trials` times on one instance and judges every report.
pub fn matcher_trials(
    inst: &MatchInstance,
    backend: &BackendHandle,
    cfg: &MatcherConfig,
    trials: usize,
    seed: RngSeed,
    mode: ExecMode,
) -> Result<(Vec<MatchReport>, TrialAggregate)> {
    let reports = run_trials(trials, seed, mode, |_, s| {
        approx_bounded_dist_matching(inst, backend, cfg, s)
    })?;
    let outcomes: Vec<TrialOutcome> = reports.iter().map(|r| judge_report(inst, r)).collect();
    Ok((reports, TrialAggregate::from_outcomes(&outcomes)))
}

/// One point of a parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n: usize,
    pub m: usize,
    pub k: u64,
    pub epsilon: f64,
}

/// Parses `n=1024;m=256;k=4,16,64;eps=1` into the cartesian product of the
/// listed values, in the order n, m, k, eps.
pub fn parse_grid(spec: &str) -> Result<Vec<GridPoint>> {
    let bad = |msg: &str| Error::InvalidConfig(format!("grid {spec:?}: {msg}"));
    let (mut ns, mut ms, mut ks, mut eps) = (vec![], vec![], vec![], vec![]);
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, values) = part.split_once('=').ok_or_else(|| bad("expected key=values"))?;
        let values: Vec<&str> = values.split(',').map(str::trim).collect();
        let ints = || -> Result<Vec<u64>> { values.iter().map(|v| v.parse::<u64>().map_err(|_| bad(v))).collect() };
        match key.trim() {
            "n" => ns = ints()?,
            "m" => ms = ints()?,
            "k" => ks = ints()?,
            "eps" | "epsilon" => {
                eps = values
                    .iter()
                    .map(|v| v.parse::<f64>().map_err(|_| bad(v)))
                    .collect::<Result<_>>()?
            }
            other => return Err(bad(other)),
        }
    }
    if ns.is_empty() || ms.is_empty() || ks.is_empty() || eps.is_empty() {
        return Err(bad("n, m, k and eps are all required"));
    }
    let mut grid = vec![];
    for &n in &ns {
        for &m in &ms {
            for &k in &ks {
                for &epsilon in &eps {
                    grid.push(GridPoint {
                        n: n as usize,
                        m: m as usize,
                        k,
                        epsilon,
                    });
                }
            }
        }
    }
    Ok(grid)
}

/// One row of a sweep table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub k: u64,
    pub epsilon: f64,
    pub trials: u64,
    pub success_rate: f64,
    pub false_positive_rate: f64,
    pub mean_queries: f64,
    pub normalized_queries: f64,
}

/// `ε⁻¹·√(mn/k)`.
pub fn query_scale(n: usize, m: usize, k: u64, epsilon: f64) -> f64 {
    ((m as f64) * (n as f64) / k as f64).sqrt() / epsilon
}

/// Alphabet used by sweeps.
pub const DEFAULT_ALPHABET: u8 = 4;

/// For every grid point, runs `trials` matcher trials, each on a fresh
/// instance with one window planted at distance `k` at a random position.
pub fn bench_sweep(
    grid: &[GridPoint],
    trials: usize,
    backend: &BackendHandle,
    seed: RngSeed,
    mode: ExecMode,
) -> Result<Vec<BenchRow>> {
    let cfg = MatcherConfig::default();
    grid.iter()
        .enumerate()
        .map(|(g, p)| {
            validate_instance(&vec![0; p.n], &vec![0; p.m], p.k as i64, p.epsilon)?;
            let point_seed = seed.derive_stream(g as u64);
            let outcomes = run_trials(trials, point_seed, mode, |_, s| {
                let position = s.derive_stream(2).rng().random_range(0..=p.n - p.m);
                let distance = p.k.min(p.m as u64);
                let generated = generate_instance(
                    p.n,
                    p.m,
                    p.k,
                    p.epsilon,
                    PlantSpec::MatchAt { distance, position },
                    DEFAULT_ALPHABET,
                    s.derive_stream(0),
                )?;
                let report = approx_bounded_dist_matching(&generated.instance, backend, &cfg, s.derive_stream(1))?;
                Ok(judge_report(&generated.instance, &report))
            })?;
            let agg = TrialAggregate::from_outcomes(&outcomes);
            Ok(BenchRow {
                n: p.n,
                m: p.m,
                k: p.k,
                epsilon: p.epsilon,
                trials: agg.trials,
                success_rate: agg.success_rate,
                false_positive_rate: agg.false_positive_rate(),
                mean_queries: agg.mean_queries,
                normalized_queries: agg.mean_queries / query_scale(p.n, p.m, p.k, p.epsilon),
            })
        })
        .collect()
}

/// Writes sweep rows as CSV with a header line.
pub fn write_bench_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{classify_position, TrichotomyLabel};

    #[test]
    fn plant_spec_round_trip() {
        for s in ["match:0@7", "none:8"] {
            assert_eq!(s.parse::<PlantSpec>().unwrap().to_string(), s);
        }
        assert_eq!(
            "match-at-distance-3@5".parse::<PlantSpec>().unwrap(),
            PlantSpec::MatchAt {
                distance: 3,
                position: 5
            }
        );
        assert_eq!(
            "none-above-distance-4".parse::<PlantSpec>().unwrap(),
            PlantSpec::NoneBelow { distance: 4 }
        );
        assert!("match:3".parse::<PlantSpec>().is_err());
        assert!("other:3".parse::<PlantSpec>().is_err());
    }

    #[test]
    fn exact_plant_is_found() {
        let plant = PlantSpec::MatchAt {
            distance: 0,
            position: 7,
        };
        let g = generate_instance(64, 16, 2, 1.0, plant, 4, RngSeed::new(1)).unwrap();
        let j = brute_force_kmismatch(&g.instance).unwrap();
        assert!(j <= 7);
        assert_eq!(g.verified_min_distance, 0);
        assert_eq!(&g.instance.text()[7..23], g.instance.pattern());
    }

    #[test]
    fn planted_distance_is_exact() {
        for d in [0u64, 1, 5, 16] {
            let plant = PlantSpec::MatchAt {
                distance: d,
                position: 30,
            };
            let g = generate_instance(100, 16, 4, 1.0, plant, 4, RngSeed::new(d)).unwrap();
            assert_eq!(window_distance(&g.instance, 30), Some(d));
            assert!(g.verified_min_distance <= d);
        }
    }

    #[test]
    fn none_plant_has_only_negative_windows() {
        let k = 4;
        let plant = PlantSpec::NoneBelow { distance: 2 * k };
        let g = generate_instance(256, 64, k, 1.0, plant, 4, RngSeed::new(2)).unwrap();
        let domain = g.instance.search_domain();
        for j in 0..domain {
            assert_eq!(classify_position(&g.instance, j, domain), TrichotomyLabel::Negative);
        }
        assert!(g.verified_min_distance > 2 * k);
    }

    #[test]
    fn infeasible_plants_are_rejected() {
        let s = RngSeed::new(0);
        let too_far = PlantSpec::MatchAt {
            distance: 17,
            position: 0,
        };
        assert!(matches!(
            generate_instance(64, 16, 1, 1.0, too_far, 4, s),
            Err(Error::InfeasiblePlant(_))
        ));
        let off_end = PlantSpec::MatchAt {
            distance: 0,
            position: 49,
        };
        assert!(matches!(
            generate_instance(64, 16, 1, 1.0, off_end, 4, s),
            Err(Error::InfeasiblePlant(_))
        ));
        let impossible = PlantSpec::NoneBelow { distance: 16 };
        assert!(matches!(
            generate_instance(64, 16, 1, 1.0, impossible, 4, s),
            Err(Error::InfeasiblePlant(_))
        ));
        // Binary alphabet, m = 4: some window is always within distance 1.
        let unlikely = PlantSpec::NoneBelow { distance: 3 };
        assert!(matches!(
            generate_instance(64, 4, 1, 1.0, unlikely, 2, s),
            Err(Error::InfeasiblePlant(_))
        ));
        let plant = PlantSpec::MatchAt {
            distance: 0,
            position: 0,
        };
        assert!(matches!(
            generate_instance(8, 16, 1, 1.0, plant, 4, s),
            Err(Error::PatternLongerThanText { .. })
        ));
    }

    #[test]
    fn same_seed_same_bytes() {
        let plant = PlantSpec::MatchAt {
            distance: 3,
            position: 11,
        };
        let a = generate_instance(200, 32, 4, 0.5, plant, 4, RngSeed::new(9)).unwrap();
        let b = generate_instance(200, 32, 4, 0.5, plant, 4, RngSeed::new(9)).unwrap();
        assert_eq!(a, b);
        let c = generate_instance(200, 32, 4, 0.5, plant, 4, RngSeed::new(10)).unwrap();
        assert_ne!(a.instance.text(), c.instance.text());
    }

    #[test]
    fn wilson_interval_examples() {
        let (lo, hi) = wilson_interval(0, 10, Z_99);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.3 && hi < 0.5);
        let (lo, hi) = wilson_interval(50, 100, Z_99);
        assert!((lo + hi - 1.0).abs() < 1e-12);
        assert!((hi - lo) / 2.0 < 0.13);
    }

    #[test]
    fn single_trial_aggregate_matches_report() {
        let g = generate_instance(
            64,
            16,
            2,
            1.0,
            PlantSpec::MatchAt {
                distance: 1,
                position: 3,
            },
            4,
            RngSeed::new(4),
        )
        .unwrap();
        let backend = BackendHandle::analytic();
        let cfg = MatcherConfig::default();
        let (reports, agg) =
            matcher_trials(&g.instance, &backend, &cfg, 1, RngSeed::new(5), ExecMode::Sequential).unwrap();
        let outcome = judge_report(&g.instance, &reports[0]);
        assert_eq!(agg.trials, 1);
        assert_eq!(agg.success_count, outcome.success as u64);
        assert_eq!(agg.mean_queries, reports[0].queries as f64);
    }

    #[test]
    fn short_circuit_trials_always_succeed() {
        let inst = validate_instance(b"ACGTTGCAACGT", b"ACGT", 4, 1.0).unwrap();
        let backend = BackendHandle::analytic();
        let (_, agg) = matcher_trials(
            &inst,
            &backend,
            &MatcherConfig::default(),
            25,
            RngSeed::new(6),
            ExecMode::Parallel,
        )
        .unwrap();
        assert_eq!(agg.success_count, 25);
        assert_eq!(agg.false_positive_count, 0);
    }

    #[test]
    fn modes_give_identical_trials() {
        let inst = validate_instance(b"ACGTTGCAACGTTTGA", b"TGCA", 1, 1.0).unwrap();
        let backend = BackendHandle::analytic();
        let cfg = MatcherConfig::default();
        let (a, _) = matcher_trials(&inst, &backend, &cfg, 16, RngSeed::new(7), ExecMode::Sequential).unwrap();
        let (b, _) = matcher_trials(&inst, &backend, &cfg, 16, RngSeed::new(7), ExecMode::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("n=1024;m=256;k=4,16,64;eps=1").unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(
            g[1],
            GridPoint {
                n: 1024,
                m: 256,
                k: 16,
                epsilon: 1.0
            }
        );
        assert_eq!(parse_grid("n=64;m=16;k=2;eps=0.5,1").unwrap().len(), 2);
        assert!(parse_grid("n=64;m=16;k=2").is_err());
        assert!(parse_grid("n=64;m=16;k=x;eps=1").is_err());
        assert!(parse_grid("n=64;m=16;k=2;eps=1;z=3").is_err());
    }

    #[test]
    fn bench_rows_and_csv() {
        let grid = parse_grid("n=64;m=16;k=2;eps=1").unwrap();
        let rows = bench_sweep(
            &grid,
            4,
            &BackendHandle::analytic(),
            RngSeed::new(8),
            ExecMode::Parallel,
        )
        .unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].trials, 4);
        let expected = rows[0].mean_queries / query_scale(64, 16, 2, 1.0);
        assert!((rows[0].normalized_queries - expected).abs() < 1e-12);
        let mut buf = vec![];
        write_bench_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(
            text.starts_with("n,m,k,epsilon,trials,success_rate,false_positive_rate,mean_queries,normalized_queries\n")
        );
    }
}
