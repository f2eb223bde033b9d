//! Closed-form outcome distributions of Grover powers and of counting,
//! sampled directly so that search domains far beyond the statevector cap
//! keep exact statistics.

use std::f64::consts::PI;

use rand::Rng;

use crate::statevector::{EstimateDistribution, GroverOutcome};
use crate::types::{CountEstimate, QueryCounter};

/// Squared normalised Dirichlet kernel `|1/M Σ_y e^{2πi y d/M}|²`, where the
/// numerator `sin²(πd)` is passed in precomputed.
fn fejer(d: f64, m: f64, sin_sq_numerator: f64) -> f64 {
    let s = (PI * d / m).sin();
    if s.abs() < 1e-12 {
        1.0
    } else {
        sin_sq_numerator / (m * m * s * s)
    }
}

/// Exact phase-outcome distribution of counting with `m` phase outcomes for
/// `t` marked labels out of `domain`.
///
/// With `θ = asin(√(t/N))`, the start state splits evenly over the two
/// eigenvectors of the Grover iterate with phases `±θ/π`, so
/// `P(y) = ½F(y − Mθ/π) + ½F(y + Mθ/π)`.
pub fn counting_distribution(domain: u64, t: u64, m: u64) -> EstimateDistribution {
    assert!(t <= domain && m >= 2);
    let theta = (t as f64 / domain as f64).sqrt().asin();
    let mf = m as f64;
    let x = mf * theta / PI;
    // sin²(π(y ∓ x)) = sin²(πx) for integer y.
    let frac = x - x.round();
    let numerator = (PI * frac).sin().powi(2);
    let probs = (0..m)
        .map(|y| {
            let y = y as f64;
            0.5 * fejer(y - x, mf, numerator) + 0.5 * fejer(y + x, mf, numerator)
        })
        .collect();
    EstimateDistribution::new(domain, probs)
}

/// One counting sample; charges `m` oracle rounds.
pub fn analytic_count_sample<R: Rng + ?Sized>(
    domain: u64,
    t: u64,
    m: u64,
    rng: &mut R,
    counter: &mut QueryCounter,
) -> CountEstimate {
    let (_, t_prime) = counting_distribution(domain, t, m).sample(rng);
    counter.add_queries(m);
    CountEstimate { t_prime, queries: m }
}

/// `sin²((2j+1)·asin(√a))`.
pub fn amplified_success(good_mass: f64, iterations: u64) -> f64 {
    let theta = good_mass.clamp(0.0, 1.0).sqrt().asin();
    ((2 * iterations + 1) as f64 * theta).sin().powi(2)
}

/// Uniform label among those with `marked(label) == want`, given that
/// `class_size` such labels exist.
pub(crate) fn sample_uniform_in_class<R, P>(
    domain: usize,
    marked: P,
    want: bool,
    class_size: usize,
    rng: &mut R,
) -> usize
where
    R: Rng + ?Sized,
    P: Fn(usize) -> bool,
{
    assert!(class_size > 0, "empty class");
    if class_size * 64 >= domain {
        loop {
            let x = rng.random_range(0..domain);
            if marked(x) == want {
                return x;
            }
        }
    }
    let nth = rng.random_range(0..class_size);
    (0..domain)
        .filter(|&x| marked(x) == want)
        .nth(nth)
        .expect("class_size matches the predicate")
}

/// Samples the measurement after `Q^j` on a uniform preparation over `domain`
/// labels of which `t` satisfy `marked`; charges `j` oracle rounds.
pub fn analytic_grover_sample<R, P>(
    domain: usize,
    marked: P,
    t: usize,
    iterations: u64,
    rng: &mut R,
    counter: &mut QueryCounter,
) -> GroverOutcome
where
    R: Rng + ?Sized,
    P: Fn(usize) -> bool,
{
    let p = amplified_success(t as f64 / domain as f64, iterations);
    let flag = t > 0 && (t == domain || rng.random::<f64>() < p);
    let class = if flag { t } else { domain - t };
    let label = sample_uniform_in_class(domain, &marked, flag, class, rng);
    counter.add_queries(iterations);
    GroverOutcome { label, flag }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::RngSeed;

    #[test]
    fn grover_examples() {
        let mut rng = RngSeed::new(3).rng();
        let mut counter = QueryCounter::new();
        for _ in 0..50 {
            let out = analytic_grover_sample(16, |_| false, 0, 3, &mut rng, &mut counter);
            assert!(!out.flag);
            let out = analytic_grover_sample(4, |x| x == 2, 1, 1, &mut rng, &mut counter);
            assert_eq!(out, GroverOutcome { label: 2, flag: true });
        }
        assert_eq!(counter.oracle_queries, 50 * 4);
    }

    #[test]
    fn grover_frequencies_follow_closed_form() {
        let mut rng = RngSeed::new(11).rng();
        let marked = |x: usize| x == 5 || x == 700 || x == 1000;
        let samples = 10_000;
        for j in [0u64, 1, 3, 7, 12, 18, 25] {
            let p = amplified_success(3.0 / 1024.0, j);
            let mut hits = 0;
            for _ in 0..samples {
                let out = analytic_grover_sample(1024, marked, 3, j, &mut rng, &mut QueryCounter::new());
                assert_eq!(out.flag, marked(out.label));
                hits += usize::from(out.flag);
            }
            let sigma = (p * (1.0 - p) / samples as f64).sqrt();
            let freq = hits as f64 / samples as f64;
            assert!((freq - p).abs() <= 3.0 * sigma + 1e-9, "j={j} freq={freq} p={p}");
        }
    }

    #[test]
    fn counting_edges() {
        let mut rng = RngSeed::new(5).rng();
        let mut counter = QueryCounter::new();
        for _ in 0..100 {
            assert_eq!(analytic_count_sample(64, 0, 37, &mut rng, &mut counter).t_prime, 0.0);
        }
        assert_eq!(counter.oracle_queries, 3700);
        let full = counting_distribution(64, 64, 40);
        assert!((full.probabilities()[20] - 1.0).abs() < 1e-12);
        for m in [2u64, 7, 33, 904] {
            for t in [1u64, 5, 17, 500, 1023] {
                let d = counting_distribution(1024, t, m);
                assert!((d.total() - 1.0).abs() < 1e-9, "m={m} t={t} total={}", d.total());
            }
        }
    }
}
