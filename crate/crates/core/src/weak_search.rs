//! Search over a bounded-error decider whose domain contains positive,
//! negative and neutral labels.
//!
//! The decider is boosted by majority vote until its error on positive and
//! negative labels is at most `N^{−λ}`; amplitude amplification then looks
//! for a label on which the boosted decider answers 1. At most two searches
//! with `T = 2N` are run.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::backend::{BackendHandle, SearchSource, WeightedSource};
use crate::error::{Error, Result};
use crate::qsearch::{gamma, qsearch_prime, QSearchConfig};
use crate::statevector::PreparableCircuit;
use crate::types::{QueryCounter, TrialRng};

/// Hoeffding constant: `r` votes with per-vote accuracy `2/3` fail with
/// probability at most `exp(−2r(1/6)²) = exp(−r/18)`.
pub const HOEFFDING_FACTOR: f64 = 18.0;

/// A quantum subroutine answering a bit for each label of `[0..N)`.
///
/// On positive and negative labels the answer must be correct with
/// probability at least 2/3; neutral labels are unconstrained.
pub trait BoundedErrorDecider: Sync {
    fn domain_size(&self) -> usize;
    /// One run on `label`.
    fn decide(&self, label: usize, rng: &mut TrialRng) -> bool;
    /// Exact probability that one run on `label` answers 1.
    fn yes_probability(&self, label: usize) -> f64;
    /// Oracle rounds consumed by one coherent invocation.
    fn query_cost(&self) -> u64;
}

/// `⌈18·λ·ln N⌉`.
pub fn min_repetitions(lambda: u32, domain: u64) -> u64 {
    (HOEFFDING_FACTOR * f64::from(lambda) * (domain as f64).ln()).ceil() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoostConfig {
    pub lambda: u32,
    pub gamma: u64,
    pub repetitions: u64,
}

fn lambda_condition(gamma: u64, lambda: u32) -> bool {
    4.0 * gamma as f64 * 2f64.powf(-f64::from(lambda) + 0.5) <= 1.0 / 9.0
}

impl BoostConfig {
    /// Constants for domain size `N`: `γ` from the search's worst case at
    /// this `N`, the smallest admissible `λ ≥ 4`, and the minimum `r`.
    pub fn for_domain(domain: u64, qsearch: &QSearchConfig) -> Self {
        let gamma = gamma(qsearch, domain).max(1);
        let lambda = (4..)
            .find(|&l| lambda_condition(gamma, l))
            .expect("condition holds eventually");
        Self {
            lambda,
            gamma,
            repetitions: min_repetitions(lambda, domain),
        }
    }

    pub fn validate(&self, domain: u64) -> Result<()> {
        if self.lambda < 4 {
            return Err(Error::InvalidConfig(format!("lambda must be ≥ 4, got {}", self.lambda)));
        }
        if self.gamma == 0 || !lambda_condition(self.gamma, self.lambda) {
            return Err(Error::InvalidConfig(format!(
                "4·γ·2^(−λ+1/2) ≤ 1/9 fails for γ = {}, λ = {}",
                self.gamma, self.lambda
            )));
        }
        let min = min_repetitions(self.lambda, domain);
        if self.repetitions < min {
            return Err(Error::InvalidConfig(format!(
                "r = {} is below ⌈18·λ·ln N⌉ = {min}",
                self.repetitions
            )));
        }
        Ok(())
    }
}

/// Probability that more than half of `r` independent votes, each 1 with
/// probability `q`, are 1. Ties count as 0.
pub fn boosted_yes_probability(q: f64, repetitions: u64) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    if q >= 1.0 {
        return 1.0;
    }
    Binomial::new(q, repetitions)
        .expect("valid binomial")
        .sf(repetitions / 2)
}

fn majority_vote<D: BoundedErrorDecider + ?Sized>(
    decider: &D,
    label: usize,
    repetitions: u64,
    rng: &mut TrialRng,
    counter: &mut QueryCounter,
) -> bool {
    let yes = (0..repetitions).filter(|_| decider.decide(label, rng)).count() as u64;
    counter.add_decider_calls(repetitions);
    counter.add_queries(repetitions * decider.query_cost());
    2 * yes > repetitions
}

/// Majority vote over `⌈18·λ·ln N⌉` runs of `decider` on `label`.
pub fn success_boosting<D: BoundedErrorDecider + ?Sized>(
    decider: &D,
    lambda: u32,
    label: usize,
    domain: u64,
    rng: &mut TrialRng,
    counter: &mut QueryCounter,
) -> bool {
    majority_vote(decider, label, min_repetitions(lambda, domain), rng, counter)
}

/// Samples `j` uniformly from the domain and returns it with the boosted answer.
pub fn weak_search_auxiliary<D: BoundedErrorDecider + ?Sized>(
    decider: &D,
    boost: &BoostConfig,
    rng: &mut TrialRng,
    counter: &mut QueryCounter,
) -> (usize, bool) {
    let j = rng.random_range(0..decider.domain_size());
    let b = majority_vote(decider, j, boost.repetitions, rng, counter);
    (j, b)
}

/// The auxiliary procedure as a searchable preparation over labels `(j, b)`,
/// encoded as `b·N + j`, with `χ_N(j, b) = b`.
pub struct AuxiliarySource<'a, D: ?Sized> {
    decider: &'a D,
    boost: BoostConfig,
    dist: WeightedSource,
}

impl<'a, D: BoundedErrorDecider + ?Sized> AuxiliarySource<'a, D> {
    pub fn new(decider: &'a D, boost: BoostConfig) -> Self {
        let n = decider.domain_size();
        let boosted: Vec<f64> = (0..n)
            .map(|j| boosted_yes_probability(decider.yes_probability(j), boost.repetitions))
            .collect();
        let weights = boosted.iter().map(|p| 1.0 - p).chain(boosted.iter().copied()).collect();
        let good = (0..2 * n).map(|x| x >= n).collect();
        Self {
            decider,
            boost,
            dist: WeightedSource::new(weights, good),
        }
    }

    pub fn decode(&self, label: usize) -> (usize, bool) {
        let n = self.decider.domain_size();
        (label % n, label >= n)
    }
}

impl<D: BoundedErrorDecider + ?Sized> SearchSource for AuxiliarySource<'_, D> {
    fn num_outcomes(&self) -> usize {
        self.dist.num_outcomes()
    }

    fn is_good(&self, label: usize) -> bool {
        self.decode(label).1
    }

    fn good_mass(&self) -> f64 {
        self.dist.good_mass()
    }

    fn sample_in_class(&self, good: bool, rng: &mut TrialRng) -> usize {
        self.dist.sample_in_class(good, rng)
    }

    fn circuit(&self) -> Box<dyn PreparableCircuit + '_> {
        self.dist.circuit()
    }

    fn application_cost(&self) -> u64 {
        self.boost.repetitions * self.decider.query_cost()
    }

    fn predicate_cost(&self) -> u64 {
        0
    }

    fn decider_calls_per_application(&self) -> u64 {
        self.boost.repetitions
    }

    /// Runs the auxiliary procedure itself: a uniform label and the actual
    /// majority vote of sampled decider runs.
    fn measure_prepared(&self, _: &BackendHandle, rng: &mut TrialRng, counter: &mut QueryCounter) -> Result<usize> {
        let (j, b) = weak_search_auxiliary(self.decider, &self.boost, rng, counter);
        counter.add_applications(1);
        Ok(if b { j + self.decider.domain_size() } else { j })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct WeakSearchConfig {
    pub qsearch: QSearchConfig,
    /// Defaults to [`BoostConfig::for_domain`].
    pub boost: Option<BoostConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakSearchOutcome {
    pub label: usize,
    pub flag: bool,
    /// Number of amplitude-amplification searches run (1 or 2).
    pub searches: u32,
    pub boost: BoostConfig,
}

/// Finds a label on which the boosted decider answers 1, or returns `(0, 0)`.
pub fn weak_search<D: BoundedErrorDecider + ?Sized>(
    decider: &D,
    cfg: &WeakSearchConfig,
    backend: &BackendHandle,
    rng: &mut TrialRng,
    counter: &mut QueryCounter,
) -> Result<WeakSearchOutcome> {
    let n = decider.domain_size();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidConfig(format!(
            "domain must be a power of two ≥ 2, got {n}"
        )));
    }
    let boost = cfg
        .boost
        .unwrap_or_else(|| BoostConfig::for_domain(n as u64, &cfg.qsearch));
    boost.validate(n as u64)?;
    let source = AuxiliarySource::new(decider, boost);
    let qcfg = cfg.qsearch.with_bound(2.0 * n as f64);
    for attempt in 1..=2 {
        let res = qsearch_prime(&source, &qcfg, backend, rng, counter)?;
        if res.found {
            let (label, flag) = source.decode(res.outcome);
            debug_assert!(flag);
            return Ok(WeakSearchOutcome {
                label,
                flag,
                searches: attempt,
                boost,
            });
        }
    }
    Ok(WeakSearchOutcome {
        label: 0,
        flag: false,
        searches: 2,
        boost,
    })
}

/// Decider with fixed per-label answer probabilities, for tests and
/// calibration runs.
#[derive(Debug, Clone)]
pub struct TableDecider {
    yes: Vec<f64>,
    cost: u64,
}

impl TableDecider {
    pub fn new(yes: Vec<f64>, cost: u64) -> Self {
        assert!(yes.len().is_power_of_two());
        Self { yes, cost }
    }
}

impl BoundedErrorDecider for TableDecider {
    fn domain_size(&self) -> usize {
        self.yes.len()
    }

    fn decide(&self, label: usize, rng: &mut TrialRng) -> bool {
        rng.random::<f64>() < self.yes[label]
    }

    fn yes_probability(&self, label: usize) -> f64 {
        self.yes[label]
    }

    fn query_cost(&self) -> u64 {
        self.cost
    }
}
