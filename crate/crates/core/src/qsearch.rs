//! Exponential-schedule amplitude amplification with measured restarts.
//!
//! Each round measures `A|0⟩` once and, failing that, measures
//! `Q(A, χ)^j A|0⟩` for `j` uniform in `[1..⌈c^l⌉]`. The search stops at the
//! first good outcome or after `L = max(C, ⌈log(4α√T)/log c⌉)` rounds.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::backend::{BackendHandle, SearchSource};
use crate::error::{Error, Result};
use crate::types::{QueryCounter, TrialRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QSearchConfig {
    /// Schedule growth factor, `1 < c < 2`.
    pub c: f64,
    /// Minimum number of rounds `C`.
    pub min_rounds: u32,
    /// Constant `α` of the expected-stopping-time analysis.
    pub alpha_q: f64,
    /// Bound `T ≥ 1/a` on the inverse success probability.
    pub t_bound: f64,
}

impl Default for QSearchConfig {
    fn default() -> Self {
        Self {
            c: 1.2,
            min_rounds: 12,
            alpha_q: 8.0,
            t_bound: 1.0,
        }
    }
}

impl QSearchConfig {
    pub fn with_bound(self, t_bound: f64) -> Self {
        Self { t_bound, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 1.0 && self.c < 2.0) {
            return Err(Error::InvalidConfig(format!("c must lie in (1, 2), got {}", self.c)));
        }
        if self.min_rounds == 0 {
            return Err(Error::InvalidConfig("C must be positive".into()));
        }
        if !(self.alpha_q > 0.0 && self.alpha_q.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "alpha_q must be positive, got {}",
                self.alpha_q
            )));
        }
        if !(self.t_bound >= 1.0 && self.t_bound.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "T must be at least 1, got {}",
                self.t_bound
            )));
        }
        Ok(())
    }

    /// Round cutoff `L`.
    pub fn rounds(&self) -> u64 {
        let by_bound = ((4.0 * self.alpha_q * self.t_bound.sqrt()).ln() / self.c.ln()).ceil();
        let by_bound = if by_bound > 0.0 { by_bound as u64 } else { 0 };
        by_bound.max(u64::from(self.min_rounds))
    }

    /// `⌈c^l⌉`, the largest Grover power drawn in round `l`.
    pub fn max_power(&self, round: u64) -> u64 {
        self.c.powi(round as i32).ceil() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSearchResult {
    /// Last measured label.
    pub outcome: usize,
    pub found: bool,
    /// Queries spent by this run alone.
    pub queries: QueryCounter,
    /// Final value of the iteration tally `t`.
    pub iterations_used: u64,
    pub rounds: u64,
}

/// Runs the exponential-schedule search for a good outcome of `source`.
pub fn qsearch_prime<S: SearchSource + ?Sized>(
    source: &S,
    cfg: &QSearchConfig,
    backend: &BackendHandle,
    rng: &mut TrialRng,
    counter: &mut QueryCounter,
) -> Result<QSearchResult> {
    cfg.validate()?;
    let start = *counter;
    let cutoff = cfg.rounds();
    let mut round = 0;
    let mut tally = 0;
    let mut outcome = 0;
    let mut found = false;
    while round < cutoff && !found {
        round += 1;
        let max_power = cfg.max_power(round);
        tally += 1;
        let z = source.measure_prepared(backend, rng, counter)?;
        outcome = z;
        if source.is_good(z) {
            found = true;
        } else {
            let j = rng.random_range(1..=max_power);
            tally += j;
            let z = backend.amplified_sample(source, j, rng, counter)?;
            outcome = z;
            found = source.is_good(z);
        }
    }
    assert!(!found || source.is_good(outcome));
    Ok(QSearchResult {
        outcome,
        found,
        queries: QueryCounter {
            oracle_queries: counter.oracle_queries - start.oracle_queries,
            applications: counter.applications - start.applications,
            decider_calls: counter.decider_calls - start.decider_calls,
        },
        iterations_used: tally,
        rounds: round,
    })
}

/// Worst-case number of `A`/`A⁻¹` applications of one search with `T = 2N`.
///
/// Each round costs one direct preparation, one preparation of the register
/// that is amplified, and `j ≤ ⌈c^l⌉` iterates of one `A` and one `A⁻¹` each:
/// `Σ_{l=1..L} (2 + 2⌈c^l⌉)`.
pub fn worst_case_applications(cfg: &QSearchConfig, domain: u64) -> u64 {
    let cfg = cfg.with_bound(2.0 * domain as f64);
    (1..=cfg.rounds()).map(|l| 2 + 2 * cfg.max_power(l)).sum()
}

/// Smallest integer `γ` with `worst_case_applications ≤ γ√N`.
pub fn gamma(cfg: &QSearchConfig, domain: u64) -> u64 {
    let apps = worst_case_applications(cfg, domain) as f64;
    (apps / (domain as f64).sqrt()).ceil() as u64
}
