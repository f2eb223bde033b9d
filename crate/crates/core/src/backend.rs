//! Backend selection and the searchable-source abstraction shared by the
//! exact statevector simulator and the closed-form sampler.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{amplified_success, counting_distribution, sample_uniform_in_class};
use crate::error::Result;
use crate::statevector::{
    amplitude_estimation_distribution, grover_state, AmplitudeLoader, EstimateDistribution, PreparableCircuit,
    UniformCircuit, DEFAULT_QUBIT_CAP,
};
use crate::types::{QueryCounter, TrialRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    /// Dense statevector simulation.
    Exact,
    /// Sampling from closed-form outcome distributions.
    Analytic,
}

impl std::fmt::Display for BackendKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BackendKind::Exact => "exact",
            BackendKind::Analytic => "analytic",
        })
    }
}

/// Which simulator runs the quantum subroutines, and its size limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendHandle {
    pub kind: BackendKind,
    pub qubit_cap: usize,
}

impl BackendHandle {
    pub fn exact() -> Self {
        Self {
            kind: BackendKind::Exact,
            qubit_cap: DEFAULT_QUBIT_CAP,
        }
    }

    pub fn analytic() -> Self {
        Self {
            kind: BackendKind::Analytic,
            qubit_cap: DEFAULT_QUBIT_CAP,
        }
    }

    pub fn of_kind(kind: BackendKind) -> Self {
        match kind {
            BackendKind::Exact => Self::exact(),
            BackendKind::Analytic => Self::analytic(),
        }
    }

    /// Size of the phase register actually used for a requested `M`: the
    /// statevector rounds up to a power of two, the closed form uses `M`.
    pub fn effective_m(&self, m: u64) -> u64 {
        match self.kind {
            BackendKind::Exact => m.max(2).next_power_of_two(),
            BackendKind::Analytic => m.max(2),
        }
    }

    /// Counting outcome distribution for `t` of `domain` marked labels.
    pub fn count_distribution(&self, domain: u64, t: u64, m: u64) -> Result<EstimateDistribution> {
        let m = self.effective_m(m);
        match self.kind {
            BackendKind::Exact => amplitude_estimation_distribution(domain, t, m, self.qubit_cap),
            BackendKind::Analytic => Ok(counting_distribution(domain, t, m)),
        }
    }

    /// Measures `Q(A, χ)^j A|0⟩` for the preparation described by `source`.
    ///
    /// Charges `2j + 1` applications of `A`/`A⁻¹` and `j` evaluations of `χ`.
    pub fn amplified_sample<S: SearchSource + ?Sized>(
        &self,
        source: &S,
        iterations: u64,
        rng: &mut TrialRng,
        counter: &mut QueryCounter,
    ) -> Result<usize> {
        let label = match self.kind {
            BackendKind::Exact => {
                let circuit = source.circuit();
                let state = grover_state(circuit.as_ref(), iterations, &mut QueryCounter::new(), self.qubit_cap)?;
                state.measure(rng)
            }
            BackendKind::Analytic => {
                let a = source.good_mass();
                let good = if a <= 0.0 {
                    false
                } else if a >= 1.0 {
                    true
                } else {
                    rng.random::<f64>() < amplified_success(a, iterations)
                };
                source.sample_in_class(good, rng)
            }
        };
        let applications = 2 * iterations + 1;
        counter.add_applications(applications);
        counter.add_queries(applications * source.application_cost() + iterations * source.predicate_cost());
        counter.add_decider_calls(applications * source.decider_calls_per_application());
        Ok(label)
    }
}

/// A measurement-free preparation `A` together with its predicate `χ`,
/// described both by its outcome distribution and as a circuit.
pub trait SearchSource: Sync {
    fn num_outcomes(&self) -> usize;
    fn is_good(&self, label: usize) -> bool;
    /// Probability `a` that measuring `A|0⟩` gives a good label.
    fn good_mass(&self) -> f64;
    /// A label drawn from `A|0⟩` conditioned on its class.
    fn sample_in_class(&self, good: bool, rng: &mut TrialRng) -> usize;
    fn circuit(&self) -> Box<dyn PreparableCircuit + '_>;

    /// Oracle rounds per application of `A` or `A⁻¹`.
    fn application_cost(&self) -> u64 {
        0
    }

    /// Oracle rounds per evaluation of `χ`.
    fn predicate_cost(&self) -> u64 {
        1
    }

    fn decider_calls_per_application(&self) -> u64 {
        0
    }

    /// Measures `A|0⟩` once.
    fn measure_prepared(
        &self,
        backend: &BackendHandle,
        rng: &mut TrialRng,
        counter: &mut QueryCounter,
    ) -> Result<usize> {
        backend.amplified_sample(self, 0, rng, counter)
    }
}

/// Uniform superposition over `domain` labels with a marking predicate.
pub struct UniformSource<P> {
    domain: usize,
    marked: P,
    marked_count: usize,
}

impl<P: Fn(usize) -> bool + Sync> UniformSource<P> {
    pub fn new(domain: usize, marked: P) -> Self {
        assert!(domain.is_power_of_two() && domain >= 2);
        let marked_count = (0..domain).filter(|&x| marked(x)).count();
        Self {
            domain,
            marked,
            marked_count,
        }
    }

    pub fn marked_count(&self) -> usize {
        self.marked_count
    }
}

impl<P: Fn(usize) -> bool + Sync> SearchSource for UniformSource<P> {
    fn num_outcomes(&self) -> usize {
        self.domain
    }

    fn is_good(&self, label: usize) -> bool {
        (self.marked)(label)
    }

    fn good_mass(&self) -> f64 {
        self.marked_count as f64 / self.domain as f64
    }

    fn sample_in_class(&self, good: bool, rng: &mut TrialRng) -> usize {
        let class = if good {
            self.marked_count
        } else {
            self.domain - self.marked_count
        };
        sample_uniform_in_class(self.domain, &self.marked, good, class, rng)
    }

    fn circuit(&self) -> Box<dyn PreparableCircuit + '_> {
        Box::new(UniformCircuit::new(self.domain.trailing_zeros() as usize, |x| {
            (self.marked)(x)
        }))
    }
}

/// Arbitrary outcome distribution with a good/bad mask.
pub struct WeightedSource {
    weights: Vec<f64>,
    good: Vec<bool>,
    good_cdf: Vec<(f64, usize)>,
    bad_cdf: Vec<(f64, usize)>,
    good_mass: f64,
}

impl WeightedSource {
    /// `weights` need not be normalised; their count must be a power of two.
    pub fn new(weights: Vec<f64>, good: Vec<bool>) -> Self {
        assert!(weights.len().is_power_of_two() && weights.len() >= 2);
        assert_eq!(weights.len(), good.len());
        let total: f64 = weights.iter().sum();
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let cdf = |want: bool| {
            let mut acc = 0.0;
            weights
                .iter()
                .zip(&good)
                .enumerate()
                .filter(|(_, (w, g))| **g == want && **w > 0.0)
                .map(|(i, (w, _))| {
                    acc += w;
                    (acc, i)
                })
                .collect::<Vec<_>>()
        };
        let good_cdf = cdf(true);
        let bad_cdf = cdf(false);
        let good_mass = good_cdf.last().map_or(0.0, |c| c.0);
        Self {
            weights,
            good,
            good_cdf,
            bad_cdf,
            good_mass,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl SearchSource for WeightedSource {
    fn num_outcomes(&self) -> usize {
        self.weights.len()
    }

    fn is_good(&self, label: usize) -> bool {
        self.good[label]
    }

    fn good_mass(&self) -> f64 {
        self.good_mass
    }

    fn sample_in_class(&self, good: bool, rng: &mut TrialRng) -> usize {
        let cdf = if good { &self.good_cdf } else { &self.bad_cdf };
        let total = cdf.last().expect("sampled class has positive mass").0;
        let u = rng.random::<f64>() * total;
        let i = cdf.partition_point(|c| c.0 <= u).min(cdf.len() - 1);
        cdf[i].1
    }

    fn circuit(&self) -> Box<dyn PreparableCircuit + '_> {
        Box::new(AmplitudeLoader::from_probabilities(&self.weights, self.good.clone()))
    }
}
