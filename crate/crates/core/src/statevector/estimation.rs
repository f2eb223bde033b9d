//! Amplitude estimation (quantum counting) on the dense simulator.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;

use super::{grover_iterate, Layout, PreparableCircuit, QState, UniformCircuit};
use crate::error::{Error, Result};
use crate::par::ExecMode;
use crate::types::{CountEstimate, QueryCounter};

/// Exact distribution of the phase outcome `y ∈ [0..M)` of a counting run,
/// where outcome `y` reports the estimate `t′ = N·sin²(πy/M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateDistribution {
    domain: u64,
    m_param: u64,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl EstimateDistribution {
    pub fn new(domain: u64, probs: Vec<f64>) -> Self {
        let cdf = probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        Self {
            domain,
            m_param: probs.len() as u64,
            probs,
            cdf,
        }
    }

    pub fn domain(&self) -> u64 {
        self.domain
    }

    pub fn m_param(&self) -> u64 {
        self.m_param
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.cdf.last().copied().unwrap_or(0.0)
    }

    /// `N·sin²(πy/M)`.
    pub fn estimate(&self, y: usize) -> f64 {
        self.domain as f64 * (PI * y as f64 / self.m_param as f64).sin().powi(2)
    }

    /// Probability that the reported estimate is strictly below `threshold`.
    pub fn probability_below(&self, threshold: f64) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(y, _)| self.estimate(*y) < threshold)
            .map(|(_, p)| p)
            .sum::<f64>()
            .min(1.0)
    }

    /// Draws one phase outcome and its estimate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, f64) {
        let u = rng.random::<f64>() * self.total();
        let y = self.cdf.partition_point(|&c| c <= u).min(self.probs.len() - 1);
        // Skip zero-probability outcomes that round-off could land on.
        let y = if self.probs[y] > 0.0 {
            y
        } else {
            (0..=y).rev().find(|&i| self.probs[i] > 0.0).unwrap_or(y)
        };
        (y, self.estimate(y))
    }

    pub fn total_variation(&self, other: &EstimateDistribution) -> f64 {
        assert_eq!(self.probs.len(), other.probs.len());
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

fn check_pow2(name: &str, v: u64) -> Result<()> {
    if v < 2 || !v.is_power_of_two() {
        return Err(Error::InvalidConfig(format!(
            "{name} must be a power of two ≥ 2, got {v}"
        )));
    }
    Ok(())
}

/// Runs phase estimation on `Q(A, χ)` for `circuit` with an `m_pow2`-outcome
/// phase register and returns the exact phase-outcome distribution.
///
/// Block `y` of the phase register receives `Q^y A|0⟩`, the same state the
/// cascade of controlled `Q^{2^p}` gates produces, using `M − 1` iterates.
pub fn amplitude_estimation_distribution_for(
    circuit: &dyn PreparableCircuit,
    m_pow2: u64,
    qubit_cap: usize,
) -> Result<EstimateDistribution> {
    check_pow2("M", m_pow2)?;
    let index_qubits = circuit.num_qubits();
    let phase_qubits = m_pow2.trailing_zeros() as usize;
    let layout = Layout::new().with("index", index_qubits).with("phase", phase_qubits);
    if layout.num_qubits() > qubit_cap {
        return Err(Error::StateTooLarge {
            qubits: layout.num_qubits(),
            cap: qubit_cap,
        });
    }
    let domain = 1usize << index_qubits;
    let m = m_pow2 as usize;
    let norm = 1.0 / (m as f64).sqrt();

    let mut amps = Vec::with_capacity(domain * m);
    let mut v = vec![Complex64::new(0.0, 0.0); domain];
    v[0] = Complex64::new(1.0, 0.0);
    circuit.apply(&mut v);
    let mut scratch = QueryCounter::new();
    for y in 0..m {
        amps.extend(v.iter().map(|a| a * norm));
        if y + 1 < m {
            grover_iterate(circuit, &mut v, &mut scratch);
        }
    }
    let mut state = QState::from_amplitudes(layout, amps)?;

    // Inverse QFT on the phase register is the forward DFT scaled by 1/√M.
    let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
    let span = state.layout().span(&["phase"])?;
    state.apply_on_span(span, ExecMode::Parallel, |col| {
        fft.process(col);
        col.iter_mut().for_each(|a| *a *= norm);
    });
    Ok(EstimateDistribution::new(domain as u64, state.marginal("phase")?))
}

/// Counting distribution for `t` marked labels (the first `t`) out of `domain`.
pub fn amplitude_estimation_distribution(
    domain: u64,
    t: u64,
    m_pow2: u64,
    qubit_cap: usize,
) -> Result<EstimateDistribution> {
    check_pow2("N", domain)?;
    if t > domain {
        return Err(Error::InvalidConfig(format!("t = {t} exceeds N = {domain}")));
    }
    let circuit = UniformCircuit::new(domain.trailing_zeros() as usize, |x| (x as u64) < t);
    amplitude_estimation_distribution_for(&circuit, m_pow2, qubit_cap)
}

/// One counting run: `M − 1` controlled iterates plus one preparation round.
pub fn sample_amplitude_estimate<R: Rng + ?Sized>(
    circuit: &dyn PreparableCircuit,
    m_pow2: u64,
    rng: &mut R,
    counter: &mut QueryCounter,
    qubit_cap: usize,
) -> Result<CountEstimate> {
    let dist = amplitude_estimation_distribution_for(circuit, m_pow2, qubit_cap)?;
    let (_, t_prime) = dist.sample(rng);
    counter.add_queries(m_pow2);
    Ok(CountEstimate {
        t_prime,
        queries: m_pow2,
    })
}
