use num_complex::Complex64;
use rand::Rng;

use super::{flip_zero, predicate_phase, walsh_hadamard, Layout, QState};
use crate::error::Result;
use crate::types::QueryCounter;

/// A measurement-free preparation circuit `A` searched against predicate `χ`.
///
/// `apply` and `apply_inverse` act in place on the `2^num_qubits` amplitudes
/// of the register `A` is defined on.
pub trait PreparableCircuit: Sync {
    fn num_qubits(&self) -> usize;
    fn apply(&self, amps: &mut [Complex64]);
    fn apply_inverse(&self, amps: &mut [Complex64]);
    /// `χ(label)`.
    fn is_good(&self, label: usize) -> bool;
}

/// `A = H^{⊗n}` with an arbitrary marking predicate.
pub struct UniformCircuit<P> {
    qubits: usize,
    marked: P,
}

impl<P: Fn(usize) -> bool + Sync> UniformCircuit<P> {
    pub fn new(qubits: usize, marked: P) -> Self {
        Self { qubits, marked }
    }
}

impl<P: Fn(usize) -> bool + Sync> PreparableCircuit for UniformCircuit<P> {
    fn num_qubits(&self) -> usize {
        self.qubits
    }

    fn apply(&self, amps: &mut [Complex64]) {
        walsh_hadamard(amps);
    }

    fn apply_inverse(&self, amps: &mut [Complex64]) {
        walsh_hadamard(amps);
    }

    fn is_good(&self, label: usize) -> bool {
        (self.marked)(label)
    }
}

/// Loads an arbitrary real, non-negative amplitude vector `ψ` with the
/// Householder reflection `I − 2uuᵀ/‖u‖²`, `u = |0⟩ − ψ`, which maps `|0⟩` to
/// `ψ` and is its own inverse.
pub struct AmplitudeLoader {
    qubits: usize,
    u: Vec<f64>,
    u_norm_sqr: f64,
    good: Vec<bool>,
}

impl AmplitudeLoader {
    /// `probabilities` are the squared target amplitudes (normalised here).
    pub fn from_probabilities(probabilities: &[f64], good: Vec<bool>) -> Self {
        assert!(probabilities.len().is_power_of_two());
        assert_eq!(probabilities.len(), good.len());
        let total: f64 = probabilities.iter().sum();
        let mut u: Vec<f64> = probabilities.iter().map(|p| -(p / total).sqrt()).collect();
        u[0] += 1.0;
        let u_norm_sqr = u.iter().map(|x| x * x).sum();
        Self {
            qubits: probabilities.len().trailing_zeros() as usize,
            u,
            u_norm_sqr,
            good,
        }
    }

    fn reflect(&self, amps: &mut [Complex64]) {
        if self.u_norm_sqr < 1e-30 {
            return;
        }
        let dot: Complex64 = self.u.iter().zip(amps.iter()).map(|(u, a)| a * *u).sum();
        let scale = dot * (2.0 / self.u_norm_sqr);
        for (a, u) in amps.iter_mut().zip(&self.u) {
            *a -= scale * *u;
        }
    }
}

impl PreparableCircuit for AmplitudeLoader {
    fn num_qubits(&self) -> usize {
        self.qubits
    }

    fn apply(&self, amps: &mut [Complex64]) {
        self.reflect(amps);
    }

    fn apply_inverse(&self, amps: &mut [Complex64]) {
        self.reflect(amps);
    }

    fn is_good(&self, label: usize) -> bool {
        self.good[label]
    }
}

/// One application of `Q(A, χ) = −A S₀ A⁻¹ S_χ` on the register amplitudes.
pub fn grover_iterate(circuit: &dyn PreparableCircuit, amps: &mut [Complex64], counter: &mut QueryCounter) {
    predicate_phase(amps, |x| circuit.is_good(x));
    counter.add_queries(1);
    circuit.apply_inverse(amps);
    flip_zero(amps);
    circuit.apply(amps);
    amps.iter_mut().for_each(|a| *a = -*a);
}

/// `Q^j A |0⟩` on a fresh single-register state.
pub fn grover_state(
    circuit: &dyn PreparableCircuit,
    iterations: u64,
    counter: &mut QueryCounter,
    qubit_cap: usize,
) -> Result<QState> {
    let mut state = QState::zero(Layout::new().with("index", circuit.num_qubits()), qubit_cap)?;
    circuit.apply(state.amplitudes_mut());
    for _ in 0..iterations {
        grover_iterate(circuit, state.amplitudes_mut(), counter);
    }
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroverOutcome {
    pub label: usize,
    pub flag: bool,
}

/// Prepares `A|0⟩`, applies `Q^j` and measures.
pub fn grover_power<R: Rng + ?Sized>(
    circuit: &dyn PreparableCircuit,
    iterations: u64,
    rng: &mut R,
    counter: &mut QueryCounter,
    qubit_cap: usize,
) -> Result<GroverOutcome> {
    let state = grover_state(circuit, iterations, counter, qubit_cap)?;
    let label = state.measure(rng);
    Ok(GroverOutcome {
        label,
        flag: circuit.is_good(label),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::DEFAULT_QUBIT_CAP;
    use crate::types::RngSeed;

    fn success(circuit: &dyn PreparableCircuit, j: u64) -> f64 {
        let state = grover_state(circuit, j, &mut QueryCounter::new(), DEFAULT_QUBIT_CAP).unwrap();
        state
            .probabilities()
            .iter()
            .enumerate()
            .filter(|(x, _)| circuit.is_good(*x))
            .map(|(_, p)| p)
            .sum()
    }

    #[test]
    fn grover_examples() {
        let one_of_four = UniformCircuit::new(2, |x| x == 3);
        assert!((success(&one_of_four, 1) - 1.0).abs() < 1e-12);
        assert!((success(&one_of_four, 0) - 0.25).abs() < 1e-12);
        let two_of_eight = UniformCircuit::new(3, |x| x == 1 || x == 6);
        assert!((success(&two_of_eight, 1) - 1.0).abs() < 1e-9);

        let mut rng = RngSeed::new(1).rng();
        let mut counter = QueryCounter::new();
        for _ in 0..20 {
            let out = grover_power(&one_of_four, 1, &mut rng, &mut counter, DEFAULT_QUBIT_CAP).unwrap();
            assert_eq!(out, GroverOutcome { label: 3, flag: true });
        }
        assert_eq!(counter.oracle_queries, 20);
    }

    #[test]
    fn circuits_round_trip() {
        let probs = [0.1, 0.0, 0.3, 0.05, 0.05, 0.2, 0.2, 0.1];
        let loader = AmplitudeLoader::from_probabilities(&probs, vec![false; 8]);
        let uniform = UniformCircuit::new(3, |_| false);
        let input: Vec<Complex64> = (0..8)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64).cos() / 2.0))
            .collect();
        for c in [&loader as &dyn PreparableCircuit, &uniform] {
            let mut v = input.clone();
            c.apply(&mut v);
            c.apply_inverse(&mut v);
            let err = v.iter().zip(&input).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-9);
        }
        let mut zero = vec![Complex64::new(0.0, 0.0); 8];
        zero[0] = Complex64::new(1.0, 0.0);
        loader.apply(&mut zero);
        for (a, p) in zero.iter().zip(probs) {
            assert!((a.norm_sqr() - p).abs() < 1e-12);
        }
    }

    #[test]
    fn loader_grover_follows_closed_form() {
        // Non-uniform A with a = 0.3 on the good labels.
        let probs = [0.1, 0.2, 0.05, 0.15, 0.1, 0.1, 0.2, 0.1];
        let good = vec![false, true, false, false, true, false, false, false];
        let loader = AmplitudeLoader::from_probabilities(&probs, good);
        let theta = 0.3f64.sqrt().asin();
        for j in 0..20u64 {
            let want = ((2 * j + 1) as f64 * theta).sin().powi(2);
            assert!((success(&loader, j) - want).abs() < 1e-9, "j = {j}");
        }
    }
}
