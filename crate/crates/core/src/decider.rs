//! Gap decider for Hamming distance: distinguishes `δ_H ≤ k` from
//! `δ_H > (1 + ε)k` by counting mismatches with `M = ⌈α√(N/k)⌉` rounds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::analytic::analytic_count_sample;
use crate::backend::{BackendHandle, BackendKind};
use crate::error::{Error, Result};
use crate::statevector::{sample_amplitude_estimate, UniformCircuit};
use crate::types::{Epsilon, QueryCounter, TrialRng};

/// Confidence parameter of the counting bound; gives success probability
/// `1 − 1/(2·(6 − 1)) = 9/10`.
pub const COUNT_CONFIDENCE: u64 = 6;

/// `β = √(1 + 3ε/2) − √(1 + ε)`, evaluated as `(ε/2)/(√(1 + 3ε/2) + √(1 + ε))`
/// to avoid cancellation.
pub fn compute_beta(epsilon: f64) -> Result<f64> {
    let eps = Epsilon::new(epsilon)?.value();
    Ok(0.5 * eps / ((1.0 + 1.5 * eps).sqrt() + (1.0 + eps).sqrt()))
}

/// `α = 6π/β`.
pub fn compute_alpha(epsilon: f64) -> Result<f64> {
    Ok(6.0 * PI / compute_beta(epsilon)?)
}

fn scaled_alpha_dd(domain: u64, k: u64, epsilon: f64) -> TwoFloat {
    let eps = TwoFloat::from(epsilon);
    let one = TwoFloat::from(1.0);
    let beta = eps * 0.5 / ((one + eps * 1.5).sqrt() + (one + eps).sqrt());
    let ratio = TwoFloat::from(domain as f64) / TwoFloat::from(k as f64);
    twofloat::consts::PI * 6.0 / beta * ratio.sqrt()
}

/// `M = ⌈α√(N/k)⌉`.
///
/// The `f64` value carries a relative error far below `1e-13`; when the
/// widened interval straddles an integer the value is recomputed in
/// double-double arithmetic.
pub fn compute_m(domain: u64, k: u64, epsilon: f64) -> Result<u64> {
    if k == 0 {
        return Err(Error::NonPositiveK(0));
    }
    let x = compute_alpha(epsilon)? * (domain as f64 / k as f64).sqrt();
    const WIDEN: f64 = 1e-13;
    let (lo, hi) = (x * (1.0 - WIDEN), x * (1.0 + WIDEN));
    if lo.ceil() == hi.ceil() {
        return Ok(hi.ceil() as u64);
    }
    let precise = scaled_alpha_dd(domain, k, epsilon);
    Ok(f64::from(precise.ceil()) as u64)
}

/// All constants of one decider invocation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeciderParams {
    /// String length `m`.
    pub m: usize,
    /// Counting domain: smallest power of two `≥ m`.
    pub domain: u64,
    pub k: u64,
    pub epsilon: f64,
    pub beta: f64,
    pub alpha: f64,
    /// Counting rounds `M`.
    pub m_param: u64,
    /// YES iff the estimate is strictly below `(1 + ε/2)·k`.
    pub threshold: f64,
}

impl DeciderParams {
    pub fn new(m: usize, k: u64, epsilon: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyPattern);
        }
        if k == 0 {
            return Err(Error::NonPositiveK(0));
        }
        let domain = m.next_power_of_two() as u64;
        let beta = compute_beta(epsilon)?;
        Ok(Self {
            m,
            domain,
            k,
            epsilon,
            beta,
            alpha: 6.0 * PI / beta,
            m_param: compute_m(domain, k, epsilon)?,
            threshold: (1.0 + epsilon / 2.0) * k as f64,
        })
    }

    /// `k ≥ m` answers YES without counting.
    pub fn trivially_yes(&self) -> bool {
        self.k >= self.m as u64
    }

    /// Oracle rounds of one invocation on `backend`.
    pub fn query_cost(&self, backend: &BackendHandle) -> u64 {
        if self.trivially_yes() {
            0
        } else {
            backend.effective_m(self.m_param)
        }
    }

    pub fn accepts(&self, t_prime: f64) -> bool {
        t_prime < self.threshold
    }
}

/// Decides `δ_H(x, y) ≤ k` versus `δ_H(x, y) > (1 + ε)k` with one counting run
/// over the padded mismatch predicate `F(j) = j < m ∧ x_j ≠ y_j`.
pub fn approx_bounded_hamming_decider(
    x: &[u8],
    y: &[u8],
    k: u64,
    epsilon: f64,
    backend: &BackendHandle,
    rng: &mut TrialRng,
    counter: &mut QueryCounter,
) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let params = DeciderParams::new(x.len(), k, epsilon)?;
    if params.trivially_yes() {
        return Ok(true);
    }
    let mismatch = |j: usize| j < x.len() && x[j] != y[j];
    let estimate = match backend.kind {
        BackendKind::Exact => {
            let circuit = UniformCircuit::new(params.domain.trailing_zeros() as usize, mismatch);
            sample_amplitude_estimate(
                &circuit,
                backend.effective_m(params.m_param),
                rng,
                counter,
                backend.qubit_cap,
            )?
        }
        BackendKind::Analytic => {
            let t = (0..x.len()).filter(|&j| mismatch(j)).count() as u64;
            analytic_count_sample(params.domain, t, params.m_param, rng, counter)
        }
    };
    Ok(params.accepts(estimate.t_prime))
}
