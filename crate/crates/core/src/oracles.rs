//! Classical ground truth: Hamming distances, position labels, exhaustive
//! k-mismatch search and the counting error bound.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::types::MatchInstance;

/// Hamming distance extended with infinity for strings of unequal length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u64),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<u64> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

pub fn hamming_distance(a: &[u8], b: &[u8]) -> Distance {
    if a.len() != b.len() {
        return Distance::Infinite;
    }
    Distance::Finite(a.iter().zip(b).filter(|(x, y)| x != y).count() as u64)
}

/// Ground-truth label of a window position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrichotomyLabel {
    /// Out of range, or distance above `(1 + ε)k`.
    Negative = 0,
    /// Distance at most `k`.
    Positive = 1,
    /// Anything in between.
    Neutral = 2,
}

/// Distance between the window at `j` and the pattern, `None` if `j > n − m`.
pub fn window_distance(inst: &MatchInstance, j: usize) -> Option<u64> {
    inst.window(j).map(|w| {
        hamming_distance(w, inst.pattern())
            .finite()
            .expect("window has pattern length")
    })
}

pub fn label_for_distance(inst: &MatchInstance, distance: u64) -> TrichotomyLabel {
    if distance <= inst.k() {
        TrichotomyLabel::Positive
    } else if inst.epsilon().exceeds_relaxed(distance, inst.k()) {
        TrichotomyLabel::Negative
    } else {
        TrichotomyLabel::Neutral
    }
}

/// Label of position `j` in a search domain of size `domain`.
pub fn classify_position(inst: &MatchInstance, j: usize, domain: usize) -> TrichotomyLabel {
    debug_assert!(j < domain);
    match window_distance(inst, j) {
        None => TrichotomyLabel::Negative,
        Some(d) => label_for_distance(inst, d),
    }
}

/// Smallest `j` whose window is within distance `k` of the pattern.
pub fn brute_force_kmismatch(inst: &MatchInstance) -> Option<usize> {
    (0..=inst.last_start()).find(|&j| window_distance(inst, j).is_some_and(|d| d <= inst.k()))
}

/// Smallest window distance over all valid positions.
pub fn min_window_distance(inst: &MatchInstance) -> u64 {
    (0..=inst.last_start())
        .filter_map(|j| window_distance(inst, j))
        .min()
        .expect("at least one window")
}

/// `2π·c·√(t(N − t))/M + π²·c²·N/M²` for confidence parameter `c = k_conf`.
pub fn counting_error_bound(domain: u64, t: u64, m_param: u64, k_conf: u64) -> f64 {
    let n = domain as f64;
    let t = t as f64;
    let m = m_param as f64;
    let c = k_conf as f64;
    2.0 * PI * c * (t * (n - t)).sqrt() / m + PI * PI * c * c * n / (m * m)
}
