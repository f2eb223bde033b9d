//! Domain types shared by every stage of the pipeline: validated match
//! instances, the approximation parameter, seed streams and query counters.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Random generator used by every simulated trial.
pub type TrialRng = ChaCha8Rng;

/// Approximation parameter `ε ∈ (0, 1]`.
///
/// Besides the `f64` value, the shortest decimal form of the value is kept as
/// `mantissa · 10^exp10` so that comparisons against `(1 + ε)·k` are exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Epsilon {
    value: f64,
    mantissa: u64,
    exp10: i32,
}

impl Epsilon {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0 && value <= 1.0) {
            return Err(Error::EpsilonOutOfRange(value));
        }
        let repr = format!("{value:e}");
        let (digits, exp) = repr.split_once('e').expect("`{:e}` always has an exponent");
        let exp: i32 = exp.parse().expect("exponent is an integer");
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        let mantissa: u64 = format!("{int_part}{frac_part}")
            .parse()
            .expect("shortest repr has at most 17 digits");
        Ok(Self {
            value,
            mantissa,
            exp10: exp - frac_part.len() as i32,
        })
    }

    pub fn value(self) -> f64 {
        self.value
    }

    /// Exact test of `distance > (1 + ε)·k` using the decimal form of `ε`.
    pub fn exceeds_relaxed(self, distance: u64, k: u64) -> bool {
        if distance <= k {
            return false;
        }
        let diff = u128::from(distance - k);
        let rhs = u128::from(k) * u128::from(self.mantissa);
        // ε ≤ 1 so exp10 ≤ 0 whenever the mantissa has been normalised.
        if self.exp10 >= 0 {
            let scale = 10u128.pow(self.exp10 as u32);
            return diff > rhs.saturating_mul(scale);
        }
        let shift = (-self.exp10) as u32;
        if shift >= 39 {
            return true;
        }
        match diff.checked_mul(10u128.pow(shift)) {
            Some(lhs) => lhs > rhs,
            None => true,
        }
    }
}

impl Serialize for Epsilon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value)
    }
}

impl<'de> Deserialize<'de> for Epsilon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Epsilon::new(v).map_err(serde::de::Error::custom)
    }
}

/// A validated approximate k-mismatch instance.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchInstance {
    text: Vec<u8>,
    pattern: Vec<u8>,
    k: u64,
    epsilon: Epsilon,
}

/// Checks the raw inputs and builds a [`MatchInstance`]. Nothing is clamped.
pub fn validate_instance(text: &[u8], pattern: &[u8], k: i64, epsilon: f64) -> Result<MatchInstance> {
    if pattern.is_empty() {
        return Err(Error::EmptyPattern);
    }
    if pattern.len() > text.len() {
        return Err(Error::PatternLongerThanText {
            m: pattern.len(),
            n: text.len(),
        });
    }
    if k <= 0 {
        return Err(Error::NonPositiveK(k));
    }
    let epsilon = Epsilon::new(epsilon)?;
    Ok(MatchInstance {
        text: text.to_vec(),
        pattern: pattern.to_vec(),
        k: k as u64,
        epsilon,
    })
}

impl MatchInstance {
    pub fn text(&self) -> &[u8] {
        &self.text
    }

    pub fn pattern(&self) -> &[u8] {
        &self.pattern
    }

    pub fn n(&self) -> usize {
        self.text.len()
    }

    pub fn m(&self) -> usize {
        self.pattern.len()
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    /// Largest valid window start, `n − m`.
    pub fn last_start(&self) -> usize {
        self.n() - self.m()
    }

    /// The length-`m` text window starting at `j`, if it fits.
    pub fn window(&self, j: usize) -> Option<&[u8]> {
        self.text.get(j..j.checked_add(self.m())?)
    }

    /// Size of the search domain: the smallest power of two `≥ n − m + 1`,
    /// but at least 2 so the domain always has one index qubit.
    pub fn search_domain(&self) -> usize {
        (self.last_start() + 1).next_power_of_two().max(2)
    }
}

/// Seed of one deterministic random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub master_seed: u64,
    pub stream_index: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngSeed {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            stream_index: 0,
        }
    }

    /// Child stream `child_index` of this stream. Pure in its inputs.
    pub fn derive_stream(self, child_index: u64) -> Self {
        let mixed = splitmix64(self.stream_index ^ splitmix64(child_index.wrapping_add(0x5851_F42D_4C95_7F2D)));
        Self {
            master_seed: self.master_seed,
            stream_index: mixed,
        }
    }

    pub fn rng(self) -> TrialRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Free-function form of [`RngSeed::derive_stream`].
pub fn derive_stream(seed: RngSeed, child_index: u64) -> RngSeed {
    seed.derive_stream(child_index)
}

/// Oracle-query accounting for one run.
///
/// `oracle_queries` counts reads of the underlying input (one text/pattern
/// symbol pair, or one marking-predicate evaluation). `applications` counts
/// uses of a preparation circuit `A` or its inverse inside amplitude
/// amplification, and `decider_calls` counts invocations of a bounded-error
/// decider.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCounter {
    pub oracle_queries: u64,
    pub applications: u64,
    pub decider_calls: u64,
}

impl QueryCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_queries(&mut self, n: u64) {
        self.oracle_queries += n;
    }

    pub fn add_applications(&mut self, n: u64) {
        self.applications += n;
    }

    pub fn add_decider_calls(&mut self, n: u64) {
        self.decider_calls += n;
    }

    /// Only call between runs.
    pub fn reset(&mut self) {
        *self = Self::default();
    }
}

/// One output of the counting subroutine: the real-valued estimate `t′` of
/// the number of marked labels and the oracle rounds spent producing it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountEstimate {
    pub t_prime: f64,
    pub queries: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn validates_examples() {
        let inst = validate_instance(b"aaaa", b"aa", 1, 1.0).unwrap();
        assert_eq!((inst.n(), inst.m(), inst.k()), (4, 2, 1));
        assert_eq!(inst.epsilon().value(), 1.0);
        assert_eq!(
            validate_instance(b"a", b"aa", 1, 1.0),
            Err(Error::PatternLongerThanText { m: 2, n: 1 })
        );
        assert_eq!(
            validate_instance(b"aaaa", b"aa", 1, 1.5),
            Err(Error::EpsilonOutOfRange(1.5))
        );
        assert_eq!(validate_instance(b"aaaa", b"", 1, 1.0), Err(Error::EmptyPattern));
        assert_eq!(validate_instance(b"aaaa", b"a", 0, 1.0), Err(Error::NonPositiveK(0)));
        assert_eq!(validate_instance(b"aaaa", b"a", -3, 1.0), Err(Error::NonPositiveK(-3)));
        assert!(validate_instance(b"aaaa", b"a", 1, 0.0).is_err());
        assert!(validate_instance(b"aaaa", b"a", 1, f64::NAN).is_err());
    }

    #[test]
    fn validation_is_idempotent() {
        let a = validate_instance(b"abcabc", b"bca", 2, 0.3).unwrap();
        let b = validate_instance(a.text(), a.pattern(), a.k() as i64, a.epsilon().value()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn relaxed_comparison_is_exact_on_decimal_boundaries() {
        // (1 + 0.1)·10 = 11 exactly; binary 0.1 would put 11 on the wrong side.
        let eps = Epsilon::new(0.1).unwrap();
        assert!(!eps.exceeds_relaxed(11, 10));
        assert!(eps.exceeds_relaxed(12, 10));
        let eps = Epsilon::new(0.3).unwrap();
        assert!(!eps.exceeds_relaxed(13, 10));
        assert!(eps.exceeds_relaxed(14, 10));
        let one = Epsilon::new(1.0).unwrap();
        assert!(!one.exceeds_relaxed(32, 16));
        assert!(one.exceeds_relaxed(33, 16));
        let tiny = Epsilon::new(1e-300).unwrap();
        assert!(tiny.exceeds_relaxed(5, 4));
        assert!(!tiny.exceeds_relaxed(4, 4));
    }

    #[test]
    fn search_domain_is_power_of_two() {
        let inst = validate_instance(&[0; 1024], &[0; 256], 16, 1.0).unwrap();
        assert_eq!(inst.search_domain(), 1024);
        let inst = validate_instance(&[0; 8], &[0; 8], 1, 1.0).unwrap();
        assert_eq!(inst.search_domain(), 2);
        let inst = validate_instance(&[0; 9], &[0; 4], 1, 1.0).unwrap();
        assert_eq!(inst.search_domain(), 8);
    }

    #[test]
    fn derived_streams_are_deterministic_and_distinct() {
        let s = RngSeed::new(42);
        assert_eq!(s.derive_stream(0), s.derive_stream(0));
        assert_ne!(s.derive_stream(0), s.derive_stream(1));
        let mut a = s.derive_stream(7).rng();
        let mut b = s.derive_stream(7).rng();
        assert_eq!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn child_streams_pass_independence_smoke_test() {
        // 2x2 contingency table of paired low bits from streams 0 and 1,
        // plus the pooled bit frequency; both chi-square with 1 dof.
        let s = RngSeed::new(2024);
        let mut r0 = s.derive_stream(0).rng();
        let mut r1 = s.derive_stream(1).rng();
        let samples = 1_000_000u64;
        let mut table = [[0u64; 2]; 2];
        let mut ones = 0u64;
        for _ in 0..samples {
            let x = r0.next_u64();
            let y = r1.next_u64();
            table[(x & 1) as usize][(y & 1) as usize] += 1;
            ones += u64::from(x.count_ones()) + u64::from(y.count_ones());
        }
        let n = samples as f64;
        let mut chi_indep = 0.0;
        for (a, row) in table.iter().enumerate() {
            for (b, &obs) in row.iter().enumerate() {
                let ra = (table[a][0] + table[a][1]) as f64;
                let cb = (table[0][b] + table[1][b]) as f64;
                let expected = ra * cb / n;
                chi_indep += (obs as f64 - expected).powi(2) / expected;
            }
        }
        let bits = (samples * 128) as f64;
        let z = (ones as f64 - bits / 2.0) / (bits / 4.0).sqrt();
        // 99.9% quantile of chi-square(1) is 10.83.
        assert!(chi_indep < 10.83, "chi-square {chi_indep}");
        assert!(z * z < 10.83, "bit bias z = {z}");
    }
}
