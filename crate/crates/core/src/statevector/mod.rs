//! Dense statevector simulation of the quantum subroutines.
//!
//! Amplitudes are stored little-endian: qubit 0 is the least significant bit
//! of the basis label, and registers occupy contiguous bit ranges in the
//! order they were added to the [`Layout`].

mod circuits;
mod estimation;

pub use circuits::{
    grover_iterate, grover_power, grover_state, AmplitudeLoader, GroverOutcome, PreparableCircuit, UniformCircuit,
};
pub use estimation::{
    amplitude_estimation_distribution, amplitude_estimation_distribution_for, sample_amplitude_estimate,
    EstimateDistribution,
};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::par::{map_indexed, ExecMode};
use crate::types::QueryCounter;

/// Default qubit cap: 2^24 amplitudes.
pub const DEFAULT_QUBIT_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub offset: usize,
    pub width: usize,
}

/// Contiguous range of qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitSpan {
    pub offset: usize,
    pub width: usize,
}

/// Named registers, least significant first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Layout {
    registers: Vec<Register>,
}

impl Layout {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, width: usize) -> Self {
        let offset = self.num_qubits();
        self.registers.push(Register {
            name: name.to_owned(),
            offset,
            width,
        });
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.registers.iter().map(|r| r.width).sum()
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_owned()))
    }

    /// Span covering the named registers, which must be adjacent and in order.
    pub fn span(&self, names: &[&str]) -> Result<QubitSpan> {
        let mut span: Option<QubitSpan> = None;
        for name in names {
            let r = self.register(name)?;
            span = Some(match span {
                None => QubitSpan {
                    offset: r.offset,
                    width: r.width,
                },
                Some(s) if s.offset + s.width == r.offset => QubitSpan {
                    offset: s.offset,
                    width: s.width + r.width,
                },
                Some(_) => {
                    return Err(Error::InvalidConfig(format!("registers {names:?} are not adjacent")));
                }
            });
        }
        span.ok_or_else(|| Error::InvalidConfig("empty register list".into()))
    }
}

/// Dense amplitude vector over a register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct QState {
    amps: Vec<Complex64>,
    layout: Layout,
}

impl QState {
    /// The all-zero basis state.
    pub fn zero(layout: Layout, qubit_cap: usize) -> Result<Self> {
        let q = layout.num_qubits();
        if q > qubit_cap {
            return Err(Error::StateTooLarge {
                qubits: q,
                cap: qubit_cap,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << q];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { amps, layout })
    }

    pub fn from_amplitudes(layout: Layout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << layout.num_qubits() {
            return Err(Error::InvalidConfig(format!(
                "{} amplitudes for {} qubits",
                amps.len(),
                layout.num_qubits()
            )));
        }
        Ok(Self { amps, layout })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Value of register `name` inside basis label `label`.
    pub fn register_value(&self, label: usize, name: &str) -> Result<usize> {
        let r = self.layout.register(name)?;
        Ok((label >> r.offset) & ((1 << r.width) - 1))
    }

    /// Marginal distribution of one register.
    pub fn marginal(&self, name: &str) -> Result<Vec<f64>> {
        let r = self.layout.register(name)?.clone();
        let mask = (1 << r.width) - 1;
        let mut out = vec![0.0; 1 << r.width];
        for (label, a) in self.amps.iter().enumerate() {
            out[(label >> r.offset) & mask] += a.norm_sqr();
        }
        Ok(out)
    }

    /// Negates every amplitude whose `register` bits are all zero (`S₀`).
    pub fn apply_phase_flip_zero(&mut self, register: &str) -> Result<()> {
        let r = self.layout.register(register)?;
        let mask = ((1usize << r.width) - 1) << r.offset;
        for (label, a) in self.amps.iter_mut().enumerate() {
            if label & mask == 0 {
                *a = -*a;
            }
        }
        Ok(())
    }

    /// Multiplies each amplitude by `(−1)^χ(label)` (`S_χ`); one oracle round.
    pub fn apply_predicate_phase<P>(&mut self, chi: P, counter: &mut QueryCounter)
    where
        P: Fn(usize) -> bool,
    {
        predicate_phase(&mut self.amps, chi);
        counter.add_queries(1);
    }

    pub fn negate(&mut self) {
        self.amps.iter_mut().for_each(|a| *a = -*a);
    }

    /// Applies `f` independently to the sub-vector of `span` for every
    /// assignment of the remaining qubits.
    pub fn apply_on_span<F>(&mut self, span: QubitSpan, mode: ExecMode, f: F)
    where
        F: Fn(&mut [Complex64]) + Sync + Send,
    {
        let low_mask = (1usize << span.offset) - 1;
        let block = 1usize << span.width;
        if span.offset == 0 {
            crate::par::for_each_chunk_mut(&mut self.amps, block, mode, |_, c| f(c));
            return;
        }
        let groups = self.amps.len() / block;
        let index = |g: usize, v: usize| {
            let inner = g & low_mask;
            let outer = g >> span.offset;
            (outer << (span.offset + span.width)) | (v << span.offset) | inner
        };
        let amps = &self.amps;
        let transformed = map_indexed(groups, mode, |g| {
            let mut buf: Vec<Complex64> = (0..block).map(|v| amps[index(g, v)]).collect();
            f(&mut buf);
            buf
        });
        for (g, buf) in transformed.into_iter().enumerate() {
            for (v, a) in buf.into_iter().enumerate() {
                self.amps[index(g, v)] = a;
            }
        }
    }

    /// Applies `circuit` (or its inverse) to the named adjacent registers.
    pub fn apply_circuit(&mut self, registers: &[&str], circuit: &dyn PreparableCircuit, inverse: bool) -> Result<()> {
        let span = self.layout.span(registers)?;
        if span.width != circuit.num_qubits() {
            return Err(Error::InvalidConfig(format!(
                "circuit acts on {} qubits, span has {}",
                circuit.num_qubits(),
                span.width
            )));
        }
        self.apply_on_span(span, ExecMode::Parallel, |amps| {
            if inverse {
                circuit.apply_inverse(amps)
            } else {
                circuit.apply(amps)
            }
        });
        Ok(())
    }

    /// Samples a basis label from `|amplitude|²`.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(self.amps.iter().map(|a| a.norm_sqr()), self.norm_sqr(), rng)
    }
}

/// Inverse-CDF sampling from unnormalised weights, returning the last index
/// with positive weight on round-off.
pub(crate) fn sample_index<I, R>(weights: I, total: f64, rng: &mut R) -> usize
where
    I: IntoIterator<Item = f64>,
    R: Rng + ?Sized,
{
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, w) in weights.into_iter().enumerate() {
        if w > 0.0 {
            last_positive = i;
        }
        acc += w;
        if target < acc {
            return i;
        }
    }
    last_positive
}

/// In-place normalised Walsh–Hadamard transform, `H^{⊗n}`.
pub fn walsh_hadamard(amps: &mut [Complex64]) {
    let n = amps.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in amps.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    amps.iter_mut().for_each(|a| *a *= scale);
}

/// Negates the amplitude of label zero.
pub fn flip_zero(amps: &mut [Complex64]) {
    amps[0] = -amps[0];
}

/// Multiplies each amplitude by `(−1)^χ(label)`.
pub fn predicate_phase<P: Fn(usize) -> bool>(amps: &mut [Complex64], chi: P) {
    for (label, a) in amps.iter_mut().enumerate() {
        if chi(label) {
            *a = -*a;
        }
    }
}
