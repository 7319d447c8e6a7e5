use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::noise::check_probability;
use super::state::Statevector;
use crate::error::{Error, Result};

/// Histogram of measured basis states. Keys are basis-state indices with
/// qubit 0 in the least significant bit; [`ShotCounts::bitstring`] renders
/// them with qubit 0 as the rightmost character.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotCounts {
    pub n_qubits: usize,
    pub counts: BTreeMap<u64, u64>,
    pub total_shots: u64,
}

impl ShotCounts {
    pub fn bitstring(&self, index: u64) -> String {
        (0..self.n_qubits)
            .rev()
            .map(|q| if (index >> q) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Count recorded for a bitstring such as `"011"`; zero when absent or
    /// malformed.
    pub fn get(&self, bits: &str) -> u64 {
        if bits.len() != self.n_qubits {
            return 0;
        }
        u64::from_str_radix(bits, 2)
            .ok()
            .and_then(|i| self.counts.get(&i).copied())
            .unwrap_or(0)
    }

    pub fn by_bitstring(&self) -> BTreeMap<String, u64> {
        self.counts.iter().map(|(&k, &v)| (self.bitstring(k), v)).collect()
    }

    /// Marginal shot estimate of `<Z>` on one qubit.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.n_qubits {
            return Err(Error::Index(format!("qubit {qubit} out of range")));
        }
        let ones: u64 = self
            .counts
            .iter()
            .filter(|(&k, _)| (k >> qubit) & 1 == 1)
            .map(|(_, &v)| v)
            .sum();
        Ok(1.0 - 2.0 * ones as f64 / self.total_shots as f64)
    }
}

/// Draws `shots` i.i.d. basis states from `|amplitude|^2`.
pub fn sample_bitstrings(state: &Statevector, shots: u64, seed: u64) -> Result<ShotCounts> {
    sample_bitstrings_with(state, shots, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn sample_bitstrings_with<R: Rng + ?Sized>(
    state: &Statevector,
    shots: u64,
    rng: &mut R,
) -> Result<ShotCounts> {
    if shots == 0 {
        return Err(Error::Argument("shots must be at least 1".into()));
    }
    let sampler = state.sampler();
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(sampler.draw(rng)).or_insert(0) += 1;
    }
    Ok(ShotCounts {
        n_qubits: state.n_qubits(),
        counts,
        total_shots: shots,
    })
}

/// Flips every recorded bit independently with probability `eps`.
pub fn apply_readout_noise(counts: &ShotCounts, eps: f64, seed: u64) -> Result<ShotCounts> {
    check_probability("eps", eps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BTreeMap::new();
    for (&index, &n) in &counts.counts {
        for _ in 0..n {
            let mut flipped = index;
            for q in 0..counts.n_qubits {
                if rng.random::<f64>() < eps {
                    flipped ^= 1 << q;
                }
            }
            *out.entry(flipped).or_insert(0) += 1;
        }
    }
    Ok(ShotCounts {
        n_qubits: counts.n_qubits,
        counts: out,
        total_shots: counts.total_shots,
    })
}
