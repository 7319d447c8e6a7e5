//! Stochastic Pauli noise and readout error.
//!
//! Depolarizing noise is unravelled into trajectories: after a noisy gate a
//! uniformly random non-identity Pauli string is applied with probability
//! `p`. Averaged over trajectories this reproduces the depolarizing channel
//! `rho -> (1 - p) rho + p / (4^k - 1) sum_P P rho P`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gates::{GateOp, Pauli};
use super::state::{init_state, Statevector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Depolarizing probability after each one-qubit gate.
    pub p1: f64,
    /// Depolarizing probability after each two-qubit gate.
    pub p2: f64,
    /// Independent bit-flip probability per measured qubit.
    pub readout_eps: f64,
}

impl NoiseSpec {
    pub const NONE: NoiseSpec = NoiseSpec {
        p1: 0.0,
        p2: 0.0,
        readout_eps: 0.0,
    };

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2), ("readout_eps", self.readout_eps)] {
            check_probability(name, p)?;
        }
        Ok(())
    }

    pub fn gate_error(&self, arity: usize) -> f64 {
        if arity >= 2 {
            self.p2
        } else {
            self.p1
        }
    }

    fn has_gate_noise(&self) -> bool {
        self.p1 > 0.0 || self.p2 > 0.0
    }
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Argument(format!("{name} = {p} is not a probability")));
    }
    Ok(())
}

/// Maps `k` in `1..4^n` to a non-identity Pauli string on `n` qubits.
fn pauli_string(k: usize, n: usize) -> impl Iterator<Item = Pauli> {
    (0..n).map(move |i| Pauli::ALL[(k >> (2 * i)) & 3])
}

fn check_targets(state: &Statevector, targets: &[usize]) -> Result<()> {
    match targets.len() {
        0 => return Err(Error::Argument("depolarizing needs at least one target".into())),
        1 | 2 => {}
        n => {
            return Err(Error::Unsupported(format!(
                "depolarizing on {n} qubits (only 1 or 2 supported)"
            )))
        }
    }
    if targets.len() == 2 && targets[0] == targets[1] {
        return Err(Error::Index("depolarizing targets must be distinct".into()));
    }
    if let Some(&q) = targets.iter().find(|&&q| q >= state.n_qubits()) {
        return Err(Error::Index(format!("qubit {q} out of range")));
    }
    Ok(())
}

/// Samples one trajectory of the depolarizing channel on `targets`.
pub fn apply_depolarizing<R: Rng + ?Sized>(
    state: &mut Statevector,
    targets: &[usize],
    p: f64,
    rng: &mut R,
) -> Result<()> {
    check_probability("p", p)?;
    check_targets(state, targets)?;
    if rng.random::<f64>() < p {
        let k = rng.random_range(1..1usize << (2 * targets.len()));
        for (q, pauli) in targets.iter().zip(pauli_string(k, targets.len())) {
            state.apply_pauli(*q, pauli)?;
        }
    }
    Ok(())
}

/// Runs `gates` from `|0...0>`. With `noise`, one depolarizing trajectory
/// step follows every gate, using `p1` or `p2` by gate arity.
pub fn run_circuit<R: Rng + ?Sized>(
    gates: &[GateOp],
    n_qubits: usize,
    noise: Option<&NoiseSpec>,
    rng: &mut R,
) -> Result<Statevector> {
    if let Some(n) = noise {
        n.validate()?;
    }
    let mut state = init_state(n_qubits)?;
    for gate in gates {
        state.apply_gate(gate)?;
        if let Some(n) = noise {
            apply_depolarizing(&mut state, &gate.targets, n.gate_error(gate.arity()), rng)?;
        }
    }
    Ok(state)
}

/// Per-qubit count of `1` outcomes over a batch of shots.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotTally {
    pub shots: u64,
    pub ones: Vec<u64>,
}

impl ShotTally {
    /// Shot estimate of `<Z>` for one qubit.
    pub fn expectation_z(&self, qubit: usize) -> f64 {
        1.0 - 2.0 * self.ones[qubit] as f64 / self.shots as f64
    }
}

/// Measures every qubit `shots` times, each shot on an independent noise
/// trajectory, with readout flips applied to the recorded bits.
///
/// Shots whose trajectory draws no Pauli error reuse the noiseless state, so
/// the cost scales with the number of faulty shots. The random stream
/// consumed per shot does not depend on `readout_eps`, which keeps runs that
/// differ only in readout error on common random numbers.
pub fn sample_noisy_tally<R: Rng + ?Sized>(
    gates: &[GateOp],
    n_qubits: usize,
    noise: &NoiseSpec,
    shots: u64,
    rng: &mut R,
) -> Result<ShotTally> {
    if shots == 0 {
        return Err(Error::Argument("shots must be at least 1".into()));
    }
    noise.validate()?;
    let ideal = run_circuit(gates, n_qubits, None, rng)?;
    let ideal_sampler = ideal.sampler();
    let mut ones = vec![0u64; n_qubits];
    let mut faults: Vec<(usize, usize)> = Vec::new();
    for _ in 0..shots {
        faults.clear();
        if noise.has_gate_noise() {
            for (gi, gate) in gates.iter().enumerate() {
                if rng.random::<f64>() < noise.gate_error(gate.arity()) {
                    let k = rng.random_range(1..1usize << (2 * gate.arity()));
                    faults.push((gi, k));
                }
            }
        }
        let outcome = if faults.is_empty() {
            ideal_sampler.draw(rng)
        } else {
            let mut state = init_state(n_qubits)?;
            let mut next = faults.iter().peekable();
            for (gi, gate) in gates.iter().enumerate() {
                state.apply_gate(gate)?;
                while let Some(&&(fi, k)) = next.peek() {
                    if fi != gi {
                        break;
                    }
                    for (q, pauli) in gate.targets.iter().zip(pauli_string(k, gate.arity())) {
                        state.apply_pauli(*q, pauli)?;
                    }
                    next.next();
                }
            }
            state.sampler().draw(rng)
        };
        for (q, count) in ones.iter_mut().enumerate() {
            let mut bit = (outcome >> q) & 1;
            if rng.random::<f64>() < noise.readout_eps {
                bit ^= 1;
            }
            *count += bit;
        }
    }
    Ok(ShotTally { shots, ones })
}
