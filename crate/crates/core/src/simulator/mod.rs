//! Statevector simulation of small rotation circuits, exact or by shots,
//! with optional trajectory-sampled Pauli noise and readout error.

mod gates;
mod noise;
mod shots;
mod state;

pub use gates::{pauli_matrix, ry_matrix, rz_matrix, GateKind, GateOp, Pauli};
pub use noise::{apply_depolarizing, run_circuit, sample_noisy_tally, NoiseSpec, ShotTally};
pub use shots::{apply_readout_noise, sample_bitstrings, sample_bitstrings_with, ShotCounts};
pub use state::{init_state, BasisSampler, Statevector, MAX_DENSE_QUBITS, MAX_QUBITS};
