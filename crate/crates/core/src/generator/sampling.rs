use rayon::prelude::*;

use super::ansatz::{build_parallel_circuit, StyleAnsatz};
use super::backend::{Backend, SampleMode};
use super::latent::LatentTensor;
use super::params::ParamVector;
use crate::error::{Error, Result};
use crate::rng;

/// One generated point before the inverse transform: `x_j = -<Z_j>`, so every
/// entry lies in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleVector(pub Vec<f64>);

impl SampleVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Output of [`generate_samples`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedBatch {
    /// `m` consecutive samples per latent tensor, in replica order.
    pub samples: Vec<SampleVector>,
    /// Shots per circuit when the estimates come from sampling.
    pub shots: Option<u64>,
    /// Circuits executed.
    pub circuits: usize,
}

/// Runs the replicated circuit once per latent tensor. Circuit `c` draws
/// its randomness from the stream derived from `(seed, c)`, so results do
/// not depend on scheduling.
pub fn generate_samples(
    ansatz: &StyleAnsatz,
    params: &ParamVector,
    latent_batch: &[LatentTensor],
    mode: &SampleMode,
    seed: u64,
) -> Result<GeneratedBatch> {
    let backend = mode.backend()?;
    generate_with_backend(ansatz, params, latent_batch, backend.as_ref(), seed)
}

pub fn generate_with_backend(
    ansatz: &StyleAnsatz,
    params: &ParamVector,
    latent_batch: &[LatentTensor],
    backend: &dyn Backend,
    seed: u64,
) -> Result<GeneratedBatch> {
    let n = ansatz.base_qubits;
    let per_circuit: Vec<Vec<SampleVector>> = latent_batch
        .par_iter()
        .enumerate()
        .map(|(c, latent)| {
            let circuit = build_parallel_circuit(ansatz, params, latent)?;
            let mut stream = rng::stream(seed, c as u64);
            let z = backend.expectations(&circuit, &mut stream)?;
            Ok(z
                .chunks(n)
                .map(|replica| SampleVector(replica.iter().map(|v| -v).collect()))
                .collect())
        })
        .collect::<Result<_>>()?;
    if per_circuit.iter().flatten().any(|s| s.0.iter().any(|v| !v.is_finite())) {
        return Err(Error::NonFinite("generator produced a non-finite sample".into()));
    }
    Ok(GeneratedBatch {
        samples: per_circuit.into_iter().flatten().collect(),
        shots: backend.shots(),
        circuits: latent_batch.len(),
    })
}
