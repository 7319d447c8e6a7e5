//! End-to-end pipelines shared by the CLI and the acceptance tests.

use super::config::{config_hash, Checkpoint, RunConfig, CHECKPOINT_VERSION};
use super::plan::RunPlan;
use crate::adversary::{train_observed, EpochLoss, TrainOutcome};
use crate::datapipe::{HistogramGrid, RawDataset, Scale, TransformModel};
use crate::error::{Error, Result};
use crate::evaluation::{kl_with_errorbars, reference_axes, sample_variance, KlResult, VarianceVector};
use crate::generator::{generate_samples, LatentTensor, SampleMode, SampleVector};
use crate::rng;

const LATENT_STREAM: u64 = 0;
const EXECUTION_STREAM: u64 = 1;

#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub checkpoint: Checkpoint,
    pub outcome: TrainOutcome,
}

/// Fits the transform on `data`, trains on the transformed rows and bundles
/// the result.
pub fn train_pipeline(
    data: &RawDataset,
    config: &RunConfig,
    observer: &mut dyn FnMut(&EpochLoss),
) -> Result<TrainedModel> {
    config.ansatz.validate()?;
    if data.n_columns() != config.ansatz.base_qubits {
        return Err(Error::Configuration(format!(
            "data has {} columns but the generator has {} qubits",
            data.n_columns(),
            config.ansatz.base_qubits
        )));
    }
    let (transform, rows) = TransformModel::fit(data)?;
    let outcome = train_observed(&config.train, &rows, &config.ansatz, None, None, observer)?;
    let checkpoint = Checkpoint {
        version: CHECKPOINT_VERSION,
        ansatz: config.ansatz,
        params: outcome.params.clone(),
        discriminator: outcome.discriminator.clone(),
        transform,
        config: config.clone(),
        config_hash: config_hash(config),
    };
    Ok(TrainedModel { checkpoint, outcome })
}

/// Generated samples in both the circuit's `[-1, 1]` space and physical units.
#[derive(Debug, Clone)]
pub struct PhysicalSamples {
    pub plan: RunPlan,
    pub samples: Vec<SampleVector>,
    pub shots: Option<u64>,
    pub data: RawDataset,
    /// Entries clamped by the inverse transform.
    pub clamped: usize,
}

/// Draws `samples` points using `replicas` copies of the base circuit per
/// execution. Latents and execution noise come from independent streams
/// of `seed`, so two modes run with the same seed share their latents.
pub fn generate_physical(
    checkpoint: &Checkpoint,
    samples: usize,
    replicas: usize,
    mode: &SampleMode,
    seed: u64,
) -> Result<PhysicalSamples> {
    if samples == 0 {
        return Err(Error::Argument("at least one sample must be requested".into()));
    }
    let shots = match mode {
        SampleMode::Exact => 1,
        SampleMode::Shots { shots, .. } => *shots,
    };
    let plan = RunPlan::new(samples, replicas, shots.max(1), 1)?;
    let ansatz = checkpoint.ansatz.with_replicas(replicas);
    ansatz.validate()?;
    let latent_seed = rng::derive_seed(seed, LATENT_STREAM);
    let latents: Vec<LatentTensor> = (0..plan.circuits)
        .map(|c| LatentTensor::sample(replicas, ansatz.latent_dim, &mut rng::stream(latent_seed, c as u64)))
        .collect();
    let mut batch = generate_samples(
        &ansatz,
        &checkpoint.params,
        &latents,
        mode,
        rng::derive_seed(seed, EXECUTION_STREAM),
    )?;
    batch.samples.truncate(samples);
    let inverse = checkpoint.transform.inverse_transform(&batch.samples)?;
    Ok(PhysicalSamples {
        plan,
        samples: batch.samples,
        shots: batch.shots,
        data: inverse.data,
        clamped: inverse.clamped,
    })
}

/// Reference histograms on the grids fitted to `reference`.
pub fn reference_histograms(reference: &RawDataset, n_bins: usize, scales: &[Option<Scale>]) -> Result<Vec<HistogramGrid>> {
    let axes = reference_axes(reference, n_bins, scales)?;
    axes.iter().enumerate().map(|(j, a)| a.bin(&reference.column(j))).collect()
}

/// Per-dimension KL with shot-noise error bars of generated samples against
/// `reference`.
pub fn score_samples(
    generated: &PhysicalSamples,
    transform: &TransformModel,
    reference: &[HistogramGrid],
) -> Result<Vec<KlResult>> {
    let variances = match generated.shots {
        Some(_) => sample_variance(&generated.samples, generated.shots)?,
        // Exact expectations carry no shot noise.
        None => generated.samples.iter().map(|s| VarianceVector(vec![0.0; s.values().len()])).collect(),
    };
    kl_with_errorbars(&generated.samples, &variances, transform, reference)
}

#[derive(Debug, Clone)]
pub struct NoiseSweepRow {
    pub mode: SampleMode,
    pub kl: Vec<KlResult>,
    pub clamped: usize,
}

/// Generates `samples` points in each of `modes` with a shared seed and
/// scores each against `reference`.
#[allow(clippy::too_many_arguments)]
pub fn noise_sweep(
    checkpoint: &Checkpoint,
    modes: &[SampleMode],
    samples: usize,
    replicas: usize,
    seed: u64,
    reference: &RawDataset,
    n_bins: usize,
    scales: &[Option<Scale>],
) -> Result<Vec<NoiseSweepRow>> {
    if reference.columns() != checkpoint.transform.columns.as_slice() {
        return Err(Error::Grid(format!(
            "reference columns {:?} do not match the model's {:?}",
            reference.columns(),
            checkpoint.transform.columns
        )));
    }
    let grids = reference_histograms(reference, n_bins, scales)?;
    modes
        .iter()
        .map(|mode| {
            let generated = generate_physical(checkpoint, samples, replicas, mode, seed)?;
            Ok(NoiseSweepRow {
                mode: *mode,
                kl: score_samples(&generated, &checkpoint.transform, &grids)?,
                clamped: generated.clamped,
            })
        })
        .collect()
}
