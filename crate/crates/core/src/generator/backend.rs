//! Execution backends that turn a circuit into per-qubit `<Z>` estimates.
//!
//! Backends are looked up by name in a [`Registry`]; the built-in entries are
//! `exact`, `shots` and `noisy`.

use std::sync::OnceLock;

use rand_chacha::ChaCha8Rng;

use super::ansatz::Circuit;
use crate::error::{Error, Result};
use crate::registry::Registry;
use crate::simulator::{run_circuit, sample_noisy_tally, NoiseSpec};

pub trait Backend: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;

    /// Shots per circuit, `None` for exact expectation values.
    fn shots(&self) -> Option<u64>;

    /// `<Z>` estimate for every qubit of `circuit`.
    fn expectations(&self, circuit: &Circuit, rng: &mut ChaCha8Rng) -> Result<Vec<f64>>;
}

/// Options a backend factory may read.
#[derive(Debug, Clone, Default)]
pub struct BackendOptions {
    pub shots: Option<u64>,
    pub noise: Option<NoiseSpec>,
}

#[derive(Debug)]
pub struct ExactBackend;

impl Backend for ExactBackend {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn shots(&self) -> Option<u64> {
        None
    }

    fn expectations(&self, circuit: &Circuit, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        let state = run_circuit(&circuit.gates, circuit.n_qubits, None, rng)?;
        (0..circuit.n_qubits).map(|q| state.expectation_z(q)).collect()
    }
}

/// Finite-shot sampling, optionally through a noise model.
#[derive(Debug)]
pub struct ShotBackend {
    shots: u64,
    noise: NoiseSpec,
    label: &'static str,
}

impl ShotBackend {
    pub fn new(shots: u64, noise: Option<NoiseSpec>) -> Result<Self> {
        if shots == 0 {
            return Err(Error::Argument("shots must be at least 1".into()));
        }
        if let Some(n) = &noise {
            n.validate()?;
        }
        Ok(Self {
            shots,
            label: if noise.is_some() { "noisy" } else { "shots" },
            noise: noise.unwrap_or(NoiseSpec::NONE),
        })
    }
}

impl Backend for ShotBackend {
    fn name(&self) -> &'static str {
        self.label
    }

    fn shots(&self) -> Option<u64> {
        Some(self.shots)
    }

    fn expectations(&self, circuit: &Circuit, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        let tally = sample_noisy_tally(&circuit.gates, circuit.n_qubits, &self.noise, self.shots, rng)?;
        Ok((0..circuit.n_qubits).map(|q| tally.expectation_z(q)).collect())
    }
}

pub type BackendRegistry = Registry<dyn Backend, BackendOptions>;

impl BackendRegistry {
    pub fn with_builtins() -> Self {
        let mut reg = Registry::new("backend");
        reg.register("exact", |opts: &BackendOptions| {
            if opts.noise.is_some() {
                return Err(Error::Unsupported(
                    "the exact backend does not model noise; use shots".into(),
                ));
            }
            Ok(Box::new(ExactBackend) as Box<dyn Backend>)
        });
        reg.register("shots", |opts: &BackendOptions| {
            let shots = opts
                .shots
                .ok_or_else(|| Error::Argument("shots backend needs a shot count".into()))?;
            Ok(Box::new(ShotBackend::new(shots, None)?) as Box<dyn Backend>)
        });
        reg.register("noisy", |opts: &BackendOptions| {
            let shots = opts
                .shots
                .ok_or_else(|| Error::Argument("noisy backend needs a shot count".into()))?;
            let noise = opts
                .noise
                .ok_or_else(|| Error::Argument("noisy backend needs a noise model".into()))?;
            Ok(Box::new(ShotBackend::new(shots, Some(noise))?) as Box<dyn Backend>)
        });
        reg
    }
}

/// Process-wide registry with the built-in backends.
pub fn backends() -> &'static BackendRegistry {
    static REGISTRY: OnceLock<BackendRegistry> = OnceLock::new();
    REGISTRY.get_or_init(BackendRegistry::with_builtins)
}

/// How samples are produced: exact expectation values, or shot averages
/// with an optional noise model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleMode {
    Exact,
    Shots { shots: u64, noise: Option<NoiseSpec> },
}

impl SampleMode {
    pub fn backend_name(&self) -> &'static str {
        match self {
            SampleMode::Exact => "exact",
            SampleMode::Shots { noise: None, .. } => "shots",
            SampleMode::Shots { noise: Some(_), .. } => "noisy",
        }
    }

    pub fn options(&self) -> BackendOptions {
        match *self {
            SampleMode::Exact => BackendOptions::default(),
            SampleMode::Shots { shots, noise } => BackendOptions {
                shots: Some(shots),
                noise,
            },
        }
    }

    pub fn backend(&self) -> Result<Box<dyn Backend>> {
        backends().build(self.backend_name(), &self.options())
    }
}
