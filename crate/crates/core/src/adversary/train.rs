//! Alternating adversarial optimisation of generator and discriminator.

use std::f64::consts::LN_2;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adam::Adam;
use super::net::{default_layers, DiscriminatorNet, LayerSpec};
use super::tape::{Tape, Tensor};
use crate::error::{Error, Result};
use crate::generator::{build_base_circuit, exact_samples, sample_jacobian, ParamVector, StyleAnsatz};
use crate::rng;

/// Which label marks real data. The discriminator's output always estimates
/// `P(real)`; under [`LabelConvention::RealIsZero`] the loss is taken on
/// `1 - output` against swapped labels, which is the same objective.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelConvention {
    #[default]
    RealIsOne,
    RealIsZero,
}

impl LabelConvention {
    fn real(self) -> f64 {
        match self {
            Self::RealIsOne => 1.0,
            Self::RealIsZero => 0.0,
        }
    }

    fn fake(self) -> f64 {
        1.0 - self.real()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub n_epochs: usize,
    pub learning_rate_g: f64,
    pub learning_rate_d: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub discriminator_steps_per_generator_step: usize,
    /// Generator weights start uniform in `±generator_init_scale`; biases in `±pi`.
    pub generator_init_scale: f64,
    pub label_convention: LabelConvention,
    /// Skip generator updates (losses are still reported).
    pub freeze_generator: bool,
    /// Discriminator layers; defaults to [`default_layers`].
    pub discriminator: Option<Vec<LayerSpec>>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 128,
            n_epochs: 50,
            learning_rate_g: 5e-3,
            learning_rate_d: 5e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
            discriminator_steps_per_generator_step: 1,
            generator_init_scale: 0.1,
            label_convention: LabelConvention::RealIsOne,
            freeze_generator: false,
            discriminator: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, n_samples: usize) -> Result<()> {
        let positive = [
            self.learning_rate_g,
            self.learning_rate_d,
            self.beta1,
            self.beta2,
            self.epsilon,
            self.generator_init_scale,
        ]
        .iter()
        .all(|v| v.is_finite() && *v > 0.0);
        if !positive || self.beta1 >= 1.0 || self.beta2 >= 1.0 {
            return Err(Error::Configuration(
                "learning rates, Adam moments and init scale must be positive (moments below 1)".into(),
            ));
        }
        if self.batch_size == 0 || self.n_epochs == 0 || self.discriminator_steps_per_generator_step == 0 {
            return Err(Error::Configuration(
                "batch_size, n_epochs and discriminator steps must be positive".into(),
            ));
        }
        if self.batch_size > n_samples {
            return Err(Error::Configuration(format!(
                "batch_size {} exceeds the {n_samples} training samples",
                self.batch_size
            )));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Configuration(e.to_string()))
    }

    pub fn layers(&self, n_inputs: usize) -> Vec<LayerSpec> {
        self.discriminator.clone().unwrap_or_else(|| default_layers(n_inputs))
    }
}

/// Mean losses over the batches of one epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    pub loss_g: f64,
    pub loss_d: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub params: ParamVector,
    pub discriminator: DiscriminatorNet,
    pub history: Vec<EpochLoss>,
}

impl TrainOutcome {
    /// `|loss_g - ln 2|` of the final epoch: zero at the ideal equilibrium.
    pub fn equilibrium_gap(&self) -> f64 {
        self.history.last().map_or(f64::NAN, |e| (e.loss_g - LN_2).abs())
    }

    /// Writes `epoch,loss_g,loss_d` rows.
    pub fn write_history_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["epoch", "loss_g", "loss_d"])?;
        for e in &self.history {
            w.write_record([e.epoch.to_string(), format!("{:?}", e.loss_g), format!("{:?}", e.loss_d)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_history(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_history_csv(std::fs::File::create(path)?)
    }
}

fn sample_latents(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect()).collect()
}

fn generate_rows(ansatz: &StyleAnsatz, params: &ParamVector, latents: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    latents
        .par_iter()
        .map(|z| exact_samples(&build_base_circuit(ansatz, params, z)?))
        .collect()
}

fn non_finite(what: &str, epoch: usize, batch: usize) -> Error {
    Error::NonFinite(format!("{what} became non-finite at epoch {epoch}, batch {batch}; training aborted"))
}

/// Fraction of `real` scored above one half plus `fake` scored at or below.
pub fn discriminator_accuracy(net: &DiscriminatorNet, real: &[Vec<f64>], fake: &[Vec<f64>]) -> Result<f64> {
    let pr = net.predict(real)?;
    let pf = net.predict(fake)?;
    let hits = pr.iter().filter(|&&p| p > 0.5).count() + pf.iter().filter(|&&p| p <= 0.5).count();
    Ok(hits as f64 / (real.len() + fake.len()) as f64)
}

/// Trains from fresh, seeded initial values (or `init_params` for the
/// generator).
pub fn train(
    config: &TrainConfig,
    data: &[Vec<f64>],
    ansatz: &StyleAnsatz,
    init_params: Option<ParamVector>,
) -> Result<TrainOutcome> {
    train_observed(config, data, ansatz, init_params, None, &mut |_| {})
}

/// [`train`] with an optional starting discriminator and a per-epoch callback.
pub fn train_observed(
    config: &TrainConfig,
    data: &[Vec<f64>],
    ansatz: &StyleAnsatz,
    init_params: Option<ParamVector>,
    init_discriminator: Option<DiscriminatorNet>,
    observer: &mut dyn FnMut(&EpochLoss),
) -> Result<TrainOutcome> {
    config.validate(data.len())?;
    ansatz.validate()?;
    let n = ansatz.base_qubits;
    if let Some(i) = data.iter().position(|r| r.len() != n) {
        return Err(Error::Configuration(format!(
            "training row {i} has {} entries, generator emits {n}",
            data[i].len()
        )));
    }
    if data.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Domain("training data holds non-finite values".into()));
    }

    let mut params = match init_params {
        Some(p) if p.len() == ansatz.param_count() => p,
        Some(p) => {
            return Err(Error::Configuration(format!(
                "{} parameter pairs for an ansatz needing {}",
                p.len(),
                ansatz.param_count()
            )))
        }
        None => ParamVector::random(
            ansatz.param_count(),
            config.generator_init_scale,
            &mut rng::stream(config.seed, 1),
        ),
    };
    let mut disc = match init_discriminator {
        Some(d) => {
            d.validate()?;
            if d.n_inputs != n {
                return Err(Error::Configuration("discriminator input width mismatch".into()));
            }
            d
        }
        None => DiscriminatorNet::new(n, config.layers(n), &mut rng::stream(config.seed, 0))?,
    };
    let mut shuffle_rng = rng::stream(config.seed, 2);
    let mut latent_rng = rng::stream(config.seed, 3);

    let mut adam_g = Adam::new(2 * params.len(), config.beta1, config.beta2, config.epsilon);
    let mut adam_d = Adam::new(disc.param_count(), config.beta1, config.beta2, config.epsilon);
    let conv = config.label_convention;
    let b = config.batch_size;
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut history = Vec::with_capacity(config.n_epochs);

    for epoch in 0..config.n_epochs {
        order.shuffle(&mut shuffle_rng);
        let (mut sum_g, mut sum_d) = (0.0, 0.0);
        let batches = data.len() / b;
        for batch in 0..batches {
            let real: Vec<Vec<f64>> = order[batch * b..(batch + 1) * b].iter().map(|&i| data[i].clone()).collect();

            let mut loss_d = 0.0;
            for _ in 0..config.discriminator_steps_per_generator_step {
                let z = sample_latents(&mut latent_rng, b, ansatz.latent_dim);
                let fake = generate_rows(ansatz, &params, &z)?;
                let mut rows = real.clone();
                rows.extend(fake);
                let labels: Vec<f64> = (0..2 * b).map(|i| if i < b { conv.real() } else { conv.fake() }).collect();
                let mut tape = Tape::new();
                let x = tape.leaf(Tensor::from_rows(&rows)?);
                let (p, vars) = disc.record(&mut tape, x)?;
                let p = match conv {
                    LabelConvention::RealIsOne => p,
                    LabelConvention::RealIsZero => tape.affine(p, -1.0, 1.0),
                };
                let loss = tape.bce(p, &labels)?;
                loss_d = tape.value(loss).data[0];
                let grads = tape.backward(loss)?;
                let flat: Vec<f64> = vars
                    .iter()
                    .map(|&v| grads.get(v).map(|t| t.data.clone()))
                    .collect::<Result<Vec<_>>>()?
                    .concat();
                if !loss_d.is_finite() || flat.iter().any(|g| !g.is_finite()) {
                    return Err(non_finite("discriminator loss", epoch, batch));
                }
                let mut theta = disc.flat_params();
                adam_d.step(&mut theta, &flat, config.learning_rate_d);
                disc.set_flat_params(&theta)?;
            }

            let z = sample_latents(&mut latent_rng, b, ansatz.latent_dim);
            let jacobians = z
                .par_iter()
                .map(|row| sample_jacobian(ansatz, &params, row))
                .collect::<Result<Vec<_>>>()?;
            let xs: Vec<Vec<f64>> = jacobians.iter().map(|j| j.values.clone()).collect();
            let mut tape = Tape::new();
            let x = tape.leaf(Tensor::from_rows(&xs)?);
            let (p, _) = disc.record(&mut tape, x)?;
            let p = match conv {
                LabelConvention::RealIsOne => p,
                LabelConvention::RealIsZero => tape.affine(p, -1.0, 1.0),
            };
            let loss = tape.bce(p, &vec![conv.real(); b])?;
            let loss_g = tape.value(loss).data[0];
            if !loss_g.is_finite() {
                return Err(non_finite("generator loss", epoch, batch));
            }
            if !config.freeze_generator {
                let dx = tape.backward(loss)?.get(x)?.clone();
                let mut grad = vec![0.0; 2 * params.len()];
                for (r, jac) in jacobians.iter().enumerate() {
                    for (q, row) in jac.rows.iter().enumerate() {
                        let g = dx.at(r, q);
                        for (acc, d) in grad.iter_mut().zip(row) {
                            *acc += g * d;
                        }
                    }
                }
                if grad.iter().any(|g| !g.is_finite()) {
                    return Err(non_finite("generator gradient", epoch, batch));
                }
                let mut theta = params.to_flat();
                adam_g.step(&mut theta, &grad, config.learning_rate_g);
                params = ParamVector::from_flat(&theta)?;
            }
            sum_g += loss_g;
            sum_d += loss_d;
        }
        let e = EpochLoss {
            epoch,
            loss_g: sum_g / batches as f64,
            loss_d: sum_d / batches as f64,
        };
        observer(&e);
        history.push(e);
    }
    Ok(TrainOutcome {
        params,
        discriminator: disc,
        history,
    })
}

/// Draws `count` exact samples from the base circuit; used to build
/// training sets from a known generator.
pub fn sample_generator(
    ansatz: &StyleAnsatz,
    params: &ParamVector,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let z = sample_latents(&mut rng::stream(seed, 0), count, ansatz.latent_dim);
    generate_rows(ansatz, params, &z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> TrainConfig {
        TrainConfig {
            batch_size: 16,
            n_epochs: 2,
            seed: 5,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate(10).is_err());
        assert!(TrainConfig::default().validate(1000).is_ok());
        let bad = TrainConfig {
            learning_rate_g: 0.0,
            ..TrainConfig::default()
        };
        assert!(bad.validate(1000).is_err());
        assert!(TrainConfig::from_toml("batch_size = 4\nunknown = 1\n").is_err());
        let c = TrainConfig::from_toml("batch_size = 4\nlabel_convention = \"real-is-zero\"\n").unwrap();
        assert_eq!(c.batch_size, 4);
        assert_eq!(c.label_convention, LabelConvention::RealIsZero);
    }

    #[test]
    fn training_is_deterministic() {
        let a = StyleAnsatz::new(3, 1, 5);
        let data = sample_generator(&a, &ParamVector::random(12, 1.0, &mut rng::stream(1, 1)), 64, 2).unwrap();
        let r1 = train(&small_config(), &data, &a, None).unwrap();
        let r2 = train(&small_config(), &data, &a, None).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.history.len(), 2);
        let other = TrainConfig {
            seed: 6,
            ..small_config()
        };
        assert_ne!(train(&other, &data, &a, None).unwrap().params, r1.params);
    }

    #[test]
    fn label_swap_keeps_the_trajectory() {
        let a = StyleAnsatz::new(3, 1, 5);
        let data = sample_generator(&a, &ParamVector::random(12, 1.0, &mut rng::stream(3, 1)), 64, 4).unwrap();
        let one = train(&small_config(), &data, &a, None).unwrap();
        let zero = train(
            &TrainConfig {
                label_convention: LabelConvention::RealIsZero,
                ..small_config()
            },
            &data,
            &a,
            None,
        )
        .unwrap();
        for (x, y) in one.params.to_flat().iter().zip(zero.params.to_flat()) {
            assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
        for (x, y) in one.discriminator.flat_params().iter().zip(zero.discriminator.flat_params()) {
            assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn frozen_generator_is_untouched() {
        let a = StyleAnsatz::new(3, 1, 5);
        let p = ParamVector::random(12, 0.1, &mut rng::stream(9, 9));
        let data = vec![vec![0.1, 0.2, 0.3]; 32];
        let cfg = TrainConfig {
            freeze_generator: true,
            ..small_config()
        };
        assert_eq!(train(&cfg, &data, &a, Some(p.clone())).unwrap().params, p);
    }

    #[test]
    fn rejects_mismatched_rows() {
        let a = StyleAnsatz::new(3, 1, 5);
        let data = vec![vec![0.0; 2]; 32];
        assert!(matches!(train(&small_config(), &data, &a, None), Err(Error::Configuration(_))));
    }
}
