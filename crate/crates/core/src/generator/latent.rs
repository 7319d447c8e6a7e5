use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Latent inputs for one execution of the replicated circuit: one
/// standard-normal row of `latent_dim` values per replica.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentTensor {
    replicas: usize,
    latent_dim: usize,
    values: Vec<f64>,
}

impl LatentTensor {
    pub fn new(replicas: usize, latent_dim: usize, values: Vec<f64>) -> Result<Self> {
        if replicas == 0 || latent_dim == 0 || values.len() != replicas * latent_dim {
            return Err(Error::Configuration(format!(
                "latent tensor {replicas}x{latent_dim} cannot hold {} values",
                values.len()
            )));
        }
        Ok(Self {
            replicas,
            latent_dim,
            values,
        })
    }

    pub fn zeros(replicas: usize, latent_dim: usize) -> Self {
        Self {
            replicas,
            latent_dim,
            values: vec![0.0; replicas * latent_dim],
        }
    }

    pub fn sample<R: Rng + ?Sized>(replicas: usize, latent_dim: usize, rng: &mut R) -> Self {
        Self {
            replicas,
            latent_dim,
            values: (0..replicas * latent_dim).map(|_| rng.sample(StandardNormal)).collect(),
        }
    }

    /// Stacks the same row `replicas` times.
    pub fn repeated(row: &[f64], replicas: usize) -> Self {
        Self {
            replicas,
            latent_dim: row.len(),
            values: row.repeat(replicas),
        }
    }

    pub fn replicas(&self) -> usize {
        self.replicas
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.latent_dim..(i + 1) * self.latent_dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.latent_dim)
    }
}
