//! Synthetic heavy-tailed datasets standing in for collider event samples.

use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::dataset::RawDataset;
use crate::error::{Error, Result};
use crate::rng;

/// Distribution of one synthetic column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ColumnFamily {
    /// `min * u^(-1/exponent)` for `u` uniform on `(0, 1]`.
    TruncatedPowerLaw { min: f64, exponent: f64 },
    /// `-scale * v^(-1/exponent)`: non-positive with a heavy negative tail.
    ShiftedNegativeHeavyTail { scale: f64, exponent: f64 },
    /// Normal restricted to `[lo, hi]` by rejection.
    ClippedGaussian { mean: f64, sigma: f64, lo: f64, hi: f64 },
}

impl ColumnFamily {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::TruncatedPowerLaw { min, exponent } => min.is_finite() && min > 0.0 && exponent.is_finite() && exponent > 0.0,
            Self::ShiftedNegativeHeavyTail { scale, exponent } => {
                scale.is_finite() && scale > 0.0 && exponent.is_finite() && exponent > 0.0
            }
            Self::ClippedGaussian { mean, sigma, lo, hi } => {
                [mean, sigma, lo, hi].iter().all(|v| v.is_finite())
                    && sigma > 0.0
                    && lo < hi
                    // Keep rejection sampling from stalling on a far-away window.
                    && (lo - mean) / sigma < 6.0
                    && (hi - mean) / sigma > -6.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Configuration(format!("invalid column family {self:?}")))
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // `1 - [0, 1)` is `(0, 1]`, which keeps the power laws finite.
        match *self {
            Self::TruncatedPowerLaw { min, exponent } => min * (1.0 - rng.random::<f64>()).powf(-1.0 / exponent),
            Self::ShiftedNegativeHeavyTail { scale, exponent } => {
                -scale * (1.0 - rng.random::<f64>()).powf(-1.0 / exponent)
            }
            Self::ClippedGaussian { mean, sigma, lo, hi } => loop {
                let z: f64 = rng.sample(StandardNormal);
                let x = mean + sigma * z;
                if (lo..=hi).contains(&x) {
                    break x;
                }
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleColumn {
    pub name: String,
    #[serde(flatten)]
    pub family: ColumnFamily,
}

/// Seeded recipe for a synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticOracleSpec {
    pub seed: u64,
    pub columns: Vec<OracleColumn>,
}

impl Default for SyntheticOracleSpec {
    /// Three columns shaped like `s` (GeV²), `t` (GeV²) and rapidity `y`.
    fn default() -> Self {
        Self {
            seed: 20240,
            columns: vec![
                OracleColumn {
                    name: "s".into(),
                    family: ColumnFamily::TruncatedPowerLaw {
                        min: 1.2e5,
                        exponent: 3.5,
                    },
                },
                OracleColumn {
                    name: "t".into(),
                    family: ColumnFamily::ShiftedNegativeHeavyTail {
                        scale: 1.0e4,
                        exponent: 3.0,
                    },
                },
                OracleColumn {
                    name: "y".into(),
                    family: ColumnFamily::ClippedGaussian {
                        mean: 0.0,
                        sigma: 1.0,
                        lo: -2.5,
                        hi: 2.5,
                    },
                },
            ],
        }
    }
}

impl SyntheticOracleSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.columns.is_empty() {
            return Err(Error::Configuration("oracle needs at least one column".into()));
        }
        for c in &self.columns {
            c.family.validate()?;
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Configuration(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Configuration(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("oracle spec serializes")
    }
}

/// Draws `k` rows. Column `j` uses its own stream, so adding a column does
/// not perturb the others.
pub fn synth_dataset(spec: &SyntheticOracleSpec, k: usize) -> Result<RawDataset> {
    spec.validate()?;
    if k == 0 {
        return Err(Error::Configuration("k must be at least 1".into()));
    }
    let data: Vec<Vec<f64>> = spec
        .columns
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let mut s = rng::stream(spec.seed, j as u64);
            (0..k).map(|_| c.family.sample(&mut s)).collect()
        })
        .collect();
    RawDataset::from_columns(spec.columns.iter().map(|c| c.name.clone()).collect(), &data)
}
