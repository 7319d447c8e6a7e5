//! Run configuration, checkpoint bundles and run manifests.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::profiles::{DeviceProfile, PROFILE_VERSION};
use crate::adversary::{DiscriminatorNet, TrainConfig};
use crate::datapipe::TransformModel;
use crate::error::{Error, Result};
use crate::generator::{ParamVector, StyleAnsatz};

pub const CHECKPOINT_VERSION: u32 = 1;

/// Contents of a `train` config file: an `[ansatz]` and a `[train]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub ansatz: StyleAnsatz,
    pub train: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            ansatz: StyleAnsatz::new(3, 1, 5),
            train: TrainConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Configuration(single_line(&e.to_string())))?;
        cfg.ansatz.validate()?;
        if cfg.ansatz.replicas != 1 {
            return Err(Error::Configuration(
                "training uses the base circuit; set replicas when generating".into(),
            ));
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn single_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// SHA-256 of the config's canonical JSON.
pub fn config_hash(config: &RunConfig) -> String {
    sha256_hex(&serde_json::to_vec(config).expect("config serializes"))
}

/// Everything needed to generate from a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub version: u32,
    pub ansatz: StyleAnsatz,
    pub params: ParamVector,
    pub discriminator: DiscriminatorNet,
    pub transform: TransformModel,
    pub config: RunConfig,
    pub config_hash: String,
}

impl Checkpoint {
    pub fn validate(&self) -> Result<()> {
        if self.version != CHECKPOINT_VERSION {
            return Err(Error::Parse(format!("unsupported checkpoint version {}", self.version)));
        }
        self.ansatz.validate()?;
        if self.params.len() != self.ansatz.param_count() {
            return Err(Error::Configuration(format!(
                "checkpoint holds {} parameter pairs, ansatz needs {}",
                self.params.len(),
                self.ansatz.param_count()
            )));
        }
        if self.params.to_flat().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("checkpoint parameters are not finite".into()));
        }
        self.discriminator.validate()?;
        if self.transform.n_columns() != self.ansatz.base_qubits {
            return Err(Error::Configuration(format!(
                "transform has {} columns, generator emits {}",
                self.transform.n_columns(),
                self.ansatz.base_qubits
            )));
        }
        if config_hash(&self.config) != self.config_hash {
            return Err(Error::Parse("checkpoint config hash does not match its config".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cp: Self = serde_json::from_str(text)?;
        cp.validate()?;
        Ok(cp)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileStamp {
    pub name: String,
    pub version: u32,
    pub checksum: String,
}

/// Record of one CLI run: the command, its resolved settings, the device
/// profile (if any) and checksums of every file written. Carries no
/// timestamps so identical runs give identical manifests.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub crate_version: String,
    pub settings: BTreeMap<String, serde_json::Value>,
    pub profile: Option<ProfileStamp>,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            ..Self::default()
        }
    }

    pub fn setting(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).expect("setting serializes");
        self.settings.insert(key.to_string(), v);
        self
    }

    pub fn with_profile(&mut self, profile: &DeviceProfile) -> &mut Self {
        self.profile = Some(ProfileStamp {
            name: profile.name.clone(),
            version: PROFILE_VERSION,
            checksum: profile.checksum(),
        });
        self
    }

    /// Records the SHA-256 of an input file.
    pub fn input(&mut self, path: impl AsRef<Path>) -> Result<&mut Self> {
        let path = path.as_ref();
        let digest = sha256_hex(&fs::read(path)?);
        self.inputs.insert(path.display().to_string(), digest);
        Ok(self)
    }

    /// Records the SHA-256 of a written file.
    pub fn output(&mut self, path: impl AsRef<Path>) -> Result<&mut Self> {
        let path = path.as_ref();
        let digest = sha256_hex(&fs::read(path)?);
        self.outputs.insert(path.display().to_string(), digest);
        Ok(self)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}
