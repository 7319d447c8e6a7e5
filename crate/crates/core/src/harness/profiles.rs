//! Frozen calibration snapshots of the supported devices.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::simulator::NoiseSpec;

/// Version of the built-in profile table; bumped whenever a value changes.
pub const PROFILE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceProfile {
    pub name: String,
    pub n_qubits_max: usize,
    pub p1: f64,
    pub p2: f64,
    pub readout_eps: f64,
    /// Gate and readout durations in microseconds.
    pub t_1q_us: f64,
    pub t_2q_us: f64,
    pub t_readout_us: f64,
    pub parallel_circuits_per_job: usize,
    pub per_job_overhead_s: f64,
    /// Fixed cost per shot (reset and repetition delay), in microseconds.
    pub per_shot_overhead_us: f64,
    /// Name of the [`super::TimingModel`] used for gate time.
    pub timing: String,
}

impl DeviceProfile {
    pub fn noise(&self) -> NoiseSpec {
        NoiseSpec {
            p1: self.p1,
            p2: self.p2,
            readout_eps: self.readout_eps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.noise().validate()?;
        let times = [
            self.t_1q_us,
            self.t_2q_us,
            self.t_readout_us,
            self.per_job_overhead_s,
            self.per_shot_overhead_us,
        ];
        if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::Configuration(format!("profile `{}` has a negative or non-finite time", self.name)));
        }
        if self.n_qubits_max == 0 || self.parallel_circuits_per_job == 0 {
            return Err(Error::Configuration(format!(
                "profile `{}` needs at least one qubit and one circuit per job",
                self.name
            )));
        }
        Ok(())
    }

    /// SHA-256 of the profile's canonical JSON, in hex.
    pub fn checksum(&self) -> String {
        let json = serde_json::to_vec(self).expect("profile serializes");
        hex::encode(Sha256::digest(json))
    }
}

/// Built-in profiles: `ibm_torino`, `aria_1`, `ibm_cusco`.
pub fn builtin_profiles() -> Vec<DeviceProfile> {
    vec![
        DeviceProfile {
            name: "ibm_torino".into(),
            n_qubits_max: 133,
            p1: 5.8e-4,
            p2: 5.3e-3,
            readout_eps: 2.7e-2,
            t_1q_us: 0.032,
            t_2q_us: 0.101,
            t_readout_us: 1.56,
            parallel_circuits_per_job: 300,
            per_job_overhead_s: 3.0,
            per_shot_overhead_us: 250.0,
            timing: "depth".into(),
        },
        DeviceProfile {
            name: "aria_1".into(),
            n_qubits_max: 25,
            p1: 3e-4,
            p2: 6e-3,
            readout_eps: 5.1e-3,
            t_1q_us: 135.0,
            t_2q_us: 600.0,
            t_readout_us: 300.0,
            parallel_circuits_per_job: 1,
            per_job_overhead_s: 0.0,
            per_shot_overhead_us: 0.0,
            timing: "serialized".into(),
        },
        DeviceProfile {
            name: "ibm_cusco".into(),
            n_qubits_max: 127,
            // No one-qubit error rate is published for this snapshot.
            p1: 0.0,
            p2: 9.1e-2,
            readout_eps: 5.7e-2,
            t_1q_us: 0.044,
            t_2q_us: 0.487,
            t_readout_us: 4.0,
            parallel_circuits_per_job: 300,
            per_job_overhead_s: 3.0,
            per_shot_overhead_us: 250.0,
            timing: "depth".into(),
        },
    ]
}

pub fn builtin_profile(name: &str) -> Result<DeviceProfile> {
    builtin_profiles()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownName {
            kind: "device profile",
            name: name.to_string(),
        })
}
