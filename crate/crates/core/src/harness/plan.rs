//! Job planning and wall-clock estimates for hardware runs.

use serde::{Deserialize, Serialize};

use super::profiles::DeviceProfile;
use super::timing::timing_models;
use crate::error::{Error, Result};
use crate::simulator::GateOp;

/// How `k` samples are split into circuits and jobs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunPlan {
    pub samples: usize,
    pub replicas: usize,
    pub shots: u64,
    pub circuits: usize,
    pub jobs: usize,
}

impl RunPlan {
    pub fn new(samples: usize, replicas: usize, shots: u64, circuits_per_job: usize) -> Result<Self> {
        if replicas == 0 || shots == 0 || circuits_per_job == 0 {
            return Err(Error::Argument(
                "replicas, shots and circuits per job must all be at least 1".into(),
            ));
        }
        let circuits = samples.div_ceil(replicas);
        Ok(Self {
            samples,
            replicas,
            shots,
            circuits,
            jobs: circuits.div_ceil(circuits_per_job),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuntimeEstimate {
    pub gate_time_per_shot_us: f64,
    pub time_per_shot_us: f64,
    /// One circuit at the planned shot count, excluding job overhead.
    pub time_per_circuit_s: f64,
    pub total_s: f64,
    pub circuits: usize,
    pub jobs: usize,
}

/// Wall-clock estimate of running `plan` with circuit `gates` on `profile`.
pub fn estimate_runtime(
    profile: &DeviceProfile,
    gates: &[GateOp],
    n_qubits: usize,
    plan: &RunPlan,
) -> Result<RuntimeEstimate> {
    profile.validate()?;
    if n_qubits > profile.n_qubits_max {
        return Err(Error::Capacity(format!(
            "{n_qubits} qubits requested but {} has {}",
            profile.name, profile.n_qubits_max
        )));
    }
    if let Some(bad) = gates.iter().flat_map(|g| &g.targets).find(|&&q| q >= n_qubits) {
        return Err(Error::Index(format!("gate acts on qubit {bad} of {n_qubits}")));
    }
    let model = timing_models().build(&profile.timing, &())?;
    let gate_time = model.gate_time_us(profile, gates, n_qubits);
    let per_shot = gate_time + profile.t_readout_us + profile.per_shot_overhead_us;
    let per_circuit = per_shot * plan.shots as f64 * 1e-6;
    Ok(RuntimeEstimate {
        gate_time_per_shot_us: gate_time,
        time_per_shot_us: per_shot,
        time_per_circuit_s: per_circuit,
        total_s: per_circuit * plan.circuits as f64 + profile.per_job_overhead_s * plan.jobs as f64,
        circuits: plan.circuits,
        jobs: plan.jobs,
    })
}
