//! Per-shot execution time models, selected by name.

use std::sync::OnceLock;

use super::profiles::DeviceProfile;
use crate::registry::Registry;
use crate::simulator::GateOp;

pub trait TimingModel: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;

    /// Gate time of one shot of `gates` on `n_qubits`, in microseconds,
    /// excluding readout.
    fn gate_time_us(&self, profile: &DeviceProfile, gates: &[GateOp], n_qubits: usize) -> f64;
}

fn duration(profile: &DeviceProfile, gate: &GateOp) -> f64 {
    if gate.targets.len() >= 2 {
        profile.t_2q_us
    } else {
        profile.t_1q_us
    }
}

/// Every gate runs on its own; times add up.
#[derive(Debug)]
pub struct SerializedTiming;

impl TimingModel for SerializedTiming {
    fn name(&self) -> &'static str {
        "serialized"
    }

    fn gate_time_us(&self, profile: &DeviceProfile, gates: &[GateOp], _n_qubits: usize) -> f64 {
        gates.iter().map(|g| duration(profile, g)).sum()
    }
}

/// Gates on disjoint qubits overlap; the result is the critical path.
#[derive(Debug)]
pub struct DepthTiming;

impl TimingModel for DepthTiming {
    fn name(&self) -> &'static str {
        "depth"
    }

    fn gate_time_us(&self, profile: &DeviceProfile, gates: &[GateOp], n_qubits: usize) -> f64 {
        let mut ready = vec![0.0f64; n_qubits];
        for g in gates {
            let start = g.targets.iter().map(|&q| ready[q]).fold(0.0, f64::max);
            let end = start + duration(profile, g);
            for &q in &g.targets {
                ready[q] = end;
            }
        }
        ready.into_iter().fold(0.0, f64::max)
    }
}

pub type TimingRegistry = Registry<dyn TimingModel, ()>;

impl TimingRegistry {
    pub fn with_builtins() -> Self {
        let mut reg = Registry::new("timing model");
        reg.register("serialized", |_: &()| Ok(Box::new(SerializedTiming) as Box<dyn TimingModel>));
        reg.register("depth", |_: &()| Ok(Box::new(DepthTiming) as Box<dyn TimingModel>));
        reg
    }
}

/// Process-wide registry with the built-in timing models.
pub fn timing_models() -> &'static TimingRegistry {
    static REGISTRY: OnceLock<TimingRegistry> = OnceLock::new();
    REGISTRY.get_or_init(TimingRegistry::with_builtins)
}
