use serde::{Deserialize, Serialize};

use super::latent::LatentTensor;
use super::params::ParamVector;
use crate::error::{Error, Result};
use crate::simulator::{GateOp, MAX_QUBITS};

/// Two-qubit rotation used for the entangling ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Entangler {
    #[default]
    Cry,
    Crz,
}

impl Entangler {
    pub fn as_str(self) -> &'static str {
        match self {
            Entangler::Cry => "cry",
            Entangler::Crz => "crz",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cry" => Ok(Entangler::Cry),
            "crz" => Ok(Entangler::Crz),
            other => Err(Error::Configuration(format!("unknown entangler `{other}`"))),
        }
    }
}

/// Shape of the style-based generator circuit.
///
/// Each layer applies `RY` then `RZ` on every qubit followed by a ring of
/// controlled rotations (qubit `i` controls `(i + 1) mod N`); a closing `RY`
/// on every qubit ends the circuit. Every gate is parameterised, and gate
/// `g` in construction order reads latent component `g mod latent_dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StyleAnsatz {
    pub base_qubits: usize,
    pub layers: usize,
    pub latent_dim: usize,
    #[serde(default)]
    pub entangler: Entangler,
    #[serde(default = "one")]
    pub replicas: usize,
}

fn one() -> usize {
    1
}

impl StyleAnsatz {
    pub fn new(base_qubits: usize, layers: usize, latent_dim: usize) -> Self {
        Self {
            base_qubits,
            layers,
            latent_dim,
            entangler: Entangler::Cry,
            replicas: 1,
        }
    }

    pub fn with_replicas(mut self, replicas: usize) -> Self {
        self.replicas = replicas;
        self
    }

    pub fn with_entangler(mut self, entangler: Entangler) -> Self {
        self.entangler = entangler;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_qubits == 0 || self.layers == 0 || self.latent_dim == 0 || self.replicas == 0 {
            return Err(Error::Configuration(format!(
                "ansatz dimensions must be positive: {self:?}"
            )));
        }
        if self.width() > MAX_QUBITS {
            return Err(Error::Size(format!(
                "{} replicas of {} qubits need {} qubits (limit {MAX_QUBITS})",
                self.replicas,
                self.base_qubits,
                self.width()
            )));
        }
        Ok(())
    }

    /// Controlled rotations per layer in the ring.
    pub fn entanglers_per_layer(&self) -> usize {
        match self.base_qubits {
            0 | 1 => 0,
            2 => 1,
            n => n,
        }
    }

    /// Trainable (weight, bias) pairs; independent of the replica count.
    pub fn param_count(&self) -> usize {
        self.layers * (2 * self.base_qubits + self.entanglers_per_layer()) + self.base_qubits
    }

    /// Gates in one base circuit (all of them are parameterised).
    pub fn base_gate_count(&self) -> usize {
        self.param_count()
    }

    pub fn width(&self) -> usize {
        self.replicas * self.base_qubits
    }

    pub fn total_latent_dim(&self) -> usize {
        self.replicas * self.latent_dim
    }
}

/// Affine style encoding of one gate angle.
pub fn style_angle(weight: f64, bias: f64, latent_component: f64) -> f64 {
    weight * latent_component + bias
}

/// Which trainable pair and latent value produced a gate's angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binding {
    pub param: usize,
    pub latent: f64,
}

/// A generator circuit with the provenance of every angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<GateOp>,
    pub bindings: Vec<Binding>,
}

impl Circuit {
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

fn check_params(ansatz: &StyleAnsatz, params: &ParamVector) -> Result<()> {
    if params.len() != ansatz.param_count() {
        return Err(Error::Configuration(format!(
            "ansatz needs {} parameter pairs, got {}",
            ansatz.param_count(),
            params.len()
        )));
    }
    Ok(())
}

fn push_base(
    ansatz: &StyleAnsatz,
    params: &ParamVector,
    latent_row: &[f64],
    offset: usize,
    circuit: &mut Circuit,
) {
    let n = ansatz.base_qubits;
    let mut g = 0usize;
    let mut emit = |make: &dyn Fn(f64) -> GateOp, circuit: &mut Circuit| {
        let (w, b) = params.pairs[g];
        let r = latent_row[g % ansatz.latent_dim];
        circuit.gates.push(make(style_angle(w, b, r)));
        circuit.bindings.push(Binding { param: g, latent: r });
        g += 1;
    };
    for _ in 0..ansatz.layers {
        for q in 0..n {
            emit(&|a| GateOp::ry(offset + q, a), circuit);
            emit(&|a| GateOp::rz(offset + q, a), circuit);
        }
        for i in 0..ansatz.entanglers_per_layer() {
            let (c, t) = (offset + i, offset + (i + 1) % n);
            match ansatz.entangler {
                Entangler::Cry => emit(&|a| GateOp::cry(c, t, a), circuit),
                Entangler::Crz => emit(&|a| GateOp::crz(c, t, a), circuit),
            }
        }
    }
    for q in 0..n {
        emit(&|a| GateOp::ry(offset + q, a), circuit);
    }
}

/// Builds the `N`-qubit base circuit for one latent row.
pub fn build_base_circuit(
    ansatz: &StyleAnsatz,
    params: &ParamVector,
    latent_row: &[f64],
) -> Result<Circuit> {
    ansatz.with_replicas(1).validate()?;
    check_params(ansatz, params)?;
    if latent_row.len() != ansatz.latent_dim {
        return Err(Error::Configuration(format!(
            "latent row has {} components, ansatz expects {}",
            latent_row.len(),
            ansatz.latent_dim
        )));
    }
    let mut circuit = Circuit {
        n_qubits: ansatz.base_qubits,
        gates: Vec::with_capacity(ansatz.base_gate_count()),
        bindings: Vec::with_capacity(ansatz.base_gate_count()),
    };
    push_base(ansatz, params, latent_row, 0, &mut circuit);
    Ok(circuit)
}

/// Replicates the base circuit `m` times side by side. Replica `i` sits on
/// qubits `[i N, (i + 1) N)`, reads latent row `i` and shares `params`.
pub fn build_parallel_circuit(
    ansatz: &StyleAnsatz,
    params: &ParamVector,
    latent: &LatentTensor,
) -> Result<Circuit> {
    ansatz.validate()?;
    check_params(ansatz, params)?;
    if latent.replicas() != ansatz.replicas || latent.latent_dim() != ansatz.latent_dim {
        return Err(Error::Configuration(format!(
            "latent tensor is {}x{}, ansatz expects {}x{}",
            latent.replicas(),
            latent.latent_dim(),
            ansatz.replicas,
            ansatz.latent_dim
        )));
    }
    let count = ansatz.replicas * ansatz.base_gate_count();
    let mut circuit = Circuit {
        n_qubits: ansatz.width(),
        gates: Vec::with_capacity(count),
        bindings: Vec::with_capacity(count),
    };
    for i in 0..ansatz.replicas {
        push_base(ansatz, params, latent.row(i), i * ansatz.base_qubits, &mut circuit);
    }
    Ok(circuit)
}
