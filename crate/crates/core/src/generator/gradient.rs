//! Analytic gradients of generated samples by the parameter-shift rule.
//!
//! One-qubit rotations `exp(-i theta P / 2)` use the two-term rule
//! `(f(theta + pi/2) - f(theta - pi/2)) / 2`. Controlled rotations have
//! generator eigenvalues `{0, ±1/2}` and need the four-term rule
//! `c1 (f(theta + pi/2) - f(theta - pi/2)) - c2 (f(theta + 3pi/2) - f(theta - 3pi/2))`
//! with `c1,2 = (sqrt 2 ± 1) / (4 sqrt 2)`. Angle derivatives are then
//! chain-ruled through `theta = w r + b`.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ansatz::{build_base_circuit, build_parallel_circuit, Circuit, StyleAnsatz};
use super::backend::SampleMode;
use super::latent::LatentTensor;
use super::params::ParamVector;
use crate::error::{Error, Result};
use crate::simulator::run_circuit;

const FOUR_TERM_NEAR: f64 = (SQRT_2 + 1.0) / (4.0 * SQRT_2);
const FOUR_TERM_FAR: f64 = (SQRT_2 - 1.0) / (4.0 * SQRT_2);

/// Exact sample vector `x_q = -<Z_q>` for every qubit of `circuit`.
pub fn exact_samples(circuit: &Circuit) -> Result<Vec<f64>> {
    // Noiseless runs never touch the generator.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let state = run_circuit(&circuit.gates, circuit.n_qubits, None, &mut rng)?;
    (0..circuit.n_qubits).map(|q| state.expectation_z(q).map(|z| -z)).collect()
}

fn shifted(circuit: &Circuit, gate: usize, delta: f64) -> Result<Vec<f64>> {
    let mut c = circuit.clone();
    let angle = c.gates[gate].angle.as_mut().expect("parameterised gate");
    *angle += delta;
    exact_samples(&c)
}

/// Derivative of every qubit's sample with respect to the angle of `gate`.
pub fn angle_derivative(circuit: &Circuit, gate: usize) -> Result<Vec<f64>> {
    let kind = circuit.gates[gate].kind;
    if !kind.is_parameterized() {
        return Err(Error::Argument(format!("gate {gate} ({kind:?}) has no angle")));
    }
    let plus = shifted(circuit, gate, FRAC_PI_2)?;
    let minus = shifted(circuit, gate, -FRAC_PI_2)?;
    if !kind.is_controlled() {
        return Ok(plus.iter().zip(&minus).map(|(p, m)| 0.5 * (p - m)).collect());
    }
    let far_plus = shifted(circuit, gate, 3.0 * FRAC_PI_2)?;
    let far_minus = shifted(circuit, gate, -3.0 * FRAC_PI_2)?;
    Ok((0..plus.len())
        .map(|q| FOUR_TERM_NEAR * (plus[q] - minus[q]) - FOUR_TERM_FAR * (far_plus[q] - far_minus[q]))
        .collect())
}

/// Gradient of sample entry `qubit` (a global index into the replicated
/// register) with respect to the interleaved `[w0, b0, w1, b1, ...]`
/// parameters. Only exact mode is differentiable.
pub fn sample_gradient(
    ansatz: &StyleAnsatz,
    params: &ParamVector,
    latent: &LatentTensor,
    qubit: usize,
    mode: &SampleMode,
) -> Result<Vec<f64>> {
    if *mode != SampleMode::Exact {
        return Err(Error::Unsupported(
            "gradients are only available for exact, noiseless simulation".into(),
        ));
    }
    let circuit = build_parallel_circuit(ansatz, params, latent)?;
    if qubit >= circuit.n_qubits {
        return Err(Error::Index(format!("qubit {qubit} out of range")));
    }
    let replica = qubit / ansatz.base_qubits;
    let mut grad = vec![0.0; 2 * params.len()];
    for (gi, (gate, binding)) in circuit.gates.iter().zip(&circuit.bindings).enumerate() {
        // Replicas never interact, so gates of other replicas cannot move this qubit.
        if gate.targets[0] / ansatz.base_qubits != replica {
            continue;
        }
        let d = angle_derivative(&circuit, gi)?[qubit];
        grad[2 * binding.param] += binding.latent * d;
        grad[2 * binding.param + 1] += d;
    }
    Ok(grad)
}

/// Samples of one base circuit together with their parameter Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleJacobian {
    pub values: Vec<f64>,
    /// `rows[q]` is the interleaved gradient of `values[q]`.
    pub rows: Vec<Vec<f64>>,
}

/// Value and full Jacobian of the base circuit for one latent row; shares
/// each shifted simulation across all output qubits.
pub fn sample_jacobian(
    ansatz: &StyleAnsatz,
    params: &ParamVector,
    latent_row: &[f64],
) -> Result<SampleJacobian> {
    let circuit = build_base_circuit(ansatz, params, latent_row)?;
    let values = exact_samples(&circuit)?;
    let mut rows = vec![vec![0.0; 2 * params.len()]; circuit.n_qubits];
    for (gi, binding) in circuit.bindings.iter().enumerate() {
        let d = angle_derivative(&circuit, gi)?;
        for (row, dq) in rows.iter_mut().zip(d) {
            row[2 * binding.param] += binding.latent * dq;
            row[2 * binding.param + 1] += dq;
        }
    }
    Ok(SampleJacobian { values, rows })
}
