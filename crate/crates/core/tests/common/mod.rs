//! Independent reference implementations shared by the integration tests.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use styleqgan::adversary::{DiscriminatorNet, LayerSpec, Tape, Tensor};
use styleqgan::generator::{
    build_base_circuit, exact_samples, sample_jacobian, Entangler, ParamVector, StyleAnsatz,
};
use styleqgan::simulator::{GateKind, GateOp};

type M2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-qubit matrix written out from the rotation definitions.
fn oracle_matrix(kind: GateKind, theta: f64) -> M2 {
    let h = theta / 2.0;
    match kind {
        GateKind::RY | GateKind::CRY => [[c(h.cos(), 0.0), c(-h.sin(), 0.0)], [c(h.sin(), 0.0), c(h.cos(), 0.0)]],
        GateKind::RZ | GateKind::CRZ => [[c(h.cos(), -h.sin()), c(0.0, 0.0)], [c(0.0, 0.0), c(h.cos(), h.sin())]],
        GateKind::X => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
    }
}

/// Full `2^n x 2^n` unitary of one gate; qubit 0 is the least significant bit.
pub fn dense_unitary(n: usize, gate: &GateOp) -> Vec<Vec<Complex64>> {
    let dim = 1usize << n;
    let u = oracle_matrix(gate.kind, gate.angle.unwrap_or(0.0));
    let (control, target) = match gate.targets.as_slice() {
        [t] => (None, *t),
        [ctl, t] => (Some(*ctl), *t),
        _ => panic!("unsupported arity"),
    };
    let mut m = vec![vec![c(0.0, 0.0); dim]; dim];
    for col in 0..dim {
        if control.is_some_and(|q| (col >> q) & 1 == 0) {
            m[col][col] = c(1.0, 0.0);
            continue;
        }
        let tb = (col >> target) & 1;
        for out_bit in 0..2 {
            let row = (col & !(1 << target)) | (out_bit << target);
            m[row][col] += u[out_bit][tb];
        }
    }
    m
}

/// Runs `gates` from `|0..0>` by dense matrix-vector products.
pub fn dense_run(n: usize, gates: &[GateOp]) -> Vec<Complex64> {
    let dim = 1usize << n;
    let mut psi = vec![c(0.0, 0.0); dim];
    psi[0] = c(1.0, 0.0);
    for g in gates {
        let u = dense_unitary(n, g);
        psi = (0..dim).map(|r| (0..dim).map(|k| u[r][k] * psi[k]).sum()).collect();
    }
    psi
}

pub fn dense_expectation_z(psi: &[Complex64], q: usize) -> f64 {
    psi.iter()
        .enumerate()
        .map(|(i, a)| if (i >> q) & 1 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
        .sum()
}

pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, len: usize) -> Vec<GateOp> {
    (0..len)
        .map(|_| {
            let theta = rng.random_range(-2.0 * std::f64::consts::PI..2.0 * std::f64::consts::PI);
            let q = rng.random_range(0..n);
            let kinds: &[u8] = if n >= 2 { &[0, 1, 2, 3, 4] } else { &[0, 1, 4] };
            match kinds[rng.random_range(0..kinds.len())] {
                0 => GateOp::ry(q, theta),
                1 => GateOp::rz(q, theta),
                4 => GateOp::x(q),
                k => {
                    let t = (q + rng.random_range(1..n)) % n;
                    if k == 2 {
                        GateOp::cry(q, t, theta)
                    } else {
                        GateOp::crz(q, t, theta)
                    }
                }
            }
        })
        .collect()
}

/// Norm-wise relative error `|a - b| / max(|b|, floor)`.
pub fn relative_error(a: &[f64], b: &[f64], floor: f64) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let norm = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    diff / norm.max(floor)
}

pub const FD_STEP: f64 = 1e-5;

pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let mut x = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = x[i];
            x[i] = orig + FD_STEP;
            let hi = f(&x);
            x[i] = orig - FD_STEP;
            let lo = f(&x);
            x[i] = orig;
            (hi - lo) / (2.0 * FD_STEP)
        })
        .collect()
}

pub fn random_ansatz<R: Rng>(rng: &mut R) -> StyleAnsatz {
    let entangler = if rng.random_bool(0.5) { Entangler::Cry } else { Entangler::Crz };
    StyleAnsatz::new(rng.random_range(2..=4), rng.random_range(1..=2), rng.random_range(1..=5)).with_entangler(entangler)
}

/// Parameter-shift Jacobian against central differences of the exact
/// simulation, for one random generator configuration.
pub fn generator_gradient_error<R: Rng>(rng: &mut R) -> f64 {
    let ansatz = random_ansatz(rng);
    let params = ParamVector::random(ansatz.param_count(), 1.0, rng);
    let latent: Vec<f64> = (0..ansatz.latent_dim).map(|_| rng.random_range(-2.0..2.0)).collect();
    let jac = sample_jacobian(&ansatz, &params, &latent).unwrap();
    let flat = params.to_flat();
    (0..ansatz.base_qubits)
        .map(|q| {
            let fd = central_difference(
                |x| {
                    let p = ParamVector::from_flat(x).unwrap();
                    exact_samples(&build_base_circuit(&ansatz, &p, &latent).unwrap()).unwrap()[q]
                },
                &flat,
            );
            relative_error(&jac.rows[q], &fd, 1e-3)
        })
        .fold(0.0, f64::max)
}

fn random_layers<R: Rng>(rng: &mut R, n_inputs: usize) -> Vec<LayerSpec> {
    let slope = rng.random_range(0.05..0.5);
    let mut layers = Vec::new();
    let (mut ch, mut len) = (1, n_inputs);
    for _ in 0..rng.random_range(0..=2) {
        let kernel = rng.random_range(1..=len.min(3));
        let stride = rng.random_range(1..=2);
        let out = rng.random_range(1..=4);
        layers.push(LayerSpec::Conv1d {
            channels_in: ch,
            channels_out: out,
            kernel,
            stride,
        });
        layers.push(LayerSpec::LeakyRelu { slope });
        len = (len - kernel) / stride + 1;
        ch = out;
    }
    layers.push(LayerSpec::Flatten);
    let hidden = rng.random_range(1..=6);
    layers.extend([
        LayerSpec::Dense { input: ch * len, output: hidden },
        LayerSpec::LeakyRelu { slope },
        LayerSpec::Dense { input: hidden, output: 1 },
        LayerSpec::Sigmoid,
    ]);
    layers
}

fn disc_loss(net: &DiscriminatorNet, batch: &[Vec<f64>], labels: &[f64]) -> f64 {
    let mut tape = Tape::new();
    let x = tape.leaf(Tensor::from_rows(batch).unwrap());
    let (out, _) = net.record(&mut tape, x).unwrap();
    let loss = tape.bce(out, labels).unwrap();
    tape.value(loss).data[0]
}

/// Tape gradient of the mean BCE with respect to every discriminator
/// parameter and every input entry, against central differences.
pub fn discriminator_gradient_error<R: Rng>(rng: &mut R) -> f64 {
    let n = rng.random_range(2..=6);
    let batch_size = rng.random_range(1..=5);
    let mut net = DiscriminatorNet::new(n, random_layers(rng, n), rng).unwrap();
    // Non-zero biases so no unit sits exactly on a kink.
    let flat: Vec<f64> = net.flat_params().iter().map(|w| w + rng.random_range(-0.1..0.1)).collect();
    net.set_flat_params(&flat).unwrap();
    let batch: Vec<Vec<f64>> = (0..batch_size)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let labels: Vec<f64> = (0..batch_size).map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 }).collect();

    let mut tape = Tape::new();
    let x = tape.leaf(Tensor::from_rows(&batch).unwrap());
    let (out, params) = net.record(&mut tape, x).unwrap();
    let loss = tape.bce(out, &labels).unwrap();
    let grads = tape.backward(loss).unwrap();
    let analytic_params: Vec<f64> = params.iter().flat_map(|&p| grads.get(p).unwrap().data.clone()).collect();
    let analytic_input = grads.get(x).unwrap().data.clone();

    let fd_params = central_difference(
        |w| {
            let mut m = net.clone();
            m.set_flat_params(w).unwrap();
            disc_loss(&m, &batch, &labels)
        },
        &flat,
    );
    let flat_x: Vec<f64> = batch.concat();
    let fd_input = central_difference(
        |xs| {
            let rows: Vec<Vec<f64>> = xs.chunks(n).map(<[f64]>::to_vec).collect();
            disc_loss(&net, &rows, &labels)
        },
        &flat_x,
    );
    relative_error(&analytic_params, &fd_params, 1e-3).max(relative_error(&analytic_input, &fd_input, 1e-3))
}
