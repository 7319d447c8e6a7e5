mod common;

use common::{dense_expectation_z, dense_run, random_circuit};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use styleqgan::generator::{build_base_circuit, build_parallel_circuit, exact_samples, LatentTensor, ParamVector, StyleAnsatz};
use styleqgan::simulator::{init_state, GateOp};

fn simulate(n: usize, gates: &[GateOp]) -> Vec<num_complex::Complex64> {
    let mut s = init_state(n).unwrap();
    for g in gates {
        s.apply_gate(g).unwrap();
    }
    s.amplitudes().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn amplitudes_match_dense_oracle(seed in any::<u64>(), n in 1usize..=5, len in 0usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gates = random_circuit(&mut rng, n, len);
        let ours = simulate(n, &gates);
        let oracle = dense_run(n, &gates);
        let err = ours.iter().zip(&oracle).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10, "max amplitude error {err}");
    }

    #[test]
    fn norm_is_preserved(seed in any::<u64>(), n in 1usize..=6, len in 0usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = init_state(n).unwrap();
        for g in random_circuit(&mut rng, n, len) {
            s.apply_gate(&g).unwrap();
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn generator_samples_match_dense_expectations() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for layers in 1..=3 {
        let a = StyleAnsatz::new(3, layers, 4);
        let p = ParamVector::random(a.param_count(), 1.0, &mut rng);
        let z = [0.4, -1.1, 0.0, 2.2];
        let circuit = build_base_circuit(&a, &p, &z).unwrap();
        let psi = dense_run(3, &circuit.gates);
        let ours = exact_samples(&circuit).unwrap();
        for q in 0..3 {
            assert!((ours[q] + dense_expectation_z(&psi, q)).abs() < 1e-12);
        }
    }
}

#[test]
fn replicated_circuit_factorises() {
    // Two replicas on six qubits are small enough for the dense oracle.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = StyleAnsatz::new(3, 2, 5).with_replicas(2);
    let p = ParamVector::random(a.param_count(), 1.0, &mut rng);
    let latent = LatentTensor::sample(2, 5, &mut rng);
    let circuit = build_parallel_circuit(&a, &p, &latent).unwrap();
    let oracle = dense_run(6, &circuit.gates);
    let ours = simulate(6, &circuit.gates);
    let err = ours.iter().zip(&oracle).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(err < 1e-12, "{err}");
}
