use std::f64::consts::LN_2;

use styleqgan::adversary::{discriminator_accuracy, sample_generator, train_observed, TrainConfig};
use styleqgan::datapipe::{synth_dataset, SyntheticOracleSpec, TransformModel};
use styleqgan::generator::{ParamVector, StyleAnsatz};
use styleqgan::rng;

#[test]
fn equilibrium_is_stationary() {
    let ansatz = StyleAnsatz::new(3, 1, 5);
    let theta = ParamVector::random(ansatz.param_count(), 1.0, &mut rng::stream(42, 0));
    let data = sample_generator(&ansatz, &theta, 10_000, 7).unwrap();
    let cfg = TrainConfig {
        n_epochs: 20,
        seed: 3,
        ..TrainConfig::default()
    };
    let mut losses = Vec::new();
    train_observed(&cfg, &data, &ansatz, Some(theta), None, &mut |e| losses.push(e.loss_g)).unwrap();
    assert_eq!(losses.len(), 20);
    for (epoch, l) in losses.iter().enumerate() {
        assert!((l - LN_2).abs() < 0.1 * LN_2, "epoch {epoch}: loss_g {l}");
    }
}

#[test]
fn discriminator_learns_against_frozen_generator() {
    let raw = synth_dataset(&SyntheticOracleSpec::default(), 2048).unwrap();
    let (_, real) = TransformModel::fit(&raw).unwrap();
    let ansatz = StyleAnsatz::new(3, 1, 5);
    // The generator keeps its seeded starting point throughout.
    let cfg = TrainConfig {
        n_epochs: 50,
        freeze_generator: true,
        seed: 1,
        ..TrainConfig::default()
    };
    let initial = ParamVector::random(ansatz.param_count(), cfg.generator_init_scale, &mut rng::stream(cfg.seed, 1));
    let outcome = train_observed(&cfg, &real, &ansatz, None, None, &mut |_| {}).unwrap();
    assert_eq!(outcome.params, initial);
    let fake = sample_generator(&ansatz, &outcome.params, 2048, 99).unwrap();
    let accuracy = discriminator_accuracy(&outcome.discriminator, &real, &fake).unwrap();
    assert!(accuracy > 0.9, "accuracy {accuracy}");
}
