use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use styleqgan::datapipe::{synth_dataset, AxisSpec, SyntheticOracleSpec, TransformModel, DEFAULT_BINS};
use styleqgan::evaluation::{
    kl_from_counts, kl_with_errorbars, sample_variance, scan_delta, VarianceVector, KL_EPS, NOMINAL_SET, SCAN_SETS,
};
use styleqgan::generator::{generate_samples, LatentTensor, ParamVector, SampleMode, SampleVector, StyleAnsatz};
use styleqgan::rng;

/// Direct evaluation of `sum p ln(p / q)` on already-normalised vectors.
fn kl_oracle(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(a, _)| **a > 0.0).map(|(a, b)| a * (a / b).ln()).sum()
}

proptest! {
    #[test]
    fn kl_is_non_negative_and_matches_oracle(
        p in prop::collection::vec(0.0f64..10.0, 2..40),
        seed in any::<u64>(),
    ) {
        prop_assume!(p.iter().sum::<f64>() > 0.0);
        let mut r = rng::stream(seed, 0);
        let q: Vec<f64> = p.iter().map(|_| rand::Rng::random_range(&mut r, 0.01..10.0)).collect();
        let kl = kl_from_counts(&p, &q, KL_EPS).unwrap();
        prop_assert!(kl >= -1e-12);
        let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
        let pn: Vec<f64> = p.iter().map(|x| x / sp).collect();
        let qn: Vec<f64> = q.iter().map(|x| x / sq).collect();
        prop_assert!((kl - kl_oracle(&pn, &qn)).abs() < 1e-12);
    }

    #[test]
    fn kl_vanishes_on_proportional_counts(p in prop::collection::vec(0.0f64..10.0, 2..40), k in 0.1f64..10.0) {
        prop_assume!(p.iter().sum::<f64>() > 0.0);
        let q: Vec<f64> = p.iter().map(|x| x * k).collect();
        prop_assert!(kl_from_counts(&p, &q, KL_EPS).unwrap().abs() < 1e-12);
    }
}

#[test]
fn asymmetry_is_witnessed() {
    let ab = kl_from_counts(&[0.5, 0.5], &[0.25, 0.75], KL_EPS).unwrap();
    let ba = kl_from_counts(&[0.25, 0.75], &[0.5, 0.5], KL_EPS).unwrap();
    assert!((ab - (0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln())).abs() < 1e-15);
    assert!((ba - (0.25 * 0.5f64.ln() + 0.75 * 1.5f64.ln())).abs() < 1e-15);
    assert!((ab - 0.1438).abs() < 1e-4 && (ba - 0.1308).abs() < 1e-4);
}

#[test]
fn variance_follows_binomial_formula() {
    let s = [SampleVector(vec![0.0, 1.0, -1.0, 0.5])];
    let v = sample_variance(&s, Some(512)).unwrap();
    assert_eq!(v[0].0, vec![1.0 / 512.0, 0.0, 0.0, 0.75 / 512.0]);
    let v2 = sample_variance(&s, Some(1024)).unwrap();
    assert_eq!(v2[0].0[0] * 2.0, v[0].0[0]);
}

struct Fixture {
    samples: Vec<SampleVector>,
    model: TransformModel,
    grids: Vec<styleqgan::datapipe::HistogramGrid>,
}

fn fixture() -> Fixture {
    let raw = synth_dataset(&SyntheticOracleSpec::default(), 4000).unwrap();
    let (model, _) = TransformModel::fit(&raw).unwrap();
    let grids = (0..3)
        .map(|j| AxisSpec::fit(&raw.column(j), None, DEFAULT_BINS).unwrap().bin(&raw.column(j)).unwrap())
        .collect();
    let a = StyleAnsatz::new(3, 1, 5).with_replicas(4);
    let p = ParamVector::random(a.param_count(), 0.5, &mut rng::stream(1, 1));
    let mut r = ChaCha8Rng::seed_from_u64(2);
    let latents: Vec<_> = (0..500).map(|_| LatentTensor::sample(4, 5, &mut r)).collect();
    let mode = SampleMode::Shots { shots: 512, noise: None };
    let samples = generate_samples(&a, &p, &latents, &mode, 3).unwrap().samples;
    Fixture { samples, model, grids }
}

#[test]
fn zero_variance_gives_zero_width() {
    let f = fixture();
    let zero: Vec<VarianceVector> = f.samples.iter().map(|_| VarianceVector(vec![0.0; 3])).collect();
    for r in kl_with_errorbars(&f.samples, &zero, &f.model, &f.grids).unwrap() {
        assert_eq!(r.upper_delta, 0.0);
        assert_eq!(r.lower_delta, 0.0);
        assert!(r.scan.iter().all(|&k| k == r.nominal));
    }
}

#[test]
fn scan_brackets_nominal_and_centre_is_exact() {
    let f = fixture();
    let var = sample_variance(&f.samples, Some(512)).unwrap();
    let results = kl_with_errorbars(&f.samples, &var, &f.model, &f.grids).unwrap();
    assert_eq!(scan_delta(NOMINAL_SET), 0.0);
    for (j, expected) in (0..SCAN_SETS).zip([-1.0, -0.8, -0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8, 1.0]) {
        assert!((scan_delta(j) - expected).abs() < 1e-15);
    }
    for r in &results {
        assert_eq!(r.scan.len(), SCAN_SETS);
        assert_eq!(r.scan[NOMINAL_SET].to_bits(), r.nominal.to_bits());
        assert!(r.nominal >= 0.0 && r.upper_delta >= 0.0 && r.lower_delta >= 0.0);
        assert!(r.nominal - r.lower_delta >= 0.0);
        let hi = r.scan.iter().copied().fold(f64::MIN, f64::max);
        let lo = r.scan.iter().copied().fold(f64::MAX, f64::min);
        assert!((r.nominal + r.upper_delta - hi.max(r.nominal)).abs() < 1e-12);
        assert!((r.nominal - r.lower_delta - lo.min(r.nominal)).abs() < 1e-12);
    }
}
