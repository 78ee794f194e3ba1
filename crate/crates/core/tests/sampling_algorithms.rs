use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ridgelet::datasets::{equidistant_dataset, tsc, LabeledDataset};
use ridgelet::sampling::{
    algorithm2_sample, mixture_weights, sample_draws, sample_one, sample_z, Algorithm,
    SamplerConfig,
};
use statrs::distribution::{Beta, ContinuousCDF};

const DRAWS: usize = 100_000;

fn z_draws() -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..DRAWS)
        .map(|_| sample_z(50.0, 3.0, &mut rng).unwrap())
        .collect()
}

#[test]
fn z_moments() {
    let z = z_draws();
    assert!(z.iter().all(|v| (-1.0..=1.0).contains(v)));
    let mean_abs = z.iter().map(|v| v.abs()).sum::<f64>() / DRAWS as f64;
    assert!((mean_abs - 50.0 / 53.0).abs() < 0.005, "{mean_abs}");
    let positive = z.iter().filter(|&&v| v > 0.0).count() as f64 / DRAWS as f64;
    assert!((positive - 0.5).abs() < 0.01, "{positive}");
}

#[test]
fn z_passes_ks_against_signed_beta() {
    let beta = Beta::new(50.0, 3.0).unwrap();
    let cdf = |z: f64| {
        if z < 0.0 {
            0.5 * (1.0 - beta.cdf(-z))
        } else {
            0.5 + 0.5 * beta.cdf(z)
        }
    };
    let mut z = z_draws();
    z.sort_by(f64::total_cmp);
    let n = z.len() as f64;
    let d = z
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n)
                .abs()
                .max((((i + 1) as f64) / n - f).abs())
        })
        .fold(0.0, f64::max);
    // asymptotic critical value at level 0.01
    let critical = 1.628 / n.sqrt();
    assert!(d < critical, "D = {d}, critical {critical}");
}

#[test]
fn magnitude_draws_have_scale_delta() {
    let ds = equidistant_dataset(tsc, 200, -1.0, 1.0).unwrap();
    let weights = mixture_weights(&ds).unwrap();
    let cfg = SamplerConfig {
        algorithm: Algorithm::MagnitudeA,
        ..SamplerConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let kappas: Vec<f64> = (0..DRAWS)
        .map(|_| {
            let d = algorithm2_sample(&ds, &weights, &cfg, &mut rng).unwrap();
            d.hidden.a[0] * ds.input(d.n)[0].signum()
        })
        .collect();
    let mean = kappas.iter().sum::<f64>() / DRAWS as f64;
    let std = (kappas.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / DRAWS as f64).sqrt();
    assert!((std / 15.0 - 1.0).abs() < 0.02, "std {std}");
}

fn cloud(seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    use rand::Rng;
    let xs: Vec<Vec<f64>> = (0..30)
        .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let ys: Vec<Vec<f64>> = (0..30)
        .map(|_| vec![rng.random_range(-2.0..2.0), rng.random_range(0.0..1.0)])
        .collect();
    LabeledDataset::from_rows(&xs, &ys).unwrap()
}

fn config(algorithm: Algorithm, seed: u64) -> SamplerConfig {
    SamplerConfig {
        algorithm,
        hidden: 200,
        seed,
        ..SamplerConfig::default()
    }
}

#[test]
fn restriction_and_direction_hold_for_every_draw() {
    let ds = cloud(3);
    for alg in [
        Algorithm::Basic,
        Algorithm::MagnitudeA,
        Algorithm::InterceptB,
    ] {
        for d in sample_draws(&ds, &config(alg, 17)).unwrap() {
            let x = ds.input(d.n);
            let ax: f64 = d.hidden.a.iter().zip(&x).map(|(a, v)| a * v).sum();
            assert!((ax - d.hidden.b - d.z).abs() < 1e-12, "{alg:?}");
            let xx: f64 = x.iter().map(|v| v * v).sum();
            let off: f64 = d
                .hidden
                .a
                .iter()
                .zip(&x)
                .map(|(a, v)| (a - ax / xx * v).powi(2))
                .sum();
            assert!(off.sqrt() < 1e-12, "{alg:?}");
        }
    }
}

#[test]
fn parallel_sampling_matches_serial() {
    let ds = cloud(4);
    for alg in [
        Algorithm::Basic,
        Algorithm::MagnitudeA,
        Algorithm::InterceptB,
    ] {
        let cfg = config(alg, 99);
        let weights = mixture_weights(&ds).unwrap();
        let serial: Vec<_> = (0..cfg.hidden)
            .map(|j| sample_one(&ds, &weights, &cfg, j).unwrap())
            .collect();
        assert_eq!(sample_draws(&ds, &cfg).unwrap(), serial);
    }
}

#[test]
fn different_seeds_differ() {
    let ds = cloud(5);
    let a = sample_draws(&ds, &config(Algorithm::InterceptB, 1)).unwrap();
    let b = sample_draws(&ds, &config(Algorithm::InterceptB, 2)).unwrap();
    assert_ne!(a, b);
}

#[test]
fn draw_errors_carry_their_index() {
    let ds = LabeledDataset::from_scalar(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
    let err = sample_draws(&ds, &config(Algorithm::MagnitudeA, 0)).unwrap_err();
    assert!(matches!(err, ridgelet::Error::Draw { .. }), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mixture_weights_are_a_distribution(ys in prop::collection::vec(-5.0f64..5.0, 2..40)) {
        prop_assume!(ys.iter().any(|y| *y != 0.0));
        let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64).collect();
        let ds = LabeledDataset::from_scalar(&xs, &ys).unwrap();
        let w = mixture_weights(&ds).unwrap();
        let total: f64 = ys.iter().map(|y| y.abs()).sum();
        prop_assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (wi, y) in w.as_slice().iter().zip(&ys) {
            prop_assert!(*wi >= 0.0);
            prop_assert!((wi - y.abs() / total).abs() < 1e-15);
        }
    }

    #[test]
    fn seeded_runs_repeat(seed in any::<u64>()) {
        let ds = cloud(6);
        let cfg = SamplerConfig { hidden: 20, ..config(Algorithm::Basic, seed) };
        prop_assert_eq!(sample_draws(&ds, &cfg).unwrap(), sample_draws(&ds, &cfg).unwrap());
    }
}
