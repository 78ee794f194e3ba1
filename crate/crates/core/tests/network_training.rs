use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ridgelet::datasets::{equidistant_dataset, tsc};
use ridgelet::network::{
    adam_step, error_rate, loss_and_grads, mnist_finalize, random_init, train, AdamState,
    Gradients, LabelCodebook, Loss, Metric, ShallowNet, TrainConfig,
};
use ridgelet::regression::{design_matrix, ridge_fit};
use ridgelet::sampling::{sample_hidden, Algorithm, SamplerConfig};

// loss written out entry by entry, sharing nothing with the library
fn oracle_loss(net: &ShallowNet, xs: &DMatrix<f64>, ys: &DMatrix<f64>, loss: Loss) -> f64 {
    let (n, k, j) = (xs.nrows(), net.c0.len(), net.b.len());
    let mut total = 0.0;
    for row in 0..n {
        let mut out = vec![0.0; k];
        for (o, out_o) in out.iter_mut().enumerate() {
            *out_o = net.c0[o];
            for u in 0..j {
                let mut pre = -net.b[u];
                for i in 0..xs.ncols() {
                    pre += net.a[(u, i)] * xs[(row, i)];
                }
                *out_o += net.c[(o, u)] * (-0.5 * pre * pre).exp();
            }
        }
        match loss {
            Loss::Mse => {
                total += (0..k).map(|o| (out[o] - ys[(row, o)]).powi(2)).sum::<f64>() / k as f64
            }
            Loss::CrossEntropy => {
                let norm = out.iter().map(|v| v.exp()).sum::<f64>().ln();
                total -= (0..k).map(|o| ys[(row, o)] * (out[o] - norm)).sum::<f64>();
            }
        }
    }
    total / n as f64
}

fn small_problem(seed: u64, loss: Loss) -> (ShallowNet, DMatrix<f64>, DMatrix<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = random_init(3, 2, 3, &mut rng).unwrap();
    let xs = DMatrix::from_fn(4, 2, |_, _| rng.random_range(-1.0..1.0));
    let ys = match loss {
        Loss::Mse => DMatrix::from_fn(4, 3, |_, _| rng.random_range(-1.0..1.0)),
        Loss::CrossEntropy => DMatrix::from_fn(4, 3, |_, _| f64::from(rng.random::<bool>())),
    };
    (net, xs, ys)
}

fn blocks(g: &Gradients) -> [&[f64]; 4] {
    [
        g.a.as_slice(),
        g.b.as_slice(),
        g.c.as_slice(),
        g.c0.as_slice(),
    ]
}

fn nudge(net: &ShallowNet, block: usize, i: usize, h: f64) -> ShallowNet {
    let mut n = net.clone();
    let slot = match block {
        0 => &mut n.a.as_mut_slice()[i],
        1 => &mut n.b.as_mut_slice()[i],
        2 => &mut n.c.as_mut_slice()[i],
        _ => &mut n.c0.as_mut_slice()[i],
    };
    *slot += h;
    n
}

#[test]
fn gradients_match_central_differences() {
    for loss in [Loss::Mse, Loss::CrossEntropy] {
        for seed in 0..4 {
            let (net, xs, ys) = small_problem(seed, loss);
            let (value, grads) = loss_and_grads(&net, &xs, &ys, loss).unwrap();
            assert!((value - oracle_loss(&net, &xs, &ys, loss)).abs() < 1e-12);
            let h = 1e-5;
            for (block, g) in blocks(&grads).iter().enumerate() {
                for (i, &analytic) in g.iter().enumerate() {
                    let up = oracle_loss(&nudge(&net, block, i, h), &xs, &ys, loss);
                    let down = oracle_loss(&nudge(&net, block, i, -h), &xs, &ys, loss);
                    let fd = (up - down) / (2.0 * h);
                    let scale = analytic.abs().max(fd.abs()).max(1e-6);
                    assert!(
                        (analytic - fd).abs() / scale < 1e-5,
                        "{loss} block {block} index {i}"
                    );
                }
            }
        }
    }
}

#[test]
fn forward_agrees_with_regression_fit() {
    let ds = equidistant_dataset(tsc, 200, -1.0, 1.0).unwrap();
    for alg in [Algorithm::Basic, Algorithm::InterceptB] {
        let hidden = sample_hidden(
            &ds,
            &SamplerConfig {
                algorithm: alg,
                ..SamplerConfig::default()
            },
        )
        .unwrap();
        let d = design_matrix(&hidden, ds.inputs()).unwrap();
        let sol = ridge_fit(&d, ds.targets(), 0.01).unwrap();
        let net = ShallowNet::from_solution(&hidden, &sol).unwrap();
        let diff = net.forward_batch(ds.inputs()).unwrap() - sol.predict(&d);
        assert!(diff.amax() < 1e-10, "{alg:?}: {}", diff.amax());
    }
}

#[test]
fn random_init_is_standard_normal() {
    let net = random_init(50_000, 1, 1, &mut ChaCha8Rng::seed_from_u64(77)).unwrap();
    let all: Vec<f64> = [
        net.a.as_slice(),
        net.b.as_slice(),
        net.c.as_slice(),
        net.c0.as_slice(),
    ]
    .concat();
    let n = all.len() as f64;
    assert!(n >= 1e5);
    let mean = all.iter().sum::<f64>() / n;
    let std = (all.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    assert!(mean.abs() < 0.01, "mean {mean}");
    assert!((std - 1.0).abs() < 0.01, "std {std}");
    let again = random_init(50_000, 1, 1, &mut ChaCha8Rng::seed_from_u64(77)).unwrap();
    assert_eq!(net, again);
    assert_ne!(
        net,
        random_init(50_000, 1, 1, &mut ChaCha8Rng::seed_from_u64(78)).unwrap()
    );
}

#[test]
fn random_outputs_decode_at_chance() {
    let codebook = LabelCodebook::generate(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 100_000;
    let raw = DMatrix::from_fn(n, 10, |_, _| {
        rng.sample::<f64, _>(rand_distr::StandardNormal)
    });
    let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..10)).collect();
    let err = error_rate(&mnist_finalize(&raw, &codebook).unwrap(), &truth).unwrap();
    assert!((err - 0.9).abs() < 0.01, "{err}");
}

#[test]
fn adam_moves_at_most_lr_under_steady_gradients() {
    let (mut net, _, _) = small_problem(9, Loss::Mse);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut g = Gradients::zeros_like(&net);
    for v in
        g.a.iter_mut()
            .chain(g.b.iter_mut())
            .chain(g.c.iter_mut())
            .chain(g.c0.iter_mut())
    {
        *v = rng.random_range(-5.0..5.0);
    }
    let mut state = AdamState::new(&net);
    let lr = 0.001;
    for _ in 0..50 {
        let before = net.clone();
        adam_step(&mut state, &mut net, &g, lr).unwrap();
        let moved = (net.a.clone() - before.a)
            .amax()
            .max((net.c.clone() - before.c).amax());
        assert!(moved <= lr * (1.0 + 1e-9));
    }
}

// with bias correction, Cauchy-Schwarz bounds a step by lr * sqrt(sum_i w1_i^2 / w2_i)
fn adam_bound(t: usize) -> f64 {
    let (b1, b2) = (0.9f64, 0.999f64);
    let (c1, c2) = (1.0 - b1.powi(t as i32), 1.0 - b2.powi(t as i32));
    (1..=t)
        .map(|i| {
            let w1 = (1.0 - b1) * b1.powi((t - i) as i32) / c1;
            let w2 = (1.0 - b2) * b2.powi((t - i) as i32) / c2;
            w1 * w1 / w2
        })
        .sum::<f64>()
        .sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn permuting_hidden_units_keeps_outputs(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_init(7, 3, 2, &mut rng).unwrap();
        let mut perm: Vec<usize> = (0..7).collect();
        perm.shuffle(&mut rng);
        let xs = DMatrix::from_fn(5, 3, |_, _| rng.random_range(-2.0..2.0));
        let p = net.permute_hidden(&perm).unwrap();
        let diff = net.forward_batch(&xs).unwrap() - p.forward_batch(&xs).unwrap();
        prop_assert!(diff.amax() < 1e-12);
    }

    #[test]
    fn adam_steps_respect_their_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut net = random_init(4, 2, 2, &mut rng).unwrap();
        let mut state = AdamState::new(&net);
        let lr = 0.01;
        for t in 1..=30 {
            let mut g = Gradients::zeros_like(&net);
            for v in g.a.iter_mut().chain(g.b.iter_mut()).chain(g.c.iter_mut()).chain(g.c0.iter_mut()) {
                *v = rng.random_range(-3.0..3.0);
            }
            let before = net.clone();
            adam_step(&mut state, &mut net, &g, lr).unwrap();
            let moved = [
                (net.a.clone() - &before.a).amax(),
                (net.b.clone() - &before.b).amax(),
                (net.c.clone() - &before.c).amax(),
                (net.c0.clone() - &before.c0).amax(),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            prop_assert!(moved <= lr * adam_bound(t) * (1.0 + 1e-9), "step {}", t);
            if t == 1 {
                prop_assert!(moved <= lr * (1.0 + 1e-9));
            }
        }
    }
}

#[test]
fn training_is_bitwise_reproducible() {
    let ds = equidistant_dataset(tsc, 200, -1.0, 1.0).unwrap();
    let cfg = TrainConfig {
        steps: 150,
        batch: Some(32),
        seed: 5,
        ..TrainConfig::default()
    };
    let run = || {
        let mut net = random_init(40, 1, 1, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let h = train(&mut net, &ds, None, &cfg, &Metric::Rmse).unwrap();
        (net, h)
    };
    let (n1, h1) = run();
    let (n2, h2) = run();
    assert_eq!(n1, n2);
    assert_eq!(h1, h2);
    assert_eq!(h1.records.len(), 1 + 15);
}

#[test]
fn random_tsc_training_reduces_error() {
    let ds = equidistant_dataset(tsc, 200, -1.0, 1.0).unwrap();
    let mut net = random_init(300, 1, 1, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    let cfg = TrainConfig {
        steps: 500,
        ..TrainConfig::default()
    };
    let h = train(&mut net, &ds, None, &cfg, &Metric::Rmse).unwrap();
    assert!(h.last().unwrap().train < h.initial().unwrap().train);
}

#[test]
fn zero_gradient_leaves_parameters() {
    let (mut net, _, _) = small_problem(12, Loss::Mse);
    let before = net.clone();
    let mut state = AdamState::new(&net);
    adam_step(&mut state, &mut net, &Gradients::zeros_like(&before), 0.1).unwrap();
    assert_eq!(net, before);
}
