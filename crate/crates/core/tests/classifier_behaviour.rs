use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semfeat_core::classifier::{evaluate, gradient_check, train, Mlp, TrainConfig};
use semfeat_core::*;

fn shape() -> FeatureShape {
    FeatureShape {
        seg_categories: 2,
        obj_categories: 2,
        bins: 1,
        global: 0,
    }
}

/// Two classes separated along the first SHMF entry.
fn separable(n: usize, seed: u64) -> Vec<(FeatureBundle, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let class = i % 2;
            let mut b = FeatureBundle::zeros(shape());
            for row in b.shmf.iter_mut() {
                row.iter_mut()
                    .for_each(|v| *v = rng.random_range(-1.0..1.0));
            }
            b.shmf[0][0] = if class == 0 { -2.0 } else { 2.0 } + rng.random_range(-0.5..0.5);
            b.sfv = vec![rng.random_range(0..3), rng.random_range(0..3)];
            (b, class)
        })
        .collect()
}

#[test]
fn separable_data_is_learned() {
    let data = separable(80, 1);
    let cfg = TrainConfig {
        epochs: 200,
        hidden: vec![16, 8],
        ..TrainConfig::default()
    };
    let model = train(&data, &cfg).unwrap();
    assert!(evaluate(&model, &data).unwrap().accuracy >= 0.99);
    let (sample, truth) = &data[3];
    let p = model.predict(sample).unwrap();
    assert_eq!(p.label, *truth);
    assert!((p.probabilities.iter().sum::<f64>() - 1.0).abs() <= 1e-6);
    assert!(p.probabilities.iter().all(|&v| v >= 0.0));
}

#[test]
fn same_seed_gives_identical_weights() {
    let data = separable(40, 2);
    let cfg = TrainConfig {
        epochs: 5,
        hidden: vec![8, 4],
        seed: 9,
        ..TrainConfig::default()
    };
    let a = train(&data, &cfg).unwrap();
    let b = train(&data, &cfg).unwrap();
    let bits = |m: &Mlp| m.params().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.network), bits(&b.network));
}

#[test]
fn accuracy_matches_manual_recount() {
    let data = separable(60, 3);
    let cfg = TrainConfig {
        epochs: 2,
        hidden: vec![4, 4],
        ..TrainConfig::default()
    };
    let model = train(&data[..30], &cfg).unwrap();
    let report = evaluate(&model, &data[30..]).unwrap();
    let correct = data[30..]
        .iter()
        .filter(|(b, c)| model.predict(b).unwrap().label == *c)
        .count();
    assert_eq!(report.correct() as usize, correct);
    assert_eq!(report.accuracy, correct as f64 / 30.0);
    for (c, row) in report.confusion.iter().enumerate() {
        assert_eq!(
            row.iter().sum::<u64>() as usize,
            data[30..].iter().filter(|(_, t)| *t == c).count()
        );
    }
}

#[test]
fn backprop_agrees_with_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut net = Mlp::new(&[6, 10, 7, 4], &mut rng);
    for layer in &mut net.layers {
        layer
            .bias
            .iter_mut()
            .for_each(|b| *b = rng.random_range(-0.1..0.1));
    }
    let xs: Vec<Vec<f64>> = (0..8)
        .map(|_| (0..6).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let batch: Vec<(&[f64], usize)> = xs
        .iter()
        .enumerate()
        .map(|(i, x)| (&x[..], i % 4))
        .collect();
    assert!(gradient_check(&net, &batch, 1e-3) <= 1e-4);
}

#[test]
fn invalid_datasets_rejected() {
    assert!(train(&[], &TrainConfig::default()).is_err());
    let one_class: Vec<_> = separable(10, 4).into_iter().map(|(b, _)| (b, 1)).collect();
    assert!(train(&one_class, &TrainConfig::default()).is_err());
    let mut drift = separable(10, 4);
    drift[3].0 = FeatureBundle::zeros(FeatureShape {
        seg_categories: 3,
        ..shape()
    });
    assert!(train(&drift, &TrainConfig::default()).is_err());
}
