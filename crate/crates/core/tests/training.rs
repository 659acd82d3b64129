mod common;

use latentcloud_core::autoencoder::{train, train_with, AEConfig, AEModel, TrainConfig};
use latentcloud_core::metrics::chamfer;
use latentcloud_core::nn::AdamConfig;
use latentcloud_core::{Error, PointCloud};

fn config(n: usize, seed: u64) -> AEConfig {
    AEConfig {
        input_points: n,
        latent_size: 8,
        encoder_widths: vec![16, 32],
        decoder_widths: vec![32, 64],
        output_points: n,
        seed,
    }
}

fn clouds(n_clouds: usize, n: usize, seed: u64) -> Vec<PointCloud> {
    let mut r = common::rng(seed);
    (0..n_clouds)
        .map(|_| common::random_cloud(&mut r, n))
        .collect()
}

fn train_cfg(epochs: usize) -> TrainConfig {
    TrainConfig {
        epochs,
        batch_size: 4,
        seed: 3,
        ..TrainConfig::default()
    }
}

#[test]
fn training_is_deterministic_and_seed_sensitive() {
    let data = clouds(10, 16, 1);
    let run = |seed| {
        let cfg = TrainConfig {
            seed,
            ..train_cfg(5)
        };
        train(
            AEModel::new(config(16, 0)).unwrap(),
            &data[..8],
            &data[8..],
            &cfg,
        )
        .unwrap()
    };
    let (a, b, c) = (run(1), run(1), run(2));
    assert!(a.model.bitwise_eq(&b.model));
    assert_eq!(a.history, b.history);
    assert!(!a.model.bitwise_eq(&c.model));
    assert_eq!(a.history.len(), 5);
    assert!(a
        .history
        .iter()
        .all(|r| r.val_chamfer.is_some() && r.val_emd.is_some()));
    assert_eq!(a.model.meta.epochs_trained, 5);
}

#[test]
fn loss_decreases() {
    let data = clouds(12, 32, 2);
    let out = train(
        AEModel::new(config(32, 1)).unwrap(),
        &data,
        &[],
        &train_cfg(30),
    )
    .unwrap();
    let h = out.loss_history();
    assert!(h[h.len() - 1] < 0.5 * h[0], "{h:?}");
    assert!(out.history.iter().all(|r| r.val_chamfer.is_none()));
}

#[test]
fn zero_epochs_leave_the_model_untouched() {
    let model = AEModel::new(config(8, 4)).unwrap();
    let out = train(model.clone(), &[], &[], &train_cfg(0)).unwrap();
    assert!(out.model.bitwise_eq(&model));
    assert!(out.history.is_empty());
}

#[test]
fn single_example_memorization() {
    // Four points: small enough that Chamfer descent ends in a one-to-one
    // matching rather than a many-to-one local minimum.
    let data = clouds(1, 4, 5);
    let model = AEModel::new(AEConfig {
        input_points: 4,
        output_points: 4,
        ..AEConfig::desk_scale()
    })
    .unwrap();
    let initial = chamfer(&model.reconstruct(&data[0]).unwrap(), &data[0]);
    let cfg = TrainConfig {
        batch_size: 1,
        ..train_cfg(3000)
    };
    let out = train(model, &data, &[], &cfg).unwrap();
    let last = chamfer(&out.model.reconstruct(&data[0]).unwrap(), &data[0]);
    assert!(last < 0.05 * initial);
    assert!(last < 1e-3, "final Chamfer {last}");
}

#[test]
fn huge_learning_rate_diverges_with_epoch() {
    let data = clouds(4, 8, 6);
    let cfg = TrainConfig {
        optimizer: AdamConfig {
            learning_rate: 1e300,
            ..AdamConfig::default()
        },
        ..train_cfg(5)
    };
    match train(AEModel::new(config(8, 0)).unwrap(), &data, &[], &cfg) {
        Err(Error::Divergence { epoch, .. }) => assert!(epoch < 5),
        other => panic!("expected divergence, got {:?}", other.map(|o| o.history)),
    }
}

#[test]
fn checkpoints_follow_the_interval() {
    let data = clouds(4, 8, 7);
    let cfg = TrainConfig {
        checkpoint_interval: Some(2),
        ..train_cfg(7)
    };
    let mut seen = Vec::new();
    train_with(
        AEModel::new(config(8, 0)).unwrap(),
        &data,
        &[],
        &cfg,
        |r, m| {
            assert_eq!(m.meta.epochs_trained, r.epoch + 1);
            seen.push(r.epoch);
            Ok(())
        },
    )
    .unwrap();
    assert_eq!(seen, [1, 3, 5]);
}

#[test]
fn wrong_point_count_is_rejected() {
    let data = clouds(2, 9, 8);
    let res = train(
        AEModel::new(config(8, 0)).unwrap(),
        &data,
        &[],
        &train_cfg(1),
    );
    assert!(matches!(res, Err(Error::Dimension(_))));
}
