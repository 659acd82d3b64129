use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::TrainConfig;
use super::model::{AEModel, ModelGrads};
use crate::error::{Error, Result};
use crate::metrics::{chamfer, emd_approx, PointCloud};
use crate::nn::OptimizerState;

/// Metrics recorded at the end of one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochReport {
    pub epoch: usize,
    /// Mean Chamfer over all training clouds seen during the epoch.
    pub train_chamfer: f64,
    pub val_chamfer: Option<f64>,
    pub val_emd: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: AEModel,
    pub history: Vec<EpochReport>,
}

impl TrainOutcome {
    pub fn loss_history(&self) -> Vec<f64> {
        self.history.iter().map(|r| r.train_chamfer).collect()
    }
}

/// Trains with mini-batch Adam on the mean Chamfer reconstruction loss.
pub fn train(
    model: AEModel,
    train_set: &[PointCloud],
    val_set: &[PointCloud],
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    train_with(model, train_set, val_set, cfg, |_, _| Ok(()))
}

/// Like [`train`], calling `checkpoint` after every `cfg.checkpoint_interval`
/// epochs with the latest report and model.
pub fn train_with<F>(
    mut model: AEModel,
    train_set: &[PointCloud],
    val_set: &[PointCloud],
    cfg: &TrainConfig,
    mut checkpoint: F,
) -> Result<TrainOutcome>
where
    F: FnMut(&EpochReport, &AEModel) -> Result<()>,
{
    cfg.validate()?;
    let n_points = model.config().input_points;
    if let Some(bad) = train_set
        .iter()
        .chain(val_set)
        .find(|c| c.len() != n_points)
    {
        return Err(Error::dim(format!(
            "model expects {n_points}-point clouds, dataset contains a {}-point cloud",
            bad.len()
        )));
    }
    if cfg.epochs > 0 && train_set.is_empty() {
        return Err(Error::dim("training set is empty"));
    }

    let mut optimizer = OptimizerState::new(cfg.optimizer, &model.param_shapes())?;
    let mut grads = ModelGrads::zeros_like(&model);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    let first_epoch = model.meta.epochs_trained;

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            grads.fill_zero();
            for &idx in batch {
                let loss = model.loss_and_grad(&train_set[idx], &mut grads)?;
                if !loss.is_finite() {
                    return Err(Error::Divergence { epoch, loss });
                }
                loss_sum += loss;
            }
            grads.scale(1.0 / batch.len() as f64);
            optimizer.step(&mut model.params_mut(), &grads.tensors())?;
        }
        let train_chamfer = loss_sum / train_set.len() as f64;
        if !train_chamfer.is_finite() {
            return Err(Error::Divergence {
                epoch,
                loss: train_chamfer,
            });
        }
        let (val_chamfer, val_emd) = validate(&model, val_set, cfg, epoch)?;
        let report = EpochReport {
            epoch,
            train_chamfer,
            val_chamfer,
            val_emd,
        };
        history.push(report);
        model.meta.epochs_trained = first_epoch + epoch + 1;
        model.meta.final_loss = Some(train_chamfer);
        if cfg
            .checkpoint_interval
            .is_some_and(|k| (epoch + 1) % k == 0)
        {
            checkpoint(&report, &model)?;
        }
    }
    Ok(TrainOutcome { model, history })
}

fn validate(
    model: &AEModel,
    val_set: &[PointCloud],
    cfg: &TrainConfig,
    epoch: usize,
) -> Result<(Option<f64>, Option<f64>)> {
    if val_set.is_empty() {
        return Ok((None, None));
    }
    let mut chamfer_sum = 0.0;
    let mut emd_sum = 0.0;
    let emd_count = cfg.emd_subset.min(val_set.len());
    for (i, cloud) in val_set.iter().enumerate() {
        let recon = model.reconstruct(cloud).map_err(|_| Error::Divergence {
            epoch,
            loss: f64::NAN,
        })?;
        chamfer_sum += chamfer(&recon, cloud);
        if i < emd_count && recon.len() == cloud.len() {
            emd_sum += emd_approx(&recon, cloud, cfg.emd_epsilon)?.cost;
        }
    }
    let val_chamfer = chamfer_sum / val_set.len() as f64;
    let val_emd = (emd_count > 0 && model.config().output_points == model.config().input_points)
        .then(|| emd_sum / emd_count as f64);
    Ok((Some(val_chamfer), val_emd))
}
