use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::AdamConfig;

/// Architecture of the point-cloud autoencoder.
///
/// The encoder chain is `3 -> encoder_widths... -> latent_size`; every block
/// but the last is followed by ReLU, and the last block's output is
/// max-pooled over points into the latent vector. The decoder chain is
/// `latent_size -> decoder_widths... -> 3 * output_points`, with ReLU on the
/// hidden layers and a linear output layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AEConfig {
    pub input_points: usize,
    pub latent_size: usize,
    pub encoder_widths: Vec<usize>,
    pub decoder_widths: Vec<usize>,
    pub output_points: usize,
    pub seed: u64,
}

impl Default for AEConfig {
    fn default() -> Self {
        Self {
            input_points: 2048,
            latent_size: 32,
            encoder_widths: vec![64, 128, 256],
            decoder_widths: vec![256, 512],
            output_points: 2048,
            seed: 0,
        }
    }
}

impl AEConfig {
    /// Small configuration used for CPU-scale experiments: 256 points, k = 16.
    pub fn desk_scale() -> Self {
        Self {
            input_points: 256,
            latent_size: 16,
            output_points: 256,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_points == 0 || self.output_points == 0 {
            return Err(Error::config("point counts must be positive"));
        }
        if self.latent_size == 0 {
            return Err(Error::config("latent size must be positive"));
        }
        if self.encoder_widths.is_empty() {
            return Err(Error::config("encoder needs at least one hidden block"));
        }
        if self
            .encoder_widths
            .iter()
            .chain(&self.decoder_widths)
            .any(|&w| w == 0)
        {
            return Err(Error::config("layer widths must be positive"));
        }
        if self.encoder_widths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config(format!(
                "encoder widths must be strictly increasing, got {:?}",
                self.encoder_widths
            )));
        }
        Ok(())
    }

    pub fn encoder_chain(&self) -> Vec<usize> {
        let mut chain = vec![3];
        chain.extend(&self.encoder_widths);
        chain.push(self.latent_size);
        chain
    }

    pub fn decoder_chain(&self) -> Vec<usize> {
        let mut chain = vec![self.latent_size];
        chain.extend(&self.decoder_widths);
        chain.push(3 * self.output_points);
        chain
    }
}

/// Which reconstruction loss drives training.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    #[default]
    Chamfer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: AdamConfig,
    /// Seeds the per-epoch shuffle.
    pub seed: u64,
    pub loss: LossKind,
    /// Invoke the checkpoint callback every this many epochs.
    pub checkpoint_interval: Option<usize>,
    /// Final auction increment for the validation EMD.
    pub emd_epsilon: f64,
    /// Number of validation clouds (from the front) scored with EMD each epoch.
    pub emd_subset: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 8,
            optimizer: AdamConfig::default(),
            seed: 0,
            loss: LossKind::Chamfer,
            checkpoint_interval: None,
            emd_epsilon: 1e-3,
            emd_subset: 8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::config("batch size must be positive"));
        }
        if self.checkpoint_interval == Some(0) {
            return Err(Error::config("checkpoint interval must be positive"));
        }
        if !(self.emd_epsilon.is_finite() && self.emd_epsilon > 0.0) {
            return Err(Error::config("EMD epsilon must be finite and > 0"));
        }
        self.optimizer.validate()
    }
}

/// Deterministic train/validation split recorded with a trained model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitInfo {
    pub val_fraction: f64,
    pub seed: u64,
}

impl SplitInfo {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.val_fraction) {
            return Err(Error::config(format!(
                "validation fraction {} must lie in [0, 1)",
                self.val_fraction
            )));
        }
        Ok(())
    }

    /// Number of validation items out of `n`, rounded to nearest but always
    /// leaving at least one training item.
    pub fn val_count(&self, n: usize) -> usize {
        ((n as f64 * self.val_fraction).round() as usize).min(n.saturating_sub(1))
    }

    /// Splits indices `0..n` into sorted `(train, val)` lists by a seeded
    /// shuffle of manifest order; the first `val_count` shuffled indices are
    /// held out.
    pub fn partition(&self, n: usize) -> (Vec<usize>, Vec<usize>) {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(self.seed));
        let (val, train) = order.split_at(self.val_count(n));
        let (mut train, mut val) = (train.to_vec(), val.to_vec());
        train.sort_unstable();
        val.sort_unstable();
        (train, val)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub epochs_trained: usize,
    pub final_loss: Option<f64>,
    #[serde(default)]
    pub split: Option<SplitInfo>,
}
