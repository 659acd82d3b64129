//! Permutation-invariant point-cloud autoencoder.
//!
//! Encoder: pointwise conv blocks of increasing width with ReLU, a final
//! pointwise projection to `k` features, and a column-wise max over points.
//! Decoder: two ReLU dense layers and a linear dense layer emitting `M x 3`
//! coordinates.

mod config;
mod eval;
mod model;
mod persist;
mod train;

pub use config::{AEConfig, LossKind, SplitInfo, TrainConfig, TrainingMeta};
pub use eval::{evaluate, family_centroids, nearest_centroid, EvalReport, FamilyCentroid, Labeled};
pub use model::{AEModel, DecoderTrace, EncoderTrace, LatentVector, ModelGrads};
pub use persist::{
    load_model, model_from_bytes, model_to_bytes, save_model, MODEL_MAGIC, MODEL_VERSION,
};
pub use train::{train, train_with, EpochReport, TrainOutcome};
