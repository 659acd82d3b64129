//! Minimal deterministic f64 kernel: pointwise convolution, dense, ReLU and
//! max-pool layers with hand-derived backward passes, plus an Adam optimizer.
//!
//! There is no autodiff graph. Callers keep the forward inputs they need and
//! hand them back to the matching `backward` function.

mod adam;
mod gemm;
mod init;
mod layers;
mod matrix;

pub use adam::{AdamConfig, OptimizerState};
pub use init::{glorot_bound, seeded_init, SeededInit};
pub use layers::{
    maxpool_backward, maxpool_points, relu_backward, relu_forward, relu_gate, relu_in_place,
    DenseLayer, LayerGrads, PointwiseConvLayer,
};
pub use matrix::FeatureMatrix;
