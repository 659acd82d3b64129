//! Point-cloud autoencoder engine.
//!
//! * [`nn`]: f64 layer kernels with hand-written backward passes and Adam.
//! * [`metrics`]: Chamfer distance (with gradient), exact and approximate EMD,
//!   and exact nearest-neighbour search.
//! * [`autoencoder`]: the permutation-invariant encoder, dense decoder,
//!   training loop and model file format.
//! * [`latent`]: feature editing, interpolation and slider scaling.
//! * [`data`]: cloud file formats, normalization and a procedural dataset.

pub mod autoencoder;
pub mod data;
pub mod error;
pub mod latent;
pub mod metrics;
pub mod nn;

pub use autoencoder::{AEConfig, AEModel, LatentVector, TrainConfig};
pub use error::{Error, ModelFormatError, ParseError, Result};
pub use metrics::PointCloud;
