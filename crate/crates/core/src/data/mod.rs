//! Point-cloud files, normalization and the synthetic shape corpus.

mod dataset;
mod io;
mod normalize;
mod shapes;

pub use dataset::{
    build_dataset, family_histogram, DatasetManifest, DatasetSpec, ManifestEntry,
    NormalizationMode, MANIFEST_FILE, MANIFEST_VERSION,
};
pub use io::{
    cloud_to_binary, cloud_to_text, latent_to_text, load_cloud, load_latent, parse_cloud_binary,
    parse_cloud_text, parse_latent_text, save_cloud, save_latent, CloudFormat, CLOUD_MAGIC,
};
pub use normalize::{normalize, Normalization};
pub use shapes::{
    generate_shape, ChairParams, LampParams, ShapeFamily, ShapeParams, TableParams, ARMREST_WIDTH,
};
