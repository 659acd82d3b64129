use latentcloud_core::autoencoder::{AEModel, LatentVector};
use latentcloud_core::data::DatasetManifest;
use latentcloud_core::latent::{latent_stats, LatentStats};
use latentcloud_core::{Error, PointCloud, Result};

/// Everything a request handler reads: the model, the dataset it explores,
/// each entry's latent, and the latent ranges. Immutable once built.
#[derive(Debug)]
pub struct SessionCatalog {
    model: AEModel,
    manifest: DatasetManifest,
    latents: Vec<LatentVector>,
    stats: LatentStats,
}

impl SessionCatalog {
    /// Loads and encodes every manifest entry.
    pub fn build(model: AEModel, manifest: DatasetManifest) -> Result<Self> {
        let clouds = manifest.load_all()?;
        Self::from_clouds(model, manifest, &clouds)
    }

    pub fn from_clouds(
        model: AEModel,
        manifest: DatasetManifest,
        clouds: &[PointCloud],
    ) -> Result<Self> {
        if manifest.point_count != model.config().input_points {
            return Err(Error::Dimension(format!(
                "dataset clouds have {} points, model expects {}",
                manifest.point_count,
                model.config().input_points
            )));
        }
        if clouds.len() != manifest.len() {
            return Err(Error::Dimension(format!(
                "{} clouds for {} manifest entries",
                clouds.len(),
                manifest.len()
            )));
        }
        let latents = clouds
            .iter()
            .map(|c| model.encode(c))
            .collect::<Result<Vec<_>>>()?;
        let stats = latent_stats(&latents)?;
        Ok(Self {
            model,
            manifest,
            latents,
            stats,
        })
    }

    pub fn model(&self) -> &AEModel {
        &self.model
    }

    pub fn manifest(&self) -> &DatasetManifest {
        &self.manifest
    }

    pub fn latents(&self) -> &[LatentVector] {
        &self.latents
    }

    pub fn stats(&self) -> &LatentStats {
        &self.stats
    }

    pub fn latent_of(&self, id: &str) -> Option<&LatentVector> {
        self.manifest.find(id).map(|(i, _)| &self.latents[i])
    }
}
