//! Reconstruction quality and nearest-family classification.

use serde::{Deserialize, Serialize};

use super::model::{AEModel, LatentVector};
use crate::error::{Error, Result};
use crate::metrics::{chamfer, emd_approx, PointCloud};

/// A cloud with its family label.
#[derive(Debug, Clone, Copy)]
pub struct Labeled<'a> {
    pub cloud: &'a PointCloud,
    pub family: &'a str,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyCentroid {
    pub family: String,
    /// Mean latent of the family's reference items.
    pub latent: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub count: usize,
    pub chamfer_mean: f64,
    pub chamfer_median: f64,
    /// `None` when output and input point counts differ.
    pub emd_mean: Option<f64>,
    pub emd_median: Option<f64>,
    /// Fraction of evaluated items whose reconstruction is Chamfer-closest to
    /// the decoded centroid of its own family.
    pub classification_accuracy: f64,
    pub families: Vec<String>,
}

/// Decoded family centroids: the decode of each family's mean latent over
/// `reference`, in first-seen family order.
pub fn family_centroids(
    model: &AEModel,
    reference: &[Labeled<'_>],
) -> Result<Vec<(FamilyCentroid, PointCloud)>> {
    let mut groups: Vec<(String, Vec<f64>, usize)> = Vec::new();
    for item in reference {
        let z = model.encode(item.cloud)?;
        let slot = match groups.iter().position(|g| g.0 == item.family) {
            Some(i) => i,
            None => {
                groups.push((item.family.to_string(), vec![0.0; z.len()], 0));
                groups.len() - 1
            }
        };
        let g = &mut groups[slot];
        g.1.iter_mut().zip(z.values()).for_each(|(s, v)| *s += v);
        g.2 += 1;
    }
    groups
        .into_iter()
        .map(|(family, sum, n)| {
            let mean: Vec<f64> = sum.into_iter().map(|s| s / n as f64).collect();
            let decoded = model.decode(&LatentVector::new(mean.clone())?)?;
            Ok((
                FamilyCentroid {
                    family,
                    latent: mean,
                },
                decoded,
            ))
        })
        .collect()
}

/// Index of the centroid closest (by Chamfer) to `cloud`; ties go to the
/// first centroid.
pub fn nearest_centroid(cloud: &PointCloud, centroids: &[(FamilyCentroid, PointCloud)]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, (_, c)) in centroids.iter().enumerate() {
        let d = chamfer(cloud, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// Scores reconstructions of `items`; family centroids come from `reference`.
pub fn evaluate(
    model: &AEModel,
    reference: &[Labeled<'_>],
    items: &[Labeled<'_>],
    emd_epsilon: f64,
) -> Result<EvalReport> {
    if items.is_empty() {
        return Err(Error::dim("nothing to evaluate"));
    }
    if reference.is_empty() {
        return Err(Error::dim(
            "family centroids need at least one reference item",
        ));
    }
    let centroids = family_centroids(model, reference)?;
    let with_emd = model.config().input_points == model.config().output_points;
    let mut chamfers = Vec::with_capacity(items.len());
    let mut emds = Vec::with_capacity(items.len());
    let mut correct = 0usize;
    for item in items {
        let recon = model.reconstruct(item.cloud)?;
        chamfers.push(chamfer(&recon, item.cloud));
        if with_emd {
            emds.push(emd_approx(&recon, item.cloud, emd_epsilon)?.cost);
        }
        if centroids[nearest_centroid(&recon, &centroids)].0.family == item.family {
            correct += 1;
        }
    }
    Ok(EvalReport {
        count: items.len(),
        chamfer_mean: mean(&chamfers),
        chamfer_median: median(&mut chamfers),
        emd_mean: with_emd.then(|| mean(&emds)),
        emd_median: with_emd.then(|| median(&mut emds)),
        classification_accuracy: correct as f64 / items.len() as f64,
        families: centroids.into_iter().map(|(c, _)| c.family).collect(),
    })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Median of a non-empty slice; mean of the middle pair for even lengths.
fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}
