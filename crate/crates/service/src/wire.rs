//! JSON request and response bodies for `/api/v1`.
//!
//! Floats are written by `serde_json` in shortest round-trip form, which
//! parses back to the identical `f64`.

use serde::{Deserialize, Serialize};

use latentcloud_core::autoencoder::AEConfig;
use latentcloud_core::latent::LatentStats;
use latentcloud_core::metrics::Point;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelInfo {
    #[serde(flatten)]
    pub config: AEConfig,
    pub epochs_trained: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyCount {
    pub name: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub count: usize,
    pub point_count: usize,
    pub families: Vec<FamilyCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlInfo {
    pub count: usize,
    pub slider_range: f64,
    pub knob_range: f64,
    /// Largest valid `offset` for `/edit`; absent when k < count.
    pub max_offset: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoResponse {
    pub model: ModelInfo,
    pub dataset: DatasetInfo,
    pub stats: LatentStats,
    pub controls: ControlInfo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemSummary {
    pub id: String,
    pub family: String,
    pub latent: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemsResponse {
    pub items: Vec<ItemSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemDetail {
    pub id: String,
    pub family: String,
    pub latent: Vec<f64>,
    pub points: Vec<Point>,
}

/// `null` entries stand for values JSON cannot carry (NaN, infinities), which
/// is how browsers serialize them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeRequest {
    pub latent: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeResponse {
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditRequest {
    #[serde(default)]
    pub base_id: Option<String>,
    #[serde(default)]
    pub base_latent: Option<Vec<Option<f64>>>,
    pub sliders: Vec<f64>,
    pub knobs: Vec<f64>,
    #[serde(default)]
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditResponse {
    /// `x = f + t`
    pub latent: Vec<f64>,
    pub transform: Vec<f64>,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolateRequest {
    pub ids: Vec<String>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolateResponse {
    pub latent: Vec<f64>,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreviewRequest {
    #[serde(default)]
    pub base_id: Option<String>,
    #[serde(default)]
    pub base_latent: Option<Vec<Option<f64>>>,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedLatent {
    pub latent: Vec<f64>,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreviewResponse {
    pub dim: usize,
    pub minus: DecodedLatent,
    pub plus: DecodedLatent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorDetail {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}
