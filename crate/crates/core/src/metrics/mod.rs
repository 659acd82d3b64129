//! Permutation-invariant set distances between point clouds.
//!
//! Chamfer distance uses squared Euclidean distance and carries an analytic
//! gradient for training. EMD uses plain Euclidean distance and is reported
//! for evaluation only, exactly (Hungarian) or approximately (auction).

mod chamfer;
mod cloud;
mod emd;
mod spatial;

pub use chamfer::{chamfer, chamfer_grad, chamfer_with_grad, ChamferMatch};
pub use cloud::{distance, squared_distance, Point, PointCloud};
pub use emd::{
    assignment_cost, auction, emd_approx, emd_approx_with, emd_exact, emd_exact_with_cap,
    hungarian, is_bijection, Assignment, AuctionConfig, DEFAULT_MAX_BIDS, EXACT_SIZE_CAP,
};
pub use spatial::{
    nearest_brute, NeighborSearch, SpatialIndex, BRUTE_FORCE_MAX_POINTS, DEFAULT_LEAF_SIZE,
};

/// Builds a kd-tree over `cloud`.
pub fn build_index(cloud: &PointCloud) -> SpatialIndex {
    SpatialIndex::build(cloud)
}

/// Nearest stored point to `query` as `(index, squared distance)`.
pub fn nearest(index: &SpatialIndex, query: &Point) -> (usize, f64) {
    index.nearest(query)
}
