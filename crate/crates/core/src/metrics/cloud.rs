use crate::error::{Error, Result};
use crate::nn::FeatureMatrix;

pub type Point = [f64; 3];

/// An unordered set of `N >= 1` finite 3D points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Point>,
}

impl PointCloud {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::dim("point cloud must contain at least one point"));
        }
        if let Some(i) = points.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::OutOfRange(format!(
                "point {i} has a non-finite coordinate"
            )));
        }
        Ok(Self { points })
    }

    /// Builds a cloud from `[x0, y0, z0, x1, ...]`.
    pub fn from_flat(coords: &[f64]) -> Result<Self> {
        if !coords.len().is_multiple_of(3) {
            return Err(Error::dim(format!(
                "flat coordinate buffer length {} is not a multiple of 3",
                coords.len()
            )));
        }
        Self::new(coords.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.points.iter().flatten().copied().collect()
    }

    pub fn to_feature_matrix(&self) -> FeatureMatrix {
        FeatureMatrix::from_raw(self.len(), 3, self.flatten())
    }

    /// Point `i` of the result is point `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.len() {
            return Err(Error::dim("permutation length differs from point count"));
        }
        let mut seen = vec![false; perm.len()];
        let mut points = Vec::with_capacity(perm.len());
        for &src in perm {
            if src >= self.len() || std::mem::replace(&mut seen[src], true) {
                return Err(Error::dim("not a valid permutation"));
            }
            points.push(self.points[src]);
        }
        Ok(Self { points })
    }

    /// Returns true when both clouds hold bit-identical coordinates in the same order.
    pub fn bitwise_eq(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .points
                .iter()
                .flatten()
                .zip(other.points.iter().flatten())
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Squared Euclidean distance, always evaluated as `dx*dx + dy*dy + dz*dz`.
#[inline]
pub fn squared_distance(p: &Point, q: &Point) -> f64 {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    let dz = p[2] - q[2];
    dx * dx + dy * dy + dz * dz
}

#[inline]
pub fn distance(p: &Point, q: &Point) -> f64 {
    squared_distance(p, q).sqrt()
}
