use serde::{Deserialize, Serialize};

use crate::metrics::{Point, PointCloud};

/// Inverse transform of [`normalize`]: `original = normalized * scale + centroid`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub centroid: Point,
    pub scale: f64,
}

impl Normalization {
    pub fn denormalize(&self, cloud: &PointCloud) -> PointCloud {
        let points = cloud
            .points()
            .iter()
            .map(|p| std::array::from_fn(|c| p[c] * self.scale + self.centroid[c]))
            .collect();
        PointCloud::new(points).expect("affine image of a valid cloud")
    }
}

/// Centres the cloud on its centroid and scales its farthest point to radius 1.
/// A cloud of one repeated point gets scale 1.
pub fn normalize(cloud: &PointCloud) -> (PointCloud, Normalization) {
    let n = cloud.len() as f64;
    let mut centroid = [0.0; 3];
    for p in cloud.points() {
        for c in 0..3 {
            centroid[c] += p[c];
        }
    }
    centroid.iter_mut().for_each(|c| *c /= n);

    let centered: Vec<Point> = cloud
        .points()
        .iter()
        .map(|p| std::array::from_fn(|c| p[c] - centroid[c]))
        .collect();
    let radius = centered
        .iter()
        .map(|p| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt())
        .fold(0.0f64, f64::max);
    let scale = if radius > 0.0 { radius } else { 1.0 };
    let points = centered
        .into_iter()
        .map(|p| std::array::from_fn(|c| p[c] / scale))
        .collect();
    (
        PointCloud::new(points).expect("normalized cloud is finite"),
        Normalization { centroid, scale },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_example() {
        let cloud = PointCloud::new(vec![[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]).unwrap();
        let (out, t) = normalize(&cloud);
        assert_eq!(out.points(), &[[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        assert_eq!(t.centroid, [1.0, 0.0, 0.0]);
        assert_eq!(t.scale, 1.0);
    }

    #[test]
    fn repeated_point() {
        let cloud = PointCloud::new(vec![[3.0, -1.0, 2.0]; 4]).unwrap();
        let (out, t) = normalize(&cloud);
        assert_eq!(t.scale, 1.0);
        assert!(out.points().iter().all(|p| *p == [0.0, 0.0, 0.0]));
    }
}
