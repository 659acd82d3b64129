use super::cloud::{Point, PointCloud};
use super::spatial::NeighborSearch;

/// Nearest-neighbour correspondences in both directions between two clouds.
#[derive(Debug, Clone)]
pub struct ChamferMatch {
    /// For each point of `a`, its nearest point in `b` and the squared distance.
    pub a_to_b: Vec<(usize, f64)>,
    /// For each point of `b`, its nearest point in `a` and the squared distance.
    pub b_to_a: Vec<(usize, f64)>,
}

impl ChamferMatch {
    pub fn compute(a: &PointCloud, b: &PointCloud) -> Self {
        Self {
            a_to_b: directed(a, b),
            b_to_a: directed(b, a),
        }
    }

    /// Canonical summation order: all `a` terms in index order, then all `b`
    /// terms in index order, then the two partial sums are added.
    pub fn value(&self) -> f64 {
        let forward: f64 = self.a_to_b.iter().map(|&(_, d)| d).sum();
        let backward: f64 = self.b_to_a.iter().map(|&(_, d)| d).sum();
        forward + backward
    }

    /// Gradient with respect to the coordinates of `a`, holding the
    /// correspondences fixed.
    pub fn grad_a(&self, a: &PointCloud, b: &PointCloud) -> Vec<Point> {
        let (pa, pb) = (a.points(), b.points());
        let mut grad = vec![[0.0; 3]; pa.len()];
        for (i, &(j, _)) in self.a_to_b.iter().enumerate() {
            for c in 0..3 {
                grad[i][c] += 2.0 * (pa[i][c] - pb[j][c]);
            }
        }
        for (j, &(i, _)) in self.b_to_a.iter().enumerate() {
            for c in 0..3 {
                grad[i][c] += 2.0 * (pa[i][c] - pb[j][c]);
            }
        }
        grad
    }
}

fn directed(from: &PointCloud, to: &PointCloud) -> Vec<(usize, f64)> {
    let search = NeighborSearch::new(to);
    from.points().iter().map(|p| search.nearest(p)).collect()
}

/// Sum of squared nearest-neighbour distances from `a` to `b` plus from `b` to `a`.
pub fn chamfer(a: &PointCloud, b: &PointCloud) -> f64 {
    ChamferMatch::compute(a, b).value()
}

/// Subgradient of [`chamfer`] with respect to the points of `a`.
pub fn chamfer_grad(a: &PointCloud, b: &PointCloud) -> Vec<Point> {
    ChamferMatch::compute(a, b).grad_a(a, b)
}

pub fn chamfer_with_grad(a: &PointCloud, b: &PointCloud) -> (f64, Vec<Point>) {
    let m = ChamferMatch::compute(a, b);
    (m.value(), m.grad_a(a, b))
}
