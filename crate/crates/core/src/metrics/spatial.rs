//! Exact nearest-neighbour search: brute force and a static kd-tree that
//! agree bit for bit, including the smallest-index tie rule.

use super::cloud::{squared_distance, Point, PointCloud};

/// Clouds larger than this are searched through a [`SpatialIndex`].
pub const BRUTE_FORCE_MAX_POINTS: usize = 64;

pub const DEFAULT_LEAF_SIZE: usize = 8;

/// Linear scan; ties go to the smallest index.
pub fn nearest_brute(points: &[Point], query: &Point) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, p) in points.iter().enumerate() {
        let d = squared_distance(p, query);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Static kd-tree over a cloud's points. Immutable once built.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    points: Vec<Point>,
    order: Vec<usize>,
    nodes: Vec<Node>,
    leaf_size: usize,
}

impl SpatialIndex {
    pub fn build(cloud: &PointCloud) -> Self {
        Self::with_leaf_size(cloud, DEFAULT_LEAF_SIZE)
    }

    pub fn with_leaf_size(cloud: &PointCloud, leaf_size: usize) -> Self {
        let leaf_size = leaf_size.max(1);
        let mut index = Self {
            points: cloud.points().to_vec(),
            order: (0..cloud.len()).collect(),
            nodes: Vec::new(),
            leaf_size,
        };
        index.build_node(0, cloud.len());
        index
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn leaf_size(&self) -> usize {
        self.leaf_size
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= self.leaf_size {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let axis = self.widest_axis(start, end);
        let mid = start + (end - start) / 2;
        let points = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points[a][axis].total_cmp(&points[b][axis])
        });
        let value = self.points[self.order[mid]][axis];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    fn widest_axis(&self, start: usize, end: usize) -> usize {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for &i in &self.order[start..end] {
            for a in 0..3 {
                lo[a] = lo[a].min(self.points[i][a]);
                hi[a] = hi[a].max(self.points[i][a]);
            }
        }
        (0..3)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])).then(b.cmp(&a)))
            .unwrap_or(0)
    }

    /// Nearest stored point to `query` as `(index, squared distance)`.
    pub fn nearest(&self, query: &Point) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        self.search(0, query, &mut best);
        best
    }

    fn search(&self, node: usize, query: &Point, best: &mut (usize, f64)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let d = squared_distance(&self.points[i], query);
                    if d < best.1 || (d == best.1 && i < best.0) {
                        *best = (i, d);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = query[axis] - value;
                let (near, far) = if diff < 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.search(near, query, best);
                // Points across the plane are at least `diff^2` away. Equal
                // bounds are still visited so smaller-index ties are found.
                if diff * diff <= best.1 {
                    self.search(far, query, best);
                }
            }
        }
    }
}

/// Nearest-neighbour backend chosen by cloud size.
#[derive(Debug, Clone)]
pub enum NeighborSearch<'a> {
    Brute(&'a [Point]),
    Indexed(SpatialIndex),
}

impl<'a> NeighborSearch<'a> {
    pub fn new(cloud: &'a PointCloud) -> Self {
        if cloud.len() > BRUTE_FORCE_MAX_POINTS {
            NeighborSearch::Indexed(SpatialIndex::build(cloud))
        } else {
            NeighborSearch::Brute(cloud.points())
        }
    }

    pub fn nearest(&self, query: &Point) -> (usize, f64) {
        match self {
            NeighborSearch::Brute(points) => nearest_brute(points, query),
            NeighborSearch::Indexed(index) => index.nearest(query),
        }
    }
}
