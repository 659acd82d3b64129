//! Earth mover's distance between equal-size clouds as a minimum-cost
//! bijection under unsquared Euclidean distance.

use std::collections::VecDeque;

use super::cloud::{distance, PointCloud};
use crate::error::{Error, Result};

/// Largest cloud size accepted by [`emd_exact`] by default.
pub const EXACT_SIZE_CAP: usize = 512;

/// Bid budget for [`emd_approx`] before it reports non-convergence.
pub const DEFAULT_MAX_BIDS: u64 = 200_000_000;

/// A bijection from indices of cloud `a` to indices of cloud `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub permutation: Vec<usize>,
    /// `sum_i |a_i - b_{permutation[i]}|`, summed in increasing `i`.
    pub cost: f64,
}

impl Assignment {
    pub fn from_permutation(
        a: &PointCloud,
        b: &PointCloud,
        permutation: Vec<usize>,
    ) -> Result<Self> {
        check_sizes(a, b)?;
        if !is_bijection(&permutation, a.len()) {
            return Err(Error::dim("assignment is not a bijection"));
        }
        let cost = assignment_cost(a, b, &permutation);
        Ok(Self { permutation, cost })
    }

    pub fn is_bijection(&self) -> bool {
        is_bijection(&self.permutation, self.permutation.len())
    }
}

pub fn is_bijection(perm: &[usize], n: usize) -> bool {
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    perm.iter()
        .all(|&j| j < n && !std::mem::replace(&mut seen[j], true))
}

/// Total distance of a given pairing, in the canonical summation order.
pub fn assignment_cost(a: &PointCloud, b: &PointCloud, perm: &[usize]) -> f64 {
    a.points()
        .iter()
        .zip(perm)
        .map(|(p, &j)| distance(p, &b.points()[j]))
        .sum()
}

fn check_sizes(a: &PointCloud, b: &PointCloud) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::dim(format!(
            "EMD needs equal-size clouds, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

fn cost_matrix(a: &PointCloud, b: &PointCloud) -> Vec<f64> {
    let mut c = Vec::with_capacity(a.len() * b.len());
    for p in a.points() {
        c.extend(b.points().iter().map(|q| distance(p, q)));
    }
    c
}

/// Exact minimum-cost bijection, capped at [`EXACT_SIZE_CAP`] points.
pub fn emd_exact(a: &PointCloud, b: &PointCloud) -> Result<Assignment> {
    emd_exact_with_cap(a, b, EXACT_SIZE_CAP)
}

pub fn emd_exact_with_cap(a: &PointCloud, b: &PointCloud, cap: usize) -> Result<Assignment> {
    check_sizes(a, b)?;
    if a.len() > cap {
        return Err(Error::Capacity { size: a.len(), cap });
    }
    let perm = hungarian(&cost_matrix(a, b), a.len());
    Assignment::from_permutation(a, b, perm)
}

/// Shortest-augmenting-path Hungarian method with row/column potentials,
/// `O(n^3)`. `cost` is row-major `n x n`; returns the column for each row.
pub fn hungarian(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    // 1-based internally; index 0 is the virtual root column.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for row in 1..=n {
        row_of_col[0] = row;
        let mut col0 = 0usize;
        let mut min_slack = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r = row_of_col[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0usize;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let slack = cost[(r - 1) * n + (col - 1)] - u[r] - v[col];
                if slack < min_slack[col] {
                    min_slack[col] = slack;
                    way[col] = col0;
                }
                if min_slack[col] < delta {
                    delta = min_slack[col];
                    col1 = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    u[row_of_col[col]] += delta;
                    v[col] -= delta;
                } else {
                    min_slack[col] -= delta;
                }
            }
            col0 = col1;
            if row_of_col[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            row_of_col[col0] = row_of_col[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0usize; n];
    for col in 1..=n {
        perm[row_of_col[col] - 1] = col - 1;
    }
    perm
}

/// Settings for the epsilon-scaling auction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuctionConfig {
    /// Final bidding increment; the result is within `n * epsilon` of optimal.
    pub epsilon: f64,
    pub max_bids: u64,
}

impl AuctionConfig {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            max_bids: DEFAULT_MAX_BIDS,
        }
    }
}

/// Approximate EMD by Gauss-Seidel auction with epsilon scaling.
pub fn emd_approx(a: &PointCloud, b: &PointCloud, epsilon: f64) -> Result<Assignment> {
    emd_approx_with(a, b, AuctionConfig::new(epsilon))
}

pub fn emd_approx_with(a: &PointCloud, b: &PointCloud, cfg: AuctionConfig) -> Result<Assignment> {
    check_sizes(a, b)?;
    if !(cfg.epsilon.is_finite() && cfg.epsilon > 0.0) {
        return Err(Error::config("auction epsilon must be finite and > 0"));
    }
    let n = a.len();
    let cost = cost_matrix(a, b);
    let perm = auction(&cost, n, cfg)?;
    Assignment::from_permutation(a, b, perm)
}

/// Minimum-cost auction on a row-major `n x n` matrix. Persons are rows and
/// bid for columns; the benefit of column `j` to row `i` is `-cost[i][j]`.
pub fn auction(cost: &[f64], n: usize, cfg: AuctionConfig) -> Result<Vec<usize>> {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    if n == 1 {
        return Ok(vec![0]);
    }
    let (lo, hi) = cost
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &c| {
            (lo.min(c), hi.max(c))
        });
    let range = hi - lo;
    if range == 0.0 {
        return Ok((0..n).collect());
    }

    let mut prices = vec![0.0f64; n];
    let mut epsilon = (range / n as f64).max(cfg.epsilon);
    let mut bids: u64 = 0;
    let mut col_of_row = vec![usize::MAX; n];
    let mut row_of_col = vec![usize::MAX; n];

    loop {
        col_of_row.iter_mut().for_each(|c| *c = usize::MAX);
        row_of_col.iter_mut().for_each(|r| *r = usize::MAX);
        let mut unassigned: VecDeque<usize> = (0..n).collect();

        while let Some(row) = unassigned.pop_front() {
            bids += 1;
            if bids > cfg.max_bids {
                return Err(Error::Convergence {
                    iterations: bids - 1,
                });
            }
            let row_cost = &cost[row * n..(row + 1) * n];
            let mut best_col = 0;
            let mut best = f64::NEG_INFINITY;
            let mut second = f64::NEG_INFINITY;
            for (col, (&c, &p)) in row_cost.iter().zip(&prices).enumerate() {
                let value = -c - p;
                if value > best {
                    second = best;
                    best = value;
                    best_col = col;
                } else if value > second {
                    second = value;
                }
            }
            prices[best_col] += best - second + epsilon;
            let previous = std::mem::replace(&mut row_of_col[best_col], row);
            if previous != usize::MAX {
                col_of_row[previous] = usize::MAX;
                unassigned.push_back(previous);
            }
            col_of_row[row] = best_col;
        }

        if epsilon <= cfg.epsilon {
            break;
        }
        epsilon = (epsilon * 0.5).max(cfg.epsilon);
    }
    Ok(col_of_row)
}
