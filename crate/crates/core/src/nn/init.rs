use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::layers::{DenseLayer, PointwiseConvLayer};
use crate::error::{Error, Result};

/// Half-width of the scaled-uniform initialization interval.
pub fn glorot_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

/// Seeded parameter initializer. Layers drawn from the same initializer in
/// the same order are identical byte for byte across runs.
#[derive(Debug, Clone)]
pub struct SeededInit {
    rng: ChaCha8Rng,
}

impl SeededInit {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn draw(&mut self, fan_in: usize, fan_out: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if fan_in == 0 || fan_out == 0 {
            return Err(Error::config(format!(
                "layer widths must be positive, got {fan_in}->{fan_out}"
            )));
        }
        let bound = glorot_bound(fan_in, fan_out);
        let weights = (0..fan_in * fan_out)
            .map(|_| self.rng.random_range(-bound..=bound))
            .collect();
        Ok((weights, vec![0.0; fan_out]))
    }

    pub fn conv(&mut self, fan_in: usize, fan_out: usize) -> Result<PointwiseConvLayer> {
        let (w, b) = self.draw(fan_in, fan_out)?;
        PointwiseConvLayer::new(fan_in, fan_out, w, b)
    }

    pub fn dense(&mut self, fan_in: usize, fan_out: usize) -> Result<DenseLayer> {
        let (w, b) = self.draw(fan_in, fan_out)?;
        DenseLayer::new(fan_in, fan_out, w, b)
    }
}

/// Initializes a chain of dense layers `widths[0] -> widths[1] -> ...`.
pub fn seeded_init(widths: &[usize], seed: u64) -> Result<Vec<DenseLayer>> {
    if widths.len() < 2 {
        return Err(Error::config("need at least an input and an output width"));
    }
    let mut init = SeededInit::new(seed);
    widths.windows(2).map(|w| init.dense(w[0], w[1])).collect()
}
