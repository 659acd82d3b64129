//! Latent-space workflows: feature editing (`x = f + t`), convex
//! interpolation of several models (`h = (w / sum w) V`), and the per-dimension
//! dataset ranges that scale the editing sliders.

use serde::{Deserialize, Serialize};

use crate::autoencoder::LatentVector;
use crate::error::{Error, Result};

/// Number of slider/knob pairs on the editing surface.
pub const CONTROL_COUNT: usize = 8;
pub const SLIDER_RANGE: f64 = 1.0;
pub const KNOB_RANGE: f64 = 0.1;

/// Per-dimension min/max over a set of latents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentStats {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub count: usize,
}

impl LatentStats {
    pub fn dims(&self) -> usize {
        self.min.len()
    }

    /// Half the observed interval of dimension `dim`.
    pub fn half_interval(&self, dim: usize) -> f64 {
        (self.max[dim] - self.min[dim]) / 2.0
    }
}

pub fn latent_stats(latents: &[LatentVector]) -> Result<LatentStats> {
    let first = latents
        .first()
        .ok_or_else(|| Error::dim("latent statistics need at least one latent"))?;
    let mut min = first.values().to_vec();
    let mut max = first.values().to_vec();
    for (i, z) in latents.iter().enumerate().skip(1) {
        if z.len() != min.len() {
            return Err(Error::dim(format!(
                "latent {i} has length {}, expected {}",
                z.len(),
                min.len()
            )));
        }
        for (d, &v) in z.values().iter().enumerate() {
            min[d] = min[d].min(v);
            max[d] = max[d].max(v);
        }
    }
    Ok(LatentStats {
        min,
        max,
        count: latents.len(),
    })
}

/// `x = f + t`.
pub fn feature_edit(f: &LatentVector, t: &LatentVector) -> Result<LatentVector> {
    if f.len() != t.len() {
        return Err(Error::dim(format!(
            "base latent has length {}, transformation has length {}",
            f.len(),
            t.len()
        )));
    }
    LatentVector::new(
        f.values()
            .iter()
            .zip(t.values())
            .map(|(a, b)| a + b)
            .collect(),
    )
}

/// Convex combination of the rows of `rows` with L1-normalized `weights`.
pub fn interpolate(rows: &[LatentVector], weights: &[f64]) -> Result<LatentVector> {
    if rows.len() < 2 {
        return Err(Error::dim("interpolation needs at least two latents"));
    }
    if weights.len() != rows.len() {
        return Err(Error::dim(format!(
            "{} weights for {} latents",
            weights.len(),
            rows.len()
        )));
    }
    let k = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != k) {
        return Err(Error::dim(format!(
            "latent {i} has length {}, expected {k}",
            rows[i].len()
        )));
    }
    if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::DegenerateWeights(format!(
            "weight {i} is {}; weights must be finite and non-negative",
            weights[i]
        )));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::DegenerateWeights(
            "weights must have a positive sum".into(),
        ));
    }

    // Accumulate only the non-zero terms, starting from the first one, so a
    // one-hot weight vector reproduces its row bit for bit.
    let mut h: Option<Vec<f64>> = None;
    for (row, &w) in rows.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        let c = w / total;
        match h.as_mut() {
            None => h = Some(row.values().iter().map(|v| c * v).collect()),
            Some(acc) => acc
                .iter_mut()
                .zip(row.values())
                .for_each(|(a, v)| *a += c * v),
        }
    }
    let mut h = h.expect("positive sum implies a non-zero weight");
    // Rounding in the normalized weights can overshoot the hull by an ulp.
    for (d, v) in h.iter_mut().enumerate() {
        let (lo, hi) = rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r.values()[d]), hi.max(r.values()[d]))
            });
        *v = v.clamp(lo, hi);
    }
    LatentVector::new(h)
}

/// Maps the eight slider and knob positions onto a transformation vector.
///
/// `t[offset + j] = (sliders[j] + knobs[j]) * (max - min) / 2` for the
/// controlled block; every other component is zero.
pub fn slider_to_t(
    stats: &LatentStats,
    sliders: &[f64; CONTROL_COUNT],
    knobs: &[f64; CONTROL_COUNT],
    offset: usize,
) -> Result<LatentVector> {
    let k = stats.dims();
    if offset + CONTROL_COUNT > k {
        return Err(Error::dim(format!(
            "control offset {offset} leaves fewer than {CONTROL_COUNT} dimensions of {k}"
        )));
    }
    check_controls("slider", sliders, SLIDER_RANGE)?;
    check_controls("knob", knobs, KNOB_RANGE)?;
    let mut t = vec![0.0; k];
    for j in 0..CONTROL_COUNT {
        t[offset + j] = (sliders[j] + knobs[j]) * stats.half_interval(offset + j);
    }
    LatentVector::new(t)
}

fn check_controls(kind: &str, values: &[f64], range: f64) -> Result<()> {
    match values.iter().position(|v| !(-range..=range).contains(v)) {
        Some(j) => Err(Error::OutOfRange(format!(
            "{kind} {j} is {}, must lie in [-{range}, {range}]",
            values[j]
        ))),
        None => Ok(()),
    }
}

/// Latents at `f -/+ half-interval` along one dimension, used to preview what
/// a single slider does.
pub fn preview_latents(
    stats: &LatentStats,
    f: &LatentVector,
    dim: usize,
) -> Result<(LatentVector, LatentVector)> {
    if f.len() != stats.dims() {
        return Err(Error::dim(
            "base latent length differs from stats dimension",
        ));
    }
    if dim >= f.len() {
        return Err(Error::dim(format!(
            "dimension {dim} out of range 0..{}",
            f.len()
        )));
    }
    let half = stats.half_interval(dim);
    let mut minus = f.values().to_vec();
    let mut plus = f.values().to_vec();
    minus[dim] -= half;
    plus[dim] += half;
    Ok((LatentVector::new(minus)?, LatentVector::new(plus)?))
}

/// Base latent `f` plus the current transformation `t`, with `x = f + t`
/// kept in sync.
#[derive(Debug, Clone, PartialEq)]
pub struct EditState {
    base: LatentVector,
    transform: LatentVector,
    edited: LatentVector,
}

impl EditState {
    pub fn new(base: LatentVector) -> Self {
        let transform = LatentVector::zeros(base.len());
        Self {
            edited: base.clone(),
            base,
            transform,
        }
    }

    pub fn set_transform(&mut self, t: LatentVector) -> Result<&LatentVector> {
        self.edited = feature_edit(&self.base, &t)?;
        self.transform = t;
        Ok(&self.edited)
    }

    pub fn base(&self) -> &LatentVector {
        &self.base
    }

    pub fn transform(&self) -> &LatentVector {
        &self.transform
    }

    pub fn edited(&self) -> &LatentVector {
        &self.edited
    }
}

/// Latents of the selected models plus their raw, non-negative weights.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationState {
    rows: Vec<LatentVector>,
    weights: Vec<f64>,
}

impl InterpolationState {
    pub fn new(rows: Vec<LatentVector>, weights: Vec<f64>) -> Result<Self> {
        interpolate(&rows, &weights)?;
        Ok(Self { rows, weights })
    }

    pub fn set_weights(&mut self, weights: Vec<f64>) -> Result<LatentVector> {
        let h = interpolate(&self.rows, &weights)?;
        self.weights = weights;
        Ok(h)
    }

    pub fn normalized_weights(&self) -> Vec<f64> {
        let total: f64 = self.weights.iter().sum();
        self.weights.iter().map(|w| w / total).collect()
    }

    pub fn hybrid(&self) -> LatentVector {
        interpolate(&self.rows, &self.weights).expect("validated on construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(v: &[f64]) -> LatentVector {
        LatentVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn edit_examples() {
        let f = lv(&[1.0, 2.0]);
        assert_eq!(feature_edit(&f, &LatentVector::zeros(2)).unwrap(), f);
        assert_eq!(
            feature_edit(&f, &lv(&[0.5, -1.0])).unwrap(),
            lv(&[1.5, 1.0])
        );
        assert!(matches!(
            feature_edit(&f, &lv(&[1.0])),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn interpolation_examples() {
        let rows = [lv(&[0.0, 4.0]), lv(&[2.0, -2.0]), lv(&[1.0, 1.0])];
        assert!(interpolate(&rows, &[0.0, 1.0, 0.0])
            .unwrap()
            .bitwise_eq(&rows[1]));
        let mid = interpolate(&rows[..2], &[1.0, 1.0]).unwrap();
        assert_eq!(mid, lv(&[1.0, 1.0]));
        assert_eq!(
            interpolate(&rows, &[2.0, 2.0, 2.0]).unwrap(),
            interpolate(&rows, &[1.0, 1.0, 1.0]).unwrap()
        );
    }

    #[test]
    fn interpolation_errors() {
        let rows = [lv(&[0.0]), lv(&[1.0])];
        assert!(matches!(
            interpolate(&rows, &[0.0, 0.0]),
            Err(Error::DegenerateWeights(_))
        ));
        assert!(matches!(
            interpolate(&rows, &[-1.0, 2.0]),
            Err(Error::DegenerateWeights(_))
        ));
        assert!(matches!(
            interpolate(&rows, &[1.0]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            interpolate(&rows[..1], &[1.0]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn one_hot_keeps_negative_zero() {
        let rows = [lv(&[1.0, 3.0]), lv(&[-0.0, -5.0])];
        let h = interpolate(&rows, &[0.0, 7.0]).unwrap();
        assert!(h.bitwise_eq(&rows[1]));
    }

    #[test]
    fn stats_examples() {
        let single = latent_stats(&[lv(&[3.0, -1.0])]).unwrap();
        assert_eq!(single.min, single.max);
        let s = latent_stats(&[lv(&[0.0, 5.0]), lv(&[2.0, 1.0])]).unwrap();
        assert_eq!(
            (s.min.clone(), s.max.clone(), s.count),
            (vec![0.0, 1.0], vec![2.0, 5.0], 2)
        );
        assert!(latent_stats(&[]).is_err());
        assert!(latent_stats(&[lv(&[1.0]), lv(&[1.0, 2.0])]).is_err());
    }

    fn stats16() -> LatentStats {
        LatentStats {
            min: vec![-2.0; 16],
            max: vec![2.0; 16],
            count: 4,
        }
    }

    #[test]
    fn sliders() {
        let stats = stats16();
        let zero = [0.0; 8];
        assert_eq!(
            slider_to_t(&stats, &zero, &zero, 0).unwrap(),
            LatentVector::zeros(16)
        );

        let mut s = zero;
        s[0] = 1.0;
        let t = slider_to_t(&stats, &s, &zero, 0).unwrap();
        assert_eq!(t.values()[0], 2.0);
        assert!(t.values()[1..].iter().all(|&v| v == 0.0));

        let t8 = slider_to_t(&stats, &s, &zero, 8).unwrap();
        assert_eq!(t8.values()[8], 2.0);
        assert!(t8.values()[..8].iter().all(|&v| v == 0.0));

        assert!(matches!(
            slider_to_t(&stats, &s, &zero, 9),
            Err(Error::Dimension(_))
        ));
        let mut knobs = zero;
        knobs[3] = 0.2;
        assert!(matches!(
            slider_to_t(&stats, &zero, &knobs, 0),
            Err(Error::OutOfRange(_))
        ));
        s[0] = 1.5;
        assert!(matches!(
            slider_to_t(&stats, &s, &zero, 0),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn preview_is_plus_minus_half_interval() {
        let stats = stats16();
        let f = LatentVector::zeros(16);
        let (lo, hi) = preview_latents(&stats, &f, 3).unwrap();
        assert_eq!(lo.values()[3], -2.0);
        assert_eq!(hi.values()[3], 2.0);
        assert!(preview_latents(&stats, &f, 16).is_err());
    }

    #[test]
    fn states() {
        let mut edit = EditState::new(lv(&[1.0, 1.0]));
        assert_eq!(edit.edited(), edit.base());
        edit.set_transform(lv(&[0.5, 0.0])).unwrap();
        assert_eq!(edit.edited(), &lv(&[1.5, 1.0]));

        let mut interp =
            InterpolationState::new(vec![lv(&[0.0]), lv(&[4.0])], vec![1.0, 3.0]).unwrap();
        assert_eq!(interp.normalized_weights(), vec![0.25, 0.75]);
        assert_eq!(interp.hybrid(), lv(&[3.0]));
        assert!(interp.set_weights(vec![0.0, 0.0]).is_err());
        assert!(InterpolationState::new(vec![lv(&[0.0])], vec![1.0]).is_err());
    }
}
