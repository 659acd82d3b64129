//! Forward and backward kernels for the four layer types the autoencoder uses:
//! pointwise (kernel-size-1) convolution, dense, ReLU and max-pool over points.

use super::gemm::{gemm, Layout};
use super::matrix::FeatureMatrix;
use crate::error::{Error, Result};

/// Parameter gradients of an affine layer, shaped like its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrads {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl LayerGrads {
    pub fn zeros(fan_in: usize, fan_out: usize) -> Self {
        Self {
            weights: vec![0.0; fan_in * fan_out],
            bias: vec![0.0; fan_out],
        }
    }

    pub fn fill_zero(&mut self) {
        self.weights.iter_mut().for_each(|v| *v = 0.0);
        self.bias.iter_mut().for_each(|v| *v = 0.0);
    }

    pub fn scale(&mut self, factor: f64) {
        self.weights.iter_mut().for_each(|v| *v *= factor);
        self.bias.iter_mut().for_each(|v| *v *= factor);
    }
}

fn check_params(fan_in: usize, fan_out: usize, weights: &[f64], bias: &[f64]) -> Result<()> {
    if fan_in == 0 || fan_out == 0 {
        return Err(Error::config(format!(
            "layer widths must be positive, got {fan_in}->{fan_out}"
        )));
    }
    if weights.len() != fan_in * fan_out || bias.len() != fan_out {
        return Err(Error::dim(format!(
            "{fan_in}->{fan_out} layer needs {} weights and {fan_out} biases, got {} and {}",
            fan_in * fan_out,
            weights.len(),
            bias.len()
        )));
    }
    if weights.iter().chain(bias).any(|v| !v.is_finite()) {
        return Err(Error::OutOfRange("layer parameters must be finite".into()));
    }
    Ok(())
}

/// `out (rows x fan_out) = x W + b`, each row independently.
fn affine_forward(
    rows: usize,
    fan_in: usize,
    fan_out: usize,
    weights: &[f64],
    bias: &[f64],
    x: &[f64],
) -> Vec<f64> {
    let mut out = vec![0.0; rows * fan_out];
    gemm(
        rows,
        fan_in,
        fan_out,
        x,
        Layout::row_major(fan_in),
        weights,
        Layout::row_major(fan_out),
        0.0,
        &mut out,
    );
    for row in out.chunks_exact_mut(fan_out) {
        for (o, b) in row.iter_mut().zip(bias) {
            *o += b;
        }
    }
    out
}

/// Accumulates parameter gradients into `grads` and optionally returns the
/// input gradient `grad_out W^T`.
#[allow(clippy::too_many_arguments)]
fn affine_backward(
    rows: usize,
    fan_in: usize,
    fan_out: usize,
    weights: &[f64],
    x: &[f64],
    grad_out: &[f64],
    grads: &mut LayerGrads,
    want_input_grad: bool,
) -> Option<Vec<f64>> {
    // dW += x^T g
    gemm(
        fan_in,
        rows,
        fan_out,
        x,
        Layout::transposed(fan_in),
        grad_out,
        Layout::row_major(fan_out),
        1.0,
        &mut grads.weights,
    );
    for row in grad_out.chunks_exact(fan_out) {
        for (db, g) in grads.bias.iter_mut().zip(row) {
            *db += g;
        }
    }
    want_input_grad.then(|| {
        let mut dx = vec![0.0; rows * fan_in];
        gemm(
            rows,
            fan_out,
            fan_in,
            grad_out,
            Layout::row_major(fan_out),
            weights,
            Layout::transposed(fan_out),
            0.0,
            &mut dx,
        );
        dx
    })
}

/// Kernel-size-1 1D convolution: the same `fan_in -> fan_out` affine map
/// applied to every point row.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseConvLayer {
    fan_in: usize,
    fan_out: usize,
    /// `fan_in x fan_out`, row-major.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl PointwiseConvLayer {
    pub fn new(fan_in: usize, fan_out: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        check_params(fan_in, fan_out, &weights, &bias)?;
        Ok(Self {
            fan_in,
            fan_out,
            weights,
            bias,
        })
    }

    pub fn fan_in(&self) -> usize {
        self.fan_in
    }

    pub fn fan_out(&self) -> usize {
        self.fan_out
    }

    pub fn forward(&self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        if x.cols() != self.fan_in {
            return Err(Error::dim(format!(
                "conv expects {} input features, got {}",
                self.fan_in,
                x.cols()
            )));
        }
        let out = affine_forward(
            x.rows(),
            self.fan_in,
            self.fan_out,
            &self.weights,
            &self.bias,
            x.data(),
        );
        Ok(FeatureMatrix::from_raw(x.rows(), self.fan_out, out))
    }

    /// Returns fresh parameter gradients and the input gradient.
    pub fn backward(
        &self,
        input: &FeatureMatrix,
        grad_out: &FeatureMatrix,
    ) -> Result<(LayerGrads, FeatureMatrix)> {
        let mut grads = LayerGrads::zeros(self.fan_in, self.fan_out);
        let dx = self
            .backward_accumulate(input, grad_out, &mut grads, true)?
            .expect("input gradient requested");
        Ok((grads, dx))
    }

    /// Adds this sample's parameter gradients into `grads`. The input
    /// gradient is only computed when `want_input_grad` is set.
    pub fn backward_accumulate(
        &self,
        input: &FeatureMatrix,
        grad_out: &FeatureMatrix,
        grads: &mut LayerGrads,
        want_input_grad: bool,
    ) -> Result<Option<FeatureMatrix>> {
        if input.cols() != self.fan_in
            || grad_out.cols() != self.fan_out
            || grad_out.rows() != input.rows()
        {
            return Err(Error::dim(format!(
                "conv {}->{} backward got input {}x{} and upstream {}x{}",
                self.fan_in,
                self.fan_out,
                input.rows(),
                input.cols(),
                grad_out.rows(),
                grad_out.cols()
            )));
        }
        check_grad_shape(grads, self.fan_in, self.fan_out)?;
        let dx = affine_backward(
            input.rows(),
            self.fan_in,
            self.fan_out,
            &self.weights,
            input.data(),
            grad_out.data(),
            grads,
            want_input_grad,
        );
        Ok(dx.map(|d| FeatureMatrix::from_raw(input.rows(), self.fan_in, d)))
    }
}

/// Fully connected layer on a single vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    fan_in: usize,
    fan_out: usize,
    /// `fan_in x fan_out`, row-major.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    pub fn new(fan_in: usize, fan_out: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        check_params(fan_in, fan_out, &weights, &bias)?;
        Ok(Self {
            fan_in,
            fan_out,
            weights,
            bias,
        })
    }

    pub fn fan_in(&self) -> usize {
        self.fan_in
    }

    pub fn fan_out(&self) -> usize {
        self.fan_out
    }

    /// `x^T W + b`.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.fan_in {
            return Err(Error::dim(format!(
                "dense layer expects {} inputs, got {}",
                self.fan_in,
                x.len()
            )));
        }
        Ok(affine_forward(
            1,
            self.fan_in,
            self.fan_out,
            &self.weights,
            &self.bias,
            x,
        ))
    }

    pub fn backward(&self, input: &[f64], grad_out: &[f64]) -> Result<(LayerGrads, Vec<f64>)> {
        let mut grads = LayerGrads::zeros(self.fan_in, self.fan_out);
        let dx = self
            .backward_accumulate(input, grad_out, &mut grads, true)?
            .expect("input gradient requested");
        Ok((grads, dx))
    }

    pub fn backward_accumulate(
        &self,
        input: &[f64],
        grad_out: &[f64],
        grads: &mut LayerGrads,
        want_input_grad: bool,
    ) -> Result<Option<Vec<f64>>> {
        if input.len() != self.fan_in || grad_out.len() != self.fan_out {
            return Err(Error::dim(format!(
                "dense {}->{} backward got input {} and upstream {}",
                self.fan_in,
                self.fan_out,
                input.len(),
                grad_out.len()
            )));
        }
        check_grad_shape(grads, self.fan_in, self.fan_out)?;
        Ok(affine_backward(
            1,
            self.fan_in,
            self.fan_out,
            &self.weights,
            input,
            grad_out,
            grads,
            want_input_grad,
        ))
    }
}

fn check_grad_shape(grads: &LayerGrads, fan_in: usize, fan_out: usize) -> Result<()> {
    if grads.weights.len() != fan_in * fan_out || grads.bias.len() != fan_out {
        return Err(Error::dim("gradient buffer does not match layer shape"));
    }
    Ok(())
}

#[inline]
fn relu(v: f64) -> f64 {
    // Always +0.0 for non-positive input, including -0.0.
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

pub fn relu_forward(x: &FeatureMatrix) -> FeatureMatrix {
    let mut out = x.clone();
    relu_in_place(out.data_mut());
    out
}

pub fn relu_in_place(values: &mut [f64]) {
    values.iter_mut().for_each(|v| *v = relu(*v));
}

/// Gates `grad_out` by the sign of the forward input; the subgradient at 0 is 0.
pub fn relu_backward(input: &FeatureMatrix, grad_out: &FeatureMatrix) -> Result<FeatureMatrix> {
    if input.rows() != grad_out.rows() || input.cols() != grad_out.cols() {
        return Err(Error::dim(
            "relu backward: upstream shape differs from input",
        ));
    }
    let mut out = grad_out.clone();
    relu_gate(input.data(), out.data_mut());
    Ok(out)
}

pub fn relu_gate(forward_input: &[f64], grad: &mut [f64]) {
    for (g, &x) in grad.iter_mut().zip(forward_input) {
        if x <= 0.0 {
            *g = 0.0;
        }
    }
}

/// Column-wise max over point rows. Returns the pooled values and, per
/// column, the smallest row index attaining the max.
pub fn maxpool_points(x: &FeatureMatrix) -> Result<(Vec<f64>, Vec<usize>)> {
    if x.rows() == 0 {
        return Err(Error::dim("max-pool over zero points"));
    }
    let mut values = x.row(0).to_vec();
    let mut argmax = vec![0usize; x.cols()];
    for i in 1..x.rows() {
        for ((best, arg), &v) in values.iter_mut().zip(argmax.iter_mut()).zip(x.row(i)) {
            if v > *best {
                *best = v;
                *arg = i;
            }
        }
    }
    // -0.0 and +0.0 compare equal; normalise so the pooled value does not
    // depend on which of the two came first.
    values.iter_mut().for_each(|v| *v += 0.0);
    Ok((values, argmax))
}

/// Routes each pooled gradient entry back to its argmax row.
pub fn maxpool_backward(rows: usize, argmax: &[usize], grad_out: &[f64]) -> Result<FeatureMatrix> {
    if argmax.len() != grad_out.len() {
        return Err(Error::dim(
            "max-pool backward: argmax and upstream lengths differ",
        ));
    }
    if rows == 0 || argmax.iter().any(|&r| r >= rows) {
        return Err(Error::dim("max-pool backward: argmax row out of range"));
    }
    let cols = argmax.len();
    let mut out = FeatureMatrix::zeros(rows, cols);
    let data = out.data_mut();
    for (j, (&r, &g)) in argmax.iter().zip(grad_out).enumerate() {
        data[r * cols + j] = g;
    }
    Ok(out)
}
