use super::config::{AEConfig, TrainingMeta};
use crate::error::{Error, Result};
use crate::metrics::{ChamferMatch, PointCloud};
use crate::nn::{
    maxpool_backward, maxpool_points, relu_gate, relu_in_place, DenseLayer, FeatureMatrix,
    LayerGrads, PointwiseConvLayer, SeededInit,
};

/// A `k`-dimensional latent shape code.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentVector(Vec<f64>);

impl LatentVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::dim("latent vector must have at least one component"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::OutOfRange(format!(
                "latent component {i} is not finite"
            )));
        }
        Ok(Self(values))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn bitwise_eq(&self, other: &Self) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Forward intermediates of the encoder, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct EncoderTrace {
    /// Input to each conv block; entry 0 is the cloud itself.
    pub conv_inputs: Vec<FeatureMatrix>,
    /// Pre-activation output of each conv block.
    pub conv_outputs: Vec<FeatureMatrix>,
    pub argmax: Vec<usize>,
    pub latent: Vec<f64>,
}

/// Forward intermediates of the decoder.
#[derive(Debug, Clone)]
pub struct DecoderTrace {
    /// Input to each dense layer; entry 0 is the latent vector.
    pub inputs: Vec<Vec<f64>>,
    /// Pre-activation output of each dense layer. The last one is the
    /// flattened `M x 3` reconstruction.
    pub outputs: Vec<Vec<f64>>,
}

impl DecoderTrace {
    pub fn points(&self) -> &[f64] {
        self.outputs.last().expect("decoder has at least one layer")
    }
}

/// Parameter gradients for every layer of an [`AEModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGrads {
    pub encoder: Vec<LayerGrads>,
    pub decoder: Vec<LayerGrads>,
}

impl ModelGrads {
    pub fn zeros_like(model: &AEModel) -> Self {
        Self {
            encoder: model
                .encoder
                .iter()
                .map(|l| LayerGrads::zeros(l.fan_in(), l.fan_out()))
                .collect(),
            decoder: model
                .decoder
                .iter()
                .map(|l| LayerGrads::zeros(l.fan_in(), l.fan_out()))
                .collect(),
        }
    }

    pub fn fill_zero(&mut self) {
        self.encoder
            .iter_mut()
            .chain(&mut self.decoder)
            .for_each(LayerGrads::fill_zero);
    }

    pub fn scale(&mut self, factor: f64) {
        self.encoder
            .iter_mut()
            .chain(&mut self.decoder)
            .for_each(|g| g.scale(factor));
    }

    /// Tensors in the same order as [`AEModel::params`].
    pub fn tensors(&self) -> Vec<&[f64]> {
        self.encoder
            .iter()
            .chain(&self.decoder)
            .flat_map(|g| [&g.weights[..], &g.bias[..]])
            .collect()
    }
}

/// Encoder and decoder parameters plus the architecture that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct AEModel {
    config: AEConfig,
    pub(crate) encoder: Vec<PointwiseConvLayer>,
    pub(crate) decoder: Vec<DenseLayer>,
    pub meta: TrainingMeta,
}

impl AEModel {
    /// Fresh model with seeded scaled-uniform weights and zero biases.
    pub fn new(config: AEConfig) -> Result<Self> {
        config.validate()?;
        let mut init = SeededInit::new(config.seed);
        let encoder = config
            .encoder_chain()
            .windows(2)
            .map(|w| init.conv(w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        let decoder = config
            .decoder_chain()
            .windows(2)
            .map(|w| init.dense(w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config,
            encoder,
            decoder,
            meta: TrainingMeta::default(),
        })
    }

    pub(crate) fn from_parts(
        config: AEConfig,
        encoder: Vec<PointwiseConvLayer>,
        decoder: Vec<DenseLayer>,
        meta: TrainingMeta,
    ) -> Self {
        Self {
            config,
            encoder,
            decoder,
            meta,
        }
    }

    pub fn config(&self) -> &AEConfig {
        &self.config
    }

    pub fn latent_size(&self) -> usize {
        self.config.latent_size
    }

    pub fn encoder_layers(&self) -> &[PointwiseConvLayer] {
        &self.encoder
    }

    pub fn decoder_layers(&self) -> &[DenseLayer] {
        &self.decoder
    }

    /// Every parameter tensor: per encoder layer weights then bias, then the
    /// same for each decoder layer.
    pub fn params(&self) -> Vec<&[f64]> {
        let enc = self
            .encoder
            .iter()
            .flat_map(|l| [&l.weights[..], &l.bias[..]]);
        let dec = self
            .decoder
            .iter()
            .flat_map(|l| [&l.weights[..], &l.bias[..]]);
        enc.chain(dec).collect()
    }

    pub fn params_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        for l in &mut self.encoder {
            out.push(&mut l.weights);
            out.push(&mut l.bias);
        }
        for l in &mut self.decoder {
            out.push(&mut l.weights);
            out.push(&mut l.bias);
        }
        out
    }

    pub fn param_shapes(&self) -> Vec<usize> {
        self.params().iter().map(|p| p.len()).collect()
    }

    pub fn param_count(&self) -> usize {
        self.param_shapes().iter().sum()
    }

    fn check_cloud(&self, cloud: &PointCloud) -> Result<()> {
        if cloud.len() != self.config.input_points {
            return Err(Error::dim(format!(
                "model expects clouds of {} points, got {}",
                self.config.input_points,
                cloud.len()
            )));
        }
        Ok(())
    }

    pub fn encode_trace(&self, cloud: &PointCloud) -> Result<EncoderTrace> {
        self.check_cloud(cloud)?;
        let mut conv_inputs = vec![cloud.to_feature_matrix()];
        let mut conv_outputs = Vec::with_capacity(self.encoder.len());
        let last = self.encoder.len() - 1;
        for (i, layer) in self.encoder.iter().enumerate() {
            let out = layer.forward(conv_inputs.last().expect("non-empty"))?;
            if i < last {
                let mut act = out.clone();
                relu_in_place(act.data_mut());
                conv_inputs.push(act);
            }
            conv_outputs.push(out);
        }
        let (latent, argmax) = maxpool_points(conv_outputs.last().expect("non-empty"))?;
        Ok(EncoderTrace {
            conv_inputs,
            conv_outputs,
            argmax,
            latent,
        })
    }

    /// Permutation-invariant encoding of an `N`-point cloud.
    pub fn encode(&self, cloud: &PointCloud) -> Result<LatentVector> {
        Ok(LatentVector::from_raw(self.encode_trace(cloud)?.latent))
    }

    pub fn decode_trace(&self, latent: &[f64]) -> Result<DecoderTrace> {
        if latent.len() != self.config.latent_size {
            return Err(Error::dim(format!(
                "model expects latent vectors of length {}, got {}",
                self.config.latent_size,
                latent.len()
            )));
        }
        let mut inputs = vec![latent.to_vec()];
        let mut outputs = Vec::with_capacity(self.decoder.len());
        let last = self.decoder.len() - 1;
        for (i, layer) in self.decoder.iter().enumerate() {
            let out = layer.forward(inputs.last().expect("non-empty"))?;
            if i < last {
                let mut act = out.clone();
                relu_in_place(&mut act);
                inputs.push(act);
            }
            outputs.push(out);
        }
        Ok(DecoderTrace { inputs, outputs })
    }

    /// Decodes a latent vector into an `M`-point cloud.
    pub fn decode(&self, z: &LatentVector) -> Result<PointCloud> {
        let trace = self.decode_trace(z.values())?;
        PointCloud::from_flat(trace.points())
    }

    pub fn reconstruct(&self, cloud: &PointCloud) -> Result<PointCloud> {
        self.decode(&self.encode(cloud)?)
    }

    /// Back-propagates `grad_points` (dL/d reconstruction, flattened `M x 3`)
    /// through decoder and encoder, adding parameter gradients into `grads`.
    pub fn backward(
        &self,
        enc: &EncoderTrace,
        dec: &DecoderTrace,
        grad_points: &[f64],
        grads: &mut ModelGrads,
    ) -> Result<()> {
        if grad_points.len() != 3 * self.config.output_points {
            return Err(Error::dim("reconstruction gradient has the wrong length"));
        }
        let mut upstream = grad_points.to_vec();
        for i in (0..self.decoder.len()).rev() {
            if i < self.decoder.len() - 1 {
                relu_gate(&dec.outputs[i], &mut upstream);
            }
            upstream = self.decoder[i]
                .backward_accumulate(&dec.inputs[i], &upstream, &mut grads.decoder[i], true)?
                .expect("input gradient requested");
        }

        let rows = enc.conv_inputs[0].rows();
        let mut upstream = maxpool_backward(rows, &enc.argmax, &upstream)?;
        for i in (0..self.encoder.len()).rev() {
            if i < self.encoder.len() - 1 {
                relu_gate(enc.conv_outputs[i].data(), upstream.data_mut());
            }
            match self.encoder[i].backward_accumulate(
                &enc.conv_inputs[i],
                &upstream,
                &mut grads.encoder[i],
                i > 0,
            )? {
                Some(dx) => upstream = dx,
                None => break,
            }
        }
        Ok(())
    }

    /// Chamfer reconstruction loss of one cloud; its parameter gradient is
    /// added into `grads`.
    pub fn loss_and_grad(&self, cloud: &PointCloud, grads: &mut ModelGrads) -> Result<f64> {
        let enc = self.encode_trace(cloud)?;
        let dec = self.decode_trace(&enc.latent)?;
        let recon = match PointCloud::from_flat(dec.points()) {
            Ok(r) => r,
            Err(_) => return Ok(f64::NAN),
        };
        let matching = ChamferMatch::compute(&recon, cloud);
        let loss = matching.value();
        let grad: Vec<f64> = matching
            .grad_a(&recon, cloud)
            .into_iter()
            .flatten()
            .collect();
        self.backward(&enc, &dec, &grad, grads)?;
        Ok(loss)
    }

    /// Bitwise parameter and config equality.
    pub fn bitwise_eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self.meta.epochs_trained == other.meta.epochs_trained
            && self.meta.final_loss.map(f64::to_bits) == other.meta.final_loss.map(f64::to_bits)
            && self.params().len() == other.params().len()
            && self.params().iter().zip(other.params()).all(|(a, b)| {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
            })
    }
}
