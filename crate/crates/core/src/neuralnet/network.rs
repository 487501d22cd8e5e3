use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::batch::{interleave, ChannelBatch};
use crate::beamforming::{probing_from_phases, PhaseQuantizer, ProbingCodebook};
use crate::error::check_dim;
use crate::infotheory::{rbf_kernel, silverman_bandwidth};
use crate::{Error, Result};

pub const HIDDEN_LAYERS: usize = 3;
pub const BN_EPSILON: f64 = 1e-5;
pub const DEFAULT_BN_MOMENTUM: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Dense layer followed by ReLU, batch normalization and dropout.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenLayer {
    /// `out × in`.
    pub weights: DMatrix<f64>,
    pub bias: DVector<f64>,
    pub gamma: DVector<f64>,
    pub beta: DVector<f64>,
}

/// Every trainable tensor of the network. Gradients use the same layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameters {
    /// Probing phases `Φ`, `N × M`.
    pub encoder_phases: DMatrix<f64>,
    pub hidden: [HiddenLayer; HIDDEN_LAYERS],
    pub output_weights: DMatrix<f64>,
    pub output_bias: DVector<f64>,
}

impl Parameters {
    pub fn zeros_like(&self) -> Self {
        let mut zeros = self.clone();
        for t in zeros.tensors_mut() {
            t.fill(0.0);
        }
        zeros
    }

    /// Tensors in a fixed order: phases, then per hidden layer
    /// `(weights, bias, gamma, beta)`, then output weights and bias.
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out = vec![self.encoder_phases.as_slice()];
        for layer in &self.hidden {
            out.extend([
                layer.weights.as_slice(),
                layer.bias.as_slice(),
                layer.gamma.as_slice(),
                layer.beta.as_slice(),
            ]);
        }
        out.extend([self.output_weights.as_slice(), self.output_bias.as_slice()]);
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = vec![self.encoder_phases.as_mut_slice()];
        for layer in &mut self.hidden {
            out.push(layer.weights.as_mut_slice());
            out.push(layer.bias.as_mut_slice());
            out.push(layer.gamma.as_mut_slice());
            out.push(layer.beta.as_mut_slice());
        }
        out.push(self.output_weights.as_mut_slice());
        out.push(self.output_bias.as_mut_slice());
        out
    }

    pub fn len(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }

    pub fn max_abs(&self) -> f64 {
        self.tensors()
            .iter()
            .flat_map(|t| t.iter())
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunningStats {
    pub mean: DVector<f64>,
    pub var: DVector<f64>,
}

/// Inverted-dropout masks, entries `0` or `1 / (1 - rate)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DropoutMasks {
    pub layers: Vec<DMatrix<f64>>,
}

impl DropoutMasks {
    pub fn sample<R: Rng + ?Sized>(rate: f64, batch: usize, width: usize, rng: &mut R) -> Self {
        let keep = 1.0 - rate;
        let layers = (0..HIDDEN_LAYERS)
            .map(|_| {
                DMatrix::from_fn(
                    batch,
                    width,
                    |_, _| if rng.random::<f64>() < keep { 1.0 / keep } else { 0.0 },
                )
            })
            .collect();
        Self { layers }
    }
}

/// Loss split into its two objectives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossValue {
    pub total: f64,
    /// Batch mean of `|hᴴ f|²`.
    pub power_term: f64,
    /// Entropy weight times the second-order bottleneck entropy.
    pub entropy_term: f64,
}

impl LossValue {
    pub fn combine(power_term: f64, entropy: f64, entropy_weight: f64) -> Self {
        let entropy_term = entropy_weight * entropy;
        Self {
            total: -(power_term + entropy_term),
            power_term,
            entropy_term,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossOptions {
    pub entropy_weight: f64,
    /// Kernel bandwidth for the entropy term; Silverman on the batch when `None`.
    pub bandwidth: Option<f64>,
    pub dropout: Option<DropoutMasks>,
    /// Skip `Q_b` entirely (used by gradient checks).
    pub bypass_quantizer: bool,
}

impl Default for LossOptions {
    fn default() -> Self {
        Self {
            entropy_weight: 1.0,
            bandwidth: None,
            dropout: None,
            bypass_quantizer: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderOutput {
    pub received_re: DMatrix<f64>,
    pub received_im: DMatrix<f64>,
    /// `|r|²`, the bottleneck.
    pub rssi: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderOutput {
    /// Continuous phases `θ`.
    pub phases: DMatrix<f64>,
    /// Quantized phases `θ_b`.
    pub quantized: DMatrix<f64>,
    /// Hidden outputs `d₁, d₂, d₃`.
    pub hidden: [DMatrix<f64>; HIDDEN_LAYERS],
}

/// Batch activations along the network, one sample per row.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationTrace {
    /// Channels with `(re, im)` interleaved, `B × 2N`.
    pub input: DMatrix<f64>,
    /// Complex received signals, interleaved, `B × 2M`.
    pub received: DMatrix<f64>,
    pub rssi: DMatrix<f64>,
    pub hidden: [DMatrix<f64>; HIDDEN_LAYERS],
    pub phases: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
struct HiddenCache {
    input: DMatrix<f64>,
    pre_activation: DMatrix<f64>,
    normalized: DMatrix<f64>,
    inv_std: DVector<f64>,
    mask: Option<DMatrix<f64>>,
    batch_mean: DVector<f64>,
    batch_var: DVector<f64>,
}

/// Everything the backward pass needs from one forward evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardPass {
    mode: Mode,
    batch: ChannelBatch,
    encoder: EncoderOutput,
    hidden: Vec<HiddenCache>,
    decoder: DecoderOutput,
    beam_re: DMatrix<f64>,
    beam_im: DMatrix<f64>,
    gain_re: DVector<f64>,
    gain_im: DVector<f64>,
    kernel: DMatrix<f64>,
    bandwidth: f64,
    entropy_weight: f64,
    loss: LossValue,
}

impl ForwardPass {
    pub fn loss(&self) -> LossValue {
        self.loss
    }

    /// Kernel bandwidth used by the entropy term.
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn encoder(&self) -> &EncoderOutput {
        &self.encoder
    }

    pub fn decoder(&self) -> &DecoderOutput {
        &self.decoder
    }

    /// Per-sample beamforming gains `|hᴴ f|²` with the (quantized) beams.
    pub fn gains(&self) -> DVector<f64> {
        self.gain_re.zip_map(&self.gain_im, |a, b| a * a + b * b)
    }

    pub fn trace(&self) -> ActivationTrace {
        ActivationTrace {
            input: self.batch.embedded(),
            received: interleave(&self.encoder.received_re, &self.encoder.received_im),
            rssi: self.encoder.rssi.clone(),
            hidden: self.decoder.hidden.clone(),
            phases: self.decoder.quantized.clone(),
        }
    }
}

/// Probing encoder (`Φ`) plus MLP phase decoder with a `b`-bit quantizer.
#[derive(Debug, Clone, PartialEq)]
pub struct AutoHpNetwork {
    params: Parameters,
    running: Vec<RunningStats>,
    stats_ready: bool,
    quantizer: PhaseQuantizer,
    bn_momentum: f64,
    mode: Mode,
    recorded: Option<ForwardPass>,
}

impl AutoHpNetwork {
    /// Fresh network: phases uniform in `(-π, π]`, dense weights uniform in
    /// `±1/√fan_in`, biases zero, batch-norm scale one and shift zero.
    pub fn new<R: Rng + ?Sized>(
        n_antennas: usize,
        n_beams: usize,
        quantizer: PhaseQuantizer,
        rng: &mut R,
    ) -> Result<Self> {
        if n_antennas == 0 || n_beams == 0 {
            return Err(Error::invalid(
                "network needs at least one antenna and one probing beam",
            ));
        }
        let encoder_phases = DMatrix::from_fn(n_antennas, n_beams, |_, _| PI - 2.0 * PI * rng.random::<f64>());
        let mut dense = |fan_out: usize, fan_in: usize| {
            let limit = 1.0 / (fan_in as f64).sqrt();
            DMatrix::from_fn(fan_out, fan_in, |_, _| rng.random_range(-limit..limit))
        };
        let hidden = [n_beams, n_antennas, n_antennas].map(|fan_in| HiddenLayer {
            weights: dense(n_antennas, fan_in),
            bias: DVector::zeros(n_antennas),
            gamma: DVector::from_element(n_antennas, 1.0),
            beta: DVector::zeros(n_antennas),
        });
        let output_weights = dense(n_antennas, n_antennas);
        let params = Parameters {
            encoder_phases,
            hidden,
            output_weights,
            output_bias: DVector::zeros(n_antennas),
        };
        Ok(Self::from_parts(params, quantizer))
    }

    pub(crate) fn from_parts(params: Parameters, quantizer: PhaseQuantizer) -> Self {
        let width = params.output_bias.len();
        Self {
            params,
            running: vec![
                RunningStats {
                    mean: DVector::zeros(width),
                    var: DVector::from_element(width, 1.0),
                };
                HIDDEN_LAYERS
            ],
            stats_ready: false,
            quantizer,
            bn_momentum: DEFAULT_BN_MOMENTUM,
            mode: Mode::Train,
            recorded: None,
        }
    }

    pub fn n_antennas(&self) -> usize {
        self.params.encoder_phases.nrows()
    }

    pub fn n_beams(&self) -> usize {
        self.params.encoder_phases.ncols()
    }

    pub fn quantizer(&self) -> PhaseQuantizer {
        self.quantizer
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn set_mode(&mut self, mode: Mode) {
        self.mode = mode;
    }

    pub fn bn_momentum(&self) -> f64 {
        self.bn_momentum
    }

    pub fn set_bn_momentum(&mut self, momentum: f64) -> Result<()> {
        if !(0.0..1.0).contains(&momentum) {
            return Err(Error::invalid(format!(
                "batch-norm momentum must be in [0, 1), got {momentum}"
            )));
        }
        self.bn_momentum = momentum;
        Ok(())
    }

    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut Parameters {
        &mut self.params
    }

    pub fn running_stats(&self) -> Option<&[RunningStats]> {
        self.stats_ready.then_some(self.running.as_slice())
    }

    pub(crate) fn restore_running_stats(&mut self, stats: Vec<RunningStats>) {
        self.running = stats;
        self.stats_ready = true;
    }

    pub fn recorded_pass(&self) -> Option<&ForwardPass> {
        self.recorded.as_ref()
    }

    /// Probing codebook built from the current `Φ`.
    pub fn extract_probing(&self) -> ProbingCodebook {
        probing_from_phases(&self.params.encoder_phases).expect("encoder phases stay finite")
    }

    /// `r = Pᴴ h` through the real/imaginary block product, and `y = |r|²`.
    pub fn encoder_forward(&self, batch: &ChannelBatch) -> Result<EncoderOutput> {
        check_dim("encoder input antenna count", self.n_antennas(), batch.n_antennas())?;
        let scale = 1.0 / (self.n_antennas() as f64).sqrt();
        let p_re = self.params.encoder_phases.map(|p| scale * p.cos());
        let p_im = self.params.encoder_phases.map(|p| scale * p.sin());
        let received_re = &batch.re * &p_re + &batch.im * &p_im;
        let received_im = &batch.im * &p_re - &batch.re * &p_im;
        let rssi = received_re.zip_map(&received_im, |a, b| a * a + b * b);
        Ok(EncoderOutput {
            received_re,
            received_im,
            rssi,
        })
    }

    /// Decoder in the current mode, without dropout.
    pub fn decoder_forward(&self, rssi: &DMatrix<f64>) -> Result<DecoderOutput> {
        self.run_decoder(rssi, self.mode, None, false).map(|(out, _)| out)
    }

    /// Quantized phases `θ_b` for a batch of measurements, using running
    /// batch-norm statistics.
    pub fn predict_phases(&self, rssi: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.run_decoder(rssi, Mode::Eval, None, false)
            .map(|(out, _)| out.quantized)
    }

    /// Forward pass through both halves in the current mode.
    pub fn trace(&self, batch: &ChannelBatch) -> Result<ActivationTrace> {
        let encoder = self.encoder_forward(batch)?;
        let (decoder, _) = self.run_decoder(&encoder.rssi, self.mode, None, false)?;
        Ok(ActivationTrace {
            input: batch.embedded(),
            received: interleave(&encoder.received_re, &encoder.received_im),
            rssi: encoder.rssi,
            hidden: decoder.hidden,
            phases: decoder.quantized,
        })
    }

    fn run_decoder(
        &self,
        rssi: &DMatrix<f64>,
        mode: Mode,
        dropout: Option<&DropoutMasks>,
        bypass_quantizer: bool,
    ) -> Result<(DecoderOutput, Vec<HiddenCache>)> {
        check_dim("decoder input width", self.n_beams(), rssi.ncols())?;
        if mode == Mode::Eval && !self.stats_ready {
            return Err(Error::UninitializedStatistics);
        }
        let batch = rssi.nrows();
        let mut caches = Vec::with_capacity(HIDDEN_LAYERS);
        let mut x = rssi.clone();
        for (idx, layer) in self.params.hidden.iter().enumerate() {
            let pre = affine(&x, &layer.weights, &layer.bias);
            let act = pre.map(|z| z.max(0.0));
            let (mean, var) = match mode {
                Mode::Train => column_moments(&act),
                Mode::Eval => (self.running[idx].mean.clone(), self.running[idx].var.clone()),
            };
            let inv_std = var.map(|v| 1.0 / (v + BN_EPSILON).sqrt());
            let normalized = DMatrix::from_fn(batch, act.ncols(), |i, j| (act[(i, j)] - mean[j]) * inv_std[j]);
            let mut out = DMatrix::from_fn(batch, act.ncols(), |i, j| {
                layer.gamma[j] * normalized[(i, j)] + layer.beta[j]
            });
            let mask = match (mode, dropout) {
                (Mode::Train, Some(masks)) => {
                    let mask = masks
                        .layers
                        .get(idx)
                        .ok_or_else(|| Error::invalid("missing dropout mask"))?;
                    check_dim("dropout mask rows", batch, mask.nrows())?;
                    check_dim("dropout mask columns", out.ncols(), mask.ncols())?;
                    out.component_mul_assign(mask);
                    Some(mask.clone())
                }
                _ => None,
            };
            caches.push(HiddenCache {
                input: x,
                pre_activation: pre,
                normalized,
                inv_std,
                mask,
                batch_mean: mean,
                batch_var: var,
            });
            x = out;
        }
        let phases = affine(&x, &self.params.output_weights, &self.params.output_bias);
        let quantized = if bypass_quantizer {
            phases.clone()
        } else {
            phases.map(|t| self.quantizer.quantize(t))
        };
        let hidden = [caches[1].input.clone(), caches[2].input.clone(), x];
        Ok((
            DecoderOutput {
                phases,
                quantized,
                hidden,
            },
            caches,
        ))
    }

    /// Full forward evaluation of the loss without touching network state.
    pub fn forward_pass(&self, batch: &ChannelBatch, options: &LossOptions) -> Result<ForwardPass> {
        if batch.len() < 2 {
            return Err(Error::invalid(format!(
                "loss needs a batch of at least 2 channels, got {}",
                batch.len()
            )));
        }
        let n = self.n_antennas();
        let encoder = self.encoder_forward(batch)?;
        let (decoder, hidden) = self.run_decoder(
            &encoder.rssi,
            self.mode,
            options.dropout.as_ref(),
            options.bypass_quantizer,
        )?;

        let scale = 1.0 / (n as f64).sqrt();
        let beam_re = decoder.quantized.map(|t| scale * t.cos());
        let beam_im = decoder.quantized.map(|t| scale * t.sin());
        // g = hᴴ f per sample.
        let gain_re = (batch.re.component_mul(&beam_re) + batch.im.component_mul(&beam_im)).column_sum();
        let gain_im = (batch.re.component_mul(&beam_im) - batch.im.component_mul(&beam_re)).column_sum();
        let rows = batch.len() as f64;
        let power_term = gain_re.zip_map(&gain_im, |a, b| a * a + b * b).sum() / rows;

        let bandwidth = match options.bandwidth {
            Some(bw) if bw > 0.0 => bw,
            Some(bw) => return Err(Error::invalid(format!("bandwidth must be positive, got {bw}"))),
            None => silverman_bandwidth(&encoder.rssi)?,
        };
        let kernel = rbf_kernel(&encoder.rssi, bandwidth);
        let entropy = second_order_entropy(&kernel);
        let loss = LossValue::combine(power_term, entropy, options.entropy_weight);

        Ok(ForwardPass {
            mode: self.mode,
            batch: batch.clone(),
            encoder,
            hidden,
            decoder,
            beam_re,
            beam_im,
            gain_re,
            gain_im,
            kernel,
            bandwidth,
            entropy_weight: options.entropy_weight,
            loss,
        })
    }

    /// Evaluates the loss, records the pass for [`backward`](Self::backward)
    /// and, in train mode, folds the batch statistics into the running
    /// batch-norm estimates.
    pub fn loss(&mut self, batch: &ChannelBatch, options: &LossOptions) -> Result<LossValue> {
        let pass = self.forward_pass(batch, options)?;
        if pass.mode == Mode::Train {
            self.update_running_stats(&pass);
        }
        let loss = pass.loss;
        self.recorded = Some(pass);
        Ok(loss)
    }

    fn update_running_stats(&mut self, pass: &ForwardPass) {
        let rows = pass.batch.len() as f64;
        let correction = if rows > 1.0 { rows / (rows - 1.0) } else { 1.0 };
        let momentum = self.bn_momentum;
        for (stats, cache) in self.running.iter_mut().zip(&pass.hidden) {
            let unbiased = &cache.batch_var * correction;
            if self.stats_ready {
                stats.mean = &stats.mean * momentum + &cache.batch_mean * (1.0 - momentum);
                stats.var = &stats.var * momentum + unbiased * (1.0 - momentum);
            } else {
                stats.mean = cache.batch_mean.clone();
                stats.var = unbiased;
            }
        }
        self.stats_ready = true;
    }

    /// Gradients of the recorded loss with respect to every parameter.
    pub fn backward(&self) -> Result<Parameters> {
        let pass = self.recorded.as_ref().ok_or(Error::NoForwardPass)?;
        Ok(self.gradients(pass))
    }

    /// Reverse-mode sweep over a forward pass.
    ///
    /// The quantizer is treated as identity (straight-through) and the kernel
    /// bandwidth as a constant.
    pub fn gradients(&self, pass: &ForwardPass) -> Parameters {
        let mut grads = self.params.zeros_like();
        let batch = &pass.batch;
        let rows = batch.len() as f64;

        // d(-mean power)/dθ_b, evaluated at the quantized phases.
        let d_theta = DMatrix::from_fn(batch.len(), self.n_antennas(), |i, n| {
            let (h_re, h_im) = (batch.re[(i, n)], batch.im[(i, n)]);
            let (f_re, f_im) = (pass.beam_re[(i, n)], pass.beam_im[(i, n)]);
            let dg_re = -h_re * f_im + h_im * f_re;
            let dg_im = h_re * f_re + h_im * f_im;
            -2.0 * (pass.gain_re[i] * dg_re + pass.gain_im[i] * dg_im) / rows
        });

        grads.output_weights = d_theta.transpose() * &pass.decoder.hidden[2];
        grads.output_bias = d_theta.row_sum().transpose();
        let mut upstream = &d_theta * &self.params.output_weights;

        for idx in (0..HIDDEN_LAYERS).rev() {
            let layer = &self.params.hidden[idx];
            let cache = &pass.hidden[idx];
            let d_out = match &cache.mask {
                Some(mask) => upstream.component_mul(mask),
                None => upstream,
            };
            let g = &mut grads.hidden[idx];
            g.gamma = d_out.component_mul(&cache.normalized).row_sum().transpose();
            g.beta = d_out.row_sum().transpose();
            let d_norm = DMatrix::from_fn(d_out.nrows(), d_out.ncols(), |i, j| d_out[(i, j)] * layer.gamma[j]);
            let d_act = match pass.mode {
                Mode::Train => batchnorm_backward(&d_norm, &cache.normalized, &cache.inv_std),
                Mode::Eval => {
                    DMatrix::from_fn(d_norm.nrows(), d_norm.ncols(), |i, j| d_norm[(i, j)] * cache.inv_std[j])
                }
            };
            let d_pre = d_act.zip_map(&cache.pre_activation, |d, z| if z > 0.0 { d } else { 0.0 });
            g.weights = d_pre.transpose() * &cache.input;
            g.bias = d_pre.row_sum().transpose();
            upstream = &d_pre * &layer.weights;
        }

        // upstream is now dL/dy from the decoder; add the entropy term.
        let mut d_rssi = upstream;
        if pass.entropy_weight != 0.0 {
            d_rssi -= entropy_gradient(&pass.encoder.rssi, &pass.kernel, pass.bandwidth) * pass.entropy_weight;
        }

        let d_re = 2.0 * pass.encoder.received_re.component_mul(&d_rssi);
        let d_im = 2.0 * pass.encoder.received_im.component_mul(&d_rssi);
        let d_p_re = batch.re.transpose() * &d_re + batch.im.transpose() * &d_im;
        let d_p_im = batch.im.transpose() * &d_re - batch.re.transpose() * &d_im;
        let scale = 1.0 / (self.n_antennas() as f64).sqrt();
        grads.encoder_phases = DMatrix::from_fn(self.n_antennas(), self.n_beams(), |n, m| {
            let phi = self.params.encoder_phases[(n, m)];
            scale * (-phi.sin() * d_p_re[(n, m)] + phi.cos() * d_p_im[(n, m)])
        });
        grads
    }
}

fn affine(x: &DMatrix<f64>, weights: &DMatrix<f64>, bias: &DVector<f64>) -> DMatrix<f64> {
    let mut out = x * weights.transpose();
    for mut row in out.row_iter_mut() {
        row += bias.transpose();
    }
    out
}

/// Column means and biased variances.
fn column_moments(x: &DMatrix<f64>) -> (DVector<f64>, DVector<f64>) {
    let rows = x.nrows() as f64;
    let mean = x.row_sum().transpose() / rows;
    let var = DVector::from_fn(x.ncols(), |j, _| {
        x.column(j).iter().map(|v| (v - mean[j]).powi(2)).sum::<f64>() / rows
    });
    (mean, var)
}

fn batchnorm_backward(d_norm: &DMatrix<f64>, normalized: &DMatrix<f64>, inv_std: &DVector<f64>) -> DMatrix<f64> {
    let rows = d_norm.nrows() as f64;
    let sum_d = d_norm.row_sum();
    let sum_dx = d_norm.component_mul(normalized).row_sum();
    DMatrix::from_fn(d_norm.nrows(), d_norm.ncols(), |i, j| {
        inv_std[j] / rows * (rows * d_norm[(i, j)] - sum_d[j] - normalized[(i, j)] * sum_dx[j])
    })
}

/// `S₂ = -log tr(A²)` with `A = K / n` (the RBF diagonal is one).
pub(crate) fn second_order_entropy(kernel: &DMatrix<f64>) -> f64 {
    let n = kernel.nrows() as f64;
    -(kernel.norm_squared() / (n * n)).ln()
}

/// `dS₂/dy` for a fixed bandwidth.
fn entropy_gradient(samples: &DMatrix<f64>, kernel: &DMatrix<f64>, bandwidth: f64) -> DMatrix<f64> {
    let n = samples.nrows();
    let sum_sq = kernel.norm_squared();
    let coeff = 4.0 / (sum_sq * bandwidth * bandwidth);
    let mut grad = DMatrix::zeros(n, samples.ncols());
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let w = coeff * kernel[(i, j)] * kernel[(i, j)];
            for d in 0..samples.ncols() {
                grad[(i, d)] += w * (samples[(i, d)] - samples[(j, d)]);
            }
        }
    }
    grad
}
