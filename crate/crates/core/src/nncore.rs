//! Minimal dense layers, softmax cross-entropy, and an Adam optimizer.
//!
//! The models here are tiny (tens of parameters), so everything is plain
//! `Vec<f64>` with explicit shapes; weights are row-major `out_dim x in_dim`.
//! Forward/backward are pure; an [`AdamState`] is owned by exactly one
//! training loop.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Linear,
}

/// One fully connected layer: `activation(W x + b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    /// Row-major `out_dim x in_dim`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    pub fn zeros(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        DenseLayer {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            bias: vec![0.0; out_dim],
            activation,
        }
    }

    /// Seeded init: weights uniform(−0.5, 0.5) scaled by 1/√in_dim, zero bias.
    pub fn init(in_dim: usize, out_dim: usize, activation: Activation, rng: &mut ChaCha8Rng) -> Self {
        let scale = 1.0 / (in_dim.max(1) as f64).sqrt();
        let weights = (0..in_dim * out_dim)
            .map(|_| rng.gen_range(-0.5..0.5) * scale)
            .collect();
        DenseLayer {
            in_dim,
            out_dim,
            weights,
            bias: vec![0.0; out_dim],
            activation,
        }
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.in_dim {
            return Err(Error::structure(format!(
                "dense layer expects {} inputs, got {}",
                self.in_dim,
                x.len()
            )));
        }
        Ok(())
    }

    /// `activation(W x + b)`.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut out = Vec::with_capacity(self.out_dim);
        for row in 0..self.out_dim {
            let mut acc = self.bias[row];
            let w = &self.weights[row * self.in_dim..(row + 1) * self.in_dim];
            for (wi, xi) in w.iter().zip(x) {
                acc += wi * xi;
            }
            out.push(match self.activation {
                Activation::Tanh => acc.tanh(),
                Activation::Linear => acc,
            });
        }
        Ok(out)
    }

    /// Gradients of a scalar loss given `d_out = dloss/d(output)`:
    /// returns `(dW, db, dx)`. `out` must be this layer's forward output for `x`.
    pub fn backward(&self, x: &[f64], out: &[f64], d_out: &[f64]) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        self.check_input(x)?;
        if out.len() != self.out_dim || d_out.len() != self.out_dim {
            return Err(Error::structure(format!(
                "dense backward expects {} outputs, got out={} d_out={}",
                self.out_dim,
                out.len(),
                d_out.len()
            )));
        }
        let mut d_weights = vec![0.0; self.weights.len()];
        let mut d_bias = vec![0.0; self.out_dim];
        let mut d_input = vec![0.0; self.in_dim];
        for row in 0..self.out_dim {
            // tanh'(u) expressed through the activation value: 1 − tanh²(u).
            let d_pre = match self.activation {
                Activation::Tanh => d_out[row] * (1.0 - out[row] * out[row]),
                Activation::Linear => d_out[row],
            };
            d_bias[row] = d_pre;
            let w = &self.weights[row * self.in_dim..(row + 1) * self.in_dim];
            let dw = &mut d_weights[row * self.in_dim..(row + 1) * self.in_dim];
            for col in 0..self.in_dim {
                dw[col] = d_pre * x[col];
                d_input[col] += d_pre * w[col];
            }
        }
        Ok((d_weights, d_bias, d_input))
    }
}

/// Softmax + cross-entropy over two logits, log-sum-exp stabilized.
/// Returns `(loss, probs)` with `loss = −log probs[label]`.
pub fn softmax_xent(logits: [f64; 2], label: u8) -> Result<(f64, [f64; 2])> {
    if label > 1 {
        return Err(Error::structure(format!("label {label} is not binary")));
    }
    if !logits[0].is_finite() || !logits[1].is_finite() {
        return Err(Error::numeric(format!(
            "non-finite logits [{}, {}]",
            logits[0], logits[1]
        )));
    }
    let m = logits[0].max(logits[1]);
    let e0 = (logits[0] - m).exp();
    let e1 = (logits[1] - m).exp();
    let z = e0 + e1;
    let probs = [e0 / z, e1 / z];
    let loss = -(logits[usize::from(label)] - m - z.ln());
    Ok((loss, probs))
}

/// dloss/dlogits for [`softmax_xent`]: `probs − onehot(label)`.
pub fn softmax_xent_grad(probs: [f64; 2], label: u8) -> [f64; 2] {
    let mut grad = probs;
    grad[usize::from(label)] -= 1.0;
    grad
}

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Adam optimizer state for one flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    config: AdamConfig,
    first_moment: Vec<f64>,
    second_moment: Vec<f64>,
    step_count: u64,
}

impl AdamState {
    pub fn new(dim: usize, config: AdamConfig) -> Self {
        AdamState {
            config,
            first_moment: vec![0.0; dim],
            second_moment: vec![0.0; dim],
            step_count: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// One Adam update in place. NaN gradients abort the run.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.first_moment.len() || grads.len() != params.len() {
            return Err(Error::structure(format!(
                "optimizer step shape mismatch: state={} params={} grads={}",
                self.first_moment.len(),
                params.len(),
                grads.len()
            )));
        }
        if let Some(pos) = grads.iter().position(|g| !g.is_finite()) {
            return Err(Error::numeric(format!(
                "non-finite gradient {} at parameter {pos}",
                grads[pos]
            )));
        }
        self.step_count += 1;
        let c = self.config;
        let bias1 = 1.0 - c.beta1.powi(self.step_count as i32);
        let bias2 = 1.0 - c.beta2.powi(self.step_count as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.first_moment[i] = c.beta1 * self.first_moment[i] + (1.0 - c.beta1) * g;
            self.second_moment[i] = c.beta2 * self.second_moment[i] + (1.0 - c.beta2) * g * g;
            let m_hat = self.first_moment[i] / bias1;
            let v_hat = self.second_moment[i] / bias2;
            params[i] -= c.learning_rate * m_hat / (v_hat.sqrt() + c.epsilon);
        }
        Ok(())
    }
}
