//! Fully connected Q-network with hand-written backpropagation.
//!
//! Hidden layers use ReLU, the output head is linear with one unit per power
//! level. Weights are stored row-major, `weights[o * inputs + i]`.
//!
//! Checkpoint layout (all little-endian):
//!
//! ```text
//! u32            number of layer sizes n (input, hidden..., output)
//! u32 x n        layer sizes
//! f64 x ...      for each layer: weights (outputs x inputs, row-major), then biases
//! ```

use std::io::{Read, Write};

use rand::Rng;

use crate::error::{Error, Result};

/// Which copy of the parameters a network holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Predicted,
    Target,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self { inputs, outputs, weights: vec![0.0; inputs * outputs], bias: vec![0.0; outputs] }
    }

    /// Weights then biases, the order used by [`QNetwork::params`].
    pub fn flat(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights.iter().chain(&self.bias).copied()
    }

    fn affine(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.bias.iter().enumerate().map(|(o, b)| {
            let row = &self.weights[o * self.inputs..(o + 1) * self.inputs];
            b + row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>()
        }));
    }
}

/// One regression sample: input features, the action whose Q-value is
/// fitted, and the (constant) target.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub input: &'a [f64],
    pub action: usize,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QNetwork {
    layers: Vec<Dense>,
    role: Role,
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 2 || sizes.contains(&0) {
        return Err(Error::InvalidConfig(format!("bad layer sizes {sizes:?}")));
    }
    Ok(())
}

impl QNetwork {
    /// All-zero network with the given layer sizes.
    pub fn zeros(sizes: &[usize], role: Role) -> Result<Self> {
        check_sizes(sizes)?;
        let layers = sizes.windows(2).map(|w| Dense::zeros(w[0], w[1])).collect();
        Ok(Self { layers, role })
    }

    /// He-uniform weights, zero biases.
    pub fn random<R: Rng>(sizes: &[usize], role: Role, rng: &mut R) -> Result<Self> {
        let mut net = Self::zeros(sizes, role)?;
        for layer in &mut net.layers {
            let limit = (6.0 / layer.inputs as f64).sqrt();
            for w in &mut layer.weights {
                *w = rng.gen_range(-limit..limit);
            }
        }
        Ok(net)
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    /// Layer sizes, input first.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.layers[0].inputs];
        s.extend(self.layers.iter().map(|l| l.outputs));
        s
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map(|l| l.outputs).unwrap_or(0)
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// Flat view of every parameter: layer by layer, weights then biases.
    pub fn params(&self) -> Vec<f64> {
        self.layers.iter().flat_map(Dense::flat).collect()
    }

    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_params() {
            return Err(Error::Checkpoint(format!(
                "expected {} parameters, got {}",
                self.num_params(),
                flat.len()
            )));
        }
        let mut it = flat.iter().copied();
        for l in &mut self.layers {
            for w in l.weights.iter_mut().chain(l.bias.iter_mut()) {
                *w = it.next().expect("length checked");
            }
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(|l| l.weights.iter().chain(&l.bias).all(|v| v.is_finite()))
    }

    /// Q-values for every action.
    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        let mut cur = input.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.affine(&cur, &mut next);
            if i < last {
                next.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur
    }

    /// Activations of every layer (input included), post-ReLU on hidden layers.
    fn trace(&self, input: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![input.to_vec()];
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut out = Vec::with_capacity(layer.outputs);
            layer.affine(acts.last().expect("non-empty"), &mut out);
            if i < last {
                out.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            acts.push(out);
        }
        acts
    }

    /// `1 / (2m) * sum (Q(s_k, a_k) - y_k)^2`.
    pub fn loss(&self, samples: &[Sample<'_>]) -> f64 {
        if samples.is_empty() {
            return 0.0;
        }
        let sq: f64 = samples
            .iter()
            .map(|s| {
                let e = self.forward(s.input)[s.action] - s.target;
                e * e
            })
            .sum();
        sq / (2.0 * samples.len() as f64)
    }

    /// Gradient of [`QNetwork::loss`] with respect to every parameter, shaped
    /// like the layers.
    pub fn gradients(&self, samples: &[Sample<'_>]) -> Vec<Dense> {
        let mut grads: Vec<Dense> = self.layers.iter().map(|l| Dense::zeros(l.inputs, l.outputs)).collect();
        if samples.is_empty() {
            return grads;
        }
        let m = samples.len() as f64;
        for s in samples {
            let acts = self.trace(s.input);
            let out = acts.last().expect("output layer");
            let mut delta = vec![0.0; out.len()];
            delta[s.action] = (out[s.action] - s.target) / m;
            for li in (0..self.layers.len()).rev() {
                let layer = &self.layers[li];
                let input = &acts[li];
                let g = &mut grads[li];
                for (o, d) in delta.iter().enumerate() {
                    if *d == 0.0 {
                        continue;
                    }
                    g.bias[o] += d;
                    let row = &mut g.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (gw, x) in row.iter_mut().zip(input) {
                        *gw += d * x;
                    }
                }
                if li == 0 {
                    break;
                }
                // back through the ReLU feeding this layer
                let mut prev = vec![0.0; layer.inputs];
                for (o, d) in delta.iter().enumerate() {
                    if *d == 0.0 {
                        continue;
                    }
                    let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (p, w) in prev.iter_mut().zip(row) {
                        *p += d * w;
                    }
                }
                for (p, a) in prev.iter_mut().zip(input) {
                    if *a <= 0.0 {
                        *p = 0.0;
                    }
                }
                delta = prev;
            }
        }
        grads
    }

    /// `theta -= eta * grad`.
    pub fn apply_gradients(&mut self, grads: &[Dense], eta: f64) {
        for (l, g) in self.layers.iter_mut().zip(grads) {
            for (w, gw) in l.weights.iter_mut().zip(&g.weights) {
                *w -= eta * gw;
            }
            for (b, gb) in l.bias.iter_mut().zip(&g.bias) {
                *b -= eta * gb;
            }
        }
    }

    pub fn write_checkpoint<W: Write>(&self, mut w: W) -> Result<()> {
        let sizes = self.sizes();
        w.write_all(&(sizes.len() as u32).to_le_bytes())?;
        for s in &sizes {
            w.write_all(&(*s as u32).to_le_bytes())?;
        }
        for p in self.params() {
            w.write_all(&p.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_checkpoint<R: Read>(mut r: R, role: Role) -> Result<Self> {
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let n = u32::from_le_bytes(b4) as usize;
        if !(2..=64).contains(&n) {
            return Err(Error::Checkpoint(format!("implausible layer count {n}")));
        }
        let mut sizes = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut b4)?;
            sizes.push(u32::from_le_bytes(b4) as usize);
        }
        let mut net = Self::zeros(&sizes, role).map_err(|e| Error::Checkpoint(e.to_string()))?;
        let mut flat = Vec::with_capacity(net.num_params());
        let mut b8 = [0u8; 8];
        for _ in 0..net.num_params() {
            r.read_exact(&mut b8)
                .map_err(|_| Error::Checkpoint("truncated parameter stream".into()))?;
            flat.push(f64::from_le_bytes(b8));
        }
        if r.read(&mut b8)? != 0 {
            return Err(Error::Checkpoint("trailing bytes after parameters".into()));
        }
        net.set_params(&flat)?;
        Ok(net)
    }
}

/// One gradient-descent step on the squared TD error; returns the loss
/// before the step. Targets are constants.
pub fn backward_and_step(net: &mut QNetwork, samples: &[Sample<'_>], eta: f64) -> f64 {
    let loss = net.loss(samples);
    let grads = net.gradients(samples);
    net.apply_gradients(&grads, eta);
    loss
}

/// Copies the predicted parameters into the target network.
pub fn sync_target(pred: &QNetwork, target: &mut QNetwork) -> Result<()> {
    if pred.sizes() != target.sizes() {
        return Err(Error::ArchitectureMismatch(pred.sizes(), target.sizes()));
    }
    for (t, p) in target.layers.iter_mut().zip(&pred.layers) {
        t.weights.copy_from_slice(&p.weights);
        t.bias.copy_from_slice(&p.bias);
    }
    Ok(())
}
