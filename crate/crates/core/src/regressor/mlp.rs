use rand::Rng;

use crate::error::{Error, Result};

/// Fully connected network, tanh on hidden layers and identity on the
/// output. Parameters live in one flat buffer: for each layer, the
/// `out × in` row-major weights followed by the `out` biases.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    widths: Vec<usize>,
    params: Vec<f64>,
}

/// Post-activation values of every layer, input included.
#[derive(Clone, Debug)]
pub(crate) struct Activations {
    layers: Vec<Vec<f64>>,
}

impl Activations {
    pub fn output(&self) -> &[f64] {
        self.layers.last().expect("at least the input layer")
    }
}

impl Mlp {
    /// Weights and biases uniform in `[−1/√fan_in, 1/√fan_in]`.
    pub fn new<R: Rng + ?Sized>(widths: &[usize], rng: &mut R) -> Result<Self> {
        let mut mlp = Self::zeros(widths)?;
        let mut offset = 0;
        for l in 0..widths.len() - 1 {
            let (fan_in, fan_out) = (widths[l], widths[l + 1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            for p in &mut mlp.params[offset..offset + fan_out * (fan_in + 1)] {
                *p = rng.random_range(-bound..bound);
            }
            offset += fan_out * (fan_in + 1);
        }
        Ok(mlp)
    }

    pub fn zeros(widths: &[usize]) -> Result<Self> {
        if widths.len() < 2 || widths.contains(&0) {
            return Err(Error::Config(format!("invalid layer widths {widths:?}")));
        }
        let n = widths.windows(2).map(|w| w[1] * (w[0] + 1)).sum();
        Ok(Self {
            widths: widths.to_vec(),
            params: vec![0.0; n],
        })
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn input_width(&self) -> usize {
        self.widths[0]
    }

    pub fn output_width(&self) -> usize {
        *self.widths.last().unwrap()
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Sets the weights (`out × in`, row-major) and biases of layer `l`.
    pub fn set_layer(&mut self, l: usize, weights: &[f64], biases: &[f64]) -> Result<()> {
        let (w_off, b_off, fan_in, fan_out) = self.layer_layout(l);
        if weights.len() != fan_in * fan_out || biases.len() != fan_out {
            return Err(Error::Config(format!("layer {l} shape mismatch")));
        }
        self.params[w_off..b_off].copy_from_slice(weights);
        self.params[b_off..b_off + fan_out].copy_from_slice(biases);
        Ok(())
    }

    fn layer_layout(&self, l: usize) -> (usize, usize, usize, usize) {
        let offset: usize = self.widths[..=l].windows(2).map(|w| w[1] * (w[0] + 1)).sum();
        let (fan_in, fan_out) = (self.widths[l], self.widths[l + 1]);
        (offset, offset + fan_in * fan_out, fan_in, fan_out)
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.forward_cached(x).output().to_vec()
    }

    pub(crate) fn forward_cached(&self, x: &[f64]) -> Activations {
        assert_eq!(x.len(), self.input_width(), "input width");
        let n_layers = self.widths.len() - 1;
        let mut layers = Vec::with_capacity(n_layers + 1);
        layers.push(x.to_vec());
        let mut offset = 0;
        for l in 0..n_layers {
            let (fan_in, fan_out) = (self.widths[l], self.widths[l + 1]);
            let w = &self.params[offset..offset + fan_in * fan_out];
            let b = &self.params[offset + fan_in * fan_out..offset + fan_out * (fan_in + 1)];
            let input = &layers[l];
            let hidden = l + 1 < n_layers;
            let out: Vec<f64> = (0..fan_out)
                .map(|o| {
                    let row = &w[o * fan_in..(o + 1) * fan_in];
                    let z = row.iter().zip(input).map(|(a, b)| a * b).sum::<f64>() + b[o];
                    if hidden {
                        z.tanh()
                    } else {
                        z
                    }
                })
                .collect();
            layers.push(out);
            offset += fan_out * (fan_in + 1);
        }
        Activations { layers }
    }

    /// Accumulates `∂L/∂params` into `grad` given `∂L/∂output`.
    pub(crate) fn backward(&self, acts: &Activations, grad_out: &[f64], grad: &mut [f64]) {
        let n_layers = self.widths.len() - 1;
        let mut offsets = Vec::with_capacity(n_layers);
        let mut offset = 0;
        for l in 0..n_layers {
            offsets.push(offset);
            offset += self.widths[l + 1] * (self.widths[l] + 1);
        }

        let mut delta = grad_out.to_vec();
        for l in (0..n_layers).rev() {
            let (fan_in, fan_out) = (self.widths[l], self.widths[l + 1]);
            let off = offsets[l];
            let input = &acts.layers[l];
            for o in 0..fan_out {
                let d = delta[o];
                let row = &mut grad[off + o * fan_in..off + (o + 1) * fan_in];
                for (g, a) in row.iter_mut().zip(input) {
                    *g += d * a;
                }
                grad[off + fan_in * fan_out + o] += d;
            }
            if l == 0 {
                break;
            }
            let w = &self.params[off..off + fan_in * fan_out];
            let mut prev = vec![0.0; fan_in];
            for o in 0..fan_out {
                let d = delta[o];
                for (p, wi) in prev.iter_mut().zip(&w[o * fan_in..(o + 1) * fan_in]) {
                    *p += d * wi;
                }
            }
            // layer l's input is the tanh output of layer l − 1
            for (p, a) in prev.iter_mut().zip(input) {
                *p *= 1.0 - a * a;
            }
            delta = prev;
        }
    }
}
