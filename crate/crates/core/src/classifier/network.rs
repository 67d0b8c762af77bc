//! Fully connected ReLU network with a softmax cross-entropy head.

use rand::Rng;

/// Affine layer; `weights` is row-major `outputs x inputs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Dense {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    /// Uniform in `[-limit, limit]`, zero bias.
    pub fn uniform<R: Rng>(inputs: usize, outputs: usize, limit: f64, rng: &mut R) -> Self {
        let weights = (0..inputs * outputs)
            .map(|_| rng.random_range(-limit..=limit))
            .collect();
        Dense {
            inputs,
            outputs,
            weights,
            bias: vec![0.0; outputs],
        }
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.inputs);
        self.weights
            .chunks_exact(self.inputs)
            .zip(&self.bias)
            .map(|(row, b)| b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
            .collect()
    }

    fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Layers with ReLU between them and raw logits out of the last one.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

impl Mlp {
    /// He-uniform hidden layers and Glorot-uniform output layer.
    pub fn new<R: Rng>(sizes: &[usize], rng: &mut R) -> Self {
        assert!(sizes.len() >= 2, "a network needs input and output sizes");
        let last = sizes.len() - 2;
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(l, pair)| {
                let (fan_in, fan_out) = (pair[0], pair[1]);
                let limit = if l == last {
                    (6.0 / (fan_in + fan_out) as f64).sqrt()
                } else {
                    (6.0 / fan_in.max(1) as f64).sqrt()
                };
                Dense::uniform(fan_in, fan_out, limit, rng)
            })
            .collect();
        Mlp { layers }
    }

    /// Same as [`Mlp::new`] but with the output layer zeroed.
    pub fn with_zero_output<R: Rng>(sizes: &[usize], rng: &mut R) -> Self {
        let mut net = Mlp::new(sizes, rng);
        let out = net.layers.last_mut().unwrap();
        *out = Dense::zeros(out.inputs, out.outputs);
        net
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().outputs
    }

    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        let mut a = x.to_vec();
        for (l, layer) in self.layers.iter().enumerate() {
            a = layer.forward(&a);
            if l + 1 < self.layers.len() {
                relu_in_place(&mut a);
            }
        }
        a
    }

    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        softmax(&self.logits(x))
    }

    /// Zeroed gradient buffers shaped like the layers.
    pub fn zero_gradients(&self) -> Vec<Dense> {
        self.layers
            .iter()
            .map(|l| Dense::zeros(l.inputs, l.outputs))
            .collect()
    }

    /// Adds the cross-entropy gradient of one sample into `grads` and returns
    /// its loss.
    pub fn accumulate_gradient(&self, x: &[f64], label: usize, grads: &mut [Dense]) -> f64 {
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(x.to_vec());
        for (l, layer) in self.layers.iter().enumerate() {
            let mut z = layer.forward(activations.last().unwrap());
            if l + 1 < self.layers.len() {
                relu_in_place(&mut z);
            }
            activations.push(z);
        }
        let probs = softmax(activations.last().unwrap());
        let loss = -probs[label].max(f64::MIN_POSITIVE).ln();

        let mut delta = probs;
        delta[label] -= 1.0;
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let input = &activations[l];
            let g = &mut grads[l];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                g.bias[o] += d;
                let row = &mut g.weights[o * layer.inputs..(o + 1) * layer.inputs];
                for (gw, &a) in row.iter_mut().zip(input) {
                    *gw += d * a;
                }
            }
            if l == 0 {
                break;
            }
            let mut prev = vec![0.0; layer.inputs];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                for (p, &w) in prev.iter_mut().zip(row) {
                    *p += w * d;
                }
            }
            // ReLU derivative, read off the post-activation values
            for (p, &a) in prev.iter_mut().zip(input) {
                if a <= 0.0 {
                    *p = 0.0;
                }
            }
            delta = prev;
        }
        loss
    }

    /// Mean loss and mean gradients over a batch.
    pub fn loss_and_gradients(&self, batch: &[(&[f64], usize)]) -> (f64, Vec<Dense>) {
        let mut grads = self.zero_gradients();
        let mut loss = 0.0;
        for &(x, label) in batch {
            loss += self.accumulate_gradient(x, label, &mut grads);
        }
        let scale = 1.0 / batch.len() as f64;
        for g in &mut grads {
            g.weights
                .iter_mut()
                .chain(g.bias.iter_mut())
                .for_each(|v| *v *= scale);
        }
        (loss * scale, grads)
    }

    /// Mean cross-entropy over a batch, forward only.
    pub fn loss(&self, batch: &[(&[f64], usize)]) -> f64 {
        batch
            .iter()
            .map(|&(x, label)| -self.probabilities(x)[label].max(f64::MIN_POSITIVE).ln())
            .sum::<f64>()
            / batch.len() as f64
    }

    /// Plain gradient step `theta -= rate * grad`.
    pub fn apply_gradients(&mut self, grads: &[Dense], rate: f64) {
        for (layer, g) in self.layers.iter_mut().zip(grads) {
            for (w, gw) in layer.weights.iter_mut().zip(&g.weights) {
                *w -= rate * gw;
            }
            for (b, gb) in layer.bias.iter_mut().zip(&g.bias) {
                *b -= rate * gb;
            }
        }
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Dense::param_count).sum()
    }

    /// Parameters flattened layer by layer, weights before bias.
    pub fn params(&self) -> Vec<f64> {
        flatten_layers(&self.layers)
    }

    pub fn set_params(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.param_count());
        let mut rest = params;
        for layer in &mut self.layers {
            let (w, tail) = rest.split_at(layer.weights.len());
            let (b, tail) = tail.split_at(layer.bias.len());
            layer.weights.copy_from_slice(w);
            layer.bias.copy_from_slice(b);
            rest = tail;
        }
    }
}

/// Gradient buffers flattened in [`Mlp::params`] order.
pub fn flatten_layers(layers: &[Dense]) -> Vec<f64> {
    layers
        .iter()
        .flat_map(|l| l.weights.iter().chain(&l.bias).copied())
        .collect()
}

fn relu_in_place(v: &mut [f64]) {
    v.iter_mut().for_each(|x| *x = x.max(0.0));
}

/// Gradients smaller than this in magnitude are compared absolutely.
pub const GRADIENT_FLOOR: f64 = 1e-6;

/// Largest relative disagreement between backpropagated gradients and central
/// finite differences with step `step`, over every parameter.
///
/// The relative error of one parameter is `|n - a| / max(|n|, |a|, GRADIENT_FLOOR)`.
pub fn gradient_check(net: &Mlp, batch: &[(&[f64], usize)], step: f64) -> f64 {
    let (_, grads) = net.loss_and_gradients(batch);
    let analytic = flatten_layers(&grads);
    let base = net.params();
    let mut probe = net.clone();
    let mut worst = 0.0f64;
    for (k, &a) in analytic.iter().enumerate() {
        let mut p = base.clone();
        p[k] = base[k] + step;
        probe.set_params(&p);
        let up = probe.loss(batch);
        p[k] = base[k] - step;
        probe.set_params(&p);
        let down = probe.loss(batch);
        let numeric = (up - down) / (2.0 * step);
        worst = worst.max((numeric - a).abs() / numeric.abs().max(a.abs()).max(GRADIENT_FLOOR));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn softmax_sums_to_one() {
        let p = softmax(&[1000.0, -5.0, 3.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[0] > 0.999);
    }

    #[test]
    fn zero_output_layer_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let net = Mlp::with_zero_output(&[4, 8, 3], &mut rng);
        let p = net.probabilities(&[0.3, -2.0, 1.0, 5.0]);
        for v in p {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn backprop_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut net = Mlp::new(&[3, 5, 4, 3], &mut rng);
        for l in &mut net.layers {
            l.bias
                .iter_mut()
                .for_each(|b| *b = rng.random_range(-0.1..0.1));
        }
        let xs: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let batch: Vec<(&[f64], usize)> = xs
            .iter()
            .enumerate()
            .map(|(i, x)| (&x[..], i % 3))
            .collect();
        assert!(gradient_check(&net, &batch, 1e-5) < 1e-6);
        assert!(gradient_check(&net, &batch, 1e-3) < 1e-4);
    }
}
