use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MOMENTUM: f64 = 0.9;

/// One ReLU hidden layer, sigmoid output, binary cross-entropy.
///
/// Parameters are stored flat as `[W1 (hidden x d, row-major), b1, w2, b2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub d: usize,
    pub hidden: usize,
    pub params: Vec<f64>,
}

impl Mlp {
    pub fn n_params(d: usize, hidden: usize) -> usize {
        hidden * d + hidden + hidden + 1
    }

    /// He-uniform hidden weights, Glorot-uniform output weights, zero
    /// biases.
    pub fn init(d: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = vec![0.0; Self::n_params(d, hidden)];
        let l1 = (6.0 / d.max(1) as f64).sqrt();
        for w in &mut params[..hidden * d] {
            *w = rng.random_range(-l1..l1);
        }
        let l2 = (6.0 / (hidden + 1) as f64).sqrt();
        let off = hidden * d + hidden;
        for w in &mut params[off..off + hidden] {
            *w = rng.random_range(-l2..l2);
        }
        Self { d, hidden, params }
    }

    /// Full-batch gradient descent with momentum for `epochs` steps.
    pub fn fit(
        x: &[Vec<f64>],
        y: &[u8],
        hidden: usize,
        learning_rate: f64,
        epochs: usize,
        seed: u64,
    ) -> Self {
        let d = x.first().map_or(0, Vec::len);
        let mut model = Self::init(d, hidden, seed);
        let mut velocity = vec![0.0; model.params.len()];
        for _ in 0..epochs {
            let (_, grad) = loss_and_gradient(&model.params, d, hidden, x, y);
            for ((p, v), g) in model.params.iter_mut().zip(&mut velocity).zip(&grad) {
                *v = MOMENTUM * *v - learning_rate * g;
                *p += *v;
            }
        }
        model
    }

    pub fn logit(&self, q: &[f64]) -> f64 {
        forward(&self.params, self.d, self.hidden, q).1
    }

    pub fn predict(&self, q: &[f64]) -> u8 {
        u8::from(self.logit(q) > 0.0)
    }
}

/// Hidden activations and output logit.
fn forward(params: &[f64], d: usize, hidden: usize, q: &[f64]) -> (Vec<f64>, f64) {
    let (w1, rest) = params.split_at(hidden * d);
    let (b1, rest) = rest.split_at(hidden);
    let (w2, b2) = rest.split_at(hidden);
    let h: Vec<f64> = (0..hidden)
        .map(|k| {
            let z: f64 = w1[k * d..(k + 1) * d].iter().zip(q).map(|(w, x)| w * x).sum::<f64>() + b1[k];
            z.max(0.0)
        })
        .collect();
    let out = h.iter().zip(w2).map(|(a, w)| a * w).sum::<f64>() + b2[0];
    (h, out)
}

/// Mean binary cross-entropy and its gradient with respect to the flat
/// parameter vector.
pub fn loss_and_gradient(params: &[f64], d: usize, hidden: usize, x: &[Vec<f64>], y: &[u8]) -> (f64, Vec<f64>) {
    let n = x.len().max(1) as f64;
    let mut grad = vec![0.0; params.len()];
    let mut loss = 0.0;
    let w2 = &params[hidden * d + hidden..hidden * d + 2 * hidden];
    for (row, &t) in x.iter().zip(y) {
        let (h, z) = forward(params, d, hidden, row);
        let t = f64::from(t);
        loss += z.max(0.0) - z * t + (-z.abs()).exp().ln_1p();
        let dz = (1.0 / (1.0 + (-z).exp()) - t) / n;
        let (gw1, rest) = grad.split_at_mut(hidden * d);
        let (gb1, rest) = rest.split_at_mut(hidden);
        let (gw2, gb2) = rest.split_at_mut(hidden);
        gb2[0] += dz;
        for k in 0..hidden {
            gw2[k] += dz * h[k];
            if h[k] > 0.0 {
                let dh = dz * w2[k];
                gb1[k] += dh;
                for (g, xv) in gw1[k * d..(k + 1) * d].iter_mut().zip(row) {
                    *g += dh * xv;
                }
            }
        }
    }
    (loss / n, grad)
}
