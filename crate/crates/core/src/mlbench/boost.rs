use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tree::{Criterion, Tree, TreeParams};

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Stage-wise regression trees on the logistic loss with Newton leaf
/// values.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientBoosting {
    init: f64,
    learning_rate: f64,
    trees: Vec<Tree>,
}

impl GradientBoosting {
    pub fn fit(x: &[Vec<f64>], y: &[u8], n_estimators: usize, learning_rate: f64, max_depth: usize) -> Self {
        let n = x.len();
        let yf: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
        let p0 = (yf.iter().sum::<f64>() / n as f64).clamp(1e-6, 1.0 - 1e-6);
        let init = (p0 / (1.0 - p0)).ln();
        let mut score = vec![init; n];
        let params = TreeParams {
            max_depth: Some(max_depth.max(1)),
            min_samples_leaf: 1,
            max_features: None,
        };
        let idx: Vec<usize> = (0..n).collect();
        // splits use every feature, so the generator is never drawn from
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut trees = Vec::with_capacity(n_estimators);
        for _ in 0..n_estimators {
            let p: Vec<f64> = score.iter().map(|&s| sigmoid(s)).collect();
            let residual: Vec<f64> = yf.iter().zip(&p).map(|(t, q)| t - q).collect();
            let leaf = |ids: &[usize]| {
                let num: f64 = ids.iter().map(|&i| residual[i]).sum();
                let den: f64 = ids.iter().map(|&i| p[i] * (1.0 - p[i])).sum();
                if den.abs() < 1e-12 {
                    0.0
                } else {
                    num / den
                }
            };
            let tree = Tree::fit(x, &residual, &idx, Criterion::Mse, &params, &leaf, &mut rng);
            for (s, row) in score.iter_mut().zip(x) {
                *s += learning_rate * tree.predict_value(row);
            }
            trees.push(tree);
        }
        Self {
            init,
            learning_rate,
            trees,
        }
    }

    pub fn decision(&self, q: &[f64]) -> f64 {
        self.init + self.learning_rate * self.trees.iter().map(|t| t.predict_value(q)).sum::<f64>()
    }

    /// Class 1 when the predicted probability exceeds 0.5.
    pub fn predict(&self, q: &[f64]) -> u8 {
        u8::from(sigmoid(self.decision(q)) > 0.5)
    }
}
