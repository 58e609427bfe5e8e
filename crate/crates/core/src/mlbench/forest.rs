use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tree::{DecisionTree, TreeParams};

/// Bagged CART trees with `floor(sqrt(d))` candidate features per split.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
}

impl RandomForest {
    pub fn fit(x: &[Vec<f64>], y: &[u8], n_trees: usize, max_depth: Option<usize>, seed: u64) -> Self {
        let n = x.len();
        let d = x.first().map_or(0, Vec::len);
        let params = TreeParams {
            max_depth,
            min_samples_leaf: 1,
            max_features: Some(((d as f64).sqrt().floor() as usize).max(1)),
        };
        let trees = (0..n_trees.max(1))
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                DecisionTree::fit_indices(x, y, &idx, &params, &mut rng)
            })
            .collect();
        Self { trees }
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    /// Majority vote; a tie goes to class 0.
    pub fn predict(&self, q: &[f64]) -> u8 {
        let ones = self.trees.iter().filter(|t| t.predict(q) == 1).count();
        u8::from(2 * ones > self.trees.len())
    }
}
