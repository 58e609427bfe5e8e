use serde::{Deserialize, Serialize};

use super::{Kernel, ModelKind, ModelSpec};

/// Hyperparameter grids per model family. A depth of 0 means unlimited.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub knn_k: Vec<usize>,
    pub dt_max_depth: Vec<usize>,
    pub dt_min_samples_leaf: usize,
    pub rf_n_trees: Vec<usize>,
    pub rf_max_depth: Vec<usize>,
    pub gb_n_estimators: Vec<usize>,
    pub gb_learning_rate: Vec<f64>,
    pub gb_max_depth: usize,
    pub svm_c: Vec<f64>,
    pub svm_linear: bool,
    pub svm_rbf_gamma: Vec<f64>,
    pub mlp_hidden: Vec<usize>,
    pub mlp_learning_rate: Vec<f64>,
    pub mlp_epochs: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            knn_k: vec![1, 3, 5, 7],
            dt_max_depth: vec![2, 3, 5, 0],
            dt_min_samples_leaf: 1,
            rf_n_trees: vec![50, 200],
            rf_max_depth: vec![3, 0],
            gb_n_estimators: vec![50, 200],
            gb_learning_rate: vec![0.05, 0.1],
            gb_max_depth: 3,
            svm_c: vec![0.1, 1.0, 10.0],
            svm_linear: true,
            svm_rbf_gamma: vec![0.01, 0.1, 1.0],
            mlp_hidden: vec![8, 16, 32],
            mlp_learning_rate: vec![0.01, 0.001],
            mlp_epochs: 500,
        }
    }
}

fn depth(d: usize) -> Option<usize> {
    (d > 0).then_some(d)
}

impl GridConfig {
    /// Grid points in deterministic order (outer loop over the first
    /// listed hyperparameter).
    pub fn specs(&self, kind: ModelKind) -> Vec<ModelSpec> {
        match kind {
            ModelKind::Knn => self.knn_k.iter().map(|&k| ModelSpec::Knn { k }).collect(),
            ModelKind::DecisionTree => self
                .dt_max_depth
                .iter()
                .map(|&d| ModelSpec::DecisionTree {
                    max_depth: depth(d),
                    min_samples_leaf: self.dt_min_samples_leaf,
                })
                .collect(),
            ModelKind::RandomForest => self
                .rf_n_trees
                .iter()
                .flat_map(|&n_trees| {
                    self.rf_max_depth.iter().map(move |&d| ModelSpec::RandomForest {
                        n_trees,
                        max_depth: depth(d),
                    })
                })
                .collect(),
            ModelKind::GradientBoosting => self
                .gb_n_estimators
                .iter()
                .flat_map(|&n_estimators| {
                    self.gb_learning_rate
                        .iter()
                        .map(move |&learning_rate| ModelSpec::GradientBoosting {
                            n_estimators,
                            learning_rate,
                            max_depth: self.gb_max_depth,
                        })
                })
                .collect(),
            ModelKind::Svm => {
                let mut kernels = Vec::new();
                if self.svm_linear {
                    kernels.push(Kernel::Linear);
                }
                kernels.extend(self.svm_rbf_gamma.iter().map(|&gamma| Kernel::Rbf { gamma }));
                self.svm_c
                    .iter()
                    .flat_map(|&c| kernels.iter().map(move |&kernel| ModelSpec::Svm { c, kernel }))
                    .collect()
            }
            ModelKind::Mlp => self
                .mlp_hidden
                .iter()
                .flat_map(|&hidden| {
                    self.mlp_learning_rate.iter().map(move |&learning_rate| ModelSpec::Mlp {
                        hidden,
                        learning_rate,
                        epochs: self.mlp_epochs,
                    })
                })
                .collect(),
        }
    }

    /// Rejects values outside their valid ranges.
    pub fn validate(&self) -> Result<(), String> {
        let positive = |v: &[f64], name: &str| {
            if v.iter().all(|x| *x > 0.0 && x.is_finite()) {
                Ok(())
            } else {
                Err(format!("{name} values must be positive"))
            }
        };
        if self.knn_k.contains(&0) {
            return Err("knn_k values must be at least 1".into());
        }
        if self.rf_n_trees.contains(&0) {
            return Err("rf_n_trees values must be at least 1".into());
        }
        if self.mlp_hidden.contains(&0) {
            return Err("mlp_hidden values must be at least 1".into());
        }
        if self.dt_min_samples_leaf == 0 || self.gb_max_depth == 0 {
            return Err("dt_min_samples_leaf and gb_max_depth must be at least 1".into());
        }
        positive(&self.gb_learning_rate, "gb_learning_rate")?;
        positive(&self.svm_c, "svm_c")?;
        positive(&self.svm_rbf_gamma, "svm_rbf_gamma")?;
        positive(&self.mlp_learning_rate, "mlp_learning_rate")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_sizes() {
        let g = GridConfig::default();
        let sizes: Vec<usize> = [
            ModelKind::Knn,
            ModelKind::DecisionTree,
            ModelKind::RandomForest,
            ModelKind::GradientBoosting,
            ModelKind::Svm,
            ModelKind::Mlp,
        ]
        .iter()
        .map(|&k| g.specs(k).len())
        .collect();
        assert_eq!(sizes, vec![4, 4, 4, 4, 12, 6]);
        assert!(g.validate().is_ok());
    }

    #[test]
    fn zero_depth_is_unlimited() {
        let g = GridConfig::default();
        assert_eq!(
            g.specs(ModelKind::DecisionTree)[3],
            ModelSpec::DecisionTree {
                max_depth: None,
                min_samples_leaf: 1
            }
        );
    }
}
