//! Feature matrices, leakage-safe standardisation, six classifier families,
//! leave-one-out grid search and the evaluation metrics.

mod boost;
mod forest;
mod grid;
mod knn;
mod loocv;
mod matrix;
mod metrics;
mod mlp;
mod report;
mod standardize;
mod svm;
mod tree;

pub use boost::GradientBoosting;
pub use forest::RandomForest;
pub use grid::GridConfig;
pub use knn::Knn;
pub use loocv::{fold_standardizer, loocv, loocv_grid_search, EvalReport, FoldPrediction, GridPointResult};
pub use matrix::{assemble_matrix, FeatureMatrix, SubjectFeatures};
pub use metrics::{compute_metrics, Confusion, Metrics};
pub use mlp::{loss_and_gradient, Mlp, MOMENTUM};
pub use report::markdown_table;
pub use standardize::{Standardizer, STD_FLOOR};
pub use svm::{Kernel, Svm, SMO_TOLERANCE};
pub use tree::{best_split, Criterion, DecisionTree, Tree, TreeParams};

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MlError {
    #[error("each class needs at least 2 subjects (negative {negative}, positive {positive})")]
    ClassUnderpopulated { negative: usize, positive: usize },
    #[error("training labels contain a single class")]
    DegenerateLabels,
    #[error("confusion matrix is empty")]
    EmptyConfusion,
    #[error("need at least 3 subjects for leave-one-out, got {0}")]
    TooFewSubjects(usize),
    #[error("hyperparameter grid is empty")]
    EmptyGrid,
    #[error("unknown model '{0}'")]
    UnknownModel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Knn,
    DecisionTree,
    RandomForest,
    GradientBoosting,
    Svm,
    Mlp,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::DecisionTree,
        ModelKind::RandomForest,
        ModelKind::GradientBoosting,
        ModelKind::Knn,
        ModelKind::Svm,
        ModelKind::Mlp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Knn => "knn",
            ModelKind::DecisionTree => "decision_tree",
            ModelKind::RandomForest => "random_forest",
            ModelKind::GradientBoosting => "gradient_boosting",
            ModelKind::Svm => "svm",
            ModelKind::Mlp => "mlp",
        }
    }

    /// Row label used in result tables.
    pub fn display_name(self) -> &'static str {
        match self {
            ModelKind::Knn => "kNN",
            ModelKind::DecisionTree => "DT",
            ModelKind::RandomForest => "RF",
            ModelKind::GradientBoosting => "GB (stands in for XGB)",
            ModelKind::Svm => "SVM",
            ModelKind::Mlp => "MLP",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = MlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "knn" => Ok(ModelKind::Knn),
            "dt" | "decision_tree" | "tree" => Ok(ModelKind::DecisionTree),
            "rf" | "random_forest" | "forest" => Ok(ModelKind::RandomForest),
            "gb" | "xgb" | "gradient_boosting" | "boosting" => Ok(ModelKind::GradientBoosting),
            "svm" => Ok(ModelKind::Svm),
            "mlp" => Ok(ModelKind::Mlp),
            _ => Err(MlError::UnknownModel(s.to_string())),
        }
    }
}

/// A classifier family with concrete hyperparameters. `max_depth: None`
/// means unlimited.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Knn {
        k: usize,
    },
    DecisionTree {
        max_depth: Option<usize>,
        min_samples_leaf: usize,
    },
    RandomForest {
        n_trees: usize,
        max_depth: Option<usize>,
    },
    GradientBoosting {
        n_estimators: usize,
        learning_rate: f64,
        max_depth: usize,
    },
    Svm {
        c: f64,
        kernel: Kernel,
    },
    Mlp {
        hidden: usize,
        learning_rate: f64,
        epochs: usize,
    },
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Knn { .. } => ModelKind::Knn,
            ModelSpec::DecisionTree { .. } => ModelKind::DecisionTree,
            ModelSpec::RandomForest { .. } => ModelKind::RandomForest,
            ModelSpec::GradientBoosting { .. } => ModelKind::GradientBoosting,
            ModelSpec::Svm { .. } => ModelKind::Svm,
            ModelSpec::Mlp { .. } => ModelKind::Mlp,
        }
    }
}

/// A trained classifier.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Knn(Knn),
    DecisionTree(DecisionTree),
    RandomForest(RandomForest),
    GradientBoosting(GradientBoosting),
    Svm(Svm),
    Mlp(Mlp),
}

impl Model {
    pub fn predict(&self, q: &[f64]) -> u8 {
        match self {
            Model::Knn(m) => m.predict(q),
            Model::DecisionTree(m) => m.predict(q),
            Model::RandomForest(m) => m.predict(q),
            Model::GradientBoosting(m) => m.predict(q),
            Model::Svm(m) => m.predict(q),
            Model::Mlp(m) => m.predict(q),
        }
    }
}

/// Fits `spec` on standardised rows. `seed` drives the forest's bootstrap
/// and feature draws and the network's initial weights.
pub fn train(spec: &ModelSpec, x: &[Vec<f64>], y: &[u8], seed: u64) -> Result<Model, MlError> {
    let ones = y.iter().filter(|&&v| v == 1).count();
    if ones == 0 || ones == y.len() {
        return Err(MlError::DegenerateLabels);
    }
    Ok(match *spec {
        ModelSpec::Knn { k } => Model::Knn(Knn::fit(x, y, k)),
        ModelSpec::DecisionTree {
            max_depth,
            min_samples_leaf,
        } => {
            let params = TreeParams {
                max_depth,
                min_samples_leaf,
                max_features: None,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Model::DecisionTree(DecisionTree::fit(x, y, &params, &mut rng))
        }
        ModelSpec::RandomForest { n_trees, max_depth } => {
            Model::RandomForest(RandomForest::fit(x, y, n_trees, max_depth, seed))
        }
        ModelSpec::GradientBoosting {
            n_estimators,
            learning_rate,
            max_depth,
        } => Model::GradientBoosting(GradientBoosting::fit(x, y, n_estimators, learning_rate, max_depth)),
        ModelSpec::Svm { c, kernel } => Model::Svm(Svm::fit(x, y, c, kernel)),
        ModelSpec::Mlp {
            hidden,
            learning_rate,
            epochs,
        } => Model::Mlp(Mlp::fit(x, y, hidden, learning_rate, epochs, seed)),
    })
}
