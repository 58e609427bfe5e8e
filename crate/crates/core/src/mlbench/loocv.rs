use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{compute_metrics, train, Confusion, FeatureMatrix, Metrics, MlError, ModelKind, ModelSpec, Standardizer};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPrediction {
    pub subject_id: String,
    pub truth: u8,
    pub predicted: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPointResult {
    pub model: ModelSpec,
    pub accuracy: f64,
}

/// Best grid point of one model family under leave-one-out evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model_kind: ModelKind,
    pub display_name: String,
    /// Hyperparameters of the selected grid point.
    pub model: ModelSpec,
    pub n_subjects: usize,
    pub confusion: Confusion,
    pub metrics: Metrics,
    pub per_fold: Vec<FoldPrediction>,
    pub grid: Vec<GridPointResult>,
    pub seed: u64,
    /// Hyperparameters were chosen on the same folds that produced the
    /// reported metrics, so they are optimistic.
    pub optimistic_bias: bool,
}

fn fold_rows(matrix: &FeatureMatrix, held_out: usize) -> Vec<Vec<Option<f64>>> {
    matrix
        .values
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != held_out)
        .map(|(_, r)| r.clone())
        .collect()
}

/// Standardiser fitted on every row except `held_out`.
pub fn fold_standardizer(matrix: &FeatureMatrix, held_out: usize) -> Standardizer {
    Standardizer::fit(&fold_rows(matrix, held_out))
}

fn predict_fold(matrix: &FeatureMatrix, spec: &ModelSpec, held_out: usize, seed: u64) -> Result<u8, MlError> {
    let train_rows = fold_rows(matrix, held_out);
    let scaler = Standardizer::fit(&train_rows);
    let x = scaler.transform(&train_rows);
    let y: Vec<u8> = matrix
        .labels
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != held_out)
        .map(|(_, l)| *l)
        .collect();
    let model = train(spec, &x, &y, seed)?;
    Ok(model.predict(&scaler.transform_row(&matrix.values[held_out])))
}

/// Plain leave-one-out run of one configuration. Folds run in parallel;
/// predictions come back in row order.
pub fn loocv(matrix: &FeatureMatrix, spec: &ModelSpec, seed: u64) -> Result<(Confusion, Vec<FoldPrediction>), MlError> {
    let n = matrix.n_rows();
    if n < 3 {
        return Err(MlError::TooFewSubjects(n));
    }
    let predicted: Vec<u8> = (0..n)
        .into_par_iter()
        .map(|i| predict_fold(matrix, spec, i, seed))
        .collect::<Result<_, _>>()?;
    Ok(collect_folds(matrix, &predicted))
}

fn collect_folds(matrix: &FeatureMatrix, predicted: &[u8]) -> (Confusion, Vec<FoldPrediction>) {
    let per_fold: Vec<FoldPrediction> = predicted
        .iter()
        .enumerate()
        .map(|(i, &p)| FoldPrediction {
            subject_id: matrix.subject_ids[i].clone(),
            truth: matrix.labels[i],
            predicted: p,
        })
        .collect();
    let confusion = Confusion::from_pairs(per_fold.iter().map(|f| (f.truth, f.predicted)));
    (confusion, per_fold)
}

/// Full leave-one-out run for every grid point; the most accurate point
/// wins, the earliest on ties.
pub fn loocv_grid_search(
    matrix: &FeatureMatrix,
    kind: ModelKind,
    grid: &[ModelSpec],
    seed: u64,
) -> Result<EvalReport, MlError> {
    let n = matrix.n_rows();
    if n < 3 {
        return Err(MlError::TooFewSubjects(n));
    }
    if grid.is_empty() {
        return Err(MlError::EmptyGrid);
    }
    let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|g| (0..n).map(move |i| (g, i))).collect();
    let flat: Vec<u8> = jobs
        .into_par_iter()
        .map(|(g, i)| predict_fold(matrix, &grid[g], i, seed))
        .collect::<Result<_, _>>()?;

    let mut best: Option<(usize, Confusion, Vec<FoldPrediction>)> = None;
    let mut grid_results = Vec::with_capacity(grid.len());
    for (g, predicted) in flat.chunks(n).enumerate() {
        let (confusion, per_fold) = collect_folds(matrix, predicted);
        let correct = confusion.tp + confusion.tn;
        grid_results.push(GridPointResult {
            model: grid[g],
            accuracy: 100.0 * correct as f64 / n as f64,
        });
        if best.as_ref().is_none_or(|b| correct > b.1.tp + b.1.tn) {
            best = Some((g, confusion, per_fold));
        }
    }
    let (g, confusion, per_fold) = best.expect("grid is non-empty");
    Ok(EvalReport {
        model_kind: kind,
        display_name: kind.display_name().to_string(),
        model: grid[g],
        n_subjects: n,
        metrics: compute_metrics(&confusion)?,
        confusion,
        per_fold,
        grid: grid_results,
        seed,
        optimistic_bias: grid.len() > 1,
    })
}
