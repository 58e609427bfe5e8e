use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MlError;
use crate::features::FeatureGroup;
use crate::session::Label;

/// One subject's named feature values as read from an extraction run.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectFeatures {
    pub subject_id: String,
    pub label: Label,
    pub values: BTreeMap<String, Option<f64>>,
}

/// Rows are subjects; `labels[i]` is 1 for the positive class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub subject_ids: Vec<String>,
    pub feature_names: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
    pub labels: Vec<u8>,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.values.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let pos = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - pos, pos]
    }

    /// Same data with rows reordered by `order`.
    pub fn permuted(&self, order: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            subject_ids: order.iter().map(|&i| self.subject_ids[i].clone()).collect(),
            feature_names: self.feature_names.clone(),
            values: order.iter().map(|&i| self.values[i].clone()).collect(),
            labels: order.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Selects the group's columns in definition order. Columns missing from a
/// subject's map become absent values; imputation happens per fold.
pub fn assemble_matrix(
    subjects: &[SubjectFeatures],
    group: FeatureGroup,
    positive: Label,
) -> Result<FeatureMatrix, MlError> {
    let feature_names: Vec<String> = group.names().into_iter().map(String::from).collect();
    let labels: Vec<u8> = subjects.iter().map(|s| u8::from(s.label == positive)).collect();
    let pos = labels.iter().filter(|&&l| l == 1).count();
    let neg = labels.len() - pos;
    if pos < 2 || neg < 2 {
        return Err(MlError::ClassUnderpopulated {
            negative: neg,
            positive: pos,
        });
    }
    let values = subjects
        .iter()
        .map(|s| {
            feature_names
                .iter()
                .map(|n| s.values.get(n).copied().flatten().filter(|v| v.is_finite()))
                .collect()
        })
        .collect();
    Ok(FeatureMatrix {
        subject_ids: subjects.iter().map(|s| s.subject_id.clone()).collect(),
        feature_names,
        values,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subject(id: &str, label: Label) -> SubjectFeatures {
        let mut values = BTreeMap::new();
        values.insert("TEMP_mean".to_string(), Some(33.0));
        values.insert("TEMP_trend".to_string(), None);
        SubjectFeatures {
            subject_id: id.to_string(),
            label,
            values,
        }
    }

    #[test]
    fn column_counts_and_absent_values() {
        let subjects = [
            subject("a", Label::Unipolar),
            subject("b", Label::Unipolar),
            subject("c", Label::Bipolar),
            subject("d", Label::Bipolar),
        ];
        let m = assemble_matrix(&subjects, FeatureGroup::Temp, Label::Bipolar).unwrap();
        assert_eq!(m.n_features(), 7);
        assert_eq!(m.labels, vec![0, 0, 1, 1]);
        assert_eq!(m.values[0][0], Some(33.0));
        assert_eq!(m.values[0][5], None);
        assert_eq!(m.values[0][1], None);
        let all = assemble_matrix(&subjects, FeatureGroup::All, Label::Bipolar).unwrap();
        assert_eq!(all.n_features(), 59);
        let acc = assemble_matrix(&subjects, FeatureGroup::Acc, Label::Unipolar).unwrap();
        assert_eq!(acc.n_features(), 10);
        assert_eq!(acc.labels, vec![1, 1, 0, 0]);
    }

    #[test]
    fn underpopulated_class() {
        let subjects = [
            subject("a", Label::Unipolar),
            subject("b", Label::Bipolar),
            subject("c", Label::Bipolar),
        ];
        assert!(matches!(
            assemble_matrix(&subjects, FeatureGroup::Temp, Label::Bipolar),
            Err(MlError::ClassUnderpopulated { .. })
        ));
    }
}
