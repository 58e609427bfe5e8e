use crate::stats;

/// Floor applied to column standard deviations.
pub const STD_FLOOR: f64 = 1e-9;

/// Per-column median imputation and z-scoring fitted on training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    /// Train median of observed values, 0 when a column has none.
    pub medians: Vec<f64>,
    pub means: Vec<f64>,
    /// Population std of the imputed column, floored.
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<Option<f64>>]) -> Self {
        let d = rows.first().map_or(0, Vec::len);
        let mut medians = Vec::with_capacity(d);
        let mut means = Vec::with_capacity(d);
        let mut stds = Vec::with_capacity(d);
        for j in 0..d {
            let observed: Vec<f64> = rows.iter().filter_map(|r| r[j]).collect();
            let median = if observed.is_empty() {
                0.0
            } else {
                stats::median(&observed)
            };
            let column: Vec<f64> = rows.iter().map(|r| r[j].unwrap_or(median)).collect();
            medians.push(median);
            means.push(stats::mean(&column));
            stds.push(stats::population_std(&column).max(STD_FLOOR));
        }
        Self { medians, means, stds }
    }

    pub fn transform_row(&self, row: &[Option<f64>]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, v)| (v.unwrap_or(self.medians[j]) - self.means[j]) / self.stds[j])
            .collect()
    }

    pub fn transform(&self, rows: &[Vec<Option<f64>>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform_row(r)).collect()
    }
}
