/// k-nearest-neighbour vote under Euclidean distance.
#[derive(Debug, Clone, PartialEq)]
pub struct Knn {
    pub k: usize,
    x: Vec<Vec<f64>>,
    y: Vec<u8>,
}

impl Knn {
    pub fn fit(x: &[Vec<f64>], y: &[u8], k: usize) -> Self {
        Self {
            k: k.max(1),
            x: x.to_vec(),
            y: y.to_vec(),
        }
    }

    /// Equal distances are ordered by training index; a tied vote goes to
    /// class 0.
    pub fn predict(&self, q: &[f64]) -> u8 {
        let mut d: Vec<(f64, usize)> = self
            .x
            .iter()
            .enumerate()
            .map(|(i, row)| (row.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let k = self.k.min(d.len());
        let ones = d[..k].iter().filter(|(_, i)| self.y[*i] == 1).count();
        u8::from(2 * ones > k)
    }
}
