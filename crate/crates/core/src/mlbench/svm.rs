use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

pub const SMO_TOLERANCE: f64 = 1e-3;
const MAX_ITER: usize = 100_000;
const TAU: f64 = 1e-12;

/// Soft-margin SVM trained by SMO with maximal-violating-pair selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Svm {
    kernel: Kernel,
    support: Vec<Vec<f64>>,
    /// `alpha_i * y_i` for each support vector.
    coef: Vec<f64>,
    rho: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl Svm {
    pub fn fit(x: &[Vec<f64>], y: &[u8], c: f64, kernel: Kernel) -> Self {
        let n = x.len();
        let ys: Vec<f64> = y.iter().map(|&v| if v == 1 { 1.0 } else { -1.0 }).collect();
        let q: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| ys[i] * ys[j] * kernel.eval(&x[i], &x[j])).collect())
            .collect();
        let mut alpha = vec![0.0; n];
        let mut grad = vec![-1.0; n];
        let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
        let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

        let mut iterations = 0;
        let mut converged = false;
        while iterations < MAX_ITER {
            let mut i = None;
            let mut gmax = f64::NEG_INFINITY;
            let mut j = None;
            let mut gmin = f64::INFINITY;
            for t in 0..n {
                let v = -ys[t] * grad[t];
                if in_up(alpha[t], ys[t]) && v > gmax {
                    gmax = v;
                    i = Some(t);
                }
                if in_low(alpha[t], ys[t]) && v < gmin {
                    gmin = v;
                    j = Some(t);
                }
            }
            let (Some(i), Some(j)) = (i, j) else {
                converged = true;
                break;
            };
            if gmax - gmin < SMO_TOLERANCE {
                converged = true;
                break;
            }
            iterations += 1;
            let (ai_old, aj_old) = (alpha[i], alpha[j]);
            if ys[i] != ys[j] {
                let quad = (q[i][i] + q[j][j] + 2.0 * q[i][j]).max(TAU);
                let delta = (-grad[i] - grad[j]) / quad;
                let diff = alpha[i] - alpha[j];
                alpha[i] += delta;
                alpha[j] += delta;
                if diff > 0.0 {
                    if alpha[j] < 0.0 {
                        alpha[j] = 0.0;
                        alpha[i] = diff;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = -diff;
                }
                if diff > 0.0 {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = c - diff;
                    }
                } else if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = c + diff;
                }
            } else {
                let quad = (q[i][i] + q[j][j] - 2.0 * q[i][j]).max(TAU);
                let delta = (grad[i] - grad[j]) / quad;
                let sum = alpha[i] + alpha[j];
                alpha[i] -= delta;
                alpha[j] += delta;
                if sum > c {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = sum - c;
                    }
                } else if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if sum > c {
                    if alpha[j] > c {
                        alpha[j] = c;
                        alpha[i] = sum - c;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
            let (di, dj) = (alpha[i] - ai_old, alpha[j] - aj_old);
            for t in 0..n {
                grad[t] += q[t][i] * di + q[t][j] * dj;
            }
        }

        // offset from free vectors, else the midpoint of the feasible range
        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut free, mut free_sum) = (0usize, 0.0);
        for t in 0..n {
            let yg = ys[t] * grad[t];
            if alpha[t] >= c {
                if ys[t] < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if alpha[t] <= 0.0 {
                if ys[t] > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                free += 1;
                free_sum += yg;
            }
        }
        let rho = if free > 0 {
            free_sum / free as f64
        } else {
            (ub + lb) / 2.0
        };

        let mut support = Vec::new();
        let mut coef = Vec::new();
        for t in 0..n {
            if alpha[t] > 0.0 {
                support.push(x[t].clone());
                coef.push(alpha[t] * ys[t]);
            }
        }
        Self {
            kernel,
            support,
            coef,
            rho,
            iterations,
            converged,
        }
    }

    pub fn decision(&self, q: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(&self.coef)
            .map(|(s, a)| a * self.kernel.eval(s, q))
            .sum::<f64>()
            - self.rho
    }

    pub fn predict(&self, q: &[f64]) -> u8 {
        u8::from(self.decision(q) > 0.0)
    }

    pub fn n_support(&self) -> usize {
        self.support.len()
    }
}
