use super::DspError;

pub const DEFAULT_DETREND_LAMBDA: f64 = 500.0;

/// Smoothness-priors detrending.
///
/// The trend is `(I + lambda^2 D'D)^-1 x` with `D` the second-difference
/// operator; the returned signal is `x - trend`. The system matrix is
/// pentadiagonal and solved with a banded Cholesky factorisation.
/// Because `D'D` annihilates constants the output always has zero mean.
pub fn detrend(signal: &[f64], lambda: f64) -> Result<Vec<f64>, DspError> {
    let n = signal.len();
    if n < 3 {
        return Err(DspError::SignalTooShort {
            required: 3,
            actual: n,
        });
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(DspError::InvalidParameter(format!(
            "detrend lambda must be positive, got {lambda}"
        )));
    }
    let trend = solve_smoothness_system(signal, lambda * lambda);
    Ok(signal.iter().zip(&trend).map(|(x, t)| x - t).collect())
}

fn solve_smoothness_system(rhs: &[f64], weight: f64) -> Vec<f64> {
    let n = rhs.len();
    // Band storage of A = I + w D'D: diag[i] = A[i][i], off1[i] = A[i][i-1],
    // off2[i] = A[i][i-2].
    let mut diag = vec![1.0; n];
    let mut off1 = vec![0.0; n];
    let mut off2 = vec![0.0; n];
    const STENCIL: [f64; 3] = [1.0, -2.0, 1.0];
    for r in 0..n - 2 {
        #[allow(clippy::needless_range_loop)]
        for i in 0..3 {
            diag[r + i] += weight * STENCIL[i] * STENCIL[i];
            for j in 0..i {
                let v = weight * STENCIL[i] * STENCIL[j];
                match i - j {
                    1 => off1[r + i] += v,
                    _ => off2[r + i] += v,
                }
            }
        }
    }

    let mut l0 = vec![0.0; n];
    let mut l1 = vec![0.0; n];
    let mut l2 = vec![0.0; n];
    for i in 0..n {
        if i >= 2 {
            l2[i] = off2[i] / l0[i - 2];
        }
        if i >= 1 {
            let carry = if i >= 2 { l2[i] * l1[i - 1] } else { 0.0 };
            l1[i] = (off1[i] - carry) / l0[i - 1];
        }
        l0[i] = (diag[i] - l1[i] * l1[i] - l2[i] * l2[i]).sqrt();
    }

    // L y = rhs
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut acc = rhs[i];
        if i >= 1 {
            acc -= l1[i] * y[i - 1];
        }
        if i >= 2 {
            acc -= l2[i] * y[i - 2];
        }
        y[i] = acc / l0[i];
    }
    // L' x = y
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        if i + 1 < n {
            acc -= l1[i + 1] * x[i + 1];
        }
        if i + 2 < n {
            acc -= l2[i + 2] * x[i + 2];
        }
        x[i] = acc / l0[i];
    }
    x
}
