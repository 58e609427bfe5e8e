use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::DspError;

/// One-sided power spectral density.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub freqs_hz: Vec<f64>,
    /// Density in signal units squared per Hz.
    pub power: Vec<f64>,
    pub resolution_hz: f64,
}

impl Spectrum {
    pub fn max_freq(&self) -> f64 {
        self.freqs_hz.last().copied().unwrap_or(0.0)
    }

    /// Integral of the whole spectrum.
    pub fn total_power(&self) -> f64 {
        trapezoid(&self.freqs_hz, &self.power)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WelchConfig {
    /// Segment length in samples; `None` means `min(256, len)`.
    pub segment_len: Option<usize>,
    pub overlap_fraction: f64,
    /// Remove each segment's mean before windowing.
    pub remove_segment_mean: bool,
}

impl Default for WelchConfig {
    fn default() -> Self {
        Self {
            segment_len: None,
            overlap_fraction: 0.5,
            remove_segment_mean: true,
        }
    }
}

pub const MIN_SEGMENT_LEN: usize = 8;

/// Welch's averaged periodogram with a periodic Hann window, one-sided and
/// density scaled.
pub fn welch_psd(
    signal: &[f64],
    sample_rate_hz: f64,
    config: &WelchConfig,
) -> Result<Spectrum, DspError> {
    let n = signal.len();
    let seg = config.segment_len.unwrap_or_else(|| n.min(256));
    if seg < MIN_SEGMENT_LEN || n < seg {
        return Err(DspError::SignalTooShort {
            required: seg.max(MIN_SEGMENT_LEN),
            actual: n,
        });
    }
    if !(0.0..1.0).contains(&config.overlap_fraction) {
        return Err(DspError::InvalidParameter(format!(
            "overlap fraction must be in [0, 1), got {}",
            config.overlap_fraction
        )));
    }
    if !(sample_rate_hz > 0.0) {
        return Err(DspError::InvalidParameter(format!(
            "sample rate must be positive, got {sample_rate_hz}"
        )));
    }

    let overlap = (config.overlap_fraction * seg as f64).floor() as usize;
    let step = (seg - overlap).max(1);
    let window: Vec<f64> = (0..seg)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / seg as f64).cos())
        .collect();
    let window_power: f64 = window.iter().map(|w| w * w).sum();
    let scale = 1.0 / (sample_rate_hz * window_power);

    let n_bins = seg / 2 + 1;
    let mut acc = vec![0.0; n_bins];
    let fft = FftPlanner::<f64>::new().plan_fft_forward(seg);
    let mut buf = vec![Complex::new(0.0, 0.0); seg];
    let mut n_segments = 0usize;
    let mut start = 0;
    while start + seg <= n {
        let chunk = &signal[start..start + seg];
        let offset = if config.remove_segment_mean {
            chunk.iter().sum::<f64>() / seg as f64
        } else {
            0.0
        };
        for ((b, x), w) in buf.iter_mut().zip(chunk).zip(&window) {
            *b = Complex::new((x - offset) * w, 0.0);
        }
        fft.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
        n_segments += 1;
        start += step;
    }

    let power: Vec<f64> = acc
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let one_sided = if k == 0 || (seg.is_multiple_of(2) && k == seg / 2) {
                1.0
            } else {
                2.0
            };
            p * scale * one_sided / n_segments as f64
        })
        .collect();
    let resolution_hz = sample_rate_hz / seg as f64;
    let freqs_hz = (0..n_bins).map(|k| k as f64 * resolution_hz).collect();
    Ok(Spectrum {
        freqs_hz,
        power,
        resolution_hz,
    })
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (ys[0] + ys[1]) * (xs[1] - xs[0]))
        .sum()
}

/// Area under the PSD between `lo_hz` and `hi_hz`, treating the spectrum
/// as piecewise linear between bins. Bands with no overlap yield 0.
pub fn band_power(spec: &Spectrum, lo_hz: f64, hi_hz: f64) -> Result<f64, DspError> {
    if !(lo_hz < hi_hz) || lo_hz < 0.0 {
        return Err(DspError::EmptyBand {
            lo: lo_hz,
            hi: hi_hz,
        });
    }
    let f = &spec.freqs_hz;
    let p = &spec.power;
    let mut area = 0.0;
    for i in 0..f.len().saturating_sub(1) {
        let (f0, f1) = (f[i], f[i + 1]);
        let a = lo_hz.max(f0);
        let b = hi_hz.min(f1);
        if b <= a {
            continue;
        }
        let interp = |x: f64| p[i] + (p[i + 1] - p[i]) * (x - f0) / (f1 - f0);
        area += 0.5 * (interp(a) + interp(b)) * (b - a);
    }
    Ok(area.max(0.0))
}

/// `|FFT(x)|` for bins `0..=len/2`, full length, no padding.
pub fn fft_magnitudes(signal: &[f64]) -> Vec<f64> {
    let n = signal.len();
    if n == 0 {
        return Vec::new();
    }
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut buf: Vec<Complex<f64>> = signal.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fft.process(&mut buf);
    buf.truncate(n / 2 + 1);
    buf.iter().map(|c| c.norm()).collect()
}
