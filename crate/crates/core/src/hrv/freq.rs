use serde::{Deserialize, Serialize};

use super::{HrvError, NNSeries};
use crate::dsp::{self, Spectrum, WelchConfig};

pub const HRV_FREQ_NAMES: [&str; 9] = [
    "HRV_TP",
    "HRV_VLF",
    "HRV_LF",
    "HRV_HF",
    "HRV_VHF",
    "HRV_LFHF",
    "HRV_LFn",
    "HRV_HFn",
    "HRV_LnHF",
];

const VLF_BAND: (f64, f64) = (0.0033, 0.04);
const LF_BAND: (f64, f64) = (0.04, 0.15);
const HF_BAND: (f64, f64) = (0.15, 0.4);
/// Floor applied to HF before the logarithm, and below which HF counts as
/// zero for the LF/HF ratio.
const HF_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FreqParams {
    pub interp_rate_hz: f64,
    pub min_span_s: f64,
    pub welch: WelchConfig,
}

impl Default for FreqParams {
    fn default() -> Self {
        Self {
            interp_rate_hz: 4.0,
            min_span_s: 30.0,
            welch: WelchConfig::default(),
        }
    }
}

/// Band powers in ms^2; ratios dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HrvFreqFeatures {
    pub tp: f64,
    pub vlf: f64,
    pub lf: f64,
    pub hf: f64,
    pub vhf: f64,
    pub lf_hf_ratio: Option<f64>,
    pub lfn: f64,
    pub hfn: f64,
    pub ln_hf: f64,
}

impl HrvFreqFeatures {
    pub fn values(&self) -> [Option<f64>; 9] {
        [
            Some(self.tp),
            Some(self.vlf),
            Some(self.lf),
            Some(self.hf),
            Some(self.vhf),
            self.lf_hf_ratio,
            Some(self.lfn),
            Some(self.hfn),
            Some(self.ln_hf),
        ]
    }
}

/// NN tachogram resampled on a uniform grid: each interval is placed at the
/// time of the beat that closes it, then a clamped cubic spline (zero end
/// slopes) is sampled at `rate_hz` and the mean removed.
pub fn resample_tachogram(nn: &NNSeries, rate_hz: f64) -> Vec<f64> {
    let knots_t = &nn.peak_times_s[1..];
    let knots_v = &nn.intervals_ms;
    let spline = ClampedSpline::new(knots_t, knots_v);
    let t0 = knots_t[0];
    let span = knots_t[knots_t.len() - 1] - t0;
    let n = (span * rate_hz + 1e-9).floor() as usize + 1;
    let mut out: Vec<f64> = (0..n).map(|k| spline.eval(t0 + k as f64 / rate_hz)).collect();
    let mean = out.iter().sum::<f64>() / n as f64;
    out.iter_mut().for_each(|v| *v -= mean);
    out
}

pub fn hrv_freq_features(nn: &NNSeries, params: &FreqParams) -> Result<HrvFreqFeatures, HrvError> {
    if nn.len() < 2 {
        return Err(HrvError::TooFewIntervals {
            found: nn.len(),
            required: 2,
        });
    }
    let span = nn.span_s();
    if span < params.min_span_s {
        return Err(HrvError::SpanTooShort {
            span_s: span,
            required_s: params.min_span_s,
        });
    }
    let series = resample_tachogram(nn, params.interp_rate_hz);
    let spectrum = dsp::welch_psd(&series, params.interp_rate_hz, &params.welch)?;
    Ok(features_from_spectrum(&spectrum))
}

fn power_in(spec: &Spectrum, band: (f64, f64)) -> f64 {
    let hi = band.1.min(spec.max_freq());
    if band.0 >= hi {
        return 0.0;
    }
    dsp::band_power(spec, band.0, hi).unwrap_or(0.0)
}

fn features_from_spectrum(spec: &Spectrum) -> HrvFreqFeatures {
    let nyquist = spec.max_freq();
    let vlf = power_in(spec, VLF_BAND);
    let lf = power_in(spec, LF_BAND);
    let hf = power_in(spec, HF_BAND);
    let vhf = power_in(spec, (HF_BAND.1, nyquist));
    let tp = power_in(spec, (VLF_BAND.0, nyquist));
    let norm = |p: f64| if tp > 0.0 { p / tp } else { 0.0 };
    HrvFreqFeatures {
        tp,
        vlf,
        lf,
        hf,
        vhf,
        lf_hf_ratio: (hf >= HF_FLOOR).then(|| lf / hf),
        lfn: norm(lf),
        hfn: norm(hf),
        ln_hf: hf.max(HF_FLOOR).ln(),
    }
}

/// Cubic spline with first derivative fixed to zero at both ends.
struct ClampedSpline<'a> {
    x: &'a [f64],
    y: &'a [f64],
    m: Vec<f64>,
}

impl<'a> ClampedSpline<'a> {
    fn new(x: &'a [f64], y: &'a [f64]) -> Self {
        let n = x.len();
        if n < 2 {
            return Self { x, y, m: vec![0.0; n] };
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let slope: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        // Tridiagonal system for the second derivatives.
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = 2.0 * h[0];
        sup[0] = h[0];
        rhs[0] = 6.0 * slope[0];
        for i in 1..n - 1 {
            sub[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * (slope[i] - slope[i - 1]);
        }
        sub[n - 1] = h[n - 2];
        diag[n - 1] = 2.0 * h[n - 2];
        rhs[n - 1] = -6.0 * slope[n - 2];

        for i in 1..n {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
        }
        Self { x, y, m }
    }

    fn eval(&self, t: f64) -> f64 {
        let (x, y, m) = (self.x, self.y, &self.m);
        let n = x.len();
        if n == 1 || t <= x[0] {
            return y[0];
        }
        if t >= x[n - 1] {
            return y[n - 1];
        }
        let i = x.partition_point(|&v| v <= t).saturating_sub(1).min(n - 2);
        let h = x[i + 1] - x[i];
        let a = (x[i + 1] - t) / h;
        let b = (t - x[i]) / h;
        a * y[i] + b * y[i + 1] + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0
    }
}
