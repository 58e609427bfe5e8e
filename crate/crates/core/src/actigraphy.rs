//! Physical-activity features from the 3-axis accelerometer.

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsp::{self, DspError, FilterBand};
use crate::session::SignalChannel;
use crate::stats;

pub const ACC_NAMES: [&str; 10] = [
    "ACC_Mean",
    "ACC_Max",
    "ACC_Min",
    "ACC_STD",
    "ACC_Energy",
    "ACC_Dominant_frequency",
    "ACC_Inactivity_time",
    "Symmetry_x_y",
    "Symmetry_y_z",
    "Symmetry_x_z",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AccError {
    #[error("ACC too short: {duration_s:.2} s, need {required_s} s")]
    SignalTooShort { duration_s: f64, required_s: f64 },
    #[error("axis lengths differ: {0:?}")]
    LengthMismatch([usize; 3]),
    #[error("ACC channel must have 3 axes, found {0}")]
    NotThreeAxes(usize),
    #[error(transparent)]
    Dsp(#[from] DspError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AccParams {
    pub lowpass_cutoff_hz: f64,
    pub lowpass_order: usize,
    /// Magnitude below which a sample counts as inactive.
    pub inactivity_threshold: f64,
    pub min_duration_s: f64,
}

impl Default for AccParams {
    fn default() -> Self {
        Self {
            lowpass_cutoff_hz: 10.0,
            lowpass_order: 5,
            inactivity_threshold: 0.12,
            min_duration_s: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccFeatures {
    pub mean: f64,
    pub max: f64,
    pub min: f64,
    pub std: f64,
    pub energy: f64,
    pub dominant_frequency_hz: f64,
    pub inactivity_time_s: f64,
    pub symmetry_xy: f64,
    pub symmetry_yz: f64,
    pub symmetry_xz: f64,
}

impl AccFeatures {
    pub fn values(&self) -> [Option<f64>; 10] {
        [
            self.mean,
            self.max,
            self.min,
            self.std,
            self.energy,
            self.dominant_frequency_hz,
            self.inactivity_time_s,
            self.symmetry_xy,
            self.symmetry_yz,
            self.symmetry_xz,
        ]
        .map(Some)
    }
}

/// Euclidean norm per sample.
pub fn acc_magnitude(x: &[f64], y: &[f64], z: &[f64]) -> Result<Vec<f64>, AccError> {
    if x.len() != y.len() || y.len() != z.len() {
        return Err(AccError::LengthMismatch([x.len(), y.len(), z.len()]));
    }
    Ok(x.iter()
        .zip(y)
        .zip(z)
        .map(|((a, b), c)| (a * a + b * b + c * c).sqrt())
        .collect())
}

/// Zero-phase Butterworth low-pass applied to each axis.
pub fn lowpass_axes(acc: &SignalChannel, params: &AccParams) -> Result<[Vec<f64>; 3], AccError> {
    if acc.width() != 3 {
        return Err(AccError::NotThreeAxes(acc.width()));
    }
    check_duration(acc.len(), acc.sample_rate, params.min_duration_s)?;
    let design = dsp::design_butterworth(
        params.lowpass_order,
        FilterBand::LowPass(params.lowpass_cutoff_hz),
        acc.sample_rate,
    )?;
    Ok([
        dsp::filtfilt(&design, &acc.column(0))?,
        dsp::filtfilt(&design, &acc.column(1))?,
        dsp::filtfilt(&design, &acc.column(2))?,
    ])
}

/// Features of an already low-passed accelerometer channel.
pub fn acc_features(acc: &SignalChannel, inactivity_threshold: f64) -> Result<AccFeatures, AccError> {
    if acc.width() != 3 {
        return Err(AccError::NotThreeAxes(acc.width()));
    }
    features_from_axes(
        &acc.column(0),
        &acc.column(1),
        &acc.column(2),
        acc.sample_rate,
        inactivity_threshold,
        AccParams::default().min_duration_s,
    )
}

/// Low-pass then features.
pub fn extract_acc(acc: &SignalChannel, params: &AccParams) -> Result<AccFeatures, AccError> {
    let [x, y, z] = lowpass_axes(acc, params)?;
    features_from_axes(
        &x,
        &y,
        &z,
        acc.sample_rate,
        params.inactivity_threshold,
        params.min_duration_s,
    )
}

pub fn features_from_axes(
    x: &[f64],
    y: &[f64],
    z: &[f64],
    sample_rate_hz: f64,
    inactivity_threshold: f64,
    min_duration_s: f64,
) -> Result<AccFeatures, AccError> {
    let m = acc_magnitude(x, y, z)?;
    check_duration(m.len(), sample_rate_hz, min_duration_s)?;
    let n = m.len() as f64;
    let inactive = m.iter().filter(|&&v| v < inactivity_threshold).count();
    Ok(AccFeatures {
        mean: stats::mean(&m),
        max: stats::max(&m),
        min: stats::min(&m),
        std: stats::sample_std(&m),
        energy: m.iter().map(|v| v * v).sum::<f64>() / n,
        dominant_frequency_hz: dominant_frequency(&m, sample_rate_hz),
        inactivity_time_s: inactive as f64 / sample_rate_hz,
        symmetry_xy: symmetry(x, y, "x", "y"),
        symmetry_yz: symmetry(y, z, "y", "z"),
        symmetry_xz: symmetry(x, z, "x", "z"),
    })
}

/// Frequency of the largest FFT magnitude among the non-DC bins of the
/// mean-removed signal; the lowest such bin wins ties.
pub fn dominant_frequency(signal: &[f64], sample_rate_hz: f64) -> f64 {
    let n = signal.len();
    if n < 2 {
        return 0.0;
    }
    let mean = stats::mean(signal);
    let centred: Vec<f64> = signal.iter().map(|v| v - mean).collect();
    let mags = dsp::fft_magnitudes(&centred);
    let mut best = 1;
    for k in 2..mags.len() {
        if mags[k] > mags[best] {
            best = k;
        }
    }
    best as f64 * sample_rate_hz / n as f64
}

fn symmetry(a: &[f64], b: &[f64], an: &str, bn: &str) -> f64 {
    match dsp::pearson_corr(a, b) {
        Ok(r) => r.abs().min(1.0),
        Err(e) => {
            warn!("symmetry {an}-{bn} set to 0: {e}");
            0.0
        }
    }
}

fn check_duration(len: usize, fs: f64, required_s: f64) -> Result<(), AccError> {
    let duration_s = len as f64 / fs;
    if duration_s < required_s {
        return Err(AccError::SignalTooShort {
            duration_s,
            required_s,
        });
    }
    Ok(())
}
