//! Skin-temperature features.

use thiserror::Error;

use crate::session::SignalChannel;
use crate::stats;

pub const TEMP_NAMES: [&str; 7] = [
    "TEMP_mean",
    "TEMP_max",
    "TEMP_min",
    "TEMP_std",
    "TEMP_range",
    "TEMP_trend",
    "TEMP_energy",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TempError {
    #[error("TEMP needs at least 2 samples, got {0}")]
    SignalTooShort(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TempFeatures {
    pub mean: f64,
    pub max: f64,
    pub min: f64,
    pub std: f64,
    pub range: f64,
    /// OLS slope in °C per second.
    pub trend: f64,
    /// Sum of squared deviations from the mean.
    pub energy: f64,
}

impl TempFeatures {
    pub fn values(&self) -> [Option<f64>; 7] {
        [
            self.mean,
            self.max,
            self.min,
            self.std,
            self.range,
            self.trend,
            self.energy,
        ]
        .map(Some)
    }
}

pub fn temp_features(temp: &SignalChannel) -> Result<TempFeatures, TempError> {
    temp_features_from_samples(&temp.column(0), temp.sample_rate)
}

pub fn temp_features_from_samples(samples: &[f64], sample_rate_hz: f64) -> Result<TempFeatures, TempError> {
    if samples.len() < 2 {
        return Err(TempError::SignalTooShort(samples.len()));
    }
    let mean = stats::mean(samples);
    let max = stats::max(samples);
    let min = stats::min(samples);
    let t: Vec<f64> = (0..samples.len()).map(|i| i as f64 / sample_rate_hz).collect();
    Ok(TempFeatures {
        mean,
        max,
        min,
        std: stats::sample_std(samples),
        range: max - min,
        trend: stats::ols_slope(&t, samples),
        energy: samples.iter().map(|v| (v - mean) * (v - mean)).sum(),
    })
}
