//! Numeric kernels shared by the feature extractors: smoothness-priors
//! detrending, Butterworth design with zero-phase application, Welch PSD
//! with band integration, and Pearson correlation.

mod correlation;
mod detrend;
mod filter;
mod spectral;

pub use correlation::pearson_corr;
pub use detrend::{detrend, DEFAULT_DETREND_LAMBDA};
pub use filter::{design_butterworth, filtfilt, FilterBand, FilterDesign, Section};
pub use spectral::{band_power, fft_magnitudes, welch_psd, Spectrum, WelchConfig};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DspError {
    #[error("signal too short: need at least {required} samples, got {actual}")]
    SignalTooShort { required: usize, actual: usize },
    #[error("invalid cutoff: {0}")]
    InvalidCutoff(String),
    #[error("invalid filter order {0}; must be at least 1")]
    InvalidOrder(usize),
    #[error("invalid band: low edge {lo} must be below high edge {hi}")]
    EmptyBand { lo: f64, hi: f64 },
    #[error("input has zero variance; correlation undefined")]
    ConstantInput,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
