//! Heart-rate variability from BVP: pulse-peak detection, NN-interval
//! construction with artifact rejection, and time/frequency-domain indices.

mod freq;
mod peaks;
mod time;

pub use freq::{hrv_freq_features, FreqParams, HrvFreqFeatures, HRV_FREQ_NAMES};
pub use peaks::{
    detect_pulse_peaks, peak_times_to_nn, peaks_to_nn, refine_peak_times, ArtifactRules, NNSeries,
    PeakParams,
};
pub use time::{hrv_time_features, HrvTimeFeatures, HISTOGRAM_BIN_MS, HRV_TIME_NAMES};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsp::{self, DspError, FilterBand};
use crate::session::SignalChannel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HrvError {
    #[error("no pulse peaks found")]
    NoPeaksFound,
    #[error("too few NN intervals: {found} (need at least {required})")]
    TooFewIntervals { found: usize, required: usize },
    #[error("NN series spans {span_s:.1} s; need at least {required_s} s")]
    SpanTooShort { span_s: f64, required_s: f64 },
    #[error(transparent)]
    Dsp(#[from] DspError),
}

/// BVP conditioning applied before peak detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BvpParams {
    pub detrend_lambda: f64,
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    pub filter_order: usize,
    pub peaks: PeakParams,
    pub artifacts: ArtifactRules,
}

impl Default for BvpParams {
    fn default() -> Self {
        Self {
            detrend_lambda: dsp::DEFAULT_DETREND_LAMBDA,
            band_low_hz: 0.7,
            band_high_hz: 3.5,
            filter_order: 2,
            peaks: PeakParams::default(),
            artifacts: ArtifactRules::default(),
        }
    }
}

/// Detrend and band-pass a raw BVP channel.
pub fn condition_bvp(bvp: &SignalChannel, params: &BvpParams) -> Result<Vec<f64>, HrvError> {
    let raw = bvp.column(0);
    let detrended = dsp::detrend(&raw, params.detrend_lambda)?;
    let design = dsp::design_butterworth(
        params.filter_order,
        FilterBand::BandPass(params.band_low_hz, params.band_high_hz),
        bvp.sample_rate,
    )?;
    Ok(dsp::filtfilt(&design, &detrended)?)
}

/// Raw BVP channel to NN series: conditioning, peak detection, sub-sample
/// peak refinement, artifact rejection.
pub fn bvp_to_nn(bvp: &SignalChannel, params: &BvpParams) -> Result<NNSeries, HrvError> {
    let filtered = condition_bvp(bvp, params)?;
    let peaks = detect_pulse_peaks(&filtered, bvp.sample_rate, &params.peaks)?;
    let times = refine_peak_times(&filtered, &peaks, bvp.sample_rate);
    peak_times_to_nn(&times, &params.artifacts)
}
