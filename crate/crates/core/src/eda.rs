//! Electrodermal activity: filter-based tonic/phasic split, skin-conductance
//! response detection and the per-session EDA feature set.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsp::{self, DspError, FilterBand};
use crate::session::SignalChannel;
use crate::stats;

pub const EDA_NAMES: [&str; 10] = [
    "EDA_Tonic_Mean",
    "EDA_Tonic_STD",
    "EDA_Tonic_Min",
    "EDA_Tonic_Max",
    "EDA_Phasic_Mean",
    "EDA_Phasic_STD",
    "EDA_Phasic_Min",
    "EDA_Phasic_Max",
    "SCR_Amplitude",
    "SCR_Onsets",
];

/// Longest onset-to-peak rise accepted as an SCR. Slower rises are the
/// tonic filter recovering after a response.
pub const MAX_RISE_S: f64 = 4.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EdaError {
    #[error("EDA too short: {duration_s:.1} s, need {required_s} s")]
    SignalTooShort { duration_s: f64, required_s: f64 },
    #[error(transparent)]
    Dsp(#[from] DspError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EdaParams {
    pub clean_cutoff_hz: f64,
    pub clean_order: usize,
    pub tonic_cutoff_hz: f64,
    pub tonic_order: usize,
    pub min_duration_s: f64,
    pub scr_min_amplitude: f64,
}

impl Default for EdaParams {
    fn default() -> Self {
        Self {
            clean_cutoff_hz: 1.0,
            clean_order: 4,
            tonic_cutoff_hz: 0.03,
            tonic_order: 2,
            min_duration_s: 20.0,
            scr_min_amplitude: 0.01,
        }
    }
}

/// `tonic + phasic` equals `cleaned` sample for sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EdaDecomposition {
    pub cleaned: Vec<f64>,
    pub tonic: Vec<f64>,
    pub phasic: Vec<f64>,
    pub sample_rate_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScrEvent {
    pub onset_index: usize,
    pub peak_index: usize,
    /// Phasic value at the peak minus phasic value at the onset (µS).
    pub amplitude: f64,
}

pub fn decompose_eda(eda: &SignalChannel, params: &EdaParams) -> Result<EdaDecomposition, EdaError> {
    decompose_samples(&eda.column(0), eda.sample_rate, params)
}

/// Cleaning low-pass, then zero-phase low-pass for the tonic level; the
/// phasic part is the remainder.
pub fn decompose_samples(
    raw: &[f64],
    sample_rate_hz: f64,
    params: &EdaParams,
) -> Result<EdaDecomposition, EdaError> {
    let duration_s = raw.len() as f64 / sample_rate_hz;
    if duration_s < params.min_duration_s {
        return Err(EdaError::SignalTooShort {
            duration_s,
            required_s: params.min_duration_s,
        });
    }
    let clean = dsp::design_butterworth(
        params.clean_order,
        FilterBand::LowPass(params.clean_cutoff_hz),
        sample_rate_hz,
    )?;
    let cleaned = dsp::filtfilt(&clean, raw)?;
    let tonic_filter = dsp::design_butterworth(
        params.tonic_order,
        FilterBand::LowPass(params.tonic_cutoff_hz),
        sample_rate_hz,
    )?;
    let tonic = dsp::filtfilt(&tonic_filter, &cleaned)?;
    let phasic = cleaned.iter().zip(&tonic).map(|(c, t)| c - t).collect();
    Ok(EdaDecomposition {
        cleaned,
        tonic,
        phasic,
        sample_rate_hz,
    })
}

/// Skin-conductance responses in the phasic signal.
///
/// Every local maximum above the tonic level (positive phasic value) is a
/// candidate peak. Its onset is the preceding local minimum, found by
/// walking back while the signal keeps falling. Events below
/// `min_amplitude` or rising for longer than [`MAX_RISE_S`] are dropped.
pub fn detect_scr(decomp: &EdaDecomposition, min_amplitude: f64) -> Vec<ScrEvent> {
    let x = &decomp.phasic;
    let mut events = Vec::new();
    if x.len() < 3 {
        return events;
    }
    for peak in 1..x.len() - 1 {
        if !(x[peak] > x[peak - 1] && x[peak] >= x[peak + 1]) {
            continue;
        }
        if x[peak] <= 0.0 {
            continue;
        }
        let mut onset = peak;
        while onset > 0 && x[onset - 1] < x[onset] {
            onset -= 1;
        }
        let amplitude = x[peak] - x[onset];
        let rise_s = (peak - onset) as f64 / decomp.sample_rate_hz;
        if onset < peak && rise_s <= MAX_RISE_S && amplitude >= min_amplitude {
            events.push(ScrEvent {
                onset_index: onset,
                peak_index: peak,
                amplitude,
            });
        }
    }
    events.sort_by_key(|e| e.onset_index);
    events
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdaFeatures {
    pub tonic_mean: f64,
    pub tonic_std: f64,
    pub tonic_min: f64,
    pub tonic_max: f64,
    pub phasic_mean: f64,
    pub phasic_std: f64,
    pub phasic_min: f64,
    pub phasic_max: f64,
    /// Mean event amplitude, 0 without events.
    pub scr_amplitude: f64,
    /// Event count.
    pub scr_onsets: f64,
}

impl EdaFeatures {
    pub fn values(&self) -> [Option<f64>; 10] {
        [
            self.tonic_mean,
            self.tonic_std,
            self.tonic_min,
            self.tonic_max,
            self.phasic_mean,
            self.phasic_std,
            self.phasic_min,
            self.phasic_max,
            self.scr_amplitude,
            self.scr_onsets,
        ]
        .map(Some)
    }
}

pub fn eda_features(decomp: &EdaDecomposition, events: &[ScrEvent]) -> EdaFeatures {
    let scr_amplitude = if events.is_empty() {
        0.0
    } else {
        events.iter().map(|e| e.amplitude).sum::<f64>() / events.len() as f64
    };
    EdaFeatures {
        tonic_mean: stats::mean(&decomp.tonic),
        tonic_std: stats::sample_std(&decomp.tonic),
        tonic_min: stats::min(&decomp.tonic),
        tonic_max: stats::max(&decomp.tonic),
        phasic_mean: stats::mean(&decomp.phasic),
        phasic_std: stats::sample_std(&decomp.phasic),
        phasic_min: stats::min(&decomp.phasic),
        phasic_max: stats::max(&decomp.phasic),
        scr_amplitude,
        scr_onsets: events.len() as f64,
    }
}

/// Decomposition, detection and features in one call.
pub fn extract_eda(eda: &SignalChannel, params: &EdaParams) -> Result<EdaFeatures, EdaError> {
    let decomp = decompose_eda(eda, params)?;
    let events = detect_scr(&decomp, params.scr_min_amplitude);
    Ok(eda_features(&decomp, &events))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: f64 = 4.0;

    /// Bi-exponential response with unit peak, zero before `onset_s`.
    fn bump(t: f64, onset_s: f64) -> f64 {
        let (rise, decay) = (1.0f64, 4.0f64);
        let t_peak = (decay / rise).ln() * rise * decay / (decay - rise);
        let norm = (-t_peak / decay).exp() - (-t_peak / rise).exp();
        let s = t - onset_s;
        if s <= 0.0 {
            0.0
        } else {
            ((-s / decay).exp() - (-s / rise).exp()) / norm
        }
    }

    fn signal(secs: f64, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let n = (secs * FS) as usize;
        (0..n).map(|i| f(i as f64 / FS)).collect()
    }

    fn rms(v: &[f64]) -> f64 {
        (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
    }

    #[test]
    fn constant_baseline() {
        let d = decompose_samples(&signal(60.0, |_| 2.0), FS, &EdaParams::default()).unwrap();
        assert!(d.tonic.iter().all(|t| (t - 2.0).abs() < 1e-6));
        assert!(d.phasic.iter().all(|p| p.abs() < 1e-6));
        let f = eda_features(&d, &detect_scr(&d, 0.01));
        assert!((f.tonic_mean - 2.0).abs() < 1e-9);
        assert!(f.tonic_std < 1e-6);
        assert_eq!(f.scr_amplitude, 0.0);
        assert_eq!(f.scr_onsets, 0.0);
    }

    #[test]
    fn slow_ramp_is_tonic() {
        let raw = signal(120.0, |t| 1.0 + t / 120.0);
        let d = decompose_samples(&raw, FS, &EdaParams::default()).unwrap();
        assert!(rms(&d.phasic) < 0.02 * rms(&raw), "{}", rms(&d.phasic) / rms(&raw));
    }

    #[test]
    fn reconstruction_is_exact() {
        let raw = signal(60.0, |t| 2.0 + 0.3 * bump(t, 20.0) + 0.01 * (3.0 * t).sin());
        let d = decompose_samples(&raw, FS, &EdaParams::default()).unwrap();
        for ((t, p), c) in d.tonic.iter().zip(&d.phasic).zip(&d.cleaned) {
            assert!((t + p - c).abs() < 1e-9);
        }
    }

    #[test]
    fn single_bump_recovered() {
        let raw = signal(120.0, |t| 1.0 + t / 120.0 + 0.5 * bump(t, 50.0));
        let d = decompose_samples(&raw, FS, &EdaParams::default()).unwrap();
        let ev = detect_scr(&d, 0.01);
        assert_eq!(ev.len(), 1, "{ev:?}");
        assert!((ev[0].amplitude - 0.5).abs() < 0.05, "{ev:?}");
        assert!((ev[0].onset_index as f64 / FS - 50.0).abs() <= 1.0, "{ev:?}");
    }

    #[test]
    fn two_bumps_in_order() {
        let raw = signal(120.0, |t| 2.0 + 0.4 * bump(t, 40.0) + 0.4 * bump(t, 50.0));
        let d = decompose_samples(&raw, FS, &EdaParams::default()).unwrap();
        let ev = detect_scr(&d, 0.01);
        assert_eq!(ev.len(), 2, "{ev:?}");
        assert!(ev[0].onset_index < ev[1].onset_index);
    }

    #[test]
    fn mean_amplitude_of_three() {
        let raw = signal(180.0, |t| {
            2.0 + 0.2 * bump(t, 30.0) + 0.4 * bump(t, 80.0) + 0.6 * bump(t, 130.0)
        });
        let d = decompose_samples(&raw, FS, &EdaParams::default()).unwrap();
        let ev = detect_scr(&d, 0.01);
        let f = eda_features(&d, &ev);
        assert_eq!(f.scr_onsets, 3.0, "{ev:?}");
        assert!((f.scr_amplitude - 0.4).abs() < 0.04, "{}", f.scr_amplitude);
    }

    #[test]
    fn too_short() {
        assert!(matches!(
            decompose_samples(&[1.0; 40], FS, &EdaParams::default()),
            Err(EdaError::SignalTooShort { .. })
        ));
    }
}
