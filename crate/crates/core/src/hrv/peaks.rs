use serde::{Deserialize, Serialize};

use super::HrvError;
use crate::stats;

/// Adaptive-threshold local-maximum detector settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PeakParams {
    /// A peak must exceed this multiple of the rolling RMS.
    pub threshold_factor: f64,
    pub rms_window_s: f64,
    pub refractory_s: f64,
}

impl Default for PeakParams {
    fn default() -> Self {
        Self {
            threshold_factor: 0.6,
            rms_window_s: 2.0,
            refractory_s: 0.3,
        }
    }
}

/// Systolic peak indices of a band-passed BVP signal.
///
/// A sample is a candidate when it is a local maximum above
/// `threshold_factor` times the centred rolling RMS. Candidates closer than
/// the refractory period to the previously accepted peak replace it only if
/// they are higher.
pub fn detect_pulse_peaks(
    signal: &[f64],
    sample_rate_hz: f64,
    params: &PeakParams,
) -> Result<Vec<usize>, HrvError> {
    let n = signal.len();
    if n < 3 {
        return Err(HrvError::NoPeaksFound);
    }
    let global_rms = (signal.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    if !(global_rms > 1e-12) {
        return Err(HrvError::NoPeaksFound);
    }

    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in signal {
        prefix.push(prefix.last().unwrap() + v * v);
    }
    let half = ((params.rms_window_s * sample_rate_hz / 2.0).round() as usize).max(1);
    let refractory = (params.refractory_s * sample_rate_hz).round() as usize;

    let mut peaks: Vec<usize> = Vec::new();
    for i in 1..n - 1 {
        let v = signal[i];
        if !(v > signal[i - 1] && v >= signal[i + 1]) {
            continue;
        }
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(n);
        let rms = ((prefix[hi] - prefix[lo]) / (hi - lo) as f64).sqrt();
        if v <= params.threshold_factor * rms {
            continue;
        }
        match peaks.last_mut() {
            Some(last) if i - *last < refractory => {
                if v > signal[*last] {
                    *last = i;
                }
            }
            _ => peaks.push(i),
        }
    }
    if peaks.is_empty() {
        return Err(HrvError::NoPeaksFound);
    }
    Ok(peaks)
}

/// Peak times in seconds with parabolic sub-sample interpolation.
pub fn refine_peak_times(signal: &[f64], peaks: &[usize], sample_rate_hz: f64) -> Vec<f64> {
    peaks
        .iter()
        .map(|&i| {
            let mut offset = 0.0;
            if i > 0 && i + 1 < signal.len() {
                let (a, b, c) = (signal[i - 1], signal[i], signal[i + 1]);
                let curvature = a - 2.0 * b + c;
                if curvature < 0.0 {
                    offset = (0.5 * (a - c) / curvature).clamp(-0.5, 0.5);
                }
            }
            (i as f64 + offset) / sample_rate_hz
        })
        .collect()
}

/// Rules for turning detected beats into normal-to-normal intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArtifactRules {
    pub min_interval_ms: f64,
    pub max_interval_ms: f64,
    /// Maximum relative deviation from the running median.
    pub max_deviation: f64,
    /// Number of previously accepted intervals in the running median.
    pub history: usize,
}

impl Default for ArtifactRules {
    fn default() -> Self {
        Self {
            min_interval_ms: 250.0,
            max_interval_ms: 2500.0,
            max_deviation: 0.3,
            history: 5,
        }
    }
}

/// Normal-to-normal interval series.
///
/// `peak_times_s` has one more entry than `intervals_ms`, and successive
/// differences reproduce the intervals. Where a rejected long interval was
/// dropped, the time axis is contracted (times are the cumulative sum of
/// accepted intervals from the first accepted beat).
#[derive(Debug, Clone, PartialEq)]
pub struct NNSeries {
    pub intervals_ms: Vec<f64>,
    pub peak_times_s: Vec<f64>,
}

impl NNSeries {
    /// Builds a series from intervals, starting the time axis at `start_s`.
    pub fn from_intervals(intervals_ms: Vec<f64>, start_s: f64) -> Self {
        let mut peak_times_s = Vec::with_capacity(intervals_ms.len() + 1);
        let mut t = start_s;
        peak_times_s.push(t);
        for iv in &intervals_ms {
            t += iv / 1000.0;
            peak_times_s.push(t);
        }
        Self {
            intervals_ms,
            peak_times_s,
        }
    }

    pub fn len(&self) -> usize {
        self.intervals_ms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals_ms.is_empty()
    }

    pub fn span_s(&self) -> f64 {
        match (self.peak_times_s.first(), self.peak_times_s.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }
}

/// NN series from integer peak indices.
pub fn peaks_to_nn(peaks: &[usize], sample_rate_hz: f64) -> Result<NNSeries, HrvError> {
    let times: Vec<f64> = peaks.iter().map(|&p| p as f64 / sample_rate_hz).collect();
    peak_times_to_nn(&times, &ArtifactRules::default())
}

/// NN series from ascending beat times.
///
/// An interval shorter than `min_interval_ms` or more than `max_deviation`
/// below the reference is an extra beat: the later peak is dropped and the
/// interval merges into the next one. An interval that is too long is
/// discarded and the series re-anchors on its closing beat. The reference is
/// the median of the last `history` accepted intervals, or of all in-range
/// raw intervals before anything has been accepted.
pub fn peak_times_to_nn(times_s: &[f64], rules: &ArtifactRules) -> Result<NNSeries, HrvError> {
    if times_s.len() < 3 {
        return Err(HrvError::TooFewIntervals {
            found: times_s.len().saturating_sub(1),
            required: 2,
        });
    }
    let in_range: Vec<f64> = times_s
        .windows(2)
        .map(|w| (w[1] - w[0]) * 1000.0)
        .filter(|iv| (rules.min_interval_ms..=rules.max_interval_ms).contains(iv))
        .collect();
    if in_range.is_empty() {
        return Err(HrvError::TooFewIntervals {
            found: 0,
            required: 2,
        });
    }
    let seed_reference = stats::median(&in_range);

    let mut accepted: Vec<f64> = Vec::new();
    let mut first_anchor: Option<f64> = None;
    let mut anchor = times_s[0];
    for &t in &times_s[1..] {
        let iv = (t - anchor) * 1000.0;
        let reference = if accepted.is_empty() {
            seed_reference
        } else {
            let from = accepted.len().saturating_sub(rules.history.max(1));
            stats::median(&accepted[from..])
        };
        if iv < rules.min_interval_ms || iv < reference * (1.0 - rules.max_deviation) {
            continue;
        }
        if iv > rules.max_interval_ms || iv > reference * (1.0 + rules.max_deviation) {
            anchor = t;
            continue;
        }
        first_anchor.get_or_insert(anchor);
        accepted.push(iv);
        anchor = t;
    }

    if accepted.len() < 2 {
        return Err(HrvError::TooFewIntervals {
            found: accepted.len(),
            required: 2,
        });
    }
    Ok(NNSeries::from_intervals(accepted, first_anchor.unwrap_or(times_s[0])))
}
