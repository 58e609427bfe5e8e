use super::{HrvError, NNSeries};
use crate::stats;

/// Histogram bin width for HTI and TINN (1/128 s).
pub const HISTOGRAM_BIN_MS: f64 = 7.8125;

const MAD_NORMAL_CONSISTENCY: f64 = 1.4826;

/// Column names in emission order.
pub const HRV_TIME_NAMES: [&str; 23] = [
    "HRV_MeanNN",
    "HRV_SDNN",
    "HRV_SDANN1",
    "HRV_SDANN2",
    "HRV_SDNNI1",
    "HRV_SDNNI2",
    "HRV_RMSSD",
    "HRV_SDRMSSD",
    "HRV_SDSD",
    "HRV_CVNN",
    "HRV_MCVNN",
    "HRV_CVSD",
    "HRV_IQRNN",
    "HRV_MinNN",
    "HRV_MaxNN",
    "HRV_MedianNN",
    "HRV_MADNN",
    "HRV_HTI",
    "HRV_TINN",
    "HRV_pNN50",
    "HRV_pNN20",
    "HRV_Prc20NN",
    "HRV_Prc80NN",
];

/// Time-domain HRV indices, in milliseconds unless noted. `None` marks a
/// value that is undefined for the given series (too few windows, zero
/// RMSSD, a single successive difference).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HrvTimeFeatures {
    pub mean_nn: f64,
    pub sdnn: f64,
    pub sdann1: Option<f64>,
    pub sdann2: Option<f64>,
    pub sdnni1: Option<f64>,
    pub sdnni2: Option<f64>,
    pub rmssd: f64,
    /// SDNN / RMSSD (dimensionless).
    pub sdrmssd: Option<f64>,
    pub sdsd: Option<f64>,
    pub cvnn: f64,
    /// MADNN / MedianNN.
    pub mcvnn: f64,
    pub cvsd: f64,
    pub iqrnn: f64,
    pub min_nn: f64,
    pub max_nn: f64,
    pub median_nn: f64,
    pub madnn: f64,
    pub hti: f64,
    pub tinn: f64,
    /// Percent.
    pub pnn50: f64,
    /// Percent.
    pub pnn20: f64,
    pub prc20nn: f64,
    pub prc80nn: f64,
}

impl HrvTimeFeatures {
    /// Values in [`HRV_TIME_NAMES`] order.
    pub fn values(&self) -> [Option<f64>; 23] {
        [
            Some(self.mean_nn),
            Some(self.sdnn),
            self.sdann1,
            self.sdann2,
            self.sdnni1,
            self.sdnni2,
            Some(self.rmssd),
            self.sdrmssd,
            self.sdsd,
            Some(self.cvnn),
            Some(self.mcvnn),
            Some(self.cvsd),
            Some(self.iqrnn),
            Some(self.min_nn),
            Some(self.max_nn),
            Some(self.median_nn),
            Some(self.madnn),
            Some(self.hti),
            Some(self.tinn),
            Some(self.pnn50),
            Some(self.pnn20),
            Some(self.prc20nn),
            Some(self.prc80nn),
        ]
    }
}

pub fn hrv_time_features(nn: &NNSeries) -> Result<HrvTimeFeatures, HrvError> {
    let x = &nn.intervals_ms;
    if x.len() < 2 {
        return Err(HrvError::TooFewIntervals {
            found: x.len(),
            required: 2,
        });
    }
    let mut sorted = x.clone();
    sorted.sort_by(f64::total_cmp);

    let mean_nn = stats::mean(x);
    let sdnn = stats::sample_std(x);
    let diffs: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let rmssd = (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64).sqrt();
    let sdsd = (diffs.len() >= 2).then(|| stats::sample_std(&diffs));
    let median_nn = stats::percentile_sorted(&sorted, 50.0);
    let abs_dev: Vec<f64> = x.iter().map(|v| (v - median_nn).abs()).collect();
    let madnn = MAD_NORMAL_CONSISTENCY * stats::median(&abs_dev);
    let pnn = |threshold: f64| {
        100.0 * diffs.iter().filter(|d| d.abs() > threshold).count() as f64 / diffs.len() as f64
    };
    let (sdann1, sdnni1) = window_indices(nn, 1.0);
    let (sdann2, sdnni2) = window_indices(nn, 2.0);
    let histogram = Histogram::new(x, HISTOGRAM_BIN_MS);

    Ok(HrvTimeFeatures {
        mean_nn,
        sdnn,
        sdann1,
        sdann2,
        sdnni1,
        sdnni2,
        rmssd,
        sdrmssd: (rmssd > 0.0).then(|| sdnn / rmssd),
        sdsd,
        cvnn: sdnn / mean_nn,
        mcvnn: madnn / median_nn,
        cvsd: rmssd / mean_nn,
        iqrnn: stats::percentile_sorted(&sorted, 75.0) - stats::percentile_sorted(&sorted, 25.0),
        min_nn: sorted[0],
        max_nn: sorted[sorted.len() - 1],
        median_nn,
        madnn,
        hti: x.len() as f64 / histogram.max_count() as f64,
        tinn: histogram.triangular_base_width(),
        pnn50: pnn(50.0),
        pnn20: pnn(20.0),
        prc20nn: stats::percentile_sorted(&sorted, 20.0),
        prc80nn: stats::percentile_sorted(&sorted, 80.0),
    })
}

/// SDANN and SDNNI over non-overlapping windows of `minutes`. Intervals are
/// assigned by their start time relative to the first beat; only complete
/// windows count, and at least two are needed.
fn window_indices(nn: &NNSeries, minutes: f64) -> (Option<f64>, Option<f64>) {
    let window_s = 60.0 * minutes;
    let origin = nn.peak_times_s[0];
    let complete = ((nn.span_s() / window_s) + 1e-9).floor() as usize;
    if complete < 2 {
        return (None, None);
    }
    let mut windows: Vec<Vec<f64>> = vec![Vec::new(); complete];
    for (iv, start) in nn.intervals_ms.iter().zip(&nn.peak_times_s) {
        let w = ((start - origin) / window_s + 1e-12).floor() as usize;
        if w < complete {
            windows[w].push(*iv);
        }
    }
    let means: Vec<f64> = windows
        .iter()
        .filter(|w| !w.is_empty())
        .map(|w| stats::mean(w))
        .collect();
    let stds: Vec<f64> = windows
        .iter()
        .filter(|w| w.len() >= 2)
        .map(|w| stats::sample_std(w))
        .collect();
    let sdann = (means.len() >= 2).then(|| stats::sample_std(&means));
    let sdnni = (!stds.is_empty()).then(|| stats::mean(&stds));
    (sdann, sdnni)
}

/// Fixed-width histogram anchored at the series minimum.
struct Histogram {
    counts: Vec<usize>,
    bin_width: f64,
}

impl Histogram {
    fn new(values: &[f64], bin_width: f64) -> Self {
        let lo = stats::min(values);
        let hi = stats::max(values);
        let n_bins = ((hi - lo) / bin_width).floor() as usize + 1;
        let mut counts = vec![0usize; n_bins];
        for v in values {
            let b = (((v - lo) / bin_width).floor() as usize).min(n_bins - 1);
            counts[b] += 1;
        }
        Self { counts, bin_width }
    }

    fn max_count(&self) -> usize {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Base width `M - N` of the triangle (zero at bin positions `N` and
    /// `M`, apex at the modal bin) that minimises the squared error against
    /// the histogram. `N` and `M` may sit one bin beyond either end.
    fn triangular_base_width(&self) -> f64 {
        let h = &self.counts;
        let nb = h.len() as isize;
        let peak = h
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i as isize)
            .unwrap_or(0);
        let apex = h[peak as usize] as f64;

        let mut best = (f64::INFINITY, 0isize, 0isize);
        for n in -1..peak {
            for m in (peak + 1)..=nb {
                let mut err = 0.0;
                for (j, &count) in h.iter().enumerate() {
                    let j = j as isize;
                    let q = if j <= n || j >= m {
                        0.0
                    } else if j <= peak {
                        apex * (j - n) as f64 / (peak - n) as f64
                    } else {
                        apex * (m - j) as f64 / (m - peak) as f64
                    };
                    let d = count as f64 - q;
                    err += d * d;
                }
                if err < best.0 {
                    best = (err, n, m);
                }
            }
        }
        (best.2 - best.1) as f64 * self.bin_width
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(v: &[f64]) -> NNSeries {
        NNSeries::from_intervals(v.to_vec(), 0.0)
    }

    #[test]
    fn constant_series() {
        let f = hrv_time_features(&series(&[800.0; 10])).unwrap();
        assert_eq!(f.mean_nn, 800.0);
        assert_eq!(f.sdnn, 0.0);
        assert_eq!(f.rmssd, 0.0);
        assert_eq!(f.pnn50, 0.0);
        assert_eq!(f.cvnn, 0.0);
        assert_eq!(f.sdrmssd, None);
        assert_eq!(f.hti, 1.0);
        assert_eq!(f.tinn, 2.0 * HISTOGRAM_BIN_MS);
    }

    #[test]
    fn alternating_series() {
        let f = hrv_time_features(&series(&[800.0, 860.0, 800.0, 860.0, 800.0, 860.0])).unwrap();
        assert!((f.rmssd - 60.0).abs() < 1e-12);
        assert_eq!(f.pnn50, 100.0);
        assert_eq!(f.pnn20, 100.0);
        assert_eq!(f.median_nn, 830.0);
    }

    #[test]
    fn three_values() {
        let f = hrv_time_features(&series(&[700.0, 800.0, 900.0])).unwrap();
        assert_eq!(f.min_nn, 700.0);
        assert_eq!(f.max_nn, 900.0);
        assert!((f.iqrnn - 100.0).abs() < 1e-12);
        assert!((f.prc20nn - 740.0).abs() < 1e-12);
        assert!(f.sdann1.is_none() && f.sdnni2.is_none());
    }

    #[test]
    fn windows_need_two_complete_minutes() {
        let short = hrv_time_features(&series(&vec![1000.0; 119])).unwrap();
        assert!(short.sdann1.is_none());
        // 90 s at 1000 ms then 90 s at 500 ms -> 1-min windows: 60x1000,
        // 30x1000 + 60x500, 120x500 (last 60 s incomplete-free: 180 s total)
        let mut v = vec![1000.0; 90];
        v.extend(vec![500.0; 180]);
        let f = hrv_time_features(&series(&v)).unwrap();
        let means = [1000.0, (30.0 * 1000.0 + 60.0 * 500.0) / 90.0, 500.0];
        assert!((f.sdann1.unwrap() - stats::sample_std(&means)).abs() < 1e-9);
        assert!(f.sdann2.is_none());
    }

    #[test]
    fn single_interval_rejected() {
        assert!(hrv_time_features(&series(&[800.0])).is_err());
        let two = hrv_time_features(&series(&[800.0, 900.0])).unwrap();
        assert!(two.sdsd.is_none());
    }
}
