//! Synthetic labelled sessions with known ground truth, written in the same
//! on-disk layout as real recordings.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::session::{
    self, ChannelKind, Label, ManifestEntry, Session, SessionError, SignalChannel,
};

pub const BVP_RATE_HZ: f64 = 64.0;
pub const EDA_RATE_HZ: f64 = 4.0;
pub const ACC_RATE_HZ: f64 = 32.0;
pub const TEMP_RATE_HZ: f64 = 4.0;

/// SCR rise and decay time constants in seconds.
pub const SCR_RISE_S: f64 = 1.0;
pub const SCR_DECAY_S: f64 = 4.0;

pub const MANIFEST_FILE: &str = "manifest.csv";

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeartSpec {
    pub rate_bpm: f64,
    /// Sinusoidal NN modulation frequency.
    pub modulation_freq_hz: f64,
    pub modulation_depth_ms: f64,
    /// Pulse amplitude in raw BVP units.
    pub pulse_amplitude: f64,
    pub noise_std: f64,
}

impl Default for HeartSpec {
    fn default() -> Self {
        Self {
            rate_bpm: 70.0,
            modulation_freq_hz: 0.25,
            modulation_depth_ms: 40.0,
            pulse_amplitude: 50.0,
            noise_std: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScrSpec {
    pub onset_s: f64,
    pub amplitude_us: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EdaSpec {
    pub baseline_us: f64,
    /// Linear tonic drift in µS per second.
    pub drift_us_per_s: f64,
    pub scr_events: Vec<ScrSpec>,
    pub noise_std: f64,
}

impl Default for EdaSpec {
    fn default() -> Self {
        Self {
            baseline_us: 2.0,
            drift_us_per_s: 0.002,
            scr_events: Vec::new(),
            noise_std: 0.001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AccMotionSpec {
    pub dominant_freq_hz: f64,
    /// Sinusoid amplitude on x; must stay below `offset`.
    pub amplitude: f64,
    /// Constant level on x while moving, so the magnitude keeps the
    /// sinusoid's frequency rather than its rectified double.
    pub offset: f64,
    /// Fraction of the x sinusoid leaking onto y.
    pub leakage: f64,
    pub inactive_fraction: f64,
    pub noise_std: f64,
}

impl Default for AccMotionSpec {
    fn default() -> Self {
        Self {
            dominant_freq_hz: 1.0,
            amplitude: 0.8,
            offset: 1.0,
            leakage: 0.3,
            inactive_fraction: 0.15,
            noise_std: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TempSpec {
    pub baseline_c: f64,
    pub trend_c_per_s: f64,
    pub noise_std: f64,
}

impl Default for TempSpec {
    fn default() -> Self {
        Self {
            baseline_c: 33.0,
            trend_c_per_s: 0.0,
            noise_std: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub seed: u64,
    pub subject_id: String,
    pub label: Label,
    pub start_time: i64,
    pub duration_s: f64,
    pub heart: HeartSpec,
    pub eda: EdaSpec,
    pub acc: AccMotionSpec,
    pub temp: TempSpec,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            subject_id: "S01".to_string(),
            label: Label::Unipolar,
            start_time: 1_581_246_953,
            duration_s: 300.0,
            heart: HeartSpec::default(),
            eda: EdaSpec::default(),
            acc: AccMotionSpec::default(),
            temp: TempSpec::default(),
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |msg: &str| Err(SynthError::InvalidSpec(msg.to_string()));
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return bad("duration must be positive");
        }
        if self.subject_id.trim().is_empty() || self.subject_id.contains([',', '/', '\\']) {
            return bad("subject id must be non-empty without separators");
        }
        let h = &self.heart;
        if !(h.rate_bpm > 0.0) {
            return bad("heart rate must be positive");
        }
        if h.modulation_depth_ms < 0.0 || h.modulation_depth_ms >= 60_000.0 / h.rate_bpm / 2.0 {
            return bad("modulation depth must be in [0, half the mean interval)");
        }
        let a = &self.acc;
        if !(0.0..=1.0).contains(&a.inactive_fraction) {
            return bad("inactive fraction must be in [0, 1]");
        }
        if a.amplitude < 0.0 || a.offset < 0.0 || a.leakage < 0.0 {
            return bad("ACC amplitudes must be non-negative");
        }
        if !(a.dominant_freq_hz > 0.0 && a.dominant_freq_hz < ACC_RATE_HZ / 2.0) {
            return bad("ACC frequency must be below Nyquist");
        }
        if self.eda.scr_events.iter().any(|e| e.amplitude_us < 0.0) {
            return bad("SCR amplitudes must be non-negative");
        }
        let noises = [h.noise_std, self.eda.noise_std, a.noise_std, self.temp.noise_std];
        if noises.iter().any(|v| !(*v >= 0.0)) || h.pulse_amplitude < 0.0 {
            return bad("noise levels and amplitudes must be non-negative");
        }
        Ok(())
    }
}

/// Values the generator put in, for comparison with extracted features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub beat_times_s: Vec<f64>,
    pub scr_events: Vec<ScrSpec>,
    pub acc_dominant_freq_hz: f64,
    /// Start and end of the inactive ACC segment in seconds.
    pub acc_inactive_span_s: (f64, f64),
    pub temp_trend_c_per_s: f64,
}

/// Deterministic given `spec` (including its seed).
pub fn generate_session(spec: &SynthSpec) -> Result<(Session, GroundTruth), SynthError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (bvp, beat_times_s) = bvp_channel(spec, &mut rng);
    let eda = eda_channel(spec, &mut rng);
    let (acc, inactive) = acc_channel(spec, &mut rng);
    let temp = temp_channel(spec, &mut rng);
    let session = Session {
        subject_id: spec.subject_id.clone(),
        label: spec.label,
        bvp,
        eda,
        acc,
        temp,
    };
    let truth = GroundTruth {
        beat_times_s,
        scr_events: spec.eda.scr_events.clone(),
        acc_dominant_freq_hz: spec.acc.dominant_freq_hz,
        acc_inactive_span_s: inactive,
        temp_trend_c_per_s: spec.temp.trend_c_per_s,
    };
    Ok((session, truth))
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn sample_count(duration_s: f64, rate: f64) -> usize {
    (duration_s * rate).round().max(1.0) as usize
}

/// Beat times whose intervals follow `60/bpm + depth·sin(2πft)`, first beat
/// half an interval in.
pub fn beat_times(heart: &HeartSpec, duration_s: f64) -> Vec<f64> {
    let mean_s = 60.0 / heart.rate_bpm;
    let mut t = mean_s / 2.0;
    let mut times = Vec::new();
    while t < duration_s {
        times.push(t);
        let iv = mean_s
            + heart.modulation_depth_ms / 1000.0 * (2.0 * PI * heart.modulation_freq_hz * t).sin();
        t += iv;
    }
    times
}

fn bvp_channel(spec: &SynthSpec, rng: &mut ChaCha8Rng) -> (SignalChannel, Vec<f64>) {
    let h = &spec.heart;
    let n = sample_count(spec.duration_s, BVP_RATE_HZ);
    let beats = beat_times(h, spec.duration_s);
    // raised-cosine systolic pulse of this half-width
    let half_width = 0.25 * 60.0 / h.rate_bpm;
    let mut x = vec![0.0; n];
    for &tb in &beats {
        let lo = ((tb - half_width) * BVP_RATE_HZ).ceil().max(0.0) as usize;
        let hi = (((tb + half_width) * BVP_RATE_HZ).floor() as usize).min(n.saturating_sub(1));
        for (i, v) in x.iter_mut().enumerate().take(hi + 1).skip(lo) {
            let u = (i as f64 / BVP_RATE_HZ - tb) / half_width;
            if u.abs() < 1.0 {
                *v += h.pulse_amplitude * 0.5 * (1.0 + (PI * u).cos());
            }
        }
    }
    for v in &mut x {
        *v += h.noise_std * gauss(rng);
    }
    (
        SignalChannel::new(ChannelKind::Bvp, spec.start_time, BVP_RATE_HZ, x),
        beats,
    )
}

/// Bi-exponential SCR shape with unit peak, zero before onset.
pub fn scr_shape(t_since_onset_s: f64) -> f64 {
    if t_since_onset_s <= 0.0 {
        return 0.0;
    }
    let (r, d) = (SCR_RISE_S, SCR_DECAY_S);
    let t_peak = (d / r).ln() * r * d / (d - r);
    let norm = (-t_peak / d).exp() - (-t_peak / r).exp();
    ((-t_since_onset_s / d).exp() - (-t_since_onset_s / r).exp()) / norm
}

fn eda_channel(spec: &SynthSpec, rng: &mut ChaCha8Rng) -> SignalChannel {
    let e = &spec.eda;
    let n = sample_count(spec.duration_s, EDA_RATE_HZ);
    let x = (0..n)
        .map(|i| {
            let t = i as f64 / EDA_RATE_HZ;
            let scr: f64 = e
                .scr_events
                .iter()
                .map(|s| s.amplitude_us * scr_shape(t - s.onset_s))
                .sum();
            e.baseline_us + e.drift_us_per_s * t + scr + e.noise_std * gauss(rng)
        })
        .collect();
    SignalChannel::new(ChannelKind::Eda, spec.start_time, EDA_RATE_HZ, x)
}

fn acc_channel(spec: &SynthSpec, rng: &mut ChaCha8Rng) -> (SignalChannel, (f64, f64)) {
    let a = &spec.acc;
    let n = sample_count(spec.duration_s, ACC_RATE_HZ);
    let rest_len = (a.inactive_fraction * n as f64).round() as usize;
    let rest_start = if rest_len < n {
        rng.random_range(0..=n - rest_len)
    } else {
        0
    };
    let phase = rng.random_range(0.0..2.0 * PI);
    let (mut x, mut y, mut z) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        let resting = i >= rest_start && i < rest_start + rest_len;
        if !resting {
            let s = a.amplitude * (2.0 * PI * a.dominant_freq_hz * i as f64 / ACC_RATE_HZ + phase).sin();
            x[i] = a.offset + s;
            y[i] = a.leakage * s;
        }
        x[i] += a.noise_std * gauss(rng);
        y[i] += a.noise_std * gauss(rng);
        z[i] += a.noise_std * gauss(rng);
    }
    let span = (
        rest_start as f64 / ACC_RATE_HZ,
        (rest_start + rest_len) as f64 / ACC_RATE_HZ,
    );
    (
        SignalChannel::from_axes(spec.start_time, ACC_RATE_HZ, &x, &y, &z),
        span,
    )
}

fn temp_channel(spec: &SynthSpec, rng: &mut ChaCha8Rng) -> SignalChannel {
    let t = &spec.temp;
    let n = sample_count(spec.duration_s, TEMP_RATE_HZ);
    let x = (0..n)
        .map(|i| {
            let time = i as f64 / TEMP_RATE_HZ;
            t.baseline_c + t.trend_c_per_s * time + t.noise_std * gauss(rng)
        })
        .collect();
    SignalChannel::new(ChannelKind::Temp, spec.start_time, TEMP_RATE_HZ, x)
}

/// Mean shifts applied to the bipolar class. All zero gives two classes
/// drawn from the same distribution.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassOffsets {
    pub acc_freq_hz: f64,
    pub acc_amplitude: f64,
    pub acc_inactive_fraction: f64,
    pub temp_trend_c_per_s: f64,
    pub heart_rate_bpm: f64,
    pub hrv_depth_ms: f64,
    pub scr_amplitude_us: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CohortSpec {
    pub seed: u64,
    pub n_unipolar: usize,
    pub n_bipolar: usize,
    pub duration_s: f64,
    pub offsets: ClassOffsets,
}

impl Default for CohortSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            n_unipolar: 13,
            n_bipolar: 18,
            duration_s: 300.0,
            offsets: ClassOffsets::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CohortMember {
    pub spec: SynthSpec,
    pub session: Session,
    pub truth: GroundTruth,
}

/// Per-subject specs for a cohort: labels in a seeded shuffled order, ids
/// `P01, P02, ...`, parameters jittered around shared class means.
pub fn cohort_specs(cohort: &CohortSpec) -> Result<Vec<SynthSpec>, SynthError> {
    if cohort.n_unipolar == 0 || cohort.n_bipolar == 0 {
        return Err(SynthError::InvalidSpec("each class needs at least one subject".into()));
    }
    if !(cohort.duration_s > 0.0) {
        return Err(SynthError::InvalidSpec("duration must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cohort.seed);
    let total = cohort.n_unipolar + cohort.n_bipolar;
    let mut labels: Vec<Label> = (0..total)
        .map(|i| if i < cohort.n_unipolar { Label::Unipolar } else { Label::Bipolar })
        .collect();
    for i in (1..total).rev() {
        let j = rng.random_range(0..=i);
        labels.swap(i, j);
    }
    let width = total.to_string().len().max(2);
    let o = &cohort.offsets;
    let mut specs = Vec::with_capacity(total);
    for (idx, label) in labels.into_iter().enumerate() {
        let k = if label == Label::Bipolar { 1.0 } else { 0.0 };
        let mut jitter = |half: f64| rng.random_range(-half..=half);
        let heart = HeartSpec {
            rate_bpm: 70.0 + k * o.heart_rate_bpm + jitter(8.0),
            modulation_freq_hz: 0.18 + jitter(0.12),
            modulation_depth_ms: (35.0 + k * o.hrv_depth_ms + jitter(15.0)).max(0.0),
            ..HeartSpec::default()
        };
        let acc = AccMotionSpec {
            dominant_freq_hz: 1.0 + k * o.acc_freq_hz + jitter(0.2),
            amplitude: (0.7 + k * o.acc_amplitude + jitter(0.1)).clamp(0.0, 0.95),
            inactive_fraction: (0.12 + k * o.acc_inactive_fraction + jitter(0.06)).clamp(0.0, 1.0),
            ..AccMotionSpec::default()
        };
        let temp = TempSpec {
            baseline_c: 33.0 + jitter(1.0),
            trend_c_per_s: k * o.temp_trend_c_per_s + jitter(2e-4),
            ..TempSpec::default()
        };
        let scr_mean = 0.3 + k * o.scr_amplitude_us;
        let mut scr_events = Vec::new();
        let mut t = 10.0 + jitter(5.0).abs();
        while t < cohort.duration_s - 15.0 {
            scr_events.push(ScrSpec {
                onset_s: t,
                amplitude_us: (scr_mean + jitter(0.15)).max(0.05),
            });
            t += 25.0 + jitter(10.0);
        }
        let eda = EdaSpec {
            baseline_us: 2.0 + jitter(1.0),
            drift_us_per_s: jitter(0.003),
            scr_events,
            ..EdaSpec::default()
        };
        specs.push(SynthSpec {
            seed: rng.random(),
            subject_id: format!("P{:0width$}", idx + 1),
            label,
            duration_s: cohort.duration_s,
            heart,
            eda,
            acc,
            temp,
            ..SynthSpec::default()
        });
    }
    Ok(specs)
}

/// Generates every cohort member in memory.
pub fn generate_cohort_sessions(cohort: &CohortSpec) -> Result<Vec<CohortMember>, SynthError> {
    cohort_specs(cohort)?
        .into_iter()
        .map(|spec| {
            let (session, truth) = generate_session(&spec)?;
            Ok(CohortMember { spec, session, truth })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CohortOnDisk {
    pub manifest_path: PathBuf,
    pub entries: Vec<ManifestEntry>,
}

/// Writes `<root>/<subject_id>/*.csv` for every member and
/// `<root>/manifest.csv`.
pub fn generate_cohort(root: &Path, cohort: &CohortSpec) -> Result<CohortOnDisk, SynthError> {
    let members = generate_cohort_sessions(cohort)?;
    std::fs::create_dir_all(root).map_err(|source| SynthError::Io {
        path: root.to_path_buf(),
        source,
    })?;
    let mut entries = Vec::with_capacity(members.len());
    for m in &members {
        session::write_session(&root.join(&m.session.subject_id), &m.session)?;
        entries.push(ManifestEntry {
            subject_id: m.session.subject_id.clone(),
            label: m.session.label,
        });
    }
    let manifest_path = root.join(MANIFEST_FILE);
    std::fs::write(&manifest_path, session::write_manifest(&entries)).map_err(|source| {
        SynthError::Io {
            path: manifest_path.clone(),
            source,
        }
    })?;
    Ok(CohortOnDisk {
        manifest_path,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::{validate_session, ValidationPolicy};

    #[test]
    fn deterministic() {
        let spec = SynthSpec {
            seed: 7,
            ..SynthSpec::default()
        };
        let (a, _) = generate_session(&spec).unwrap();
        let (b, _) = generate_session(&spec).unwrap();
        assert_eq!(a, b);
        let other = SynthSpec { seed: 8, ..spec };
        assert_ne!(generate_session(&other).unwrap().0, a);
    }

    #[test]
    fn channel_rates_and_lengths() {
        let (s, _) = generate_session(&SynthSpec {
            duration_s: 60.0,
            ..SynthSpec::default()
        })
        .unwrap();
        assert_eq!(s.bvp.len(), 3840);
        assert_eq!(s.eda.len(), 240);
        assert_eq!(s.acc.len(), 1920);
        assert_eq!(s.acc.width(), 3);
        assert_eq!(s.temp.len(), 240);
    }

    #[test]
    fn beat_count_follows_rate() {
        let h = HeartSpec {
            rate_bpm: 60.0,
            ..HeartSpec::default()
        };
        assert_eq!(beat_times(&h, 60.0).len(), 60);
    }

    #[test]
    fn scr_shape_peaks_at_one() {
        let peak = (0..4000).map(|i| scr_shape(i as f64 * 0.005)).fold(0.0, f64::max);
        assert!((peak - 1.0).abs() < 1e-5);
        assert_eq!(scr_shape(-1.0), 0.0);
    }

    #[test]
    fn invalid_specs() {
        let mut s = SynthSpec::default();
        s.acc.inactive_fraction = 1.5;
        assert!(matches!(generate_session(&s), Err(SynthError::InvalidSpec(_))));
        let s = SynthSpec {
            duration_s: 0.0,
            ..SynthSpec::default()
        };
        assert!(generate_session(&s).is_err());
    }

    #[test]
    fn cohort_sessions_validate() {
        let cohort = CohortSpec {
            duration_s: 90.0,
            ..CohortSpec::default()
        };
        let members = generate_cohort_sessions(&cohort).unwrap();
        assert_eq!(members.len(), 31);
        let bipolar = members.iter().filter(|m| m.session.label == Label::Bipolar).count();
        assert_eq!(bipolar, 18);
        for m in &members {
            let r = validate_session(&m.session, &ValidationPolicy::default());
            assert!(r.is_ok(), "{:?}", r.reasons);
        }
    }
}
