use std::path::{Path, PathBuf};

use affectwear_core::features::{FeatureGroup, FeatureParams};
use affectwear_core::hrv::{BvpParams, FreqParams};
use affectwear_core::eda::EdaParams;
use affectwear_core::actigraphy::AccParams;
use affectwear_core::mlbench::{GridConfig, ModelKind};
use affectwear_core::session::{Label, ValidationPolicy};
use affectwear_core::synth::{ClassOffsets, CohortSpec, MANIFEST_FILE};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub data_root: PathBuf,
    /// Defaults to `<data_root>/manifest.csv`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
    pub out: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self {
            data_root: PathBuf::from("data"),
            manifest: None,
            out: PathBuf::from("out"),
        }
    }
}

impl PathsConfig {
    pub fn manifest_path(&self) -> PathBuf {
        self.manifest.clone().unwrap_or_else(|| self.data_root.join(MANIFEST_FILE))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DspConfig {
    pub bvp: BvpParams,
    pub hrv_freq: FreqParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturesConfig {
    pub eda: EdaParams,
    pub acc: AccParams,
}

/// Cohort shape for `synth`; the seed comes from `bench.seed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub n_unipolar: usize,
    pub n_bipolar: usize,
    pub duration_s: f64,
    pub offsets: ClassOffsets,
}

impl Default for SynthConfig {
    fn default() -> Self {
        let c = CohortSpec::default();
        Self {
            n_unipolar: c.n_unipolar,
            n_bipolar: c.n_bipolar,
            duration_s: c.duration_s,
            offsets: c.offsets,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub seed: u64,
    pub positive_class: Label,
    pub features: Vec<FeatureGroup>,
    pub models: Vec<ModelKind>,
    pub grid: GridConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            positive_class: Label::Bipolar,
            features: FeatureGroup::SELECTORS.to_vec(),
            models: ModelKind::ALL.to_vec(),
            grid: GridConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub paths: PathsConfig,
    pub dsp: DspConfig,
    pub features: FeaturesConfig,
    pub validation: ValidationPolicy,
    pub synth: SynthConfig,
    pub bench: BenchConfig,
}

fn check(ok: bool, msg: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(msg.to_string()))
    }
}

fn positive(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config is always serialisable")
    }

    pub fn feature_params(&self) -> FeatureParams {
        FeatureParams {
            bvp: self.dsp.bvp,
            hrv_freq: self.dsp.hrv_freq,
            eda: self.features.eda,
            acc: self.features.acc,
        }
    }

    pub fn cohort_spec(&self) -> CohortSpec {
        CohortSpec {
            seed: self.bench.seed,
            n_unipolar: self.synth.n_unipolar,
            n_bipolar: self.synth.n_bipolar,
            duration_s: self.synth.duration_s,
            offsets: self.synth.offsets,
        }
    }

    /// Range checks on every numeric parameter.
    pub fn validate(&self) -> CliResult<()> {
        let b = &self.dsp.bvp;
        check(positive(b.detrend_lambda), "dsp.bvp.detrend_lambda must be positive")?;
        check(
            positive(b.band_low_hz) && b.band_high_hz > b.band_low_hz && b.band_high_hz.is_finite(),
            "dsp.bvp band needs 0 < band_low_hz < band_high_hz",
        )?;
        check(b.filter_order >= 1, "dsp.bvp.filter_order must be at least 1")?;
        let f = &self.dsp.hrv_freq;
        check(positive(f.interp_rate_hz), "dsp.hrv_freq.interp_rate_hz must be positive")?;
        check(f.min_span_s >= 0.0, "dsp.hrv_freq.min_span_s must be non-negative")?;
        check(
            (0.0..1.0).contains(&f.welch.overlap_fraction),
            "dsp.hrv_freq.welch.overlap_fraction must be in [0, 1)",
        )?;
        check(
            f.welch.segment_len.is_none_or(|s| s >= 8),
            "dsp.hrv_freq.welch.segment_len must be at least 8",
        )?;
        let e = &self.features.eda;
        check(
            positive(e.tonic_cutoff_hz) && e.clean_cutoff_hz > e.tonic_cutoff_hz && e.clean_cutoff_hz.is_finite(),
            "features.eda cutoffs need 0 < tonic_cutoff_hz < clean_cutoff_hz",
        )?;
        check(e.clean_order >= 1 && e.tonic_order >= 1, "features.eda filter orders must be at least 1")?;
        check(e.scr_min_amplitude >= 0.0, "features.eda.scr_min_amplitude must be non-negative")?;
        check(e.min_duration_s >= 0.0, "features.eda.min_duration_s must be non-negative")?;
        let a = &self.features.acc;
        check(positive(a.lowpass_cutoff_hz), "features.acc.lowpass_cutoff_hz must be positive")?;
        check(a.lowpass_order >= 1, "features.acc.lowpass_order must be at least 1")?;
        check(a.inactivity_threshold >= 0.0, "features.acc.inactivity_threshold must be non-negative")?;
        let v = &self.validation;
        check(v.min_duration_seconds >= 0.0, "validation.min_duration_seconds must be non-negative")?;
        check(
            v.max_duration_skew_seconds >= 0.0,
            "validation.max_duration_skew_seconds must be non-negative",
        )?;
        let s = &self.synth;
        check(s.n_unipolar >= 1 && s.n_bipolar >= 1, "synth needs at least one subject per class")?;
        check(positive(s.duration_s), "synth.duration_s must be positive")?;
        check(!self.bench.features.is_empty(), "bench.features must not be empty")?;
        check(!self.bench.models.is_empty(), "bench.models must not be empty")?;
        self.bench.grid.validate().map_err(|m| CliError::Config(format!("bench.grid: {m}")))
    }
}
