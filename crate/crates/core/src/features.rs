//! Per-session feature extraction across all signal families, and the
//! feature-group selectors used to build classification inputs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::actigraphy::{self, AccParams, ACC_NAMES};
use crate::eda::{self, EdaParams, EDA_NAMES};
use crate::hrv::{self, BvpParams, FreqParams, HRV_FREQ_NAMES, HRV_TIME_NAMES};
use crate::session::Session;
use crate::thermo::{self, TEMP_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    HrvTime,
    HrvFreq,
    Eda,
    Acc,
    Temp,
    All,
}

impl FeatureGroup {
    pub const SELECTORS: [FeatureGroup; 6] = [
        FeatureGroup::HrvTime,
        FeatureGroup::HrvFreq,
        FeatureGroup::Eda,
        FeatureGroup::Acc,
        FeatureGroup::Temp,
        FeatureGroup::All,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureGroup::HrvTime => "hrv_time",
            FeatureGroup::HrvFreq => "hrv_freq",
            FeatureGroup::Eda => "eda",
            FeatureGroup::Acc => "acc",
            FeatureGroup::Temp => "temp",
            FeatureGroup::All => "all",
        }
    }

    /// Column names in definition order.
    pub fn names(self) -> Vec<&'static str> {
        match self {
            FeatureGroup::HrvTime => HRV_TIME_NAMES.to_vec(),
            FeatureGroup::HrvFreq => HRV_FREQ_NAMES.to_vec(),
            FeatureGroup::Eda => EDA_NAMES.to_vec(),
            FeatureGroup::Acc => ACC_NAMES.to_vec(),
            FeatureGroup::Temp => TEMP_NAMES.to_vec(),
            FeatureGroup::All => all_feature_names(),
        }
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        FeatureGroup::SELECTORS
            .into_iter()
            .find(|g| g.as_str() == lower)
            .ok_or_else(|| format!("unknown feature group '{s}'"))
    }
}

/// All 59 column names: HRV time, HRV frequency, EDA, ACC, TEMP.
pub fn all_feature_names() -> Vec<&'static str> {
    HRV_TIME_NAMES
        .iter()
        .chain(&HRV_FREQ_NAMES)
        .chain(&EDA_NAMES)
        .chain(&ACC_NAMES)
        .chain(&TEMP_NAMES)
        .copied()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureParams {
    pub bvp: BvpParams,
    pub hrv_freq: FreqParams,
    pub eda: EdaParams,
    pub acc: AccParams,
}

/// Ordered feature values; `None` marks an absent value.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub names: Vec<&'static str>,
    pub values: Vec<Option<f64>>,
}

impl FeatureVector {
    /// Name to value map, for building classifier inputs.
    pub fn to_map(&self) -> BTreeMap<String, Option<f64>> {
        self.names
            .iter()
            .map(|n| n.to_string())
            .zip(self.values.iter().copied())
            .collect()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| *n == name)
            .and_then(|i| self.values[i])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Extracts the full 59-column feature vector. A family that cannot be
/// computed (too few beats, short channel) contributes absent values and
/// a log warning instead of failing the session.
pub fn extract_session_features(session: &Session, params: &FeatureParams) -> FeatureVector {
    let id = &session.subject_id;
    let mut values: Vec<Option<f64>> = Vec::with_capacity(59);

    match hrv::bvp_to_nn(&session.bvp, &params.bvp) {
        Ok(nn) => {
            match hrv::hrv_time_features(&nn) {
                Ok(f) => values.extend(f.values()),
                Err(e) => {
                    warn!("{id}: HRV time features absent: {e}");
                    values.extend([None; 23]);
                }
            }
            match hrv::hrv_freq_features(&nn, &params.hrv_freq) {
                Ok(f) => values.extend(f.values()),
                Err(e) => {
                    warn!("{id}: HRV frequency features absent: {e}");
                    values.extend([None; 9]);
                }
            }
        }
        Err(e) => {
            warn!("{id}: HRV features absent: {e}");
            values.extend([None; 32]);
        }
    }
    match eda::extract_eda(&session.eda, &params.eda) {
        Ok(f) => values.extend(f.values()),
        Err(e) => {
            warn!("{id}: EDA features absent: {e}");
            values.extend([None; 10]);
        }
    }
    match actigraphy::extract_acc(&session.acc, &params.acc) {
        Ok(f) => values.extend(f.values()),
        Err(e) => {
            warn!("{id}: ACC features absent: {e}");
            values.extend([None; 10]);
        }
    }
    match thermo::temp_features(&session.temp) {
        Ok(f) => values.extend(f.values()),
        Err(e) => {
            warn!("{id}: TEMP features absent: {e}");
            values.extend([None; 7]);
        }
    }
    FeatureVector {
        names: all_feature_names(),
        values,
    }
}
