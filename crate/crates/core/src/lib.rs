//! Signal processing, feature extraction and a leave-one-out classification
//! benchmark for separating unipolar from bipolar depression using
//! wrist-wearable recordings (BVP, EDA, 3-axis ACC, skin temperature).

// `!(x > 0.0)` is used on purpose so NaN parameters are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod actigraphy;
pub mod dsp;
pub mod eda;
pub mod features;
pub mod hrv;
pub mod mlbench;
pub mod session;
pub mod stats;
pub mod synth;
pub mod thermo;
