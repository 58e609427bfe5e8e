//! Digital Butterworth design (bilinear transform with pre-warping) as a
//! cascade of second-order sections, plus forward-backward filtering.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::DspError;

/// Pass band of a Butterworth design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FilterBand {
    LowPass(f64),
    BandPass(f64, f64),
}

impl FilterBand {
    pub fn cutoffs_hz(&self) -> Vec<f64> {
        match *self {
            FilterBand::LowPass(fc) => vec![fc],
            FilterBand::BandPass(lo, hi) => vec![lo, hi],
        }
    }
}

/// One biquad: `b0 + b1 z^-1 + b2 z^-2` over `1 + a1 z^-1 + a2 z^-2`.
/// `a[0]` is always 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Section {
    fn response(&self, z_inv: Complex64) -> Complex64 {
        let z2 = z_inv * z_inv;
        let num = self.b[0] + z_inv * self.b[1] + z2 * self.b[2];
        let den = self.a[0] + z_inv * self.a[1] + z2 * self.a[2];
        num / den
    }

    /// Roots of the denominator polynomial in `z`.
    pub fn poles(&self) -> Vec<Complex64> {
        let (a1, a2) = (self.a[1], self.a[2]);
        if a2 == 0.0 {
            return vec![Complex64::new(-a1, 0.0)];
        }
        let disc = Complex64::new(a1 * a1 - 4.0 * a2, 0.0).sqrt();
        vec![(-a1 + disc) / 2.0, (-a1 - disc) / 2.0]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterDesign {
    pub order: usize,
    pub band: FilterBand,
    pub sample_rate_hz: f64,
    pub sections: Vec<Section>,
}

impl FilterDesign {
    pub fn cutoffs_hz(&self) -> Vec<f64> {
        self.band.cutoffs_hz()
    }

    /// Complex frequency response at `freq_hz`.
    pub fn response_at(&self, freq_hz: f64) -> Complex64 {
        let omega = 2.0 * PI * freq_hz / self.sample_rate_hz;
        let z_inv = Complex64::from_polar(1.0, -omega);
        self.sections
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.response(z_inv))
    }

    pub fn magnitude_at(&self, freq_hz: f64) -> f64 {
        self.response_at(freq_hz).norm()
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.sections.iter().flat_map(Section::poles).collect()
    }

    pub fn is_stable(&self) -> bool {
        self.poles().iter().all(|p| p.norm() < 1.0)
    }

    /// Number of padding samples used on each side by [`filtfilt`].
    pub fn pad_len(&self) -> usize {
        3 * (2 * self.order + 1)
    }
}

/// Designs an `order`-th order digital Butterworth filter.
///
/// Band-pass designs follow the usual convention: the low-pass prototype of
/// `order` poles is transformed into `2 * order` poles.
pub fn design_butterworth(
    order: usize,
    band: FilterBand,
    sample_rate_hz: f64,
) -> Result<FilterDesign, DspError> {
    if order < 1 {
        return Err(DspError::InvalidOrder(order));
    }
    if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
        return Err(DspError::InvalidParameter(format!(
            "sample rate must be positive, got {sample_rate_hz}"
        )));
    }
    let nyquist = sample_rate_hz / 2.0;
    for fc in band.cutoffs_hz() {
        if !(fc > 0.0 && fc < nyquist) {
            return Err(DspError::InvalidCutoff(format!(
                "{fc} Hz is outside (0, {nyquist}) Hz"
            )));
        }
    }
    if let FilterBand::BandPass(lo, hi) = band {
        if lo >= hi {
            return Err(DspError::InvalidCutoff(format!(
                "band-pass low edge {lo} Hz must be below high edge {hi} Hz"
            )));
        }
    }

    let k = 2.0 * sample_rate_hz;
    let prewarp = |f: f64| k * (PI * f / sample_rate_hz).tan();
    let bilinear = |s: Complex64| (k + s) / (k - s);

    let prototype: Vec<Complex64> = (0..order)
        .map(|i| {
            let theta = PI * (2 * i + order + 1) as f64 / (2 * order) as f64;
            Complex64::from_polar(1.0, theta)
        })
        .collect();

    let (analog_poles, reference_hz) = match band {
        FilterBand::LowPass(fc) => {
            let wc = prewarp(fc);
            (prototype.iter().map(|p| p * wc).collect::<Vec<_>>(), 0.0)
        }
        FilterBand::BandPass(lo, hi) => {
            let (w1, w2) = (prewarp(lo), prewarp(hi));
            let bw = w2 - w1;
            let w0_sq = w1 * w2;
            let mut poles = Vec::with_capacity(2 * order);
            for p in &prototype {
                let half = p * bw / 2.0;
                let root = (half * half - w0_sq).sqrt();
                poles.push(half + root);
                poles.push(half - root);
            }
            let center_hz = (w0_sq.sqrt() / k).atan() * sample_rate_hz / PI;
            (poles, center_hz)
        }
    };

    let digital: Vec<Complex64> = analog_poles.into_iter().map(bilinear).collect();
    let mut design = FilterDesign {
        order,
        band,
        sample_rate_hz,
        sections: pair_poles(&digital, band),
    };
    let gain = design.magnitude_at(reference_hz);
    if let Some(first) = design.sections.first_mut() {
        for b in first.b.iter_mut() {
            *b /= gain;
        }
    }
    debug_assert!(design.is_stable());
    Ok(design)
}

const IMAG_EPS: f64 = 1e-12;

fn pair_poles(poles: &[Complex64], band: FilterBand) -> Vec<Section> {
    let mut complex: Vec<Complex64> = poles.iter().copied().filter(|p| p.im > IMAG_EPS).collect();
    let mut real: Vec<f64> = poles
        .iter()
        .filter(|p| p.im.abs() <= IMAG_EPS)
        .map(|p| p.re)
        .collect();
    complex.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    real.sort_by(f64::total_cmp);

    let pair_numerator = match band {
        FilterBand::LowPass(_) => [1.0, 2.0, 1.0],
        FilterBand::BandPass(..) => [1.0, 0.0, -1.0],
    };

    let mut sections: Vec<Section> = complex
        .iter()
        .map(|p| Section {
            b: pair_numerator,
            a: [1.0, -2.0 * p.re, p.norm_sqr()],
        })
        .collect();
    for chunk in real.chunks(2) {
        match *chunk {
            [p1, p2] => sections.push(Section {
                b: pair_numerator,
                a: [1.0, -(p1 + p2), p1 * p2],
            }),
            [p] => sections.push(Section {
                // only reachable for odd low-pass orders
                b: [1.0, 1.0, 0.0],
                a: [1.0, -p, 0.0],
            }),
            _ => unreachable!(),
        }
    }
    sections
}

/// Steady-state transposed direct-form II state of each section for a unit
/// step at the input of the cascade.
fn step_states(sections: &[Section]) -> Vec<[f64; 2]> {
    let mut input_level = 1.0;
    sections
        .iter()
        .map(|s| {
            let dc = (s.b[0] + s.b[1] + s.b[2]) / (1.0 + s.a[1] + s.a[2]);
            let z2 = s.b[2] - s.a[2] * dc;
            let z1 = s.b[1] - s.a[1] * dc + z2;
            let state = [z1 * input_level, z2 * input_level];
            input_level *= dc;
            state
        })
        .collect()
}

fn run_cascade(sections: &[Section], unit_states: &[[f64; 2]], x: &mut [f64]) {
    let Some(&x0) = x.first() else { return };
    for (s, zi) in sections.iter().zip(unit_states) {
        let mut z1 = zi[0] * x0;
        let mut z2 = zi[1] * x0;
        for v in x.iter_mut() {
            let input = *v;
            let y = s.b[0] * input + z1;
            z1 = s.b[1] * input - s.a[1] * y + z2;
            z2 = s.b[2] * input - s.a[2] * y;
            *v = y;
        }
    }
}

/// Zero-phase forward-backward filtering with odd-reflection padding of
/// `3 * (2 * order + 1)` samples per side (capped at `len - 1`). Section
/// states start at their steady-state values scaled by the first sample of
/// each pass, so constant inputs produce no edge transient.
pub fn filtfilt(design: &FilterDesign, signal: &[f64]) -> Result<Vec<f64>, DspError> {
    let n = signal.len();
    let required = 3 * design.order + 1;
    if n < required {
        return Err(DspError::SignalTooShort {
            required,
            actual: n,
        });
    }
    let pad = design.pad_len().min(n - 1);

    let mut ext = Vec::with_capacity(n + 2 * pad);
    let (first, last) = (signal[0], signal[n - 1]);
    ext.extend((1..=pad).rev().map(|i| 2.0 * first - signal[i]));
    ext.extend_from_slice(signal);
    ext.extend((1..=pad).map(|i| 2.0 * last - signal[n - 1 - i]));

    let states = step_states(&design.sections);
    run_cascade(&design.sections, &states, &mut ext);
    ext.reverse();
    run_cascade(&design.sections, &states, &mut ext);
    ext.reverse();

    Ok(ext[pad..pad + n].to_vec())
}
