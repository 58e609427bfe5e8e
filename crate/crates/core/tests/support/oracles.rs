//! Direct-formula oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use affectwear_core::hrv::{hrv_time_features, NNSeries, HRV_TIME_NAMES};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const BIN: f64 = 1000.0 / 128.0;

pub fn naive_mean(v: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in v {
        s += x;
    }
    s / v.len() as f64
}

pub fn naive_sd(v: &[f64]) -> f64 {
    let m = naive_mean(v);
    let mut s = 0.0;
    for x in v {
        s += (x - m).powi(2);
    }
    (s / (v.len() as f64 - 1.0)).sqrt()
}

/// Linear interpolation between order statistics at rank q·(n−1).
pub fn naive_pct(v: &[f64], q: f64) -> f64 {
    let mut s = v.to_vec();
    // insertion sort keeps this independent of the library sort
    for i in 1..s.len() {
        let mut j = i;
        while j > 0 && s[j - 1] > s[j] {
            s.swap(j - 1, j);
            j -= 1;
        }
    }
    let rank = q / 100.0 * (s.len() - 1) as f64;
    let below = rank as usize;
    if below + 1 >= s.len() {
        return s[s.len() - 1];
    }
    s[below] * (1.0 - (rank - below as f64)) + s[below + 1] * (rank - below as f64)
}

fn histogram(v: &[f64]) -> Vec<f64> {
    let lo = v.iter().cloned().fold(f64::MAX, f64::min);
    let hi = v.iter().cloned().fold(f64::MIN, f64::max);
    let bins = ((hi - lo) / BIN) as usize + 1;
    let mut h = vec![0.0; bins];
    for x in v {
        let mut b = ((x - lo) / BIN) as usize;
        if b >= bins {
            b = bins - 1;
        }
        h[b] += 1.0;
    }
    h
}

/// Triangle with feet at bins n and m (either may sit one bin outside the
/// histogram) and apex at the first modal bin.
fn naive_tinn(h: &[f64]) -> f64 {
    let mut apex_bin = 0;
    for (i, c) in h.iter().enumerate() {
        if *c > h[apex_bin] {
            apex_bin = i;
        }
    }
    let x = apex_bin as i64;
    let top = h[apex_bin];
    let mut best_err = f64::MAX;
    let mut best_width = 0;
    for n in -1..x {
        for m in x + 1..=h.len() as i64 {
            let mut err = 0.0;
            for (j, c) in h.iter().enumerate() {
                let j = j as i64;
                let q = if j > n && j <= x {
                    top * (j - n) as f64 / (x - n) as f64
                } else if j > x && j < m {
                    top * (m - j) as f64 / (m - x) as f64
                } else {
                    0.0
                };
                err += (c - q) * (c - q);
            }
            if err < best_err {
                best_err = err;
                best_width = m - n;
            }
        }
    }
    best_width as f64 * BIN
}

fn windows(nn: &NNSeries, seconds: f64) -> (Option<f64>, Option<f64>) {
    let t0 = nn.peak_times_s[0];
    let span = nn.peak_times_s[nn.len()] - t0;
    let full = (span / seconds + 1e-9).floor() as usize;
    if full < 2 {
        return (None, None);
    }
    let mut means = Vec::new();
    let mut sds = Vec::new();
    for w in 0..full {
        let mut members = Vec::new();
        for k in 0..nn.len() {
            let rel = (nn.peak_times_s[k] - t0) / seconds + 1e-12;
            if rel >= w as f64 && rel < (w + 1) as f64 {
                members.push(nn.intervals_ms[k]);
            }
        }
        if !members.is_empty() {
            means.push(naive_mean(&members));
        }
        if members.len() > 1 {
            sds.push(naive_sd(&members));
        }
    }
    (
        if means.len() > 1 { Some(naive_sd(&means)) } else { None },
        if sds.is_empty() { None } else { Some(naive_mean(&sds)) },
    )
}

pub fn hrv_time_oracle(nn: &NNSeries) -> Vec<Option<f64>> {
    let v = &nn.intervals_ms;
    let n = v.len();
    let mean = naive_mean(v);
    let sdnn = naive_sd(v);
    let mut d = Vec::new();
    for i in 1..n {
        d.push(v[i] - v[i - 1]);
    }
    let mut sq = 0.0;
    for x in &d {
        sq += x * x;
    }
    let rmssd = (sq / d.len() as f64).sqrt();
    let med = naive_pct(v, 50.0);
    let dev: Vec<f64> = v.iter().map(|x| (x - med).abs()).collect();
    let mad = 1.4826 * naive_pct(&dev, 50.0);
    let mut c50 = 0;
    let mut c20 = 0;
    for x in &d {
        if x.abs() > 50.0 {
            c50 += 1;
        }
        if x.abs() > 20.0 {
            c20 += 1;
        }
    }
    let h = histogram(v);
    let hmax = h.iter().cloned().fold(0.0, f64::max);
    let (sdann1, sdnni1) = windows(nn, 60.0);
    let (sdann2, sdnni2) = windows(nn, 120.0);
    vec![
        Some(mean),
        Some(sdnn),
        sdann1,
        sdann2,
        sdnni1,
        sdnni2,
        Some(rmssd),
        if rmssd > 0.0 { Some(sdnn / rmssd) } else { None },
        if d.len() > 1 { Some(naive_sd(&d)) } else { None },
        Some(sdnn / mean),
        Some(mad / med),
        Some(rmssd / mean),
        Some(naive_pct(v, 75.0) - naive_pct(v, 25.0)),
        Some(naive_pct(v, 0.0)),
        Some(naive_pct(v, 100.0)),
        Some(med),
        Some(mad),
        Some(n as f64 / hmax),
        Some(naive_tinn(&h)),
        Some(100.0 * c50 as f64 / d.len() as f64),
        Some(100.0 * c20 as f64 / d.len() as f64),
        Some(naive_pct(v, 20.0)),
        Some(naive_pct(v, 80.0)),
    ]
}

fn close(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= 1e-9 * scale || (a - b).abs() < 1e-12
}

pub fn random_series(rng: &mut ChaCha8Rng, len: usize) -> NNSeries {
    let base = rng.random_range(600.0..1100.0);
    let spread = rng.random_range(5.0..120.0);
    let mut iv = Vec::with_capacity(len);
    for _ in 0..len {
        // occasional repeats exercise histogram ties
        if rng.random_bool(0.1) && !iv.is_empty() {
            iv.push(*iv.last().unwrap());
        } else {
            iv.push(base + rng.random_range(-spread..spread));
        }
    }
    NNSeries::from_intervals(iv, rng.random_range(0.0..100.0))
}

/// Compares every time-domain index with the oracle, presence included.
pub fn check_hrv_time(nn: &NNSeries) -> Result<(), String> {
    let got = hrv_time_features(nn).map_err(|e| e.to_string())?.values();
    let want = hrv_time_oracle(nn);
    for ((name, g), w) in HRV_TIME_NAMES.iter().zip(got).zip(want) {
        match (g, w) {
            (None, None) => {}
            (Some(g), Some(w)) if close(g, w) => {}
            (g, w) => return Err(format!("{name}: {g:?} vs oracle {w:?} on {} intervals", nn.len())),
        }
    }
    Ok(())
}

/// Repeatedly picks the nearest unused neighbour.
pub fn knn_oracle(x: &[Vec<f64>], y: &[u8], k: usize, q: &[f64]) -> u8 {
    let mut used = vec![false; x.len()];
    let mut ones = 0;
    for _ in 0..k.min(x.len()) {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (i, row) in x.iter().enumerate() {
            if used[i] {
                continue;
            }
            let mut d = 0.0;
            for j in 0..q.len() {
                d += (row[j] - q[j]).powi(2);
            }
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        used[best] = true;
        ones += y[best] as usize;
    }
    if 2 * ones > k.min(x.len()) {
        1
    } else {
        0
    }
}

pub fn gini_cost(labels: &[u8]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let n = labels.len() as f64;
    let p = labels.iter().filter(|&&l| l == 1).count() as f64 / n;
    n * (1.0 - p * p - (1.0 - p) * (1.0 - p))
}

/// Best midpoint threshold on 1-D data by trying every one; the lowest
/// threshold wins ties.
pub fn exhaustive_split(xs: &[f64], labels: &[u8]) -> Option<(f64, f64)> {
    let mut distinct = xs.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let mut best: Option<(f64, f64)> = None;
    for w in distinct.windows(2) {
        let t = (w[0] + w[1]) / 2.0;
        let left: Vec<u8> = (0..xs.len()).filter(|&i| xs[i] <= t).map(|i| labels[i]).collect();
        let right: Vec<u8> = (0..xs.len()).filter(|&i| xs[i] > t).map(|i| labels[i]).collect();
        let cost = gini_cost(&left) + gini_cost(&right);
        if best.is_none_or(|(_, c)| cost < c - 1e-12) {
            best = Some((t, cost));
        }
    }
    best
}
