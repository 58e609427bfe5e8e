//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p affectwear-cli --test acceptance`.

#[path = "../../core/tests/support/oracles.rs"]
mod oracles;

use std::f64::consts::PI;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use affectwear_core::actigraphy::{self, features_from_axes, AccParams};
use affectwear_core::dsp::{design_butterworth, filtfilt, welch_psd, FilterBand, WelchConfig};
use affectwear_core::eda::{self, EdaParams};
use affectwear_core::hrv::{self, BvpParams, FreqParams};
use affectwear_core::mlbench::{best_split, compute_metrics, loss_and_gradient, Confusion, Criterion, EvalReport, Knn, Mlp, ModelKind};
use affectwear_core::synth::{generate_session, HeartSpec, ScrSpec, SynthSpec, ACC_RATE_HZ};
use affectwear_core::thermo::{self, temp_features_from_samples};
use affectwear_cli::Cli;
use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Check = Result<String, String>;
type Entry = (&'static str, fn() -> Check, u64);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// 1. metric fixtures

fn metric_fixtures() -> Check {
    let fixtures = [
        (Confusion { tp: 17, tn: 13, fp: 0, fn_: 1 }, [96.77, 100.0, 94.44, 97.14]),
        (Confusion { tp: 18, tn: 1, fp: 12, fn_: 0 }, [61.29, 60.0, 100.0, 75.0]),
    ];
    for (c, want) in fixtures {
        let m = compute_metrics(&c).map_err(|e| e.to_string())?;
        let got = [m.accuracy, m.precision, m.recall, m.f1];
        for (g, w) in got.iter().zip(want) {
            ensure((g - w).abs() <= 0.01, || format!("{c:?}: got {got:?}, want {want:?}"))?;
        }
    }
    Ok("ACC/MLP and time-HRV/SVM rows reproduced".into())
}

// ---------------------------------------------------------------------------
// 2. DSP analytic suite

fn designs() -> Vec<(usize, FilterBand, f64)> {
    let mut v = Vec::new();
    for fs in [4.0, 32.0, 64.0] {
        for order in 1..=6 {
            for frac in [0.05, 0.15, 0.3, 0.42] {
                v.push((order, FilterBand::LowPass(frac * fs), fs));
            }
            v.push((order, FilterBand::BandPass(0.1 * fs, 0.3 * fs), fs));
        }
    }
    v.push((2, FilterBand::BandPass(0.7, 3.5), 64.0));
    v.push((4, FilterBand::LowPass(1.0), 4.0));
    v.push((5, FilterBand::LowPass(10.0), 32.0));
    v
}

fn sine(freq: f64, fs: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (2.0 * PI * freq * i as f64 / fs).sin()).collect()
}

fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

fn dsp_suite() -> Check {
    let mut worst_db: f64 = 0.0;
    let mut worst_measured: f64 = 0.0;
    for (order, band, fs) in designs() {
        let d = design_butterworth(order, band, fs).map_err(|e| e.to_string())?;
        for fc in band.cutoffs_hz() {
            let db = 20.0 * d.magnitude_at(fc).log10();
            worst_db = worst_db.max((db + 3.01).abs());
            ensure((db + 3.01).abs() <= 0.1, || format!("{band:?} order {order} @ {fs} Hz: {db:.3} dB at {fc}"))?;
            // measured route: forward-backward gain is |H|^2, so half of it in dB
            let n = 16384;
            let x = sine(fc, fs, n);
            let y = filtfilt(&d, &x).map_err(|e| e.to_string())?;
            let mid = n / 4..3 * n / 4;
            let measured = 10.0 * (rms(&y[mid.clone()]) / rms(&x[mid])).log10();
            worst_measured = worst_measured.max((measured + 3.01).abs());
            ensure((measured + 3.01).abs() <= 0.1, || {
                format!("{band:?} order {order} @ {fs} Hz: measured {measured:.3} dB at {fc}")
            })?;
        }
        let pass_hz = match band {
            FilterBand::LowPass(fc) => 0.3 * fc,
            FilterBand::BandPass(lo, hi) => (lo * hi).sqrt(),
        };
        let n = 4096;
        let x = sine(pass_hz, fs, n);
        let y = filtfilt(&d, &x).map_err(|e| e.to_string())?;
        let lag = best_lag(&x, &y, 20);
        ensure(lag == 0, || format!("{band:?} order {order} @ {fs} Hz: lag {lag} samples"))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_ratio: f64 = 0.0;
    for case in 0..6 {
        let n = 4096;
        let fs = 4.0;
        let x: Vec<f64> = match case {
            0..=2 => (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect(),
            _ => sine(0.13 + 0.37 * case as f64, fs, n),
        };
        let spec = welch_psd(&x, fs, &WelchConfig::default()).map_err(|e| e.to_string())?;
        let mean = x.iter().sum::<f64>() / n as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let ratio = spec.total_power() / var;
        worst_ratio = worst_ratio.max((ratio - 1.0).abs());
        ensure((ratio - 1.0).abs() <= 0.1, || format!("Parseval case {case}: ratio {ratio:.4}"))?;
    }
    Ok(format!(
        "max |dB + 3.01| analytic {worst_db:.2e}, measured {worst_measured:.2e}; zero lag; Parseval within {:.1}%",
        100.0 * worst_ratio
    ))
}

/// Lag in `-max..=max` maximising the cross-correlation on the middle half.
fn best_lag(x: &[f64], y: &[f64], max: i64) -> i64 {
    let n = x.len() as i64;
    let (lo, hi) = (n / 4, 3 * n / 4);
    (-max..=max)
        .map(|lag| {
            let c: f64 = (lo..hi).map(|i| x[i as usize] * y[(i + lag) as usize]).sum();
            (lag, c)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0
}

// ---------------------------------------------------------------------------
// 3. feature oracles

fn feature_oracles() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let len = rng.random_range(5..=50);
        oracles::check_hrv_time(&oracles::random_series(&mut rng, len))?;
    }
    for _ in 0..20 {
        let len = rng.random_range(100..=600);
        oracles::check_hrv_time(&oracles::random_series(&mut rng, len))?;
    }

    for _ in 0..100 {
        let n = rng.random_range(64..400);
        let axes: Vec<Vec<f64>> = (0..3).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let threshold = rng.random_range(0.1..1.2);
        let f = features_from_axes(&axes[0], &axes[1], &axes[2], 32.0, threshold, 2.0).map_err(|e| e.to_string())?;
        let mut energy = 0.0;
        let mut below = 0usize;
        for ((a, b), c) in axes[0].iter().zip(&axes[1]).zip(&axes[2]) {
            let sq = a.powi(2) + b.powi(2) + c.powi(2);
            energy += sq;
            if sq.sqrt() < threshold {
                below += 1;
            }
        }
        energy /= n as f64;
        ensure((f.energy - energy).abs() <= 1e-12 * energy.max(1.0), || format!("ACC energy {} vs {energy}", f.energy))?;
        ensure(f.inactivity_time_s == below as f64 / 32.0, || {
            format!("ACC inactivity {} vs {}", f.inactivity_time_s, below as f64 / 32.0)
        })?;
    }

    for _ in 0..100 {
        let n = rng.random_range(2..500);
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(30.0..36.0)).collect();
        let f = temp_features_from_samples(&v, 4.0).map_err(|e| e.to_string())?;
        let identity = (n as f64 - 1.0) * f.std * f.std;
        ensure((f.energy - identity).abs() <= 1e-9 * (1.0 + identity), || {
            format!("TEMP energy {} vs (N-1)std^2 {identity}", f.energy)
        })?;
    }

    let mut worst: f64 = 0.0;
    for seed in 0..5 {
        let (session, _) = generate_session(&SynthSpec {
            seed,
            duration_s: 120.0,
            ..SynthSpec::default()
        })
        .map_err(|e| e.to_string())?;
        let d = eda::decompose_eda(&session.eda, &EdaParams::default()).map_err(|e| e.to_string())?;
        for i in 0..d.cleaned.len() {
            worst = worst.max((d.tonic[i] + d.phasic[i] - d.cleaned[i]).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("EDA reconstruction error {worst:e}"))?;
    Ok(format!("220 NN series, 100 ACC and 100 TEMP signals, EDA reconstruction error {worst:.1e}"))
}

// ---------------------------------------------------------------------------
// 4. ground-truth recovery

fn synth(seed: u64, duration_s: f64) -> SynthSpec {
    SynthSpec {
        seed,
        duration_s,
        ..SynthSpec::default()
    }
}

fn ground_truth() -> Check {
    for (bpm, duration) in [(60.0, 60.0), (120.0, 30.0), (75.0, 120.0)] {
        for seed in 0..3 {
            let mut s = synth(seed, duration);
            s.heart = HeartSpec {
                rate_bpm: bpm,
                ..HeartSpec::default()
            };
            let (session, _) = generate_session(&s).map_err(|e| e.to_string())?;
            let filtered = hrv::condition_bvp(&session.bvp, &BvpParams::default()).map_err(|e| e.to_string())?;
            let peaks = hrv::detect_pulse_peaks(&filtered, session.bvp.sample_rate, &Default::default())
                .map_err(|e| e.to_string())?;
            let want = (bpm * duration / 60.0).round() as i64;
            ensure((peaks.len() as i64 - want).abs() <= 2, || {
                format!("{bpm} bpm over {duration} s: {} peaks, want {want}", peaks.len())
            })?;
        }
    }

    let mut ratios = Vec::new();
    for seed in 0..3 {
        let mut pair = [0.0; 2];
        for (k, freq) in [0.10, 0.25].into_iter().enumerate() {
            let mut s = synth(seed, 300.0);
            s.heart.modulation_freq_hz = freq;
            s.heart.modulation_depth_ms = 50.0;
            let (session, _) = generate_session(&s).map_err(|e| e.to_string())?;
            let nn = hrv::bvp_to_nn(&session.bvp, &BvpParams::default()).map_err(|e| e.to_string())?;
            let f = hrv::hrv_freq_features(&nn, &FreqParams::default()).map_err(|e| e.to_string())?;
            pair[k] = f.lf / f.hf;
        }
        ensure(pair[0] > 5.0 && 1.0 / pair[1] > 5.0, || {
            format!("seed {seed}: LF/HF {:.2} at 0.10 Hz, HF/LF {:.2} at 0.25 Hz", pair[0], 1.0 / pair[1])
        })?;
        ratios.push(pair);
    }

    for (seed, amp) in [(11, 0.5), (12, 0.3), (13, 0.8)] {
        let mut s = synth(seed, 120.0);
        s.eda.scr_events = vec![ScrSpec {
            onset_s: 50.0,
            amplitude_us: amp,
        }];
        let (session, _) = generate_session(&s).map_err(|e| e.to_string())?;
        let f = eda::extract_eda(&session.eda, &EdaParams::default()).map_err(|e| e.to_string())?;
        ensure(f.scr_onsets == 1.0 && (f.scr_amplitude - amp).abs() <= 0.1 * amp, || {
            format!("SCR {amp}: {} events, amplitude {}", f.scr_onsets, f.scr_amplitude)
        })?;
    }

    for (seed, freq) in [(1, 1.0), (2, 2.0), (3, 3.0), (4, 1.7)] {
        let mut s = synth(seed, 60.0);
        s.acc.dominant_freq_hz = freq;
        s.acc.inactive_fraction = 0.0;
        let (session, _) = generate_session(&s).map_err(|e| e.to_string())?;
        let f = actigraphy::extract_acc(&session.acc, &AccParams::default()).map_err(|e| e.to_string())?;
        let bin = ACC_RATE_HZ / session.acc.len() as f64;
        ensure((f.dominant_frequency_hz - freq).abs() <= bin, || {
            format!("ACC {freq} Hz: recovered {}", f.dominant_frequency_hz)
        })?;
    }

    for (seed, slope) in [(6, 0.0015), (7, -0.002), (8, 0.0)] {
        let mut s = synth(seed, 120.0);
        s.temp.trend_c_per_s = slope;
        s.temp.noise_std = 0.0;
        let (session, truth) = generate_session(&s).map_err(|e| e.to_string())?;
        let f = thermo::temp_features(&session.temp).map_err(|e| e.to_string())?;
        ensure((f.trend - truth.temp_trend_c_per_s).abs() < 1e-9, || format!("TEMP trend {} vs {slope}", f.trend))?;
    }
    let low = ratios.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let high = ratios.iter().map(|p| 1.0 / p[1]).fold(f64::INFINITY, f64::min);
    Ok(format!("peaks, SCR, ACC, TEMP recovered; min LF/HF {low:.1}, min HF/LF {high:.1}"))
}

// ---------------------------------------------------------------------------
// 5. classifier sanity

fn classifier_sanity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let d = rng.random_range(1..5);
        let hidden = rng.random_range(2..9);
        let n = rng.random_range(5..20);
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let y: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let params = Mlp::init(d, hidden, seed).params;
        let (_, grad) = loss_and_gradient(&params, d, hidden, &x, &y);
        let h = 1e-6;
        for j in 0..params.len() {
            let mut p = params.clone();
            p[j] += h;
            let up = loss_and_gradient(&p, d, hidden, &x, &y).0;
            p[j] -= 2.0 * h;
            let down = loss_and_gradient(&p, d, hidden, &x, &y).0;
            let numeric = (up - down) / (2.0 * h);
            let scale = grad[j].abs().max(numeric.abs()).max(1e-4);
            let rel = (grad[j] - numeric).abs() / scale;
            worst = worst.max(rel);
            ensure(rel <= 1e-5, || format!("MLP gradient {j}: analytic {} vs numeric {numeric}", grad[j]))?;
        }
    }

    for _ in 0..50 {
        let n = rng.random_range(5..40);
        let d = rng.random_range(1..6);
        let k = rng.random_range(1..=n.min(9));
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let y: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let model = Knn::fit(&x, &y, k);
        for _ in 0..10 {
            let q: Vec<f64> = (0..d).map(|_| rng.random_range(-2.5..2.5)).collect();
            ensure(model.predict(&q) == oracles::knn_oracle(&x, &y, k, &q), || "kNN differs from brute force".into())?;
        }
    }

    for _ in 0..300 {
        let n = rng.random_range(2..=20);
        let xs: Vec<f64> = (0..n).map(|_| rng.random_range(0..8) as f64).collect();
        let labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let x: Vec<Vec<f64>> = xs.iter().map(|v| vec![*v]).collect();
        let y: Vec<f64> = labels.iter().map(|&l| f64::from(l)).collect();
        let idx: Vec<usize> = (0..n).collect();
        let got = best_split(&x, &y, &idx, &[0], Criterion::Gini, 1).map(|(_, t, c)| (t, c));
        let want = oracles::exhaustive_split(&xs, &labels);
        let same = match (got, want) {
            (None, None) => true,
            (Some((t, c)), Some((wt, wc))) => t == wt && (c - wc).abs() < 1e-9,
            _ => false,
        };
        ensure(same, || format!("CART split {got:?} vs exhaustive {want:?} on {xs:?} / {labels:?}"))?;
    }
    Ok(format!("max gradient rel. error {worst:.1e}; kNN and CART identical to oracles"))
}

// ---------------------------------------------------------------------------
// 6. pipeline separability sweep

/// Parses and executes like the binary, without printing.
fn cli(args: &[&str]) -> Result<(), String> {
    let parsed = Cli::try_parse_from(std::iter::once("affectwear").chain(args.iter().copied())).map_err(|e| e.to_string())?;
    affectwear_cli::execute(&parsed)
        .map(drop)
        .map_err(|e| format!("{args:?} failed with exit code {}: {e}", e.exit_code()))
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

/// synth, extract, and `bench --features acc`; returns accuracy per model.
fn acc_pipeline(root: &Path, seed: u64, offset: f64, duration_s: f64) -> Result<Vec<(ModelKind, f64)>, String> {
    let (data, out) = (root.join("data"), root.join("out"));
    let seed = seed.to_string();
    let offset = offset.to_string();
    let duration = duration_s.to_string();
    cli(&["synth", "--data-root", p(&data), "--seed", &seed, "--acc-freq-offset", &offset, "--duration-s", &duration])?;
    cli(&["extract", "--data-root", p(&data), "--out", p(&out)])?;
    cli(&["bench", "--out", p(&out), "--features", "acc", "--seed", &seed])?;
    ModelKind::ALL
        .iter()
        .map(|&k| {
            let path = out.join("bench/acc").join(format!("{}.json", k.as_str()));
            let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            let r: EvalReport = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            ensure(r.n_subjects == 31, || format!("{} subjects in {}", r.n_subjects, path.display()))?;
            Ok((k, r.metrics.accuracy))
        })
        .collect()
}

fn separability() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let sep = acc_pipeline(&dir.path().join("separable"), 0, 2.0, 300.0)?;
    let (best_kind, best) = sep.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    ensure(best >= 90.0, || format!("separable cohort: best accuracy {best:.2} ({best_kind})"))?;

    let seeds = 20;
    let mut sums = vec![0.0; ModelKind::ALL.len()];
    for seed in 0..seeds {
        let run = acc_pipeline(&dir.path().join(format!("null{seed}")), 100 + seed, 0.0, 120.0)?;
        for (i, (_, acc)) in run.iter().enumerate() {
            sums[i] += acc;
        }
    }
    let means: Vec<(ModelKind, f64)> = ModelKind::ALL.iter().copied().zip(sums.iter().map(|s| s / seeds as f64)).collect();
    let summary: Vec<String> = means.iter().map(|(k, m)| format!("{} {m:.1}", k.display_name())).collect();
    for (k, m) in &means {
        ensure((35.0..=65.0).contains(m), || format!("null cohort mean accuracy of {k} is {m:.2}: {summary:?}"))?;
    }
    Ok(format!(
        "separable best {best:.2}% ({}); null means over {seeds} seeds: {}",
        best_kind.display_name(),
        summary.join(", ")
    ))
}

// ---------------------------------------------------------------------------
// 7. determinism

fn files_under(root: &Path) -> Vec<PathBuf> {
    let mut stack = vec![root.to_path_buf()];
    let mut files = Vec::new();
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                files.push(path.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    files.sort();
    files
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str| -> Result<PathBuf, String> {
        let root = dir.path().join(name);
        let (data, out) = (root.join("data"), root.join("out"));
        cli(&["synth", "--data-root", p(&data), "--seed", "7", "--duration-s", "120"])?;
        cli(&["extract", "--data-root", p(&data), "--out", p(&out)])?;
        cli(&["bench", "--out", p(&out), "--seed", "7"])?;
        cli(&["report", "--out", p(&out)])?;
        Ok(root)
    };
    let (a, b) = (run("a")?, run("b")?);
    let (fa, fb) = (files_under(&a), files_under(&b));
    ensure(fa == fb, || "the two runs produced different file sets".into())?;
    for f in &fa {
        ensure(fs::read(a.join(f)).unwrap() == fs::read(b.join(f)).unwrap(), || format!("{} differs", f.display()))?;
    }
    Ok(format!("{} files byte-identical across two runs", fa.len()))
}

// ---------------------------------------------------------------------------

fn main() {
    let criteria: [Entry; 7] = [
        ("metric fixtures", metric_fixtures, 1),
        ("DSP analytic suite", dsp_suite, 10),
        ("feature oracle suite", feature_oracles, 30),
        ("ground-truth recovery", ground_truth, 60),
        ("classifier sanity", classifier_sanity, 60),
        ("pipeline separability sweep", separability, 600),
        ("end-to-end determinism", determinism, 600),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check, limit_s)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|d| {
            if elapsed <= Duration::from_secs(*limit_s) {
                Ok(d)
            } else {
                Err(format!("took {:.1} s, limit {limit_s} s", elapsed.as_secs_f64()))
            }
        });
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS [{:.2} s] {detail}", i + 1, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{:.2} s] {why}", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
