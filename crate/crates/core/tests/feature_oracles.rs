use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coverlens::features::{
    chroma_segment, spectral_contrast_segment, temporal_centroid, zero_crossing_rate, FeatureConfig,
    FeatureExtractor, FeatureKind,
};
use coverlens::segmentation::SegmentPair;

const SR: f64 = 22_050.0;

fn tone(freqs: &[(f64, f64)], seconds: f64) -> Vec<f64> {
    let n = (seconds * SR) as usize;
    (0..n)
        .map(|i| {
            let t = i as f64 / SR;
            freqs.iter().map(|(f, a)| a * (2.0 * PI * f * t).sin()).sum()
        })
        .collect()
}

/// MFCC computed straight from the definitions: naive DFT, triangular mel
/// filters on `2595 log10(1 + f/700)`, natural log, orthonormal DCT-II.
fn mfcc_from_definitions(x: &[f64], frame: usize, hop: usize, n_mels: usize, n_mfcc: usize) -> Vec<f64> {
    let mel = |f: f64| 2595.0 * (1.0 + f / 700.0).log10();
    let inv = |m: f64| 700.0 * (10f64.powf(m / 2595.0) - 1.0);
    let top = mel(SR / 2.0);
    let edges: Vec<f64> = (0..n_mels + 2).map(|i| inv(top * i as f64 / (n_mels + 1) as f64)).collect();
    let bins = frame / 2 + 1;
    let weight = |m: usize, f: f64| {
        let (l, c, r) = (edges[m], edges[m + 1], edges[m + 2]);
        if f <= l || f >= r {
            0.0
        } else if f <= c {
            (f - l) / (c - l)
        } else {
            (r - f) / (r - c)
        }
    };
    let frames = (x.len() - frame) / hop + 1;
    let mut mean = vec![0.0; n_mfcc];
    for j in 0..frames {
        let seg = &x[j * hop..j * hop + frame];
        let power: Vec<f64> = (0..bins)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (t, v) in seg.iter().enumerate() {
                    let w = 0.5 - 0.5 * (2.0 * PI * t as f64 / frame as f64).cos();
                    let angle = 2.0 * PI * ((k * t) % frame) as f64 / frame as f64;
                    re += w * v * angle.cos();
                    im -= w * v * angle.sin();
                }
                re * re + im * im
            })
            .collect();
        let logs: Vec<f64> = (0..n_mels)
            .map(|m| {
                let e: f64 = (0..bins).map(|k| power[k] * weight(m, k as f64 * SR / frame as f64)).sum();
                e.max(1e-10).ln()
            })
            .collect();
        for (k, acc) in mean.iter_mut().enumerate() {
            let norm = if k == 0 { (1.0 / n_mels as f64).sqrt() } else { (2.0 / n_mels as f64).sqrt() };
            let c: f64 = logs
                .iter()
                .enumerate()
                .map(|(n, v)| v * (PI * k as f64 * (2 * n + 1) as f64 / (2.0 * n_mels as f64)).cos())
                .sum();
            *acc += norm * c / frames as f64;
        }
    }
    mean
}

#[test]
fn mfcc_matches_definition_route() {
    let x = tone(&[(220.0, 0.4), (1375.0, 0.2), (3100.0, 0.1)], 0.25);
    let ex = FeatureExtractor::new(FeatureConfig::default()).unwrap();
    let got = ex.segment_features(FeatureKind::Mfcc, &x).unwrap();
    let expected = mfcc_from_definitions(&x, 2048, 512, 40, 13);
    assert_eq!(got.len(), 13);
    for (g, e) in got.iter().zip(&expected) {
        assert!((g - e).abs() < 1e-8 * e.abs().max(1.0), "{g} vs {e}");
    }
}

#[test]
fn mfcc_amplitude_scaling_moves_only_c0() {
    // Broadband noise keeps every mel band above the log floor.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x: Vec<f64> = tone(&[(300.0, 0.3), (900.0, 0.2), (2500.0, 0.2)], 1.0)
        .into_iter()
        .map(|v| v + 1e-3 * rng.random_range(-1.0..1.0))
        .collect();
    let ex = FeatureExtractor::new(FeatureConfig::default()).unwrap();
    let alpha: f64 = 0.25;
    let base = ex.segment_features(FeatureKind::Mfcc, &x).unwrap();
    let scaled: Vec<f64> = x.iter().map(|v| alpha * v).collect();
    let moved = ex.segment_features(FeatureKind::Mfcc, &scaled).unwrap();
    assert!((moved[0] - base[0] - 40f64.sqrt() * (alpha * alpha).ln()).abs() < 1e-6);
    for k in 1..13 {
        assert!((moved[k] - base[k]).abs() < 1e-6);
    }
}

#[test]
fn chroma_a440_and_middle_c() {
    let cfg = FeatureConfig::default().chroma_frame;
    let a = chroma_segment(&tone(&[(440.0, 0.5)], 1.0), &cfg, 22_050).unwrap();
    let peak = a.iter().cloned().fold(0.0, f64::max);
    assert_eq!(a[9], peak);
    assert!(a[9] >= 0.8 * peak);
    let c = chroma_segment(&tone(&[(261.63, 0.5)], 1.0), &cfg, 22_050).unwrap();
    let argmax = (0..12).max_by(|&i, &j| c[i].total_cmp(&c[j])).unwrap();
    assert_eq!(argmax, 0);
}

#[test]
fn contrast_band_with_tone_stands_out() {
    // Band 2 spans 400–800 Hz.
    let x = tone(&[(600.0, 0.5)], 1.0);
    let c = spectral_contrast_segment(&x, &FeatureConfig::default().frame, 22_050, 0.02).unwrap();
    assert_eq!(c.len(), 7);
    assert!(c[2] > c[0] + 5.0, "{c:?}");
}

#[test]
fn zcr_of_100hz_sine() {
    let zcr = zero_crossing_rate(&tone(&[(100.0, 0.5)], 1.0));
    let expected = 200.0 / 22_049.0;
    assert!((zcr - expected).abs() <= 0.02 * expected);
}

#[test]
fn centroid_of_late_burst_is_late() {
    let mut x = vec![0.0; 22_050];
    x[20_000..].iter_mut().for_each(|v| *v = 1.0);
    let c = temporal_centroid(&x, 22_050);
    let expected = (20_000..22_050).map(|t| t as f64).sum::<f64>() / 2050.0 / 22_050.0;
    assert!((c - expected).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn swapping_sides_swaps_halves(f1 in 100.0f64..3000.0, f2 in 100.0f64..3000.0) {
        let ex = FeatureExtractor::new(FeatureConfig::default()).unwrap();
        let a = tone(&[(f1, 0.4)], 0.5);
        let b = tone(&[(f2, 0.3)], 0.5);
        let fwd = SegmentPair { pair_id: "p".into(), k: 1, cover: a.clone(), original: b.clone() };
        let rev = SegmentPair { pair_id: "p".into(), k: 1, cover: b, original: a };
        for kind in FeatureKind::FEATURES {
            let x = ex.pair_feature(&fwd, kind).unwrap();
            let y = ex.pair_feature(&rev, kind).unwrap();
            let (xc, xo) = x.halves().unwrap();
            let (yc, yo) = y.halves().unwrap();
            prop_assert_eq!(xc, yo);
            prop_assert_eq!(xo, yc);
        }
        let d1 = ex.pair_feature(&fwd, FeatureKind::BaselineAbsdiff).unwrap();
        let d2 = ex.pair_feature(&rev, FeatureKind::BaselineAbsdiff).unwrap();
        prop_assert_eq!(d1.values, d2.values);
    }

    #[test]
    fn chroma_is_max_normalized_per_frame(f in 60.0f64..4000.0) {
        let c = chroma_segment(&tone(&[(f, 0.5)], 1.0), &FeatureConfig::default().chroma_frame, 22_050).unwrap();
        prop_assert!(c.iter().all(|&v| (0.0..=1.0 + 1e-12).contains(&v)));
    }
}
