//! Mean MFCC vectors of a cover/original window pair.

use std::f64::consts::PI;

use coverlens::{FeatureConfig, FeatureExtractor, FeatureKind, SegmentPair};

fn chord(freqs: &[f64], detune: f64) -> Vec<f64> {
    let sr = 22_050.0;
    (0..22_050)
        .map(|i| freqs.iter().map(|f| 0.2 * (2.0 * PI * f * (1.0 + detune) * i as f64 / sr).sin()).sum())
        .collect()
}

fn main() -> coverlens::Result<()> {
    let ex = FeatureExtractor::new(FeatureConfig::default())?;
    let pair = SegmentPair {
        pair_id: "demo".into(),
        k: 1,
        cover: chord(&[261.6, 329.6, 392.0], 0.03),
        original: chord(&[261.6, 329.6, 392.0], 0.0),
    };
    let v = ex.pair_feature(&pair, FeatureKind::Mfcc)?;
    let (cover, original) = v.halves().expect("mfcc has two halves");
    println!("dim {}", v.dim());
    for (i, (c, o)) in cover.iter().zip(original).enumerate() {
        println!("c{i:<2} cover {c:>10.4} original {o:>10.4}");
    }
    Ok(())
}
