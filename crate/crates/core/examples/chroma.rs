//! Pitch-class profile of a C major triad.

use std::f64::consts::PI;

use coverlens::features::chroma_segment;
use coverlens::FeatureConfig;

const NAMES: [&str; 12] = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"];

fn main() -> coverlens::Result<()> {
    let sr = 22_050;
    let triad: Vec<f64> = (0..sr)
        .map(|i| {
            let t = i as f64 / sr as f64;
            [261.63, 329.63, 392.0].iter().map(|f| 0.3 * (2.0 * PI * f * t).sin()).sum()
        })
        .collect();
    let chroma = chroma_segment(&triad, &FeatureConfig::default().chroma_frame, sr)?;
    for (name, v) in NAMES.iter().zip(&chroma) {
        println!("{name:<2} {v:.3} {}", "#".repeat((v * 40.0) as usize));
    }
    Ok(())
}
