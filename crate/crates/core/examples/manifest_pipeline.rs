//! End-to-end run over a manifest: WAV files on disk, comment-derived labels,
//! feature extraction, training and evaluation.

use std::f64::consts::PI;
use std::fs;

use coverlens::dataset::read_dataset_jsonl;
use coverlens::{
    build_dataset, evaluate, fit, split, write_wav, AudioClip, BitDepth, FeatureConfig, FeatureExtractor,
    FeatureKind, Manifest, SegmentConfig, SentimentLexicon, TrainConfig,
};

fn tone(freq: f64, rate: u32, seconds: f64) -> AudioClip {
    let n = (seconds * rate as f64) as usize;
    let s = (0..n).map(|i| 0.3 * (2.0 * PI * freq * i as f64 / rate as f64).sin()).collect();
    AudioClip::new(s, rate).expect("valid clip")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("coverlens-manifest-example");
    fs::create_dir_all(&dir)?;

    let mut manifest = String::from("pair_id,cover_path,original_path,comments_path,label\n");
    let mut comments = String::from("pair_id,comment\n");
    let words = ["awful", "boring", "fine", "nice", "great", "amazing"];
    for (i, word) in words.iter().enumerate() {
        let f = 200.0 + 60.0 * i as f64;
        // Originals at 44.1 kHz exercise the resampler.
        write_wav(&tone(f * (1.0 + 0.01 * i as f64), 22_050, 3.0), dir.join(format!("c{i}.wav")), BitDepth::Int16)?;
        write_wav(&tone(f, 44_100, 3.0), dir.join(format!("o{i}.wav")), BitDepth::Float32)?;
        manifest.push_str(&format!("p{i},c{i}.wav,o{i}.wav,comments.csv,\n"));
        comments.push_str(&format!("p{i},this cover is {word}\n"));
    }
    fs::write(dir.join("manifest.csv"), manifest)?;
    fs::write(dir.join("comments.csv"), comments)?;

    let manifest = Manifest::from_path(dir.join("manifest.csv"))?;
    let seg = SegmentConfig {
        segment_seconds: 1.0,
        ..SegmentConfig::default()
    };
    let ex = FeatureExtractor::new(FeatureConfig::default())?;
    let lex = SentimentLexicon::bundled();
    let built = build_dataset(&manifest, FeatureKind::Temporal, &seg, &ex, &lex)?;
    for (id, y) in &built.labels {
        println!("{id}: label {y:.2}");
    }

    let path = dir.join("dataset.jsonl");
    coverlens::dataset::write_dataset_jsonl(&path, &built.examples)?;
    let examples = read_dataset_jsonl(&path)?;
    let (train, val) = split(&examples, 0.34, 1)?;
    let (model, history) = fit(None, &train, &val, &TrainConfig::default())?;
    println!(
        "{} examples, {} epochs, val rmse {:.3}",
        examples.len(),
        history.len(),
        evaluate(&model, &val)?.rmse
    );
    Ok(())
}
