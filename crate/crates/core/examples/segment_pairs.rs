//! Cuts a cover and an original of different lengths into aligned windows.

use coverlens::{pair_segments, AudioClip, SegmentConfig};

fn main() -> coverlens::Result<()> {
    let cfg = SegmentConfig {
        segment_seconds: 1.0,
        ..SegmentConfig::default()
    };
    let rate = cfg.sample_rate_hz;
    // 3.5 s cover, 2.2 s original.
    let cover = AudioClip::new(vec![0.1; (3.5 * rate as f64) as usize], rate)?;
    let original = AudioClip::new(vec![0.2; (2.2 * rate as f64) as usize], rate)?;

    println!("cover windows: {}", cfg.segment_count(cover.len())?);
    println!("original windows: {}", cfg.segment_count(original.len())?);
    for pair in pair_segments(&cover, &original, &cfg, "demo")? {
        let padded = pair.original.iter().rev().take_while(|v| **v == 0.0).count();
        println!("k={} len={} zero-padded original tail={padded}", pair.k, pair.cover.len());
    }
    Ok(())
}
