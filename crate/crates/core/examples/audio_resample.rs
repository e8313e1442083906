//! Writes a 44.1 kHz tone to disk, reads it back and resamples it to the
//! standard analysis rate.

use std::f64::consts::PI;

use coverlens::{read_wav, resample, write_wav, AudioClip, BitDepth, STANDARD_SAMPLE_RATE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rate = 44_100;
    let samples = (0..rate).map(|i| 0.5 * (2.0 * PI * 440.0 * i as f64 / rate as f64).sin()).collect();
    let clip = AudioClip::new(samples, rate)?;

    let dir = std::env::temp_dir().join("coverlens-audio-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("a440.wav");
    write_wav(&clip, &path, BitDepth::Int16)?;

    let back = read_wav(&path)?;
    let down = resample(&back, STANDARD_SAMPLE_RATE)?;
    println!("{} samples at {} Hz", back.len(), back.sample_rate_hz());
    println!("{} samples at {} Hz", down.len(), down.sample_rate_hz());
    let peak = down.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    println!("peak amplitude after resampling: {peak:.4}");
    Ok(())
}
