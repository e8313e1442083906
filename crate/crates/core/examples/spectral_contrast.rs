//! Spectral contrast of a pure tone against white noise.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coverlens::features::{contrast_bands, spectral_contrast_segment};
use coverlens::FeatureConfig;

fn main() -> coverlens::Result<()> {
    let sr = 22_050;
    let cfg = FeatureConfig::default();
    let tone: Vec<f64> = (0..sr).map(|i| 0.5 * (2.0 * PI * 600.0 * i as f64 / sr as f64).sin()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let noise: Vec<f64> = (0..sr).map(|_| rng.random_range(-0.5..0.5)).collect();

    let a = spectral_contrast_segment(&tone, &cfg.frame, sr, cfg.contrast_alpha)?;
    let b = spectral_contrast_segment(&noise, &cfg.frame, sr, cfg.contrast_alpha)?;
    for (i, (lo, hi)) in contrast_bands(sr).iter().enumerate() {
        println!("{lo:>7.0}-{hi:<7.0} Hz  tone {:>7.2}  noise {:>7.2}", a[i], b[i]);
    }
    Ok(())
}
