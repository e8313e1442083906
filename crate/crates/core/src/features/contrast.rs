use crate::dsp::{frames, FrameConfig, Spectrum};
use crate::error::Result;

const EPS: f64 = 1e-10;

/// Band edges in Hz: six octave bands from 200 Hz plus a sub-200 Hz band, the
/// last one closing at Nyquist.
pub fn contrast_bands(sample_rate_hz: u32) -> [(f64, f64); 7] {
    let nyquist = sample_rate_hz as f64 / 2.0;
    [
        (0.0, 200.0),
        (200.0, 400.0),
        (400.0, 800.0),
        (800.0, 1600.0),
        (1600.0, 3200.0),
        (3200.0, 6400.0),
        (6400.0, nyquist),
    ]
}

/// Bin index ranges for each band. Bins on an inner edge belong to the upper
/// band; the top band includes the Nyquist bin.
fn band_bins(frame_length: usize, sample_rate_hz: u32) -> Vec<std::ops::Range<usize>> {
    let bins = frame_length / 2 + 1;
    let bin_hz = sample_rate_hz as f64 / frame_length as f64;
    let bands = contrast_bands(sample_rate_hz);
    let first_at_or_above = |hz: f64| (0..bins).find(|&b| b as f64 * bin_hz >= hz).unwrap_or(bins);
    bands
        .iter()
        .enumerate()
        .map(|(i, &(lo, hi))| {
            let start = first_at_or_above(lo);
            let end = if i + 1 == bands.len() { bins } else { first_at_or_above(hi) };
            start..end.max(start)
        })
        .collect()
}

/// Contrast of one magnitude spectrum: per band, log of the mean of the top
/// `max(1, ceil(alpha*n))` magnitudes minus log of the mean of the bottom as many.
pub fn spectral_contrast_frame(mags: &[f64], frame_length: usize, sample_rate_hz: u32, alpha: f64) -> Vec<f64> {
    let mut sorted = Vec::new();
    band_bins(frame_length, sample_rate_hz)
        .into_iter()
        .map(|range| {
            sorted.clear();
            sorted.extend_from_slice(&mags[range]);
            if sorted.is_empty() {
                return 0.0;
            }
            sorted.sort_by(f64::total_cmp);
            let n = sorted.len();
            let take = ((alpha * n as f64).ceil() as usize).clamp(1, n);
            let valley = sorted[..take].iter().sum::<f64>() / take as f64;
            let peak = sorted[n - take..].iter().sum::<f64>() / take as f64;
            (peak + EPS).ln() - (valley + EPS).ln()
        })
        .collect()
}

/// Mean over frames of the 7-band spectral contrast of one window.
pub fn spectral_contrast_segment(
    segment: &[f64],
    cfg: &FrameConfig,
    sample_rate_hz: u32,
    alpha: f64,
) -> Result<Vec<f64>> {
    let bins = cfg.frame_length / 2 + 1;
    let mut spectrum = Spectrum::new(cfg.frame_length, cfg.window);
    let mut mags = vec![0.0; bins];
    let mut acc = vec![0.0; 7];
    let mut count = 0usize;
    for frame in frames(segment, cfg)? {
        spectrum.magnitude_into(frame, &mut mags);
        let c = spectral_contrast_frame(&mags, cfg.frame_length, sample_rate_hz, alpha);
        for (a, v) in acc.iter_mut().zip(c) {
            *a += v;
        }
        count += 1;
    }
    Ok(acc.into_iter().map(|a| a / count as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::Window;
    use std::f64::consts::PI;

    #[test]
    fn bands_partition_the_spectrum() {
        let ranges = band_bins(2048, 22050);
        assert_eq!(ranges.len(), 7);
        assert_eq!(ranges[0].start, 0);
        assert_eq!(ranges[6].end, 1025);
        for w in ranges.windows(2) {
            assert_eq!(w[0].end, w[1].start);
        }
        // 200 Hz / 10.77 Hz per bin
        assert_eq!(ranges[0].end, 19);
    }

    #[test]
    fn flat_spectrum_has_no_contrast() {
        let c = spectral_contrast_frame(&vec![0.37; 1025], 2048, 22050, 0.02);
        assert!(c.iter().all(|v| v.abs() <= 1e-6));
    }

    #[test]
    fn tone_lights_up_its_band() {
        // 600 Hz sits in band 2 (400-800 Hz).
        let x: Vec<f64> = (0..22050)
            .map(|i| (2.0 * PI * 600.0 * i as f64 / 22050.0).sin())
            .collect();
        let cfg = FrameConfig::default();
        let c = spectral_contrast_segment(&x, &cfg, 22050, 0.02).unwrap();
        assert!(c[2] > c[0] + 5.0, "{c:?}");
        assert!(c[2] > 10.0);
    }

    #[test]
    fn impulse_train_at_frame_centres_is_flat() {
        // With a rectangular window a lone impulse per frame has a flat spectrum.
        let cfg = FrameConfig {
            frame_length: 512,
            hop_length: 512,
            window: Window::Rectangular,
        };
        let mut x = vec![0.0; 512 * 4];
        for j in 0..4 {
            x[j * 512 + 100] = 1.0;
        }
        let c = spectral_contrast_segment(&x, &cfg, 22050, 0.02).unwrap();
        assert!(c.iter().all(|v| v.abs() <= 1e-6), "{c:?}");
    }
}
