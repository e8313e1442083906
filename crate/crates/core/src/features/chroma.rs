use crate::dsp::{frames, FrameConfig, Spectrum};
use crate::error::Result;

pub const PITCH_CLASSES: [&str; 12] = [
    "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B",
];

/// Bins below this frequency carry no pitch class.
const MIN_PITCH_HZ: f64 = 20.0;

/// Pitch class of a frequency: 0 = C, 9 = A (440 Hz).
pub fn pitch_class(freq_hz: f64) -> usize {
    let semis = (12.0 * (freq_hz / 440.0).log2()).round() as i64;
    (semis + 9).rem_euclid(12) as usize
}

/// Average 12-bin chroma of one window.
///
/// Each bin's magnitude is added to its pitch class, each frame's vector is
/// scaled so its largest class is 1 (silent frames stay zero), and the frame
/// vectors are averaged, so every entry lies in `[0, 1]`.
pub fn chroma_segment(segment: &[f64], cfg: &FrameConfig, sample_rate_hz: u32) -> Result<Vec<f64>> {
    let bins = cfg.frame_length / 2 + 1;
    let bin_hz = sample_rate_hz as f64 / cfg.frame_length as f64;
    let classes: Vec<Option<usize>> = (0..bins)
        .map(|b| {
            let f = b as f64 * bin_hz;
            (f >= MIN_PITCH_HZ).then(|| pitch_class(f))
        })
        .collect();

    let mut spectrum = Spectrum::new(cfg.frame_length, cfg.window);
    let mut mags = vec![0.0; bins];
    let mut acc = [0.0; 12];
    let mut count = 0usize;
    for frame in frames(segment, cfg)? {
        spectrum.magnitude_into(frame, &mut mags);
        let mut chroma = [0.0; 12];
        for (m, class) in mags.iter().zip(&classes) {
            if let Some(c) = class {
                chroma[*c] += m;
            }
        }
        let peak = chroma.iter().copied().fold(0.0, f64::max);
        if peak > 0.0 {
            for (a, c) in acc.iter_mut().zip(&chroma) {
                *a += c / peak;
            }
        }
        count += 1;
    }
    Ok(acc.iter().map(|a| a / count as f64).collect())
}
