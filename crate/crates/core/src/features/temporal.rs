use crate::error::{Error, Result};

/// Fraction of adjacent sample pairs whose signs differ; zero counts as positive.
pub fn zero_crossing_rate(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let crossings = x
        .windows(2)
        .filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0))
        .count();
    crossings as f64 / (x.len() - 1) as f64
}

/// Amplitude-weighted mean time in seconds; 0 for an all-zero signal.
pub fn temporal_centroid(x: &[f64], sample_rate_hz: u32) -> f64 {
    let (weighted, total) = x
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(w, t), (i, v)| (w + i as f64 * v.abs(), t + v.abs()));
    if total == 0.0 {
        0.0
    } else {
        weighted / (total * sample_rate_hz as f64)
    }
}

/// `[zero-crossing rate, temporal centroid in seconds]` of one window.
pub fn temporal_segment(segment: &[f64], sample_rate_hz: u32) -> Result<Vec<f64>> {
    if segment.is_empty() {
        return Err(Error::EmptySignal("temporal features need at least one sample"));
    }
    Ok(vec![
        zero_crossing_rate(segment),
        temporal_centroid(segment, sample_rate_hz),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_zcr() {
        let x: Vec<f64> = (0..22050)
            .map(|i| (2.0 * PI * 100.0 * i as f64 / 22050.0).sin())
            .collect();
        let zcr = zero_crossing_rate(&x);
        let expected = 200.0 / 22049.0;
        assert!((zcr - expected).abs() / expected < 0.02, "{zcr}");
    }

    #[test]
    fn silence() {
        assert_eq!(temporal_segment(&[0.0; 100], 22050).unwrap(), vec![0.0, 0.0]);
        assert!(temporal_segment(&[], 22050).is_err());
    }

    #[test]
    fn symmetric_envelope_centroid_at_midpoint() {
        let n = 1001;
        let x: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                (PI * t).sin() * if i % 2 == 0 { 1.0 } else { -1.0 }
            })
            .collect();
        let centroid = temporal_centroid(&x, 1000);
        let mid = (n - 1) as f64 / 2.0 / 1000.0;
        assert!((centroid - mid).abs() <= 1.0 / 1000.0);
    }

    #[test]
    fn zero_counts_as_positive() {
        assert_eq!(zero_crossing_rate(&[0.0, 1.0, 0.0, -1.0]), 1.0 / 3.0);
        assert_eq!(zero_crossing_rate(&[1.0]), 0.0);
    }
}
