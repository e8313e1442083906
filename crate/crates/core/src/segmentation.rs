//! Fixed-length windowing of cover/original recordings.
//!
//! A clip of `len` samples yields `ceil(len / (L*SR))` windows. Window `k`
//! (1-based) covers samples `[(k-1)*L*SR, min(k*L*SR, len))` and the last
//! window is zero-padded at the tail. A cover/original pair is aligned by
//! window index and truncated to the shorter of the two window counts.

use serde::{Deserialize, Serialize};

use crate::audio_io::AudioClip;
use crate::error::{Error, Result};
use crate::STANDARD_SAMPLE_RATE;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SegmentConfig {
    pub segment_seconds: f64,
    pub sample_rate_hz: u32,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        Self {
            segment_seconds: 30.0,
            sample_rate_hz: STANDARD_SAMPLE_RATE,
        }
    }
}

impl SegmentConfig {
    /// Window length `L * SR` in samples.
    pub fn segment_len(&self) -> Result<usize> {
        let n = (self.segment_seconds * self.sample_rate_hz as f64).round();
        if self.segment_seconds.is_nan() || self.segment_seconds <= 0.0 || self.sample_rate_hz == 0 || n < 1.0 {
            return Err(Error::config(format!(
                "segment of {} s at {} Hz has no samples",
                self.segment_seconds, self.sample_rate_hz
            )));
        }
        Ok(n as usize)
    }

    /// Number of windows a clip of `len` samples produces.
    pub fn segment_count(&self, len: usize) -> Result<usize> {
        Ok(len.div_ceil(self.segment_len()?))
    }
}

/// Aligned cover/original windows; `k` is 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPair {
    pub pair_id: String,
    pub k: usize,
    pub cover: Vec<f64>,
    pub original: Vec<f64>,
}

fn check_rate(clip: &AudioClip, cfg: &SegmentConfig) -> Result<()> {
    if clip.sample_rate_hz() != cfg.sample_rate_hz {
        return Err(Error::InvalidClip(format!(
            "clip is at {} Hz but segmentation expects {} Hz; resample first",
            clip.sample_rate_hz(),
            cfg.sample_rate_hz
        )));
    }
    Ok(())
}

/// Cuts a clip into `L*SR`-sample windows, zero-padding the last one.
pub fn segment_signal(clip: &AudioClip, cfg: &SegmentConfig) -> Result<Vec<Vec<f64>>> {
    check_rate(clip, cfg)?;
    if clip.is_empty() {
        return Err(Error::EmptySignal("cannot segment an empty clip"));
    }
    let seg_len = cfg.segment_len()?;
    Ok(clip
        .samples()
        .chunks(seg_len)
        .map(|chunk| {
            let mut window = chunk.to_vec();
            window.resize(seg_len, 0.0);
            window
        })
        .collect())
}

/// Segments both recordings and pairs window `k` of the cover with window `k`
/// of the original, keeping `min(N_cover, N_original)` pairs.
pub fn pair_segments(
    cover: &AudioClip,
    original: &AudioClip,
    cfg: &SegmentConfig,
    pair_id: &str,
) -> Result<Vec<SegmentPair>> {
    let covers = segment_signal(cover, cfg)?;
    let originals = segment_signal(original, cfg)?;
    Ok(covers
        .into_iter()
        .zip(originals)
        .enumerate()
        .map(|(i, (cover, original))| SegmentPair {
            pair_id: pair_id.to_string(),
            k: i + 1,
            cover,
            original,
        })
        .collect())
}
