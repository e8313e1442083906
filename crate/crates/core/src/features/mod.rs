//! Per-segment feature maps and their pairing.
//!
//! Every map turns one window of `L*SR` samples into a short fixed-size
//! vector; a [`SegmentPair`] becomes the concatenation `[cover; original]`.
//! The absolute-difference baseline works on raw samples instead.

mod chroma;
mod contrast;
pub mod io;
mod mfcc;
mod temporal;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use chroma::{chroma_segment, pitch_class, PITCH_CLASSES};
pub use contrast::{contrast_bands, spectral_contrast_frame, spectral_contrast_segment};
pub use mfcc::mfcc_segment;
pub use temporal::{temporal_centroid, temporal_segment, zero_crossing_rate};

use crate::dsp::{build_mel_filterbank, Dct, FrameConfig, MelFilterbank, Window, LOG_FLOOR};
use crate::error::{Error, Result};
use crate::segmentation::SegmentPair;
use crate::STANDARD_SAMPLE_RATE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Mfcc,
    Chroma,
    SpectralContrast,
    Temporal,
    BaselineAbsdiff,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 5] = [
        FeatureKind::Mfcc,
        FeatureKind::Chroma,
        FeatureKind::SpectralContrast,
        FeatureKind::Temporal,
        FeatureKind::BaselineAbsdiff,
    ];

    /// The four learned-feature kinds, excluding the raw-waveform baseline.
    pub const FEATURES: [FeatureKind; 4] = [
        FeatureKind::Mfcc,
        FeatureKind::Chroma,
        FeatureKind::SpectralContrast,
        FeatureKind::Temporal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::Mfcc => "mfcc",
            FeatureKind::Chroma => "chroma",
            FeatureKind::SpectralContrast => "spectral_contrast",
            FeatureKind::Temporal => "temporal",
            FeatureKind::BaselineAbsdiff => "baseline_absdiff",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            FeatureKind::Mfcc => 0,
            FeatureKind::Chroma => 1,
            FeatureKind::SpectralContrast => 2,
            FeatureKind::Temporal => 3,
            FeatureKind::BaselineAbsdiff => 4,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.code() == code)
    }

    /// Length of the single-recording vector; `None` for the baseline, whose
    /// length is the segment length.
    pub fn per_side_dim(self) -> Option<usize> {
        match self {
            FeatureKind::Mfcc => Some(13),
            FeatureKind::Chroma => Some(12),
            FeatureKind::SpectralContrast => Some(7),
            FeatureKind::Temporal => Some(2),
            FeatureKind::BaselineAbsdiff => None,
        }
    }

    /// Length of a pair vector for segments of `segment_len` samples.
    pub fn pair_dim(self, segment_len: usize) -> usize {
        self.per_side_dim().map_or(segment_len, |d| 2 * d)
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mfcc" => Ok(FeatureKind::Mfcc),
            "chroma" => Ok(FeatureKind::Chroma),
            "spectral_contrast" | "contrast" => Ok(FeatureKind::SpectralContrast),
            "temporal" => Ok(FeatureKind::Temporal),
            "baseline_absdiff" | "baseline" => Ok(FeatureKind::BaselineAbsdiff),
            other => Err(Error::config(format!("unknown feature kind '{other}'"))),
        }
    }
}

/// Feature map output for one segment pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub pair_id: String,
    pub k: usize,
    pub kind: FeatureKind,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Cover and original halves of a concatenated pair vector.
    pub fn halves(&self) -> Option<(&[f64], &[f64])> {
        self.kind
            .per_side_dim()
            .filter(|&d| self.values.len() == 2 * d)
            .map(|d| self.values.split_at(d))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub sample_rate_hz: u32,
    pub frame: FrameConfig,
    pub chroma_frame: FrameConfig,
    pub n_mels: usize,
    pub n_mfcc: usize,
    pub fmin_hz: f64,
    /// Upper edge of the mel bank; `None` means the Nyquist frequency.
    pub fmax_hz: Option<f64>,
    pub log_floor: f64,
    pub contrast_alpha: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            sample_rate_hz: STANDARD_SAMPLE_RATE,
            frame: FrameConfig::default(),
            chroma_frame: FrameConfig {
                frame_length: 8192,
                hop_length: 2048,
                window: Window::Hann,
            },
            n_mels: 40,
            n_mfcc: 13,
            fmin_hz: 0.0,
            fmax_hz: None,
            log_floor: LOG_FLOOR,
            contrast_alpha: 0.02,
        }
    }
}

/// Prebuilt, immutable extraction state. Shareable across threads.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    cfg: FeatureConfig,
    bank: MelFilterbank,
    dct: Dct,
}

impl FeatureExtractor {
    pub fn new(cfg: FeatureConfig) -> Result<Self> {
        cfg.frame.validate()?;
        cfg.chroma_frame.validate()?;
        if cfg.n_mfcc != 13 {
            return Err(Error::config("the MFCC map produces exactly 13 coefficients"));
        }
        if !(cfg.contrast_alpha > 0.0 && cfg.contrast_alpha <= 1.0) {
            return Err(Error::config("contrast alpha must be in (0, 1]"));
        }
        let nyquist = cfg.sample_rate_hz as f64 / 2.0;
        let bank = build_mel_filterbank(
            cfg.n_mels,
            cfg.frame.frame_length,
            cfg.sample_rate_hz,
            cfg.fmin_hz,
            cfg.fmax_hz.unwrap_or(nyquist),
        )?;
        let dct = Dct::new(cfg.n_mels, cfg.n_mfcc)?;
        Ok(Self { cfg, bank, dct })
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.cfg
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.bank
    }

    /// Per-side feature vector of one window. Not defined for the baseline.
    pub fn segment_features(&self, kind: FeatureKind, segment: &[f64]) -> Result<Vec<f64>> {
        let c = &self.cfg;
        match kind {
            FeatureKind::Mfcc => mfcc::mfcc_with(segment, &c.frame, &self.bank, &self.dct, c.log_floor),
            FeatureKind::Chroma => chroma_segment(segment, &c.chroma_frame, c.sample_rate_hz),
            FeatureKind::SpectralContrast => {
                spectral_contrast_segment(segment, &c.frame, c.sample_rate_hz, c.contrast_alpha)
            }
            FeatureKind::Temporal => temporal_segment(segment, c.sample_rate_hz),
            FeatureKind::BaselineAbsdiff => Err(Error::config(
                "the absolute-difference baseline is defined on pairs, not single windows",
            )),
        }
    }

    /// Feature vector of a pair: `[phi(cover); phi(original)]`, or
    /// `|cover - original|` for the baseline.
    pub fn pair_feature(&self, pair: &SegmentPair, kind: FeatureKind) -> Result<FeatureVector> {
        if kind == FeatureKind::BaselineAbsdiff {
            return baseline_absdiff(pair);
        }
        let mut values = self.segment_features(kind, &pair.cover)?;
        values.extend(self.segment_features(kind, &pair.original)?);
        Ok(FeatureVector {
            pair_id: pair.pair_id.clone(),
            k: pair.k,
            kind,
            values,
        })
    }
}

/// Element-wise `|cover - original|` over the raw windows.
pub fn baseline_absdiff(pair: &SegmentPair) -> Result<FeatureVector> {
    if pair.cover.len() != pair.original.len() {
        return Err(Error::DimensionMismatch {
            expected: pair.cover.len(),
            actual: pair.original.len(),
        });
    }
    Ok(FeatureVector {
        pair_id: pair.pair_id.clone(),
        k: pair.k,
        kind: FeatureKind::BaselineAbsdiff,
        values: pair
            .cover
            .iter()
            .zip(&pair.original)
            .map(|(a, b)| (a - b).abs())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone(freq: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| (2.0 * PI * freq * i as f64 / 22050.0).sin())
            .collect()
    }

    fn pair(cover: Vec<f64>, original: Vec<f64>) -> SegmentPair {
        SegmentPair {
            pair_id: "p".into(),
            k: 1,
            cover,
            original,
        }
    }

    #[test]
    fn pair_dimensions() {
        let ex = FeatureExtractor::new(FeatureConfig::default()).unwrap();
        let p = pair(tone(440.0, 22050), tone(660.0, 22050));
        for kind in FeatureKind::FEATURES {
            let v = ex.pair_feature(&p, kind).unwrap();
            assert_eq!(v.dim(), 2 * kind.per_side_dim().unwrap(), "{kind}");
            assert_eq!(v.dim(), kind.pair_dim(22050));
            assert!(v.values.iter().all(|x| x.is_finite()));
        }
        assert_eq!(ex.pair_feature(&p, FeatureKind::BaselineAbsdiff).unwrap().dim(), 22050);
    }

    #[test]
    fn identical_and_swapped_pairs() {
        let ex = FeatureExtractor::new(FeatureConfig::default()).unwrap();
        let a = tone(300.0, 16384);
        let b: Vec<f64> = tone(1234.0, 16384).iter().map(|v| 0.3 * v).collect();
        for kind in FeatureKind::FEATURES {
            let same = ex.pair_feature(&pair(a.clone(), a.clone()), kind).unwrap();
            let (c, o) = same.halves().unwrap();
            assert_eq!(c, o);

            let ab = ex.pair_feature(&pair(a.clone(), b.clone()), kind).unwrap();
            let ba = ex.pair_feature(&pair(b.clone(), a.clone()), kind).unwrap();
            let (ab_c, ab_o) = ab.halves().unwrap();
            let (ba_c, ba_o) = ba.halves().unwrap();
            assert_eq!(ab_c, ba_o);
            assert_eq!(ab_o, ba_c);
        }
    }

    #[test]
    fn baseline_properties() {
        let a = vec![0.5, -0.25, 0.0, 1.0];
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        let zero = baseline_absdiff(&pair(a.clone(), a.clone())).unwrap();
        assert!(zero.values.iter().all(|&v| v == 0.0));
        let doubled = baseline_absdiff(&pair(neg.clone(), a.clone())).unwrap();
        assert_eq!(doubled.values, vec![1.0, 0.5, 0.0, 2.0]);
        let swapped = baseline_absdiff(&pair(a.clone(), neg)).unwrap();
        assert_eq!(doubled.values, swapped.values);
        assert!(baseline_absdiff(&pair(vec![0.0], vec![])).is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in FeatureKind::ALL {
            assert_eq!(kind.as_str().parse::<FeatureKind>().unwrap(), kind);
            assert_eq!(FeatureKind::from_code(kind.code()), Some(kind));
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(json, format!("\"{}\"", kind.as_str()));
        }
        assert!("loudness".parse::<FeatureKind>().is_err());
    }

    #[test]
    fn baseline_has_no_single_window_map() {
        let ex = FeatureExtractor::new(FeatureConfig::default()).unwrap();
        assert!(ex
            .segment_features(FeatureKind::BaselineAbsdiff, &[0.0; 4096])
            .is_err());
    }
}
