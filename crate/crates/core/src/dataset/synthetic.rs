//! Synthetic cover/original corpus with a planted linear labelling, for
//! checking the pipeline end to end without real recordings.
//!
//! Each pair is a run of `segments_per_pair` sections. Every section of the
//! original is a random 3–6 component sine mixture (100–4000 Hz) under a
//! linear amplitude ramp; the cover replays the same components with slightly
//! detuned frequencies, jittered amplitudes and fresh phases. Both get a low
//! Gaussian noise floor. Labels are an affine rescaling of `theta* . phi`
//! onto `[label_low, label_high]` plus optional Gaussian noise, clipped to
//! `[0, 100]`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TrainingExample;
use crate::audio_io::AudioClip;
use crate::error::{Error, Result};
use crate::features::{FeatureExtractor, FeatureKind, FeatureVector};
use crate::segmentation::{pair_segments, SegmentConfig, SegmentPair};

const NOISE_FLOOR: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub num_pairs: usize,
    pub seed: u64,
    pub noise_sigma: f64,
    pub segment_seconds: f64,
    pub segments_per_pair: usize,
    pub sample_rate_hz: u32,
    pub label_low: f64,
    pub label_high: f64,
    /// Maximum relative frequency offset of a cover component.
    pub cover_detune: f64,
    /// Maximum relative amplitude change of a cover component.
    pub cover_gain_jitter: f64,
    /// Maximum change of the cover's envelope slope.
    pub cover_ramp_jitter: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            num_pairs: 40,
            seed: 7,
            noise_sigma: 0.0,
            segment_seconds: 1.0,
            segments_per_pair: 8,
            sample_rate_hz: crate::STANDARD_SAMPLE_RATE,
            label_low: 10.0,
            label_high: 90.0,
            cover_detune: 0.05,
            cover_gain_jitter: 0.6,
            cover_ramp_jitter: 0.5,
        }
    }
}

impl SyntheticConfig {
    pub fn segment_config(&self) -> SegmentConfig {
        SegmentConfig {
            segment_seconds: self.segment_seconds,
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.num_pairs < 2 {
            return Err(Error::config("a synthetic corpus needs at least two pairs"));
        }
        if self.segments_per_pair == 0 {
            return Err(Error::config("segments_per_pair must be positive"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::config("noise_sigma must be finite and non-negative"));
        }
        if !(0.0..self.label_high).contains(&self.label_low) || self.label_high > 100.0 {
            return Err(Error::config("label range must satisfy 0 <= low < high <= 100"));
        }
        let jitter_ok = |v: f64| (0.0..1.0).contains(&v);
        if !(jitter_ok(self.cover_detune) && jitter_ok(self.cover_gain_jitter) && self.cover_ramp_jitter >= 0.0) {
            return Err(Error::config("cover perturbations must be non-negative, detune and gain jitter below 1"));
        }
        self.segment_config().segment_len().map(|_| ())
    }
}

/// Hidden ground truth `y = scale * (theta . x) + offset` before noise, on
/// raw feature vectors `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedModel {
    pub kind: FeatureKind,
    pub theta: Vec<f64>,
    pub scale: f64,
    pub offset: f64,
}

impl PlantedModel {
    /// Noise-free label of a raw feature vector.
    pub fn label(&self, x: &[f64]) -> f64 {
        self.scale * x.iter().zip(&self.theta).map(|(v, t)| v * t).sum::<f64>() + self.offset
    }

    /// The same map as a weight vector and intercept.
    pub fn raw_weights(&self) -> (Vec<f64>, f64) {
        (self.theta.iter().map(|t| self.scale * t).collect(), self.offset)
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub config: SyntheticConfig,
    pub pairs: Vec<SegmentPair>,
}

struct Component {
    freq: f64,
    amp: f64,
}

fn render(components: &[Component], phases: &[f64], ramp: f64, len: usize, rate: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..len)
        .map(|i| {
            let t = i as f64 / rate;
            let env = 1.0 + ramp * (i as f64 / len as f64 - 0.5);
            let tone: f64 = components
                .iter()
                .zip(phases)
                .map(|(c, p)| c.amp * (2.0 * PI * c.freq * t + p).sin())
                .sum();
            let noise: f64 = StandardNormal.sample(rng);
            env * tone + NOISE_FLOOR * noise
        })
        .collect()
}

impl SyntheticCorpus {
    pub fn generate(config: SyntheticConfig) -> Result<Self> {
        config.validate()?;
        let seg = config.segment_config();
        let seg_len = seg.segment_len()?;
        let rate = config.sample_rate_hz as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut pairs = Vec::new();
        for p in 0..config.num_pairs {
            let mut original = Vec::with_capacity(seg_len * config.segments_per_pair);
            let mut cover = Vec::with_capacity(seg_len * config.segments_per_pair);
            for _ in 0..config.segments_per_pair {
                let n = rng.random_range(3..=6);
                let mut components: Vec<Component> = (0..n)
                    .map(|_| Component {
                        freq: rng.random_range(100.0..4000.0),
                        amp: rng.random_range(0.1..1.0),
                    })
                    .collect();
                let total: f64 = components.iter().map(|c| c.amp).sum();
                components.iter_mut().for_each(|c| c.amp *= 0.6 / total);
                let phases: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
                let ramp = rng.random_range(-0.8..0.8);
                original.extend(render(&components, &phases, ramp, seg_len, rate, &mut rng));

                let detuned: Vec<Component> = components
                    .iter()
                    .map(|c| Component {
                        freq: c.freq * (1.0 + rng.random_range(-config.cover_detune..=config.cover_detune)),
                        amp: c.amp * (1.0 + rng.random_range(-config.cover_gain_jitter..=config.cover_gain_jitter)),
                    })
                    .collect();
                let cover_phases: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
                let cover_ramp = ramp + rng.random_range(-config.cover_ramp_jitter..=config.cover_ramp_jitter);
                cover.extend(render(&detuned, &cover_phases, cover_ramp, seg_len, rate, &mut rng));
            }
            let id = format!("synth-{p:03}");
            let cover = AudioClip::new(cover, config.sample_rate_hz)?;
            let original = AudioClip::new(original, config.sample_rate_hz)?;
            pairs.extend(pair_segments(&cover, &original, &seg, &id)?);
        }
        Ok(Self { config, pairs })
    }

    /// Features of every segment pair, in corpus order.
    pub fn features(&self, kind: FeatureKind, extractor: &FeatureExtractor) -> Result<Vec<FeatureVector>> {
        if extractor.config().sample_rate_hz != self.config.sample_rate_hz {
            return Err(Error::config("extractor and corpus sample rates differ"));
        }
        self.pairs.par_iter().map(|p| extractor.pair_feature(p, kind)).collect()
    }

    /// Draws a planted model for `features` and labels them with it.
    pub fn plant(&self, features: &[FeatureVector]) -> Result<(Vec<f64>, PlantedModel)> {
        let first = features.first().ok_or(Error::EmptyInput("no features to label"))?;
        let (kind, dim) = (first.kind, first.dim());
        // Independent stream per kind so labels do not depend on call order.
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed ^ 0x9E37_79B9_7F4A_7C15 ^ kind.code() as u64);
        let theta: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut scores = Vec::with_capacity(features.len());
        for f in features {
            if f.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: f.dim(),
                });
            }
            scores.push(f.values.iter().zip(&theta).map(|(a, b)| a * b).sum::<f64>());
        }
        let (lo, hi) = scores
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &s| (a.min(s), b.max(s)));
        let c = &self.config;
        let scale = if hi > lo { (c.label_high - c.label_low) / (hi - lo) } else { 0.0 };
        let offset = c.label_low - scale * lo;
        let noise = Normal::new(0.0, c.noise_sigma).map_err(|e| Error::config(e.to_string()))?;
        let labels = scores
            .iter()
            .map(|s| (scale * s + offset + noise.sample(&mut rng)).clamp(0.0, 100.0))
            .collect();
        Ok((labels, PlantedModel { kind, theta, scale, offset }))
    }
}

impl SyntheticCorpus {
    /// Extracts `kind` features and labels them with a planted model.
    pub fn dataset(&self, kind: FeatureKind, extractor: &FeatureExtractor) -> Result<(Vec<TrainingExample>, PlantedModel)> {
        let features = self.features(kind, extractor)?;
        let (labels, planted) = self.plant(&features)?;
        let examples = features
            .into_iter()
            .zip(labels)
            .map(|(x, y)| TrainingExample { x, y })
            .collect();
        Ok((examples, planted))
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub examples: Vec<TrainingExample>,
    pub planted: PlantedModel,
    pub corpus: SyntheticCorpus,
}

/// Generates a corpus, extracts `kind` features and labels them with a
/// freshly planted model.
pub fn generate_synthetic(
    config: SyntheticConfig,
    kind: FeatureKind,
    extractor: &FeatureExtractor,
) -> Result<SyntheticDataset> {
    if kind == FeatureKind::BaselineAbsdiff {
        return Err(Error::config(
            "plant labels on a learned feature kind; featurize the corpus separately for the baseline",
        ));
    }
    let corpus = SyntheticCorpus::generate(config)?;
    let (examples, planted) = corpus.dataset(kind, extractor)?;
    Ok(SyntheticDataset {
        examples,
        planted,
        corpus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureConfig;

    fn small() -> SyntheticConfig {
        SyntheticConfig {
            num_pairs: 4,
            segments_per_pair: 2,
            segment_seconds: 0.5,
            ..SyntheticConfig::default()
        }
    }

    #[test]
    fn shape_and_determinism() {
        let ex = FeatureExtractor::new(FeatureConfig::default()).unwrap();
        let a = generate_synthetic(small(), FeatureKind::Temporal, &ex).unwrap();
        let b = generate_synthetic(small(), FeatureKind::Temporal, &ex).unwrap();
        assert_eq!(a.examples.len(), 8);
        assert_eq!(a.examples, b.examples);
        assert_eq!(a.planted, b.planted);
        assert!(a.examples.iter().all(|e| e.x.dim() == 4));
        let ys: Vec<f64> = a.examples.iter().map(|e| e.y).collect();
        let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!((lo - 10.0).abs() < 1e-9 && (hi - 90.0).abs() < 1e-9);
    }

    #[test]
    fn noiseless_labels_follow_planted_model() {
        let ex = FeatureExtractor::new(FeatureConfig::default()).unwrap();
        let d = generate_synthetic(small(), FeatureKind::SpectralContrast, &ex).unwrap();
        let (w, b) = d.planted.raw_weights();
        for e in &d.examples {
            assert!((d.planted.label(&e.x.values) - e.y).abs() < 1e-9);
            let raw: f64 = w.iter().zip(&e.x.values).map(|(a, x)| a * x).sum::<f64>() + b;
            assert!((raw - e.y).abs() < 1e-6);
        }
    }

    #[test]
    fn noisy_labels_stay_in_range() {
        let ex = FeatureExtractor::new(FeatureConfig::default()).unwrap();
        let cfg = SyntheticConfig { noise_sigma: 40.0, ..small() };
        let d = generate_synthetic(cfg, FeatureKind::Temporal, &ex).unwrap();
        assert!(d.examples.iter().all(|e| (0.0..=100.0).contains(&e.y)));
    }

    #[test]
    fn config_errors() {
        let ex = FeatureExtractor::new(FeatureConfig::default()).unwrap();
        let one = SyntheticConfig { num_pairs: 1, ..small() };
        assert!(generate_synthetic(one, FeatureKind::Mfcc, &ex).is_err());
        assert!(generate_synthetic(small(), FeatureKind::BaselineAbsdiff, &ex).is_err());
    }

    #[test]
    fn cover_is_a_perturbed_copy() {
        let corpus = SyntheticCorpus::generate(small()).unwrap();
        let p = &corpus.pairs[0];
        assert_ne!(p.cover, p.original);
        let ex = FeatureExtractor::new(FeatureConfig::default()).unwrap();
        let v = ex.pair_feature(p, FeatureKind::Chroma).unwrap();
        let (c, o) = v.halves().unwrap();
        let dist: f64 = c.iter().zip(o).map(|(a, b)| (a - b).abs()).sum();
        assert!(dist < 6.0, "chroma of cover and original should be close: {dist}");
    }
}
