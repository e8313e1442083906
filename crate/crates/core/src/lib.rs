//! # coverlens
//!
//! Audio-similarity sentiment modelling for cover songs. A cover recording and
//! the original it covers are cut into aligned fixed-length windows, each window
//! pair is mapped to a compact feature vector (MFCC, chroma, spectral contrast or
//! temporal descriptors), and a linear model trained with mini-batch SGD predicts
//! the 0–100 sentiment score derived from the cover's comments.
//!
//! ```text
//! WAV -> resample -> segment pairs -> features -> (x, y) examples -> SGD -> RMSE
//!                                                      ^
//!                         comments -> lexicon score ---+
//! ```
//!
//! The runnable programs under `examples/` walk through each stage; the
//! `coverlens` binary wires the whole pipeline together.

pub mod audio_io;
pub mod cli;
pub mod dataset;
pub mod dsp;
pub mod error;
pub mod features;
pub mod jsonfmt;
pub mod plotdata;
pub mod regression;
pub mod segmentation;
pub mod sentiment;

pub use audio_io::{read_wav, resample, write_wav, AudioClip, BitDepth};
pub use dataset::{
    build_dataset, generate_synthetic, split, Manifest, SyntheticConfig, TrainingExample,
};
pub use error::{Error, Result};
pub use features::{FeatureConfig, FeatureExtractor, FeatureKind, FeatureVector};
pub use regression::{evaluate, fit, LinearModel, TrainConfig, TrainHistory};
pub use segmentation::{pair_segments, segment_signal, SegmentConfig, SegmentPair};
pub use sentiment::{aggregate_scores, score_comment, SentimentLexicon};

/// Standard sample rate every clip is resampled to before segmentation.
pub const STANDARD_SAMPLE_RATE: u32 = 22_050;
