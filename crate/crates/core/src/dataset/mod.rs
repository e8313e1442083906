//! Training-set assembly: manifest rows are resampled, segmented and
//! featurized, and every segment of a pair inherits the pair's label.

mod synthetic;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use synthetic::{generate_synthetic, PlantedModel, SyntheticConfig, SyntheticCorpus, SyntheticDataset};

use crate::audio_io::{read_wav, resample};
use crate::error::{Error, Result};
use crate::features::{FeatureExtractor, FeatureKind, FeatureVector};
use crate::jsonfmt;
use crate::segmentation::{pair_segments, SegmentConfig};
use crate::sentiment::{aggregate_scores, read_comments, SentimentLexicon};

/// One feature vector with its sentiment label in `[0, 100]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingExample {
    pub x: FeatureVector,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LabelSource {
    Comments(PathBuf),
    Explicit(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub pair_id: String,
    pub cover_path: PathBuf,
    pub original_path: PathBuf,
    pub label: LabelSource,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub rows: Vec<ManifestRow>,
}

#[derive(Debug, Deserialize)]
struct ManifestRecord {
    pair_id: String,
    cover_path: String,
    original_path: String,
    #[serde(default)]
    comments_path: Option<String>,
    #[serde(default)]
    label: Option<String>,
}

fn non_blank(s: Option<String>) -> Option<String> {
    s.map(|v| v.trim().to_string()).filter(|v| !v.is_empty())
}

fn check_label(y: f64) -> Result<f64> {
    if (0.0..=100.0).contains(&y) {
        Ok(y)
    } else {
        Err(Error::config(format!("label {y} is outside [0, 100]")))
    }
}

impl Manifest {
    /// Parses manifest CSV text with header
    /// `pair_id,cover_path,original_path,comments_path,label`. Relative paths
    /// are resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path, origin: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut rows = Vec::new();
        let mut seen = HashSet::new();
        for (i, rec) in reader.deserialize::<ManifestRecord>().enumerate() {
            let at = format!("{origin} row {}", i + 2);
            let bad = |message: String| Error::Parse {
                path: at.clone(),
                message,
            };
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            if !seen.insert(rec.pair_id.clone()) {
                return Err(bad(format!("duplicate pair_id '{}'", rec.pair_id)));
            }
            let label = match (non_blank(rec.comments_path), non_blank(rec.label)) {
                (Some(p), None) => LabelSource::Comments(base_dir.join(p)),
                (None, Some(l)) => {
                    let y: f64 = l.parse().map_err(|_| bad(format!("bad label '{l}'")))?;
                    LabelSource::Explicit(check_label(y).map_err(|e| bad(e.to_string()))?)
                }
                _ => return Err(bad("exactly one of comments_path and label must be set".into())),
            };
            rows.push(ManifestRow {
                pair_id: rec.pair_id,
                cover_path: base_dir.join(rec.cover_path),
                original_path: base_dir.join(rec.original_path),
                label,
            });
        }
        Ok(Self { rows })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base, &path.display().to_string())
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Aggregated label of a manifest row.
pub fn resolve_label(row: &ManifestRow, lexicon: &SentimentLexicon) -> Result<f64> {
    match &row.label {
        LabelSource::Explicit(y) => check_label(*y),
        LabelSource::Comments(path) => {
            let scores: Vec<f64> = read_comments(path, lexicon)?
                .into_iter()
                .filter(|c| c.pair_id == row.pair_id)
                .map(|c| c.score)
                .collect();
            aggregate_scores(&scores).map_err(|_| Error::Parse {
                path: path.display().to_string(),
                message: format!("no comments for pair '{}'", row.pair_id),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedRow {
    pub pair_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct BuiltDataset {
    pub examples: Vec<TrainingExample>,
    /// Aggregated label of every row that was ingested, by pair id.
    pub labels: BTreeMap<String, f64>,
    pub skipped: Vec<SkippedRow>,
}

fn build_row(
    row: &ManifestRow,
    kind: FeatureKind,
    seg: &SegmentConfig,
    extractor: &FeatureExtractor,
    lexicon: &SentimentLexicon,
) -> Result<(f64, Vec<TrainingExample>)> {
    let y = resolve_label(row, lexicon)?;
    let cover = resample(&read_wav(&row.cover_path)?, seg.sample_rate_hz)?;
    let original = resample(&read_wav(&row.original_path)?, seg.sample_rate_hz)?;
    let pairs = pair_segments(&cover, &original, seg, &row.pair_id)?;
    let examples = pairs
        .iter()
        .map(|p| Ok(TrainingExample { x: extractor.pair_feature(p, kind)?, y }))
        .collect::<Result<Vec<_>>>()?;
    Ok((y, examples))
}

/// Resamples, segments and featurizes every manifest row.
///
/// Rows run in parallel; output keeps manifest order, then segment order. A row
/// whose audio or comments cannot be read is skipped with a warning and listed
/// in [`BuiltDataset::skipped`].
pub fn build_dataset(
    manifest: &Manifest,
    kind: FeatureKind,
    seg: &SegmentConfig,
    extractor: &FeatureExtractor,
    lexicon: &SentimentLexicon,
) -> Result<BuiltDataset> {
    if manifest.is_empty() {
        return Err(Error::EmptyInput("empty manifest"));
    }
    if extractor.config().sample_rate_hz != seg.sample_rate_hz {
        return Err(Error::config(format!(
            "feature extractor runs at {} Hz but segments are {} Hz",
            extractor.config().sample_rate_hz,
            seg.sample_rate_hz
        )));
    }
    seg.segment_len()?;

    let results: Vec<_> = manifest
        .rows
        .par_iter()
        .map(|row| build_row(row, kind, seg, extractor, lexicon))
        .collect();

    let mut out = BuiltDataset::default();
    for (row, result) in manifest.rows.iter().zip(results) {
        match result {
            Ok((y, examples)) => {
                out.labels.insert(row.pair_id.clone(), y);
                out.examples.extend(examples);
            }
            Err(e) => {
                warn!("skipping pair '{}': {e}", row.pair_id);
                out.skipped.push(SkippedRow {
                    pair_id: row.pair_id.clone(),
                    reason: e.to_string(),
                });
            }
        }
    }
    Ok(out)
}

/// Splits by pair id so that all segments of one pair land on the same side.
///
/// Distinct ids are shuffled with `seed`; `round(n_pairs * val_fraction)`
/// of them, clamped to `1..n_pairs`, go to validation.
pub fn split(
    examples: &[TrainingExample],
    val_fraction: f64,
    seed: u64,
) -> Result<(Vec<TrainingExample>, Vec<TrainingExample>)> {
    if !(val_fraction > 0.0 && val_fraction < 1.0) {
        return Err(Error::config(format!("val_fraction {val_fraction} must be in (0, 1)")));
    }
    let mut ids: Vec<&str> = Vec::new();
    let mut seen = HashSet::new();
    for ex in examples {
        if seen.insert(ex.x.pair_id.as_str()) {
            ids.push(ex.x.pair_id.as_str());
        }
    }
    if ids.len() < 2 {
        return Err(Error::config("splitting needs at least two distinct pair ids"));
    }
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_val = ((ids.len() as f64 * val_fraction).round() as usize).clamp(1, ids.len() - 1);
    let val_ids: HashSet<&str> = ids[..n_val].iter().copied().collect();
    let (val, train): (Vec<_>, Vec<_>) = examples
        .iter()
        .cloned()
        .partition(|ex| val_ids.contains(ex.x.pair_id.as_str()));
    Ok((train, val))
}

/// Attaches per-pair labels to feature vectors.
pub fn attach_labels(features: Vec<FeatureVector>, labels: &HashMap<String, f64>) -> Result<Vec<TrainingExample>> {
    features
        .into_iter()
        .map(|x| {
            let y = *labels.get(&x.pair_id).ok_or_else(|| Error::Parse {
                path: "labels".into(),
                message: format!("no label for pair '{}'", x.pair_id),
            })?;
            Ok(TrainingExample { x, y: check_label(y)? })
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct LabelRecord {
    pair_id: String,
    label: f64,
}

pub fn write_labels_csv(path: impl AsRef<Path>, labels: &BTreeMap<String, f64>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["pair_id", "label"])?;
    for (id, y) in labels {
        w.write_record([id.as_str(), &jsonfmt::fmt_f64(*y)])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_labels_csv(path: impl AsRef<Path>) -> Result<HashMap<String, f64>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = HashMap::new();
    for (i, rec) in csv::Reader::from_reader(file).deserialize::<LabelRecord>().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            path: format!("{} row {}", path.display(), i + 2),
            message: e.to_string(),
        })?;
        out.insert(rec.pair_id, rec.label);
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
struct DatasetRecord {
    pair_id: String,
    k: usize,
    kind: FeatureKind,
    x: Vec<f64>,
    y: f64,
}

/// Dataset export: one `{pair_id, k, kind, x, y}` JSON object per line.
pub fn to_dataset_jsonl(examples: &[TrainingExample]) -> Result<String> {
    let mut out = String::new();
    for ex in examples {
        let rec = DatasetRecord {
            pair_id: ex.x.pair_id.clone(),
            k: ex.x.k,
            kind: ex.x.kind,
            x: ex.x.values.clone(),
            y: ex.y,
        };
        out.push_str(&jsonfmt::to_string(&rec)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_dataset_jsonl(path: impl AsRef<Path>, examples: &[TrainingExample]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_dataset_jsonl(examples)?).map_err(|e| Error::io(path, e))
}

pub fn read_dataset_jsonl(path: impl AsRef<Path>) -> Result<Vec<TrainingExample>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let rec: DatasetRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
                path: format!("{}:{}", path.display(), i + 1),
                message: e.to_string(),
            })?;
            Ok(TrainingExample {
                x: FeatureVector {
                    pair_id: rec.pair_id,
                    k: rec.k,
                    kind: rec.kind,
                    values: rec.x,
                },
                y: rec.y,
            })
        })
        .collect()
}
