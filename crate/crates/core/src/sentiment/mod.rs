//! Lexicon sentiment for comment text, mapped onto a 0–100 label scale.
//!
//! Token valences are summed into `s` (negations within the three preceding
//! tokens multiply by -0.74 each; a booster adds its boost, in the valence's
//! direction, to the next token). The sum is squashed to a compound score
//! `c = s / sqrt(s^2 + 15)` in `(-1, 1)` and rescaled as `(c + 1) * 50`.

mod lexicon;

use std::collections::BTreeMap;
use std::path::Path;

pub use lexicon::{SentimentLexicon, LEXICON_ENV_VAR};

use crate::error::{Error, Result};

pub const COMPOUND_NORMALIZATION: f64 = 15.0;
pub const NEGATION_SCALAR: f64 = -0.74;
pub const NEGATION_WINDOW: usize = 3;

/// Lowercased word tokens; apostrophes inside words are kept (`don't`).
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .map(|t| t.trim_matches('\'').to_lowercase())
        .filter(|t| !t.is_empty())
        .collect()
}

/// Raw valence sum of a comment.
pub fn valence_sum(text: &str, lexicon: &SentimentLexicon) -> f64 {
    let tokens = tokenize(text);
    let mut sum = 0.0;
    for (i, token) in tokens.iter().enumerate() {
        let Some(mut v) = lexicon.valence(token) else {
            continue;
        };
        if let Some(boost) = i.checked_sub(1).and_then(|p| lexicon.boost(&tokens[p])) {
            v += boost * v.signum();
        }
        let negations = tokens[i.saturating_sub(NEGATION_WINDOW)..i]
            .iter()
            .filter(|t| lexicon.is_negation(t))
            .count();
        v *= NEGATION_SCALAR.powi(negations as i32);
        sum += v;
    }
    sum
}

/// `s / sqrt(s^2 + 15)`; strictly inside `(-1, 1)` for finite `s`.
pub fn compound(sum: f64) -> f64 {
    if sum.is_infinite() {
        return sum.signum();
    }
    sum / (sum * sum + COMPOUND_NORMALIZATION).sqrt()
}

/// Maps a compound score in `[-1, 1]` onto `[0, 100]`.
pub fn compound_to_score(c: f64) -> f64 {
    ((c + 1.0) * 50.0).clamp(0.0, 100.0)
}

/// Sentiment of one comment on the 0–100 scale; 50 is neutral.
pub fn score_comment(text: &str, lexicon: &SentimentLexicon) -> f64 {
    compound_to_score(compound(valence_sum(text, lexicon)))
}

/// Mean of per-comment scores.
pub fn aggregate_scores(scores: &[f64]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyInput("no comment scores to aggregate"));
    }
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledComment {
    pub pair_id: String,
    pub text: String,
    pub score: f64,
}

#[derive(Debug, serde::Deserialize)]
struct CommentRow {
    pair_id: String,
    comment: String,
}

/// Reads a `pair_id,comment` CSV and scores every comment.
pub fn read_comments(path: impl AsRef<Path>, lexicon: &SentimentLexicon) -> Result<Vec<LabeledComment>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<CommentRow>().enumerate() {
        let row = row.map_err(|e| Error::Parse {
            path: format!("{} row {}", path.display(), i + 2),
            message: e.to_string(),
        })?;
        let score = score_comment(&row.comment, lexicon);
        out.push(LabeledComment {
            pair_id: row.pair_id,
            text: row.comment,
            score,
        });
    }
    Ok(out)
}

/// Aggregated label per pair id, ordered by id.
pub fn labels_by_pair(comments: &[LabeledComment]) -> BTreeMap<String, f64> {
    let mut grouped: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for c in comments {
        grouped.entry(c.pair_id.clone()).or_default().push(c.score);
    }
    grouped
        .into_iter()
        .map(|(id, scores)| {
            let mean = aggregate_scores(&scores).expect("groups are non-empty");
            (id, mean)
        })
        .collect()
}
