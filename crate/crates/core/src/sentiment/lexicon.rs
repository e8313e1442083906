use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::error::{Error, Result};

/// Environment variable naming a lexicon file that replaces the bundled one.
pub const LEXICON_ENV_VAR: &str = "COVERLENS_LEXICON";

const BUNDLED: &str = include_str!("../../data/lexicon.tsv");

const NEGATIONS: &[&str] = &[
    "not", "no", "never", "none", "nobody", "nothing", "neither", "nor", "nowhere", "without",
    "cannot", "cant", "dont", "doesnt", "didnt", "isnt", "wasnt", "arent", "werent", "wont",
    "wouldnt", "shouldnt", "couldnt", "aint", "hardly", "rarely", "seldom",
];

const BOOST: f64 = 0.293;
const DAMPEN: f64 = -0.293;

const BOOSTERS: &[(&str, f64)] = &[
    ("absolutely", BOOST),
    ("amazingly", BOOST),
    ("completely", BOOST),
    ("deeply", BOOST),
    ("especially", BOOST),
    ("extremely", BOOST),
    ("highly", BOOST),
    ("incredibly", BOOST),
    ("really", BOOST),
    ("so", BOOST),
    ("super", BOOST),
    ("totally", BOOST),
    ("truly", BOOST),
    ("very", BOOST),
    ("barely", DAMPEN),
    ("kinda", DAMPEN),
    ("slightly", DAMPEN),
    ("somewhat", DAMPEN),
    ("sort", DAMPEN),
];

/// Token valences in `[-4, 4]` plus negation and booster vocabularies.
/// Immutable once built.
#[derive(Debug, Clone)]
pub struct SentimentLexicon {
    valences: HashMap<String, f64>,
    negations: HashSet<String>,
    boosters: HashMap<String, f64>,
}

impl SentimentLexicon {
    pub fn new(valences: HashMap<String, f64>) -> Result<Self> {
        if valences.is_empty() {
            return Err(Error::config("sentiment lexicon is empty"));
        }
        if let Some((t, v)) = valences.iter().find(|(_, v)| !v.is_finite() || v.abs() > 4.0) {
            return Err(Error::config(format!("valence {v} of '{t}' is outside [-4, 4]")));
        }
        Ok(Self {
            valences,
            negations: NEGATIONS.iter().map(|s| s.to_string()).collect(),
            boosters: BOOSTERS.iter().map(|(t, b)| (t.to_string(), *b)).collect(),
        })
    }

    /// Parses `token<TAB>valence` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut valences = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |message: String| Error::Parse {
                path: format!("{origin}:{}", i + 1),
                message,
            };
            let (token, value) = line
                .split_once('\t')
                .ok_or_else(|| bad("expected token<TAB>valence".into()))?;
            let valence: f64 = value
                .trim()
                .parse()
                .map_err(|e| bad(format!("bad valence '{value}': {e}")))?;
            valences.insert(token.trim().to_lowercase(), valence);
        }
        Self::new(valences)
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED, "bundled lexicon").expect("bundled lexicon is valid")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// The file named by `COVERLENS_LEXICON`, or the bundled lexicon.
    pub fn from_env_or_bundled() -> Result<Self> {
        match std::env::var_os(LEXICON_ENV_VAR) {
            Some(p) if !p.is_empty() => Self::from_path(p),
            _ => Ok(Self::bundled()),
        }
    }

    pub fn len(&self) -> usize {
        self.valences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valences.is_empty()
    }

    pub fn valence(&self, token: &str) -> Option<f64> {
        self.valences.get(token).copied()
    }

    pub fn boost(&self, token: &str) -> Option<f64> {
        self.boosters.get(token).copied()
    }

    pub fn is_negation(&self, token: &str) -> bool {
        self.negations.contains(token) || token.ends_with("n't")
    }
}
