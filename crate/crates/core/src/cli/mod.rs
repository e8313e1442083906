//! Command-line driver for the whole pipeline.
//!
//! Every subcommand resolves a [`RunConfig`] (defaults, then the optional
//! `--config` TOML file, then flags), runs, and writes a reproducibility stamp
//! next to its primary output. Exit status is 0 on success, 1 on a runtime
//! failure and 2 on a usage error.

mod commands;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::SyntheticConfig;
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureKind};
use crate::jsonfmt;
use crate::regression::TrainConfig;
use crate::segmentation::SegmentConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Everything a run depends on besides its input files. `seed` drives the
/// split, the SGD shuffles and synthetic generation alike.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub kind: FeatureKind,
    pub val_fraction: f64,
    /// Worker threads for extraction; `None` uses every logical core.
    pub workers: Option<usize>,
    pub train: TrainConfig,
    pub features: FeatureConfig,
    pub segment: SegmentConfig,
    pub synthetic: SyntheticConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            kind: FeatureKind::Mfcc,
            val_fraction: 0.2,
            workers: None,
            train: TrainConfig::default(),
            features: FeatureConfig::default(),
            segment: SegmentConfig::default(),
            synthetic: SyntheticConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, &path.display().to_string())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(jsonfmt::to_string(self)?.as_bytes())))
    }

    fn sync_seeds(&mut self) {
        self.train.seed = self.seed;
        self.synthetic.seed = self.seed;
    }
}

#[derive(Debug, Serialize)]
pub struct Stamp<'a> {
    pub command: &'a str,
    pub seed: u64,
    pub config_sha256: String,
    pub version: &'a str,
    pub config: &'a RunConfig,
}

/// `<output>.stamp.json` beside `output`.
pub fn stamp_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(OsString::from).unwrap_or_else(|| "run".into());
    name.push(".stamp.json");
    output.with_file_name(name)
}

pub fn write_stamp(command: &str, cfg: &RunConfig, output: &Path) -> Result<()> {
    let stamp = Stamp {
        command,
        seed: cfg.seed,
        config_sha256: cfg.hash()?,
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
    };
    let path = stamp_path(output);
    fs::write(&path, jsonfmt::to_string_pretty(&stamp)?).map_err(|e| Error::io(&path, e))
}

#[derive(Debug, Parser)]
#[command(name = "coverlens", version, about = "Cover/original audio features and sentiment regression")]
struct Cli {
    /// TOML file with run settings; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Seed for splitting, shuffling and synthetic generation.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Segment and featurize every manifest row.
    Extract(ExtractArgs),
    /// Score a comments CSV into per-pair labels.
    Label(LabelArgs),
    /// Fit a linear model by SGD.
    Train(TrainArgs),
    /// Score a saved model on labelled features.
    Eval(EvalArgs),
    /// Train and evaluate the raw-waveform absolute-difference baseline.
    Baseline(BaselineArgs),
    /// Generate a synthetic labelled dataset with a planted linear model.
    Synth(SynthArgs),
    /// Export loss curves or per-bin feature values as CSV.
    Plotdata(PlotdataArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FeatureFormat {
    Jsonl,
    Binary,
}

#[derive(Debug, Args)]
struct KindArg {
    /// mfcc, chroma, spectral_contrast or temporal.
    #[arg(long)]
    kind: Option<FeatureKind>,
}

#[derive(Debug, Args)]
struct TrainFlags {
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    l2_alpha: Option<f64>,
    #[arg(long)]
    max_epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    patience: Option<usize>,
    /// Fraction of pairs held out for validation.
    #[arg(long)]
    val_fraction: Option<f64>,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    /// CSV with pair_id,cover_path,original_path,comments_path,label.
    #[arg(long)]
    manifest: PathBuf,
    /// Feature output file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: FeatureFormat,
    /// Also write the per-pair labels CSV here.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Also write the joined dataset JSONL here.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[command(flatten)]
    kind: KindArg,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    segment_seconds: Option<f64>,
    /// Lexicon file overriding the bundled one and the environment.
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LabelArgs {
    /// CSV with pair_id,comment.
    #[arg(long)]
    comments: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(id = "input", required = true, multiple = true)]
struct LabelledInput {
    /// Dataset JSONL with x and y per line.
    #[arg(long, group = "input", conflicts_with_all = ["features", "labels"])]
    dataset: Option<PathBuf>,
    /// Feature file (JSONL or binary); needs --labels.
    #[arg(long, group = "input", requires = "labels")]
    features: Option<PathBuf>,
    /// Labels CSV matching --features.
    #[arg(long, requires = "features")]
    labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    input: LabelledInput,
    /// Model JSON output.
    #[arg(long)]
    out: PathBuf,
    /// Loss history CSV; defaults to `<out>.history.csv`.
    #[arg(long)]
    history: Option<PathBuf>,
    /// Continue training from this model.
    #[arg(long)]
    warm_start: Option<PathBuf>,
    #[command(flatten)]
    train: TrainFlags,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    input: LabelledInput,
    /// Metrics JSON output; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true)]
struct BaselineSource {
    /// Real recordings listed in a manifest.
    #[arg(long, group = "source")]
    manifest: Option<PathBuf>,
    /// A generated corpus labelled by a planted MFCC model.
    #[arg(long, group = "source")]
    synthetic: bool,
}

#[derive(Debug, Args)]
struct BaselineArgs {
    #[command(flatten)]
    source: BaselineSource,
    /// Directory for model.json, history.csv and metrics.json.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    segment_seconds: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[command(flatten)]
    train: TrainFlags,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    pairs: Option<usize>,
    #[command(flatten)]
    kind: KindArg,
    /// Standard deviation of the label noise.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    segment_seconds: Option<f64>,
    #[arg(long)]
    segments_per_pair: Option<usize>,
    /// Dataset JSONL output.
    #[arg(long)]
    out: PathBuf,
    /// Planted model JSON; defaults to `<out>.planted.json`.
    #[arg(long)]
    planted: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(id = "plot_input", required = true)]
struct PlotInput {
    /// Model JSON whose loss history is exported.
    #[arg(long, group = "plot_input")]
    model: Option<PathBuf>,
    /// Feature file exported as one row per bin.
    #[arg(long, group = "plot_input")]
    features: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlotdataArgs {
    #[command(flatten)]
    input: PlotInput,
    #[arg(long)]
    out: PathBuf,
}

fn apply_train_flags(cfg: &mut RunConfig, flags: &TrainFlags) {
    let t = &mut cfg.train;
    if let Some(v) = flags.learning_rate {
        t.learning_rate = v;
    }
    if let Some(v) = flags.tolerance {
        t.tolerance = v;
    }
    if let Some(v) = flags.l2_alpha {
        t.l2_alpha = v;
    }
    if let Some(v) = flags.max_epochs {
        t.max_epochs = v;
    }
    if let Some(v) = flags.batch_size {
        t.batch_size = v;
    }
    if let Some(v) = flags.patience {
        t.patience = v;
    }
    if let Some(v) = flags.val_fraction {
        cfg.val_fraction = v;
    }
}

fn set_segment_seconds(cfg: &mut RunConfig, seconds: Option<f64>) {
    if let Some(s) = seconds {
        cfg.segment.segment_seconds = s;
        cfg.synthetic.segment_seconds = s;
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    match &cli.command {
        Command::Extract(a) => {
            if let Some(k) = a.kind.kind {
                cfg.kind = k;
            }
            if a.workers.is_some() {
                cfg.workers = a.workers;
            }
            set_segment_seconds(&mut cfg, a.segment_seconds);
        }
        Command::Train(a) => {
            apply_train_flags(&mut cfg, &a.train);
            cfg.train.warm_start |= a.warm_start.is_some();
        }
        Command::Baseline(a) => {
            apply_train_flags(&mut cfg, &a.train);
            if let Some(p) = a.pairs {
                cfg.synthetic.num_pairs = p;
            }
            if let Some(n) = a.noise {
                cfg.synthetic.noise_sigma = n;
            }
            if a.workers.is_some() {
                cfg.workers = a.workers;
            }
            set_segment_seconds(&mut cfg, a.segment_seconds);
        }
        Command::Synth(a) => {
            if let Some(k) = a.kind.kind {
                cfg.kind = k;
            }
            if let Some(p) = a.pairs {
                cfg.synthetic.num_pairs = p;
            }
            if let Some(n) = a.noise {
                cfg.synthetic.noise_sigma = n;
            }
            if let Some(s) = a.segments_per_pair {
                cfg.synthetic.segments_per_pair = s;
            }
            set_segment_seconds(&mut cfg, a.segment_seconds);
        }
        Command::Label(_) | Command::Eval(_) | Command::Plotdata(_) => {}
    }
    cfg.sync_seeds();
    cfg.train.validate()?;
    if !(cfg.val_fraction > 0.0 && cfg.val_fraction < 1.0) {
        return Err(Error::config(format!("val_fraction {} must be in (0, 1)", cfg.val_fraction)));
    }
    if cfg.workers == Some(0) {
        return Err(Error::config("workers must be positive"));
    }
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<()> {
    let cfg = resolve_config(&cli)?;
    match cli.command {
        Command::Extract(a) => commands::extract(&cfg, &a),
        Command::Label(a) => commands::label(&cfg, &a),
        Command::Train(a) => commands::train(&cfg, &a),
        Command::Eval(a) => commands::eval(&cfg, &a),
        Command::Baseline(a) => commands::baseline(&cfg, &a),
        Command::Synth(a) => commands::synth(&cfg, &a),
        Command::Plotdata(a) => commands::plotdata(&cfg, &a),
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
/// Returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_overrides_defaults_and_rejects_unknown_keys() {
        let cfg = RunConfig::from_toml(
            "seed = 3\nkind = \"chroma\"\n[train]\nlearning_rate = 0.05\n[segment]\nsegment_seconds = 10.0\n",
            "test",
        )
        .unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.kind, FeatureKind::Chroma);
        assert_eq!(cfg.train.learning_rate, 0.05);
        assert_eq!(cfg.train.tolerance, TrainConfig::default().tolerance);
        assert_eq!(cfg.segment.segment_seconds, 10.0);
        assert_eq!(cfg.segment.sample_rate_hz, 22_050);
        assert!(RunConfig::from_toml("sede = 3\n", "test").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "seed = 3\n[train]\nmax_epochs = 7\npatience = 2\n").unwrap();
        let cli = Cli::try_parse_from([
            "coverlens",
            "--config",
            path.to_str().unwrap(),
            "train",
            "--dataset",
            "d.jsonl",
            "--out",
            "m.json",
            "--max-epochs",
            "9",
            "--seed",
            "11",
        ])
        .unwrap();
        let cfg = resolve_config(&cli).unwrap();
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.train.seed, 11);
        assert_eq!(cfg.train.max_epochs, 9);
        assert_eq!(cfg.train.patience, 2);
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.train.learning_rate = 0.02;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
        assert_eq!(a.hash().unwrap().len(), 64);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["coverlens", "train", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["coverlens"]), EXIT_USAGE);
        assert_eq!(run(["coverlens", "train", "--out", "m.json"]), EXIT_USAGE);
        assert_eq!(run(["coverlens", "--help"]), EXIT_OK);
    }

    #[test]
    fn stamp_sits_beside_output() {
        assert_eq!(stamp_path(Path::new("out/model.json")), PathBuf::from("out/model.json.stamp.json"));
    }
}
