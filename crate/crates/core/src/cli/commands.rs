use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;

use super::{
    write_stamp, BaselineArgs, EvalArgs, ExtractArgs, FeatureFormat, LabelArgs, LabelledInput,
    PlotdataArgs, RunConfig, SynthArgs, TrainArgs,
};
use crate::dataset::{
    attach_labels, build_dataset, generate_synthetic, read_dataset_jsonl, read_labels_csv, split, write_dataset_jsonl,
    write_labels_csv, Manifest, SyntheticCorpus, TrainingExample,
};
use crate::error::{Error, Result};
use crate::features::io::{read_features, write_binary, write_jsonl};
use crate::features::{FeatureExtractor, FeatureKind};
use crate::jsonfmt;
use crate::plotdata::{feature_bins_csv, history_csv};
use crate::regression::{evaluate, fit, load_model, save_model, LinearModel, TrainHistory};
use crate::sentiment::{labels_by_pair, read_comments, SentimentLexicon};

#[derive(Debug, Serialize)]
struct MetricsReport {
    kind: FeatureKind,
    n: usize,
    mse: f64,
    rmse: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    diverged: Option<bool>,
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `dir/name.ext` → `dir/name.ext<suffix>`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

fn lexicon(path: Option<&Path>) -> Result<SentimentLexicon> {
    match path {
        Some(p) => SentimentLexicon::from_path(p),
        None => SentimentLexicon::from_env_or_bundled(),
    }
}

fn with_workers<T: Send>(workers: Option<usize>, job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::config(e.to_string()))?;
    pool.install(job)
}

fn extractor(cfg: &RunConfig) -> Result<FeatureExtractor> {
    if cfg.features.sample_rate_hz != cfg.segment.sample_rate_hz {
        return Err(Error::config("features.sample_rate_hz and segment.sample_rate_hz differ"));
    }
    FeatureExtractor::new(cfg.features)
}

fn load_labelled(input: &LabelledInput) -> Result<Vec<TrainingExample>> {
    let examples = match (&input.dataset, &input.features, &input.labels) {
        (Some(d), _, _) => read_dataset_jsonl(d)?,
        (None, Some(f), Some(l)) => attach_labels(read_features(f)?, &read_labels_csv(l)?)?,
        _ => return Err(Error::config("pass --dataset, or --features with --labels")),
    };
    if examples.is_empty() {
        return Err(Error::EmptyInput("no examples in the input"));
    }
    Ok(examples)
}

fn train_and_report(
    cfg: &RunConfig,
    initial: Option<&LinearModel>,
    examples: &[TrainingExample],
) -> Result<(LinearModel, TrainHistory, MetricsReport)> {
    let (train, val) = split(examples, cfg.val_fraction, cfg.seed)?;
    let (model, history) = fit(initial, &train, &val, &cfg.train)?;
    let m = evaluate(&model, &val)?;
    let report = MetricsReport {
        kind: model.kind,
        n: m.n,
        mse: m.mse,
        rmse: m.rmse,
        diverged: Some(history.diverged),
    };
    Ok((model, history, report))
}

pub(super) fn extract(cfg: &RunConfig, a: &ExtractArgs) -> Result<()> {
    let manifest = Manifest::from_path(&a.manifest)?;
    if manifest.is_empty() {
        return Err(Error::EmptyInput("empty manifest"));
    }
    let ex = extractor(cfg)?;
    let lex = lexicon(a.lexicon.as_deref())?;
    let built = with_workers(cfg.workers, || build_dataset(&manifest, cfg.kind, &cfg.segment, &ex, &lex))?;
    if built.examples.is_empty() {
        return Err(Error::config(format!(
            "{}: none of the {} manifest rows could be ingested",
            a.manifest.display(),
            manifest.rows.len()
        )));
    }
    let vectors: Vec<_> = built.examples.iter().map(|e| e.x.clone()).collect();
    match a.format {
        FeatureFormat::Jsonl => write_jsonl(&a.out, &vectors)?,
        FeatureFormat::Binary => write_binary(&a.out, &vectors)?,
    }
    if let Some(path) = &a.labels {
        write_labels_csv(path, &built.labels)?;
    }
    if let Some(path) = &a.dataset {
        write_dataset_jsonl(path, &built.examples)?;
    }
    for s in &built.skipped {
        eprintln!("skipped {}: {}", s.pair_id, s.reason);
    }
    println!(
        "{} {} vectors from {} pairs ({} skipped)",
        vectors.len(),
        cfg.kind,
        built.labels.len(),
        built.skipped.len()
    );
    write_stamp("extract", cfg, &a.out)
}

pub(super) fn label(cfg: &RunConfig, a: &LabelArgs) -> Result<()> {
    let lex = lexicon(a.lexicon.as_deref())?;
    let comments = read_comments(&a.comments, &lex)?;
    if comments.is_empty() {
        return Err(Error::Parse {
            path: a.comments.display().to_string(),
            message: "no comments".into(),
        });
    }
    let labels = labels_by_pair(&comments);
    write_labels_csv(&a.out, &labels)?;
    println!("{} labels from {} comments", labels.len(), comments.len());
    write_stamp("label", cfg, &a.out)
}

pub(super) fn train(cfg: &RunConfig, a: &TrainArgs) -> Result<()> {
    let examples = load_labelled(&a.input)?;
    let initial = a.warm_start.as_ref().map(load_model).transpose()?;
    let (model, history, report) = train_and_report(cfg, initial.as_ref(), &examples)?;
    save_model(&model, &a.out)?;
    let history_path = a.history.clone().unwrap_or_else(|| sibling(&a.out, ".history.csv"));
    write_text(&history_path, &history_csv(&history)?)?;
    info!("history written to {}", history_path.display());
    println!(
        "{}: {} epochs, best epoch {}, validation rmse {}{}",
        model.kind,
        history.len(),
        history.best_epoch,
        jsonfmt::fmt_f64(report.rmse),
        if history.diverged { ", diverged" } else { "" }
    );
    write_stamp("train", cfg, &a.out)
}

pub(super) fn eval(cfg: &RunConfig, a: &EvalArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let examples = load_labelled(&a.input)?;
    if let Some(other) = examples.iter().find(|e| e.x.kind != model.kind) {
        return Err(Error::config(format!(
            "model was trained on {} features but the input holds {}",
            model.kind, other.x.kind
        )));
    }
    let m = evaluate(&model, &examples)?;
    let report = MetricsReport {
        kind: model.kind,
        n: m.n,
        mse: m.mse,
        rmse: m.rmse,
        diverged: None,
    };
    let text = jsonfmt::to_string_pretty(&report)?;
    match &a.out {
        Some(path) => {
            write_text(path, &text)?;
            write_stamp("eval", cfg, path)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub(super) fn baseline(cfg: &RunConfig, a: &BaselineArgs) -> Result<()> {
    let ex = extractor(cfg)?;
    let examples = if let Some(path) = &a.source.manifest {
        let manifest = Manifest::from_path(path)?;
        if manifest.is_empty() {
            return Err(Error::EmptyInput("empty manifest"));
        }
        let lex = lexicon(a.lexicon.as_deref())?;
        let built = with_workers(cfg.workers, || {
            build_dataset(&manifest, FeatureKind::BaselineAbsdiff, &cfg.segment, &ex, &lex)
        })?;
        built.examples
    } else {
        with_workers(cfg.workers, || {
            let corpus = SyntheticCorpus::generate(cfg.synthetic)?;
            let (labelled, _) = corpus.dataset(FeatureKind::Mfcc, &ex)?;
            let raw = corpus.features(FeatureKind::BaselineAbsdiff, &ex)?;
            let labels: HashMap<(String, usize), f64> =
                labelled.into_iter().map(|e| ((e.x.pair_id, e.x.k), e.y)).collect();
            Ok(raw
                .into_iter()
                .map(|x| {
                    let y = labels[&(x.pair_id.clone(), x.k)];
                    TrainingExample { x, y }
                })
                .collect())
        })?
    };
    if examples.is_empty() {
        return Err(Error::EmptyInput("no baseline examples"));
    }
    let (model, history, report) = train_and_report(cfg, None, &examples)?;
    fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
    save_model(&model, a.out_dir.join("model.json"))?;
    write_text(&a.out_dir.join("history.csv"), &history_csv(&history)?)?;
    let metrics_path = a.out_dir.join("metrics.json");
    write_text(&metrics_path, &jsonfmt::to_string_pretty(&report)?)?;
    println!(
        "baseline: {} epochs, validation rmse {}{}",
        history.len(),
        jsonfmt::fmt_f64(report.rmse),
        if history.diverged { ", diverged" } else { "" }
    );
    write_stamp("baseline", cfg, &metrics_path)
}

pub(super) fn synth(cfg: &RunConfig, a: &SynthArgs) -> Result<()> {
    let ex = extractor(cfg)?;
    let data = generate_synthetic(cfg.synthetic, cfg.kind, &ex)?;
    write_dataset_jsonl(&a.out, &data.examples)?;
    let planted_path = a.planted.clone().unwrap_or_else(|| sibling(&a.out, ".planted.json"));
    write_text(&planted_path, &jsonfmt::to_string_pretty(&data.planted)?)?;
    println!(
        "{} {} examples from {} pairs, planted model in {}",
        data.examples.len(),
        cfg.kind,
        cfg.synthetic.num_pairs,
        planted_path.display()
    );
    write_stamp("synth", cfg, &a.out)
}

pub(super) fn plotdata(cfg: &RunConfig, a: &PlotdataArgs) -> Result<()> {
    let text = match (&a.input.model, &a.input.features) {
        (Some(m), _) => history_csv(&load_model(m)?.history)?,
        (None, Some(f)) => feature_bins_csv(&read_features(f)?)?,
        (None, None) => return Err(Error::config("pass --model or --features")),
    };
    write_text(&a.out, &text)?;
    write_stamp("plotdata", cfg, &a.out)
}
