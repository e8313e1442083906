//! Compares the learned feature models against the raw-waveform
//! absolute-difference baseline on the same synthetic labels.

use std::collections::HashMap;

use coverlens::dataset::SyntheticCorpus;
use coverlens::features::baseline_absdiff;
use coverlens::segmentation::SegmentPair;
use coverlens::{evaluate, fit, split, FeatureConfig, FeatureExtractor, FeatureKind, SyntheticConfig, TrainConfig, TrainingExample};

fn main() -> coverlens::Result<()> {
    let ex = FeatureExtractor::new(FeatureConfig::default())?;
    let corpus = SyntheticCorpus::generate(SyntheticConfig {
        noise_sigma: 2.0,
        ..SyntheticConfig::default()
    })?;
    let (mfcc, _) = corpus.dataset(FeatureKind::Mfcc, &ex)?;
    let labels: HashMap<(String, usize), f64> = mfcc.iter().map(|e| ((e.x.pair_id.clone(), e.x.k), e.y)).collect();

    let report = |name: &str, data: &[TrainingExample]| -> coverlens::Result<()> {
        let (train, val) = split(data, 0.2, 7)?;
        let (model, history) = fit(None, &train, &val, &TrainConfig::default())?;
        let rmse = evaluate(&model, &val)?.rmse;
        let note = if history.diverged { " (diverged)" } else { "" };
        println!("{name:<9} val rmse {rmse:>8.3}{note}");
        Ok(())
    };

    report("mfcc", &mfcc)?;
    let pairs: Vec<&SegmentPair> = corpus.pairs.iter().collect();
    let baseline: Vec<TrainingExample> = pairs
        .iter()
        .map(|p| {
            let x = baseline_absdiff(p)?;
            let y = labels[&(p.pair_id.clone(), p.k)];
            Ok(TrainingExample { x, y })
        })
        .collect::<coverlens::Result<_>>()?;
    report("baseline", &baseline)
}
