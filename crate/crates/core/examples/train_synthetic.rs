//! Trains one model per feature kind on a synthetic corpus with a planted
//! linear relationship, then reports validation RMSE.

use coverlens::{evaluate, fit, generate_synthetic, split, FeatureConfig, FeatureExtractor, FeatureKind, SyntheticConfig, TrainConfig};

fn main() -> coverlens::Result<()> {
    let ex = FeatureExtractor::new(FeatureConfig::default())?;
    let synth = SyntheticConfig {
        noise_sigma: 2.0,
        ..SyntheticConfig::default()
    };
    for kind in FeatureKind::FEATURES {
        let data = generate_synthetic(synth, kind, &ex)?;
        let (train, val) = split(&data.examples, 0.2, synth.seed)?;
        let (model, history) = fit(None, &train, &val, &TrainConfig::default())?;
        let m = evaluate(&model, &val)?;
        println!(
            "{:<17} dim {:>3}  epochs {:>3}  val rmse {:.3}  (label noise 2.0)",
            kind.as_str(),
            model.dim(),
            history.len(),
            m.rmse
        );
    }
    Ok(())
}
