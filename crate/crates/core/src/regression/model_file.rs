use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{LinearModel, Scaler, TrainConfig, TrainHistory};
use crate::error::{Error, Result};
use crate::features::FeatureKind;
use crate::jsonfmt;

pub const MODEL_FORMAT_TAG: &str = "coverlens_model_v1";

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    format: String,
    kind: FeatureKind,
    weights: Vec<f64>,
    bias: f64,
    scaler_means: Vec<f64>,
    scaler_stds: Vec<f64>,
    #[serde(default)]
    scaler_pinned: Vec<bool>,
    train_config: Option<TrainConfig>,
    history: TrainHistory,
}

impl LinearModel {
    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format: MODEL_FORMAT_TAG.to_string(),
            kind: self.kind,
            weights: self.weights.clone(),
            bias: self.bias,
            scaler_means: self.scaler.means.clone(),
            scaler_stds: self.scaler.stds.clone(),
            scaler_pinned: self.scaler.pinned.clone(),
            train_config: self.train_config,
            history: self.history.clone(),
        };
        Ok(jsonfmt::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: ModelFile = serde_json::from_str(text)?;
        if f.format != MODEL_FORMAT_TAG {
            return Err(Error::config(format!(
                "model format '{}' is not {MODEL_FORMAT_TAG}",
                f.format
            )));
        }
        let dim = f.weights.len();
        for len in [f.scaler_means.len(), f.scaler_stds.len()] {
            if len != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: len });
            }
        }
        let pinned = if f.scaler_pinned.is_empty() {
            vec![false; dim]
        } else if f.scaler_pinned.len() == dim {
            f.scaler_pinned
        } else {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: f.scaler_pinned.len(),
            });
        };
        if f.weights.iter().any(|w| !w.is_finite()) || f.scaler_stds.iter().any(|s| s.is_nan() || *s <= 0.0) {
            return Err(Error::config("model has non-finite weights or non-positive scales"));
        }
        Ok(Self {
            kind: f.kind,
            weights: f.weights,
            bias: f.bias,
            scaler: Scaler {
                means: f.scaler_means,
                stds: f.scaler_stds,
                pinned,
            },
            train_config: f.train_config,
            history: f.history,
        })
    }
}

pub fn save_model(model: &LinearModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model.to_json()?).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<LinearModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    LinearModel::from_json(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regression::EpochLoss;

    #[test]
    fn json_round_trip_with_diverged_history() {
        let mut m = LinearModel::zeros(FeatureKind::Chroma, 3, 55.5);
        m.weights = vec![0.1, -2.0, 1.0 / 3.0];
        m.train_config = Some(TrainConfig::default());
        m.history.epochs.push(EpochLoss { epoch: 1, train_mse: 4.0, val_mse: Some(5.0) });
        m.history.epochs.push(EpochLoss { epoch: 2, train_mse: f64::INFINITY, val_mse: None });
        m.history.diverged = true;
        let text = m.to_json().unwrap();
        assert!(text.contains("\"format\": \"coverlens_model_v1\""));
        let back = LinearModel::from_json(&text).unwrap();
        assert_eq!(back.weights, m.weights);
        assert_eq!(back.bias, m.bias);
        assert!(back.history.epochs[1].train_mse.is_nan());
        assert!(back.history.diverged);
        assert_eq!(back.to_json().unwrap(), LinearModel::from_json(&back.to_json().unwrap()).unwrap().to_json().unwrap());
    }

    #[test]
    fn rejects_wrong_tag() {
        let m = LinearModel::zeros(FeatureKind::Mfcc, 1, 0.0);
        let text = m.to_json().unwrap().replace(MODEL_FORMAT_TAG, "other_v9");
        assert!(LinearModel::from_json(&text).is_err());
    }
}
