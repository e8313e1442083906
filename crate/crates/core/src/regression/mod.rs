//! Linear sentiment regression `y_hat = theta . z(x) + b` trained by
//! mini-batch SGD on the mean squared error with an L2 penalty on `theta`.
//!
//! `z(x)` is the z-scored feature vector using statistics of the training
//! set. Dimensions with no variance are pinned: their weight stays at zero.
//! Reported losses are the plain MSE without the penalty term.

mod model_file;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use model_file::{load_model, save_model, MODEL_FORMAT_TAG};

use crate::dataset::TrainingExample;
use crate::error::{Error, Result};
use crate::features::{FeatureKind, FeatureVector};
use crate::jsonfmt::nullable_f64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    /// Minimum decrease of the monitored MSE that counts as an improvement.
    pub tolerance: f64,
    pub l2_alpha: f64,
    pub max_epochs: usize,
    pub batch_size: usize,
    /// Consecutive epochs without a `tolerance` improvement before stopping.
    pub patience: usize,
    pub warm_start: bool,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            tolerance: 0.003,
            l2_alpha: 0.0001,
            max_epochs: 100,
            batch_size: 1,
            patience: 5,
            warm_start: false,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let non_negative = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be a finite non-negative number, got {v}")))
            }
        };
        non_negative("learning_rate", self.learning_rate)?;
        non_negative("tolerance", self.tolerance)?;
        non_negative("l2_alpha", self.l2_alpha)?;
        if self.max_epochs == 0 || self.batch_size == 0 || self.patience == 0 {
            return Err(Error::config("max_epochs, batch_size and patience must be positive"));
        }
        Ok(())
    }
}

/// Per-dimension z-score statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    /// Dimensions whose training variance was zero.
    pub pinned: Vec<bool>,
}

impl Scaler {
    /// Population mean and standard deviation of each column.
    pub fn fit<'a>(rows: impl IntoIterator<Item = &'a [f64]>) -> Result<Self> {
        let rows: Vec<&[f64]> = rows.into_iter().collect();
        let dim = rows.first().map(|r| r.len()).ok_or(Error::EmptyInput("no rows to scale"))?;
        let n = rows.len() as f64;
        let mut means = vec![0.0; dim];
        for r in &rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: r.len(),
                });
            }
            for (m, x) in means.iter_mut().zip(*r) {
                *m += x;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut vars = vec![0.0; dim];
        for r in &rows {
            for ((v, x), m) in vars.iter_mut().zip(*r).zip(&means) {
                *v += (x - m) * (x - m);
            }
        }
        let mut stds = Vec::with_capacity(dim);
        let mut pinned = Vec::with_capacity(dim);
        for (v, m) in vars.iter().zip(&means) {
            let sd = (v / n).sqrt();
            let flat = sd.is_nan() || sd <= 1e-12 * m.abs().max(1.0);
            stds.push(if flat { 1.0 } else { sd });
            pinned.push(flat);
        }
        Ok(Self { means, stds, pinned })
    }

    /// Identity scaling of the given width.
    pub fn identity(dim: usize) -> Self {
        Self {
            means: vec![0.0; dim],
            stds: vec![1.0; dim],
            pinned: vec![false; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    #[serde(with = "nullable_f64")]
    pub train_mse: f64,
    /// Absent when training ran without a validation set.
    pub val_mse: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochLoss>,
    /// Epoch whose parameters were kept (0 = initial parameters).
    pub best_epoch: usize,
    /// A loss became non-finite and training halted.
    pub diverged: bool,
    pub stopped_early: bool,
}

impl TrainHistory {
    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    pub fn last(&self) -> Option<&EpochLoss> {
        self.epochs.last()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub kind: FeatureKind,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub scaler: Scaler,
    pub train_config: Option<TrainConfig>,
    pub history: TrainHistory,
}

impl LinearModel {
    /// All-zero weights with an identity scaler.
    pub fn zeros(kind: FeatureKind, dim: usize, bias: f64) -> Self {
        Self {
            kind,
            weights: vec![0.0; dim],
            bias,
            scaler: Scaler::identity(dim),
            train_config: None,
            history: TrainHistory::default(),
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: len,
            });
        }
        Ok(())
    }

    fn predict_scaled(&self, z: &[f64]) -> f64 {
        dot(&self.weights, z) + self.bias
    }

    /// Prediction for a raw (unscaled) feature slice.
    pub fn predict_values(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        let s = &self.scaler;
        let mut acc = self.bias;
        for (((w, v), m), sd) in self.weights.iter().zip(x).zip(&s.means).zip(&s.stds) {
            acc += w * (v - m) / sd;
        }
        Ok(acc)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `theta . scale(x) + bias`.
pub fn predict(model: &LinearModel, x: &FeatureVector) -> Result<f64> {
    model.predict_values(&x.values)
}

/// Mean squared error over `examples` (no regularization term).
pub fn mse(model: &LinearModel, examples: &[TrainingExample]) -> Result<f64> {
    if examples.is_empty() {
        return Err(Error::EmptyInput("cannot compute MSE of an empty set"));
    }
    let mut sum = 0.0;
    for ex in examples {
        let r = ex.y - predict(model, &ex.x)?;
        sum += r * r;
    }
    Ok(sum / examples.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rmse: f64,
    pub mse: f64,
    pub n: usize,
}

pub fn evaluate(model: &LinearModel, examples: &[TrainingExample]) -> Result<Metrics> {
    let mse = mse(model, examples)?;
    Ok(Metrics {
        rmse: mse.sqrt(),
        mse,
        n: examples.len(),
    })
}

/// Gradient of `(1/B) sum (y - y_hat)^2 + l2_alpha |theta|^2` over a batch:
/// `(-2/B) sum r z + 2 alpha theta` for the weights and `(-2/B) sum r` for the
/// bias. Pinned dimensions get a zero gradient.
pub fn gradient(model: &LinearModel, batch: &[TrainingExample], l2_alpha: f64) -> Result<(Vec<f64>, f64)> {
    if batch.is_empty() {
        return Err(Error::EmptyInput("gradient of an empty batch"));
    }
    let mut scaled = Vec::with_capacity(batch.len());
    for ex in batch {
        model.check_dim(ex.x.dim())?;
        scaled.push(model.scaler.transform(&ex.x.values));
    }
    let rows: Vec<(&[f64], f64)> = scaled.iter().zip(batch).map(|(z, ex)| (z.as_slice(), ex.y)).collect();
    let mut grad = vec![0.0; model.dim()];
    let grad_bias = accumulate_gradient(model, &rows, l2_alpha, &mut grad);
    Ok((grad, grad_bias))
}

fn accumulate_gradient(model: &LinearModel, rows: &[(&[f64], f64)], l2_alpha: f64, grad: &mut [f64]) -> f64 {
    let scale = -2.0 / rows.len() as f64;
    grad.fill(0.0);
    let mut grad_bias = 0.0;
    for (z, y) in rows {
        let r = y - model.predict_scaled(z);
        for (g, zi) in grad.iter_mut().zip(*z) {
            *g += scale * r * zi;
        }
        grad_bias += scale * r;
    }
    for ((g, w), pinned) in grad.iter_mut().zip(&model.weights).zip(&model.scaler.pinned) {
        if *pinned {
            *g = 0.0;
        } else {
            *g += 2.0 * l2_alpha * w;
        }
    }
    grad_bias
}

fn scaled_mse(model: &LinearModel, rows: &[(Vec<f64>, f64)]) -> f64 {
    rows.iter()
        .map(|(z, y)| {
            let r = y - model.predict_scaled(z);
            r * r
        })
        .sum::<f64>()
        / rows.len() as f64
}

fn check_examples(examples: &[TrainingExample], dim: usize) -> Result<()> {
    for ex in examples {
        if ex.x.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: ex.x.dim(),
            });
        }
    }
    Ok(())
}

/// Trains a model by mini-batch SGD.
///
/// With `cfg.warm_start` and an `initial` model, training continues from its
/// weights, bias and scaler. Otherwise the scaler is fit on `train`, weights
/// start at zero and the bias at the mean training label.
///
/// Each epoch shuffles the training set with a generator seeded once from
/// `cfg.seed`, takes one step per mini-batch, then records the training and
/// validation MSE. Training stops when the monitored MSE (validation, or
/// training when `val` is empty) has not dropped by more than `cfg.tolerance`
/// below its best value for `cfg.patience` consecutive epochs, at
/// `cfg.max_epochs`, or when a loss turns non-finite. The returned model holds
/// the parameters of the best monitored epoch.
pub fn fit(
    initial: Option<&LinearModel>,
    train: &[TrainingExample],
    val: &[TrainingExample],
    cfg: &TrainConfig,
) -> Result<(LinearModel, TrainHistory)> {
    cfg.validate()?;
    let first = train.first().ok_or(Error::EmptyInput("training set is empty"))?;
    let kind = first.x.kind;
    let dim = first.x.dim();
    check_examples(train, dim)?;
    check_examples(val, dim)?;

    let mut model = match initial.filter(|_| cfg.warm_start) {
        Some(prev) => {
            if prev.dim() != dim || prev.scaler.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: prev.dim(),
                    actual: dim,
                });
            }
            let mut m = prev.clone();
            m.history = TrainHistory::default();
            m
        }
        None => {
            let scaler = Scaler::fit(train.iter().map(|e| e.x.values.as_slice()))?;
            let mean_y = train.iter().map(|e| e.y).sum::<f64>() / train.len() as f64;
            LinearModel {
                kind,
                weights: vec![0.0; dim],
                bias: mean_y,
                scaler,
                train_config: None,
                history: TrainHistory::default(),
            }
        }
    };
    model.train_config = Some(*cfg);

    let scale_all = |set: &[TrainingExample]| -> Vec<(Vec<f64>, f64)> {
        set.iter().map(|e| (model.scaler.transform(&e.x.values), e.y)).collect()
    };
    let train_rows = scale_all(train);
    let val_rows = scale_all(val);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..train_rows.len()).collect();
    let mut grad = vec![0.0; dim];
    let mut batch: Vec<(&[f64], f64)> = Vec::with_capacity(cfg.batch_size);

    let mut history = TrainHistory::default();
    let monitor = |m: &LinearModel| {
        if val_rows.is_empty() {
            scaled_mse(m, &train_rows)
        } else {
            scaled_mse(m, &val_rows)
        }
    };
    let initial_score = monitor(&model);
    let mut best_score = if initial_score.is_finite() { initial_score } else { f64::INFINITY };
    let mut best = (model.weights.clone(), model.bias);
    let mut stall = 0;

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| (train_rows[i].0.as_slice(), train_rows[i].1)));
            let grad_bias = accumulate_gradient(&model, &batch, cfg.l2_alpha, &mut grad);
            for (w, g) in model.weights.iter_mut().zip(&grad) {
                *w -= cfg.learning_rate * g;
            }
            model.bias -= cfg.learning_rate * grad_bias;
        }

        let train_mse = scaled_mse(&model, &train_rows);
        let val_mse = (!val_rows.is_empty()).then(|| scaled_mse(&model, &val_rows));
        history.epochs.push(EpochLoss {
            epoch,
            train_mse,
            val_mse,
        });
        let score = val_mse.unwrap_or(train_mse);
        if !score.is_finite() || !train_mse.is_finite() {
            history.diverged = true;
            break;
        }
        if score > best_score - cfg.tolerance {
            stall += 1;
        } else {
            stall = 0;
        }
        if score < best_score {
            best_score = score;
            best = (model.weights.clone(), model.bias);
            history.best_epoch = epoch;
        }
        if stall >= cfg.patience {
            history.stopped_early = epoch < cfg.max_epochs;
            break;
        }
    }

    (model.weights, model.bias) = best;
    model.history = history.clone();
    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn example(values: Vec<f64>, y: f64) -> TrainingExample {
        TrainingExample {
            x: FeatureVector {
                pair_id: "p".into(),
                k: 1,
                kind: FeatureKind::Temporal,
                values,
            },
            y,
        }
    }

    fn linear_data(n: usize, seed: u64) -> Vec<TrainingExample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let x: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
                let y = 50.0 + 4.0 * x[0] - 2.0 * x[1] + 0.5 * x[2] + 7.0 * x[3];
                example(x, y)
            })
            .collect()
    }

    #[test]
    fn zero_model_predicts_bias() {
        let m = LinearModel::zeros(FeatureKind::Temporal, 4, 12.5);
        let ex = example(vec![1.0, -4.0, 9.0, 0.0], 0.0);
        assert_eq!(predict(&m, &ex.x).unwrap(), 12.5);
        assert!(predict(&m, &example(vec![1.0], 0.0).x).is_err());
    }

    #[test]
    fn unit_weight_reads_scaled_coordinate() {
        let mut m = LinearModel::zeros(FeatureKind::Temporal, 2, 0.0);
        m.weights[0] = 1.0;
        m.scaler.means = vec![1.0, 0.0];
        m.scaler.stds = vec![2.0, 1.0];
        // scaled x_1 = (6 - 1) / 2 = 2.5
        assert_eq!(m.predict_values(&[6.0, 100.0]).unwrap(), 2.5);
    }

    #[test]
    fn mse_basics() {
        let m = LinearModel::zeros(FeatureKind::Temporal, 1, 0.0);
        let data = vec![example(vec![1.0], 10.0), example(vec![2.0], 10.0)];
        assert_eq!(mse(&m, &data).unwrap(), 100.0);
        let metrics = evaluate(&m, &data).unwrap();
        assert_eq!(metrics.rmse, 10.0);
        assert_eq!(metrics.n, 2);
        assert!(mse(&m, &[]).is_err());
    }

    #[test]
    fn constant_model_rmse_is_population_std() {
        let ys = [10.0, 20.0, 40.0, 50.0];
        let data: Vec<_> = ys.iter().map(|&y| example(vec![0.0], y)).collect();
        let m = LinearModel::zeros(FeatureKind::Temporal, 1, 30.0);
        let std = (ys.iter().map(|y| (y - 30.0) * (y - 30.0)).sum::<f64>() / 4.0).sqrt();
        assert!((evaluate(&m, &data).unwrap().rmse - std).abs() < 1e-12);
    }

    #[test]
    fn zero_residual_gradient_vanishes() {
        let mut m = LinearModel::zeros(FeatureKind::Temporal, 2, 3.0);
        m.weights = vec![1.0, -1.0];
        let batch = vec![example(vec![2.0, 1.0], 4.0), example(vec![0.0, 5.0], -2.0)];
        let (g, gb) = gradient(&m, &batch, 0.0).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-15));
        assert!(gb.abs() < 1e-15);
        assert!(gradient(&m, &[], 0.0).is_err());
    }

    #[test]
    fn scaler_pins_constant_columns() {
        let rows = [vec![1.0, 0.1], vec![3.0, 0.1], vec![5.0, 0.1]];
        let s = Scaler::fit(rows.iter().map(|r| r.as_slice())).unwrap();
        assert_eq!(s.pinned, vec![false, true]);
        assert_eq!(s.stds[1], 1.0);
        assert!((s.means[0] - 3.0).abs() < 1e-15);
        assert!((s.stds[0] - (8.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pinned_weights_stay_zero() {
        let data: Vec<_> = (0..20).map(|i| example(vec![i as f64, 7.0], 2.0 * i as f64)).collect();
        let (m, _) = fit(None, &data, &[], &TrainConfig::default()).unwrap();
        assert_eq!(m.weights[1], 0.0);
    }

    #[test]
    fn zero_learning_rate_keeps_initial_parameters() {
        let data = linear_data(40, 1);
        let cfg = TrainConfig {
            learning_rate: 0.0,
            ..TrainConfig::default()
        };
        let (m, h) = fit(None, &data[..30], &data[30..], &cfg).unwrap();
        assert!(m.weights.iter().all(|&w| w == 0.0));
        let first = h.epochs[0].val_mse.unwrap();
        assert!(h.epochs.iter().all(|e| e.val_mse == Some(first)));
        assert_eq!(h.len(), cfg.patience);
        assert_eq!(h.best_epoch, 0);
    }

    #[test]
    fn learns_planted_linear_function() {
        let data = linear_data(200, 2);
        let cfg = TrainConfig {
            batch_size: 1,
            ..TrainConfig::default()
        };
        let (m, h) = fit(None, &data[..160], &data[160..], &cfg).unwrap();
        assert!(!h.diverged);
        assert!(evaluate(&m, &data[160..]).unwrap().rmse < 0.5);
    }

    #[test]
    fn same_seed_same_history() {
        let data = linear_data(64, 3);
        let cfg = TrainConfig {
            batch_size: 8,
            seed: 11,
            ..TrainConfig::default()
        };
        let (a, ha) = fit(None, &data[..48], &data[48..], &cfg).unwrap();
        let (b, hb) = fit(None, &data[..48], &data[48..], &cfg).unwrap();
        assert_eq!(ha, hb);
        assert_eq!(a, b);
    }

    #[test]
    fn divergence_is_reported_not_raised() {
        let data = linear_data(40, 4);
        let cfg = TrainConfig {
            learning_rate: 50.0,
            batch_size: 1,
            ..TrainConfig::default()
        };
        let (m, h) = fit(None, &data[..30], &data[30..], &cfg).unwrap();
        assert!(h.diverged);
        assert!(m.weights.iter().all(|w| w.is_finite()));
    }

    #[test]
    fn warm_start_dimension_check() {
        let data = linear_data(20, 5);
        let other = LinearModel::zeros(FeatureKind::Temporal, 3, 0.0);
        let cfg = TrainConfig {
            warm_start: true,
            ..TrainConfig::default()
        };
        assert!(fit(Some(&other), &data, &[], &cfg).is_err());
        // Without warm_start the prior model is ignored.
        assert!(fit(Some(&other), &data, &[], &TrainConfig::default()).is_ok());
    }

    #[test]
    fn config_validation() {
        let mut cfg = TrainConfig {
            batch_size: 0,
            ..TrainConfig::default()
        };
        assert!(fit(None, &linear_data(4, 6), &[], &cfg).is_err());
        cfg = TrainConfig {
            learning_rate: f64::NAN,
            ..TrainConfig::default()
        };
        assert!(cfg.validate().is_err());
        assert!(fit(None, &[], &[], &TrainConfig::default()).is_err());
    }
}
