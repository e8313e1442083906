//! CSV tables for external plotting: loss curves and per-bin feature values.

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::jsonfmt::fmt_f64;
use crate::regression::TrainHistory;

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::config(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::config(e.to_string()))
}

/// `epoch,train_mse,val_mse`, one row per recorded epoch. A missing
/// validation loss is an empty field.
pub fn history_csv(history: &TrainHistory) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["epoch", "train_mse", "val_mse"])?;
    for e in &history.epochs {
        let val = e.val_mse.map(fmt_f64).unwrap_or_default();
        w.write_record([e.epoch.to_string(), fmt_f64(e.train_mse), val])?;
    }
    finish(w)
}

/// `pair_id,k,bin,cover,original`: each paired feature vector unrolled into
/// one row per bin of the per-side vector.
pub fn feature_bins_csv(vectors: &[FeatureVector]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["pair_id", "k", "bin", "cover", "original"])?;
    for v in vectors {
        let (cover, original) = v.halves().ok_or_else(|| {
            Error::config(format!("{} vectors have no cover/original halves to plot", v.kind))
        })?;
        for (bin, (c, o)) in cover.iter().zip(original).enumerate() {
            w.write_record([
                v.pair_id.clone(),
                v.k.to_string(),
                bin.to_string(),
                fmt_f64(*c),
                fmt_f64(*o),
            ])?;
        }
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureKind;
    use crate::regression::EpochLoss;

    #[test]
    fn history_has_one_row_per_epoch() {
        let history = TrainHistory {
            epochs: (1..=10)
                .map(|epoch| EpochLoss {
                    epoch,
                    train_mse: 1.0 / epoch as f64,
                    val_mse: (epoch % 2 == 0).then_some(2.0),
                })
                .collect(),
            ..TrainHistory::default()
        };
        let csv = history_csv(&history).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 11);
        assert_eq!(lines[0], "epoch,train_mse,val_mse");
        assert_eq!(lines[1], "1,1.0000000000000000e0,");
        assert_eq!(lines[2], "2,5.0000000000000000e-1,2.0000000000000000e0");
    }

    #[test]
    fn bins_unroll_halves() {
        let v = FeatureVector {
            pair_id: "a,b".into(),
            k: 2,
            kind: FeatureKind::Temporal,
            values: vec![0.1, 0.5, 0.2, 0.25],
        };
        let csv = feature_bins_csv(&[v]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("\"a,b\",2,1,5.0000000000000000e-1,2.5"));
        let base = FeatureVector {
            pair_id: "x".into(),
            k: 1,
            kind: FeatureKind::BaselineAbsdiff,
            values: vec![0.0; 3],
        };
        assert!(feature_bins_csv(&[base]).is_err());
    }
}
