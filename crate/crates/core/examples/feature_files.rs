//! Round-trips feature vectors through the JSONL and binary file formats.

use coverlens::features::io::{decode_binary, encode_binary, to_jsonl};
use coverlens::{FeatureKind, FeatureVector};

fn main() -> coverlens::Result<()> {
    let vectors: Vec<FeatureVector> = (1..=3)
        .map(|k| FeatureVector {
            pair_id: "demo".into(),
            k,
            kind: FeatureKind::Temporal,
            values: vec![0.01 * k as f64, 0.5, 0.02, 0.48],
        })
        .collect();
    print!("{}", to_jsonl(&vectors)?);
    let bytes = encode_binary(&vectors)?;
    println!("binary: {} bytes", bytes.len());
    assert_eq!(decode_binary(&bytes)?, vectors);
    Ok(())
}
