//! Feature files: JSON-lines (one record per segment pair) and the packed
//! little-endian `CLFV` binary layout.
//!
//! Binary layout, all integers little-endian:
//!
//! ```text
//! "CLFV" | version u8 (=1) | kind u8 | dim u32 | count u64
//! count x ( id_len u32 | pair_id utf-8 | k u32 | dim x f64 )
//! ```

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{FeatureKind, FeatureVector};
use crate::error::{Error, Result};
use crate::jsonfmt;

pub const CLFV_MAGIC: &[u8; 4] = b"CLFV";
pub const CLFV_VERSION: u8 = 1;

pub fn to_jsonl(vectors: &[FeatureVector]) -> Result<String> {
    let mut out = String::new();
    for v in vectors {
        out.push_str(&jsonfmt::to_string(v)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_jsonl(path: impl AsRef<Path>, vectors: &[FeatureVector]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_jsonl(vectors)?).map_err(|e| Error::io(path, e))
}

pub fn read_jsonl(path: impl AsRef<Path>) -> Result<Vec<FeatureVector>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let v: FeatureVector = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: format!("{}:{}", path.display(), i + 1),
            message: e.to_string(),
        })?;
        out.push(v);
    }
    Ok(out)
}

pub fn encode_binary(vectors: &[FeatureVector]) -> Result<Vec<u8>> {
    let (kind, dim) = match vectors.first() {
        Some(v) => (v.kind, v.dim()),
        None => (FeatureKind::Mfcc, 0),
    };
    let mut out = Vec::with_capacity(18 + vectors.len() * (dim * 8 + 16));
    out.extend_from_slice(CLFV_MAGIC);
    out.push(CLFV_VERSION);
    out.push(kind.code());
    out.extend_from_slice(&(dim as u32).to_le_bytes());
    out.extend_from_slice(&(vectors.len() as u64).to_le_bytes());
    for v in vectors {
        if v.kind != kind {
            return Err(Error::config("a CLFV file holds a single feature kind"));
        }
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: v.dim(),
            });
        }
        out.extend_from_slice(&(v.pair_id.len() as u32).to_le_bytes());
        out.extend_from_slice(v.pair_id.as_bytes());
        out.extend_from_slice(&(v.k as u32).to_le_bytes());
        for x in &v.values {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Parse {
                path: "CLFV".into(),
                message: format!("truncated at byte {}", self.pos),
            })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn decode_binary(bytes: &[u8]) -> Result<Vec<FeatureVector>> {
    let bad = |message: String| Error::Parse {
        path: "CLFV".into(),
        message,
    };
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(4)? != CLFV_MAGIC {
        return Err(bad("bad magic".into()));
    }
    let version = cur.take(1)?[0];
    if version != CLFV_VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let code = cur.take(1)?[0];
    let kind = FeatureKind::from_code(code).ok_or_else(|| bad(format!("unknown kind code {code}")))?;
    let dim = cur.u32()? as usize;
    let count = cur.u64()? as usize;
    let mut out = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let id_len = cur.u32()? as usize;
        let pair_id = std::str::from_utf8(cur.take(id_len)?)
            .map_err(|e| bad(e.to_string()))?
            .to_string();
        let k = cur.u32()? as usize;
        let values = cur
            .take(dim * 8)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        out.push(FeatureVector {
            pair_id,
            k,
            kind,
            values,
        });
    }
    if cur.pos != bytes.len() {
        return Err(bad(format!("{} trailing bytes", bytes.len() - cur.pos)));
    }
    Ok(out)
}

pub fn write_binary(path: impl AsRef<Path>, vectors: &[FeatureVector]) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_binary(vectors)?;
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&bytes).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_binary(path: impl AsRef<Path>) -> Result<Vec<FeatureVector>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_binary(&bytes).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse {
            path: path.display().to_string(),
            message,
        },
        other => other,
    })
}

/// Reads either format, choosing by the `CLFV` magic.
pub fn read_features(path: impl AsRef<Path>) -> Result<Vec<FeatureVector>> {
    let path = path.as_ref();
    let mut head = [0u8; 4];
    let is_binary = fs::File::open(path)
        .and_then(|mut f| std::io::Read::read_exact(&mut f, &mut head))
        .map(|_| &head == CLFV_MAGIC)
        .unwrap_or(false);
    if is_binary {
        read_binary(path)
    } else {
        read_jsonl(path)
    }
}
