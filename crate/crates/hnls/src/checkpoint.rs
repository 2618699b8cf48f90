//! Binary checkpoints of a spectral state.
//!
//! Layout:
//!
//! ```text
//! b"HNLS1\n"
//! u32 LE  header length L
//! L bytes UTF-8 JSON {version, n_max, sign, t, dt, config_hash}
//! (n_max+1)(n_max+2)/2 × (f64 LE re, f64 LE im), lexicographic in (k1, k2)
//! u64 LE  FNV-1a of every preceding byte
//! ```

use std::path::Path;

use hnls_core::hermite::{triangle_len, SpectralField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::fnv1a;

pub const MAGIC: &[u8; 6] = b"HNLS1\n";
pub const VERSION: u32 = 1;

/// Largest truncation a checkpoint may declare.
pub const MAX_N_MAX: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointHeader {
    pub version: u32,
    pub n_max: usize,
    /// σ in `i u_t + A u + σ u|u|² = 0`.
    pub sign: i32,
    pub t: f64,
    pub dt: f64,
    pub config_hash: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub header: CheckpointHeader,
    pub field: SpectralField,
}

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("not a checkpoint (bad magic)")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    Version(u32),
    #[error("checkpoint truncated: need {need} bytes, have {have}")]
    Truncated { need: usize, have: usize },
    #[error("malformed checkpoint header: {0}")]
    Header(String),
    #[error("checksum mismatch: stored {stored:#018x}, computed {computed:#018x}")]
    Checksum { stored: u64, computed: u64 },
    #[error("{0} unexpected bytes after the checksum")]
    Trailing(usize),
    #[error("checkpoint i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CheckpointError {
    /// Stable numeric code per failure kind.
    pub fn code(&self) -> u8 {
        match self {
            CheckpointError::BadMagic => 10,
            CheckpointError::Version(_) => 11,
            CheckpointError::Truncated { .. } => 12,
            CheckpointError::Header(_) => 13,
            CheckpointError::Checksum { .. } => 14,
            CheckpointError::Trailing(_) => 15,
            CheckpointError::Io(_) => 16,
        }
    }
}

pub fn encode(field: &SpectralField, header: &CheckpointHeader) -> Vec<u8> {
    assert_eq!(field.n_max(), header.n_max, "header truncation differs from the field's");
    let json = serde_json::to_vec(header).expect("header serializes");
    let mut out = Vec::with_capacity(MAGIC.len() + 4 + json.len() + 16 * field.coeffs().len() + 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    for c in field.coeffs() {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    let sum = fnv1a(&out);
    out.extend_from_slice(&sum.to_le_bytes());
    out
}

fn take<'a>(bytes: &'a [u8], at: usize, len: usize) -> Result<&'a [u8], CheckpointError> {
    let need = at.checked_add(len).ok_or(CheckpointError::Truncated {
        need: usize::MAX,
        have: bytes.len(),
    })?;
    bytes.get(at..need).ok_or(CheckpointError::Truncated {
        need,
        have: bytes.len(),
    })
}

pub fn decode(bytes: &[u8]) -> Result<Checkpoint, CheckpointError> {
    let magic = bytes.get(..MAGIC.len()).ok_or(CheckpointError::Truncated {
        need: MAGIC.len(),
        have: bytes.len(),
    });
    match magic {
        Ok(m) if m == MAGIC => {}
        // A prefix of the magic is a short file, anything else is not ours.
        Err(e) if MAGIC.starts_with(bytes) => return Err(e),
        _ => return Err(CheckpointError::BadMagic),
    }
    let mut at = MAGIC.len();
    let len = u32::from_le_bytes(take(bytes, at, 4)?.try_into().expect("4 bytes")) as usize;
    at += 4;
    let raw = take(bytes, at, len)?;
    at += len;
    // Read the version first so newer layouts report as such, not as bad JSON.
    let value: serde_json::Value = serde_json::from_slice(raw).map_err(|e| CheckpointError::Header(e.to_string()))?;
    match value.get("version").and_then(|v| v.as_u64()) {
        Some(v) if v == VERSION as u64 => {}
        Some(v) => return Err(CheckpointError::Version(v.min(u32::MAX as u64) as u32)),
        None => return Err(CheckpointError::Header("missing version".into())),
    }
    let header: CheckpointHeader = serde_json::from_value(value).map_err(|e| CheckpointError::Header(e.to_string()))?;
    if header.n_max > MAX_N_MAX {
        return Err(CheckpointError::Header(format!("n_max {} exceeds {MAX_N_MAX}", header.n_max)));
    }
    if !(header.t.is_finite() && header.dt.is_finite() && header.dt > 0.0 && header.t >= 0.0) {
        return Err(CheckpointError::Header("t and dt must be finite, dt positive, t nonnegative".into()));
    }
    if !(-1..=1).contains(&header.sign) {
        return Err(CheckpointError::Header(format!("sign {} not in {{-1, 0, 1}}", header.sign)));
    }
    let count = triangle_len(header.n_max);
    let data = take(bytes, at, 16 * count)?;
    at += 16 * count;
    let stored = u64::from_le_bytes(take(bytes, at, 8)?.try_into().expect("8 bytes"));
    let computed = fnv1a(&bytes[..at]);
    if stored != computed {
        return Err(CheckpointError::Checksum { stored, computed });
    }
    at += 8;
    if bytes.len() > at {
        return Err(CheckpointError::Trailing(bytes.len() - at));
    }
    let coeffs = data
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    let field = SpectralField::from_coeffs(header.n_max, coeffs).expect("length checked above");
    Ok(Checkpoint { header, field })
}

pub fn save(path: &Path, field: &SpectralField, header: &CheckpointHeader) -> Result<(), CheckpointError> {
    std::fs::write(path, encode(field, header))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Checkpoint, CheckpointError> {
    decode(&std::fs::read(path)?)
}
