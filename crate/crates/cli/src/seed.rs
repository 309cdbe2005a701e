//! Seed-pair sources: the built-in name or a JSON file `{"a": ..., "b": ...}`
//! whose sequences are sign strings (`"++-+"`) or chip arrays (`[1, 1, -1, 1]`).

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use dopgolay_core::{GolayPair, UnimodularSequence};
use serde::Deserialize;

pub const BUILTIN: &str = "builtin8";

#[derive(Deserialize)]
#[serde(untagged)]
enum SeqRepr {
    Signs(String),
    Chips(Vec<i64>),
}

impl SeqRepr {
    fn parse(self) -> Result<UnimodularSequence> {
        Ok(match self {
            SeqRepr::Signs(s) => s.parse()?,
            SeqRepr::Chips(v) => UnimodularSequence::try_from(v)?,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairFile {
    a: SeqRepr,
    b: SeqRepr,
}

/// An unvalidated pair plus where it came from.
#[derive(Debug, Clone)]
pub struct RawPair {
    pub a: UnimodularSequence,
    pub b: UnimodularSequence,
    pub source: String,
    /// File path and contents, when loaded from disk.
    pub file: Option<(PathBuf, Vec<u8>)>,
}

impl RawPair {
    pub fn builtin() -> Self {
        let (a, b) = GolayPair::builtin8().into_parts();
        Self {
            a,
            b,
            source: BUILTIN.to_string(),
            file: None,
        }
    }

    pub fn validate(&self) -> Result<GolayPair> {
        GolayPair::new(self.a.clone(), self.b.clone())
            .with_context(|| format!("invalid seed pair from {}", self.source))
    }
}

/// Resolves `source`; relative paths are taken against `base` when given.
pub fn load(source: &str, base: Option<&Path>) -> Result<RawPair> {
    if source == BUILTIN {
        return Ok(RawPair::builtin());
    }
    let path = match base {
        Some(dir) if Path::new(source).is_relative() => dir.join(source),
        _ => PathBuf::from(source),
    };
    let bytes =
        fs::read(&path).with_context(|| format!("seed pair {source:?} is neither {BUILTIN:?} nor a readable file"))?;
    let parsed: PairFile =
        serde_json::from_slice(&bytes).with_context(|| format!("cannot parse seed pair file {}", path.display()))?;
    Ok(RawPair {
        a: parsed.a.parse().context("seed pair field `a`")?,
        b: parsed.b.parse().context("seed pair field `b`")?,
        source: path.display().to_string(),
        file: Some((path, bytes)),
    })
}
