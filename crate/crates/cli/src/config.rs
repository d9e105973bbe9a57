//! Field description files: `key = value` lines with little-endian integer
//! lists, read as TOML.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use rlab_core::FieldDesc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Integers may be written as strings when they overflow `i64`.
#[derive(Deserialize)]
#[serde(untagged)]
enum Coef {
    Int(i64),
    Text(String),
}

impl Coef {
    fn to_bigint(&self) -> Result<BigInt, ConfigError> {
        match self {
            Coef::Int(v) => Ok(BigInt::from(*v)),
            Coef::Text(s) => s.trim().parse().map_err(|_| ConfigError(format!("not an integer: {s:?}"))),
        }
    }
}

/// `eisenstein = [3, 3, 1]` over `Z_p`, or one list per coefficient when
/// `f > 1`.
#[derive(Deserialize)]
#[serde(untagged)]
enum Eisenstein {
    Flat(Vec<Coef>),
    Nested(Vec<Vec<Coef>>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    p: u64,
    n: u32,
    #[serde(default)]
    unram_poly: Option<Vec<Coef>>,
    eisenstein: Eisenstein,
    #[serde(default)]
    precision: Option<i64>,
}

fn ints(v: &[Coef]) -> Result<Vec<BigInt>, ConfigError> {
    v.iter().map(Coef::to_bigint).collect()
}

/// Parses a description. Only the syntax is checked here; the field
/// invariants are checked when the tower is built.
pub fn parse_config(text: &str) -> Result<FieldDesc, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError(format!("field file: {}", e.message())))?;
    let unram_poly = match &raw.unram_poly {
        Some(v) => ints(v)?,
        None => vec![0.into(), 1.into()],
    };
    let eisenstein = match &raw.eisenstein {
        Eisenstein::Flat(v) => ints(v)?.into_iter().map(|c| vec![c]).collect(),
        Eisenstein::Nested(v) => v.iter().map(|c| ints(c)).collect::<Result<_, _>>()?,
    };
    if let Some(prec) = raw.precision {
        if prec < 4 {
            return Err(ConfigError(format!("precision {prec} is too small")));
        }
    }
    Ok(FieldDesc { p: raw.p, n: raw.n, unram_poly, eisenstein, precision: raw.precision })
}

pub fn load_config(path: &Path) -> Result<FieldDesc, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// SHA-256 of the canonical rendering of the description.
pub fn fingerprint(desc: &FieldDesc) -> String {
    hex::encode(Sha256::digest(desc.to_config().as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const F0: &str = "p = 3\nn = 1\nunram_poly = [0, 1]\neisenstein = [3, 3, 1]\nprecision = 40\n";

    #[test]
    fn parses_f0() {
        let desc = parse_config(F0).unwrap();
        assert_eq!(desc, FieldDesc::new(3, 1, &[0, 1], &[3, 3, 1]).with_precision(40));
        assert_eq!(parse_config(&desc.to_config()).unwrap(), desc);
    }

    #[test]
    fn nested_and_defaults() {
        let desc = parse_config("p = 3\nn = 0\nunram_poly = [1, 0, 1]\neisenstein = [[-3, 0], [0, 0], [1, 0]]\n").unwrap();
        assert_eq!(desc.degree_f(), 2);
        assert_eq!(desc.precision, None);
        let desc = parse_config("p = 5\nn = 0\neisenstein = [\"-5\", 1]\n").unwrap();
        assert_eq!(desc.unram_poly, vec![BigInt::from(0), BigInt::from(1)]);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse_config("p = 3\n").is_err());
        assert!(parse_config("p = 3\nn = 1\neisenstein = [3, 3, 1]\nextra = 2\n").is_err());
        assert!(parse_config("p = 3\nn = 1\neisenstein = [\"x\", 1]\n").is_err());
    }

    #[test]
    fn fingerprint_ignores_formatting() {
        let a = parse_config(F0).unwrap();
        let b = parse_config("eisenstein=[3,3,1]\np=3\nn=1\nprecision=40").unwrap();
        assert_eq!(fingerprint(&a), fingerprint(&b));
        assert_eq!(fingerprint(&a).len(), 64);
    }
}
