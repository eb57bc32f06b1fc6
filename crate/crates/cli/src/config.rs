//! Versioned JSON experiment configs.
//!
//! Every config is one JSON object with a common header `{version, seed,
//! output_dir}`. The header is split off and checked here; the remaining
//! fields are deserialized by the command into its own body type, which
//! rejects unknown fields.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::CliError;

pub const SPECTRUM_V1: &str = "spectrum-v1";
pub const TRAIN_V1: &str = "train-v1";
pub const COMPARE_V1: &str = "compare-v1";
pub const PLATEAU_V1: &str = "plateau-v1";
pub const RESOURCES_V1: &str = "resources-v1";
pub const BICONE_V1: &str = "bicone-v1";

#[derive(Clone, Debug)]
pub struct Header {
    pub seed: u64,
    pub output_dir: PathBuf,
}

/// A parsed config: its header, the remaining fields, the raw text for
/// archiving, and the directory relative paths resolve against.
#[derive(Debug)]
pub struct Config {
    pub header: Header,
    pub body: Map<String, Value>,
    pub raw: String,
    pub base_dir: PathBuf,
}

impl Config {
    pub fn load(path: &Path, version: &str) -> Result<Self, CliError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&raw, version, base_dir)
    }

    pub fn parse(raw: &str, version: &str, base_dir: PathBuf) -> Result<Self, CliError> {
        let value: Value = serde_json::from_str(raw).map_err(|e| CliError::Usage(format!("config is not valid JSON: {e}")))?;
        let Value::Object(mut body) = value else {
            return Err(CliError::Usage("config must be a JSON object".into()));
        };
        let found = take(&mut body, "version")?;
        match found.as_str() {
            Some(v) if v == version => {}
            Some(v) => return Err(CliError::Usage(format!("config version {v:?}, expected {version:?}"))),
            None => return Err(CliError::Usage("field `version` must be a string".into())),
        }
        let seed = take(&mut body, "seed")?
            .as_u64()
            .ok_or_else(|| CliError::Usage("field `seed` must be a non-negative integer".into()))?;
        let output_dir = take(&mut body, "output_dir")?
            .as_str()
            .map(PathBuf::from)
            .ok_or_else(|| CliError::Usage("field `output_dir` must be a string".into()))?;
        let output_dir = if output_dir.is_relative() { base_dir.join(output_dir) } else { output_dir };
        Ok(Self { header: Header { seed, output_dir }, body, raw: raw.to_owned(), base_dir })
    }

    /// Deserializes the body fields into `T`.
    pub fn body<T: DeserializeOwned>(&self) -> Result<T, CliError> {
        decode(Value::Object(self.body.clone()), "config")
    }

    /// Deserializes the body with the header seed inserted as `seed`, for
    /// library configs that carry their own seed field.
    pub fn body_with_seed<T: DeserializeOwned>(&self) -> Result<T, CliError> {
        with_seed(Value::Object(self.body.clone()), self.header.seed, "config")
    }

    /// Resolves a config-relative path.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_relative() {
            self.base_dir.join(p)
        } else {
            p.to_path_buf()
        }
    }
}

fn take(body: &mut Map<String, Value>, key: &str) -> Result<Value, CliError> {
    body.remove(key).ok_or_else(|| CliError::Usage(format!("missing field `{key}`")))
}

pub fn decode<T: DeserializeOwned>(v: Value, what: &str) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Usage(format!("invalid {what}: {e}")))
}

/// Inserts `seed` into the object `v`; a seed already present is an error
/// because the header seed is the single source of randomness.
pub fn with_seed<T: DeserializeOwned>(v: Value, seed: u64, what: &str) -> Result<T, CliError> {
    let Value::Object(mut map) = v else {
        return Err(CliError::Usage(format!("{what} must be a JSON object")));
    };
    if map.contains_key("seed") {
        return Err(CliError::Usage(format!("{what}: `seed` belongs in the config header")));
    }
    map.insert("seed".into(), Value::from(seed));
    decode(Value::Object(map), what)
}
