use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::baseline::{Fallback, Scope};
use crate::error::{Error, Result};

/// Flat TOML run manifest. Keys mirror the long flags with `_` for `-`;
/// relative paths are taken as given (relative to the working directory).
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub lexicon: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub k: Option<usize>,
    pub fold: Option<usize>,
    pub allow_any_k: Option<bool>,
    pub strict: Option<bool>,
    pub scope: Option<Scope>,
    pub fallback: Option<Fallback>,
    pub test_size: Option<usize>,
}

impl FileConfig {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("{source}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }
}
