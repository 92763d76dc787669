//! Config files: a flat JSON object holding search settings plus a few
//! command-level keys. Flags override whatever the file says.

use std::fs;
use std::path::{Path, PathBuf};

use noveltest::search::SearchConfig;
use serde::Deserialize;

use crate::error::CliError;

/// Keys that belong to the command rather than the search.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileKeys {
    pub game: Option<String>,
    pub out: Option<PathBuf>,
    pub timeline: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub repetitions: Option<usize>,
    pub workers: Option<usize>,
    pub population: Option<usize>,
}

const FILE_KEYS: [&str; 7] = ["game", "out", "timeline", "out_dir", "repetitions", "workers", "population"];

#[derive(Debug, Default)]
pub struct CliConfig {
    pub keys: FileKeys,
    pub search: SearchConfig,
}

pub fn load(path: Option<&Path>) -> Result<CliConfig, CliError> {
    let Some(path) = path else {
        return Ok(CliConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn parse(text: &str) -> Result<CliConfig, String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let serde_json::Value::Object(mut all) = value else {
        return Err("config must be a JSON object".into());
    };
    let mut own = serde_json::Map::new();
    for k in FILE_KEYS {
        if let Some(v) = all.remove(k) {
            own.insert(k.to_string(), v);
        }
    }
    let keys: FileKeys = serde_json::from_value(own.into()).map_err(|e| e.to_string())?;
    let search: SearchConfig = serde_json::from_value(all.into()).map_err(|e| e.to_string())?;
    Ok(CliConfig { keys, search })
}
