//! Fitted-parameter cache: one JSON object keyed by model name.

use std::collections::BTreeMap;
use std::path::PathBuf;

use tfscreen::ModelParams;

use crate::CliError;

const CACHE_ENV: &str = "TF_SCREEN_CACHE_DIR";
const CACHE_FILE: &str = "params.json";

fn cache_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os(CACHE_ENV) {
        return Some(PathBuf::from(dir));
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME") {
        return Some(PathBuf::from(dir).join("tfscreen"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("tfscreen"))
}

fn cache_path() -> Option<PathBuf> {
    cache_dir().map(|d| d.join(CACHE_FILE))
}

fn load_all() -> BTreeMap<String, ModelParams> {
    let Some(path) = cache_path() else {
        return BTreeMap::new();
    };
    let Ok(text) = std::fs::read_to_string(&path) else {
        return BTreeMap::new();
    };
    match serde_json::from_str(&text) {
        Ok(map) => map,
        Err(e) => {
            eprintln!("warning: ignoring unreadable cache {}: {e}", path.display());
            BTreeMap::new()
        }
    }
}

/// Cached parameters for `model`, if any.
pub fn load(model: &str) -> Option<ModelParams> {
    load_all()
        .remove(model)
        .filter(|p| p.name() == model && p.validate().is_ok())
}

pub fn store(params: &ModelParams) -> Result<(), CliError> {
    let Some(dir) = cache_dir() else {
        return Ok(());
    };
    let mut all = load_all();
    all.insert(params.name().to_string(), *params);
    let text = serde_json::to_string_pretty(&all).expect("parameter map serializes");
    std::fs::create_dir_all(&dir)
        .and_then(|_| std::fs::write(dir.join(CACHE_FILE), text + "\n"))
        .map_err(|e| CliError::Usage(format!("cannot write cache in {}: {e}", dir.display())))
}
