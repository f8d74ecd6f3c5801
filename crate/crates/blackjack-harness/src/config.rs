//! Flat key-value configuration: the format of both `--config` files and
//! the `manifest.txt` every run writes. A manifest is itself a valid config
//! file, so any run can be reproduced from its manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use blackjack_core::Error;

#[derive(Clone, Debug, Default)]
pub struct KvConfig {
    map: BTreeMap<String, String>,
}

impl KvConfig {
    pub fn new() -> Self {
        KvConfig::default()
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("config line {}: expected key=value", lineno + 1))
            })?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(KvConfig { map })
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        KvConfig::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.map.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    /// Typed lookup; `Ok(None)` when the key is absent.
    pub fn get_parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, Error> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::Parse(format!("config key `{key}`: bad value `{raw}`"))),
        }
    }

    /// Serialized as sorted `key=value` lines.
    pub fn to_manifest(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.map {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn write_manifest(&self, path: &Path) -> Result<(), Error> {
        std::fs::write(path, self.to_manifest())?;
        Ok(())
    }
}

/// Resolves one setting: an explicit CLI flag wins, then the config file,
/// then the default.
pub fn resolve<T: FromStr + Clone>(
    flag: Option<T>,
    file: &KvConfig,
    key: &str,
    default: T,
) -> Result<T, Error> {
    if let Some(v) = flag {
        return Ok(v);
    }
    Ok(file.get_parsed::<T>(key)?.unwrap_or(default))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_round_trip() {
        let cfg = KvConfig::parse("# comment\nseed=7\n decks = 6 \n").unwrap();
        assert_eq!(cfg.get("seed"), Some("7"));
        assert_eq!(cfg.get("decks"), Some("6"));
        let text = cfg.to_manifest();
        let again = KvConfig::parse(&text).unwrap();
        assert_eq!(again.to_manifest(), text);
    }

    #[test]
    fn typed_lookup_and_errors() {
        let cfg = KvConfig::parse("alpha=0.05\nbad=xyz\n").unwrap();
        assert_eq!(cfg.get_parsed::<f64>("alpha").unwrap(), Some(0.05));
        assert_eq!(cfg.get_parsed::<u64>("missing").unwrap(), None);
        assert!(cfg.get_parsed::<u64>("bad").is_err());
        assert!(KvConfig::parse("no equals sign").is_err());
    }

    #[test]
    fn flag_overrides_file() {
        let cfg = KvConfig::parse("seed=7\n").unwrap();
        assert_eq!(resolve(Some(9u64), &cfg, "seed", 0).unwrap(), 9);
        assert_eq!(resolve(None::<u64>, &cfg, "seed", 0).unwrap(), 7);
        assert_eq!(resolve(None::<u64>, &cfg, "other", 3).unwrap(), 3);
    }
}
