//! Flat key-value run configuration with strict precedence:
//! command-line flags override config-file keys, which override built-in
//! defaults. Unknown file keys are rejected before any computation starts.

use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

/// Keys a config file may set. Everything else is a usage error.
const KNOWN_KEYS: &[&str] = &[
    "w",
    "n0",
    "p",
    "p_grid",
    "pulse",
    "lambda",
    "xi",
    "j",
    "n",
    "seed",
    "sampling",
    "abs_tol",
    "rel_tol",
    "max_subdivisions",
    "out",
    "format",
];

/// Resolved flat configuration (file layer only; flags are applied by the
/// per-command resolvers).
#[derive(Debug, Default, Clone)]
pub struct RunConfig {
    map: BTreeMap<String, String>,
}

impl RunConfig {
    /// Parse `key = value` lines; `#` starts a comment, blank lines are
    /// ignored.
    pub fn from_file(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!(
                    "config line {} is not `key = value`: {raw:?}",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::usage(format!("unknown config key {key:?}")));
            }
            map.insert(key, value.trim().to_string());
        }
        Ok(RunConfig { map })
    }

    /// Resolve one value: flag wins, then the config file, then the default.
    pub fn resolve<T: std::str::FromStr>(
        &self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T, CliError> {
        debug_assert!(KNOWN_KEYS.contains(&key), "unlisted key {key}");
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.map.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|_| CliError::usage(format!("config key {key} has invalid value {raw:?}"))),
            None => Ok(default),
        }
    }

    pub fn resolve_opt<T: std::str::FromStr>(
        &self,
        key: &str,
        flag: Option<T>,
    ) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.map.get(key) {
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::usage(format!("config key {key} has invalid value {raw:?}"))),
            None => Ok(None),
        }
    }
}

/// FNV-1a hash of the resolved configuration string; stable across runs and
/// platforms, used as the provenance fingerprint.
pub fn fnv1a64(data: &str) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for b in data.as_bytes() {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects_unknown_keys() {
        let dir = std::env::temp_dir();
        let path = dir.join("onebit_cfg_test.conf");
        std::fs::write(&path, "# comment\nlambda = 1.4\nseed = 9 # trailing\n").unwrap();
        let cfg = RunConfig::from_file(&path).unwrap();
        assert_eq!(cfg.resolve("lambda", None, 0.0).unwrap(), 1.4);
        assert_eq!(cfg.resolve("seed", Some(3u64), 1).unwrap(), 3);
        assert_eq!(cfg.resolve("n0", None, 2.5).unwrap(), 2.5);

        std::fs::write(&path, "bogus = 1\n").unwrap();
        assert!(RunConfig::from_file(&path).is_err());
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(fnv1a64("lambda=1.4"), fnv1a64("lambda=1.4"));
        assert_ne!(fnv1a64("lambda=1.4"), fnv1a64("lambda=1.5"));
    }
}
