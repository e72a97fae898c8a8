//! Flat key-value (INI-style) config files mirroring the CLI flags.
//!
//! One `key = value` pair per line, `#` or `;` comments, no sections.
//! Flags always override file values.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn empty() -> Self {
        Self {
            values: BTreeMap::new(),
        }
    }

    pub fn load(path: &Path, known_keys: &[&str]) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find(['#', ';']) {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key = value", lineno + 1))?;
            let key = key.trim().to_string();
            if !known_keys.contains(&key.as_str()) {
                return Err(format!("config line {}: unknown key `{key}`", lineno + 1));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    /// Flag value if present, else the parsed config value, else the default.
    pub fn resolve<T: FromStr + Clone>(
        &self,
        flag: &Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, String>
    where
        T::Err: Display,
    {
        self.resolve_opt(flag, key)
            .map(|v| v.unwrap_or(default))
    }

    /// Same, but without a default: absent everywhere stays `None`.
    pub fn resolve_opt<T: FromStr + Clone>(
        &self,
        flag: &Option<T>,
        key: &str,
    ) -> Result<Option<T>, String>
    where
        T::Err: Display,
    {
        if let Some(v) = flag {
            return Ok(Some(v.clone()));
        }
        match self.values.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| format!("config key `{key}`: {e}")),
            None => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn parses_and_merges() {
        let mut tmp = std::env::temp_dir();
        tmp.push(format!("workstats-config-test-{}.ini", std::process::id()));
        let mut f = std::fs::File::create(&tmp).unwrap();
        writeln!(f, "# comment\nbeta = 2.5\nprotocol = fcs ; inline").unwrap();
        drop(f);

        let cfg = ConfigFile::load(&tmp, &["beta", "protocol"]).unwrap();
        let beta: f64 = cfg.resolve(&None, "beta", 1.0).unwrap();
        assert_eq!(beta, 2.5);
        let overridden: f64 = cfg.resolve(&Some(0.5), "beta", 1.0).unwrap();
        assert_eq!(overridden, 0.5);
        let missing: f64 = cfg.resolve(&None, "phi", 9.0).unwrap_or(9.0);
        assert_eq!(missing, 9.0);
        std::fs::remove_file(&tmp).unwrap();
    }

    #[test]
    fn rejects_unknown_keys() {
        let mut tmp = std::env::temp_dir();
        tmp.push(format!("workstats-config-bad-{}.ini", std::process::id()));
        std::fs::write(&tmp, "nonsense = 1\n").unwrap();
        assert!(ConfigFile::load(&tmp, &["beta"]).is_err());
        std::fs::remove_file(&tmp).unwrap();
    }
}
