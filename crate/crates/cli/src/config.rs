//! `key = value` settings files. Flags given on the command line win over
//! anything read here.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::exit::Failure;

pub const KEYS: &[&str] = &[
    "bind",
    "port",
    "base",
    "default_format",
    "preference",
    "ui_dir",
    "mirror",
    "level",
    "depth",
    "max_nodes",
    "max_fetches",
    "follow",
    "width",
    "politeness_ms",
    "timeout_secs",
];

#[derive(Debug, Default, Clone)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read config {}: {e}", path.display())))?;
        Config::parse(&text).map_err(|msg| Failure::usage(format!("{}: {msg}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Config, String> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("line {}: expected key = value", n + 1));
            };
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key {key:?}", n + 1));
            }
            values.insert(key, value.trim().to_owned());
        }
        Ok(Config { values })
    }

    /// The flag if given, else the config value, else nothing.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        debug_assert!(KEYS.contains(&key), "undeclared config key {key}");
        self.values
            .get(key)
            .map(|raw| {
                raw.parse::<T>()
                    .map_err(|e| Failure::usage(format!("config value for {key}: {e}")))
            })
            .transpose()
    }

    pub fn or<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, Failure>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let c = Config::parse("# comment\nport = 9000\n\ndefault-format=atom\n").unwrap();
        assert_eq!(c.or(None, "port", 8080u16).unwrap(), 9000);
        assert_eq!(c.or(Some(7000), "port", 8080u16).unwrap(), 7000);
        assert_eq!(c.or(None, "width", 1usize).unwrap(), 1);
        assert_eq!(c.pick::<String>(None, "default_format").unwrap().as_deref(), Some("atom"));
    }

    #[test]
    fn rejects_junk() {
        assert!(Config::parse("port 9000").is_err());
        assert!(Config::parse("colour = red").is_err());
        let c = Config::parse("port = lots").unwrap();
        assert_eq!(c.pick::<u16>(None, "port").unwrap_err().code(), 4);
    }
}
