//! Key-value config files and flag/file/default resolution.
//!
//! A config file holds one `key = value` per line; `#` starts a comment.
//! Keys are the long flag names without dashes, e.g. `mask = rect:10`.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use tdface::{Error, Result};

#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Settings::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut file = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Argument(format!("config line {}: expected `key = value`", n + 1)))?;
            file.insert(k.trim().replace('-', "_"), v.trim().to_string());
        }
        Ok(Settings { file })
    }

    /// Flag value if given, else the file's value for `key`, else `default`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.pick_opt(flag, key)?.unwrap_or(default))
    }

    /// Like [`Settings::pick`] without a default.
    pub fn pick_opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.file
            .get(key)
            .map(|text| {
                text.parse()
                    .map_err(|e| Error::Argument(format!("config key `{key}` = `{text}`: {e}")))
            })
            .transpose()
    }
}
