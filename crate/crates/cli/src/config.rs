use std::collections::BTreeMap;
use std::path::Path;

pub const GROUP_CAP_ENV: &str = "ORBITBOUND_GROUP_CAP";
pub const VECTOR_CAP_ENV: &str = "ORBITBOUND_VECTOR_CAP";

const KEYS: [&str; 6] = ["format", "output", "jobs", "timestamps", "group_cap", "vector_cap"];

/// Values from a `key = value` config file.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected `key = value`", lineno + 1))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(format!(
                    "config line {}: unknown key `{k}` (known keys: {})",
                    lineno + 1,
                    KEYS.join(", ")
                ));
            }
            values.insert(k.to_string(), v.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| format!("config key `{key}`: cannot parse `{v}`"))
            })
            .transpose()
    }
}

/// Flag, then environment, then config file, then `default`.
pub fn cap(
    flag: Option<usize>,
    env_var: &str,
    config: &ConfigFile,
    key: &str,
    default: usize,
) -> Result<usize, String> {
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Ok(v) = std::env::var(env_var) {
        return v
            .trim()
            .parse()
            .map_err(|_| format!("{env_var}: cannot parse `{v}` as a count"));
    }
    Ok(config.parsed(key)?.unwrap_or(default))
}
