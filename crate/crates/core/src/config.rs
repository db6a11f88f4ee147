//! Analysis thresholds and the plain-text `key = value` configuration format
//! shared by the thresholds, weights, and metrics files.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    /// First N rows in storage order.
    FirstN,
    /// Seeded reservoir sample over the full scan.
    Seeded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildConfig {
    /// CREATE TABLE column count at or above which a table is a god table.
    pub god_table_threshold: usize,
    /// Join count at or above which a query has too many joins.
    pub join_threshold: usize,
    /// Minimum number of queries with a selective predicate on a column
    /// before a missing index is reported.
    pub index_use_min: usize,
    /// Minimum fraction of sampled values that must look like delimiter
    /// lists for the multi-valued-attribute data rule.
    pub mva_fraction: f64,
    /// Maximum distinct count for the enumerated-types data rule.
    pub enum_distinct_max: usize,
    /// Rows sampled per table.
    pub sample_size: usize,
    pub sample_mode: SampleMode,
    pub sample_seed: u64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            god_table_threshold: 10,
            join_threshold: 5,
            index_use_min: 2,
            mva_fraction: 0.5,
            enum_distinct_max: 8,
            sample_size: 1000,
            sample_mode: SampleMode::Seeded,
            sample_seed: 0,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value for {key}: {value:?}")]
    InvalidValue {
        line: usize,
        key: String,
        value: String,
    },
}

/// Parse a `key = value` file: one pair per line, `#` comments, blank lines
/// ignored. Values keep everything after the first `=`.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((key, value)) => {
                pairs.push((key.trim().to_string(), value.trim().to_string()));
            }
            None => {
                return Err(ConfigError::Malformed {
                    line: idx + 1,
                    text: line.to_string(),
                })
            }
        }
    }
    Ok(pairs)
}

impl BuildConfig {
    /// Apply a thresholds file on top of the current configuration.
    pub fn apply_kv(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, (key, value)) in parse_kv(text)?.into_iter().enumerate() {
            let line = idx + 1;
            let invalid = || ConfigError::InvalidValue {
                line,
                key: key.clone(),
                value: value.clone(),
            };
            match key.as_str() {
                "god_table_threshold" => {
                    self.god_table_threshold = value.parse().map_err(|_| invalid())?
                }
                "join_threshold" => self.join_threshold = value.parse().map_err(|_| invalid())?,
                "index_use_min" => self.index_use_min = value.parse().map_err(|_| invalid())?,
                "mva_fraction" => self.mva_fraction = value.parse().map_err(|_| invalid())?,
                "enum_distinct_max" => {
                    self.enum_distinct_max = value.parse().map_err(|_| invalid())?
                }
                "sample_size" => self.sample_size = value.parse().map_err(|_| invalid())?,
                "sample_seed" => self.sample_seed = value.parse().map_err(|_| invalid())?,
                "sample_mode" => {
                    self.sample_mode = match value.as_str() {
                        "first_n" => SampleMode::FirstN,
                        "seeded" => SampleMode::Seeded,
                        _ => return Err(invalid()),
                    }
                }
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: key.clone(),
                    })
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = BuildConfig::default();
        assert_eq!(cfg.god_table_threshold, 10);
        assert_eq!(cfg.join_threshold, 5);
        assert_eq!(cfg.index_use_min, 2);
        assert_eq!(cfg.mva_fraction, 0.5);
        assert_eq!(cfg.enum_distinct_max, 8);
        assert_eq!(cfg.sample_size, 1000);
    }

    #[test]
    fn kv_parsing_and_overrides() {
        let mut cfg = BuildConfig::default();
        cfg.apply_kv("# comment\n god_table_threshold = 12 \n\nmva_fraction=0.7\n")
            .unwrap();
        assert_eq!(cfg.god_table_threshold, 12);
        assert_eq!(cfg.mva_fraction, 0.7);
    }

    #[test]
    fn kv_errors() {
        let mut cfg = BuildConfig::default();
        assert!(cfg.apply_kv("no equals sign").is_err());
        assert!(cfg.apply_kv("mystery = 3").is_err());
        assert!(cfg.apply_kv("sample_size = lots").is_err());
    }
}
