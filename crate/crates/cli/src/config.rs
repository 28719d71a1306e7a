use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

/// Parameters read from a `--config` TOML file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub model: Option<String>,
    pub sigma: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub cells: Option<usize>,
    pub eps: Option<f64>,
    pub a_constant: Option<f64>,
    pub code: Option<CodeConfig>,
    pub lengths: Option<Vec<usize>>,
    pub erasure: Option<f64>,
    pub erasures: Option<Vec<f64>>,
    pub budget: Option<usize>,
    pub crossovers: Option<Vec<f64>>,
    pub ell: Option<usize>,
    pub c: Option<usize>,
    pub max_iter: Option<usize>,
    pub exhaustive_trials: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeConfig {
    pub n: Option<usize>,
    pub a: Option<usize>,
    pub b: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_code() {
        let c: Config = toml::from_str("sigma = 0.25\nell = 2\n[code]\nn = 280\na = 4\nb = 7\n").unwrap();
        assert_eq!(c.sigma, Some(0.25));
        assert_eq!(c.code.unwrap().n, Some(280));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(toml::from_str::<Config>("sigmaa = 1.0").is_err());
    }
}
