//! Config files and the flag-over-file merge.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use serde::Deserialize;
use sha2::{Digest, Sha256};
use srrw_core::groups::{parse_mu, GroupSpec, StepDistribution};
use srrw_core::sampler::{SrrwConfig, TransformSpec};

/// A scalar or a list, so `n = 64` and `n = [64, 128]` both parse.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    pub fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Flat config file. Every key is optional; flags override file values.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub group: Option<String>,
    pub alpha: Option<f64>,
    pub mu: Option<String>,
    pub transform: Option<String>,
    pub n: Option<OneOrMany<usize>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub target: Option<String>,
    pub ball_r: Option<f64>,
    pub route: Option<String>,
    pub threads: Option<usize>,
    pub out: Option<String>,
    pub cap: Option<usize>,
    pub rational: Option<bool>,
    pub enumeration: Option<String>,
    pub nmax: Option<usize>,
    pub x: Option<OneOrMany<f64>>,
    pub l: Option<u32>,
    pub start: Option<String>,
    pub doob: Option<bool>,
    pub rmax: Option<usize>,
    pub scope: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| anyhow!("{e}"))
    }
}

/// The values a run actually used, in a stable order. Hashing these is what
/// `config_hash` in output headers refers to.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Resolved {
    entries: BTreeMap<&'static str, String>,
}

impl Resolved {
    pub fn set(&mut self, key: &'static str, value: impl ToString) {
        self.entries.insert(key, value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in &self.entries {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// `flag` if given, else the file value.
pub fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

pub fn require<T>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| anyhow!("missing required field `{field}`"))
}

pub fn field_error(field: &str, text: &str, err: impl std::fmt::Display) -> anyhow::Error {
    anyhow!("invalid value for field `{field}` ({text:?}): {err}")
}

pub fn parse_group(text: &str) -> Result<GroupSpec> {
    text.parse::<GroupSpec>().map_err(|e| field_error("group", text, e))
}

pub fn parse_step_law(spec: &GroupSpec, text: &str) -> Result<StepDistribution> {
    parse_mu(spec, text).map_err(|e| field_error("mu", text, e))
}

/// Walk parameters shared by `simulate` and `exact`.
pub struct WalkParams<'a> {
    pub group: Option<&'a str>,
    pub alpha: Option<f64>,
    pub mu: Option<&'a str>,
    pub transform: Option<&'a str>,
}

pub fn resolve_walk(p: WalkParams<'_>, resolved: &mut Resolved) -> Result<SrrwConfig> {
    let group_text = require(p.group, "group")?;
    let alpha = require(p.alpha, "alpha")?;
    let mu_text = p.mu.unwrap_or("uniform");
    let transform_text = p.transform.unwrap_or("identity");
    let group = parse_group(group_text)?;
    let mu = parse_step_law(&group, mu_text)?;
    let transform = TransformSpec::parse(transform_text, &group, &mu).map_err(|e| field_error("transform", transform_text, e))?;
    let config = SrrwConfig::new(group.clone(), alpha, mu, transform).map_err(|e| field_error("alpha", &alpha.to_string(), e))?;
    resolved.set("group", &group);
    resolved.set("alpha", alpha);
    resolved.set("mu", mu_text);
    resolved.set("transform", &config.transform);
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_or_list() {
        let c = FileConfig::parse("n = 64\nx = [0.5, -0.5]\n").unwrap();
        assert_eq!(c.n.unwrap().into_vec(), vec![64]);
        assert_eq!(c.x.unwrap().into_vec(), vec![0.5, -0.5]);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = FileConfig::parse("alpah = 0.5\n").unwrap_err().to_string();
        assert!(err.contains("alpah"), "{err}");
    }

    #[test]
    fn bad_type_names_line_and_field() {
        let err = FileConfig::parse("group = \"z2\"\nalpha = \"half\"\n").unwrap_err().to_string();
        assert!(err.contains("alpha") && err.contains('2'), "{err}");
    }

    #[test]
    fn hash_depends_on_values() {
        let mut a = Resolved::default();
        a.set("alpha", 0.5);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.set("alpha", 0.25);
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
