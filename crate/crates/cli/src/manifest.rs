//! Run manifests: a flat `key = value` record of everything a run needs to
//! be repeated.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub n_max: usize,
    pub format: String,
    /// Resolved command parameters in flag order.
    pub params: Vec<(String, String)>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut lines = vec![
            format!("command = {}", self.command),
            format!("version = {}", self.version),
            format!("seed = {}", self.seed),
            format!("n_max = {}", self.n_max),
            format!("format = {}", self.format),
        ];
        for (k, v) in &self.params {
            lines.push(format!("param.{k} = {v}"));
        }
        for (i, path) in self.outputs.iter().enumerate() {
            lines.push(format!("output.{i} = {}", path.display()));
        }
        let mut text = lines.join("\n");
        text.push('\n');
        text
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut fields = BTreeMap::new();
        let mut params = Vec::new();
        let mut outputs = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(" = ")
                .with_context(|| format!("manifest line {} is not 'key = value'", lineno + 1))?;
            if let Some(name) = key.strip_prefix("param.") {
                params.push((name.to_string(), value.to_string()));
            } else if let Some(idx) = key.strip_prefix("output.") {
                let idx: usize = idx.parse().context("output index")?;
                outputs.insert(idx, PathBuf::from(value));
            } else {
                fields.insert(key.to_string(), value.to_string());
            }
        }
        let field = |name: &str| {
            fields
                .get(name)
                .cloned()
                .with_context(|| format!("manifest is missing '{name}'"))
        };
        let version = field("version")?;
        if version != VERSION {
            bail!("manifest was written by version {version}, this is {VERSION}");
        }
        Ok(Self {
            command: field("command")?,
            version,
            seed: field("seed")?.parse().context("seed")?,
            n_max: field("n_max")?.parse().context("n_max")?,
            format: field("format")?,
            params,
            outputs: outputs.into_values().collect(),
        })
    }

    /// Command line that repeats the run. The first output is the `--out`
    /// target (if any).
    pub fn to_args(&self) -> Vec<String> {
        let mut args = vec![
            "bbell".to_string(),
            format!("--seed={}", self.seed),
            format!("--n-max={}", self.n_max),
            format!("--format={}", self.format),
        ];
        if let Some(out) = self.outputs.first() {
            args.push(format!("--out={}", out.display()));
        }
        args.push(self.command.clone());
        for (k, v) in &self.params {
            args.push(format!("--{k}={v}"));
        }
        args
    }
}
