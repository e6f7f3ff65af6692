//! TOML file formats.
//!
//! Source config:
//!
//! ```toml
//! depth = 3            # optional, must equal the deepest state
//! [states]             # state string (oldest symbol first) = p(1|s)
//! "0" = 0.03
//! "11" = 0.98
//! "001" = 0.95
//! "101" = 0.97
//! ```
//!
//! The root state is written `""`.
//!
//! Experiment spec:
//!
//! ```toml
//! source = "fig1.toml"     # relative to the spec file
//! n = 10000
//! depth = 5
//! blocks = [1, 2, 4, 8, 16]
//! modes = ["ptp-mdl", "naive", "markov", "naive-markov"]
//! repetitions = 200        # default 200
//! seed = 1                 # repetition r uses seed + r
//! output = "fig3.csv"      # optional, relative to the spec file
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ptpmdl_core::{EncodeConfig, Mode, State, TreeSource};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceFile {
    depth: Option<u32>,
    states: BTreeMap<String, f64>,
}

pub fn parse_source(text: &str) -> Result<TreeSource> {
    let file: SourceFile = toml::from_str(text).context("invalid source config")?;
    let pairs = file
        .states
        .iter()
        .map(|(s, &p)| Ok((s.parse::<State>().with_context(|| format!("state {s:?}"))?, p)))
        .collect::<Result<Vec<_>>>()?;
    let source = TreeSource::new(pairs)?;
    if let Some(d) = file.depth {
        if d != source.structure().depth() {
            bail!(
                "declared depth {d} does not match the deepest state ({})",
                source.structure().depth()
            );
        }
    }
    Ok(source)
}

pub fn load_source(path: &Path) -> Result<TreeSource> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_source(&text).with_context(|| format!("in {}", path.display()))
}

fn default_repetitions() -> u32 {
    200
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub source: PathBuf,
    pub n: usize,
    pub depth: u32,
    pub blocks: Vec<u32>,
    pub modes: Vec<String>,
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
    #[serde(default)]
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).context("invalid experiment spec")?;
        spec.validate()?;
        Ok(spec)
    }

    /// Reads a spec and resolves its relative paths against the spec's
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut spec = Self::parse(&text).with_context(|| format!("in {}", path.display()))?;
        let dir = path.parent().unwrap_or(Path::new(""));
        spec.source = dir.join(&spec.source);
        spec.output = spec.output.map(|o| dir.join(o));
        Ok(spec)
    }

    pub fn modes(&self) -> Result<Vec<Mode>> {
        self.modes.iter().map(|m| Ok(m.parse::<Mode>()?)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            bail!("repetitions must be at least 1");
        }
        if self.blocks.is_empty() || self.modes.is_empty() {
            bail!("blocks and modes must not be empty");
        }
        for mode in self.modes()? {
            for &b in &self.blocks {
                EncodeConfig::new(b, self.depth, mode)
                    .validate(self.n as u64)
                    .map_err(ptpmdl_core::Error::from)
                    .with_context(|| format!("B = {b}"))?;
            }
        }
        Ok(())
    }
}
