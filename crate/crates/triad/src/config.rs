//! Run configuration: built-in defaults, then an optional TOML file, then
//! `TRIAD_*` environment variables, then flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use triad_core::baseline::Lexicon;
use triad_core::corpus::DEFAULT_KEYWORD;
use triad_core::grounding::{MatchParams, DEFAULT_THRESHOLD, DEFAULT_WINDOW_SLACK};
use triad_core::sampling::Ratios;

use crate::error::{CliError, CliResult};
use crate::jsonl::read_text;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub ratios: Ratios,
    pub keyword: String,
    pub match_threshold: f64,
    pub window_slack: f64,
    pub lexicon_path: Option<PathBuf>,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            ratios: Ratios::DEFAULT,
            keyword: DEFAULT_KEYWORD.to_string(),
            match_threshold: DEFAULT_THRESHOLD,
            window_slack: DEFAULT_WINDOW_SLACK,
            lexicon_path: None,
            output_dir: PathBuf::from("."),
        }
    }
}

/// Every field optional; a present field overrides the layer below it.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub seed: Option<u64>,
    pub ratios: Option<[f64; 3]>,
    pub keyword: Option<String>,
    pub threshold: Option<f64>,
    pub slack: Option<f64>,
    pub lexicon: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl ConfigLayer {
    pub fn from_file(path: &Path) -> CliResult<ConfigLayer> {
        toml::from_str(&read_text(path)?).map_err(|e| CliError::in_file(path, e))
    }
}

impl RunConfig {
    pub fn apply(mut self, layer: ConfigLayer) -> Self {
        if let Some(v) = layer.seed {
            self.seed = v;
        }
        if let Some(v) = layer.ratios {
            self.ratios = Ratios(v);
        }
        if let Some(v) = layer.keyword {
            self.keyword = v;
        }
        if let Some(v) = layer.threshold {
            self.match_threshold = v;
        }
        if let Some(v) = layer.slack {
            self.window_slack = v;
        }
        if layer.lexicon.is_some() {
            self.lexicon_path = layer.lexicon;
        }
        if let Some(v) = layer.out {
            self.output_dir = v;
        }
        self
    }

    pub fn validate(&self) -> CliResult<()> {
        self.ratios.validate()?;
        self.match_params().validate()?;
        if self.keyword.is_empty() {
            return Err(CliError::Validation("keyword must be non-empty".into()));
        }
        Ok(())
    }

    pub fn match_params(&self) -> MatchParams {
        MatchParams {
            threshold: self.match_threshold,
            window_slack: self.window_slack,
        }
    }

    /// The configured lexicon, or the bundled default.
    pub fn lexicon(&self) -> CliResult<Lexicon> {
        let Some(path) = &self.lexicon_path else {
            return Ok(Lexicon::default());
        };
        let (lexicon, warnings) = Lexicon::from_json(&read_text(path)?).map_err(|e| CliError::in_file(path, e))?;
        for w in warnings {
            log::warn!("{}: {w}", path.display());
        }
        Ok(lexicon)
    }

    pub fn out(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }
}

/// Parse `a,b,c` into split ratios.
pub fn parse_ratios(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(format!("expected three comma-separated ratios, got {s:?}"));
    };
    let num = |x: &str| x.parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok([num(a)?, num(b)?, num(c)?])
}
