use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_ratios, ConfigLayer, RunConfig};
use crate::error::CliResult;

/// Triple-burden corpus, annotation and evaluation pipeline.
#[derive(Debug, Parser)]
#[command(name = "triad", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

/// Shared run settings. Each may also come from `TRIAD_<NAME>` or a config file.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// TOML file with any of: seed, ratios, keyword, threshold, slack, lexicon, out.
    #[arg(long, global = true, env = "TRIAD_CONFIG")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, env = "TRIAD_SEED")]
    pub seed: Option<u64>,

    /// Train, validation and test ratios, e.g. 0.7,0.15,0.15.
    #[arg(long, global = true, env = "TRIAD_RATIOS", value_parser = parse_ratios)]
    pub ratios: Option<[f64; 3]>,

    #[arg(long, global = true, env = "TRIAD_KEYWORD")]
    pub keyword: Option<String>,

    /// Minimum similarity for an approximate span match.
    #[arg(long, global = true, env = "TRIAD_THRESHOLD")]
    pub threshold: Option<f64>,

    /// Window width tolerance for approximate matching, as a fraction of quote length.
    #[arg(long, global = true, env = "TRIAD_SLACK")]
    pub slack: Option<f64>,

    /// JSON lexicon mapping construct names to trigger phrases.
    #[arg(long, global = true, env = "TRIAD_LEXICON")]
    pub lexicon: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, env = "TRIAD_OUT")]
    pub out: Option<PathBuf>,
}

impl GlobalArgs {
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg = cfg.apply(ConfigLayer::from_file(path)?);
        }
        cfg = cfg.apply(ConfigLayer {
            seed: self.seed,
            ratios: self.ratios,
            keyword: self.keyword.clone(),
            threshold: self.threshold,
            slack: self.slack,
            lexicon: self.lexicon.clone(),
            out: self.out.clone(),
        });
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scrub user handles and keep posts mentioning the keyword.
    Filter {
        #[arg(long)]
        corpus: PathBuf,
        /// Leave `u/name` handles in place.
        #[arg(long)]
        keep_handles: bool,
    },
    /// Draw a uniform random sample of posts without replacement.
    Sample {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(short, long)]
        n: usize,
    },
    /// Stratified train/validation/test split keyed on co-occurrence count.
    Split {
        #[arg(long)]
        gold: PathBuf,
        /// Also write the posts of each split.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Cohen's kappa, raw agreement and disagreement asymmetry.
    Agreement {
        #[arg(long)]
        set1: PathBuf,
        #[arg(long)]
        set2: PathBuf,
    },
    /// Inclusive merge of two annotation sets into gold labels.
    Merge {
        #[arg(long)]
        set1: PathBuf,
        #[arg(long)]
        set2: PathBuf,
    },
    /// Parse raw generations into prediction records.
    Parse {
        #[arg(long)]
        predictions: PathBuf,
    },
    /// Locate quoted evidence in the source posts.
    Ground {
        #[arg(long)]
        parsed: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Score parsed predictions against gold labels.
    Evaluate {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        parsed: PathBuf,
    },
    /// Lexicon baseline generations for every post.
    Baseline {
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Synthetic corpus, gold labels and two annotation sets.
    Synth {
        /// Posts with 0, 1, 2 and 3 constructs.
        #[arg(long, value_delimiter = ',', default_values_t = [395, 434, 145, 26])]
        strata: Vec<usize>,
        /// Relative prevalence of body image, disordered eating and metabolic.
        #[arg(long, value_delimiter = ',', default_values_t = [0.224, 0.204, 0.376])]
        marginals: Vec<f64>,
        /// Chance that an evidence sentence avoids every trigger phrase.
        #[arg(long, default_value_t = 0.10)]
        miss_rate: f64,
        /// Chance that an absent construct gets a negated trigger sentence.
        #[arg(long, default_value_t = 0.05)]
        decoy_rate: f64,
        /// Chance that a present construct is marked by only one annotator.
        #[arg(long, default_value_t = 0.2)]
        disagreement_rate: f64,
        /// Share of single-annotator marks made by annotator 2.
        #[arg(long, default_value_t = 0.69)]
        annotator2_share: f64,
    },
    /// Render a Markdown report from any subset of stage outputs.
    Report {
        #[arg(long)]
        split: Option<PathBuf>,
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long)]
        agreement: Option<PathBuf>,
        #[arg(long)]
        evaluation: Option<PathBuf>,
        /// `grounding_report.json` written by `ground`.
        #[arg(long)]
        grounding: Option<PathBuf>,
    },
}
