//! Record types that exist only on disk, and loaders that validate ids.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use triad_core::annotation::{AnnotationRecord, GoldRecord};
use triad_core::corpus::Post;
use triad_core::grounding::{MatchKind, PostGrounding};
use triad_core::prediction::PredictionRecord;

use crate::error::{CliError, CliResult};
use crate::jsonl::read_jsonl;

/// One raw model generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionLine {
    pub post_id: String,
    pub generation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanLine {
    pub quote: String,
    pub start_char: usize,
    pub end_char: usize,
    pub kind: MatchKind,
    pub similarity: f64,
}

/// Per-post grounding result as written by `ground`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundingLine {
    pub post_id: String,
    pub quotes: usize,
    pub matched: usize,
    pub avg_span_tokens: f64,
    pub coverage_pct: f64,
    pub spans: Vec<SpanLine>,
}

impl From<&PostGrounding> for GroundingLine {
    fn from(g: &PostGrounding) -> Self {
        GroundingLine {
            post_id: g.post_id.clone(),
            quotes: g.n_quoted_phrases,
            matched: g.n_matched_spans,
            avg_span_tokens: g.avg_span_tokens,
            coverage_pct: g.coverage_pct,
            spans: g
                .spans
                .iter()
                .map(|s| SpanLine {
                    quote: s.quote.clone(),
                    start_char: s.start_char,
                    end_char: s.end_char,
                    kind: s.kind,
                    similarity: s.similarity,
                })
                .collect(),
        }
    }
}

fn unique_ids<'a>(path: &Path, ids: impl Iterator<Item = &'a str>) -> CliResult<()> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(CliError::in_file(path, format!("duplicate id {id:?}")));
        }
    }
    Ok(())
}

pub fn load_posts(path: &Path) -> CliResult<Vec<Post>> {
    let posts: Vec<Post> = read_jsonl(path)?;
    unique_ids(path, posts.iter().map(|p| p.id.as_str()))?;
    Ok(posts)
}

/// Annotations sorted by post id.
pub fn load_annotations(path: &Path) -> CliResult<Vec<AnnotationRecord>> {
    let mut records: Vec<AnnotationRecord> = read_jsonl(path)?;
    unique_ids(path, records.iter().map(|r| r.post_id.as_str()))?;
    for r in &records {
        r.validate().map_err(|e| CliError::in_file(path, format!("{:?}: {e}", r.post_id)))?;
    }
    records.sort_by(|a, b| a.post_id.cmp(&b.post_id));
    Ok(records)
}

pub fn load_golds(path: &Path) -> CliResult<Vec<GoldRecord>> {
    let mut golds: Vec<GoldRecord> = read_jsonl(path)?;
    unique_ids(path, golds.iter().map(|g| g.post_id.as_str()))?;
    golds.sort_by(|a, b| a.post_id.cmp(&b.post_id));
    Ok(golds)
}

pub fn load_generations(path: &Path) -> CliResult<Vec<PredictionLine>> {
    let mut lines: Vec<PredictionLine> = read_jsonl(path)?;
    unique_ids(path, lines.iter().map(|l| l.post_id.as_str()))?;
    lines.sort_by(|a, b| a.post_id.cmp(&b.post_id));
    Ok(lines)
}

pub fn load_parsed(path: &Path) -> CliResult<Vec<PredictionRecord>> {
    let mut records: Vec<PredictionRecord> = read_jsonl(path)?;
    unique_ids(path, records.iter().map(|r| r.post_id.as_str()))?;
    records.sort_by(|a, b| a.post_id.cmp(&b.post_id));
    Ok(records)
}
