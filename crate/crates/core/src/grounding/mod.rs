//! Locating quoted evidence in source posts.
//!
//! Matching runs in two stages over text normalized with NFKC, lowercasing and
//! whitespace collapsing:
//!
//! 1. exact: the earliest occurrence of the normalized quote as a substring of
//!    the normalized post;
//! 2. approximate: the best contiguous token window whose width is within
//!    `max(1, ceil(slack * n))` of the quote's `n` tokens, scored by
//!    [`similarity::ratio`] and accepted at or above the threshold.
//!
//! Offsets in a [`SpanMatch`] refer to the original post text, in chars.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::corpus::{tokenize, Post, TokenizedText};
use crate::error::{Error, Result};
use crate::prediction::PredictionRecord;
use crate::stats;
use crate::text::{normalize_for_matching, Normalized};

pub mod similarity;

use similarity::Ratio;

pub const DEFAULT_THRESHOLD: f64 = 0.80;
pub const DEFAULT_WINDOW_SLACK: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchParams {
    pub threshold: f64,
    pub window_slack: f64,
}

impl Default for MatchParams {
    fn default() -> Self {
        MatchParams {
            threshold: DEFAULT_THRESHOLD,
            window_slack: DEFAULT_WINDOW_SLACK,
        }
    }
}

impl MatchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "threshold {} not in (0, 1]",
                self.threshold
            )));
        }
        if !(self.window_slack >= 0.0) || !self.window_slack.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "window slack {} must be non-negative",
                self.window_slack
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchKind {
    Exact,
    Approximate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanMatch {
    pub quote: String,
    pub start_char: usize,
    pub end_char: usize,
    pub start_token: usize,
    pub end_token: usize,
    pub token_length: usize,
    pub kind: MatchKind,
    pub similarity: f64,
}

/// A post normalized once for matching many quotes.
pub struct PreparedText<'a> {
    tokens: &'a TokenizedText,
    norm: Normalized,
    /// Normalized-char extent of each token.
    norm_tokens: Vec<(usize, usize)>,
}

impl<'a> PreparedText<'a> {
    pub fn new(text: &str, tokens: &'a TokenizedText) -> Self {
        let norm = normalize_for_matching(text);
        let mut norm_tokens = Vec::new();
        let mut i = 0;
        while i < norm.chars.len() {
            if norm.chars[i] == ' ' {
                i += 1;
                continue;
            }
            let start = i;
            while i < norm.chars.len() && norm.chars[i] != ' ' {
                i += 1;
            }
            norm_tokens.push((start, i));
        }
        PreparedText {
            tokens,
            norm,
            norm_tokens,
        }
    }

    fn span_for(&self, quote: &str, ns: usize, ne: usize, kind: MatchKind, similarity: f64) -> SpanMatch {
        let start_char = self.norm.origin[ns].0;
        let end_char = self.norm.origin[ne - 1].1;
        let (start_token, end_token) = self.tokens.token_range(start_char, end_char);
        SpanMatch {
            quote: quote.into(),
            start_char,
            end_char,
            start_token,
            end_token,
            token_length: end_token - start_token,
            kind,
            similarity,
        }
    }

    /// Locate `quote`, exactly if possible, else approximately.
    pub fn match_quote(&self, quote: &str, params: &MatchParams) -> Result<Option<SpanMatch>> {
        if quote.is_empty() {
            return Err(Error::EmptyQuote);
        }
        let q = normalize_for_matching(quote).chars;
        if q.is_empty() || self.norm.chars.is_empty() {
            return Ok(None);
        }
        if let Some(ns) = find_subslice(&self.norm.chars, &q) {
            return Ok(Some(self.span_for(quote, ns, ns + q.len(), MatchKind::Exact, 1.0)));
        }

        let n = q.split(|&c| c == ' ').count();
        let slack = libm::ceil(params.window_slack * n as f64) as usize;
        let delta = slack.max(1);
        let min_w = n.saturating_sub(delta).max(1);
        let max_w = n + delta;
        let total = self.norm_tokens.len();

        let mut best: Option<(Ratio, usize, usize)> = None;
        for start in 0..total {
            for w in min_w..=max_w {
                let end = start + w;
                if end > total {
                    break;
                }
                let ns = self.norm_tokens[start].0;
                let ne = self.norm_tokens[end - 1].1;
                let window = &self.norm.chars[ns..ne];
                // matched length can never exceed the shorter side
                let bound = Ratio {
                    numerator: 2 * q.len().min(window.len()),
                    denominator: q.len() + window.len(),
                };
                if bound.value() < params.threshold {
                    continue;
                }
                if let Some((b, _, _)) = best {
                    if bound.cmp_exact(b) != Ordering::Greater {
                        continue;
                    }
                }
                let r = similarity::ratio(&q, window);
                if r.value() < params.threshold {
                    continue;
                }
                // strictly better only: earlier starts and shorter windows are
                // visited first and win ties
                if best.map_or(true, |(b, _, _)| r.cmp_exact(b) == Ordering::Greater) {
                    best = Some((r, ns, ne));
                }
            }
        }
        Ok(best.map(|(r, ns, ne)| self.span_for(quote, ns, ne, MatchKind::Approximate, r.value())))
    }
}

fn find_subslice(hay: &[char], needle: &[char]) -> Option<usize> {
    if needle.len() > hay.len() {
        return None;
    }
    hay.windows(needle.len()).position(|w| w == needle)
}

/// Locate one quote in a post.
pub fn match_quote(
    quote: &str,
    post_text: &str,
    post_tokens: &TokenizedText,
    params: &MatchParams,
) -> Result<Option<SpanMatch>> {
    PreparedText::new(post_text, post_tokens).match_quote(quote, params)
}

/// Percent of tokens covered by the union of half-open token intervals.
pub fn coverage_of_intervals(intervals: &[(usize, usize)], token_count: usize) -> Result<f64> {
    for &(start, end) in intervals {
        if start > end || end > token_count {
            return Err(Error::SpanOutOfRange {
                start,
                end,
                len: token_count,
            });
        }
    }
    if token_count == 0 {
        return Ok(0.0);
    }
    let mut sorted: Vec<(usize, usize)> = intervals.iter().copied().filter(|(s, e)| s < e).collect();
    sorted.sort_unstable();
    let mut covered = 0;
    let mut reach = 0;
    for (s, e) in sorted {
        let s = s.max(reach);
        if e > s {
            covered += e - s;
            reach = e;
        }
    }
    Ok(100.0 * covered as f64 / token_count as f64)
}

/// Citation coverage: unique tokens inside any matched span over all tokens.
/// An empty post has coverage 0.
pub fn coverage(spans: &[SpanMatch], post_tokens: &TokenizedText) -> Result<f64> {
    let intervals: Vec<(usize, usize)> = spans.iter().map(|s| (s.start_token, s.end_token)).collect();
    coverage_of_intervals(&intervals, post_tokens.token_count())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostGrounding {
    pub post_id: String,
    pub n_quoted_phrases: usize,
    pub n_matched_spans: usize,
    pub avg_span_tokens: f64,
    pub coverage_pct: f64,
    pub spans: Vec<SpanMatch>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Match every quoted phrase of a prediction against its post. Duplicate
/// quotes are matched and counted independently.
pub fn ground_prediction(record: &PredictionRecord, post: &Post, params: &MatchParams) -> Result<PostGrounding> {
    if record.post_id != post.id {
        return Err(Error::PostIdMismatch {
            expected: post.id.clone(),
            found: record.post_id.clone(),
        });
    }
    params.validate()?;
    let tokens = tokenize(&post.text);
    let prepared = PreparedText::new(&post.text, &tokens);
    let mut spans = Vec::new();
    for quote in record.quotes.iter().filter(|q| !q.is_empty()) {
        if let Some(span) = prepared.match_quote(quote, params)? {
            spans.push(span);
        }
    }
    let mut warnings = Vec::new();
    if tokens.is_empty() {
        warnings.push(String::from("empty post; coverage defined as 0"));
    }
    let avg_span_tokens = if spans.is_empty() {
        0.0
    } else {
        spans.iter().map(|s| s.token_length).sum::<usize>() as f64 / spans.len() as f64
    };
    Ok(PostGrounding {
        post_id: post.id.clone(),
        n_quoted_phrases: record.quotes.iter().filter(|q| !q.is_empty()).count(),
        n_matched_spans: spans.len(),
        avg_span_tokens,
        coverage_pct: coverage(&spans, &tokens)?,
        spans,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundingReport {
    pub n_posts: usize,
    pub posts_with_any_match: usize,
    pub posts_with_any_match_pct: f64,
    pub mean_quoted_phrases: f64,
    pub mean_matched_spans: f64,
    pub mean_avg_span_tokens: f64,
    pub mean_coverage_pct: f64,
    pub exact_spans: usize,
    pub approximate_spans: usize,
    /// Pearson r between per-post quoted-phrase and matched-span counts.
    pub pearson_quotes_vs_matches: Option<f64>,
}

/// Corpus-level means over per-post results, folded in post-id order.
pub fn grounding_report(results: &[PostGrounding]) -> GroundingReport {
    let mut ordered: Vec<&PostGrounding> = results.iter().collect();
    ordered.sort_by(|a, b| a.post_id.cmp(&b.post_id));
    let n = ordered.len();
    let col = |f: fn(&PostGrounding) -> f64| -> Vec<f64> { ordered.iter().map(|r| f(r)).collect() };
    let quoted = col(|r| r.n_quoted_phrases as f64);
    let matched = col(|r| r.n_matched_spans as f64);
    let mean0 = |xs: &[f64]| stats::mean(xs).unwrap_or(0.0);
    let with_match = ordered.iter().filter(|r| r.n_matched_spans > 0).count();
    let (mut exact, mut approx) = (0, 0);
    for span in ordered.iter().flat_map(|r| &r.spans) {
        match span.kind {
            MatchKind::Exact => exact += 1,
            MatchKind::Approximate => approx += 1,
        }
    }
    GroundingReport {
        n_posts: n,
        posts_with_any_match: with_match,
        posts_with_any_match_pct: if n == 0 { 0.0 } else { 100.0 * with_match as f64 / n as f64 },
        mean_quoted_phrases: mean0(&quoted),
        mean_matched_spans: mean0(&matched),
        mean_avg_span_tokens: mean0(&col(|r| r.avg_span_tokens)),
        mean_coverage_pct: mean0(&col(|r| r.coverage_pct)),
        exact_spans: exact,
        approximate_spans: approx,
        pearson_quotes_vs_matches: stats::pearson(&quoted, &matched),
    }
}

/// Tokens covered by any span, for rendering highlights.
pub fn covered_tokens(spans: &[SpanMatch]) -> BTreeSet<usize> {
    spans.iter().flat_map(|s| s.start_token..s.end_token).collect()
}
