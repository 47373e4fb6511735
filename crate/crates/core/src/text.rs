//! NFKC normalization that remembers where each output character came from.
//!
//! Offsets throughout the crate count Unicode scalar values, not bytes.

use alloc::string::String;
use alloc::vec::Vec;

use unicode_normalization::char::canonical_combining_class;
use unicode_normalization::UnicodeNormalization;

/// Normalized text plus, for every normalized char, the half-open range of
/// original chars it was produced from.
#[derive(Debug, Clone)]
pub(crate) struct Normalized {
    pub chars: Vec<char>,
    pub origin: Vec<(usize, usize)>,
}

/// A starter char and the combining marks that follow it, in original char
/// indices, together with its NFKC form.
struct Cluster {
    start: usize,
    end: usize,
    nfkc: String,
}

impl Cluster {
    fn is_space(&self) -> bool {
        !self.nfkc.is_empty() && self.nfkc.chars().all(char::is_whitespace)
    }
}

fn clusters(text: &str) -> Vec<Cluster> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let start = i;
        i += 1;
        // Whitespace never absorbs following marks; it must stay a separator.
        if !chars[start].is_whitespace() {
            while i < chars.len()
                && canonical_combining_class(chars[i]) != 0
                && !chars[i].is_whitespace()
            {
                i += 1;
            }
        }
        let nfkc: String = chars[start..i].iter().copied().nfkc().collect();
        out.push(Cluster { start, end: i, nfkc });
    }
    out
}

/// Half-open char spans of maximal non-whitespace runs, judged after NFKC.
pub(crate) fn token_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut current: Option<(usize, usize)> = None;
    for cluster in clusters(text) {
        if cluster.is_space() {
            if let Some(span) = current.take() {
                spans.push(span);
            }
        } else {
            current = match current {
                Some((s, _)) => Some((s, cluster.end)),
                None => Some((cluster.start, cluster.end)),
            };
        }
    }
    if let Some(span) = current {
        spans.push(span);
    }
    spans
}

/// NFKC, lowercase, whitespace runs collapsed to one space, trimmed.
pub(crate) fn normalize_for_matching(text: &str) -> Normalized {
    let mut chars = Vec::new();
    let mut origin = Vec::new();
    let mut pending_space: Option<(usize, usize)> = None;
    for cluster in clusters(text) {
        if cluster.is_space() {
            if pending_space.is_none() {
                pending_space = Some((cluster.start, cluster.end));
            }
            continue;
        }
        if let Some(range) = pending_space.take() {
            if !chars.is_empty() {
                chars.push(' ');
                origin.push(range);
            }
        }
        for c in cluster.nfkc.chars() {
            // Compatibility forms such as U+00A8 decompose to a space plus a
            // mark; inside a token that space is dropped so token boundaries
            // agree with `token_spans`.
            if c.is_whitespace() {
                continue;
            }
            for lower in c.to_lowercase() {
                chars.push(lower);
                origin.push((cluster.start, cluster.end));
            }
        }
    }
    Normalized { chars, origin }
}

#[cfg(test)]
pub(crate) fn normalized_string(text: &str) -> String {
    normalize_for_matching(text).chars.into_iter().collect()
}
