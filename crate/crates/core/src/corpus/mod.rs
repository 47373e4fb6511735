//! Posts and the text operations applied to them before annotation.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text;

mod synth;

pub use synth::{synthesize_annotations, synthesize_corpus, SynthConfig, SynthCorpus};

pub const DEFAULT_KEYWORD: &str = "PCOS";
pub const USER_PLACEHOLDER: &str = "[USER]";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub community: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_utc: Option<i64>,
}

impl Post {
    pub fn new(id: impl Into<String>, community: impl Into<String>, text: impl Into<String>) -> Self {
        Post {
            id: id.into(),
            community: community.into(),
            text: text.into(),
            created_utc: None,
        }
    }

    pub fn tokens(&self) -> TokenizedText {
        tokenize(&self.text)
    }
}

/// Fails on the first id that appears twice.
pub fn check_unique_ids<'a>(ids: impl IntoIterator<Item = &'a str>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::DuplicateId(id.to_string()));
        }
    }
    Ok(())
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

/// Replace `u/<name>` and `/u/<name>` handles with `[USER]`.
///
/// A handle name is a maximal run of `[A-Za-z0-9_-]` of length 3 to 20, and the
/// `u` must not continue a preceding word. Everything else is left untouched.
pub fn scrub_text(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == 'u' && chars.get(i + 1) == Some(&'/') {
            let prev = if i > 0 { Some(chars[i - 1]) } else { None };
            let standalone = prev.map_or(true, |p| !(p.is_alphanumeric() || p == '_' || p == '-'));
            if standalone {
                let name_start = i + 2;
                let mut j = name_start;
                while j < chars.len() && is_name_char(chars[j]) {
                    j += 1;
                }
                let len = j - name_start;
                if (3..=20).contains(&len) {
                    if prev == Some('/') {
                        out.pop();
                    }
                    out.push_str(USER_PLACEHOLDER);
                    i = j;
                    continue;
                }
            }
        }
        out.push(c);
        i += 1;
    }
    out
}

pub fn scrub_identifiers(post: &Post) -> Post {
    Post {
        text: scrub_text(&post.text),
        ..post.clone()
    }
}

/// Posts whose text contains `keyword`, compared case-insensitively.
pub fn filter_keyword(posts: &[Post], keyword: &str) -> Result<Vec<Post>> {
    if keyword.is_empty() {
        return Err(Error::EmptyKeyword);
    }
    let needle = keyword.to_lowercase();
    Ok(posts
        .iter()
        .filter(|p| p.text.to_lowercase().contains(&needle))
        .cloned()
        .collect())
}

/// Whitespace-delimited token spans, as half-open char offsets.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedText {
    pub token_spans: Vec<(usize, usize)>,
}

impl TokenizedText {
    pub fn token_count(&self) -> usize {
        self.token_spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.token_spans.is_empty()
    }

    /// Token indices `[start, end)` touched by the char range `[start_char, end_char)`.
    pub fn token_range(&self, start_char: usize, end_char: usize) -> (usize, usize) {
        let start = self.token_spans.partition_point(|&(_, e)| e <= start_char);
        let end = self.token_spans.partition_point(|&(s, _)| s < end_char);
        (start, end.max(start))
    }
}

/// Split on whitespace (judged after NFKC) into maximal non-whitespace runs.
pub fn tokenize(text: &str) -> TokenizedText {
    TokenizedText {
        token_spans: text::token_spans(text),
    }
}
