//! Lexicon predictor.
//!
//! Fires a construct when any of its trigger phrases occurs in the post and
//! quotes the first sentence containing a trigger, verbatim. It exists to
//! drive the pipeline without a model; it has no negation handling.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::construct::Construct;
use crate::corpus::Post;
use crate::error::{Error, Result};
use crate::prediction::{ConstructPrediction, PredictionRecord};

pub const DEFAULT_LEXICON_JSON: &str = include_str!("../data/default_lexicon.json");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    phrases: [Vec<String>; 3],
}

impl Lexicon {
    /// Build from per-construct phrase lists. Phrases are lowercased and
    /// trimmed; the returned warnings name phrases shared across constructs.
    pub fn new(phrases: [Vec<String>; 3]) -> Result<(Lexicon, Vec<String>)> {
        let mut cleaned: [Vec<String>; 3] = Default::default();
        for c in Construct::ALL {
            for p in &phrases[c.index()] {
                let p = p.trim().to_lowercase();
                if p.is_empty() {
                    return Err(Error::InvalidLexicon(format!("empty phrase for {c}")));
                }
                if !cleaned[c.index()].contains(&p) {
                    cleaned[c.index()].push(p);
                }
            }
        }
        let mut warnings = Vec::new();
        for (i, a) in Construct::ALL.iter().enumerate() {
            for b in &Construct::ALL[i + 1..] {
                for p in &cleaned[a.index()] {
                    if cleaned[b.index()].contains(p) {
                        warnings.push(format!("phrase {p:?} shared by {a} and {b}"));
                    }
                }
            }
        }
        Ok((Lexicon { phrases: cleaned }, warnings))
    }

    /// Parse the JSON form: construct key to array of phrases.
    pub fn from_json(json: &str) -> Result<(Lexicon, Vec<String>)> {
        let map: BTreeMap<String, Vec<String>> =
            serde_json::from_str(json).map_err(|e| Error::InvalidLexicon(e.to_string()))?;
        let mut phrases: [Vec<String>; 3] = Default::default();
        for (key, list) in map {
            let c = Construct::from_key(&key)
                .ok_or_else(|| Error::InvalidLexicon(format!("unknown construct {key:?}")))?;
            phrases[c.index()] = list;
        }
        Lexicon::new(phrases)
    }

    pub fn phrases(&self, construct: Construct) -> &[String] {
        &self.phrases[construct.index()]
    }

    pub fn to_json_map(&self) -> BTreeMap<String, Vec<String>> {
        Construct::ALL
            .iter()
            .map(|c| (c.key().to_string(), self.phrases[c.index()].clone()))
            .collect()
    }

    /// True when `text` contains any phrase of any construct.
    pub fn matches_any(&self, text: &str) -> bool {
        let lower = text.to_lowercase();
        self.phrases.iter().flatten().any(|p| lower.contains(p.as_str()))
    }
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon::from_json(DEFAULT_LEXICON_JSON)
            .expect("bundled lexicon is valid")
            .0
    }
}

/// Sentences ending at `.`, `?` or `!` followed by whitespace or the end of text,
/// trimmed of surrounding whitespace.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if matches!(c, '.' | '?' | '!') {
            let boundary = match iter.peek() {
                None => true,
                Some(&(_, next)) => next.is_whitespace(),
            };
            if boundary {
                let end = i + c.len_utf8();
                let s = text[start..end].trim();
                if !s.is_empty() {
                    out.push(s);
                }
                start = end;
            }
        }
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        out.push(tail);
    }
    out
}

fn is_quote_char(c: char) -> bool {
    matches!(c, '"' | '\u{201C}' | '\u{201D}' | '\u{201E}' | '\u{201F}' | '\u{301D}' | '\u{301E}' | '\u{FF02}')
}

/// Make a sentence safe to embed in double quotes on one line: keep the
/// quote-free segment holding the trigger and fold line breaks to spaces.
fn quotable(sentence: &str, phrase: &str) -> String {
    let segment = sentence
        .split(is_quote_char)
        .find(|seg| seg.to_lowercase().contains(phrase))
        .or_else(|| sentence.split(is_quote_char).max_by_key(|seg| seg.trim().len()))
        .unwrap_or(sentence);
    segment.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Predict all three constructs for one post.
pub fn predict(post: &Post, lexicon: &Lexicon) -> PredictionRecord {
    let lower = post.text.to_lowercase();
    let sentences = split_sentences(&post.text);
    let mut out: [ConstructPrediction; 3] = Default::default();
    for c in Construct::ALL {
        let phrases = lexicon.phrases(c);
        let Some(first_hit) = phrases.iter().find(|p| lower.contains(p.as_str())) else {
            out[c.index()] = ConstructPrediction::new(false, None, "No trigger phrase found.");
            continue;
        };
        let in_sentence = sentences.iter().find_map(|s| {
            let ls = s.to_lowercase();
            phrases.iter().find(|p| ls.contains(p.as_str())).map(|p| (*s, p))
        });
        out[c.index()] = match in_sentence {
            Some((sentence, phrase)) => {
                let quote = quotable(sentence, phrase);
                ConstructPrediction::new(
                    true,
                    Some(phrase.as_str()),
                    format!("Trigger phrase found in \"{quote}\"."),
                )
            }
            None => ConstructPrediction::new(
                true,
                Some(first_hit.as_str()),
                "Trigger phrase spans a sentence boundary.",
            ),
        };
    }
    let [body_image, disordered_eating, metabolic] = out;
    PredictionRecord::new(post.id.clone(), body_image, disordered_eating, metabolic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prediction::{emit, parse};
    use alloc::vec;

    #[test]
    fn default_lexicon_has_no_shared_phrases() {
        let (lex, warnings) = Lexicon::from_json(DEFAULT_LEXICON_JSON).unwrap();
        assert!(warnings.is_empty(), "{warnings:?}");
        for c in Construct::ALL {
            assert!(!lex.phrases(c).is_empty());
        }
    }

    #[test]
    fn shared_phrase_warns() {
        let (_, w) = Lexicon::new([vec!["x".into()], vec!["X ".into()], vec![]]).unwrap();
        assert_eq!(w.len(), 1);
        assert!(Lexicon::new([vec!["  ".into()], vec![], vec![]]).is_err());
        assert!(Lexicon::from_json("{\"other\": [\"a\"]}").is_err());
    }

    #[test]
    fn sentence_splitting() {
        assert_eq!(
            split_sentences("One. Two? Three! 3.5 stays. tail"),
            vec!["One.", "Two?", "Three!", "3.5 stays.", "tail"]
        );
        assert!(split_sentences("   ").is_empty());
    }

    #[test]
    fn fires_and_quotes_containing_sentence() {
        let post = Post::new("p", "c", "My PCOS is rough. I binge at night sometimes. Ok.");
        let r = predict(&post, &Lexicon::default());
        assert!(r.disordered_eating.decision);
        assert_eq!(r.disordered_eating.subtype.as_deref(), Some("binge"));
        assert_eq!(r.quotes, vec!["I binge at night sometimes."]);
        assert!(!r.body_image.decision);
        assert!(!r.metabolic.decision);
        assert_eq!(parse(&emit(&r), "p"), r);
    }

    #[test]
    fn no_match_means_no_quotes() {
        let post = Post::new("p", "c", "Just saying hello to everyone here.");
        let r = predict(&post, &Lexicon::default());
        assert_eq!(r.labels().count(), 0);
        assert!(r.quotes.is_empty());
    }

    #[test]
    fn sentence_with_inner_quotes_is_trimmed_to_segment() {
        let post = Post::new("p", "c", "My doc said \"try metformin\" today.");
        let r = predict(&post, &Lexicon::default());
        assert_eq!(r.quotes, vec!["try metformin"]);
        assert!(r.validate().is_ok());
    }
}
