//! Canonical structured-prediction text.
//!
//! ```text
//! POST_ID: <id>
//! BODY_IMAGE_DISTRESS: YES|NO
//! SUBTYPE: <text|NONE>
//! REASONING: <free text, evidence in "double quotes">
//! DISORDERED_EATING: YES|NO
//! SUBTYPE: ...
//! REASONING: ...
//! METABOLIC_CHALLENGES: YES|NO
//! SUBTYPE: ...
//! REASONING: ...
//! ```
//!
//! [`parse`] is total: model generations that drift from the grammar still
//! produce a record, with defaulted NO decisions and warnings.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::construct::{Construct, LabelVector};
use crate::error::{Error, Result};

pub const UNSTRUCTURED_WARNING: &str = "unstructured output";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructPrediction {
    pub decision: bool,
    pub subtype: Option<String>,
    pub reasoning: String,
}

impl ConstructPrediction {
    pub fn new(decision: bool, subtype: Option<&str>, reasoning: impl Into<String>) -> Self {
        ConstructPrediction {
            decision,
            subtype: subtype.map(ToString::to_string),
            reasoning: reasoning.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub post_id: String,
    pub body_image: ConstructPrediction,
    pub disordered_eating: ConstructPrediction,
    pub metabolic: ConstructPrediction,
    /// Every quoted phrase of the generation, in textual order.
    pub quotes: Vec<String>,
    #[serde(default)]
    pub parse_warnings: Vec<String>,
}

impl PredictionRecord {
    /// Build a record whose quote pool is derived from its own canonical text.
    pub fn new(
        post_id: impl Into<String>,
        body_image: ConstructPrediction,
        disordered_eating: ConstructPrediction,
        metabolic: ConstructPrediction,
    ) -> Self {
        let mut record = PredictionRecord {
            post_id: post_id.into(),
            body_image,
            disordered_eating,
            metabolic,
            quotes: Vec::new(),
            parse_warnings: Vec::new(),
        };
        record.quotes = extract_quotes(&emit(&record));
        record
    }

    pub fn construct(&self, c: Construct) -> &ConstructPrediction {
        match c {
            Construct::BodyImage => &self.body_image,
            Construct::DisorderedEating => &self.disordered_eating,
            Construct::Metabolic => &self.metabolic,
        }
    }

    fn construct_mut(&mut self, c: Construct) -> &mut ConstructPrediction {
        match c {
            Construct::BodyImage => &mut self.body_image,
            Construct::DisorderedEating => &mut self.disordered_eating,
            Construct::Metabolic => &mut self.metabolic,
        }
    }

    pub fn labels(&self) -> LabelVector {
        LabelVector::from_fn(|c| self.construct(c).decision)
    }

    /// A degraded record had at least one decision defaulted or a section missing.
    pub fn is_parse_degraded(&self) -> bool {
        !self.parse_warnings.is_empty()
    }

    /// Checks that [`emit`] output parses back to this record.
    pub fn validate(&self) -> Result<()> {
        let single_line = |s: &str| !s.contains(['\n', '\r']);
        if self.post_id.is_empty() || !single_line(&self.post_id) {
            return Err(Error::InvalidRecord("post_id must be a non-empty single line".into()));
        }
        for c in Construct::ALL {
            let p = self.construct(c);
            if !single_line(&p.reasoning) || p.reasoning.trim() != p.reasoning {
                return Err(Error::InvalidRecord(format!(
                    "{}: reasoning must be a trimmed single line",
                    c.header()
                )));
            }
            if let Some(sub) = &p.subtype {
                if sub.is_empty()
                    || !single_line(sub)
                    || sub.trim() != sub
                    || sub.eq_ignore_ascii_case("none")
                {
                    return Err(Error::InvalidRecord(format!(
                        "{}: subtype must be a trimmed single line other than NONE",
                        c.header()
                    )));
                }
            }
        }
        if self.quotes != extract_quotes(&emit(self)) {
            return Err(Error::InvalidRecord("quotes disagree with reasoning text".into()));
        }
        Ok(())
    }
}

/// Render a record in the canonical grammar.
pub fn emit(record: &PredictionRecord) -> String {
    let mut out = String::new();
    out.push_str("POST_ID: ");
    out.push_str(&record.post_id);
    out.push('\n');
    for c in Construct::ALL {
        let p = record.construct(c);
        out.push_str(c.header());
        out.push_str(if p.decision { ": YES\n" } else { ": NO\n" });
        out.push_str("SUBTYPE: ");
        out.push_str(p.subtype.as_deref().unwrap_or("NONE"));
        out.push('\n');
        out.push_str("REASONING:");
        if !p.reasoning.is_empty() {
            out.push(' ');
            out.push_str(&p.reasoning);
        }
        out.push('\n');
    }
    out
}

fn is_double_quote(c: char) -> bool {
    matches!(
        c,
        '"' | '\u{201C}' | '\u{201D}' | '\u{201E}' | '\u{201F}' | '\u{301D}' | '\u{301E}' | '\u{FF02}'
    )
}

/// Contents of successive double-quote pairs, curly quotes folded to straight.
///
/// A trailing unpaired quote is ignored and empty quotations are dropped.
pub fn extract_quotes(text: &str) -> Vec<String> {
    let mut quotes = Vec::new();
    let mut open: Option<String> = None;
    for c in text.chars() {
        if is_double_quote(c) {
            match open.take() {
                Some(q) if !q.is_empty() => quotes.push(q),
                Some(_) => {}
                None => open = Some(String::new()),
            }
        } else if let Some(q) = open.as_mut() {
            q.push(c);
        }
    }
    quotes
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Header {
    PostId,
    Construct(Construct),
    Subtype,
    Reasoning,
}

/// Recognize `NAME: value` lines, tolerating case, inner spacing and
/// markdown emphasis around the name.
fn header_line(line: &str) -> Option<(Header, &str)> {
    let colon = line.find(':')?;
    let raw = line[..colon].trim().trim_matches(|c| c == '*' || c == '#' || c == '_' || c == ' ');
    if raw.is_empty() || !raw.chars().all(|c| c.is_ascii_alphabetic() || matches!(c, ' ' | '_' | '-' | '\t')) {
        return None;
    }
    let mut name = String::with_capacity(raw.len());
    let mut gap = false;
    for c in raw.chars() {
        if matches!(c, ' ' | '_' | '-' | '\t') {
            gap = true;
        } else {
            if gap && !name.is_empty() {
                name.push('_');
            }
            gap = false;
            name.push(c.to_ascii_uppercase());
        }
    }
    let header = match name.as_str() {
        "POST_ID" => Header::PostId,
        "SUBTYPE" => Header::Subtype,
        "REASONING" => Header::Reasoning,
        other => Header::Construct(Construct::ALL.into_iter().find(|c| c.header() == other)?),
    };
    let value = line[colon + 1..].trim();
    Some((header, value))
}

fn parse_decision(value: &str) -> Option<bool> {
    let token = value
        .split_whitespace()
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()))
        .find(|t| !t.is_empty())?;
    if token.eq_ignore_ascii_case("yes") {
        Some(true)
    } else if token.eq_ignore_ascii_case("no") {
        Some(false)
    } else {
        None
    }
}

#[derive(Default)]
struct Section {
    decision: Option<bool>,
    subtype: Option<String>,
    reasoning: Option<String>,
    loose: Vec<String>,
    in_reasoning: bool,
}

/// Parse a model generation. Never fails.
pub fn parse(text: &str, post_id: &str) -> PredictionRecord {
    let mut sections: [Option<Section>; 3] = [None, None, None];
    let mut warnings = Vec::new();
    let mut current: Option<Construct> = None;

    for line in text.lines() {
        match header_line(line) {
            Some((Header::Construct(c), value)) => {
                if sections[c.index()].is_some() {
                    warnings.push(format!("duplicate section {}", c.header()));
                    current = None;
                    continue;
                }
                let decision = parse_decision(value);
                if decision.is_none() {
                    warnings.push(format!("unrecognized decision for {}: {:?}", c.header(), value));
                }
                sections[c.index()] = Some(Section {
                    decision,
                    ..Section::default()
                });
                current = Some(c);
            }
            Some((Header::PostId, _)) => current = None,
            Some((Header::Subtype, value)) => {
                if let Some(s) = current.and_then(|c| sections[c.index()].as_mut()) {
                    s.in_reasoning = false;
                    let value = value.trim_matches(|c: char| c == '*' || c.is_whitespace());
                    if s.subtype.is_none() && !value.is_empty() && !value.eq_ignore_ascii_case("none") {
                        s.subtype = Some(value.to_string());
                    }
                }
            }
            Some((Header::Reasoning, value)) => {
                if let Some(s) = current.and_then(|c| sections[c.index()].as_mut()) {
                    let r = s.reasoning.get_or_insert_with(String::new);
                    if !r.is_empty() {
                        r.push('\n');
                    }
                    r.push_str(value);
                    s.in_reasoning = true;
                }
            }
            None => {
                if let Some(s) = current.and_then(|c| sections[c.index()].as_mut()) {
                    if s.in_reasoning {
                        let r = s.reasoning.get_or_insert_with(String::new);
                        r.push('\n');
                        r.push_str(line);
                    } else {
                        s.loose.push(line.to_string());
                    }
                }
            }
        }
    }

    let structured = sections.iter().any(Option::is_some);
    if !structured {
        warnings.clear();
        warnings.push(UNSTRUCTURED_WARNING.to_string());
    }

    let mut record = PredictionRecord {
        post_id: post_id.to_string(),
        body_image: ConstructPrediction::default(),
        disordered_eating: ConstructPrediction::default(),
        metabolic: ConstructPrediction::default(),
        quotes: extract_quotes(text),
        parse_warnings: Vec::new(),
    };
    for c in Construct::ALL {
        let out = record.construct_mut(c);
        match sections[c.index()].take() {
            Some(s) => {
                out.decision = s.decision.unwrap_or(false);
                out.subtype = s.subtype;
                out.reasoning = match s.reasoning {
                    Some(r) => r.trim().to_string(),
                    None => s.loose.join("\n").trim().to_string(),
                };
            }
            None if structured => warnings.push(format!("missing section {}", c.header())),
            None => {}
        }
    }
    record.parse_warnings = warnings;
    record
}
