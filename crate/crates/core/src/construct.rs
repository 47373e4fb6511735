use core::fmt;

use serde::{Deserialize, Serialize};

/// One of the three annotated binary conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construct {
    BodyImage,
    DisorderedEating,
    Metabolic,
}

impl Construct {
    pub const ALL: [Construct; 3] = [
        Construct::BodyImage,
        Construct::DisorderedEating,
        Construct::Metabolic,
    ];

    /// Field name used by the JSON formats.
    pub fn key(self) -> &'static str {
        match self {
            Construct::BodyImage => "body_image",
            Construct::DisorderedEating => "disordered_eating",
            Construct::Metabolic => "metabolic",
        }
    }

    /// Section header in the canonical prediction text.
    pub fn header(self) -> &'static str {
        match self {
            Construct::BodyImage => "BODY_IMAGE_DISTRESS",
            Construct::DisorderedEating => "DISORDERED_EATING",
            Construct::Metabolic => "METABOLIC_CHALLENGES",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Construct::BodyImage => "Body Image Distress",
            Construct::DisorderedEating => "Disordered Eating",
            Construct::Metabolic => "Metabolic Challenges",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_key(key: &str) -> Option<Construct> {
        Construct::ALL.into_iter().find(|c| c.key() == key)
    }
}

impl fmt::Display for Construct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Presence flags for the three constructs of one post.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelVector {
    pub body_image: bool,
    pub disordered_eating: bool,
    pub metabolic: bool,
}

impl LabelVector {
    pub fn new(body_image: bool, disordered_eating: bool, metabolic: bool) -> Self {
        LabelVector {
            body_image,
            disordered_eating,
            metabolic,
        }
    }

    pub fn from_fn(mut f: impl FnMut(Construct) -> bool) -> Self {
        LabelVector::new(
            f(Construct::BodyImage),
            f(Construct::DisorderedEating),
            f(Construct::Metabolic),
        )
    }

    pub fn get(&self, construct: Construct) -> bool {
        match construct {
            Construct::BodyImage => self.body_image,
            Construct::DisorderedEating => self.disordered_eating,
            Construct::Metabolic => self.metabolic,
        }
    }

    pub fn set(&mut self, construct: Construct, present: bool) {
        match construct {
            Construct::BodyImage => self.body_image = present,
            Construct::DisorderedEating => self.disordered_eating = present,
            Construct::Metabolic => self.metabolic = present,
        }
    }

    /// Number of constructs present (the co-occurrence count).
    pub fn count(&self) -> u8 {
        self.body_image as u8 + self.disordered_eating as u8 + self.metabolic as u8
    }

    pub fn level(&self) -> Level {
        Level::from_count(self.count())
    }
}

/// Reporting bucket for co-occurrence counts: 0, 1, or 2 and 3 merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2+")]
    Multiple,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Zero, Level::One, Level::Multiple];

    pub fn from_count(count: u8) -> Level {
        match count {
            0 => Level::Zero,
            1 => Level::One,
            _ => Level::Multiple,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Level::Zero => "0",
            Level::One => "1",
            Level::Multiple => "2+",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_and_level() {
        assert_eq!(LabelVector::new(false, false, false).count(), 0);
        assert_eq!(LabelVector::new(true, false, true).count(), 2);
        assert_eq!(LabelVector::new(true, true, true).level(), Level::Multiple);
        assert_eq!(LabelVector::new(false, true, false).level(), Level::One);
    }

    #[test]
    fn key_round_trip() {
        for c in Construct::ALL {
            assert_eq!(Construct::from_key(c.key()), Some(c));
        }
        assert_eq!(Construct::from_key("nope"), None);
    }
}
