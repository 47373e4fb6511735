//! Seeded synthetic corpora with an exact co-occurrence distribution.
//!
//! Each post opens with a keyword sentence, then carries one evidence
//! sentence per gold-present construct and a few neutral fillers. Evidence
//! sentences normally embed a lexicon trigger; with probability `miss_rate`
//! they use a trigger-free paraphrase instead. Absent constructs receive a
//! negated "decoy" trigger sentence with probability `decoy_rate`. Both make
//! the lexicon baseline imperfect in a controlled way.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::Post;
use crate::annotation::{AnnotationRecord, ConstructLabel, GoldLabel, GoldRecord};
use crate::baseline::Lexicon;
use crate::construct::{Construct, LabelVector};
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, StageRng};

const OPENERS: &[&str] = &[
    "Posting here because of my PCOS.",
    "Got my PCOS diagnosis recently.",
    "PCOS update from me.",
    "Long time lurker with PCOS here.",
    "Anyone else with PCOS feel this way?",
];

const FILLERS: &[&str] = &[
    "I was diagnosed two years ago.",
    "My cycles have been irregular since my teens.",
    "Does anyone have advice for a newbie?",
    "Thanks for reading this far.",
    "I start a new job next month.",
    "My partner has been really supportive.",
    "The clinic waitlist is three months long.",
    "I just wanted to vent somewhere safe.",
    "Work has been busy this week.",
    "My sister has it too.",
];

const TRIGGER_TEMPLATES: &[&str] = &[
    "I keep thinking about {} lately.",
    "Today was rough because of {}.",
    "Honestly {} has taken over my week.",
    "Can anyone relate to {}?",
];

const DECOY_TEMPLATES: &[&str] = &[
    "Thankfully {} is not something I deal with.",
    "My friend asked about {} but that is not me.",
];

const PARAPHRASES: [&[&str]; 3] = [
    &[
        "Looking at photos of myself makes me want to hide.",
        "I cover up every part of me when I go out.",
    ],
    &[
        "Some days I eat almost nothing until I collapse at night.",
        "I lose control around food and feel awful after.",
    ],
    &[
        "My doctor says my numbers are heading the wrong way.",
        "The scale keeps going up no matter what I do.",
    ],
];

const COMMUNITIES: &[&str] = &["PCOS", "PCOSloseit", "PCOS_Folks"];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Number of posts per co-occurrence count 0..=3.
    pub strata_sizes: [usize; 4],
    /// Per-construct marginal probability, used to weight which constructs
    /// are present within a stratum.
    pub construct_marginals: [f64; 3],
    pub miss_rate: f64,
    pub decoy_rate: f64,
    pub seed: u64,
}

impl SynthConfig {
    /// Table-shaped defaults: 1,000 posts split 395/434/145/26 by count.
    pub fn reference_shape(seed: u64) -> Self {
        SynthConfig {
            strata_sizes: [395, 434, 145, 26],
            construct_marginals: [0.224, 0.204, 0.376],
            miss_rate: 0.10,
            decoy_rate: 0.05,
            seed,
        }
    }

    pub fn new(strata_sizes: [usize; 4], construct_marginals: [f64; 3], seed: u64) -> Self {
        SynthConfig {
            strata_sizes,
            construct_marginals,
            ..SynthConfig::reference_shape(seed)
        }
    }

    fn validate(&self) -> Result<()> {
        let named = Construct::ALL
            .iter()
            .map(|c| (c.key().to_string(), self.construct_marginals[c.index()]))
            .chain([
                ("miss_rate".to_string(), self.miss_rate),
                ("decoy_rate".to_string(), self.decoy_rate),
            ]);
        for (name, value) in named {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidProbability { name, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub posts: Vec<Post>,
    pub golds: Vec<GoldRecord>,
}

/// Label vectors with exactly `count` constructs present, with their weight
/// under independent Bernoulli marginals.
fn combos(count: usize, p: &[f64; 3]) -> Vec<(LabelVector, f64)> {
    (0u8..8)
        .map(|bits| LabelVector::new(bits & 1 != 0, bits & 2 != 0, bits & 4 != 0))
        .filter(|l| l.count() as usize == count)
        .map(|l| {
            let w = Construct::ALL
                .iter()
                .map(|&c| if l.get(c) { p[c.index()] } else { 1.0 - p[c.index()] })
                .product::<f64>();
            (l, w)
        })
        .collect()
}

fn choose_weighted(rng: &mut StageRng, options: &[(LabelVector, f64)]) -> LabelVector {
    let total: f64 = options.iter().map(|o| o.1).sum();
    let mut x = rng.random::<f64>() * total;
    for &(l, w) in options {
        if w > 0.0 {
            if x < w {
                return l;
            }
            x -= w;
        }
    }
    // rounding left x at the top edge; take the last positive option
    options.iter().rev().find(|o| o.1 > 0.0).expect("feasible").0
}

fn pick<'a>(rng: &mut StageRng, items: &[&'a str]) -> &'a str {
    items[rng.random_range(0..items.len())]
}

fn pick_phrase<'a>(rng: &mut StageRng, lexicon: &'a Lexicon, c: Construct) -> &'a str {
    let phrases = lexicon.phrases(c);
    &phrases[rng.random_range(0..phrases.len())]
}

/// Generate posts and gold records whose co-occurrence counts match
/// `strata_sizes` exactly. Deterministic in the seed.
pub fn synthesize_corpus(config: &SynthConfig, lexicon: &Lexicon) -> Result<SynthCorpus> {
    config.validate()?;
    for c in Construct::ALL {
        if lexicon.phrases(c).is_empty() {
            return Err(Error::InvalidLexicon(format!("no phrases for {c}")));
        }
    }
    let mut rng = rng_from_seed(config.seed);

    let mut labels = Vec::new();
    for (count, &size) in config.strata_sizes.iter().enumerate() {
        if size == 0 {
            continue;
        }
        let options = combos(count, &config.construct_marginals);
        if options.iter().all(|o| o.1 <= 0.0) {
            return Err(Error::Infeasible(format!(
                "{size} posts requested with {count} constructs present, but the marginals make that impossible"
            )));
        }
        for _ in 0..size {
            labels.push(choose_weighted(&mut rng, &options));
        }
    }
    labels.shuffle(&mut rng);

    let width = labels.len().to_string().len().max(4);
    let mut posts = Vec::with_capacity(labels.len());
    let mut golds = Vec::with_capacity(labels.len());
    for (i, gold_labels) in labels.into_iter().enumerate() {
        let id = format!("synth-{:0width$}", i + 1);
        let mut gold = GoldRecord::from_labels(id.clone(), gold_labels);
        let mut body: Vec<String> = Vec::new();
        for c in Construct::ALL {
            if gold_labels.get(c) {
                let sentence = if rng.random_bool(config.miss_rate) {
                    pick(&mut rng, PARAPHRASES[c.index()]).to_string()
                } else {
                    let phrase = pick_phrase(&mut rng, lexicon, c);
                    pick(&mut rng, TRIGGER_TEMPLATES).replacen("{}", phrase, 1)
                };
                gold.label_mut(c).evidence.push(sentence.clone());
                body.push(sentence);
            } else if rng.random_bool(config.decoy_rate) {
                let phrase = pick_phrase(&mut rng, lexicon, c);
                body.push(pick(&mut rng, DECOY_TEMPLATES).replacen("{}", phrase, 1));
            }
        }
        let n_fillers = rng.random_range(1..=3);
        let mut fillers: Vec<&str> = FILLERS.to_vec();
        fillers.shuffle(&mut rng);
        body.extend(fillers.into_iter().take(n_fillers).map(String::from));
        body.shuffle(&mut rng);

        let mut text = String::from(pick(&mut rng, OPENERS));
        for s in &body {
            text.push(' ');
            text.push_str(s);
        }
        posts.push(Post {
            id,
            community: pick(&mut rng, COMMUNITIES).to_string(),
            text,
            created_utc: Some(1_600_000_000 + rng.random_range(0..100_000_000)),
        });
        golds.push(gold);
    }
    Ok(SynthCorpus { posts, golds })
}

/// Two annotator sets whose inclusive merge reproduces `golds` exactly.
///
/// Each gold-present construct is marked by both annotators except with
/// probability `disagreement_rate`, where only one marks it: annotator 2
/// with probability `annotator2_share`, otherwise annotator 1.
pub fn synthesize_annotations(
    golds: &[GoldRecord],
    disagreement_rate: f64,
    annotator2_share: f64,
    seed: u64,
) -> Result<(Vec<AnnotationRecord>, Vec<AnnotationRecord>)> {
    for (name, value) in [
        ("disagreement_rate", disagreement_rate),
        ("annotator2_share", annotator2_share),
    ] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidProbability {
                name: name.to_string(),
                value,
            });
        }
    }
    let mut rng = rng_from_seed(seed);
    let mut set1 = Vec::with_capacity(golds.len());
    let mut set2 = Vec::with_capacity(golds.len());
    for gold in golds {
        let mut labels: [[ConstructLabel; 3]; 2] = Default::default();
        for c in Construct::ALL {
            let g: &GoldLabel = gold.label(c);
            if !g.present {
                continue;
            }
            let (first, second) = if rng.random_bool(disagreement_rate) {
                if rng.random_bool(annotator2_share) {
                    (false, true)
                } else {
                    (true, false)
                }
            } else {
                (true, true)
            };
            let label = ConstructLabel::present(
                format!("Post meets the {} criteria.", c.display_name().to_lowercase()),
                g.evidence.clone(),
            );
            if first {
                labels[0][c.index()] = label.clone();
            }
            if second {
                labels[1][c.index()] = label;
            }
        }
        let [l1, l2] = labels;
        for (set, who, [b, d, m]) in [(&mut set1, "annotator1", l1), (&mut set2, "annotator2", l2)] {
            set.push(AnnotationRecord {
                post_id: gold.post_id.clone(),
                annotator_id: who.to_string(),
                body_image: b,
                disordered_eating: d,
                metabolic: m,
            });
        }
    }
    Ok((set1, set2))
}
