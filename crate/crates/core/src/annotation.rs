//! Dual-annotator labels, agreement statistics and inclusive gold merging.
//!
//! Annotator 1 is the reference for directional counts: `b` in a
//! [`Contingency2x2`] counts posts only annotator 1 marked present and `c`
//! counts posts only annotator 2 marked present.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::construct::{Construct, LabelVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructLabel {
    pub present: bool,
    #[serde(default)]
    pub justification: String,
    #[serde(default)]
    pub evidence: Vec<String>,
}

impl ConstructLabel {
    pub fn absent() -> Self {
        ConstructLabel::default()
    }

    pub fn present(justification: impl Into<String>, evidence: Vec<String>) -> Self {
        ConstructLabel {
            present: true,
            justification: justification.into(),
            evidence,
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        if self.present && self.justification.trim().is_empty() {
            return Err(Error::InvalidRecord(alloc::format!(
                "{what}: present without justification"
            )));
        }
        if self.evidence.iter().any(|e| e.is_empty()) {
            return Err(Error::InvalidRecord(alloc::format!("{what}: empty evidence quote")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub post_id: String,
    pub annotator_id: String,
    pub body_image: ConstructLabel,
    pub disordered_eating: ConstructLabel,
    pub metabolic: ConstructLabel,
}

impl AnnotationRecord {
    pub fn label(&self, construct: Construct) -> &ConstructLabel {
        match construct {
            Construct::BodyImage => &self.body_image,
            Construct::DisorderedEating => &self.disordered_eating,
            Construct::Metabolic => &self.metabolic,
        }
    }

    pub fn labels(&self) -> LabelVector {
        LabelVector::from_fn(|c| self.label(c).present)
    }

    pub fn validate(&self) -> Result<()> {
        if self.post_id.is_empty() {
            return Err(Error::InvalidRecord("empty post_id".into()));
        }
        for c in Construct::ALL {
            self.label(c)
                .validate(&alloc::format!("{}/{}", self.post_id, c.key()))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldLabel {
    pub present: bool,
    #[serde(default)]
    pub evidence: Vec<String>,
    /// Annotators that marked the construct present, sorted.
    #[serde(default)]
    pub sources: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldRecord {
    pub post_id: String,
    pub body_image: GoldLabel,
    pub disordered_eating: GoldLabel,
    pub metabolic: GoldLabel,
}

impl GoldRecord {
    pub fn from_labels(post_id: impl Into<String>, labels: LabelVector) -> Self {
        let gold = |present| GoldLabel {
            present,
            ..GoldLabel::default()
        };
        GoldRecord {
            post_id: post_id.into(),
            body_image: gold(labels.body_image),
            disordered_eating: gold(labels.disordered_eating),
            metabolic: gold(labels.metabolic),
        }
    }

    pub fn label(&self, construct: Construct) -> &GoldLabel {
        match construct {
            Construct::BodyImage => &self.body_image,
            Construct::DisorderedEating => &self.disordered_eating,
            Construct::Metabolic => &self.metabolic,
        }
    }

    pub fn label_mut(&mut self, construct: Construct) -> &mut GoldLabel {
        match construct {
            Construct::BodyImage => &mut self.body_image,
            Construct::DisorderedEating => &mut self.disordered_eating,
            Construct::Metabolic => &mut self.metabolic,
        }
    }

    pub fn labels(&self) -> LabelVector {
        LabelVector::from_fn(|c| self.label(c).present)
    }

    /// Number of constructs present.
    pub fn cooccurrence_count(&self) -> u8 {
        self.labels().count()
    }
}

/// Gold label is present when either annotator marked it present.
pub fn merge_inclusive(r1: &AnnotationRecord, r2: &AnnotationRecord) -> Result<GoldRecord> {
    if r1.post_id != r2.post_id {
        return Err(Error::PostIdMismatch {
            expected: r1.post_id.clone(),
            found: r2.post_id.clone(),
        });
    }
    if r1.annotator_id == r2.annotator_id {
        return Err(Error::SameAnnotator(r1.annotator_id.clone()));
    }
    let merge = |c: Construct| {
        let (l1, l2) = (r1.label(c), r2.label(c));
        let mut evidence: Vec<String> = Vec::new();
        for quote in l1.evidence.iter().chain(&l2.evidence) {
            if !evidence.contains(quote) {
                evidence.push(quote.clone());
            }
        }
        let mut sources = Vec::new();
        for (label, who) in [(l1, &r1.annotator_id), (l2, &r2.annotator_id)] {
            if label.present {
                sources.push(who.clone());
            }
        }
        sources.sort();
        GoldLabel {
            present: l1.present || l2.present,
            evidence,
            sources,
        }
    };
    Ok(GoldRecord {
        post_id: r1.post_id.clone(),
        body_image: merge(Construct::BodyImage),
        disordered_eating: merge(Construct::DisorderedEating),
        metabolic: merge(Construct::Metabolic),
    })
}

/// 2x2 agreement table between two annotators.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contingency2x2 {
    /// Both marked present.
    pub a: u64,
    /// Only annotator 1 marked present.
    pub b: u64,
    /// Only annotator 2 marked present.
    pub c: u64,
    /// Both marked absent.
    pub d: u64,
}

impl Contingency2x2 {
    pub fn new(a: u64, b: u64, c: u64, d: u64) -> Self {
        Contingency2x2 { a, b, c, d }
    }

    pub fn n(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }

    pub fn add(&mut self, first: bool, second: bool) {
        match (first, second) {
            (true, true) => self.a += 1,
            (true, false) => self.b += 1,
            (false, true) => self.c += 1,
            (false, false) => self.d += 1,
        }
    }

    pub fn observed_agreement(&self) -> f64 {
        (self.a + self.d) as f64 / self.n() as f64
    }

    pub fn raw_agreement_pct(&self) -> f64 {
        100.0 * self.observed_agreement()
    }
}

/// Cohen's kappa, `(p_o - p_e) / (1 - p_e)`.
///
/// Evaluated as `(n(a+d) - S) / (n^2 - S)` with
/// `S = (a+b)(a+c) + (c+d)(b+d)` so that `p_e == 1` is detected exactly.
/// The table with both annotators constant and identical yields 1.0.
pub fn cohen_kappa(t: Contingency2x2) -> Result<f64> {
    let n = t.n() as u128;
    if n == 0 {
        return Err(Error::EmptyTable);
    }
    let (a, b, c, d) = (t.a as u128, t.b as u128, t.c as u128, t.d as u128);
    let chance = (a + b) * (a + c) + (c + d) * (b + d);
    let observed = n * (a + d);
    let total = n * n;
    if chance == total {
        return if observed == total {
            Ok(1.0)
        } else {
            Err(Error::DegenerateMarginals)
        };
    }
    Ok((observed as f64 - chance as f64) / (total as f64 - chance as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructAgreement {
    pub table: Contingency2x2,
    pub raw_agreement_pct: f64,
    pub kappa: f64,
    pub disagreements: u64,
    /// `c`: marked present by annotator 2 only.
    pub annotator2_only: u64,
    /// `b`: marked present by annotator 1 only.
    pub annotator1_only: u64,
    pub prevalence_annotator1_pct: f64,
    pub prevalence_annotator2_pct: f64,
}

impl ConstructAgreement {
    pub fn from_table(table: Contingency2x2) -> Result<Self> {
        let n = table.n() as f64;
        Ok(ConstructAgreement {
            table,
            raw_agreement_pct: table.raw_agreement_pct(),
            kappa: cohen_kappa(table)?,
            disagreements: table.b + table.c,
            annotator2_only: table.c,
            annotator1_only: table.b,
            prevalence_annotator1_pct: 100.0 * (table.a + table.b) as f64 / n,
            prevalence_annotator2_pct: 100.0 * (table.a + table.c) as f64 / n,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub n_posts: u64,
    pub annotator1: String,
    pub annotator2: String,
    pub constructs: BTreeMap<Construct, ConstructAgreement>,
    /// Binary "any construct present" agreement.
    pub any_construct: ConstructAgreement,
    /// Sums over constructs.
    pub total_disagreements: u64,
    pub total_annotator2_only: u64,
    pub total_annotator1_only: u64,
}

/// Per-construct and composite agreement between two aligned annotation sets.
pub fn agreement_stats(set1: &[AnnotationRecord], set2: &[AnnotationRecord]) -> Result<AgreementReport> {
    if set1.is_empty() && set2.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut offenders = Vec::new();
    for i in 0..set1.len().max(set2.len()) {
        match (set1.get(i), set2.get(i)) {
            (Some(r1), Some(r2)) if r1.post_id == r2.post_id => {}
            (r1, r2) => {
                for r in [r1, r2].into_iter().flatten() {
                    if !offenders.contains(&r.post_id) {
                        offenders.push(r.post_id.clone());
                    }
                }
            }
        }
    }
    if !offenders.is_empty() {
        return Err(Error::Unaligned(offenders));
    }

    let mut tables = [Contingency2x2::default(); 3];
    let mut any = Contingency2x2::default();
    for (r1, r2) in set1.iter().zip(set2) {
        let (l1, l2) = (r1.labels(), r2.labels());
        for c in Construct::ALL {
            tables[c.index()].add(l1.get(c), l2.get(c));
        }
        any.add(l1.count() > 0, l2.count() > 0);
    }

    let mut constructs = BTreeMap::new();
    for c in Construct::ALL {
        constructs.insert(c, ConstructAgreement::from_table(tables[c.index()])?);
    }
    let sum = |f: fn(&ConstructAgreement) -> u64| constructs.values().map(f).sum::<u64>();
    Ok(AgreementReport {
        n_posts: set1.len() as u64,
        annotator1: set1.first().map(|r| r.annotator_id.clone()).unwrap_or_default(),
        annotator2: set2.first().map(|r| r.annotator_id.clone()).unwrap_or_default(),
        total_disagreements: sum(|a| a.disagreements),
        total_annotator2_only: sum(|a| a.annotator2_only),
        total_annotator1_only: sum(|a| a.annotator1_only),
        any_construct: ConstructAgreement::from_table(any)?,
        constructs,
    })
}

/// Merge two aligned annotation sets into gold records.
pub fn merge_sets(set1: &[AnnotationRecord], set2: &[AnnotationRecord]) -> Result<Vec<GoldRecord>> {
    if set1.len() != set2.len() {
        let longer = if set1.len() > set2.len() { set1 } else { set2 };
        let shorter = set1.len().min(set2.len());
        return Err(Error::Unaligned(
            longer[shorter..].iter().map(|r| r.post_id.to_string()).collect(),
        ));
    }
    set1.iter().zip(set2).map(|(a, b)| merge_inclusive(a, b)).collect()
}
