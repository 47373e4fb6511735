//! Classification and comorbidity metrics of predictions against gold labels.
//!
//! All functions take aligned slices: index `i` of `golds` and `preds` refers
//! to the same post. [`evaluate`] does the alignment by post id.
//!
//! Zero-denominator policy: precision and recall fall back to 0 with a flag;
//! rates over empty groups and undefined correlations are `None`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::annotation::GoldRecord;
use crate::construct::{Construct, LabelVector, Level};
use crate::corpus::Post;
use crate::error::{Error, Result};
use crate::prediction::PredictionRecord;
use crate::stats;

pub const FLAG_NO_POSITIVE_PREDICTIONS: &str = "no positive predictions";
pub const FLAG_NO_GOLD_POSITIVES: &str = "no gold positives";

fn check_aligned(golds: &[LabelVector], preds: &[LabelVector]) -> Result<()> {
    if golds.len() != preds.len() {
        return Err(Error::LengthMismatch {
            left: golds.len(),
            right: preds.len(),
        });
    }
    if golds.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

fn pct(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

/// Percent of posts whose three labels all equal gold.
pub fn exact_match(golds: &[LabelVector], preds: &[LabelVector]) -> Result<f64> {
    check_aligned(golds, preds)?;
    let hits = golds.iter().zip(preds).filter(|(g, p)| g == p).count() as u64;
    Ok(100.0 * hits as f64 / golds.len() as f64)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstructMetrics {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl ConstructMetrics {
    pub fn from_counts(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        let mut flags = Vec::new();
        let n = tp + fp + fn_ + tn;
        let precision = if tp + fp == 0 {
            flags.push(FLAG_NO_POSITIVE_PREDICTIONS.to_string());
            0.0
        } else {
            tp as f64 / (tp + fp) as f64
        };
        let recall = if tp + fn_ == 0 {
            flags.push(FLAG_NO_GOLD_POSITIVES.to_string());
            0.0
        } else {
            tp as f64 / (tp + fn_) as f64
        };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        ConstructMetrics {
            tp,
            fp,
            fn_,
            tn,
            accuracy: if n == 0 { 0.0 } else { (tp + tn) as f64 / n as f64 },
            precision,
            recall,
            f1,
            flags,
        }
    }
}

pub fn per_label_metrics(
    golds: &[LabelVector],
    preds: &[LabelVector],
) -> Result<BTreeMap<Construct, ConstructMetrics>> {
    check_aligned(golds, preds)?;
    let mut out = BTreeMap::new();
    for c in Construct::ALL {
        let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
        for (g, p) in golds.iter().zip(preds) {
            match (g.get(c), p.get(c)) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fn_ += 1,
                (false, false) => tn += 1,
            }
        }
        out.insert(c, ConstructMetrics::from_counts(tp, fp, fn_, tn));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelAccuracy {
    pub level: Level,
    pub n: u64,
    pub correct: u64,
    pub exact_match_pct: Option<f64>,
}

/// Exact-match accuracy per gold complexity level 0, 1 and 2+.
pub fn stratified_accuracy(golds: &[LabelVector], preds: &[LabelVector]) -> Result<Vec<LevelAccuracy>> {
    check_aligned(golds, preds)?;
    let mut n = [0u64; 3];
    let mut correct = [0u64; 3];
    for (g, p) in golds.iter().zip(preds) {
        let l = g.level().index();
        n[l] += 1;
        correct[l] += (g == p) as u64;
    }
    Ok(Level::ALL
        .iter()
        .map(|&level| LevelAccuracy {
            level,
            n: n[level.index()],
            correct: correct[level.index()],
            exact_match_pct: pct(correct[level.index()], n[level.index()]),
        })
        .collect())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CountCorrelations {
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Correlation between gold and predicted co-occurrence counts (0..=3).
pub fn count_correlations(golds: &[LabelVector], preds: &[LabelVector]) -> Result<CountCorrelations> {
    check_aligned(golds, preds)?;
    let g: Vec<f64> = golds.iter().map(|l| l.count() as f64).collect();
    let p: Vec<f64> = preds.iter().map(|l| l.count() as f64).collect();
    let mut notes = Vec::new();
    if g.len() < 2 {
        notes.push("fewer than two posts; correlations undefined".to_string());
    } else {
        let constant = |xs: &[f64]| xs.iter().all(|&x| x == xs[0]);
        if constant(&g) {
            notes.push("gold counts constant; correlations undefined".to_string());
        }
        if constant(&p) {
            notes.push("predicted counts constant; correlations undefined".to_string());
        }
    }
    Ok(CountCorrelations {
        pearson: stats::pearson(&g, &p),
        spearman: stats::spearman(&g, &p),
        notes,
    })
}

/// `matrix[true_level][predicted_level]`.
pub fn count_confusion(golds: &[LabelVector], preds: &[LabelVector]) -> Result<[[u64; 3]; 3]> {
    check_aligned(golds, preds)?;
    let mut m = [[0u64; 3]; 3];
    for (g, p) in golds.iter().zip(preds) {
        m[g.level().index()][p.level().index()] += 1;
    }
    Ok(m)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorAsymmetry {
    /// Gold-level-0 posts given at least one label.
    pub fp_rate_zero_condition_pct: Option<f64>,
    pub fp_zero_condition: u64,
    pub n_zero_condition: u64,
    /// Gold-level-1+ posts predicted with no labels.
    pub fn_rate_to_zero_pct: Option<f64>,
    pub fn_to_zero: u64,
    pub n_with_condition: u64,
}

pub fn error_asymmetry(golds: &[LabelVector], preds: &[LabelVector]) -> Result<ErrorAsymmetry> {
    check_aligned(golds, preds)?;
    let mut out = ErrorAsymmetry::default();
    for (g, p) in golds.iter().zip(preds) {
        if g.count() == 0 {
            out.n_zero_condition += 1;
            out.fp_zero_condition += (p.count() >= 1) as u64;
        } else {
            out.n_with_condition += 1;
            out.fn_to_zero += (p.count() == 0) as u64;
        }
    }
    out.fp_rate_zero_condition_pct = pct(out.fp_zero_condition, out.n_zero_condition);
    out.fn_rate_to_zero_pct = pct(out.fn_to_zero, out.n_with_condition);
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ComorbidityCapture {
    pub n_comorbid: u64,
    pub captured: u64,
    pub capture_pct: Option<f64>,
}

/// Among posts with 2+ gold constructs, percent predicted with 2+.
pub fn comorbidity_capture(golds: &[LabelVector], preds: &[LabelVector]) -> Result<ComorbidityCapture> {
    check_aligned(golds, preds)?;
    let mut out = ComorbidityCapture::default();
    for (g, p) in golds.iter().zip(preds) {
        if g.count() >= 2 {
            out.n_comorbid += 1;
            out.captured += (p.count() >= 2) as u64;
        }
    }
    out.capture_pct = pct(out.captured, out.n_comorbid);
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Fraction {
    pub correct: u64,
    pub n: u64,
    pub pct: Option<f64>,
}

impl Fraction {
    fn new(correct: u64, n: u64) -> Self {
        Fraction {
            correct,
            n,
            pct: pct(correct, n),
        }
    }
}

/// Detection accuracy of a construct among posts where it is gold-present,
/// split by whether it is the post's only construct or one of several.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContextAccuracy {
    pub single: Fraction,
    pub multiple: Fraction,
}

pub fn construct_context_accuracy(
    golds: &[LabelVector],
    preds: &[LabelVector],
) -> Result<BTreeMap<Construct, ContextAccuracy>> {
    check_aligned(golds, preds)?;
    let mut out = BTreeMap::new();
    for c in Construct::ALL {
        let mut counts = [[0u64; 2]; 2];
        for (g, p) in golds.iter().zip(preds).filter(|(g, _)| g.get(c)) {
            let ctx = (g.count() >= 2) as usize;
            counts[ctx][0] += p.get(c) as u64;
            counts[ctx][1] += 1;
        }
        out.insert(
            c,
            ContextAccuracy {
                single: Fraction::new(counts[0][0], counts[0][1]),
                multiple: Fraction::new(counts[1][0], counts[1][1]),
            },
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCount {
    pub level: Level,
    pub n: u64,
    pub pct: f64,
}

fn distribution(labels: &[LabelVector]) -> Vec<LevelCount> {
    let mut n = [0u64; 3];
    for l in labels {
        n[l.level().index()] += 1;
    }
    let total = labels.len() as u64;
    Level::ALL
        .iter()
        .map(|&level| LevelCount {
            level,
            n: n[level.index()],
            pct: pct(n[level.index()], total).unwrap_or(0.0),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub n_posts: u64,
    pub exact_match_pct: f64,
    pub per_construct: BTreeMap<Construct, ConstructMetrics>,
    pub stratified: Vec<LevelAccuracy>,
    pub true_distribution: Vec<LevelCount>,
    pub predicted_distribution: Vec<LevelCount>,
    /// Rows are gold levels, columns predicted levels.
    pub count_confusion: [[u64; 3]; 3],
    /// Percent of posts whose predicted level equals the gold level.
    pub level_agreement_pct: f64,
    pub correlations: CountCorrelations,
    pub errors: ErrorAsymmetry,
    pub comorbidity: ComorbidityCapture,
    pub construct_context: BTreeMap<Construct, ContextAccuracy>,
    pub parse_degraded_count: u64,
}

impl EvaluationReport {
    pub fn pearson_counts(&self) -> Option<f64> {
        self.correlations.pearson
    }

    pub fn spearman_counts(&self) -> Option<f64> {
        self.correlations.spearman
    }

    pub fn fp_rate_zero_condition_pct(&self) -> Option<f64> {
        self.errors.fp_rate_zero_condition_pct
    }

    pub fn fn_rate_to_zero_pct(&self) -> Option<f64> {
        self.errors.fn_rate_to_zero_pct
    }

    pub fn comorbidity_capture_pct(&self) -> Option<f64> {
        self.comorbidity.capture_pct
    }

    pub fn min_construct_accuracy(&self) -> f64 {
        self.per_construct
            .values()
            .map(|m| m.accuracy)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Metrics over aligned label vectors.
pub fn evaluate_labels(golds: &[LabelVector], preds: &[LabelVector], parse_degraded_count: u64) -> Result<EvaluationReport> {
    let confusion = count_confusion(golds, preds)?;
    let trace: u64 = (0..3).map(|i| confusion[i][i]).sum();
    Ok(EvaluationReport {
        n_posts: golds.len() as u64,
        exact_match_pct: exact_match(golds, preds)?,
        per_construct: per_label_metrics(golds, preds)?,
        stratified: stratified_accuracy(golds, preds)?,
        true_distribution: distribution(golds),
        predicted_distribution: distribution(preds),
        count_confusion: confusion,
        level_agreement_pct: 100.0 * trace as f64 / golds.len() as f64,
        correlations: count_correlations(golds, preds)?,
        errors: error_asymmetry(golds, preds)?,
        comorbidity: comorbidity_capture(golds, preds)?,
        construct_context: construct_context_accuracy(golds, preds)?,
        parse_degraded_count,
    })
}

/// Align predictions with gold records and posts by post id (sorted), then
/// compute every metric. Gold records without a prediction are ignored.
pub fn evaluate(posts: &[Post], golds: &[GoldRecord], predictions: &[PredictionRecord]) -> Result<EvaluationReport> {
    if predictions.is_empty() {
        return Err(Error::EmptyInput);
    }
    let post_ids: BTreeSet<&str> = posts.iter().map(|p| p.id.as_str()).collect();
    let gold_by_id: BTreeMap<&str, &GoldRecord> = golds.iter().map(|g| (g.post_id.as_str(), g)).collect();

    let mut ordered: Vec<&PredictionRecord> = predictions.iter().collect();
    ordered.sort_by(|a, b| a.post_id.cmp(&b.post_id));
    if let Some(w) = ordered.windows(2).find(|w| w[0].post_id == w[1].post_id) {
        return Err(Error::DuplicateId(w[0].post_id.clone()));
    }
    let missing: Vec<String> = ordered
        .iter()
        .filter(|p| !post_ids.contains(p.post_id.as_str()) || !gold_by_id.contains_key(p.post_id.as_str()))
        .map(|p| p.post_id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingRecords(missing));
    }

    let gold_labels: Vec<LabelVector> = ordered.iter().map(|p| gold_by_id[p.post_id.as_str()].labels()).collect();
    let pred_labels: Vec<LabelVector> = ordered.iter().map(|p| p.labels()).collect();
    let degraded = ordered.iter().filter(|p| p.is_parse_degraded()).count() as u64;
    evaluate_labels(&gold_labels, &pred_labels, degraded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn lv(b: bool, d: bool, m: bool) -> LabelVector {
        LabelVector::new(b, d, m)
    }

    #[test]
    fn exact_match_examples() {
        let g = vec![lv(true, false, false), lv(false, false, false), lv(true, true, false), lv(false, false, true)];
        assert_eq!(exact_match(&g, &g).unwrap(), 100.0);
        let mut p = g.clone();
        p[2].metabolic = true;
        assert_eq!(exact_match(&g, &p).unwrap(), 75.0);
        let flipped: Vec<_> = g.iter().map(|l| lv(!l.body_image, !l.disordered_eating, !l.metabolic)).collect();
        assert_eq!(exact_match(&g, &flipped).unwrap(), 0.0);
        assert_eq!(exact_match(&[], &[]), Err(Error::EmptyInput));
        assert!(matches!(exact_match(&g, &p[..2]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn per_label_hand_tabulated() {
        let g = vec![lv(true, false, false), lv(true, false, false), lv(false, false, false), lv(false, false, false)];
        let p = vec![lv(true, false, false), lv(false, false, false), lv(true, false, false), lv(false, false, false)];
        let m = per_label_metrics(&g, &p).unwrap();
        let b = &m[&Construct::BodyImage];
        assert_eq!((b.tp, b.fn_, b.fp, b.tn), (1, 1, 1, 1));
        assert_eq!((b.precision, b.recall, b.f1, b.accuracy), (0.5, 0.5, 0.5, 0.5));
        let d = &m[&Construct::DisorderedEating];
        assert_eq!(d.precision, 0.0);
        assert!(d.flags.iter().any(|f| f == FLAG_NO_POSITIVE_PREDICTIONS));
    }

    #[test]
    fn no_positive_predictions_flagged() {
        let g = vec![lv(true, false, false), lv(false, false, false)];
        let p = vec![lv(false, false, false); 2];
        let m = per_label_metrics(&g, &p).unwrap();
        let b = &m[&Construct::BodyImage];
        assert_eq!(b.precision, 0.0);
        assert_eq!(b.flags, vec![FLAG_NO_POSITIVE_PREDICTIONS.to_string()]);
        assert_eq!(b.f1, 0.0);
    }

    #[test]
    fn stratified_by_hand() {
        // 4 level-0, 4 level-1, 2 level-2+; flips on one level-0 and two level-1 posts
        let mut g = vec![lv(false, false, false); 4];
        g.extend([lv(true, false, false), lv(false, true, false), lv(false, false, true), lv(true, false, false)]);
        g.extend([lv(true, true, false), lv(true, true, true)]);
        let mut p = g.clone();
        p[0].metabolic = true;
        p[4].body_image = false;
        p[6].disordered_eating = true;
        let s = stratified_accuracy(&g, &p).unwrap();
        assert_eq!((s[0].n, s[0].correct), (4, 3));
        assert_eq!(s[0].exact_match_pct, Some(75.0));
        assert_eq!((s[1].n, s[1].correct), (4, 2));
        assert_eq!(s[1].exact_match_pct, Some(50.0));
        assert_eq!(s[2].exact_match_pct, Some(100.0));

        let zeros = vec![lv(false, false, false); 3];
        let s = stratified_accuracy(&zeros, &zeros).unwrap();
        assert_eq!(s[0].exact_match_pct, Some(100.0));
        assert_eq!(s[1].exact_match_pct, None);
        assert_eq!(s[2].exact_match_pct, None);
    }

    fn with_count(c: u8) -> LabelVector {
        lv(c >= 1, c >= 2, c >= 3)
    }

    #[test]
    fn correlations() {
        let g: Vec<_> = [0, 1, 2, 3].map(with_count).to_vec();
        let p: Vec<_> = [0, 1, 2, 2].map(with_count).to_vec();
        let c = count_correlations(&g, &p).unwrap();
        assert!((c.pearson.unwrap() - 0.875 / libm::sqrt(1.25 * 0.6875)).abs() < 1e-12);
        let same = count_correlations(&g, &g).unwrap();
        assert_eq!(same.pearson, Some(1.0));
        assert_eq!(same.spearman, Some(1.0));
        let flat = vec![with_count(1); 4];
        let c = count_correlations(&g, &flat).unwrap();
        assert_eq!(c.pearson, None);
        assert_eq!(c.notes.len(), 1);
    }

    #[test]
    fn confusion_placement() {
        let g = vec![with_count(0), with_count(1), with_count(3)];
        assert_eq!(count_confusion(&g, &g).unwrap(), [[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        let p = vec![with_count(1), with_count(1), with_count(2)];
        let m = count_confusion(&g, &p).unwrap();
        assert_eq!(m[0][1], 1);
        assert_eq!(m[2][2], 1);
    }

    #[test]
    fn error_rates() {
        let g = vec![with_count(0); 59];
        let mut p = g.clone();
        for l in p.iter_mut().take(13) {
            *l = with_count(1);
        }
        let e = error_asymmetry(&g, &p).unwrap();
        assert_eq!((e.fp_zero_condition, e.n_zero_condition), (13, 59));
        assert!((e.fp_rate_zero_condition_pct.unwrap() - 22.0).abs() < 0.05);
        assert_eq!(e.fn_rate_to_zero_pct, None);

        let g = vec![with_count(1); 5];
        let p = vec![with_count(0); 5];
        assert_eq!(error_asymmetry(&g, &p).unwrap().fn_rate_to_zero_pct, Some(100.0));
        assert_eq!(error_asymmetry(&g, &g).unwrap().fn_rate_to_zero_pct, Some(0.0));
    }

    #[test]
    fn comorbidity() {
        let g = vec![with_count(2); 24];
        let mut p = g.clone();
        for l in p.iter_mut().take(6) {
            *l = with_count(1);
        }
        assert_eq!(comorbidity_capture(&g, &p).unwrap().capture_pct, Some(75.0));
        let single = vec![with_count(1); 3];
        assert_eq!(comorbidity_capture(&single, &single).unwrap().capture_pct, None);
        assert_eq!(comorbidity_capture(&g, &vec![with_count(1); 24]).unwrap().capture_pct, Some(0.0));
    }

    #[test]
    fn context_accuracy() {
        let g = vec![lv(true, false, false), lv(true, true, false), lv(true, false, true)];
        let p = vec![lv(true, false, false), lv(false, true, false), lv(true, false, false)];
        let ctx = construct_context_accuracy(&g, &p).unwrap();
        let b = &ctx[&Construct::BodyImage];
        assert_eq!((b.single.correct, b.single.n), (1, 1));
        assert_eq!((b.multiple.correct, b.multiple.n), (1, 2));
        let m = &ctx[&Construct::Metabolic];
        assert_eq!((m.multiple.correct, m.multiple.n), (0, 1));
        assert_eq!(m.single.pct, None);
    }

    #[test]
    fn evaluate_alignment() {
        let posts = vec![Post::new("a", "c", "t"), Post::new("b", "c", "t")];
        let golds = vec![
            GoldRecord::from_labels("a", with_count(1)),
            GoldRecord::from_labels("b", with_count(0)),
        ];
        let pred = |id: &str| crate::prediction::parse("BODY_IMAGE_DISTRESS: YES\nDISORDERED_EATING: NO\nMETABOLIC_CHALLENGES: NO", id);
        let r = evaluate(&posts, &golds, &[pred("b"), pred("a")]).unwrap();
        assert_eq!(r.n_posts, 2);
        assert_eq!(r.exact_match_pct, 50.0);
        assert_eq!(r.parse_degraded_count, 0);

        assert_eq!(evaluate(&posts, &golds, &[]), Err(Error::EmptyInput));
        assert_eq!(
            evaluate(&posts, &golds, &[pred("a"), pred("zz")]),
            Err(Error::MissingRecords(vec!["zz".into()]))
        );
        assert_eq!(
            evaluate(&posts, &golds, &[pred("a"), pred("a")]),
            Err(Error::DuplicateId("a".into()))
        );
    }

    #[test]
    fn perfect_predictions() {
        let g: Vec<_> = [0, 1, 2, 3, 1, 0].map(with_count).to_vec();
        let r = evaluate_labels(&g, &g, 0).unwrap();
        assert_eq!(r.exact_match_pct, 100.0);
        assert_eq!(r.level_agreement_pct, 100.0);
        assert_eq!(r.pearson_counts(), Some(1.0));
        assert_eq!(r.fp_rate_zero_condition_pct(), Some(0.0));
        assert_eq!(r.fn_rate_to_zero_pct(), Some(0.0));
        assert_eq!(r.comorbidity_capture_pct(), Some(100.0));
        for m in r.per_construct.values() {
            assert_eq!((m.accuracy, m.precision, m.recall, m.f1), (1.0, 1.0, 1.0, 1.0));
        }
    }
}
