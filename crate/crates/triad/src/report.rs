//! Markdown rendering of split, agreement, evaluation and grounding results.
//!
//! Percentages carry one decimal and coefficients three. Sections whose
//! inputs were not supplied are omitted.

use std::collections::BTreeMap;
use std::fmt::Write;

use triad_core::annotation::{AgreementReport, ConstructAgreement, GoldRecord};
use triad_core::grounding::GroundingReport;
use triad_core::metrics::{EvaluationReport, Fraction};
use triad_core::sampling::{Split, SplitAssignment};
use triad_core::{Construct, Level};

#[derive(Debug, Default, Clone, Copy)]
pub struct ReportInputs<'a> {
    pub split: Option<&'a [SplitAssignment]>,
    pub gold: Option<&'a [GoldRecord]>,
    pub agreement: Option<&'a AgreementReport>,
    pub evaluation: Option<&'a EvaluationReport>,
    pub grounding: Option<&'a GroundingReport>,
}

fn pct(x: f64) -> String {
    format!("{x:.1}%")
}

fn opt_pct(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), pct)
}

fn coef(x: f64) -> String {
    format!("{x:.3}")
}

fn opt_coef(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), coef)
}

fn count_pct(k: usize, n: usize) -> String {
    if n == 0 {
        format!("{k} (n/a)")
    } else {
        format!("{k} ({})", pct(100.0 * k as f64 / n as f64))
    }
}

fn fraction(f: &Fraction) -> String {
    format!("{}/{} ({})", f.correct, f.n, opt_pct(f.pct))
}

fn row(out: &mut String, cells: &[String]) {
    let _ = writeln!(out, "| {} |", cells.join(" | "));
}

fn header(out: &mut String, cells: &[&str]) {
    row(out, &cells.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    row(out, &vec!["---".to_string(); cells.len()]);
}

fn split_columns(first: &str, counts: &[usize; 3]) -> Vec<String> {
    let n: usize = counts.iter().sum();
    let mut cols = vec![first.to_string()];
    for s in Split::ALL {
        let mut name = s.name().to_string();
        name[..1].make_ascii_uppercase();
        cols.push(format!("{name} (n={})", counts[s.index()]));
    }
    cols.push(format!("Overall (N={n})"));
    cols
}

fn distribution_table(out: &mut String, split: &[SplitAssignment]) {
    let mut cells = [[0usize; 3]; 4];
    let mut totals = [0usize; 3];
    for a in split {
        cells[a.stratum as usize][a.split.index()] += 1;
        totals[a.split.index()] += 1;
    }
    let n: usize = totals.iter().sum();
    out.push_str("## Distribution of co-occurring conditions\n\n");
    let cols = split_columns("Co-occurring conditions", &totals);
    header(out, &cols.iter().map(String::as_str).collect::<Vec<_>>());
    for (k, counts) in cells.iter().enumerate() {
        let label = if k == 1 { "1 condition".to_string() } else { format!("{k} conditions") };
        let mut r = vec![label];
        r.extend(Split::ALL.iter().map(|s| count_pct(counts[s.index()], totals[s.index()])));
        r.push(count_pct(counts.iter().sum(), n));
        row(out, &r);
    }
    out.push('\n');
}

fn construct_split_table(out: &mut String, split: &[SplitAssignment], gold: &[GoldRecord]) {
    let by_id: BTreeMap<&str, &GoldRecord> = gold.iter().map(|g| (g.post_id.as_str(), g)).collect();
    let mut totals = [0usize; 3];
    let mut present = [[0usize; 3]; 3];
    let mut unmatched = 0;
    for a in split {
        let Some(g) = by_id.get(a.post_id.as_str()) else {
            unmatched += 1;
            continue;
        };
        totals[a.split.index()] += 1;
        for c in Construct::ALL {
            present[c.index()][a.split.index()] += g.label(c).present as usize;
        }
    }
    let n: usize = totals.iter().sum();
    out.push_str("## Distribution of annotated constructs across splits\n\n");
    let cols = split_columns("Construct", &totals);
    header(out, &cols.iter().map(String::as_str).collect::<Vec<_>>());
    for c in Construct::ALL {
        row(out, &[c.display_name().to_string(), String::new(), String::new(), String::new(), String::new()]);
        for (label, yes) in [("*Present*", true), ("*Absent*", false)] {
            let mut r = vec![label.to_string()];
            let count = |j: usize| if yes { present[c.index()][j] } else { totals[j] - present[c.index()][j] };
            r.extend(Split::ALL.iter().map(|s| count_pct(count(s.index()), totals[s.index()])));
            r.push(count_pct((0..3).map(count).sum(), n));
            row(out, &r);
        }
    }
    if unmatched > 0 {
        let _ = writeln!(out, "\n{unmatched} manifest entries had no gold record and were skipped.");
    }
    out.push('\n');
}

fn agreement_row(name: &str, a: &ConstructAgreement) -> Vec<String> {
    let t = a.table;
    vec![
        name.to_string(),
        format!("{} / {} / {} / {}", t.a, t.b, t.c, t.d),
        pct(a.raw_agreement_pct),
        coef(a.kappa),
        a.annotator1_only.to_string(),
        a.annotator2_only.to_string(),
    ]
}

fn agreement_table(out: &mut String, r: &AgreementReport) {
    out.push_str("## Inter-annotator agreement\n\n");
    let _ = writeln!(
        out,
        "{} posts; annotator 1 = `{}`, annotator 2 = `{}`.\n",
        r.n_posts, r.annotator1, r.annotator2
    );
    header(
        out,
        &["Construct", "a / b / c / d", "Raw agreement", "Cohen's κ", "Annotator 1 only", "Annotator 2 only"],
    );
    for (c, a) in &r.constructs {
        row(out, &agreement_row(c.display_name(), a));
    }
    row(out, &agreement_row("Any construct", &r.any_construct));
    let _ = writeln!(
        out,
        "\nDisagreements: {} ({} annotator 2 only, {} annotator 1 only).\n",
        r.total_disagreements, r.total_annotator2_only, r.total_annotator1_only
    );
}

fn level_name(level: Level) -> &'static str {
    match level {
        Level::Zero => "0 conditions",
        Level::One => "1 condition",
        Level::Multiple => "2+ conditions",
    }
}

fn evaluation_tables(out: &mut String, e: &EvaluationReport) {
    out.push_str("## Co-occurring condition distribution: ground truth vs predictions\n\n");
    header(out, &["Distribution", "Ground truth", "Predicted"]);
    for (t, p) in e.true_distribution.iter().zip(&e.predicted_distribution) {
        row(out, &[level_name(t.level).to_string(), pct(t.pct), pct(p.pct)]);
    }
    out.push('\n');

    out.push_str("## Exact-match accuracy by number of co-occurring conditions\n\n");
    header(out, &["Diagnosis level", "Exact match"]);
    for s in &e.stratified {
        let name = match s.level {
            Level::Zero => "No diagnosis",
            Level::One => "Single diagnosis",
            Level::Multiple => "Multiple diagnoses",
        };
        row(out, &[format!("{name} (n={})", s.n), opt_pct(s.exact_match_pct)]);
    }
    row(out, &[format!("Overall (n={})", e.n_posts), pct(e.exact_match_pct)]);
    out.push('\n');

    out.push_str("## Construct-level detection accuracy\n\n");
    header(out, &["Construct", "Context", "Correct"]);
    for (c, ctx) in &e.construct_context {
        row(out, &[c.display_name().to_string(), "Single".to_string(), fraction(&ctx.single)]);
        row(out, &[String::new(), "Multiple".to_string(), fraction(&ctx.multiple)]);
    }
    out.push('\n');

    out.push_str("## Precision, recall and F1\n\n");
    header(out, &["Label", "Metric", "Value"]);
    for (c, m) in &e.per_construct {
        let flagged = if m.flags.is_empty() { String::new() } else { format!(" ({})", m.flags.join("; ")) };
        row(out, &[c.display_name().to_string(), "*Precision*".to_string(), coef(m.precision)]);
        row(out, &[String::new(), "*Recall*".to_string(), coef(m.recall)]);
        row(out, &[String::new(), "*F1*".to_string(), format!("{}{flagged}", coef(m.f1))]);
        row(out, &[String::new(), "*Accuracy*".to_string(), pct(100.0 * m.accuracy)]);
    }
    out.push('\n');

    out.push_str("## Correlation between predicted and actual number of conditions\n\n");
    header(out, &["Metric", "Value"]);
    row(out, &["Pearson r".to_string(), opt_coef(e.correlations.pearson)]);
    row(out, &["Spearman ρ".to_string(), opt_coef(e.correlations.spearman)]);
    for note in &e.correlations.notes {
        let _ = writeln!(out, "\nNote: {note}.");
    }
    out.push('\n');

    out.push_str("## Confusion matrix of co-occurrence levels\n\n");
    header(out, &["True \\ Predicted", "0", "1", "2+", "Total"]);
    for level in Level::ALL {
        let r = e.count_confusion[level.index()];
        let mut cells = vec![level.label().to_string()];
        cells.extend(r.iter().map(u64::to_string));
        cells.push(r.iter().sum::<u64>().to_string());
        row(out, &cells);
    }
    let _ = writeln!(out, "\nLevel agreement: {}.", pct(e.level_agreement_pct));
    let er = &e.errors;
    let _ = writeln!(
        out,
        "Labels assigned to posts with no condition: {} of {} ({}).",
        er.fp_zero_condition,
        er.n_zero_condition,
        opt_pct(er.fp_rate_zero_condition_pct)
    );
    let _ = writeln!(
        out,
        "Posts with a condition predicted as none: {} of {} ({}).",
        er.fn_to_zero,
        er.n_with_condition,
        opt_pct(er.fn_rate_to_zero_pct)
    );
    let cc = &e.comorbidity;
    let _ = writeln!(
        out,
        "Comorbidity capture (2+ conditions predicted as 2+): {} of {} ({}).",
        cc.captured,
        cc.n_comorbid,
        opt_pct(cc.capture_pct)
    );
    let _ = writeln!(out, "Parse-degraded predictions: {}.\n", e.parse_degraded_count);
}

fn grounding_table(out: &mut String, g: &GroundingReport) {
    out.push_str("## Evidence grounding: text span matching\n\n");
    header(out, &["Metric", "Value"]);
    row(out, &["Total posts".to_string(), g.n_posts.to_string()]);
    row(out, &["Posts with matched spans, n (%)".to_string(), format!("{} ({})", g.posts_with_any_match, pct(g.posts_with_any_match_pct))]);
    row(out, &["Avg. quoted phrases per post".to_string(), format!("{:.2}", g.mean_quoted_phrases)]);
    row(out, &["Avg. spans matched to body per post".to_string(), format!("{:.2}", g.mean_matched_spans)]);
    row(out, &["Avg. span length (words)".to_string(), format!("{:.1}", g.mean_avg_span_tokens)]);
    row(out, &["Avg. body text coverage".to_string(), pct(g.mean_coverage_pct)]);
    row(out, &["Exact / approximate spans".to_string(), format!("{} / {}", g.exact_spans, g.approximate_spans)]);
    row(out, &["Pearson r, quoted vs matched".to_string(), opt_coef(g.pearson_quotes_vs_matches)]);
    out.push('\n');
}

pub fn render(inputs: &ReportInputs) -> String {
    let mut out = String::from("# Triple-burden evaluation report\n\n");
    if let Some(split) = inputs.split {
        distribution_table(&mut out, split);
        if let Some(gold) = inputs.gold {
            construct_split_table(&mut out, split, gold);
        }
    }
    if let Some(a) = inputs.agreement {
        agreement_table(&mut out, a);
    }
    if let Some(e) = inputs.evaluation {
        evaluation_tables(&mut out, e);
    }
    if let Some(g) = inputs.grounding {
        grounding_table(&mut out, g);
    }
    out
}
