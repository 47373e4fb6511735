//! One function per subcommand. Each returns its one-line summary.

use std::collections::BTreeMap;
use std::path::Path;

use triad_core::annotation::{agreement_stats, merge_sets, AgreementReport, AnnotationRecord, GoldRecord};
use triad_core::baseline::predict;
use triad_core::corpus::{filter_keyword, scrub_identifiers, synthesize_annotations, synthesize_corpus, Post, SynthConfig};
use triad_core::grounding::{ground_prediction, grounding_report, GroundingReport};
use triad_core::metrics::{evaluate, EvaluationReport};
use triad_core::prediction::{emit, parse};
use triad_core::rng::sub_seed;
use triad_core::sampling::{random_sample, stratified_split, Split, SplitAssignment};
use triad_core::Construct;

use crate::cli::Command;
use crate::config::RunConfig;
use crate::error::{ensure, CliError, CliResult};
use crate::formats::{load_annotations, load_generations, load_golds, load_parsed, load_posts, GroundingLine, PredictionLine};
use crate::jsonl::{read_json, read_jsonl, write_json, write_jsonl, write_text};
use crate::report::{render, ReportInputs};

pub const FILTERED: &str = "filtered.jsonl";
pub const SAMPLE: &str = "sample.jsonl";
pub const SPLIT: &str = "split.jsonl";
pub const AGREEMENT: &str = "agreement.json";
pub const GOLD: &str = "gold.jsonl";
pub const PARSED: &str = "parsed.jsonl";
pub const GROUNDING: &str = "grounding.jsonl";
pub const GROUNDING_REPORT: &str = "grounding_report.json";
pub const EVALUATION: &str = "evaluation.json";
pub const PREDICTIONS: &str = "predictions.jsonl";
pub const CORPUS: &str = "corpus.jsonl";
pub const ANNOTATOR1: &str = "annotator1.jsonl";
pub const ANNOTATOR2: &str = "annotator2.jsonl";
pub const REPORT: &str = "report.md";

pub fn run(command: &Command, cfg: &RunConfig) -> CliResult<String> {
    match command {
        Command::Filter { corpus, keep_handles } => filter(cfg, corpus, *keep_handles),
        Command::Sample { corpus, n } => sample(cfg, corpus, *n),
        Command::Split { gold, corpus } => split(cfg, gold, corpus.as_deref()),
        Command::Agreement { set1, set2 } => agreement(cfg, set1, set2),
        Command::Merge { set1, set2 } => merge(cfg, set1, set2),
        Command::Parse { predictions } => parse_generations(cfg, predictions),
        Command::Ground { parsed, corpus } => ground(cfg, parsed, corpus),
        Command::Evaluate { corpus, gold, parsed } => evaluation(cfg, corpus, gold, parsed),
        Command::Baseline { corpus } => baseline(cfg, corpus),
        Command::Synth {
            strata,
            marginals,
            miss_rate,
            decoy_rate,
            disagreement_rate,
            annotator2_share,
        } => {
            let mut config = SynthConfig::new(
                to_array(strata, "strata")?,
                to_array(marginals, "marginals")?,
                sub_seed(cfg.seed, "synth"),
            );
            config.miss_rate = *miss_rate;
            config.decoy_rate = *decoy_rate;
            synth(cfg, &config, *disagreement_rate, *annotator2_share)
        }
        Command::Report {
            split,
            gold,
            agreement,
            evaluation,
            grounding,
        } => report(cfg, split.as_deref(), gold.as_deref(), agreement.as_deref(), evaluation.as_deref(), grounding.as_deref()),
    }
}

fn to_array<T: Copy, const N: usize>(values: &[T], what: &str) -> CliResult<[T; N]> {
    values
        .try_into()
        .map_err(|_| CliError::Validation(format!("--{what} takes {N} values, got {}", values.len())))
}

fn filter(cfg: &RunConfig, corpus: &Path, keep_handles: bool) -> CliResult<String> {
    let mut posts = load_posts(corpus)?;
    if !keep_handles {
        posts = posts.iter().map(scrub_identifiers).collect();
    }
    let kept = filter_keyword(&posts, &cfg.keyword)?;
    let out = cfg.out(FILTERED);
    write_jsonl(&out, &kept)?;
    Ok(format!(
        "filter: kept {} of {} posts mentioning {:?} -> {}",
        kept.len(),
        posts.len(),
        cfg.keyword,
        out.display()
    ))
}

fn sample(cfg: &RunConfig, corpus: &Path, n: usize) -> CliResult<String> {
    let posts = load_posts(corpus)?;
    let picked = random_sample(&posts, n, sub_seed(cfg.seed, "sample"))?;
    let out = cfg.out(SAMPLE);
    write_jsonl(&out, &picked)?;
    Ok(format!("sample: {} of {} posts -> {}", picked.len(), posts.len(), out.display()))
}

fn split(cfg: &RunConfig, gold: &Path, corpus: Option<&Path>) -> CliResult<String> {
    let golds = load_golds(gold)?;
    let posts = corpus.map(load_posts).transpose()?;
    if let Some(posts) = &posts {
        let ids: BTreeMap<&str, &Post> = posts.iter().map(|p| (p.id.as_str(), p)).collect();
        let missing: Vec<&str> = golds.iter().map(|g| g.post_id.as_str()).filter(|id| !ids.contains_key(id)).collect();
        if !missing.is_empty() {
            return Err(CliError::Validation(format!("gold records without a post: {}", missing.join(", "))));
        }
    }
    let result = stratified_split(
        &golds,
        |g| g.post_id.as_str(),
        GoldRecord::cooccurrence_count,
        &cfg.ratios,
        sub_seed(cfg.seed, "split"),
    )?;
    for w in &result.warnings {
        log::warn!("{w}");
    }
    let totals = result.totals();
    ensure(totals.iter().sum::<usize>() == golds.len(), || "split lost records".into())?;

    let mut manifest: Vec<SplitAssignment> = result.assignments.clone();
    manifest.sort_by(|a, b| a.post_id.cmp(&b.post_id));
    let out = cfg.out(SPLIT);
    write_jsonl(&out, &manifest)?;

    if let Some(posts) = &posts {
        let by_id: BTreeMap<&str, &Post> = posts.iter().map(|p| (p.id.as_str(), p)).collect();
        for s in Split::ALL {
            let members: Vec<&Post> = manifest
                .iter()
                .filter(|a| a.split == s)
                .map(|a| by_id[a.post_id.as_str()])
                .collect();
            write_jsonl(&cfg.out(&format!("{}.jsonl", s.name())), &members)?;
        }
    }
    Ok(format!(
        "split: train {}, validation {}, test {} -> {}",
        totals[0],
        totals[1],
        totals[2],
        out.display()
    ))
}

fn load_pair(set1: &Path, set2: &Path) -> CliResult<(Vec<AnnotationRecord>, Vec<AnnotationRecord>)> {
    Ok((load_annotations(set1)?, load_annotations(set2)?))
}

fn agreement(cfg: &RunConfig, set1: &Path, set2: &Path) -> CliResult<String> {
    let (a, b) = load_pair(set1, set2)?;
    let report = agreement_stats(&a, &b)?;
    for (c, ca) in &report.constructs {
        ensure(ca.disagreements == report.n_posts - ca.table.a - ca.table.d, || {
            format!("{c}: disagreement count does not match table")
        })?;
    }
    let out = cfg.out(AGREEMENT);
    write_json(&out, &report)?;
    let kappas: Vec<String> = report
        .constructs
        .iter()
        .map(|(c, ca)| format!("{} {:.3}", c.key(), ca.kappa))
        .collect();
    Ok(format!("agreement: {} posts, kappa {} -> {}", report.n_posts, kappas.join(", "), out.display()))
}

fn merge(cfg: &RunConfig, set1: &Path, set2: &Path) -> CliResult<String> {
    let (a, b) = load_pair(set1, set2)?;
    let gold = merge_sets(&a, &b)?;
    let out = cfg.out(GOLD);
    write_jsonl(&out, &gold)?;
    let prevalence: Vec<String> = Construct::ALL
        .iter()
        .map(|&c| format!("{} {}", c.key(), gold.iter().filter(|g| g.label(c).present).count()))
        .collect();
    Ok(format!("merge: {} gold records ({}) -> {}", gold.len(), prevalence.join(", "), out.display()))
}

fn parse_generations(cfg: &RunConfig, predictions: &Path) -> CliResult<String> {
    let lines = load_generations(predictions)?;
    let records: Vec<_> = lines.iter().map(|l| parse(&l.generation, &l.post_id)).collect();
    for r in records.iter().filter(|r| r.is_parse_degraded()) {
        log::info!("{}: {}", r.post_id, r.parse_warnings.join("; "));
    }
    let degraded = records.iter().filter(|r| r.is_parse_degraded()).count();
    let out = cfg.out(PARSED);
    write_jsonl(&out, &records)?;
    Ok(format!("parse: {} generations, {} degraded -> {}", records.len(), degraded, out.display()))
}

fn ground(cfg: &RunConfig, parsed: &Path, corpus: &Path) -> CliResult<String> {
    let records = load_parsed(parsed)?;
    let posts = load_posts(corpus)?;
    let by_id: BTreeMap<&str, &Post> = posts.iter().map(|p| (p.id.as_str(), p)).collect();
    let missing: Vec<&str> = records
        .iter()
        .map(|r| r.post_id.as_str())
        .filter(|id| !by_id.contains_key(id))
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Validation(format!("predictions without a post: {}", missing.join(", "))));
    }
    let params = cfg.match_params();
    let mut results = Vec::with_capacity(records.len());
    for r in &records {
        let g = ground_prediction(r, by_id[r.post_id.as_str()], &params)?;
        for w in &g.warnings {
            log::warn!("{}: {w}", g.post_id);
        }
        results.push(g);
    }
    let lines: Vec<GroundingLine> = results.iter().map(GroundingLine::from).collect();
    let summary = grounding_report(&results);
    let out = cfg.out(GROUNDING);
    write_jsonl(&out, &lines)?;
    write_json(&cfg.out(GROUNDING_REPORT), &summary)?;
    Ok(format!(
        "ground: {} posts, {} of {} quotes matched ({} approximate), mean coverage {:.1}% -> {}",
        summary.n_posts,
        summary.exact_spans + summary.approximate_spans,
        results.iter().map(|r| r.n_quoted_phrases).sum::<usize>(),
        summary.approximate_spans,
        summary.mean_coverage_pct,
        out.display()
    ))
}

fn evaluation(cfg: &RunConfig, corpus: &Path, gold: &Path, parsed: &Path) -> CliResult<String> {
    let posts = load_posts(corpus)?;
    let golds = load_golds(gold)?;
    let records = load_parsed(parsed)?;
    let report = evaluate(&posts, &golds, &records)?;
    let confusion_total: u64 = report.count_confusion.iter().flatten().sum();
    ensure(confusion_total == report.n_posts, || {
        format!("confusion matrix sums to {confusion_total}, expected {}", report.n_posts)
    })?;
    let out = cfg.out(EVALUATION);
    write_json(&out, &report)?;
    Ok(format!(
        "evaluate: {} posts, exact match {:.1}%, pearson {} -> {}",
        report.n_posts,
        report.exact_match_pct,
        report.correlations.pearson.map_or("n/a".into(), |r| format!("{r:.3}")),
        out.display()
    ))
}

fn baseline(cfg: &RunConfig, corpus: &Path) -> CliResult<String> {
    let lexicon = cfg.lexicon()?;
    let mut posts = load_posts(corpus)?;
    posts.sort_by(|a, b| a.id.cmp(&b.id));
    let lines: Vec<PredictionLine> = posts
        .iter()
        .map(|p| PredictionLine {
            post_id: p.id.clone(),
            generation: emit(&predict(p, &lexicon)),
        })
        .collect();
    let out = cfg.out(PREDICTIONS);
    write_jsonl(&out, &lines)?;
    Ok(format!("baseline: {} generations -> {}", lines.len(), out.display()))
}

fn synth(cfg: &RunConfig, config: &SynthConfig, disagreement_rate: f64, annotator2_share: f64) -> CliResult<String> {
    let lexicon = cfg.lexicon()?;
    let corpus = synthesize_corpus(config, &lexicon)?;
    let (set1, set2) = synthesize_annotations(
        &corpus.golds,
        disagreement_rate,
        annotator2_share,
        sub_seed(cfg.seed, "annotate"),
    )?;
    // Written as the merge of the two sets so `sources` is populated.
    let gold = merge_sets(&set1, &set2)?;
    ensure(
        gold.iter().zip(&corpus.golds).all(|(m, g)| m.post_id == g.post_id && m.labels() == g.labels()),
        || "synthetic annotations do not merge back to the generated gold".into(),
    )?;
    write_jsonl(&cfg.out(CORPUS), &corpus.posts)?;
    write_jsonl(&cfg.out(GOLD), &gold)?;
    write_jsonl(&cfg.out(ANNOTATOR1), &set1)?;
    write_jsonl(&cfg.out(ANNOTATOR2), &set2)?;
    Ok(format!(
        "synth: {} posts (strata {:?}) with gold and two annotation sets -> {}",
        corpus.posts.len(),
        config.strata_sizes,
        cfg.output_dir.display()
    ))
}

fn report(
    cfg: &RunConfig,
    split: Option<&Path>,
    gold: Option<&Path>,
    agreement: Option<&Path>,
    evaluation: Option<&Path>,
    grounding: Option<&Path>,
) -> CliResult<String> {
    if [split, gold, agreement, evaluation, grounding].iter().all(Option::is_none) {
        return Err(CliError::Validation(
            "report needs at least one of --split, --gold, --agreement, --evaluation, --grounding".into(),
        ));
    }
    let split: Option<Vec<SplitAssignment>> = split.map(read_jsonl).transpose()?;
    let gold: Option<Vec<GoldRecord>> = gold.map(load_golds).transpose()?;
    let agreement: Option<AgreementReport> = agreement.map(read_json).transpose()?;
    let evaluation: Option<EvaluationReport> = evaluation.map(read_json).transpose()?;
    let grounding: Option<GroundingReport> = grounding.map(read_json).transpose()?;
    let markdown = render(&ReportInputs {
        split: split.as_deref(),
        gold: gold.as_deref(),
        agreement: agreement.as_ref(),
        evaluation: evaluation.as_ref(),
        grounding: grounding.as_ref(),
    });
    let out = cfg.out(REPORT);
    write_text(&out, &markdown)?;
    let sections = markdown.lines().filter(|l| l.starts_with("## ")).count();
    Ok(format!("report: {sections} sections -> {}", out.display()))
}

