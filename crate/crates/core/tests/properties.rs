use std::collections::BTreeSet;

use proptest::prelude::*;

use triad_core::annotation::{cohen_kappa, merge_sets, AnnotationRecord, ConstructLabel, Contingency2x2};
use triad_core::baseline::{predict, Lexicon};
use triad_core::corpus::{filter_keyword, scrub_text, tokenize, Post};
use triad_core::grounding::{coverage_of_intervals, ground_prediction, MatchKind, MatchParams};
use triad_core::prediction::{emit, extract_quotes, parse, ConstructPrediction, PredictionRecord};
use triad_core::sampling::{allocate, stratified_split, Ratios};
use triad_core::stats::{pearson, spearman};
use triad_core::{Construct, LabelVector};

fn kappa_oracle(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let n = (a + b + c + d) as f64;
    let po = (a + d) as f64 / n;
    let pe = ((a + b) as f64 * (a + c) as f64 + (c + d) as f64 * (b + d) as f64) / (n * n);
    (po - pe) / (1.0 - pe)
}

fn table() -> impl Strategy<Value = (u64, u64, u64, u64)> {
    (0u64..300, 0u64..300, 0u64..300, 0u64..300).prop_filter("non-empty", |t| t.0 + t.1 + t.2 + t.3 > 0)
}

fn label(present: bool) -> ConstructLabel {
    if present {
        ConstructLabel::present("marked", vec!["q".into()])
    } else {
        ConstructLabel::absent()
    }
}

fn annotation(id: &str, annotator: &str, l: LabelVector) -> AnnotationRecord {
    AnnotationRecord {
        post_id: id.into(),
        annotator_id: annotator.into(),
        body_image: label(l.body_image),
        disordered_eating: label(l.disordered_eating),
        metabolic: label(l.metabolic),
    }
}

fn labels() -> impl Strategy<Value = LabelVector> {
    (any::<bool>(), any::<bool>(), any::<bool>()).prop_map(|(a, b, c)| LabelVector::new(a, b, c))
}

fn reasoning() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            "[A-Za-z0-9,.;'()-]{1,8}",
            "\"[a-z]{1,6}( [a-z]{1,6}){0,3}\"",
            Just(String::from("\u{201C}curly quote\u{201D}")),
        ],
        0..6,
    )
    .prop_map(|words| words.join(" "))
}

fn subtype() -> impl Strategy<Value = Option<String>> {
    prop::option::of("[a-z]{2,10}( [a-z]{2,10})?").prop_filter("NONE is reserved", |s| {
        s.as_deref().map_or(true, |s| !s.eq_ignore_ascii_case("none"))
    })
}

fn construct_prediction() -> impl Strategy<Value = ConstructPrediction> {
    (any::<bool>(), subtype(), reasoning()).prop_map(|(decision, subtype, reasoning)| ConstructPrediction {
        decision,
        subtype,
        reasoning,
    })
}

fn prediction_record() -> impl Strategy<Value = PredictionRecord> {
    (
        "[a-z0-9_-]{1,12}",
        construct_prediction(),
        construct_prediction(),
        construct_prediction(),
    )
        .prop_map(|(id, b, d, m)| PredictionRecord::new(id, b, d, m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kappa_matches_float_formula((a, b, c, d) in table()) {
        let n = a + b + c + d;
        let pe_is_one = (a + b) * (a + c) + (c + d) * (b + d) == n * n;
        prop_assume!(!pe_is_one);
        let k = cohen_kappa(Contingency2x2::new(a, b, c, d)).unwrap();
        prop_assert!((k - kappa_oracle(a, b, c, d)).abs() < 1e-12);
        prop_assert!(k <= 1.0);
    }

    #[test]
    fn kappa_symmetries((a, b, c, d) in table()) {
        let k = cohen_kappa(Contingency2x2::new(a, b, c, d));
        prop_assert_eq!(&k, &cohen_kappa(Contingency2x2::new(a, c, b, d)));
        prop_assert_eq!(&k, &cohen_kappa(Contingency2x2::new(d, c, b, a)));
        if let Ok(k) = k {
            prop_assert_eq!(k == 1.0, b == 0 && c == 0);
        }
    }

    #[test]
    fn merged_prevalence_dominates(pairs in prop::collection::vec((labels(), labels()), 1..40)) {
        let set1: Vec<_> = pairs.iter().enumerate().map(|(i, p)| annotation(&format!("p{i}"), "a1", p.0)).collect();
        let set2: Vec<_> = pairs.iter().enumerate().map(|(i, p)| annotation(&format!("p{i}"), "a2", p.1)).collect();
        let gold = merge_sets(&set1, &set2).unwrap();
        for c in Construct::ALL {
            let count = |f: &dyn Fn(usize) -> bool| (0..pairs.len()).filter(|&i| f(i)).count();
            let g = count(&|i| gold[i].label(c).present);
            prop_assert!(g >= count(&|i| pairs[i].0.get(c)));
            prop_assert!(g >= count(&|i| pairs[i].1.get(c)));
            prop_assert_eq!(g, count(&|i| pairs[i].0.get(c) || pairs[i].1.get(c)));
        }
    }

    #[test]
    fn scrub_is_idempotent(text in "([a-z ]|u/|/u/|[A-Za-z0-9_-]{1,25}){0,12}") {
        let once = scrub_text(&text);
        prop_assert_eq!(scrub_text(&once), once);
    }

    #[test]
    fn filter_returns_a_subset(texts in prop::collection::vec("(pcos|PCOS|pco|[a-z ]{1,10}){0,4}", 0..20)) {
        let posts: Vec<_> = texts.iter().enumerate().map(|(i, t)| Post::new(i.to_string(), "c", t.as_str())).collect();
        let kept = filter_keyword(&posts, "PCOS").unwrap();
        let expected: Vec<_> = posts.iter().filter(|p| p.text.to_lowercase().contains("pcos")).cloned().collect();
        prop_assert_eq!(kept, expected);
    }

    #[test]
    fn tokens_rejoin_to_whitespace_split(words in prop::collection::vec("[a-zA-Z0-9.,!]{1,8}", 0..20), seps in prop::collection::vec("[ \t\n]{1,3}", 20)) {
        let mut text = String::from(" ");
        for (w, s) in words.iter().zip(&seps) {
            text.push_str(w);
            text.push_str(s);
        }
        let t = tokenize(&text);
        prop_assert_eq!(t.token_count(), text.split_whitespace().count());
        let chars: Vec<char> = text.chars().collect();
        let pieces: Vec<String> = t.token_spans.iter().map(|&(s, e)| chars[s..e].iter().collect()).collect();
        prop_assert_eq!(pieces, text.split_whitespace().map(String::from).collect::<Vec<_>>());
    }

    #[test]
    fn split_partitions_deterministically(strata in prop::collection::vec(0u8..4, 0..300), seed in any::<u64>()) {
        let items: Vec<(String, u8)> = strata.iter().enumerate().map(|(i, &s)| (format!("id{i:04}"), s)).collect();
        let run = || stratified_split(&items, |r| r.0.as_str(), |r| r.1, &Ratios::DEFAULT, seed).unwrap();
        let split = run();
        prop_assert_eq!(&split, &run());
        let mut ids: Vec<&str> = split.train.iter().chain(&split.validation).chain(&split.test).map(|r| r.0.as_str()).collect();
        ids.sort();
        let mut input: Vec<&str> = items.iter().map(|r| r.0.as_str()).collect();
        input.sort();
        prop_assert_eq!(ids, input);
    }

    #[test]
    fn allocation_stays_near_quota(sizes in prop::array::uniform4(0usize..500)) {
        let table = allocate(&sizes, &Ratios::DEFAULT);
        for (k, row) in table.iter().enumerate() {
            prop_assert_eq!(row.iter().sum::<usize>(), sizes[k]);
            for (j, &cell) in row.iter().enumerate() {
                let quota = Ratios::DEFAULT.0[j] * sizes[k] as f64;
                prop_assert!((cell as f64 - quota).abs() < 2.0, "cell {} vs quota {}", cell, quota);
            }
        }
    }

    #[test]
    fn parse_inverts_emit(record in prediction_record()) {
        prop_assert!(record.validate().is_ok());
        let back = parse(&emit(&record), &record.post_id);
        prop_assert_eq!(back, record);
    }

    #[test]
    fn parse_is_total(bytes in prop::collection::vec(any::<u8>(), 0..400)) {
        let text = String::from_utf8_lossy(&bytes);
        let r = parse(&text, "x");
        prop_assert_eq!(r.quotes, extract_quotes(&text));
    }

    #[test]
    fn coverage_matches_token_set(n in 0usize..60, raw in prop::collection::vec((0usize..60, 0usize..12), 0..8)) {
        let intervals: Vec<(usize, usize)> = raw.iter().filter(|_| n > 0).map(|&(s, l)| (s % n, (s % n + l).min(n))).collect();
        let covered: BTreeSet<usize> = intervals.iter().flat_map(|&(s, e)| s..e).collect();
        let expected = if n == 0 { 0.0 } else { 100.0 * covered.len() as f64 / n as f64 };
        prop_assert_eq!(coverage_of_intervals(&intervals, n).unwrap(), expected);
        for k in 0..intervals.len() {
            prop_assert!(coverage_of_intervals(&intervals[..k], n).unwrap() <= coverage_of_intervals(&intervals[..=k], n).unwrap());
        }
    }

    #[test]
    fn pearson_affine_invariance(xs in prop::collection::vec(0u8..4, 3..60), ys in prop::collection::vec(0u8..4, 60), a in 0.5f64..4.0, b in -10.0f64..10.0) {
        let x: Vec<f64> = xs.iter().map(|&v| v as f64).collect();
        let y: Vec<f64> = ys[..x.len()].iter().map(|&v| v as f64).collect();
        let x2: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        match (pearson(&x, &y), pearson(&x2, &y)) {
            (Some(r1), Some(r2)) => prop_assert!((r1 - r2).abs() < 1e-9),
            (r1, r2) => prop_assert_eq!(r1, r2),
        }
        let cubed: Vec<f64> = x.iter().map(|v| v * v * v + 1.0).collect();
        prop_assert_eq!(spearman(&x, &y), spearman(&cubed, &y));
    }

    #[test]
    fn baseline_grounds_exactly(
        sentences in prop::collection::vec(prop_oneof![
            "[A-Za-z ,']{0,30}",
            Just(String::from("I hate my body")),
            Just(String::from("Another BINGE last night")),
            Just(String::from("metformin makes me sick")),
        ], 0..6),
        ends in prop::collection::vec(prop_oneof![Just(". "), Just("! "), Just("? "), Just(" ")], 6),
    ) {
        let text: String = sentences.iter().zip(&ends).map(|(s, e)| format!("{s}{e}")).collect();
        let post = Post::new("p", "c", text);
        let record = predict(&post, &Lexicon::default());
        let g = ground_prediction(&record, &post, &MatchParams::default()).unwrap();
        prop_assert_eq!(g.n_matched_spans, g.n_quoted_phrases);
        prop_assert!(g.spans.iter().all(|s| s.kind == MatchKind::Exact));
    }
}
