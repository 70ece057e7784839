//! Property tests for the library invariants.

use proptest::prelude::*;

use emprobe_core::analysis::{confusion, f1_score, information_gain, metrics, rank_dimensions};
use emprobe_core::corpus::{dedup, similarity, tokenize, DedupConfig, MethodRecord, Split};
use emprobe_core::features::{encode, RawCounts, Scheme, TOTAL_FEATURES};
use emprobe_core::svm::{kernel_eval, KernelSpec};

fn record(id: &str, code: &str) -> MethodRecord {
    MethodRecord {
        id: id.to_string(),
        declared_name: "f".into(),
        label: "f".into(),
        source: code.to_string(),
        tokens: tokenize(code).unwrap(),
        split: Split::Train,
    }
}

/// Source text assembled from a pool of benign Java tokens, with optional
/// comments and uneven whitespace.
fn source_strategy() -> impl Strategy<Value = String> {
    let token = prop_oneof![
        prop_oneof![
            Just("alpha"),
            Just("beta"),
            Just("x1"),
            Just("count"),
            Just("Builder")
        ]
        .prop_map(str::to_string),
        prop_oneof![Just("0"), Just("42"), Just("1.5"), Just("0x1F")].prop_map(str::to_string),
        prop_oneof![
            Just("if"),
            Just("return"),
            Just("int"),
            Just("new"),
            Just("while")
        ]
        .prop_map(str::to_string),
        prop_oneof![
            Just("+"),
            Just("=="),
            Just("&&"),
            Just("<"),
            Just(">="),
            Just("!")
        ]
        .prop_map(str::to_string),
        prop_oneof![
            Just("("),
            Just(")"),
            Just("{"),
            Just("}"),
            Just(";"),
            Just(",")
        ]
        .prop_map(str::to_string),
        Just("\"str//lit\"".to_string()),
        Just("'c'".to_string()),
    ];
    (
        proptest::collection::vec(
            (token, prop_oneof![Just(" "), Just("\n"), Just("\t ")]),
            0..40,
        ),
        proptest::bool::ANY,
    )
        .prop_map(|(pairs, with_comment)| {
            let mut out = String::new();
            for (i, (tok, ws)) in pairs.iter().enumerate() {
                out.push_str(tok);
                if with_comment && i == pairs.len() / 2 {
                    out.push_str(" /* inner\ncomment */ ");
                }
                out.push_str(ws);
            }
            if with_comment {
                out.push_str("// trailing");
            }
            out
        })
}

proptest! {
    #[test]
    fn tokenize_round_trips_through_space_joined_texts(source in source_strategy()) {
        let first: Vec<String> = tokenize(&source)
            .unwrap()
            .into_iter()
            .map(|t| t.text)
            .collect();
        let rejoined = first.join(" ");
        let second: Vec<String> = tokenize(&rejoined)
            .unwrap()
            .into_iter()
            .map(|t| t.text)
            .collect();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn similarity_is_symmetric_and_bounded(a in source_strategy(), b in source_strategy()) {
        let ra = record("a", &a);
        let rb = record("b", &b);
        let (k1, m1) = similarity(&ra, &rb);
        let (k2, m2) = similarity(&rb, &ra);
        prop_assert_eq!(k1, k2);
        prop_assert_eq!(m1, m2);
        prop_assert!((0.0..=1.0).contains(&k1));
        prop_assert!((0.0..=1.0).contains(&m1));
        // multiset jaccard hits 1 exactly when the token multisets match
        let mut ta: Vec<&str> = ra.tokens.iter().map(|t| t.text.as_str()).collect();
        let mut tb: Vec<&str> = rb.tokens.iter().map(|t| t.text.as_str()).collect();
        ta.sort_unstable();
        tb.sort_unstable();
        prop_assert_eq!(m1 == 1.0, ta == tb);
    }

    #[test]
    fn dedup_is_idempotent_and_keeps_no_duplicates(
        sources in proptest::collection::vec(source_strategy(), 2..12)
    ) {
        let corpus: Vec<MethodRecord> = sources
            .iter()
            .enumerate()
            .map(|(i, s)| record(&format!("m{i:02}"), s))
            .collect();
        let cfg = DedupConfig::default();
        let (once, _) = dedup(&corpus, cfg);
        let (twice, report) = dedup(&once, cfg);
        prop_assert_eq!(once.len(), twice.len());
        prop_assert!(report.removals.is_empty());
        for i in 0..once.len() {
            for j in (i + 1)..once.len() {
                let (k, m) = similarity(&once[i], &once[j]);
                prop_assert!(!(k >= cfg.t0 && m >= cfg.t1), "kept a duplicate pair");
            }
        }
    }

    #[test]
    fn metrics_match_bruteforce_recount(
        outcomes in proptest::collection::vec((proptest::bool::ANY, proptest::bool::ANY), 1..200)
    ) {
        let preds: Vec<f64> = outcomes.iter().map(|(p, _)| if *p { 1.0 } else { -1.0 }).collect();
        let truth: Vec<f64> = outcomes.iter().map(|(_, t)| if *t { 1.0 } else { -1.0 }).collect();
        let m = metrics(&confusion(&preds, &truth).unwrap()).unwrap();

        let tp = outcomes.iter().filter(|(p, t)| *p && *t).count() as f64;
        let tn = outcomes.iter().filter(|(p, t)| !*p && !*t).count() as f64;
        let fp = outcomes.iter().filter(|(p, t)| *p && !*t).count() as f64;
        let fng = outcomes.iter().filter(|(p, t)| !*p && *t).count() as f64;
        let n = outcomes.len() as f64;
        prop_assert_eq!(m.accuracy, (tp + tn) / n);
        let precision = if tp + fp == 0.0 { 0.0 } else { tp / (tp + fp) };
        let recall = if tp + fng == 0.0 { 0.0 } else { tp / (tp + fng) };
        prop_assert_eq!(m.precision, precision);
        prop_assert_eq!(m.recall, recall);
        if precision > 0.0 && recall > 0.0 {
            let harmonic = 2.0 / (1.0 / precision + 1.0 / recall);
            prop_assert!((m.f1 - harmonic).abs() <= 1e-12);
        } else {
            prop_assert_eq!(m.f1, 0.0);
        }
        prop_assert_eq!(m.f1, f1_score(precision, recall));
    }

    #[test]
    fn binary_encoding_is_zero_one_and_monotone(
        counts in proptest::collection::vec(0u32..50, TOTAL_FEATURES),
        bump_at in 0usize..TOTAL_FEATURES,
    ) {
        let raw = RawCounts { counts: counts.clone() };
        let v = encode(&raw, Scheme::HcBinary, None).unwrap();
        prop_assert!(v.values.iter().all(|x| *x == 0.0 || *x == 1.0));

        let mut bumped = counts;
        bumped[bump_at] = bumped[bump_at].saturating_add(1);
        let v2 = encode(&RawCounts { counts: bumped }, Scheme::HcBinary, None).unwrap();
        for (a, b) in v.values.iter().zip(&v2.values) {
            prop_assert!(b >= a, "binary slot decreased when a count grew");
        }
    }

    #[test]
    fn information_gain_is_bounded_and_order_invariant(
        // range chosen so cubing neither overflows nor underflows: the
        // transform must stay strictly increasing on the actual values
        rows in proptest::collection::vec((-100.0f64..100.0, proptest::bool::ANY), 4..64)
    ) {
        let column: Vec<f64> = rows.iter().map(|(v, _)| *v).collect();
        let labels: Vec<f64> = rows.iter().map(|(_, l)| if *l { 1.0 } else { -1.0 }).collect();
        let (ig, _) = information_gain(&column, &labels).unwrap();
        prop_assert!(ig >= 0.0);
        let pos = labels.iter().filter(|y| **y > 0.0).count() as f64;
        let n = labels.len() as f64;
        let h = |p: f64| if p == 0.0 || p == 1.0 { 0.0 } else { -p * p.log2() - (1.0 - p) * (1.0 - p).log2() };
        prop_assert!(ig <= h(pos / n) + 1e-12);
        // strictly increasing transform leaves the gain unchanged
        let cubed: Vec<f64> = column.iter().map(|v| f64::powi(*v, 3)).collect();
        let (ig_cubed, _) = information_gain(&cubed, &labels).unwrap();
        prop_assert!((ig - ig_cubed).abs() <= 1e-9, "{ig} vs {ig_cubed}");
    }

    #[test]
    fn ranking_is_always_a_permutation(
        matrix in proptest::collection::vec(
            proptest::collection::vec(-10.0f64..10.0, 5),
            3..20
        ),
        labels in proptest::collection::vec(proptest::bool::ANY, 3..20),
    ) {
        let n = matrix.len().min(labels.len());
        let matrix = &matrix[..n];
        let labels: Vec<f64> = labels[..n].iter().map(|l| if *l { 1.0 } else { -1.0 }).collect();
        let r = rank_dimensions(matrix, &labels).unwrap();
        let mut order = r.order.clone();
        order.sort_unstable();
        prop_assert_eq!(order, (0..5).collect::<Vec<_>>());
    }

    #[test]
    fn rbf_kernel_in_unit_interval_and_symmetric(
        // moderate distances so exp(-gamma d^2) stays above the f64
        // underflow threshold and positivity is observable
        a in proptest::collection::vec(-10.0f64..10.0, 3),
        b in proptest::collection::vec(-10.0f64..10.0, 3),
        gamma in 0.001f64..0.5,
    ) {
        let spec = KernelSpec::Rbf { gamma };
        let kab = kernel_eval(&a, &b, spec).unwrap();
        let kba = kernel_eval(&b, &a, spec).unwrap();
        prop_assert_eq!(kab, kba);
        prop_assert!(kab > 0.0 && kab <= 1.0);
        let kaa = kernel_eval(&a, &a, spec).unwrap();
        prop_assert_eq!(kaa, 1.0);
    }
}
