//! Deterministic synthetic corpora for tests, benchmarks, and the bundled
//! sample data: a two-class corpus with discriminative tokens planted per
//! class, a clone-pair corpus for deduplication checks, and label-correlated
//! embedding vectors.

use super::{MethodRecord, RawMethod, Split};
use crate::rng::SplitMix64;

/// Two-class corpus of `n_per_class` "equals"-shaped and `n_per_class`
/// "main"-shaped methods. The equals bodies carry `this`/`instanceof`/
/// `boolean`/`.equals(...)`; the main bodies carry `println`/`String`.
/// Identifiers are unique per method so near-clone deduplication leaves the
/// corpus essentially intact. Splits are assigned 70/15/15 per class.
pub fn two_class_corpus(n_per_class: usize, seed: u64) -> Vec<RawMethod> {
    let mut out = Vec::with_capacity(2 * n_per_class);
    for i in 0..n_per_class {
        out.push(RawMethod {
            id: format!("equals-{i:04}"),
            name: "equals".into(),
            path: Some(format!("synthetic/Equals{i}.java")),
            code: equals_body(i, seed),
            split: Some(class_split(i, n_per_class)),
        });
    }
    for i in 0..n_per_class {
        out.push(RawMethod {
            id: format!("main-{i:04}"),
            name: "main".into(),
            path: Some(format!("synthetic/Main{i}.java")),
            code: main_body(i, seed),
            split: Some(class_split(i, n_per_class)),
        });
    }
    out
}

fn class_split(i: usize, n: usize) -> Split {
    let train_end = (n * 7) / 10;
    let val_end = train_end + (n * 15).div_ceil(100);
    if i < train_end {
        Split::Train
    } else if i < val_end {
        Split::Validation
    } else {
        Split::Test
    }
}

fn equals_body(i: usize, seed: u64) -> String {
    let mut rng = SplitMix64::keyed(seed, &format!("equals/{i}"));
    let ty = format!("Node{i}Item");
    let fa = format!("rank{i}A");
    let fb = format!("tag{i}B");
    let mut body = String::new();
    match i % 4 {
        0 => {
            body.push_str(&format!(
                "@Override\npublic boolean equals(Object obj{i}) {{\n\
                 \x20   // identity first\n\
                 \x20   if (this == obj{i}) {{\n        return true;\n    }}\n\
                 \x20   if (!(obj{i} instanceof {ty})) {{\n        return false;\n    }}\n\
                 \x20   {ty} other{i} = ({ty}) obj{i};\n\
                 \x20   return this.{fa} == other{i}.{fa} && this.{fb}.equals(other{i}.{fb});\n}}"
            ));
        }
        1 => {
            body.push_str(&format!(
                "public boolean equals(Object candidate{i}) {{\n\
                 \x20   if (candidate{i} == null) {{\n        return false;\n    }}\n\
                 \x20   if (!(candidate{i} instanceof {ty})) {{\n        return false;\n    }}\n\
                 \x20   {ty} that{i} = ({ty}) candidate{i};\n\
                 \x20   boolean same{i} = this.{fa}.equals(that{i}.{fa});\n\
                 \x20   return same{i};\n}}"
            ));
        }
        2 => {
            body.push_str(&format!(
                "@Override\npublic boolean equals(Object o{i}) {{\n\
                 \x20   /* field-wise comparison for {ty} */\n\
                 \x20   if (this == o{i}) {{\n        return true;\n    }}\n\
                 \x20   if (!(o{i} instanceof {ty})) {{\n        return false;\n    }}\n\
                 \x20   {ty} peer{i} = ({ty}) o{i};\n\
                 \x20   if (this.{fa} != peer{i}.{fa}) {{\n        return false;\n    }}\n\
                 \x20   return this.{fb} == peer{i}.{fb};\n}}"
            ));
        }
        _ => {
            body.push_str(&format!(
                "public boolean equals(Object rhs{i}) {{\n\
                 \x20   return rhs{i} instanceof {ty} && this.{fa} == (({ty}) rhs{i}).{fa};\n}}"
            ));
        }
    }
    if rng.next_f64() < 0.4 {
        body.push_str(&format!("\n// checked {} fields", 1 + i % 3));
    }
    body
}

fn main_body(i: usize, seed: u64) -> String {
    let mut rng = SplitMix64::keyed(seed, &format!("main/{i}"));
    let var = format!("count{i}V");
    let cfg = format!("flag{i}W");
    let mut body = String::new();
    match i % 4 {
        0 => {
            body.push_str(&format!(
                "public static void main(String[] args{i}) {{\n\
                 \x20   int {var} = 0;\n\
                 \x20   for (int ix{i} = 0; ix{i} < args{i}.length; ix{i}++) {{\n\
                 \x20       System.out.println(args{i}[ix{i}]);\n\
                 \x20       {var} += {};\n    }}\n\
                 \x20   System.out.println(\"done-{i}: \" + {var});\n}}",
                1 + i % 5
            ));
        }
        1 => {
            body.push_str(&format!(
                "public static void main(String[] args{i}) {{\n\
                 \x20   // print usage when no arguments arrive\n\
                 \x20   if (args{i}.length == 0) {{\n\
                 \x20       System.out.println(\"usage: tool-{i} //input\");\n\
                 \x20       return;\n    }}\n\
                 \x20   String {cfg} = args{i}[0];\n\
                 \x20   System.out.println({cfg});\n}}"
            ));
        }
        2 => {
            body.push_str(&format!(
                "public static void main(String[] args{i}) {{\n\
                 \x20   String banner{i} = \"run {i}\";\n\
                 \x20   while ({var}() > {}) {{\n\
                 \x20       System.out.println(banner{i});\n\
                 \x20       break;\n    }}\n}}\n\
                 /* helper budget: {} */",
                i % 7,
                i % 11
            ));
        }
        _ => {
            body.push_str(&format!(
                "public static void main(String[] args{i}) {{\n\
                 \x20   int {var} = args{i}.length * {};\n\
                 \x20   System.out.println(\"total-{i} = \" + {var});\n\
                 \x20   System.out.println({var} - {});\n}}",
                2 + i % 3,
                i % 4
            ));
        }
    }
    if rng.next_f64() < 0.3 {
        body.push_str(&format!("\n// invoked from launcher {i}"));
    }
    body
}

/// Corpus with planted clone pairs. Builds `n_unique` mutually distinct
/// methods, then clones the first `n_pairs` of them (even pairs exactly,
/// odd pairs with one low-frequency identifier renamed). Returns the raw
/// methods plus the planted `(kept-candidate, clone)` id pairs.
pub fn clone_corpus(
    n_unique: usize,
    n_pairs: usize,
    seed: u64,
) -> (Vec<RawMethod>, Vec<(String, String)>) {
    assert!(n_pairs <= n_unique);
    let mut raws = Vec::with_capacity(n_unique + n_pairs);
    for i in 0..n_unique {
        raws.push(RawMethod {
            id: format!("u{i:04}a"),
            name: "calc".into(),
            path: None,
            code: calc_body(i, seed, false),
            split: Some([Split::Train, Split::Validation, Split::Test][i % 3]),
        });
    }
    let mut pairs = Vec::with_capacity(n_pairs);
    for k in 0..n_pairs {
        let renamed = k % 2 == 1;
        raws.push(RawMethod {
            id: format!("u{k:04}b"),
            name: "calc".into(),
            path: None,
            code: calc_body(k, seed, renamed),
            split: Some([Split::Test, Split::Train, Split::Validation][k % 3]),
        });
        pairs.push((format!("u{k:04}a"), format!("u{k:04}b")));
    }
    (raws, pairs)
}

/// A ~60-token arithmetic method whose identifiers and number literals all
/// embed `i`, giving 10 distinct key tokens. With `rename` set, the
/// twice-used identifier `once{i}V` becomes `alt{i}V`: key Jaccard 9/11 and
/// multiset Jaccard ~0.94, both above the (0.8, 0.7) thresholds.
fn calc_body(i: usize, seed: u64, rename: bool) -> String {
    let mut rng = SplitMix64::keyed(seed, &format!("calc/{i}"));
    let a = format!("lhs{i}Q");
    let b = format!("rhs{i}R");
    let m = format!("mod{i}S");
    let acc = format!("acc{i}T");
    let step = format!("step{i}U");
    let once = if rename {
        format!("alt{i}V")
    } else {
        format!("once{i}V")
    };
    let k1 = rng.next_below(90) + 10;
    let k2 = rng.next_below(900) + 100;
    let k3 = rng.next_below(9000) + 1000;
    format!(
        "int calc(int {a}, int {b}, int {m}) {{\n\
         \x20   int {acc} = {a} * {k1} + {b};\n\
         \x20   int {step} = {acc} - {k2};\n\
         \x20   int {once} = {step} % {m};\n\
         \x20   if ({acc} > {b}) {{\n        {acc} = {acc} + {a} - {k3};\n    }}\n\
         \x20   return {acc} + {step} + {once};\n}}"
    )
}

/// Label-correlated embedding rows for a record set: `informative` leading
/// dimensions carry a +/- `signal` offset by class plus noise, the rest are
/// pure noise. Rows come back in record order.
pub fn synthetic_embeddings(
    records: &[MethodRecord],
    positive_label: &str,
    dim: usize,
    informative: usize,
    signal: f64,
    seed: u64,
) -> Vec<(String, Vec<f64>)> {
    assert!(informative <= dim);
    records
        .iter()
        .map(|r| {
            let mut rng = SplitMix64::keyed(seed, &format!("emb/{}", r.id));
            let offset = if r.label == positive_label {
                signal
            } else {
                -signal
            };
            let v = (0..dim)
                .map(|d| {
                    let noise = rng.next_gaussian();
                    if d < informative {
                        offset + 0.5 * noise
                    } else {
                        noise
                    }
                })
                .collect();
            (r.id.clone(), v)
        })
        .collect()
}
