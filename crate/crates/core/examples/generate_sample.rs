//! Regenerates the bundled sample corpus at `sample/corpus-200.jsonl`.
//! The file is committed; run this only when the generator changes.

use emprobe_core::corpus::synthetic::two_class_corpus;

fn main() {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "sample/corpus-200.jsonl".to_string());
    let mut text = String::new();
    for raw in two_class_corpus(100, 2024) {
        text.push_str(&serde_json::to_string(&raw).expect("raw method serializes"));
        text.push('\n');
    }
    std::fs::write(&out, text).expect("sample corpus written");
    println!("wrote {out}");
}
