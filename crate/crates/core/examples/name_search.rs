//! Incremental name search: each keystroke narrows the candidate list.
//!
//!     cargo run --example name_search -- xboole

use std::path::PathBuf;

use mmlhub::names::EntryKind;
use mmlhub::platform::{read_corpus_dir, BuildSettings, CorpusState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let typed = std::env::args().nth(1).unwrap_or_else(|| "xboole".to_owned());
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/mml/v1");
    let state = CorpusState::build(&read_corpus_dir(&dir)?, "v1", &BuildSettings::default(), None)?;
    let names = &state.names;
    println!("{} entries", names.len());

    for end in 1..=typed.chars().count() {
        let prefix: String = typed.chars().take(end).collect();
        let hits: Vec<String> = names.query(&prefix, None, 6).iter().map(|e| e.key.clone()).collect();
        println!("{prefix:<10} {}", hits.join("  "));
    }

    println!("\nsymbols containing \"=\":");
    for e in names.query("=", Some(EntryKind::Symbol), 10) {
        println!("  {:<6} {}", e.key, e.target);
    }
    for w in names.warnings() {
        let anchors: Vec<String> = w.anchors.iter().map(ToString::to_string).collect();
        println!("note: {} is defined by {}", w.symbol, anchors.join(" and "));
    }
    Ok(())
}
