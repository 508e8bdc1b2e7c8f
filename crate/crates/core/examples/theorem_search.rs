//! Semantic theorem search over the statements of a corpus.
//!
//!     cargo run --example theorem_search -- "union of two sets"

use std::path::PathBuf;

use mmlhub::platform::{read_corpus_dir, BuildSettings, CorpusState};
use mmlhub::platform::views;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let query = std::env::args().nth(1).unwrap_or_else(|| "union of two sets".to_owned());
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/mml/v1");
    let settings = BuildSettings { lsi_k: Some(12), ..BuildSettings::default() };
    let state = CorpusState::build(&read_corpus_dir(&dir)?, "v1", &settings, None)?;
    let index = state.lsi.as_ref().ok_or("corpus has no statements")?;

    println!(
        "{} statements, {} terms, rank {}",
        index.matrix.docs.len(),
        index.matrix.terms.len(),
        index.model.k
    );
    println!("query: {query}\n");
    for hit in index.search(&query, 8) {
        let text = index.statement(&hit.anchor).unwrap_or_default();
        println!("{:>7.4}  {:<22} {}", hit.score, hit.anchor.to_string(), text);
    }

    // The same answer as served over HTTP and printed by the CLI.
    println!("\n{}", views::theorems_json(&state, &query, 3));
    Ok(())
}
