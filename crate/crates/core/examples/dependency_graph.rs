//! Builds the article dependency graph of a corpus directory, reduces it
//! and prints layers and DOT.
//!
//!     cargo run --example dependency_graph [-- corpus-dir] | tail -n 20

use std::fs;
use std::path::PathBuf;

use mmlhub::article::{parse_article, ArticleName, DirectiveKind};
use mmlhub::graph::{assign_layers, build_graph, neighborhood, transitive_reduction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/mml/v1"));
    let mut articles = Vec::new();
    for entry in fs::read_dir(&dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "miz") {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_uppercase();
            articles.push(parse_article(ArticleName::new(stem)?, &fs::read_to_string(&path)?)?);
        }
    }

    let kinds = DirectiveKind::article_references().into_iter().collect();
    let full = build_graph(&articles, &kinds)?;
    let reduced = assign_layers(&transitive_reduction(&full)?)?;
    println!("{} articles, {} edges, {} after reduction", full.nodes().len(), full.edges().len(), reduced.edges().len());
    for w in full.warnings() {
        println!("  note: {w}");
    }

    let mut layers: Vec<_> = reduced.layers().into_iter().flatten().collect();
    layers.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
    for (name, layer) in layers {
        println!("{layer:>3}  {name}");
    }

    if let Some(center) = reduced.nodes().iter().find(|n| n.as_str() == "XBOOLE_1") {
        let hood = neighborhood(&reduced, center, 1)?;
        let names: Vec<&str> = hood.nodes().iter().map(|n| n.as_str()).collect();
        println!("\nneighbours of {center}: {}", names.join(", "));
    }

    println!("\n{}", reduced.export_dot());
    Ok(())
}
