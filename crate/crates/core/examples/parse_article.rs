//! Parses one article and prints its environment, items and symbols.
//!
//!     cargo run --example parse_article [-- path/to/article.miz]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use mmlhub::article::{parse_article, render_article, ArticleName};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/mml/v1/xboole_0.miz"));
    let text = std::fs::read_to_string(&path)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_uppercase();
    let article = parse_article(ArticleName::new(stem)?, &text)?;

    println!("article {}", article.name);
    for d in &article.env.directives {
        let names: Vec<&str> = d.names.iter().map(|n| n.as_str()).collect();
        println!("  {:<12} {}", d.kind.keyword(), names.join(", "));
    }
    println!();
    for item in &article.items {
        let label = item.label.as_deref().unwrap_or("-");
        println!("{:<24} {:<6} lines {:>3}-{:<3} {}", item.anchor.to_string(), label, item.span.start, item.span.end, item.statement_text);
    }
    println!();
    for s in &article.symbols {
        println!("symbol {:<8} defined by {}", s.symbol, s.defining_item);
    }
    for w in &article.warnings {
        eprintln!("warning: {w}");
    }

    assert_eq!(article.source(), text, "parsing is lossless");
    let html = render_article(&article, &BTreeSet::new(), &BTreeMap::new())?;
    println!("\nrendered {} bytes of HTML", html.len());
    Ok(())
}
