//! Attaches comments to items, embeds them into the article text, and
//! carries them across two library updates: one that merges cleanly and
//! one that deletes a commented theorem.
//!
//!     cargo run --example annotate_rebase

use std::fs;
use std::path::Path;

use mmlhub::annotate::{embed_comments, plan_rebase, CommentStore};
use mmlhub::article::{parse_article, Anchor, Article, ArticleName, Corpus};
use mmlhub::users::{hash_token, Role, User, UserId};

fn load(version: &str, file: &str) -> Article {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mml").join(version).join(format!("{file}.miz"));
    let text = fs::read_to_string(path).expect("fixture");
    parse_article(ArticleName::new(file.to_uppercase()).unwrap(), &text).expect("parses")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let author = User {
        id: UserId("ada".into()),
        name: "Ada".into(),
        role: Role::Editor,
        blocked: false,
        token_hash: hash_token("secret"),
    };

    let old = load("v1", "xboole_1");
    let mut corpus = Corpus::new();
    corpus.insert(old.clone());
    let mut store = CommentStore::in_memory();
    let th5: Anchor = "XBOOLE_1:theorem:5".parse()?;
    store.save_comment(&corpus, &th5, "Absorption: $X \\cap (X \\cup Y) = X$.", &author)?;
    let second = store.save_comment(&corpus, &th5, "Absorption law, see also Th4.", &author)?;
    println!("{th5} now at revision {} (parent {:?})", second.revision_id, second.parent);

    let annotated = embed_comments(&old, &store);
    println!("\nembedded:");
    for line in annotated.lines.iter().filter(|l| l.starts_with("::@")) {
        println!("  {line}");
    }

    // A new theorem is inserted above Th4, shifting later ordinals.
    let plan = plan_rebase(&old, Some(&load("v2_add", "xboole_1")), &store)?;
    println!("\nupdate adding a theorem: clean = {}", plan.is_clean());
    for (from, to) in &plan.remap {
        println!("  {from} -> {to}");
    }

    let old = load("v1", "group_6");
    let mut corpus = Corpus::new();
    corpus.insert(old.clone());
    let mut store = CommentStore::in_memory();
    store.save_comment(&corpus, &"GROUP_6:theorem:3".parse()?, "Injective iff trivial kernel.", &author)?;
    let plan = plan_rebase(&old, Some(&load("v2_delete", "group_6")), &store)?;
    println!("\nupdate deleting the commented theorem: {} conflict(s)", plan.conflict_count());
    for c in &plan.conflicts {
        let anchors: Vec<String> = c.anchors.iter().map(ToString::to_string).collect();
        println!("  base lines {}-{}: {}", c.base_start, c.base_end, anchors.join(", "));
    }
    let marked = plan.merge.merged_lines.iter().skip_while(|l| !l.starts_with("<<<<<<<"));
    println!();
    for line in marked.take_while(|l| !l.starts_with(">>>>>>>")) {
        println!("  {line}");
    }
    Ok(())
}
