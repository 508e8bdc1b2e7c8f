mod common;

use std::collections::BTreeMap;
use std::fs;

use common::*;
use mmlhub::annotate::{
    comment_blocks, diff3_merge, embed_bodies, embed_comments, is_marker_line, plan_rebase, strip_comments,
    CommentStore, MARKER_BASE, MARKER_OURS, MARKER_SEP, MARKER_THEIRS,
};
use mmlhub::article::{parse_article, Anchor, Article};
use rand::seq::IndexedRandom;
use rand::Rng;

fn article(dir: &str, file: &str) -> Article {
    let text = fs::read_to_string(fixture(dir).join(format!("{file}.miz"))).unwrap();
    parse_article(name(&file.to_uppercase()), &text).unwrap()
}

fn admin() -> mmlhub::users::User {
    users().remove(0)
}

#[test]
fn diff3_example_classes() {
    let r = diff3_merge(&["a", "b", "c"], &["a", "x", "b", "c"], &["a", "b", "c", "d"]);
    assert!(r.clean);
    assert_eq!(r.merged_lines, ["a", "x", "b", "c", "d"]);

    let r = diff3_merge(&["a", "b", "c"], &["a", "B1", "c"], &["a", "B2", "c"]);
    assert!(!r.clean);
    assert_eq!(r.conflicts.len(), 1);
    assert_eq!(r.conflicts[0].base, 1..2);
    assert_eq!(r.merged_lines, ["a", MARKER_OURS, "B1", MARKER_BASE, "b", MARKER_SEP, "B2", MARKER_THEIRS, "c"]);

    let base = ["a", "b", "c"];
    let r = diff3_merge(&base, &base, &base);
    assert!(r.clean);
    assert_eq!(r.merged_lines, base);
}

#[test]
fn strip_inverts_embed_for_random_placements() {
    let mut rng = rng(99);
    let mut articles: Vec<Article> = fs::read_dir(fixture("v1"))
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            let stem = path.file_stem().unwrap().to_str().unwrap().to_uppercase();
            parse_article(name(&stem), &fs::read_to_string(&path).unwrap()).unwrap()
        })
        .collect();
    for _ in 0..20 {
        articles.push(parse_article(name("GEN"), &random_article(&mut rng)).unwrap());
    }
    let bodies = ["$x \\in y$", "two\nlines", "", "::@ nested marker", "trailing space "];
    for case in 0..100 {
        let a = articles.choose(&mut rng).unwrap();
        let comments: BTreeMap<Anchor, String> = a
            .items
            .iter()
            .filter_map(|i| {
                let body = bodies.choose(&mut rng).unwrap();
                rng.random_bool(0.5).then(|| (i.anchor.clone(), body.to_string()))
            })
            .collect();
        let annotated = embed_bodies(a, &comments);
        assert_eq!(annotated.strip(), a.lines, "case {case}");
        let blocks = comment_blocks(&annotated.lines);
        assert_eq!(blocks.len(), comments.len(), "case {case}");
        for block in blocks {
            let item = a.item_starting_at(block.target + 1).expect("block sits above an item");
            assert_eq!(comments[&item.anchor], block.body);
        }
        assert_eq!(strip_comments(&a.lines), a.lines);
        assert!(a.lines.iter().all(|l| !is_marker_line(l)));
    }
}

#[test]
fn clean_rebase_keeps_statements() {
    let old = article("v1", "xboole_1");
    let new = article("v2_add", "xboole_1");
    let users = users();
    let corpus = {
        let mut c = mmlhub::article::Corpus::new();
        c.insert(old.clone());
        c
    };
    let mut store = CommentStore::in_memory();
    for ordinal in [1, 2, 5, 7] {
        let a = anchor(&format!("XBOOLE_1:theorem:{ordinal}"));
        store.save_comment(&corpus, &a, &format!("note {ordinal}"), &users[1]).unwrap();
    }
    let plan = plan_rebase(&old, Some(&new), &store).unwrap();
    assert!(plan.is_clean());
    let merged = parse_article(name("XBOOLE_1"), &(plan.merge.text() + "\n")).unwrap();
    let mut seen = 0;
    for block in comment_blocks(&merged.lines) {
        let old_anchor = store.live_comments(&old.name).into_iter().find(|(_, b)| *b == block.body).unwrap().0;
        let new_item = new.item_starting_at(block.target + 1).unwrap();
        assert_eq!(plan.remap[&old_anchor], new_item.anchor);
        assert_eq!(new_item.statement_text, old.item(&old_anchor).unwrap().statement_text);
        seen += 1;
    }
    assert_eq!(seen, 4);
    assert_eq!(plan.remap[&anchor("XBOOLE_1:theorem:5")], anchor("XBOOLE_1:theorem:6"));
    assert_eq!(plan.remap[&anchor("XBOOLE_1:theorem:1")], anchor("XBOOLE_1:theorem:1"));
}

#[test]
fn add_fixture_update_has_no_conflicts() {
    let (_dir, p) = platform(Some("v1"));
    let editor = p.authenticate(Some(EDITOR_TOKEN)).unwrap();
    for a in ["TARSKI:theorem:1", "XBOOLE_1:theorem:6", "GROUP_6:theorem:3"] {
        p.save_comment(&editor, &anchor(a), &format!("comment on {a}")).unwrap();
    }
    let report = p.update(&fixture("v2_add"), "v2_add").unwrap();
    assert_eq!(report.conflict_count, 0, "{report:?}");
    assert_eq!(report.comments_before, 3);
    assert_eq!(report.comments_after, 3);
    assert_eq!(p.latest_comment(&anchor("XBOOLE_1:theorem:7")).unwrap().body, "comment on XBOOLE_1:theorem:6");
    assert!(p.latest_comment(&anchor("XBOOLE_1:theorem:6")).is_err());
    assert!(p.frozen_articles().is_empty());

    let state = p.snapshot().unwrap();
    let xb1 = state.corpus.get(&name("XBOOLE_1")).unwrap();
    let rendered = embed_comments(xb1, &CommentStore::in_memory());
    assert_eq!(rendered.strip(), xb1.lines);
}

#[test]
fn delete_fixture_update_reports_one_conflict() {
    let (dir, p) = platform(Some("v1"));
    let editor = p.authenticate(Some(EDITOR_TOKEN)).unwrap();
    p.save_comment(&editor, &anchor("GROUP_6:theorem:3"), "kernel criterion").unwrap();
    p.save_comment(&editor, &anchor("TARSKI:theorem:1"), "extensionality").unwrap();

    let preview = p.preview_update(&fixture("v1"), &fixture("v2_delete")).unwrap();
    assert_eq!(preview.conflict_count, 1);
    assert!(p.frozen_articles().is_empty(), "preview must not write");

    let report = p.update(&fixture("v2_delete"), "v2_delete").unwrap();
    assert_eq!(report.conflict_count, 1, "{report:?}");
    assert_eq!(report.conflicted_anchors, [anchor("GROUP_6:theorem:3")]);
    assert_eq!(p.frozen_articles(), [name("GROUP_6")]);
    assert_eq!(p.latest_comment(&anchor("TARSKI:theorem:1")).unwrap().body, "extensionality");
    let err = p.save_comment(&editor, &anchor("GROUP_6:theorem:1"), "x").unwrap_err();
    assert!(err.to_string().contains("frozen"), "{err}");

    let reports: Vec<_> = fs::read_dir(dir.path().join("reports")).unwrap().collect();
    assert_eq!(reports.len(), 1);

    let admin = admin();
    let mapping = BTreeMap::from([(anchor("GROUP_6:theorem:3"), anchor("GROUP_6:theorem:3"))]);
    p.resolve(&admin, &name("GROUP_6"), &mapping).unwrap();
    assert!(p.frozen_articles().is_empty());
    assert_eq!(p.latest_comment(&anchor("GROUP_6:theorem:3")).unwrap().body, "kernel criterion");
}

#[test]
fn identity_update_is_clean() {
    let (_dir, p) = platform(Some("v1"));
    let editor = p.authenticate(Some(EDITOR_TOKEN)).unwrap();
    p.save_comment(&editor, &anchor("GROUP_6:theorem:3"), "c").unwrap();
    let report = p.update(&fixture("v1"), "again").unwrap();
    assert_eq!(report.conflict_count, 0);
    assert_eq!(report.from_hash, report.to_hash);
    assert_eq!(p.latest_comment(&anchor("GROUP_6:theorem:3")).unwrap().revision_id, 1);
}
