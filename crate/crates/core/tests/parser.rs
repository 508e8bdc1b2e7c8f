mod common;

use std::fs;

use common::{fixture, line_scan_item_count, name, random_article, rng};
use mmlhub::article::{parse_article, ItemKind};

#[test]
fn fixtures_round_trip_byte_exact() {
    for dir in ["v1", "v2_add", "v2_delete", "cyclic", "three"] {
        for entry in fs::read_dir(fixture(dir)).unwrap() {
            let path = entry.unwrap().path();
            let text = fs::read_to_string(&path).unwrap();
            let stem = path.file_stem().unwrap().to_str().unwrap().to_uppercase();
            let article = parse_article(name(&stem), &text).unwrap();
            assert_eq!(article.source(), text, "{}", path.display());
            assert_eq!(article.items.len(), line_scan_item_count(&text), "{}", path.display());
        }
    }
}

#[test]
fn generated_articles_match_line_scan() {
    let mut rng = rng(2024);
    for case in 0..300 {
        let text = random_article(&mut rng);
        let article = parse_article(name("GEN"), &text).unwrap_or_else(|e| panic!("case {case}: {e}\n{text}"));
        assert_eq!(article.items.len(), line_scan_item_count(&text), "case {case}\n{text}");
        assert_eq!(article.source(), text);
        for item in &article.items {
            assert!(!item.statement_text.contains("proof"), "case {case}: proof leaked into {}", item.anchor);
            let first = &article.lines[item.span.start - 1];
            assert!(first.starts_with(match item.kind {
                ItemKind::Theorem => "theorem",
                ItemKind::Definition => "definition",
                ItemKind::Scheme => "scheme",
            }));
            let last = article.lines[item.span.end - 1].trim_end();
            assert!(last.ends_with(';'), "case {case}: {} ends at {last:?}", item.anchor);
        }
        for w in article.items.windows(2) {
            assert!(w[0].span.end < w[1].span.start);
        }
    }
}

#[test]
fn ordinals_count_per_kind() {
    let text = fs::read_to_string(fixture("v1").join("ordinal1.miz")).unwrap();
    let a = parse_article(name("ORDINAL1"), &text).unwrap();
    let anchors: Vec<String> = a.items.iter().map(|i| i.anchor.to_string()).collect();
    assert_eq!(
        anchors,
        [
            "ORDINAL1:definition:1",
            "ORDINAL1:definition:2",
            "ORDINAL1:definition:3",
            "ORDINAL1:theorem:1",
            "ORDINAL1:theorem:2",
            "ORDINAL1:scheme:1",
            "ORDINAL1:theorem:3"
        ]
    );
}
