mod common;

use std::time::{Duration, Instant};

use common::*;
use mmlhub::names::{EntryKind, NameEntry, NameIndex, Target};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;

const ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz_0123456789";

fn random_key(rng: &mut StdRng) -> String {
    let len = rng.random_range(1..=12);
    (0..len)
        .map(|i| {
            let c = ALPHABET[rng.random_range(0..ALPHABET.len())] as char;
            if i == 0 || rng.random_bool(0.3) { c.to_ascii_uppercase() } else { c }
        })
        .collect()
}

/// `count` entries; every tenth is an article, the rest symbols spread
/// over 500 synthetic articles.
fn synthetic_index(count: usize, seed: u64) -> NameIndex {
    let mut rng = rng(seed);
    let entries = (0..count)
        .map(|i| {
            let key = random_key(&mut rng);
            if i % 10 == 0 {
                NameEntry { key, kind: EntryKind::Article, target: Target::Article(name(&format!("ART{i:05}"))) }
            } else {
                let a = anchor(&format!("A{:03}:definition:{}", i % 500, i / 500 + 1));
                NameEntry { key, kind: EntryKind::Symbol, target: Target::Item(a) }
            }
        })
        .collect();
    NameIndex::from_entries(entries, Vec::new())
}

/// Straightforward reference: classify, then sort by the documented keys.
fn oracle<'a>(index: &'a NameIndex, text: &str, kind: Option<EntryKind>) -> Vec<&'a NameEntry> {
    let q = text.to_lowercase();
    let tier = |e: &NameEntry| {
        let k = e.key.to_lowercase();
        if k == q {
            Some(0)
        } else if k.starts_with(&q) {
            Some(1)
        } else if k.contains(&q) {
            Some(2)
        } else {
            None
        }
    };
    let mut v: Vec<(u8, &NameEntry)> = index
        .entries()
        .iter()
        .filter(|e| kind.is_none_or(|k| e.kind == k))
        .filter_map(|e| tier(e).map(|t| (t, e)))
        .collect();
    v.sort_by_key(|(t, e)| (*t, e.key.chars().count(), e.key.to_lowercase(), e.key.clone(), e.kind, e.target.clone()));
    v.into_iter().map(|(_, e)| e).collect()
}

/// Best of five runs, to keep scheduler noise out of the bound.
pub fn query_time(index: &NameIndex, q: &str) -> Duration {
    (0..5)
        .map(|_| {
            let t = Instant::now();
            std::hint::black_box(index.query(q, None, 20));
            t.elapsed()
        })
        .min()
        .unwrap()
}

#[test]
fn ten_thousand_entries_answer_within_bound() {
    let index = synthetic_index(10_000, 5);
    let mut worst = Duration::ZERO;
    for q in ["a", "x", "_", "1", "ab", "Qu", "zz9", "mode", "abcdefghijkl", "nomatchatall"] {
        worst = worst.max(query_time(&index, q));
    }
    eprintln!("worst query over 10k entries: {worst:?}");
    assert!(worst <= Duration::from_millis(5), "{worst:?}");
}

#[test]
fn agrees_with_reference_on_synthetic_index() {
    let index = synthetic_index(2_000, 6);
    let mut rng = rng(8);
    for _ in 0..200 {
        let entry = &index.entries()[rng.random_range(0..index.len())];
        let key = &entry.key;
        let from = rng.random_range(0..key.len());
        let to = rng.random_range(from + 1..=key.len());
        let q = &key[from..to];
        let kind = rng.random_bool(0.5).then_some(entry.kind);
        let expected = oracle(&index, q, kind);
        assert!(!expected.is_empty());
        assert_eq!(index.query(q, kind, usize::MAX), expected, "{q:?}");
        assert_eq!(index.query(q, kind, 7), expected.into_iter().take(7).collect::<Vec<_>>());
    }
}

#[test]
fn fixture_index_tiers() {
    let (_dir, p) = platform(Some("v1"));
    let state = p.snapshot().unwrap();
    let keys = |q: &str| state.names.query(q, None, 20).iter().map(|e| e.key.clone()).collect::<Vec<_>>();
    assert_eq!(keys("xb"), ["XBOOLE_0", "XBOOLE_1"]);
    assert_eq!(keys("tarski")[0], "TARSKI");
    let topo = state.names.query("top", Some(EntryKind::Article), 20);
    assert!(topo.iter().all(|e| e.kind == EntryKind::Article));
    assert!(topo.iter().any(|e| e.key == "TOPS_1"));
}

fn arb_keys() -> impl Strategy<Value = Vec<String>> {
    proptest::collection::vec("[a-cA-C_]{1,6}", 1..60)
}

proptest! {
    #[test]
    fn extending_query_narrows_results(keys in arb_keys(), q in "[a-c]{1,3}", extra in "[a-c_]") {
        let entries = keys
            .into_iter()
            .enumerate()
            .map(|(i, key)| NameEntry { key, kind: EntryKind::Article, target: Target::Article(name(&format!("K{i}"))) })
            .collect();
        let index = NameIndex::from_entries(entries, Vec::new());
        let wide = index.query(&q, None, usize::MAX);
        let narrow = index.query(&format!("{q}{extra}"), None, usize::MAX);
        for e in &narrow {
            prop_assert!(wide.contains(e));
        }
        let upper = index.query(&q.to_uppercase(), None, usize::MAX);
        prop_assert_eq!(wide, upper);
    }
}
