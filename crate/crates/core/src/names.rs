//! Incremental search over article names and defined symbols.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::article::{Anchor, Article, ArticleName};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Article,
    Symbol,
}

impl std::str::FromStr for EntryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "article" => Ok(EntryKind::Article),
            "symbol" => Ok(EntryKind::Symbol),
            other => Err(format!("unknown kind {other:?} (expected article or symbol)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Target {
    Article(ArticleName),
    Item(Anchor),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Article(a) => write!(f, "{a}"),
            Target::Item(a) => write!(f, "{a}"),
        }
    }
}

impl Serialize for Target {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NameEntry {
    pub key: String,
    pub kind: EntryKind,
    pub target: Target,
}

/// A symbol defined by more than one item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DuplicateSymbol {
    pub symbol: String,
    pub anchors: Vec<Anchor>,
}

#[derive(Debug, Clone, Default)]
pub struct NameIndex {
    entries: Vec<NameEntry>,
    lowered: Vec<String>,
    /// Position of each entry in within-tier order.
    rank: Vec<u32>,
    warnings: Vec<DuplicateSymbol>,
}

impl NameIndex {
    /// Article entries in name order, then symbol entries ordered by key and
    /// defining anchor.
    pub fn build<'a>(articles: impl IntoIterator<Item = &'a Article>) -> Self {
        let mut names = BTreeSet::new();
        let mut symbols: BTreeMap<String, BTreeSet<Anchor>> = BTreeMap::new();
        for article in articles {
            names.insert(article.name.clone());
            for s in &article.symbols {
                symbols.entry(s.symbol.clone()).or_default().insert(s.defining_item.clone());
            }
        }
        let mut entries: Vec<NameEntry> = names
            .into_iter()
            .map(|n| NameEntry { key: n.to_string(), kind: EntryKind::Article, target: Target::Article(n) })
            .collect();
        let mut warnings = Vec::new();
        for (symbol, anchors) in symbols {
            if anchors.len() > 1 {
                warnings.push(DuplicateSymbol { symbol: symbol.clone(), anchors: anchors.iter().cloned().collect() });
            }
            for anchor in anchors {
                entries.push(NameEntry { key: symbol.clone(), kind: EntryKind::Symbol, target: Target::Item(anchor) });
            }
        }
        Self::from_entries(entries, warnings)
    }

    pub fn from_entries(entries: Vec<NameEntry>, warnings: Vec<DuplicateSymbol>) -> Self {
        let lowered: Vec<String> = entries.iter().map(|e| e.key.to_lowercase()).collect();
        let mut order: Vec<usize> = (0..entries.len()).collect();
        order.sort_by(|&a, &b| {
            let (ea, eb) = (&entries[a], &entries[b]);
            ea.key
                .chars()
                .count()
                .cmp(&eb.key.chars().count())
                .then_with(|| lowered[a].cmp(&lowered[b]))
                .then_with(|| ea.key.cmp(&eb.key))
                .then(ea.kind.cmp(&eb.kind))
                .then_with(|| ea.target.cmp(&eb.target))
        });
        let mut rank = vec![0; entries.len()];
        for (pos, &i) in order.iter().enumerate() {
            rank[i] = pos as u32;
        }
        NameIndex { entries, lowered, rank, warnings }
    }

    pub fn entries(&self) -> &[NameEntry] {
        &self.entries
    }

    pub fn warnings(&self) -> &[DuplicateSymbol] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Case-insensitive tiered match: exact, then prefix, then substring.
    /// Within a tier: shorter key, lowercase key, original key, kind, target.
    pub fn query(&self, text: &str, kind: Option<EntryKind>, limit: usize) -> Vec<&NameEntry> {
        let needle = text.to_lowercase();
        if needle.is_empty() || limit == 0 {
            return Vec::new();
        }
        let mut hits: Vec<(u8, u32, usize)> = self
            .lowered
            .iter()
            .enumerate()
            .filter(|(i, _)| kind.is_none_or(|k| self.entries[*i].kind == k))
            .filter_map(|(i, key)| {
                let tier = if *key == needle {
                    0
                } else if key.starts_with(&needle) {
                    1
                } else if key.contains(&needle) {
                    2
                } else {
                    return None;
                };
                Some((tier, self.rank[i], i))
            })
            .collect();
        if hits.len() > limit {
            hits.select_nth_unstable(limit);
            hits.truncate(limit);
        }
        hits.sort_unstable();
        hits.into_iter().map(|(_, _, i)| &self.entries[i]).collect()
    }
}
