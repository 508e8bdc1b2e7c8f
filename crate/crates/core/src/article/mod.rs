//! Articles of the formal library: names, environment directives, items.
//!
//! Only a line-oriented subset of the article syntax is understood: the
//! directive list between `environ` and `begin`, plus the top-level
//! `theorem`, `definition` and `scheme` blocks of the body. Everything else
//! is carried verbatim in [`Article::lines`].

mod lexer;
mod parse;
mod render;
mod symbols;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::parse_article;
pub use render::render_article;
pub use symbols::extract_symbols;

/// Names longer than this are accepted but produce a warning.
pub const LEGACY_NAME_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("invalid article name {0:?}")]
    InvalidName(String),
    #[error("line {line}: malformed environment: {message}")]
    MalformedEnvironment { line: usize, message: String },
    #[error("line {line}: unterminated {what}")]
    UnterminatedBlock { line: usize, what: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("comment refers to unknown anchor {0}")]
    UnknownAnchor(String),
}

/// Identifier of an article, e.g. `XBOOLE_0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ArticleName(String);

impl ArticleName {
    pub fn new(value: impl Into<String>) -> Result<Self, ParseError> {
        let value = value.into();
        let mut chars = value.chars();
        let ok = matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
            && chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_');
        if ok {
            Ok(ArticleName(value))
        } else {
            Err(ParseError::InvalidName(value))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True when the name exceeds the historical eight-character limit.
    pub fn exceeds_legacy_limit(&self) -> bool {
        self.0.len() > LEGACY_NAME_LIMIT
    }
}

impl fmt::Display for ArticleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for ArticleName {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ArticleName::new(s)
    }
}

impl TryFrom<String> for ArticleName {
    type Error = ParseError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        ArticleName::new(value)
    }
}

impl From<ArticleName> for String {
    fn from(name: ArticleName) -> String {
        name.0
    }
}

impl AsRef<str> for ArticleName {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectiveKind {
    Vocabularies,
    Notations,
    Constructors,
    Registrations,
    Requirements,
    Definitions,
    Theorems,
    Schemes,
    Expansions,
    Equalities,
}

impl DirectiveKind {
    pub const ALL: [DirectiveKind; 10] = [
        DirectiveKind::Vocabularies,
        DirectiveKind::Notations,
        DirectiveKind::Constructors,
        DirectiveKind::Registrations,
        DirectiveKind::Requirements,
        DirectiveKind::Definitions,
        DirectiveKind::Theorems,
        DirectiveKind::Schemes,
        DirectiveKind::Expansions,
        DirectiveKind::Equalities,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            DirectiveKind::Vocabularies => "vocabularies",
            DirectiveKind::Notations => "notations",
            DirectiveKind::Constructors => "constructors",
            DirectiveKind::Registrations => "registrations",
            DirectiveKind::Requirements => "requirements",
            DirectiveKind::Definitions => "definitions",
            DirectiveKind::Theorems => "theorems",
            DirectiveKind::Schemes => "schemes",
            DirectiveKind::Expansions => "expansions",
            DirectiveKind::Equalities => "equalities",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == word)
    }

    /// Directive kinds that name library articles (vocabulary files and
    /// requirement units are left out).
    pub fn article_references() -> Vec<DirectiveKind> {
        Self::ALL
            .into_iter()
            .filter(|k| !matches!(k, DirectiveKind::Vocabularies | DirectiveKind::Requirements))
            .collect()
    }
}

impl fmt::Display for DirectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for DirectiveKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_keyword(s).ok_or_else(|| format!("unknown directive kind {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Directive {
    pub kind: DirectiveKind,
    pub names: Vec<ArticleName>,
    /// 1-based line of the directive keyword.
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    pub directives: Vec<Directive>,
}

impl Environment {
    /// Every `(kind, name)` reference in directive order.
    pub fn references(&self) -> impl Iterator<Item = (DirectiveKind, &ArticleName)> {
        self.directives
            .iter()
            .flat_map(|d| d.names.iter().map(move |n| (d.kind, n)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemKind {
    Theorem,
    Definition,
    Scheme,
}

impl ItemKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ItemKind::Theorem => "theorem",
            ItemKind::Definition => "definition",
            ItemKind::Scheme => "scheme",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "theorem" => Some(ItemKind::Theorem),
            "definition" => Some(ItemKind::Definition),
            "scheme" => Some(ItemKind::Scheme),
            _ => None,
        }
    }
}

impl fmt::Display for ItemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Positional identifier `ARTICLE:kind:ordinal` of an item.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Anchor {
    pub article: ArticleName,
    pub kind: ItemKind,
    pub ordinal: usize,
}

impl Anchor {
    pub fn new(article: ArticleName, kind: ItemKind, ordinal: usize) -> Self {
        Anchor { article, kind, ordinal }
    }
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.article, self.kind, self.ordinal)
    }
}

impl FromStr for Anchor {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("malformed anchor {s:?}");
        let mut parts = s.split(':');
        let (Some(article), Some(kind), Some(ordinal), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad());
        };
        let article = ArticleName::new(article).map_err(|_| bad())?;
        let kind = ItemKind::from_keyword(kind).ok_or_else(bad)?;
        let ordinal: usize = ordinal.parse().map_err(|_| bad())?;
        if ordinal == 0 {
            return Err(bad());
        }
        Ok(Anchor { article, kind, ordinal })
    }
}

impl TryFrom<String> for Anchor {
    type Error = String;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<Anchor> for String {
    fn from(a: Anchor) -> String {
        a.to_string()
    }
}

/// Inclusive, 1-based line range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub anchor: Anchor,
    pub kind: ItemKind,
    pub label: Option<String>,
    pub span: Span,
    /// Statement with proofs and simple justifications removed, whitespace
    /// collapsed to single spaces.
    pub statement_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Symbol {
    pub symbol: String,
    pub defining_item: Anchor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub name: ArticleName,
    pub env: Environment,
    pub items: Vec<Item>,
    pub lines: Vec<String>,
    pub symbols: Vec<Symbol>,
    pub warnings: Vec<String>,
}

impl Article {
    pub fn source(&self) -> String {
        self.lines.join("\n")
    }

    pub fn item(&self, anchor: &Anchor) -> Option<&Item> {
        self.items.iter().find(|i| &i.anchor == anchor)
    }

    /// The item whose block starts at the given 1-based line.
    pub fn item_starting_at(&self, line: usize) -> Option<&Item> {
        self.items
            .binary_search_by_key(&line, |i| i.span.start)
            .ok()
            .map(|idx| &self.items[idx])
    }
}

/// A set of parsed articles keyed by name.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    articles: BTreeMap<ArticleName, Article>,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts an article, returning the previous one with the same name.
    pub fn insert(&mut self, article: Article) -> Option<Article> {
        self.articles.insert(article.name.clone(), article)
    }

    pub fn get(&self, name: &ArticleName) -> Option<&Article> {
        self.articles.get(name)
    }

    pub fn contains(&self, name: &ArticleName) -> bool {
        self.articles.contains_key(name)
    }

    pub fn item(&self, anchor: &Anchor) -> Option<&Item> {
        self.articles.get(&anchor.article)?.item(anchor)
    }

    pub fn contains_anchor(&self, anchor: &Anchor) -> bool {
        self.item(anchor).is_some()
    }

    pub fn names(&self) -> impl Iterator<Item = &ArticleName> {
        self.articles.keys()
    }

    pub fn articles(&self) -> impl Iterator<Item = &Article> {
        self.articles.values()
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }
}

impl FromIterator<Article> for Corpus {
    fn from_iter<T: IntoIterator<Item = Article>>(iter: T) -> Self {
        let mut corpus = Corpus::new();
        for a in iter {
            corpus.insert(a);
        }
        corpus
    }
}
