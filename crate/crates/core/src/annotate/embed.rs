use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::article::{Anchor, Article};

/// Prefix of every embedded comment line. It starts with `::`, so the
/// annotated text is still a valid article.
pub const COMMENT_MARKER: &str = "::@";

/// Article text with comment blocks embedded before their items.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedSource {
    pub lines: Vec<String>,
}

/// A run of marker lines in annotated text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommentBlock {
    /// Half-open range of the block in the annotated lines.
    pub start: usize,
    pub end: usize,
    pub body: String,
    /// 0-based index, in the stripped text, of the line after the block.
    pub target: usize,
}

pub fn is_marker_line(line: &str) -> bool {
    line.starts_with(COMMENT_MARKER)
}

pub fn strip_comments<S: AsRef<str>>(lines: &[S]) -> Vec<String> {
    lines
        .iter()
        .map(AsRef::as_ref)
        .filter(|l| !is_marker_line(l))
        .map(str::to_owned)
        .collect()
}

/// Comment blocks in order of appearance.
pub fn comment_blocks<S: AsRef<str>>(lines: &[S]) -> Vec<CommentBlock> {
    let mut blocks = Vec::new();
    let mut stripped = 0;
    let mut i = 0;
    while i < lines.len() {
        if !is_marker_line(lines[i].as_ref()) {
            stripped += 1;
            i += 1;
            continue;
        }
        let start = i;
        while i < lines.len() && is_marker_line(lines[i].as_ref()) {
            i += 1;
        }
        let body = lines[start..i]
            .iter()
            .map(|l| {
                let rest = &l.as_ref()[COMMENT_MARKER.len()..];
                rest.strip_prefix(' ').unwrap_or(rest)
            })
            .collect::<Vec<_>>()
            .join("\n");
        blocks.push(CommentBlock { start, end: i, body, target: stripped });
    }
    blocks
}

impl AnnotatedSource {
    pub fn strip(&self) -> Vec<String> {
        strip_comments(&self.lines)
    }

    pub fn blocks(&self) -> Vec<CommentBlock> {
        comment_blocks(&self.lines)
    }
}

/// Inserts each comment body, one `::@ ` line per body line, directly above
/// the opening line of its item. Anchors that are not items of `article`
/// are ignored.
pub fn embed_bodies(article: &Article, comments: &BTreeMap<Anchor, String>) -> AnnotatedSource {
    let mut before: BTreeMap<usize, &str> = BTreeMap::new();
    for item in &article.items {
        if let Some(body) = comments.get(&item.anchor) {
            before.insert(item.span.start - 1, body);
        }
    }
    let mut lines = Vec::with_capacity(article.lines.len() + before.len());
    for (idx, line) in article.lines.iter().enumerate() {
        if let Some(body) = before.get(&idx) {
            lines.extend(body.split('\n').map(|b| format!("{COMMENT_MARKER} {b}")));
        }
        lines.push(line.clone());
    }
    AnnotatedSource { lines }
}
