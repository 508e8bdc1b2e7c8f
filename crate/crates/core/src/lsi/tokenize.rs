/// Connectives and proof keywords that carry no topical signal.
pub const STOPWORDS: [&str; 24] = [
    "for", "holds", "being", "be", "is", "st", "ex", "not", "and", "or", "implies", "iff", "of", "the", "it",
    "let", "assume", "then", "thus", "hence", "proof", "end", "theorem", "definition",
];

/// Splits on characters outside `[A-Za-z0-9_]`, lowercases, and drops
/// stopwords and pure integers.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .filter(|w| !w.is_empty())
        .map(str::to_ascii_lowercase)
        .filter(|w| !w.bytes().all(|b| b.is_ascii_digit()))
        .filter(|w| !STOPWORDS.contains(&w.as_str()))
        .collect()
}
