use std::collections::HashSet;

use super::{Article, ItemKind, Symbol};

const INTRODUCERS: [&str; 4] = ["func", "pred", "mode", "attr"];

/// Symbols introduced by `func`/`pred`/`mode`/`attr` in definition items,
/// in source order.
///
/// The symbol is the first whitespace-delimited word after the keyword that
/// is not a variable bound by a preceding `let` (and, for attributes, not
/// the copula `is`).
pub fn extract_symbols(article: &Article) -> Vec<Symbol> {
    let mut out = Vec::new();
    for item in article.items.iter().filter(|i| i.kind == ItemKind::Definition) {
        let raw: Vec<&str> = item.statement_text.split_whitespace().collect();
        let words: Vec<&str> = raw.iter().map(|w| trim_word(w)).collect();
        let mut bound: HashSet<&str> = HashSet::new();
        let mut i = 0;
        while i < words.len() {
            match words[i] {
                "let" => {
                    i += 1;
                    while i < words.len() && !matches!(words[i], "be" | "being" | "such") {
                        if !words[i].is_empty() {
                            bound.insert(words[i]);
                        }
                        i += 1;
                        if raw[i - 1].ends_with(';') {
                            break;
                        }
                    }
                }
                kw if INTRODUCERS.contains(&kw) => {
                    let symbol = words[i + 1..]
                        .iter()
                        .filter(|w| !w.is_empty())
                        .take_while(|w| !matches!(**w, "->" | "means" | "equals"))
                        .find(|w| !bound.contains(**w) && !(kw == "attr" && **w == "is"))
                        .map(|w| strip_bound_prefix(w, &bound));
                    if let Some(symbol) = symbol {
                        out.push(Symbol { symbol: symbol.to_owned(), defining_item: item.anchor.clone() });
                    }
                    i += 1;
                }
                _ => i += 1,
            }
        }
    }
    out
}

/// Drops surrounding punctuation and any argument list, so `F(x)` and
/// `X,` reduce to `F` and `X`. Words without letters or digits, such as
/// `{` or `[:`, are symbols themselves and kept.
fn trim_word(word: &str) -> &str {
    let word = word.trim_end_matches([',', ';']);
    if !word.chars().any(char::is_alphanumeric) {
        return word;
    }
    let word = word.trim_start_matches(['(', '[', '{', ',']);
    let cut = word.find(['(', '[', '{', ',', ';', ')', ']', '}']).unwrap_or(word.len());
    if cut == 0 {
        word
    } else {
        &word[..cut]
    }
}

/// Postfix symbols are written against their argument: `f"` defines `"`.
fn strip_bound_prefix<'a>(word: &'a str, bound: &HashSet<&str>) -> &'a str {
    bound
        .iter()
        .filter_map(|b| word.strip_prefix(b))
        .find(|rest| !rest.is_empty() && !rest.chars().any(char::is_alphanumeric))
        .unwrap_or(word)
}
