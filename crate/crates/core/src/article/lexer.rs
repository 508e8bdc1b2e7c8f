//! Line tokenizer shared by the parser and symbol extraction.

/// A token on one source line. `start..end` are byte offsets into the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    pub start: usize,
    pub end: usize,
}

impl Token<'_> {
    pub fn is_word(&self) -> bool {
        self.text.bytes().next().is_some_and(is_word_byte)
    }
}

fn is_word_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'\''
}

/// The part of `line` before a `::` comment marker.
pub(crate) fn code_part(line: &str) -> &str {
    match line.find("::") {
        Some(idx) => &line[..idx],
        None => line,
    }
}

/// Words are runs of `[A-Za-z0-9_']`; every other non-blank character is a
/// token of its own. Comments are removed first.
pub(crate) fn tokens(line: &str) -> Vec<Token<'_>> {
    let code = code_part(line);
    let bytes = code.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
        } else if is_word_byte(b) {
            let start = i;
            while i < bytes.len() && is_word_byte(bytes[i]) {
                i += 1;
            }
            out.push(Token { text: &code[start..i], start, end: i });
        } else {
            let start = i;
            let len = code[i..].chars().next().map_or(1, char::len_utf8);
            i += len;
            out.push(Token { text: &code[start..i], start, end: i });
        }
    }
    out
}
