use super::lexer::{tokens, Token};
use super::{
    extract_symbols, Anchor, Article, ArticleName, Directive, DirectiveKind, Environment, Item,
    ItemKind, ParseError, Span,
};

/// Keywords that open a block closed by `end`, besides the item keywords.
const BLOCK_OPENERS: [&str; 5] = ["proof", "now", "hereby", "case", "suppose"];

/// Top-level blocks that are not items; skipped to their matching `end`.
const SKIPPED_BLOCKS: [&str; 2] = ["registration", "notation"];

pub fn parse_article(name: ArticleName, source: &str) -> Result<Article, ParseError> {
    let lines: Vec<String> = source.split('\n').map(str::to_owned).collect();
    let mut warnings = Vec::new();
    if name.exceeds_legacy_limit() {
        warnings.push(legacy_warning(&name, 0));
    }
    let (env, body_start) = parse_environment(&lines, &mut warnings)?;
    let items = parse_body(&name, &lines, body_start)?;
    for w in &warnings {
        log::warn!("{name}: {w}");
    }
    let mut article = Article { name, env, items, lines, symbols: Vec::new(), warnings };
    article.symbols = extract_symbols(&article);
    Ok(article)
}

fn legacy_warning(name: &ArticleName, line: usize) -> String {
    let at = if line == 0 { String::new() } else { format!("line {line}: ") };
    format!("{at}article name {name} is longer than {} characters", super::LEGACY_NAME_LIMIT)
}

enum EnvState {
    ExpectEnviron,
    Directives,
    Names { kind: DirectiveKind, line: usize, names: Vec<ArticleName>, want_name: bool },
}

/// Returns the environment and the 0-based index of the first body line.
fn parse_environment(
    lines: &[String],
    warnings: &mut Vec<String>,
) -> Result<(Environment, usize), ParseError> {
    let malformed = |line: usize, message: &str| ParseError::MalformedEnvironment {
        line,
        message: message.to_owned(),
    };
    let mut env = Environment::default();
    let mut state = EnvState::ExpectEnviron;

    for (idx, line) in lines.iter().enumerate() {
        let ln = idx + 1;
        for tok in tokens(line) {
            let t = tok.text;
            state = match state {
                EnvState::ExpectEnviron => {
                    if t != "environ" {
                        return Err(malformed(ln, "expected `environ`"));
                    }
                    EnvState::Directives
                }
                EnvState::Directives => {
                    if t == "begin" {
                        return Ok((env, idx + 1));
                    }
                    match DirectiveKind::from_keyword(t) {
                        Some(kind) => EnvState::Names { kind, line: ln, names: Vec::new(), want_name: true },
                        None => return Err(malformed(ln, &format!("unknown directive `{t}`"))),
                    }
                }
                EnvState::Names { kind, line, mut names, want_name } => {
                    if t == "begin" {
                        return Err(malformed(line, "directive without terminating `;`"));
                    }
                    match (want_name, t) {
                        (true, ";") if names.is_empty() => {
                            return Err(malformed(ln, "directive lists no names"))
                        }
                        (true, _) if tok.is_word() => {
                            let name = ArticleName::new(t).map_err(|_| {
                                malformed(ln, &format!("invalid article name `{t}`"))
                            })?;
                            if name.exceeds_legacy_limit() {
                                warnings.push(legacy_warning(&name, ln));
                            }
                            names.push(name);
                            EnvState::Names { kind, line, names, want_name: false }
                        }
                        (false, ",") => EnvState::Names { kind, line, names, want_name: true },
                        (false, ";") => {
                            env.directives.push(Directive { kind, names, line });
                            EnvState::Directives
                        }
                        _ => return Err(malformed(ln, &format!("unexpected `{t}` in directive"))),
                    }
                }
            };
        }
    }
    Err(match state {
        EnvState::ExpectEnviron => malformed(lines.len(), "missing `environ`"),
        EnvState::Directives => malformed(lines.len(), "missing `begin`"),
        EnvState::Names { line, .. } => malformed(line, "directive without terminating `;`"),
    })
}

/// A token of the article body with its 0-based line index.
struct BodyToken<'a> {
    line: usize,
    first_on_line: bool,
    tok: Token<'a>,
}

struct OpenItem {
    kind: ItemKind,
    line: usize,
    label: Option<String>,
    depth: usize,
    /// Depth at which the current proof was opened, and its line.
    proof: Option<(usize, usize)>,
    justification: bool,
    skip_semicolon: bool,
    included: Vec<usize>,
}

enum BodyState {
    Top,
    Item(OpenItem),
    Skip { keyword: String, line: usize, depth: usize },
}

fn parse_body(
    article: &ArticleName,
    lines: &[String],
    body_start: usize,
) -> Result<Vec<Item>, ParseError> {
    let toks: Vec<BodyToken<'_>> = lines
        .iter()
        .enumerate()
        .skip(body_start)
        .flat_map(|(line, text)| {
            tokens(text).into_iter().enumerate().map(move |(i, tok)| BodyToken {
                line,
                first_on_line: i == 0,
                tok,
            })
        })
        .collect();

    let mut items = Vec::new();
    let mut ordinals = [0usize; 3];
    let mut state = BodyState::Top;
    let mut i = 0;

    while i < toks.len() {
        let BodyToken { line, first_on_line, tok } = &toks[i];
        let t = tok.text;
        match &mut state {
            BodyState::Top => {
                if *first_on_line {
                    if let Some(kind) = ItemKind::from_keyword(t) {
                        let mut open = OpenItem {
                            kind,
                            line: *line,
                            label: None,
                            depth: usize::from(kind == ItemKind::Definition),
                            proof: None,
                            justification: false,
                            skip_semicolon: false,
                            included: Vec::new(),
                        };
                        i += 1;
                        i += take_label(&toks[i..], &mut open);
                        state = BodyState::Item(open);
                        continue;
                    } else if SKIPPED_BLOCKS.contains(&t) {
                        state = BodyState::Skip { keyword: t.to_owned(), line: *line, depth: 1 };
                    }
                }
            }
            BodyState::Skip { depth, .. } => {
                if t == "end" {
                    *depth -= 1;
                    if *depth == 0 {
                        state = BodyState::Top;
                    }
                } else if BLOCK_OPENERS.contains(&t) || SKIPPED_BLOCKS.contains(&t) || t == "definition" {
                    *depth += 1;
                }
            }
            BodyState::Item(open) => {
                if let Some(end_line) = step_item(open, i, t, *line) {
                    let kind = open.kind;
                    let slot = kind as usize;
                    ordinals[slot] += 1;
                    items.push(Item {
                        anchor: Anchor::new(article.clone(), kind, ordinals[slot]),
                        kind,
                        label: open.label.take(),
                        span: Span { start: open.line + 1, end: end_line + 1 },
                        statement_text: statement_text(lines, &toks, &open.included),
                    });
                    state = BodyState::Top;
                }
            }
        }
        i += 1;
    }

    match state {
        BodyState::Top => Ok(items),
        BodyState::Item(open) => Err(match open.proof {
            Some((_, line)) => ParseError::UnterminatedBlock { line: line + 1, what: "proof".into() },
            None => ParseError::UnterminatedBlock {
                line: open.line + 1,
                what: open.kind.keyword().into(),
            },
        }),
        BodyState::Skip { keyword, line, .. } => {
            Err(ParseError::UnterminatedBlock { line: line + 1, what: keyword })
        }
    }
}

/// Consumes a theorem label (`Th1:`) or a scheme name right after the item
/// keyword. Returns the number of tokens consumed.
fn take_label(rest: &[BodyToken<'_>], open: &mut OpenItem) -> usize {
    let Some(first) = rest.first() else { return 0 };
    match open.kind {
        ItemKind::Scheme if first.tok.is_word() => {
            open.label = Some(first.tok.text.to_owned());
            1
        }
        ItemKind::Theorem if first.tok.is_word() => {
            let colon = rest.get(1).filter(|b| b.tok.text == ":");
            let assign = match (colon, rest.get(2)) {
                (Some(c), Some(n)) => n.tok.text == "=" && n.line == c.line && n.tok.start == c.tok.end,
                _ => false,
            };
            if colon.is_some() && !assign {
                open.label = Some(first.tok.text.to_owned());
                2
            } else {
                0
            }
        }
        _ => 0,
    }
}

/// Advances an open item by one token. Returns the closing line when the
/// token ends the item.
fn step_item(open: &mut OpenItem, idx: usize, t: &str, line: usize) -> Option<usize> {
    let ends_on_semicolon = open.kind != ItemKind::Definition;
    let skip_semicolon = std::mem::take(&mut open.skip_semicolon);

    if BLOCK_OPENERS.contains(&t) {
        if open.proof.is_none() && t == "proof" {
            open.proof = Some((open.depth, line));
        } else if open.proof.is_none() && !open.justification {
            open.included.push(idx);
        }
        open.depth += 1;
        return None;
    }

    if t == "end" && open.depth > 0 {
        open.depth -= 1;
        match open.proof {
            Some((base, _)) if base == open.depth => {
                open.proof = None;
                open.skip_semicolon = true;
                if open.depth == 0 {
                    return Some(line);
                }
            }
            Some(_) => {}
            None if open.depth == 0 => return Some(line),
            None => {
                if !open.justification {
                    open.included.push(idx);
                }
            }
        }
        return None;
    }

    if open.proof.is_some() {
        return None;
    }

    match t {
        ";" if skip_semicolon => None,
        ";" => {
            let was_justification = std::mem::take(&mut open.justification);
            if ends_on_semicolon && open.depth == 0 {
                Some(line)
            } else {
                if !was_justification {
                    open.included.push(idx);
                }
                None
            }
        }
        "by" | "from" => {
            open.justification = true;
            None
        }
        _ => {
            if !open.justification {
                open.included.push(idx);
            }
            None
        }
    }
}

/// Joins runs of adjacent included tokens by their source slices.
fn statement_text(lines: &[String], toks: &[BodyToken<'_>], included: &[usize]) -> String {
    let mut pieces: Vec<&str> = Vec::new();
    let mut k = 0;
    while k < included.len() {
        let first = &toks[included[k]];
        let mut last = first;
        while k + 1 < included.len()
            && included[k + 1] == included[k] + 1
            && toks[included[k + 1]].line == first.line
        {
            k += 1;
            last = &toks[included[k]];
        }
        pieces.push(&lines[first.line][first.tok.start..last.tok.end]);
        k += 1;
    }
    pieces.join(" ").split_whitespace().collect::<Vec<_>>().join(" ")
}
