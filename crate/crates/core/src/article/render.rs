use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use super::{Anchor, Article, ArticleName, RenderError};

/// Renders an article as an HTML fragment.
///
/// Directive names that are corpus articles become links to
/// `/articles/{NAME}`; every item is a `<pre>` whose id is its anchor; a
/// comment is emitted as an `<aside class="annotation">` directly before its
/// item with the LaTeX body kept verbatim (HTML-escaped only) for the
/// browser to typeset.
pub fn render_article(
    article: &Article,
    corpus: &BTreeSet<ArticleName>,
    comments: &BTreeMap<Anchor, String>,
) -> Result<String, RenderError> {
    if let Some(unknown) = comments.keys().find(|a| article.item(a).is_none()) {
        return Err(RenderError::UnknownAnchor(unknown.to_string()));
    }

    let mut out = String::new();
    let name = escape(article.name.as_str());
    let _ = writeln!(out, "<article class=\"mml-article\" id=\"{name}\">");
    let _ = writeln!(out, "<h1>{name}</h1>");
    out.push_str("<section class=\"environ\">\n");
    for directive in &article.env.directives {
        let names: Vec<String> = directive
            .names
            .iter()
            .map(|n| {
                let text = escape(n.as_str());
                if corpus.contains(n) {
                    format!("<a class=\"article-ref\" href=\"/articles/{text}\">{text}</a>")
                } else {
                    text
                }
            })
            .collect();
        let _ = writeln!(
            out,
            "<div class=\"directive\"><span class=\"keyword\">{}</span> {};</div>",
            directive.kind,
            names.join(", ")
        );
    }
    out.push_str("</section>\n<section class=\"text\">\n");

    let mut line = 1;
    let total = article.lines.len();
    for item in &article.items {
        if line < item.span.start {
            push_lines(&mut out, "<pre class=\"source\">", &article.lines[line - 1..item.span.start - 1]);
        }
        if let Some(body) = comments.get(&item.anchor) {
            let anchor = escape(&item.anchor.to_string());
            let _ = writeln!(
                out,
                "<aside class=\"annotation\" data-anchor=\"{anchor}\"><div class=\"latex\">{}</div></aside>",
                escape(body)
            );
        }
        let label = item
            .label
            .as_deref()
            .map(|l| format!(" data-label=\"{}\"", escape(l)))
            .unwrap_or_default();
        let open = format!(
            "<pre class=\"item {}\" id=\"{}\"{label}>",
            item.kind,
            escape(&item.anchor.to_string())
        );
        push_lines(&mut out, &open, &article.lines[item.span.start - 1..item.span.end]);
        line = item.span.end + 1;
    }
    if line <= total {
        push_lines(&mut out, "<pre class=\"source\">", &article.lines[line - 1..]);
    }
    out.push_str("</section>\n</article>\n");
    Ok(out)
}

fn push_lines(out: &mut String, open: &str, lines: &[String]) {
    out.push_str(open);
    for (i, l) in lines.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&escape(l));
    }
    out.push_str("</pre>\n");
}

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::article::parse_article;

    fn article() -> Article {
        parse_article(
            ArticleName::new("T1").unwrap(),
            "environ theorems TARSKI, MISSING;\nbegin\ntheorem Th1: contradiction;\n",
        )
        .unwrap()
    }

    fn corpus() -> BTreeSet<ArticleName> {
        [ArticleName::new("TARSKI").unwrap()].into_iter().collect()
    }

    #[test]
    fn directive_links_only_for_corpus_articles() {
        let html = render_article(&article(), &corpus(), &BTreeMap::new()).unwrap();
        assert!(html.contains("<a class=\"article-ref\" href=\"/articles/TARSKI\">TARSKI</a>"));
        assert!(!html.contains("href=\"/articles/MISSING\""));
        assert!(html.contains("id=\"T1:theorem:1\""));
        assert!(!html.contains("annotation"));
    }

    #[test]
    fn annotation_precedes_item() {
        let anchor: Anchor = "T1:theorem:1".parse().unwrap();
        let comments = BTreeMap::from([(anchor, "$x \\in y$".to_owned())]);
        let html = render_article(&article(), &corpus(), &comments).unwrap();
        let note = html.find("<aside class=\"annotation\" data-anchor=\"T1:theorem:1\">").unwrap();
        let item = html.find("id=\"T1:theorem:1\"").unwrap();
        assert!(note < item);
        assert!(html.contains("$x \\in y$"));
    }

    #[test]
    fn unknown_anchor_rejected() {
        let anchor: Anchor = "T1:theorem:2".parse().unwrap();
        let comments = BTreeMap::from([(anchor, "x".to_owned())]);
        assert_eq!(
            render_article(&article(), &corpus(), &comments),
            Err(RenderError::UnknownAnchor("T1:theorem:2".into()))
        );
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }
}
