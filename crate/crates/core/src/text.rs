//! Whitespace tokenization with byte spans, and detection of SAN-shaped
//! tokens inside free text.

use std::ops::Range;
use std::sync::LazyLock;

use regex::Regex;

/// Loose SAN shape. Deliberately accepts off-board targets such as `Ke9`
/// so that callers can report them as unparseable rather than ignore them.
static SAN_SHAPE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"^(?:[KQRBN][a-h]?[1-8]?x?[a-z][0-9]{1,2}|[a-h](?:x[a-z])?[0-9]{1,2}(?:=?[QRBN])?|O-O(?:-O)?|0-0(?:-0)?)[+#]?(?:!!|\?\?|!\?|\?!|!|\?)?$",
    )
    .unwrap()
});

static SQUARE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[a-h][1-8]$").unwrap());

/// Words after which a bare square like `e5` names a square, not a pawn move.
const SQUARE_CONTEXT: &[&str] = &[
    "on", "to", "at", "from", "of", "towards", "toward", "into", "onto", "via", "the", "square", "squares", "over",
    "through", "across", "around", "near", "behind", "against",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextToken<'a> {
    /// Token with surrounding punctuation removed.
    pub core: &'a str,
    /// Byte range of `core` in the source text.
    pub span: Range<usize>,
    /// Whether punctuation after the token closes a clause (`.`, `,`, `;`, ...).
    pub ends_clause: bool,
}

/// Splits on whitespace and trims quotes and brackets from both ends and
/// clause punctuation from the end. `!` and `?` are kept since they can be
/// part of a SAN annotation.
pub fn tokens(text: &str) -> Vec<TextToken<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices().chain(std::iter::once((text.len(), ' '))) {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                push_token(text, s, i, &mut out);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    out
}

fn push_token<'a>(text: &'a str, start: usize, end: usize, out: &mut Vec<TextToken<'a>>) {
    let raw = &text[start..end];
    let lead = raw.len() - raw.trim_start_matches(['(', '[', '"', '\'', '“', '‘', '*']).len();
    if is_move_number(&raw[lead..]) {
        let s = start + lead;
        out.push(TextToken {
            core: &raw[lead..],
            span: s..end,
            ends_clause: false,
        });
        return;
    }
    let trimmed = raw[lead..].trim_end_matches([')', ']', '"', '\'', '”', '’', '*', '.', ',', ';', ':']);
    // A trailing '!' or '?' after clause punctuation ("Nf3.!") is not a glyph.
    let ends_clause = raw[lead + trimmed.len()..].contains(['.', ',', ';', ':', ')']);
    if trimmed.is_empty() {
        return;
    }
    let s = start + lead;
    out.push(TextToken {
        core: trimmed,
        span: s..s + trimmed.len(),
        ends_clause,
    });
}

/// Strips a leading move number (`12.`, `12...`, `...`) from a token.
pub fn strip_move_number(tok: &str) -> &str {
    let digits = tok.bytes().take_while(u8::is_ascii_digit).count();
    let rest = &tok[digits..];
    if rest.starts_with('.') {
        rest.trim_start_matches('.')
    } else {
        tok
    }
}

pub fn is_move_number(tok: &str) -> bool {
    let digits = tok.bytes().take_while(u8::is_ascii_digit).count();
    digits > 0 && tok.len() > digits && tok[digits..].bytes().all(|b| b == b'.')
}

pub fn looks_like_san(tok: &str) -> bool {
    SAN_SHAPE.is_match(tok)
}

pub fn is_square(tok: &str) -> bool {
    SQUARE.is_match(tok)
}

/// A SAN-shaped mention inside free text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SanMention {
    pub text: String,
    pub span: Range<usize>,
}

/// Groups SAN-shaped tokens into runs of consecutive moves. Move numbers may
/// appear inside a run; any other word or clause punctuation ends it. Bare
/// squares in a square context ("knight to e5") are not moves.
pub fn san_runs(text: &str) -> Vec<Vec<SanMention>> {
    let toks = tokens(text);
    let mut runs = Vec::new();
    let mut current: Vec<SanMention> = Vec::new();
    let mut prev_square_ref = false;

    for (i, tok) in toks.iter().enumerate() {
        if is_move_number(tok.core) {
            if tok.ends_clause && !current.is_empty() {
                runs.push(std::mem::take(&mut current));
            }
            continue;
        }
        let body = strip_move_number(tok.core);
        let offset = tok.core.len() - body.len();
        let prev_word = i.checked_sub(1).map(|j| toks[j].core.to_ascii_lowercase());
        let square_ref = is_square(body)
            && prev_word.as_deref().is_some_and(|w| {
                SQUARE_CONTEXT.contains(&w) || ((w == "and" || w == "or") && prev_square_ref)
            });
        let conjunction = prev_square_ref && (body == "and" || body == "or" || body == ",");
        prev_square_ref = square_ref || conjunction;

        if !square_ref && looks_like_san(body) {
            current.push(SanMention {
                text: body.to_string(),
                span: tok.span.start + offset..tok.span.end,
            });
            if tok.ends_clause {
                runs.push(std::mem::take(&mut current));
            }
        } else if !current.is_empty() {
            runs.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        runs.push(current);
    }
    runs
}
