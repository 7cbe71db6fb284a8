use std::sync::LazyLock;

use chesstag_chess::Annotation;
use regex::Regex;

use super::{Commentary, MoveQuality};
use crate::text;

/// Leading glyphs, longest first so `!?` is never read as `!` then `?`.
const LEADING_MARKERS: [(&str, MoveQuality); 6] = [
    ("!!", MoveQuality::Excellent),
    ("??", MoveQuality::Blunder),
    ("!?", MoveQuality::Inaccuracy),
    ("?!", MoveQuality::Inaccuracy),
    ("!", MoveQuality::Good),
    ("?", MoveQuality::Mistake),
];

static LEXICON: LazyLock<Vec<(Regex, MoveQuality)>> = LazyLock::new(|| {
    [
        (r"\bblunder(s|ed|ing)?\b", MoveQuality::Blunder),
        (r"\bmistakes?\b", MoveQuality::Mistake),
        (r"\binaccura(cy|cies|te)\b", MoveQuality::Inaccuracy),
        (r"\b(excellent|brilliant)\b", MoveQuality::Excellent),
        (r"\b(strong|great|good|nice|fine|solid) (move|reply|response|idea)\b", MoveQuality::Good),
    ]
    .into_iter()
    .map(|(p, q)| (Regex::new(&format!("(?i){p}")).unwrap(), q))
    .collect()
});

fn from_annotation(a: Annotation) -> MoveQuality {
    match a {
        Annotation::Brilliant => MoveQuality::Excellent,
        Annotation::Good => MoveQuality::Good,
        Annotation::Interesting | Annotation::Dubious => MoveQuality::Inaccuracy,
        Annotation::Mistake => MoveQuality::Mistake,
        Annotation::Blunder => MoveQuality::Blunder,
    }
}

/// Move quality named by the commentary: a leading `!!`/`!`/`!?`/`?`/`??`
/// glyph (on its own or on a leading SAN move) wins; otherwise the earliest
/// lexicon cue.
pub fn extract_move_quality_text(commentary: &Commentary) -> Option<MoveQuality> {
    let text = commentary.text.trim();
    for (marker, quality) in LEADING_MARKERS {
        if let Some(rest) = text.strip_prefix(marker) {
            if !rest.starts_with(['!', '?']) {
                return Some(quality);
            }
        }
    }

    if let Some(first) = text::tokens(text).iter().find(|t| !text::is_move_number(t.core)) {
        let body = text::strip_move_number(first.core);
        if text::looks_like_san(body) {
            if let (_, Some(a)) = Annotation::strip_suffix(body) {
                return Some(from_annotation(a));
            }
        }
    }

    LEXICON
        .iter()
        .filter_map(|(re, q)| re.find(text).map(|m| (m.start(), *q)))
        .min_by_key(|(pos, _)| *pos)
        .map(|(_, q)| q)
}
