use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{extract_move_quality_text, Commentary, CommentaryType};
use crate::text;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeScore {
    pub category: CommentaryType,
    pub confidence: f64,
}

struct Cue {
    pattern: Regex,
    category: CommentaryType,
    weight: f64,
}

fn cue(p: &str, category: CommentaryType, weight: f64) -> Cue {
    Cue {
        pattern: Regex::new(&format!(r"(?i)\b(?:{p})\b")).unwrap(),
        category,
        weight,
    }
}

static CUES: LazyLock<Vec<Cue>> = LazyLock::new(|| {
    use CommentaryType::*;
    vec![
        cue(r"better (?:was|is|would be)|(?:was|is|would have been|would be) (?:better|stronger|preferable|preferred)", MoveComparison, 3.0),
        cue(r"instead of|rather than|preferable to|should have|could have|stronger (?:was|is)|instead", MoveComparison, 2.0),
        cue(r"better|worse|stronger|weaker|preferred|alternative", MoveComparison, 1.0),
        cue(r"blunder\w*|mistakes?|inaccura\w+|excellent|brilliant|dubious", MoveQuality, 2.5),
        cue(r"hanging|hangs|drops|loses|wins|losing|winning|refut\w+|(?:strong|good|great|nice|weak|bad|poor) (?:move|reply|response|choice)", MoveQuality, 1.5),
        cue(r"plan\w*|idea|aim\w*|intend\w*|prepar\w+|in order to|so that|wants? to|hoping|looking to|threaten\w*|going to|trying to", Planning, 1.5),
        cue(r"opening|middlegame|endgame|theory|tournament|round|rating|clock|time trouble|famous|history|historically|match|database", Contextual, 1.2),
        cue(r"captures?|takes|castles?|castling|moves?|develop\w*|push\w*|advances?|retreats?|recaptures?|trades?|exchanges?|promotes?|checks?|attacks?|pins?", MoveDescription, 1.0),
        cue(r"(?:king|queen|rook|bishop|knight|pawn) (?:to|on|takes|captures|moves)", MoveDescription, 1.5),
    ]
});

/// Classifies commentary by cue lexicons. A leading quality marker decides
/// the type outright; ties go to the earlier category in declaration order.
pub fn extract_commentary_type(commentary: &Commentary) -> TypeScore {
    let text = commentary.text.trim();
    if text.starts_with(['!', '?']) && extract_move_quality_text(commentary).is_some() {
        return TypeScore {
            category: CommentaryType::MoveQuality,
            confidence: 0.95,
        };
    }

    let mut scores = [0.0f64; 6];
    for c in CUES.iter() {
        let n = c.pattern.find_iter(text).count();
        scores[c.category as usize] += c.weight * n as f64;
    }

    // A commentary made only of moves describes them.
    let toks = text::tokens(text);
    if !toks.is_empty()
        && toks
            .iter()
            .all(|t| text::is_move_number(t.core) || text::looks_like_san(text::strip_move_number(t.core)))
    {
        scores[CommentaryType::MoveDescription as usize] += 3.0;
    }

    let total: f64 = scores.iter().sum();
    if total == 0.0 {
        return TypeScore {
            category: CommentaryType::General,
            confidence: 0.3,
        };
    }
    let (best, &score) = scores
        .iter()
        .enumerate()
        .fold((0, &scores[0]), |acc, (i, s)| if *s > *acc.1 { (i, s) } else { acc });
    TypeScore {
        category: CommentaryType::ALL[best],
        confidence: score / total,
    }
}
