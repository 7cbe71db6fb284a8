use chesstag_chess::{BoardState, MoveRecord, PieceKind};
use thiserror::Error;

use crate::tags::{CommentaryType, LengthCutoffs, LengthTag, MoveQuality, TagSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TemplateError {
    #[error("no template for {0} commentary")]
    NotSupported(CommentaryType),
}

/// Neutral sentences used to lengthen long commentary. They name no moves
/// and no piece locations.
const FILLER: [&str; 3] = [
    "The engine evaluation supports this assessment of the position.",
    "Both sides still have to weigh their plans carefully.",
    "The position remains rich with possibilities for both players.",
];

fn quality_phrase(q: MoveQuality) -> &'static str {
    match q {
        MoveQuality::Excellent => "An excellent move.",
        MoveQuality::Good => "A good move.",
        MoveQuality::Inaccuracy => "An inaccuracy.",
        MoveQuality::Mistake => "A mistake.",
        MoveQuality::Blunder => "A blunder.",
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next().map_or_else(String::new, |f| f.to_uppercase().chain(c).collect())
}

fn word_count(s: &str) -> usize {
    s.split_whitespace().count()
}

/// The suggested move when it differs from the one played.
fn alternative(tags: &TagSet, mv: &MoveRecord) -> Option<String> {
    tags.suggested
        .iter()
        .flatten()
        .filter_map(|l| l.moves.first())
        .find(|s| **s != mv.san)
        .cloned()
}

fn short_description(board: &BoardState, mv: &MoveRecord) -> String {
    let side = board.side_to_move().name();
    let check = if mv.flags.mate {
        " Checkmate."
    } else if mv.flags.check {
        " Check."
    } else {
        ""
    };
    let body = if mv.flags.castle_kingside {
        format!("{side} castles kingside.")
    } else if mv.flags.castle_queenside {
        format!("{side} castles queenside.")
    } else if let Some(p) = mv.promotion {
        format!("Pawn promotes to {}.", p.name())
    } else if mv.is_capture() {
        format!("{} takes {}.", capitalize(mv.moving.kind.name()), mv.capture.map_or("", |c| c.kind.name()))
    } else {
        format!("{} to {}.", capitalize(mv.moving.kind.name()), mv.to)
    };
    body + check
}

fn medium_description(board: &BoardState, mv: &MoveRecord) -> String {
    let side = board.side_to_move().name();
    let mut s = format!("{side} plays {}, ", mv.san);
    if mv.is_castle() {
        let wing = if mv.flags.castle_kingside { "kingside" } else { "queenside" };
        s.push_str(&format!("castling {wing} to tuck the king away"));
    } else {
        s.push_str(&format!("moving the {} from {} to {}", mv.moving.kind.name(), mv.from, mv.to));
        if let Some(c) = mv.capture {
            s.push_str(&format!(" and capturing a {}", c.kind.name()));
        }
        if let Some(p) = mv.promotion.filter(|p| *p != PieceKind::Pawn) {
            s.push_str(&format!(" to promote to a {}", p.name()));
        }
    }
    s.push('.');
    if mv.flags.mate {
        s.push_str(" It is checkmate.");
    } else if mv.flags.check {
        s.push_str(" It gives check.");
    }
    s
}

fn fit(mut sentences: Vec<String>, length: LengthTag) -> String {
    let cutoffs = LengthCutoffs::default();
    let mut filler = FILLER.iter().cycle();
    loop {
        let text = sentences.join(" ");
        let n = word_count(&text);
        match length {
            LengthTag::Short if n > cutoffs.short_max && sentences.len() > 1 => {
                sentences.pop();
            }
            LengthTag::Medium if n < cutoffs.short_max + 1 => sentences.push(FILLER[1].to_string()),
            LengthTag::Medium if n > cutoffs.medium_max && sentences.len() > 1 => {
                sentences.pop();
            }
            LengthTag::Long if n <= cutoffs.medium_max => sentences.push(filler.next().expect("cycle").to_string()),
            _ => return text,
        }
    }
}

/// Deterministic commentary from tags. Covers the Move Description, Move
/// Quality and Move Comparison types; output lands in the tagged length
/// class.
pub fn realize_template(tags: &TagSet, board: &BoardState, mv: &MoveRecord) -> Result<String, TemplateError> {
    let kind = tags.commentary_type.unwrap_or(CommentaryType::MoveQuality);
    let alt = alternative(tags, mv);
    let better = alt.as_ref().map(|a| format!("Better was {a}."));
    let marked = |q: MoveQuality| format!("{} {}", q.marker(), quality_phrase(q));
    let side = board.side_to_move().name();

    let sentences: Vec<String> = match (kind, tags.length) {
        (CommentaryType::MoveQuality, LengthTag::Short) => match tags.move_quality {
            Some(q) => [Some(marked(q)), better].into_iter().flatten().collect(),
            None => vec![short_description(board, mv)],
        },
        (CommentaryType::MoveQuality, _) => {
            let mut v: Vec<String> = tags.move_quality.map(marked).into_iter().collect();
            v.extend(better);
            v.push(medium_description(board, mv));
            v
        }
        (CommentaryType::MoveDescription, LengthTag::Short) => vec![short_description(board, mv)],
        (CommentaryType::MoveDescription, _) => {
            let mut v = vec![medium_description(board, mv)];
            if let Some(q) = tags.move_quality {
                v.push(format!("The engine rates it as {}.", q.label().to_lowercase()));
            }
            v
        }
        (CommentaryType::MoveComparison, LengthTag::Short) => match &alt {
            Some(a) => vec![format!("Better was {a}.")],
            None => vec![format!("{} was the best move.", mv.san)],
        },
        (CommentaryType::MoveComparison, _) => {
            let mut v: Vec<String> = tags.move_quality.map(marked).into_iter().collect();
            v.push(match &alt {
                Some(a) => format!("Instead of {}, {side} should have played {a}.", mv.san),
                None => format!("{} is the engine's top choice in this position.", mv.san),
            });
            v
        }
        (other, _) => return Err(TemplateError::NotSupported(other)),
    };
    Ok(fit(sentences, tags.length))
}
