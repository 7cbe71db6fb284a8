use std::ops::Range;
use std::sync::LazyLock;

use chesstag_chess::{BoardState, Color, MoveRecord, Piece, PieceKind, Square};
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::text;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    IllegalSan,
    NonexistentPiece,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub span: Range<usize>,
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundingReport {
    pub violations: Vec<Violation>,
}

impl GroundingReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

static PIECE_CLAIM: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\b(?:(white|black)(?:'s|’s)?\s+)?(king|queen|rook|bishop|knight|pawn)\s+(?:on|at)\s+([a-h][1-8])\b")
        .unwrap()
});

/// Checks SAN runs and "<piece> on <square>" claims against `board`.
pub fn ground_check(text: &str, board: &BoardState) -> GroundingReport {
    check(text, std::slice::from_ref(board))
}

/// Like [`ground_check`], but text about a played move may refer to the
/// position before or after it.
pub fn ground_check_move(text: &str, board: &BoardState, mv: &MoveRecord) -> GroundingReport {
    let mut boards = vec![board.clone()];
    if let Ok(after) = board.apply(mv) {
        boards.push(after);
    }
    check(text, &boards)
}

/// Index of the first move in `run` that does not replay from `board`.
fn first_failure(run: &[text::SanMention], board: &BoardState) -> Option<(usize, String)> {
    let mut b = board.clone();
    for (i, m) in run.iter().enumerate() {
        match b.play_san(&m.text) {
            Ok((_, next)) => b = next,
            Err(e) => return Some((i, e.to_string())),
        }
    }
    None
}

fn check(text: &str, boards: &[BoardState]) -> GroundingReport {
    let mut violations = Vec::new();
    for run in text::san_runs(text) {
        let failures: Vec<(usize, String)> = boards.iter().filter_map(|b| first_failure(&run, b)).collect();
        if failures.len() == boards.len() {
            // Report where the most moves replayed.
            let (i, reason) = failures.into_iter().max_by_key(|(i, _)| *i).expect("non-empty");
            let sans: Vec<&str> = run.iter().map(|m| m.text.as_str()).collect();
            violations.push(Violation {
                span: run[i].span.clone(),
                kind: ViolationKind::IllegalSan,
                detail: format!("{} in line {:?}: {reason}", run[i].text, sans.join(" ")),
            });
        }
    }

    for c in PIECE_CLAIM.captures_iter(text) {
        let color = c.get(1).map(|m| if m.as_str().eq_ignore_ascii_case("white") { Color::White } else { Color::Black });
        let kind = PieceKind::from_name(&c[2]).expect("regex alternatives are piece names");
        let sq: Square = c[3].parse().expect("regex matches a square");
        let present = boards.iter().any(|b| match (b.piece_at(sq), color) {
            (Some(p), Some(col)) => p == Piece::new(col, kind),
            (Some(p), None) => p.kind == kind,
            (None, _) => false,
        });
        if !present {
            let m = c.get(0).expect("whole match");
            violations.push(Violation {
                span: m.start()..m.end(),
                kind: ViolationKind::NonexistentPiece,
                detail: match color {
                    Some(col) => format!("no {} {} on {sq}", col.name(), kind.name()),
                    None => format!("no {} on {sq}", kind.name()),
                },
            });
        }
    }
    violations.sort_by_key(|v| v.span.start);
    GroundingReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn board(fen: &str) -> BoardState {
        BoardState::from_fen(fen).unwrap()
    }

    #[test]
    fn fixtures() {
        let b = BoardState::initial();
        let r = ground_check("Better was Rxe5.", &b);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, ViolationKind::IllegalSan);
        assert_eq!(&"Better was Rxe5."[r.violations[0].span.clone()], "Rxe5");
        assert!(ground_check("A quiet and calm game.", &b).is_clean());
        let fianchetto = board("rnbqk1nr/ppppppbp/6p1/8/4P3/8/PPPP1PPP/RNBQKBNR w KQkq - 2 3");
        assert!(ground_check("the bishop on g7", &fianchetto).is_clean());
    }

    #[test]
    fn piece_claims() {
        let b = BoardState::initial();
        let r = ground_check("The knight on e5 is strong.", &b);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, ViolationKind::NonexistentPiece);
        assert!(ground_check("White's queen on d1 waits.", &b).is_clean());
        assert!(!ground_check("Black queen on d1 waits.", &b).is_clean());
    }

    #[test]
    fn runs_replay_in_sequence() {
        let b = BoardState::initial();
        assert!(ground_check("1. e4 e5 2. Nf3 Nc6", &b).is_clean());
        let r = ground_check("1. e4 e5 2. Nf3 Nf3", &b);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].span, 16..19);
        assert!(!ground_check("Ke9 is silly", &b).is_clean());
    }

    #[test]
    fn played_move_context() {
        let b = BoardState::initial();
        let (mv, _) = b.play_san("Nf3").unwrap();
        assert!(ground_check_move("The knight on f3 eyes the center. Now d5.", &b, &mv).is_clean());
        assert!(!ground_check("The knight on f3 eyes the center.", &b).is_clean());
    }
}
