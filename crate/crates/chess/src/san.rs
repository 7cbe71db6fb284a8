//! Standard algebraic notation.
//!
//! Parsing is lenient about things commentary text does in practice: trailing
//! `!`/`?` glyphs, `0-0` for castling, a missing `x` on captures, a missing `=`
//! before the promotion piece and check markers that don't match the position.
//! Formatting always produces the minimal canonical form.

use crate::board::BoardState;
use crate::movegen::Special;
use crate::moves::{Annotation, MoveRecord};
use crate::types::{PieceKind, Square};
use crate::ChessError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum SanPattern {
    Castle { kingside: bool },
    Normal {
        kind: PieceKind,
        from_file: Option<u8>,
        from_rank: Option<u8>,
        capture: bool,
        to: Square,
        promotion: Option<PieceKind>,
    },
}

fn parse_pattern(text: &str) -> Option<SanPattern> {
    let t = text.trim_end_matches(['+', '#']);
    match t {
        "O-O" | "0-0" => return Some(SanPattern::Castle { kingside: true }),
        "O-O-O" | "0-0-0" => return Some(SanPattern::Castle { kingside: false }),
        _ => {}
    }
    if !t.is_ascii() || t.len() < 2 {
        return None;
    }

    let mut body = t;
    let mut promotion = None;
    // Promotion suffix: "=Q" or bare "Q" after a destination square.
    let bytes = body.as_bytes();
    let last = *bytes.last()? as char;
    if matches!(last, 'Q' | 'R' | 'B' | 'N') && bytes.len() >= 3 {
        let before = bytes[bytes.len() - 2] as char;
        if before == '=' {
            promotion = PieceKind::from_letter(last);
            body = &body[..body.len() - 2];
        } else if before.is_ascii_digit() {
            promotion = PieceKind::from_letter(last);
            body = &body[..body.len() - 1];
        }
    }

    if body.len() < 2 {
        return None;
    }
    let to: Square = body[body.len() - 2..].parse().ok()?;
    let mut head = &body[..body.len() - 2];

    let kind = match head.chars().next() {
        Some(c @ ('N' | 'B' | 'R' | 'Q' | 'K')) => {
            head = &head[1..];
            PieceKind::from_letter(c)?
        }
        _ => PieceKind::Pawn,
    };
    let capture = head.ends_with('x');
    if capture {
        head = &head[..head.len() - 1];
    }
    let mut from_file = None;
    let mut from_rank = None;
    for c in head.chars() {
        match c {
            'a'..='h' if from_file.is_none() && from_rank.is_none() => from_file = Some(c as u8 - b'a'),
            '1'..='8' if from_rank.is_none() => from_rank = Some(c as u8 - b'1'),
            _ => return None,
        }
    }
    if kind == PieceKind::Pawn {
        // Pawn moves name at most the source file.
        if from_rank.is_some() || (capture && from_file.is_none()) {
            return None;
        }
    } else if promotion.is_some() {
        return None;
    }
    Some(SanPattern::Normal {
        kind,
        from_file,
        from_rank,
        capture,
        to,
        promotion,
    })
}

impl BoardState {
    /// Parses a SAN move into the legal move it denotes.
    pub fn parse_san(&self, text: &str) -> Result<MoveRecord, ChessError> {
        self.parse_san_annotated(text).map(|(m, _)| m)
    }

    /// Like [`BoardState::parse_san`], also returning a stripped `!`/`?` glyph.
    pub fn parse_san_annotated(&self, text: &str) -> Result<(MoveRecord, Option<Annotation>), ChessError> {
        let trimmed = text.trim();
        let (core, annotation) = Annotation::strip_suffix(trimmed);
        let pattern = parse_pattern(core).ok_or_else(|| ChessError::UnparseableSan(text.to_string()))?;

        let raws = self.legal_raw();
        let candidates: Vec<_> = raws
            .iter()
            .filter(|m| {
                let piece = self.piece_at(m.from).expect("move starts on a piece");
                match &pattern {
                    SanPattern::Castle { kingside } => {
                        m.special == if *kingside { Special::CastleKingside } else { Special::CastleQueenside }
                    }
                    SanPattern::Normal {
                        kind,
                        from_file,
                        from_rank,
                        capture,
                        to,
                        promotion,
                    } => {
                        let is_capture = self.piece_at(m.to).is_some()
                            || m.special == Special::EnPassant;
                        piece.kind == *kind
                            && m.to == *to
                            && m.promotion == *promotion
                            && from_file.is_none_or(|f| m.from.file() == f)
                            && from_rank.is_none_or(|r| m.from.rank() == r)
                            && (!capture || is_capture)
                            && !matches!(
                                m.special,
                                Special::CastleKingside | Special::CastleQueenside
                            )
                    }
                }
            })
            .collect();

        match candidates.as_slice() {
            [] => Err(ChessError::IllegalMove(text.to_string())),
            [m] => Ok((self.record_for(m, &raws), annotation)),
            _ => Err(ChessError::AmbiguousMove(text.to_string())),
        }
    }

    /// Canonical SAN for a legal move in this position.
    pub fn format_san(&self, mv: &MoveRecord) -> Result<String, ChessError> {
        let raw = mv.raw();
        let raws = self.legal_raw();
        if !raws.contains(&raw) || self.piece_at(mv.from) != Some(mv.moving) {
            return Err(ChessError::IllegalMove(mv.san.clone()));
        }
        Ok(self.record_for(&raw, &raws).san)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Color, Piece};

    fn board(fen: &str) -> BoardState {
        BoardState::from_fen(fen).unwrap()
    }

    #[test]
    fn knight_f3_from_initial() {
        let m = BoardState::initial().parse_san("Nf3").unwrap();
        assert_eq!(m.from.to_string(), "g1");
        assert_eq!(m.to.to_string(), "f3");
        assert_eq!(m.moving, Piece::new(Color::White, PieceKind::Knight));
    }

    #[test]
    fn queen_captures_on_d4() {
        // 1. e4 c5 2. Nf3 g6 3. d4 cxd4
        let b = board("rnbqkbnr/pp1ppp1p/6p1/8/3pP3/5N2/PPP2PPP/RNBQKB1R w KQkq - 0 4");
        let m = b.parse_san("Qxd4").unwrap();
        assert_eq!(m.from.to_string(), "d1");
        assert_eq!(m.capture, Some(Piece::new(Color::Black, PieceKind::Pawn)));
    }

    #[test]
    fn off_board_square_is_unparseable() {
        assert!(matches!(
            BoardState::initial().parse_san("Ke9"),
            Err(ChessError::UnparseableSan(_))
        ));
    }

    #[test]
    fn illegal_and_ambiguous() {
        let b = BoardState::initial();
        assert!(matches!(b.parse_san("e5"), Err(ChessError::IllegalMove(_))));
        assert!(matches!(b.parse_san("Qd3"), Err(ChessError::IllegalMove(_))));
        // Knights on b1 and f3 both reach d2.
        let b = board("4k3/8/8/8/8/5N2/8/1N2K3 w - - 0 1");
        assert!(matches!(b.parse_san("Nd2"), Err(ChessError::AmbiguousMove(_))));
        assert_eq!(b.parse_san("Nbd2").unwrap().from.to_string(), "b1");
    }

    #[test]
    fn format_adds_file_disambiguation() {
        let b = board("4k3/8/8/8/8/5N2/8/1N2K3 w - - 0 1");
        let m = b
            .legal_moves()
            .into_iter()
            .find(|m| m.from.to_string() == "b1" && m.to.to_string() == "d2")
            .unwrap();
        assert_eq!(b.format_san(&m).unwrap(), "Nbd2");
    }

    #[test]
    fn format_uses_rank_then_square_disambiguation() {
        let b = board("4k3/8/8/8/R7/8/8/R3K3 w - - 0 1");
        let m = b.parse_san("R1a2").unwrap();
        assert_eq!(m.san, "R1a2");
        let b = board("k7/8/8/8/8/2Q1Q3/8/2Q1K3 w - - 0 1");
        assert_eq!(b.parse_san("Qc3d2").unwrap().san, "Qc3d2");
    }

    #[test]
    fn mate_and_check_suffixes() {
        // Back-rank mate.
        let b = board("6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1");
        assert_eq!(b.parse_san("Ra8").unwrap().san, "Ra8#");
        assert!(b.parse_san("Ra8").unwrap().flags.mate);
        assert_eq!(b.parse_san("Ra8+").unwrap().san, "Ra8#");
        let b = board("6k1/8/8/8/8/8/8/R5K1 w - - 0 1");
        assert_eq!(b.parse_san("Ra8").unwrap().san, "Ra8+");
    }

    #[test]
    fn strips_annotation_glyphs() {
        let b = BoardState::initial();
        for (text, ann) in [
            ("e4!!", Annotation::Brilliant),
            ("e4!", Annotation::Good),
            ("e4!?", Annotation::Interesting),
            ("e4?!", Annotation::Dubious),
            ("e4?", Annotation::Mistake),
            ("e4??", Annotation::Blunder),
        ] {
            let (m, a) = b.parse_san_annotated(text).unwrap();
            assert_eq!(m.san, "e4");
            assert_eq!(a, Some(ann));
        }
    }

    #[test]
    fn castling_forms() {
        let b = board("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1");
        let short = b.parse_san("O-O").unwrap();
        assert!(short.flags.castle_kingside);
        assert_eq!(b.parse_san("0-0-0").unwrap().san, "O-O-O");
        let after = b.apply(&short).unwrap();
        assert_eq!(after.piece_at("g1".parse().unwrap()), Some(Piece::new(Color::White, PieceKind::King)));
        assert_eq!(after.piece_at("f1".parse().unwrap()), Some(Piece::new(Color::White, PieceKind::Rook)));
        assert!(!after.castling_rights().white_kingside);
        assert!(!after.castling_rights().white_queenside);
        assert!(after.castling_rights().black_kingside);
    }

    #[test]
    fn en_passant_removes_bypassed_pawn() {
        let b = BoardState::initial();
        let (_, b) = b.play_san("e4").unwrap();
        let (_, b) = b.play_san("a6").unwrap();
        let (_, b) = b.play_san("e5").unwrap();
        let (_, b) = b.play_san("d5").unwrap();
        assert_eq!(b.en_passant().map(|s| s.to_string()), Some("d6".into()));
        let (m, b) = b.play_san("exd6").unwrap();
        assert!(m.flags.en_passant);
        assert_eq!(m.capture_square().unwrap().to_string(), "d5");
        assert_eq!(b.piece_at("d5".parse().unwrap()), None);
        assert_eq!(b.piece_at("d6".parse().unwrap()), Some(Piece::new(Color::White, PieceKind::Pawn)));
    }

    #[test]
    fn e4_e5_position() {
        let (_, b) = BoardState::initial().play_san("e4").unwrap();
        let (_, b) = b.play_san("e5").unwrap();
        assert_eq!(b.side_to_move(), Color::White);
        assert_eq!(b.piece_at("e4".parse().unwrap()), Some(Piece::new(Color::White, PieceKind::Pawn)));
        assert_eq!(b.piece_at("e5".parse().unwrap()), Some(Piece::new(Color::Black, PieceKind::Pawn)));
        assert_eq!(b.to_fen(), "rnbqkbnr/pppp1ppp/8/4p3/4P3/8/PPPP1PPP/RNBQKBNR w KQkq e6 0 2");
    }

    #[test]
    fn promotion_forms() {
        let b = board("8/4P1k1/8/8/8/8/8/4K3 w - - 0 1");
        assert_eq!(b.parse_san("e8=Q").unwrap().san, "e8=Q");
        assert_eq!(b.parse_san("e8N").unwrap().san, "e8=N+");
        assert!(matches!(b.parse_san("e8"), Err(ChessError::IllegalMove(_))));
    }

    #[test]
    fn garbage_is_unparseable() {
        let b = BoardState::initial();
        for t in ["", "x", "Nf", "hello", "Zf3", "e4e5e6", "Pe4", "exd"] {
            assert!(matches!(b.parse_san(t), Err(ChessError::UnparseableSan(_))), "{t}");
        }
    }
}
