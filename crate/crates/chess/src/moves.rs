use std::fmt;

use serde::{Deserialize, Serialize};

use crate::board::BoardState;
use crate::movegen::{RawMove, Special};
use crate::types::{Piece, PieceKind, Square};
use crate::ChessError;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct MoveFlags {
    pub castle_kingside: bool,
    pub castle_queenside: bool,
    pub en_passant: bool,
    pub check: bool,
    pub mate: bool,
}

/// One ply, with enough context to render it without the board.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct MoveRecord {
    pub from: Square,
    pub to: Square,
    pub moving: Piece,
    pub capture: Option<Piece>,
    pub promotion: Option<PieceKind>,
    pub san: String,
    pub flags: MoveFlags,
}

impl MoveRecord {
    /// Long algebraic form used by UCI (`e2e4`, `e7e8q`, `e1g1`).
    pub fn uci(&self) -> String {
        let mut s = format!("{}{}", self.from, self.to);
        if let Some(kind) = self.promotion {
            s.push(kind.letter().to_ascii_lowercase());
        }
        s
    }

    pub fn is_capture(&self) -> bool {
        self.capture.is_some()
    }

    pub fn is_castle(&self) -> bool {
        self.flags.castle_kingside || self.flags.castle_queenside
    }

    /// Square of the captured piece (differs from `to` for en passant).
    pub fn capture_square(&self) -> Option<Square> {
        self.capture?;
        if self.flags.en_passant {
            Square::new(self.to.file(), self.from.rank())
        } else {
            Some(self.to)
        }
    }

    pub(crate) fn raw(&self) -> RawMove {
        let special = if self.flags.castle_kingside {
            Special::CastleKingside
        } else if self.flags.castle_queenside {
            Special::CastleQueenside
        } else if self.flags.en_passant {
            Special::EnPassant
        } else if self.moving.kind == PieceKind::Pawn && self.from.rank().abs_diff(self.to.rank()) == 2 {
            Special::DoublePush
        } else {
            Special::None
        };
        RawMove {
            from: self.from,
            to: self.to,
            promotion: self.promotion,
            special,
        }
    }
}

impl fmt::Display for MoveRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.san)
    }
}

/// Move-quality glyph that may trail a SAN token.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Annotation {
    /// `!!`
    Brilliant,
    /// `!`
    Good,
    /// `!?`
    Interesting,
    /// `?!`
    Dubious,
    /// `?`
    Mistake,
    /// `??`
    Blunder,
}

impl Annotation {
    /// Two-character glyphs come first so that matching is longest-first.
    pub const GLYPHS: [(&'static str, Annotation); 6] = [
        ("!!", Annotation::Brilliant),
        ("??", Annotation::Blunder),
        ("!?", Annotation::Interesting),
        ("?!", Annotation::Dubious),
        ("!", Annotation::Good),
        ("?", Annotation::Mistake),
    ];

    pub fn glyph(self) -> &'static str {
        Annotation::GLYPHS
            .iter()
            .find(|(_, a)| *a == self)
            .map(|(g, _)| *g)
            .unwrap()
    }

    /// Splits a trailing glyph off `text`, longest match first.
    pub fn strip_suffix(text: &str) -> (&str, Option<Annotation>) {
        for (glyph, ann) in Annotation::GLYPHS {
            if let Some(rest) = text.strip_suffix(glyph) {
                return (rest, Some(ann));
            }
        }
        (text, None)
    }

    /// Splits a leading glyph off `text`, longest match first.
    pub fn strip_prefix(text: &str) -> (Option<Annotation>, &str) {
        for (glyph, ann) in Annotation::GLYPHS {
            if let Some(rest) = text.strip_prefix(glyph) {
                return (Some(ann), rest);
            }
        }
        (None, text)
    }
}

impl BoardState {
    /// Every legal move, with SAN filled in.
    pub fn legal_moves(&self) -> Vec<MoveRecord> {
        let raws = self.legal_raw();
        raws.iter().map(|m| self.record_for(m, &raws)).collect()
    }

    /// Applies a legal move, returning the successor position.
    pub fn apply(&self, mv: &MoveRecord) -> Result<BoardState, ChessError> {
        let raw = mv.raw();
        let raws = self.legal_raw();
        if !raws.contains(&raw) {
            return Err(ChessError::IllegalMove(mv.san.clone()));
        }
        if self.record_for(&raw, &raws) != *mv {
            return Err(ChessError::IllegalMove(mv.san.clone()));
        }
        Ok(self.make(&raw))
    }

    /// Applies a SAN move. Shorthand for `parse_san` followed by `apply`.
    pub fn play_san(&self, san: &str) -> Result<(MoveRecord, BoardState), ChessError> {
        let mv = self.parse_san(san)?;
        let raw = mv.raw();
        Ok((mv, self.make(&raw)))
    }

    /// Resolves a UCI long-algebraic move (`e2e4`, `e7e8q`).
    pub fn parse_uci(&self, text: &str) -> Result<MoveRecord, ChessError> {
        let bad = || ChessError::IllegalMove(text.to_string());
        if !(4..=5).contains(&text.len()) || !text.is_ascii() {
            return Err(bad());
        }
        let from: Square = text[0..2].parse().map_err(|_| bad())?;
        let to: Square = text[2..4].parse().map_err(|_| bad())?;
        let promotion = match text.get(4..5) {
            Some(c) => Some(
                PieceKind::from_letter(c.chars().next().unwrap())
                    .filter(|k| PieceKind::PROMOTIONS.contains(k))
                    .ok_or_else(bad)?,
            ),
            None => None,
        };
        let raws = self.legal_raw();
        let raw = raws
            .iter()
            .find(|m| m.from == from && m.to == to && m.promotion == promotion)
            .ok_or_else(bad)?;
        Ok(self.record_for(raw, &raws))
    }

    pub(crate) fn record_for(&self, m: &RawMove, legal: &[RawMove]) -> MoveRecord {
        let moving = self.piece_at(m.from).expect("move starts on a piece");
        let capture = match m.special {
            Special::EnPassant => Some(Piece::new(moving.color.opposite(), PieceKind::Pawn)),
            _ => self.piece_at(m.to),
        };
        let after = self.make(m);
        let check = after.is_check();
        let mate = check && !after.has_legal_move();
        let flags = MoveFlags {
            castle_kingside: m.special == Special::CastleKingside,
            castle_queenside: m.special == Special::CastleQueenside,
            en_passant: m.special == Special::EnPassant,
            check,
            mate,
        };
        let san = self.san_text(m, moving, capture.is_some(), &flags, legal);
        MoveRecord {
            from: m.from,
            to: m.to,
            moving,
            capture,
            promotion: m.promotion,
            san,
            flags,
        }
    }

    fn san_text(&self, m: &RawMove, moving: Piece, capture: bool, flags: &MoveFlags, legal: &[RawMove]) -> String {
        let mut san = String::new();
        if flags.castle_kingside {
            san.push_str("O-O");
        } else if flags.castle_queenside {
            san.push_str("O-O-O");
        } else if moving.kind == PieceKind::Pawn {
            if capture {
                san.push(m.from.file_char());
                san.push('x');
            }
            san.push_str(&m.to.to_string());
            if let Some(kind) = m.promotion {
                san.push('=');
                san.push(kind.letter());
            }
        } else {
            san.push(moving.kind.letter());
            let rivals: Vec<&RawMove> = legal
                .iter()
                .filter(|o| {
                    o.to == m.to && o.from != m.from && self.piece_at(o.from).map(|p| p.kind) == Some(moving.kind)
                })
                .collect();
            if !rivals.is_empty() {
                let file_unique = rivals.iter().all(|o| o.from.file() != m.from.file());
                let rank_unique = rivals.iter().all(|o| o.from.rank() != m.from.rank());
                if file_unique {
                    san.push(m.from.file_char());
                } else if rank_unique {
                    san.push(m.from.rank_char());
                } else {
                    san.push_str(&m.from.to_string());
                }
            }
            if capture {
                san.push('x');
            }
            san.push_str(&m.to.to_string());
        }
        if flags.mate {
            san.push('#');
        } else if flags.check {
            san.push('+');
        }
        san
    }
}
