use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::types::{Color, Piece, PieceKind, Square};
use crate::ChessError;

pub const INITIAL_FEN: &str = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct CastlingRights {
    pub white_kingside: bool,
    pub white_queenside: bool,
    pub black_kingside: bool,
    pub black_queenside: bool,
}

impl CastlingRights {
    pub const ALL: CastlingRights = CastlingRights {
        white_kingside: true,
        white_queenside: true,
        black_kingside: true,
        black_queenside: true,
    };

    pub fn kingside(&self, color: Color) -> bool {
        match color {
            Color::White => self.white_kingside,
            Color::Black => self.black_kingside,
        }
    }

    pub fn queenside(&self, color: Color) -> bool {
        match color {
            Color::White => self.white_queenside,
            Color::Black => self.black_queenside,
        }
    }

    pub(crate) fn clear_color(&mut self, color: Color) {
        match color {
            Color::White => {
                self.white_kingside = false;
                self.white_queenside = false;
            }
            Color::Black => {
                self.black_kingside = false;
                self.black_queenside = false;
            }
        }
    }

    /// Drops any right tied to a rook or king home square that was touched.
    pub(crate) fn touch(&mut self, sq: Square) {
        match sq.index() {
            4 => self.clear_color(Color::White),
            60 => self.clear_color(Color::Black),
            7 => self.white_kingside = false,
            0 => self.white_queenside = false,
            63 => self.black_kingside = false,
            56 => self.black_queenside = false,
            _ => {}
        }
    }

    fn to_fen(self) -> String {
        let mut s = String::new();
        if self.white_kingside {
            s.push('K');
        }
        if self.white_queenside {
            s.push('Q');
        }
        if self.black_kingside {
            s.push('k');
        }
        if self.black_queenside {
            s.push('q');
        }
        if s.is_empty() {
            s.push('-');
        }
        s
    }
}

/// A complete chess position. Values are immutable once built: every
/// transition goes through [`BoardState::apply`](crate::BoardState::apply)
/// and yields a new value.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoardState {
    pub(crate) squares: [Option<Piece>; 64],
    pub(crate) side_to_move: Color,
    pub(crate) castling: CastlingRights,
    pub(crate) en_passant: Option<Square>,
    pub(crate) halfmove_clock: u32,
    pub(crate) fullmove_number: u32,
    /// Cached king squares, indexed White then Black.
    pub(crate) kings: [Square; 2],
}

impl BoardState {
    pub fn initial() -> BoardState {
        BoardState::from_fen(INITIAL_FEN).expect("initial FEN is valid")
    }

    /// Builds a position from parts and checks every position invariant.
    pub fn from_parts(
        placement: impl IntoIterator<Item = (Square, Piece)>,
        side_to_move: Color,
        castling: CastlingRights,
        en_passant: Option<Square>,
        halfmove_clock: u32,
        fullmove_number: u32,
    ) -> Result<BoardState, ChessError> {
        let mut squares = [None; 64];
        for (sq, piece) in placement {
            squares[sq.index()] = Some(piece);
        }
        let mut kings = [None, None];
        for color in Color::ALL {
            let king = Piece::new(color, PieceKind::King);
            let mut found = squares.iter().enumerate().filter(|(_, p)| **p == Some(king));
            match (found.next(), found.next()) {
                (Some((i, _)), None) => kings[color as usize] = Square::from_index(i),
                (None, _) => return Err(ChessError::InvalidPosition(format!("{color} has no king"))),
                _ => return Err(ChessError::InvalidPosition(format!("{color} has more than one king"))),
            }
        }
        let board = BoardState {
            squares,
            side_to_move,
            castling,
            en_passant,
            halfmove_clock,
            fullmove_number,
            kings: [kings[0].unwrap(), kings[1].unwrap()],
        };
        board.validate()?;
        Ok(board)
    }

    pub fn from_fen(fen: &str) -> Result<BoardState, ChessError> {
        let bad = |why: &str| ChessError::InvalidFen(format!("{why}: {fen:?}"));
        let fields: Vec<&str> = fen.split_whitespace().collect();
        if fields.len() != 6 && fields.len() != 4 {
            return Err(bad("expected 6 fields"));
        }

        let rows: Vec<&str> = fields[0].split('/').collect();
        if rows.len() != 8 {
            return Err(bad("placement needs 8 ranks"));
        }
        let mut placement = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            let rank = 7 - i as u8;
            let mut file = 0u8;
            for c in row.chars() {
                if let Some(d) = c.to_digit(10) {
                    if !(1..=8).contains(&d) {
                        return Err(bad("bad empty-square count"));
                    }
                    file += d as u8;
                } else {
                    let piece = Piece::from_fen_char(c).ok_or_else(|| bad("bad piece letter"))?;
                    let sq = Square::new(file, rank).ok_or_else(|| bad("rank overflows"))?;
                    placement.push((sq, piece));
                    file += 1;
                }
                if file > 8 {
                    return Err(bad("rank overflows"));
                }
            }
            if file != 8 {
                return Err(bad("rank does not cover 8 files"));
            }
        }

        let side = match fields[1] {
            "w" => Color::White,
            "b" => Color::Black,
            _ => return Err(bad("side to move must be w or b")),
        };

        let mut castling = CastlingRights::default();
        if fields[2] != "-" {
            for c in fields[2].chars() {
                match c {
                    'K' => castling.white_kingside = true,
                    'Q' => castling.white_queenside = true,
                    'k' => castling.black_kingside = true,
                    'q' => castling.black_queenside = true,
                    _ => return Err(bad("bad castling field")),
                }
            }
        }

        let en_passant = match fields[3] {
            "-" => None,
            s => Some(s.parse::<Square>().map_err(|_| bad("bad en-passant square"))?),
        };

        let (halfmove, fullmove) = if fields.len() == 6 {
            (
                fields[4].parse().map_err(|_| bad("bad halfmove clock"))?,
                fields[5].parse().map_err(|_| bad("bad fullmove number"))?,
            )
        } else {
            (0, 1)
        };

        let mut board = BoardState::from_parts(placement, side, castling, en_passant, halfmove, fullmove)
            .map_err(|e| ChessError::InvalidFen(format!("{e}: {fen:?}")))?;
        board.normalize_castling();
        Ok(board)
    }

    pub fn to_fen(&self) -> String {
        let mut placement = String::new();
        for rank in (0..8).rev() {
            let mut empty = 0;
            for file in 0..8 {
                match self.squares[rank * 8 + file] {
                    Some(p) => {
                        if empty > 0 {
                            placement.push_str(&empty.to_string());
                            empty = 0;
                        }
                        placement.push(p.fen_char());
                    }
                    None => empty += 1,
                }
            }
            if empty > 0 {
                placement.push_str(&empty.to_string());
            }
            if rank > 0 {
                placement.push('/');
            }
        }
        format!(
            "{} {} {} {} {} {}",
            placement,
            if self.side_to_move == Color::White { "w" } else { "b" },
            self.castling.to_fen(),
            self.en_passant.map_or_else(|| "-".to_string(), |s| s.to_string()),
            self.halfmove_clock,
            self.fullmove_number
        )
    }

    pub fn piece_at(&self, sq: Square) -> Option<Piece> {
        self.squares[sq.index()]
    }

    pub fn side_to_move(&self) -> Color {
        self.side_to_move
    }

    pub fn castling_rights(&self) -> CastlingRights {
        self.castling
    }

    pub fn en_passant(&self) -> Option<Square> {
        self.en_passant
    }

    pub fn halfmove_clock(&self) -> u32 {
        self.halfmove_clock
    }

    pub fn fullmove_number(&self) -> u32 {
        self.fullmove_number
    }

    /// Occupied squares with their pieces, in square index order.
    pub fn pieces(&self) -> impl Iterator<Item = (Square, Piece)> + '_ {
        Square::all().filter_map(|sq| self.squares[sq.index()].map(|p| (sq, p)))
    }

    /// Squares holding `piece`, in index order.
    pub fn squares_of(&self, piece: Piece) -> Vec<Square> {
        self.pieces().filter(|&(_, p)| p == piece).map(|(sq, _)| sq).collect()
    }

    pub fn king_square(&self, color: Color) -> Square {
        self.kings[color as usize]
    }

    pub fn is_check(&self) -> bool {
        self.is_attacked(self.king_square(self.side_to_move), self.side_to_move.opposite())
    }

    /// Checks every position invariant.
    pub fn validate(&self) -> Result<(), ChessError> {
        let bad = |why: String| Err(ChessError::InvalidPosition(why));
        for color in Color::ALL {
            let kings = self
                .pieces()
                .filter(|&(_, p)| p == Piece::new(color, PieceKind::King))
                .count();
            if kings != 1 {
                return bad(format!("{color} has {kings} kings"));
            }
        }
        for (sq, p) in self.pieces() {
            if p.kind == PieceKind::Pawn && (sq.rank() == 0 || sq.rank() == 7) {
                return bad(format!("pawn on back rank {sq}"));
            }
        }
        if let Some(ep) = self.en_passant {
            let expected_rank = match self.side_to_move {
                Color::White => 5,
                Color::Black => 2,
            };
            if ep.rank() != expected_rank {
                return bad(format!("en-passant square {ep} on wrong rank"));
            }
        }
        let waiting = self.side_to_move.opposite();
        if self.is_attacked(self.king_square(waiting), self.side_to_move) {
            return bad(format!("{waiting} is in check but not to move"));
        }
        Ok(())
    }

    /// FEN producers disagree on whether castling flags without the matching
    /// king and rook on their home squares are meaningful; drop them.
    fn normalize_castling(&mut self) {
        let has = |sq: &str, p: Piece| self.piece_at(sq.parse().unwrap()) == Some(p);
        let wk = Piece::new(Color::White, PieceKind::King);
        let wr = Piece::new(Color::White, PieceKind::Rook);
        let bk = Piece::new(Color::Black, PieceKind::King);
        let br = Piece::new(Color::Black, PieceKind::Rook);
        let mut c = self.castling;
        c.white_kingside &= has("e1", wk) && has("h1", wr);
        c.white_queenside &= has("e1", wk) && has("a1", wr);
        c.black_kingside &= has("e8", bk) && has("h8", br);
        c.black_queenside &= has("e8", bk) && has("a8", br);
        self.castling = c;
    }
}

impl Default for BoardState {
    fn default() -> Self {
        BoardState::initial()
    }
}

impl fmt::Debug for BoardState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoardState({})", self.to_fen())
    }
}

impl fmt::Display for BoardState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_fen())
    }
}

impl FromStr for BoardState {
    type Err = ChessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BoardState::from_fen(s)
    }
}

impl Serialize for BoardState {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_fen())
    }
}

impl<'de> Deserialize<'de> for BoardState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        BoardState::from_fen(&s).map_err(serde::de::Error::custom)
    }
}
