use crate::board::BoardState;
use crate::types::{Color, Piece, PieceKind, Square};

pub(crate) const KNIGHT_STEPS: [(i8, i8); 8] = [
    (1, 2),
    (2, 1),
    (2, -1),
    (1, -2),
    (-1, -2),
    (-2, -1),
    (-2, 1),
    (-1, 2),
];
pub(crate) const KING_STEPS: [(i8, i8); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];
pub(crate) const ROOK_DIRS: [(i8, i8); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
pub(crate) const BISHOP_DIRS: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Special {
    None,
    DoublePush,
    EnPassant,
    CastleKingside,
    CastleQueenside,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) struct RawMove {
    pub from: Square,
    pub to: Square,
    pub promotion: Option<PieceKind>,
    pub special: Special,
}

impl RawMove {
    fn new(from: Square, to: Square) -> RawMove {
        RawMove {
            from,
            to,
            promotion: None,
            special: Special::None,
        }
    }
}

impl BoardState {
    /// Whether any piece of `by` attacks `sq` (pseudo-legally; pins ignored).
    pub fn is_attacked(&self, sq: Square, by: Color) -> bool {
        let holds = |s: Option<Square>, kind: PieceKind| {
            s.and_then(|s| self.piece_at(s)) == Some(Piece::new(by, kind))
        };
        // A pawn of `by` attacks sq from one rank behind, in its own direction.
        let back = -by.forward();
        if holds(sq.offset(-1, back), PieceKind::Pawn) || holds(sq.offset(1, back), PieceKind::Pawn) {
            return true;
        }
        if KNIGHT_STEPS.iter().any(|&(df, dr)| holds(sq.offset(df, dr), PieceKind::Knight)) {
            return true;
        }
        if KING_STEPS.iter().any(|&(df, dr)| holds(sq.offset(df, dr), PieceKind::King)) {
            return true;
        }
        let slider_hit = |dirs: &[(i8, i8)], kinds: [PieceKind; 2]| {
            dirs.iter().any(|&(df, dr)| {
                let mut cur = sq;
                while let Some(next) = cur.offset(df, dr) {
                    if let Some(p) = self.piece_at(next) {
                        return p.color == by && kinds.contains(&p.kind);
                    }
                    cur = next;
                }
                false
            })
        };
        slider_hit(&ROOK_DIRS, [PieceKind::Rook, PieceKind::Queen])
            || slider_hit(&BISHOP_DIRS, [PieceKind::Bishop, PieceKind::Queen])
    }

    /// Squares the piece on `from` could capture on if an enemy stood there.
    /// Sliders stop at (and include) the first occupied square.
    pub fn attack_squares(&self, from: Square) -> Vec<Square> {
        let Some(piece) = self.piece_at(from) else {
            return Vec::new();
        };
        let steps = |steps: &[(i8, i8)]| -> Vec<Square> {
            steps.iter().filter_map(|&(df, dr)| from.offset(df, dr)).collect()
        };
        let rays = |dirs: &[(i8, i8)]| -> Vec<Square> {
            let mut out = Vec::new();
            for &(df, dr) in dirs {
                let mut cur = from;
                while let Some(next) = cur.offset(df, dr) {
                    out.push(next);
                    if self.piece_at(next).is_some() {
                        break;
                    }
                    cur = next;
                }
            }
            out
        };
        match piece.kind {
            PieceKind::Pawn => {
                let fwd = piece.color.forward();
                [from.offset(-1, fwd), from.offset(1, fwd)].into_iter().flatten().collect()
            }
            PieceKind::Knight => steps(&KNIGHT_STEPS),
            PieceKind::King => steps(&KING_STEPS),
            PieceKind::Bishop => rays(&BISHOP_DIRS),
            PieceKind::Rook => rays(&ROOK_DIRS),
            PieceKind::Queen => {
                let mut v = rays(&ROOK_DIRS);
                v.extend(rays(&BISHOP_DIRS));
                v
            }
        }
    }

    pub(crate) fn pseudo_moves(&self) -> Vec<RawMove> {
        let us = self.side_to_move;
        let mut out = Vec::with_capacity(48);
        for (from, piece) in self.pieces() {
            if piece.color != us {
                continue;
            }
            match piece.kind {
                PieceKind::Pawn => self.pawn_moves(from, &mut out),
                PieceKind::King => {
                    self.step_moves(from, &KING_STEPS, &mut out);
                    self.castle_moves(from, &mut out);
                }
                PieceKind::Knight => self.step_moves(from, &KNIGHT_STEPS, &mut out),
                PieceKind::Bishop => self.slide_moves(from, &BISHOP_DIRS, &mut out),
                PieceKind::Rook => self.slide_moves(from, &ROOK_DIRS, &mut out),
                PieceKind::Queen => {
                    self.slide_moves(from, &ROOK_DIRS, &mut out);
                    self.slide_moves(from, &BISHOP_DIRS, &mut out);
                }
            }
        }
        out
    }

    fn step_moves(&self, from: Square, steps: &[(i8, i8)], out: &mut Vec<RawMove>) {
        for &(df, dr) in steps {
            if let Some(to) = from.offset(df, dr) {
                if self.piece_at(to).is_none_or(|p| p.color != self.side_to_move) {
                    out.push(RawMove::new(from, to));
                }
            }
        }
    }

    fn slide_moves(&self, from: Square, dirs: &[(i8, i8)], out: &mut Vec<RawMove>) {
        for &(df, dr) in dirs {
            let mut cur = from;
            while let Some(to) = cur.offset(df, dr) {
                match self.piece_at(to) {
                    None => out.push(RawMove::new(from, to)),
                    Some(p) => {
                        if p.color != self.side_to_move {
                            out.push(RawMove::new(from, to));
                        }
                        break;
                    }
                }
                cur = to;
            }
        }
    }

    fn pawn_moves(&self, from: Square, out: &mut Vec<RawMove>) {
        let us = self.side_to_move;
        let fwd = us.forward();
        let last_rank = if us == Color::White { 7 } else { 0 };
        let start_rank = if us == Color::White { 1 } else { 6 };
        let mut push = |to: Square, special: Special| {
            if to.rank() == last_rank {
                for kind in PieceKind::PROMOTIONS {
                    out.push(RawMove {
                        from,
                        to,
                        promotion: Some(kind),
                        special,
                    });
                }
            } else {
                out.push(RawMove {
                    from,
                    to,
                    promotion: None,
                    special,
                });
            }
        };
        if let Some(one) = from.offset(0, fwd) {
            if self.piece_at(one).is_none() {
                push(one, Special::None);
                if from.rank() == start_rank {
                    if let Some(two) = one.offset(0, fwd) {
                        if self.piece_at(two).is_none() {
                            push(two, Special::DoublePush);
                        }
                    }
                }
            }
        }
        for df in [-1, 1] {
            if let Some(to) = from.offset(df, fwd) {
                match self.piece_at(to) {
                    Some(p) if p.color != us => push(to, Special::None),
                    None if self.en_passant == Some(to) => push(to, Special::EnPassant),
                    _ => {}
                }
            }
        }
    }

    fn castle_moves(&self, from: Square, out: &mut Vec<RawMove>) {
        let us = self.side_to_move;
        let home_rank = if us == Color::White { 0 } else { 7 };
        if from != Square::new(4, home_rank).unwrap() {
            return;
        }
        let them = us.opposite();
        let rook = Some(Piece::new(us, PieceKind::Rook));
        let sq = |f: u8| Square::new(f, home_rank).unwrap();
        let empty = |files: &[u8]| files.iter().all(|&f| self.piece_at(sq(f)).is_none());
        let safe = |files: &[u8]| files.iter().all(|&f| !self.is_attacked(sq(f), them));

        if self.castling.kingside(us) && self.piece_at(sq(7)) == rook && empty(&[5, 6]) && safe(&[4, 5, 6]) {
            out.push(RawMove {
                from,
                to: sq(6),
                promotion: None,
                special: Special::CastleKingside,
            });
        }
        if self.castling.queenside(us) && self.piece_at(sq(0)) == rook && empty(&[1, 2, 3]) && safe(&[4, 3, 2]) {
            out.push(RawMove {
                from,
                to: sq(2),
                promotion: None,
                special: Special::CastleQueenside,
            });
        }
    }

    /// Plays a pseudo-legal move without checking legality.
    pub(crate) fn make(&self, m: &RawMove) -> BoardState {
        let mut next = self.clone();
        let us = self.side_to_move;
        let piece = self.squares[m.from.index()].expect("move starts on a piece");
        let mut captured = self.squares[m.to.index()].is_some();

        next.squares[m.from.index()] = None;
        next.squares[m.to.index()] = Some(match m.promotion {
            Some(kind) => Piece::new(us, kind),
            None => piece,
        });

        match m.special {
            Special::EnPassant => {
                let victim = Square::new(m.to.file(), m.from.rank()).unwrap();
                next.squares[victim.index()] = None;
                captured = true;
            }
            Special::CastleKingside | Special::CastleQueenside => {
                let rank = m.from.rank();
                let (rook_from, rook_to) = if m.special == Special::CastleKingside { (7, 5) } else { (0, 3) };
                let rf = Square::new(rook_from, rank).unwrap();
                let rt = Square::new(rook_to, rank).unwrap();
                next.squares[rt.index()] = next.squares[rf.index()].take();
            }
            _ => {}
        }

        if piece.kind == PieceKind::King {
            next.kings[us as usize] = m.to;
        }
        next.castling.touch(m.from);
        next.castling.touch(m.to);
        next.en_passant = match m.special {
            Special::DoublePush => m.from.offset(0, us.forward()),
            _ => None,
        };
        next.halfmove_clock = if piece.kind == PieceKind::Pawn || captured {
            0
        } else {
            self.halfmove_clock + 1
        };
        if us == Color::Black {
            next.fullmove_number += 1;
        }
        next.side_to_move = us.opposite();
        next
    }

    fn leaves_king_safe(&self, m: &RawMove) -> bool {
        let after = self.make(m);
        let us = self.side_to_move;
        !after.is_attacked(after.king_square(us), us.opposite())
    }

    pub(crate) fn legal_raw(&self) -> Vec<RawMove> {
        self.pseudo_moves()
            .into_iter()
            .filter(|m| self.leaves_king_safe(m))
            .collect()
    }

    pub fn has_legal_move(&self) -> bool {
        self.pseudo_moves().iter().any(|m| self.leaves_king_safe(m))
    }

    pub fn is_checkmate(&self) -> bool {
        self.is_check() && !self.has_legal_move()
    }

    pub fn is_stalemate(&self) -> bool {
        !self.is_check() && !self.has_legal_move()
    }

    /// Number of leaf nodes of the legal move tree at `depth`.
    pub fn perft(&self, depth: u32) -> u64 {
        if depth == 0 {
            return 1;
        }
        let moves = self.legal_raw();
        if depth == 1 {
            return moves.len() as u64;
        }
        moves.iter().map(|m| self.make(m).perft(depth - 1)).sum()
    }
}
