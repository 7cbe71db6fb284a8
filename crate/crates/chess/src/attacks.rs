use serde::{Deserialize, Serialize};

use crate::board::BoardState;
use crate::movegen::{RawMove, Special};
use crate::types::{Piece, PieceKind, Square};

/// Which captures count as attacks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackMode {
    /// Any pseudo-legal capture, pinned attackers included.
    #[default]
    PseudoLegal,
    /// Only captures that would not leave the attacker's own king in check.
    Strict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttackRelation {
    pub attacker: (Piece, Square),
    pub target: (Piece, Square),
}

impl BoardState {
    /// Every (attacker, target) pair of opposite colors, ordered by attacker
    /// square then target square, both file-major.
    pub fn attack_relations(&self) -> Vec<AttackRelation> {
        self.attack_relations_with(AttackMode::PseudoLegal)
    }

    pub fn attack_relations_with(&self, mode: AttackMode) -> Vec<AttackRelation> {
        let mut out = Vec::new();
        for from in Square::all_file_major() {
            let Some(attacker) = self.piece_at(from) else {
                continue;
            };
            let mut targets: Vec<(Square, Piece)> = self
                .attack_squares(from)
                .into_iter()
                .filter_map(|sq| self.piece_at(sq).map(|p| (sq, p)))
                .filter(|(_, p)| p.color != attacker.color)
                .collect();
            targets.sort_by_key(|(sq, _)| sq.file_major_key());
            for (to, target) in targets {
                if mode == AttackMode::Strict && !self.capture_keeps_king_safe(from, to) {
                    continue;
                }
                out.push(AttackRelation {
                    attacker: (attacker, from),
                    target: (target, to),
                });
            }
        }
        out
    }

    /// Whether capturing on `to` with the piece on `from` keeps that side's
    /// king out of check, regardless of whose turn it is.
    fn capture_keeps_king_safe(&self, from: Square, to: Square) -> bool {
        let attacker = self.piece_at(from).expect("attacker present");
        let mut view = self.clone();
        view.side_to_move = attacker.color;
        view.en_passant = None;
        let promotion = (attacker.kind == PieceKind::Pawn && (to.rank() == 0 || to.rank() == 7))
            .then_some(PieceKind::Queen);
        let after = view.make(&RawMove {
            from,
            to,
            promotion,
            special: Special::None,
        });
        !after.is_attacked(after.king_square(attacker.color), attacker.color.opposite())
    }
}
