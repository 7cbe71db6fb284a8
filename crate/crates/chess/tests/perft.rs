//! Move generator checked against shakmaty, an independent implementation,
//! and against the widely published perft tables.

use chesstag_chess::BoardState;
use shakmaty::fen::Fen;
use shakmaty::{CastlingMode, Chess};

fn oracle_perft(fen: &str, depth: u32) -> u64 {
    let pos: Chess = Fen::from_ascii(fen.as_bytes())
        .unwrap()
        .into_position(CastlingMode::Standard)
        .unwrap();
    shakmaty::perft(&pos, depth)
}

#[test]
fn initial_position_perft_1_to_3() {
    let board = BoardState::initial();
    let fen = board.to_fen();
    for (depth, expected) in [(1, 20), (2, 400), (3, 8902)] {
        assert_eq!(oracle_perft(&fen, depth), expected);
        assert_eq!(board.perft(depth), expected, "depth {depth}");
    }
}

const MIDGAME: [(&str, [u64; 3]); 5] = [
    (
        "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1",
        [48, 2039, 97862],
    ),
    ("8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1", [14, 191, 2812]),
    (
        "r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1",
        [6, 264, 9467],
    ),
    (
        "rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8",
        [44, 1486, 62379],
    ),
    (
        "r4rk1/1pp1qppp/p1np1n2/2b1p1B1/2B1P1b1/P1NP1N2/1PP1QPPP/R4RK1 w - - 0 10",
        [46, 2079, 89890],
    ),
];

#[test]
fn midgame_perft_matches_oracle() {
    for (fen, expected) in MIDGAME {
        let board = BoardState::from_fen(fen).unwrap();
        for depth in 1..=3 {
            let oracle = oracle_perft(fen, depth);
            assert_eq!(oracle, expected[depth as usize - 1], "published table, {fen}");
            assert_eq!(board.perft(depth), oracle, "{fen} depth {depth}");
        }
    }
}

#[test]
fn legal_move_sets_match_oracle_on_random_positions() {
    use shakmaty::Position;
    for board in common::random_positions(300, 11) {
        let fen = board.to_fen();
        let pos: Chess = Fen::from_ascii(fen.as_bytes())
            .unwrap()
            .into_position(CastlingMode::Standard)
            .unwrap();
        let mut ours: Vec<String> = board.legal_moves().into_iter().map(|m| m.san).collect();
        let mut theirs: Vec<String> = pos
            .legal_moves()
            .iter()
            .map(|m| shakmaty::san::SanPlus::from_move(pos.clone(), *m).to_string())
            .collect();
        ours.sort();
        theirs.sort();
        assert_eq!(ours, theirs, "{fen}");
    }
}

mod common;
