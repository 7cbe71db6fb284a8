//! PGN import and export.
//!
//! Comments are kept per ply since they carry the commentary text. NAGs and
//! variations are not interpreted, only preserved as raw text.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::BoardState;
use crate::moves::{Annotation, MoveRecord};
use crate::types::Color;
use crate::ChessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum GameResult {
    #[serde(rename = "1-0")]
    WhiteWins,
    #[serde(rename = "0-1")]
    BlackWins,
    #[serde(rename = "1/2-1/2")]
    Draw,
    #[default]
    #[serde(rename = "*")]
    Unknown,
}

impl GameResult {
    pub fn as_str(self) -> &'static str {
        match self {
            GameResult::WhiteWins => "1-0",
            GameResult::BlackWins => "0-1",
            GameResult::Draw => "1/2-1/2",
            GameResult::Unknown => "*",
        }
    }
}

impl fmt::Display for GameResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GameResult {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1-0" => Ok(GameResult::WhiteWins),
            "0-1" => Ok(GameResult::BlackWins),
            "1/2-1/2" => Ok(GameResult::Draw),
            "*" => Ok(GameResult::Unknown),
            _ => Err(()),
        }
    }
}

/// Non-move material attached to one ply.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PlyNotes {
    pub annotation: Option<Annotation>,
    pub nags: Vec<String>,
    pub comments: Vec<String>,
    pub variations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRecord {
    pub headers: Vec<(String, String)>,
    pub initial: BoardState,
    pub plies: Vec<MoveRecord>,
    /// Parallel to `plies`.
    pub notes: Vec<PlyNotes>,
    /// Comments before the first move.
    pub leading_comments: Vec<String>,
    pub result: GameResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PgnError {
    #[error("PGN syntax error at line {line}, column {column}: {reason}")]
    Syntax { line: usize, column: usize, reason: String },
    #[error("illegal move {san:?} at ply {ply}: {source}")]
    IllegalMove {
        /// 1-based ply index within the game.
        ply: usize,
        san: String,
        source: ChessError,
    },
    #[error("invalid FEN header: {0}")]
    Fen(ChessError),
}

impl GameRecord {
    pub fn new(initial: BoardState) -> GameRecord {
        GameRecord {
            headers: Vec::new(),
            initial,
            plies: Vec::new(),
            notes: Vec::new(),
            leading_comments: Vec::new(),
            result: GameResult::Unknown,
        }
    }

    /// Builds a game by playing SAN moves from `initial`.
    pub fn from_san_moves<S: AsRef<str>>(initial: BoardState, moves: &[S]) -> Result<GameRecord, PgnError> {
        let mut game = GameRecord::new(initial);
        let mut board = game.initial.clone();
        for (i, san) in moves.iter().enumerate() {
            let san = san.as_ref();
            let (mv, next) = board.play_san(san).map_err(|source| PgnError::IllegalMove {
                ply: i + 1,
                san: san.to_string(),
                source,
            })?;
            game.plies.push(mv);
            game.notes.push(PlyNotes::default());
            board = next;
        }
        Ok(game)
    }

    pub fn header(&self, key: &str) -> Option<&str> {
        self.headers.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Appends a ply, checking legality against the current final position.
    pub fn push(&mut self, mv: MoveRecord) -> Result<(), ChessError> {
        self.final_position()?.apply(&mv)?;
        self.plies.push(mv);
        self.notes.push(PlyNotes::default());
        Ok(())
    }

    /// Position after every ply, starting with `initial`.
    pub fn positions(&self) -> Result<Vec<BoardState>, ChessError> {
        let mut out = Vec::with_capacity(self.plies.len() + 1);
        let mut board = self.initial.clone();
        out.push(board.clone());
        for mv in &self.plies {
            board = board.apply(mv)?;
            out.push(board.clone());
        }
        Ok(out)
    }

    pub fn final_position(&self) -> Result<BoardState, ChessError> {
        let mut board = self.initial.clone();
        for mv in &self.plies {
            board = board.apply(mv)?;
        }
        Ok(board)
    }

    /// The game truncated to its first `plies` moves.
    pub fn prefix(&self, plies: usize) -> GameRecord {
        let n = plies.min(self.plies.len());
        GameRecord {
            headers: self.headers.clone(),
            initial: self.initial.clone(),
            plies: self.plies[..n].to_vec(),
            notes: self.notes[..n].to_vec(),
            leading_comments: self.leading_comments.clone(),
            result: GameResult::Unknown,
        }
    }

    /// Numbered SAN history, e.g. `1. e4 e5 2. Nf3`.
    pub fn movetext(&self) -> String {
        let mut parts = Vec::with_capacity(self.plies.len() * 3 / 2);
        let mut number = self.initial.fullmove_number();
        let mut side = self.initial.side_to_move();
        for (i, mv) in self.plies.iter().enumerate() {
            match side {
                Color::White => parts.push(format!("{number}.")),
                Color::Black if i == 0 => parts.push(format!("{number}...")),
                Color::Black => {}
            }
            parts.push(mv.san.clone());
            if side == Color::Black {
                number += 1;
            }
            side = side.opposite();
        }
        parts.join(" ")
    }

    /// Full PGN export: headers, movetext with notes, result.
    pub fn to_pgn(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.headers {
            let v = v.replace('\\', "\\\\").replace('"', "\\\"");
            out.push_str(&format!("[{k} \"{v}\"]\n"));
        }
        if !self.headers.is_empty() {
            out.push('\n');
        }

        let mut tokens: Vec<String> = self.leading_comments.iter().map(|c| format!("{{{c}}}")).collect();
        let mut number = self.initial.fullmove_number();
        let mut side = self.initial.side_to_move();
        let mut need_number = true;
        for (mv, notes) in self.plies.iter().zip(&self.notes) {
            if side == Color::White {
                tokens.push(format!("{number}."));
            } else if need_number {
                tokens.push(format!("{number}..."));
            }
            let mut san = mv.san.clone();
            if let Some(a) = notes.annotation {
                san.push_str(a.glyph());
            }
            tokens.push(san);
            tokens.extend(notes.nags.iter().cloned());
            tokens.extend(notes.comments.iter().map(|c| format!("{{{c}}}")));
            tokens.extend(notes.variations.iter().map(|v| format!("({v})")));
            // After a comment or variation the next black move needs its number again.
            need_number = !notes.comments.is_empty() || !notes.variations.is_empty();
            if side == Color::Black {
                number += 1;
            }
            side = side.opposite();
        }
        tokens.push(self.result.to_string());

        let mut line_len = 0;
        for tok in tokens {
            if line_len > 0 && line_len + 1 + tok.len() > 79 {
                out.push('\n');
                line_len = 0;
            } else if line_len > 0 {
                out.push(' ');
                line_len += 1;
            }
            line_len += tok.len();
            out.push_str(&tok);
        }
        out.push('\n');
        out
    }

    /// Comments paired with the 0-based index of the ply they follow.
    pub fn commentaries(&self) -> Vec<(usize, &str)> {
        self.notes
            .iter()
            .enumerate()
            .flat_map(|(i, n)| n.comments.iter().map(move |c| (i, c.as_str())))
            .collect()
    }
}

/// Parses the first game in `text`.
pub fn parse_pgn(text: &str) -> Result<GameRecord, PgnError> {
    let mut parser = Parser::new(text);
    parser.skip_space();
    if parser.at_end() {
        return Err(parser.syntax("no game found"));
    }
    parser.game()
}

/// Parses every game in `text`.
pub fn parse_pgn_all(text: &str) -> Result<Vec<GameRecord>, PgnError> {
    let mut parser = Parser::new(text);
    let mut games = Vec::new();
    loop {
        parser.skip_space();
        if parser.at_end() {
            return Ok(games);
        }
        games.push(parser.game()?);
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

impl Parser {
    fn new(text: &str) -> Parser {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn syntax(&self, reason: impl Into<String>) -> PgnError {
        PgnError::Syntax {
            line: self.line,
            column: self.column,
            reason: reason.into(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    /// Skips whitespace and `%` escape lines.
    fn skip_space(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' && self.column == 1 {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn game(&mut self) -> Result<GameRecord, PgnError> {
        let headers = self.headers()?;
        let initial = match headers.iter().find(|(k, _)| k == "FEN") {
            Some((_, fen)) => BoardState::from_fen(fen).map_err(PgnError::Fen)?,
            None => BoardState::initial(),
        };
        let mut game = GameRecord::new(initial);
        game.headers = headers;
        let mut board = game.initial.clone();
        let mut result = None;

        loop {
            self.skip_space();
            let Some(c) = self.peek() else { break };
            match c {
                '[' => {
                    // Start of the next game's header section.
                    if game.plies.is_empty() && game.leading_comments.is_empty() {
                        return Err(self.syntax("header after movetext start"));
                    }
                    break;
                }
                '{' => {
                    self.bump();
                    let mut body = String::new();
                    loop {
                        match self.bump() {
                            Some('}') => break,
                            Some(c) => body.push(c),
                            None => return Err(self.syntax("unterminated comment")),
                        }
                    }
                    let body = collapse_ws(&body);
                    match game.notes.last_mut() {
                        Some(n) => n.comments.push(body),
                        None => game.leading_comments.push(body),
                    }
                }
                ';' => {
                    self.bump();
                    let mut body = String::new();
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        body.push(c);
                        self.bump();
                    }
                    let body = collapse_ws(&body);
                    match game.notes.last_mut() {
                        Some(n) => n.comments.push(body),
                        None => game.leading_comments.push(body),
                    }
                }
                '(' => {
                    let raw = self.variation()?;
                    match game.notes.last_mut() {
                        Some(n) => n.variations.push(raw),
                        None => return Err(self.syntax("variation before first move")),
                    }
                }
                ')' => return Err(self.syntax("unbalanced ')'")),
                '$' => {
                    let tok = self.word();
                    if tok.len() < 2 || !tok[1..].chars().all(|c| c.is_ascii_digit()) {
                        return Err(self.syntax(format!("bad NAG {tok:?}")));
                    }
                    match game.notes.last_mut() {
                        Some(n) => n.nags.push(tok),
                        None => return Err(self.syntax("NAG before first move")),
                    }
                }
                _ => {
                    let tok = self.word();
                    if tok.is_empty() {
                        return Err(self.syntax(format!("unexpected character {c:?}")));
                    }
                    if let Ok(r) = tok.parse::<GameResult>() {
                        result = Some(r);
                        break;
                    }
                    let san = strip_move_number(&tok);
                    if san.is_empty() {
                        continue;
                    }
                    if san.chars().next().is_some_and(|c| c.is_ascii_digit()) && !san.starts_with("0-0") {
                        return Err(self.syntax(format!("bad move number {tok:?}")));
                    }
                    let ply = game.plies.len() + 1;
                    let (mv, ann) = board.parse_san_annotated(san).map_err(|source| PgnError::IllegalMove {
                        ply,
                        san: san.to_string(),
                        source,
                    })?;
                    board = board.apply(&mv).expect("parsed moves are legal");
                    game.plies.push(mv);
                    game.notes.push(PlyNotes {
                        annotation: ann,
                        ..PlyNotes::default()
                    });
                }
            }
        }

        game.result = result
            .or_else(|| game.header("Result").and_then(|r| r.parse().ok()))
            .unwrap_or_default();
        Ok(game)
    }

    fn headers(&mut self) -> Result<Vec<(String, String)>, PgnError> {
        let mut headers = Vec::new();
        loop {
            self.skip_space();
            if self.peek() != Some('[') {
                return Ok(headers);
            }
            self.bump();
            self.skip_space();
            let mut key = String::new();
            while let Some(c) = self.peek() {
                if c.is_alphanumeric() || c == '_' {
                    key.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            if key.is_empty() {
                return Err(self.syntax("empty tag name"));
            }
            self.skip_space();
            if self.bump() != Some('"') {
                return Err(self.syntax("expected '\"' after tag name"));
            }
            let mut value = String::new();
            loop {
                match self.bump() {
                    Some('\\') => match self.bump() {
                        Some(c) => value.push(c),
                        None => return Err(self.syntax("unterminated tag value")),
                    },
                    Some('"') => break,
                    Some('\n') | None => return Err(self.syntax("unterminated tag value")),
                    Some(c) => value.push(c),
                }
            }
            self.skip_space();
            if self.bump() != Some(']') {
                return Err(self.syntax("expected ']' to close tag"));
            }
            headers.push((key, value));
        }
    }

    /// Reads a balanced `( ... )` group and returns its inner text.
    fn variation(&mut self) -> Result<String, PgnError> {
        self.bump();
        let mut depth = 1;
        let mut raw = String::new();
        let mut in_comment = false;
        loop {
            let c = self.bump().ok_or_else(|| self.syntax("unterminated variation"))?;
            match c {
                '{' if !in_comment => in_comment = true,
                '}' if in_comment => in_comment = false,
                '(' if !in_comment => depth += 1,
                ')' if !in_comment => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(collapse_ws(&raw));
                    }
                }
                _ => {}
            }
            raw.push(c);
        }
    }

    fn word(&mut self) -> String {
        let mut tok = String::new();
        while let Some(c) = self.peek() {
            if c.is_whitespace() || "{}();[]".contains(c) {
                break;
            }
            tok.push(c);
            self.bump();
        }
        tok
    }
}

/// Drops a leading `12.` or `12...` from a movetext token.
fn strip_move_number(tok: &str) -> &str {
    let digits = tok.chars().take_while(|c| c.is_ascii_digit()).count();
    if digits > 0 && tok[digits..].starts_with('.') {
        tok[digits..].trim_start_matches('.')
    } else {
        tok
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_plies_unknown_result() {
        let g = parse_pgn("1. e4 e5").unwrap();
        assert_eq!(g.plies.len(), 2);
        assert_eq!(g.result, GameResult::Unknown);
    }

    #[test]
    fn headers_and_result() {
        let text = "[Event \"Casual \\\"blitz\\\"\"]\n[Site \"?\"]\n\n1. e4 e5 2. Nf3 Nc6 1-0\n";
        let g = parse_pgn(text).unwrap();
        assert_eq!(g.result, GameResult::WhiteWins);
        assert_eq!(g.headers[0], ("Event".to_string(), "Casual \"blitz\"".to_string()));
        assert_eq!(g.headers[1].0, "Site");
        assert_eq!(g.plies.len(), 4);
    }

    #[test]
    fn illegal_second_ply() {
        match parse_pgn("1. e4 e4") {
            Err(PgnError::IllegalMove { ply, san, .. }) => {
                assert_eq!(ply, 2);
                assert_eq!(san, "e4");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn comments_nags_and_variations() {
        let text = "{Opening} 1. e4 {King pawn} e5 $1 (1... c5 {Sicilian} 2. Nf3) 2. Nf3!? ; a quiet move\n Nc6 *";
        let g = parse_pgn(text).unwrap();
        assert_eq!(g.leading_comments, ["Opening"]);
        assert_eq!(g.notes[0].comments, ["King pawn"]);
        assert_eq!(g.notes[1].nags, ["$1"]);
        assert_eq!(g.notes[1].variations, ["1... c5 {Sicilian} 2. Nf3"]);
        assert_eq!(g.notes[2].annotation, Some(Annotation::Interesting));
        assert_eq!(g.notes[2].comments, ["a quiet move"]);
        assert_eq!(g.commentaries(), vec![(0, "King pawn"), (2, "a quiet move")]);
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_pgn("1. e4 {never closed") {
            Err(PgnError::Syntax { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_pgn("[Event \"x\"\n1. e4"), Err(PgnError::Syntax { .. })));
        assert!(matches!(parse_pgn("1. e4 )"), Err(PgnError::Syntax { .. })));
        assert!(matches!(parse_pgn(""), Err(PgnError::Syntax { .. })));
    }

    #[test]
    fn fen_header_sets_start() {
        let text = "[SetUp \"1\"]\n[FEN \"4k3/8/8/8/8/8/4P3/4K3 b - - 0 7\"]\n\n7... Kd7 8. e4 *";
        let g = parse_pgn(text).unwrap();
        assert_eq!(g.plies.len(), 2);
        assert_eq!(g.movetext(), "7... Kd7 8. e4");
    }

    #[test]
    fn multiple_games() {
        let text = "[Event \"a\"]\n\n1. e4 1-0\n\n[Event \"b\"]\n\n1. d4 d5 0-1\n";
        let games = parse_pgn_all(text).unwrap();
        assert_eq!(games.len(), 2);
        assert_eq!(games[1].plies.len(), 2);
        assert_eq!(games[1].result, GameResult::BlackWins);
    }

    #[test]
    fn export_reimports() {
        let text = "[Event \"x\"]\n\n{Start} 1. e4 {King pawn} e5 $1 (1... c5) 2. Nf3!? Nc6 1/2-1/2";
        let g = parse_pgn(text).unwrap();
        let again = parse_pgn(&g.to_pgn()).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn glued_move_numbers() {
        let g = parse_pgn("1.e4 e5 2.Nf3 2...Nc6 *").unwrap();
        assert_eq!(g.movetext(), "1. e4 e5 2. Nf3 Nc6");
    }
}
