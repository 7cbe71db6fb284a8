//! UCI engine adapter: sessions, position evaluation and engine-derived
//! control tags.

mod transcript;
mod transport;
pub mod uci;
mod winprob;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use chesstag_chess::{BoardState, ChessError, MoveRecord};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tags::{CommentaryType, LengthTag, MoveQuality, SuggestedLine, TagSet};

pub use transcript::{Step, Transcript, TranscriptBuilder};
pub use transport::{ProcessTransport, TranscriptTransport, Transport};
pub use winprob::{
    classify_delta, logistic, score_to_winprob, QualityThresholds, Score, WinProbConfig, WinProbSource,
    DEFAULT_LOGISTIC_K,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("failed to start engine: {0}")]
    SpawnFailure(String),
    #[error("engine handshake timed out after {0:?}")]
    HandshakeTimeout(Duration),
    #[error("engine protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("engine process exited")]
    EngineCrashed,
    #[error("search timed out after {0:?}")]
    SearchTimeout(Duration),
    #[error("unparseable engine output: {0}")]
    UnparseableInfo(String),
    #[error("engine move {uci} is illegal in {fen}")]
    IllegalEngineMove { uci: String, fen: String },
    #[error("engine reported no move in {0}")]
    NoBestMove(String),
    #[error("invalid engine configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Chess(#[from] ChessError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineSource {
    Executable { path: PathBuf, args: Vec<String> },
    TranscriptFile(PathBuf),
    TranscriptText(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchBudget {
    Nodes(u64),
    Depth(u32),
}

impl SearchBudget {
    pub fn go_command(self) -> String {
        match self {
            SearchBudget::Nodes(n) => format!("go nodes {n}"),
            SearchBudget::Depth(d) => format!("go depth {d}"),
        }
    }

    fn is_positive(self) -> bool {
        match self {
            SearchBudget::Nodes(n) => n > 0,
            SearchBudget::Depth(d) => d > 0,
        }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget::Nodes(10_000)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub source: EngineSource,
    pub budget: SearchBudget,
    pub multipv: u32,
    pub winprob: WinProbConfig,
    pub thresholds: QualityThresholds,
    pub handshake_timeout: Duration,
    pub search_timeout: Duration,
}

impl EngineConfig {
    pub fn new(source: EngineSource) -> EngineConfig {
        EngineConfig {
            source,
            budget: SearchBudget::default(),
            multipv: 1,
            winprob: WinProbConfig::default(),
            thresholds: QualityThresholds::default(),
            handshake_timeout: Duration::from_secs(10),
            search_timeout: Duration::from_secs(60),
        }
    }

    pub fn transcript(text: &str) -> EngineConfig {
        EngineConfig::new(EngineSource::TranscriptText(text.to_string()))
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if !self.budget.is_positive() {
            return Err(EngineError::Config("search budget must be positive".into()));
        }
        if self.multipv == 0 {
            return Err(EngineError::Config("multipv must be at least 1".into()));
        }
        if !(self.winprob.k.is_finite() && self.winprob.k > 0.0) {
            return Err(EngineError::Config(format!("logistic scale must be positive, got {}", self.winprob.k)));
        }
        self.thresholds.validate().map_err(EngineError::Config)
    }
}

/// One principal variation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PvLine {
    pub moves: Vec<String>,
    pub score: Score,
    pub win_prob: f64,
}

/// Engine verdict on a position, from the side to move's point of view.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineEval {
    pub best_move: MoveRecord,
    pub win_prob: f64,
    pub pvs: Vec<PvLine>,
}

/// A ready engine. Commands are strictly sequential.
pub struct EngineSession {
    transport: Box<dyn Transport>,
    config: EngineConfig,
    name: Option<String>,
    wdl: bool,
}

pub fn open_session(config: EngineConfig) -> Result<EngineSession, EngineError> {
    config.validate()?;
    let transport: Box<dyn Transport> = match &config.source {
        EngineSource::Executable { path, args } => Box::new(ProcessTransport::spawn(path, args)?),
        EngineSource::TranscriptFile(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| EngineError::SpawnFailure(format!("{}: {e}", path.display())))?;
            Box::new(TranscriptTransport::new(Transcript::parse(&text).map_err(EngineError::SpawnFailure)?))
        }
        EngineSource::TranscriptText(text) => {
            Box::new(TranscriptTransport::new(Transcript::parse(text).map_err(EngineError::SpawnFailure)?))
        }
    };
    EngineSession::handshake(transport, config)
}

impl EngineSession {
    /// Runs the handshake over an already open transport.
    pub fn handshake(transport: Box<dyn Transport>, config: EngineConfig) -> Result<EngineSession, EngineError> {
        config.validate()?;
        let mut s = EngineSession {
            transport,
            config,
            name: None,
            wdl: false,
        };
        let timeout = s.config.handshake_timeout;
        s.transport.send("uci")?;
        let mut wdl_option = false;
        s.read_until(timeout, EngineError::HandshakeTimeout(timeout), |s, line| {
            if let Some(name) = line.strip_prefix("id name ") {
                s.name = Some(name.trim().to_string());
            } else if line.starts_with("option name UCI_ShowWDL ") {
                wdl_option = true;
            }
            line == "uciok"
        })?;
        s.transport.send(&format!("setoption name MultiPV value {}", s.config.multipv))?;
        if wdl_option && s.config.winprob.source != WinProbSource::CpLogistic {
            s.transport.send("setoption name UCI_ShowWDL value true")?;
            s.wdl = true;
        }
        s.sync(timeout, EngineError::HandshakeTimeout(timeout))?;
        Ok(s)
    }

    pub fn engine_name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    /// Whether the engine was asked to report win/draw/loss.
    pub fn wdl_enabled(&self) -> bool {
        self.wdl
    }

    fn read_until(
        &mut self,
        timeout: Duration,
        on_timeout: EngineError,
        mut done: impl FnMut(&mut Self, &str) -> bool,
    ) -> Result<(), EngineError> {
        let deadline = Instant::now() + timeout;
        loop {
            let left = deadline.saturating_duration_since(Instant::now());
            match self.transport.recv(left)? {
                Some(line) => {
                    if done(self, line.trim()) {
                        return Ok(());
                    }
                }
                None => return Err(on_timeout),
            }
        }
    }

    fn sync(&mut self, timeout: Duration, on_timeout: EngineError) -> Result<(), EngineError> {
        self.transport.send("isready")?;
        self.read_until(timeout, on_timeout, |_, line| line == "readyok")
    }

    /// `ucinewgame` followed by a readiness check.
    pub fn new_game(&mut self) -> Result<(), EngineError> {
        self.transport.send("ucinewgame")?;
        let t = self.config.handshake_timeout;
        self.sync(t, EngineError::HandshakeTimeout(t))
    }

    pub fn evaluate(&mut self, board: &BoardState) -> Result<EngineEval, EngineError> {
        let (multipv, budget) = (self.config.multipv, self.config.budget);
        self.evaluate_with(board, multipv, budget)
    }

    /// Searches `board` and converts the final info line of each PV.
    pub fn evaluate_with(&mut self, board: &BoardState, multipv: u32, budget: SearchBudget) -> Result<EngineEval, EngineError> {
        if multipv != self.config.multipv {
            self.transport.send(&format!("setoption name MultiPV value {multipv}"))?;
            self.config.multipv = multipv;
        }
        self.transport.send(&format!("position fen {}", board.to_fen()))?;
        self.transport.send(&budget.go_command())?;

        let timeout = self.config.search_timeout;
        let mut latest: Vec<Option<uci::InfoLine>> = vec![None; multipv as usize];
        let mut best: Option<Option<String>> = None;
        let mut failure = None;
        let read = self.read_until(timeout, EngineError::SearchTimeout(timeout), |_, line| {
            if let Some(bm) = uci::parse_bestmove(line) {
                best = Some(bm);
                return true;
            }
            match uci::parse_info(line) {
                Ok(Some(info)) if info.score.is_some() && !info.pv.is_empty() => {
                    if let Some(slot) = latest.get_mut(info.multipv as usize - 1) {
                        *slot = Some(info);
                    }
                }
                Ok(_) => {}
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
            false
        });
        if let Err(e) = read {
            if matches!(e, EngineError::SearchTimeout(_)) {
                let _ = self.transport.send("stop");
            }
            return Err(e);
        }
        if let Some(e) = failure {
            return Err(e);
        }

        let best_uci = best
            .flatten()
            .ok_or_else(|| EngineError::NoBestMove(board.to_fen()))?;
        let best_move = board
            .parse_uci(&best_uci)
            .map_err(|_| EngineError::IllegalEngineMove {
                uci: best_uci.clone(),
                fen: board.to_fen(),
            })?;

        let mut pvs = Vec::new();
        for info in latest.into_iter().flatten() {
            let mut line = Vec::with_capacity(info.pv.len());
            let mut b = board.clone();
            for u in &info.pv {
                let mv = b.parse_uci(u).map_err(|_| EngineError::IllegalEngineMove {
                    uci: u.clone(),
                    fen: b.to_fen(),
                })?;
                b = b.apply(&mv)?;
                line.push(mv.san);
            }
            let score = self.pick_score(&info);
            pvs.push(PvLine {
                moves: line,
                score,
                win_prob: score_to_winprob(score, self.config.winprob.k),
            });
        }
        if pvs.is_empty() {
            // No scored info: the best move alone, evaluated as even.
            pvs.push(PvLine {
                moves: vec![best_move.san.clone()],
                score: Score::Cp(0),
                win_prob: 0.5,
            });
        }
        pvs.sort_by(|a, b| b.win_prob.total_cmp(&a.win_prob));
        if pvs[0].moves.first() != Some(&best_move.san) {
            return Err(EngineError::ProtocolViolation(format!(
                "bestmove {} disagrees with top line {:?}",
                best_move.san, pvs[0].moves
            )));
        }
        Ok(EngineEval {
            win_prob: pvs[0].win_prob,
            best_move,
            pvs,
        })
    }

    fn pick_score(&self, info: &uci::InfoLine) -> Score {
        let primary = info.score.expect("scored info");
        if matches!(primary, Score::Mate(_)) {
            return primary;
        }
        match (self.config.winprob.source, info.wdl) {
            (WinProbSource::Auto | WinProbSource::EngineWdl, Some(wdl)) => wdl,
            _ => primary,
        }
    }

    pub fn close(mut self) {
        let _ = self.transport.send("quit");
        self.transport.close();
    }
}

/// What the caller wants from engine-derived tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TagRequest {
    pub commentary_type: Option<CommentaryType>,
    pub want_suggestion: bool,
    pub length: Option<LengthTag>,
}

/// Engine-derived tags and the numbers behind them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedTags {
    pub tags: TagSet,
    pub best_move: MoveRecord,
    pub p_best: f64,
    pub p_played: f64,
    pub delta: f64,
    pub quality: MoveQuality,
}

/// Evaluates `board` for M* and P_M*, then the position after `mv` for P_M,
/// and classifies ΔP. Entity tags are never produced.
pub fn derive_tags(
    session: &mut EngineSession,
    board: &BoardState,
    mv: &MoveRecord,
    request: &TagRequest,
) -> Result<DerivedTags, EngineError> {
    let after = board.apply(mv)?;
    session.new_game()?;
    let before = session.evaluate(board)?;
    let p_best = before.win_prob;

    let p_played = if after.is_checkmate() {
        1.0
    } else if after.is_stalemate() {
        0.5
    } else {
        1.0 - session.evaluate(&after)?.win_prob
    };

    let (quality, delta) = if before.best_move == *mv {
        (MoveQuality::Excellent, 0.0)
    } else {
        classify_delta(p_best, p_played, &session.config.thresholds)
    };

    let suggested = if request.want_suggestion {
        Some(vec![SuggestedLine::new(board.clone(), &[before.best_move.san.as_str()])?])
    } else {
        None
    };

    let tags = TagSet {
        commentary_type: request.commentary_type,
        move_quality: Some(quality),
        suggested,
        pronouns: Vec::new(),
        proper_nouns: Vec::new(),
        length: request.length.unwrap_or(LengthTag::Medium),
    };
    assert!(tags.pronouns.is_empty() && tags.proper_nouns.is_empty());
    Ok(DerivedTags {
        tags,
        best_move: before.best_move,
        p_best,
        p_played,
        delta,
        quality,
    })
}
