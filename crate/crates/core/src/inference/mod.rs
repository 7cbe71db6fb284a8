//! Model-free and backend-driven commentary generation from engine-derived
//! tags, with grounding checks on the output.

mod grounding;
mod template;

use chesstag_chess::{BoardState, GameRecord, MoveRecord};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{BackendError, Generator};
use crate::engine::{derive_tags, DerivedTags, EngineError, EngineSession, TagRequest};
use crate::representation::{build_input, InputText, RepresentationConfig, RepresentationError};
use crate::tags::{CommentaryType, LengthTag, TagSet};

pub use grounding::{ground_check, ground_check_move, GroundingReport, Violation, ViolationKind};
pub use template::{realize_template, TemplateError};

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Representation(#[from] RepresentationError),
    #[error("move {0} is not legal in this position")]
    IllegalMove(String),
}

/// A position (with optional history), the move to comment on and the
/// user's choices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InferenceRequest {
    /// History ending at the position the move is played from.
    pub game: GameRecord,
    pub mv: MoveRecord,
    pub commentary_type: CommentaryType,
    pub length: Option<LengthTag>,
    pub want_suggestion: bool,
}

impl InferenceRequest {
    /// A request without move history.
    pub fn from_position(board: BoardState, san: &str, commentary_type: CommentaryType) -> Result<InferenceRequest, InferenceError> {
        let (mv, _) = board.play_san(san).map_err(|_| InferenceError::IllegalMove(san.to_string()))?;
        Ok(InferenceRequest {
            game: GameRecord::new(board),
            mv,
            commentary_type,
            length: None,
            want_suggestion: true,
        })
    }

    pub fn board(&self) -> BoardState {
        self.game.final_position().expect("request history replays")
    }
}

/// Engine-derived tags and the fully conditioned input built from them.
#[derive(Clone, Debug, PartialEq)]
pub struct PreparedRequest {
    pub input: InputText,
    pub tags: TagSet,
    pub derived: DerivedTags,
}

pub fn build_inference_request(session: &mut EngineSession, request: &InferenceRequest) -> Result<PreparedRequest, InferenceError> {
    let board = request.board();
    board
        .apply(&request.mv)
        .map_err(|_| InferenceError::IllegalMove(request.mv.san.clone()))?;
    let derived = derive_tags(
        session,
        &board,
        &request.mv,
        &TagRequest {
            commentary_type: Some(request.commentary_type),
            want_suggestion: request.want_suggestion,
            length: request.length,
        },
    )?;
    let tags = derived.tags.clone();
    let input = build_input(&request.game, &board, &request.mv, &tags, &RepresentationConfig::fully())?;
    Ok(PreparedRequest { input, tags, derived })
}

/// Asks the backend for commentary.
pub fn generate(backend: &dyn Generator, input: &InputText, max_tokens: usize) -> Result<String, BackendError> {
    backend.generate(&input.text, max_tokens)
}

/// Where commentary comes from.
pub enum Realizer<'a> {
    Template,
    Backend { generator: &'a dyn Generator, max_tokens: usize, retries: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InferenceOutput {
    pub input: String,
    pub tags: TagSet,
    pub commentary: String,
    pub grounding: GroundingReport,
    pub attempts: usize,
    pub delta: f64,
}

/// The full path: derive tags, build input, realize commentary and check
/// it. With a backend, output that fails the check is requested again up
/// to `retries` more times; the last attempt is returned either way.
pub fn infer(session: &mut EngineSession, request: &InferenceRequest, realizer: &Realizer<'_>) -> Result<InferenceOutput, InferenceError> {
    let prepared = build_inference_request(session, request)?;
    let board = request.board();
    let (commentary, grounding, attempts) = match realizer {
        Realizer::Template => {
            let text = realize_template(&prepared.tags, &board, &request.mv)?;
            let report = ground_check_move(&text, &board, &request.mv);
            (text, report, 1)
        }
        Realizer::Backend {
            generator,
            max_tokens,
            retries,
        } => {
            let mut attempts = 0;
            loop {
                attempts += 1;
                let text = generate(*generator, &prepared.input, *max_tokens)?;
                let report = ground_check_move(&text, &board, &request.mv);
                if report.is_clean() || attempts > *retries {
                    break (text, report, attempts);
                }
                log::info!("attempt {attempts}: {} grounding violations, retrying", report.violations.len());
            }
        }
    };
    Ok(InferenceOutput {
        input: prepared.input.text,
        tags: prepared.tags,
        commentary,
        grounding,
        attempts,
        delta: prepared.derived.delta,
    })
}
