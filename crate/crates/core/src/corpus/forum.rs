use std::sync::LazyLock;

use regex::{Captures, Regex};
use serde::{Deserialize, Serialize};

use crate::text;

/// Chess event words that mark a post as on-topic.
pub const EVENT_TOKENS: [&str; 17] = [
    "exchange",
    "castle",
    "capture",
    "blunder",
    "mate",
    "check",
    "checkmate",
    "discovered attack",
    "en passant",
    "fianchetto",
    "gambit",
    "pin",
    "sacrifice",
    "stalemate",
    "threat",
    "trap",
    "variation",
];

static EVENT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)\b(?:exchang(?:e|es|ed|ing)|castl(?:e|es|ed|ing)|captur(?:e|es|ed|ing)|blunder(?:s|ed|ing)?|mat(?:e|es|ed|ing)|checkmat(?:e|es|ed|ing)|checks?|checked|checking|discovered attacks?|en passant|fianchetto(?:s|ed|ing)?|gambits?|pin(?:s|ned|ning)?|sacrific(?:e|es|ed|ing)|stalemat(?:e|es|ed)|threats?|traps?|trapped|variations?)\b",
    )
    .unwrap()
});

static PIECE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(?:king|queen|rook|bishop|knight|pawn)s?\b").unwrap());

static MOVE_NUMBER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\bmoves?\s+(?:#\s*|no\.?\s*)?\d+\b").unwrap());

static EMAIL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,}").unwrap());

static URL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)\b(?:https?://|ftp://|www\.)[^\s<>()\[\]]+|\b[a-z0-9-]+(?:\.[a-z0-9-]+)*\.(?:com|org|net|io|gg|tv|co|uk|de|ru|fr|be|me|info|edu|ly)\b(?:/[^\s<>()\[\]]*)?",
    )
    .unwrap()
});

static HANDLE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(^|[^\w@.\[\]])@[A-Za-z0-9_]{2,}").unwrap());

static REDDIT_USER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(^|[^\w/\]])/?u/[A-Za-z0-9_-]{2,}").unwrap());

/// Replaces emails, URLs, @-handles and `u/` usernames with `[EMAIL]`,
/// `[URL]` and `[USER]`.
pub fn scrub_pii(text: &str) -> String {
    let s = EMAIL.replace_all(text, "[EMAIL]");
    let s = URL.replace_all(&s, |c: &Captures| {
        let m = &c[0];
        let kept = m.trim_end_matches(['.', ',', ';', ':', '!', '?']);
        format!("[URL]{}", &m[kept.len()..])
    });
    let s = HANDLE.replace_all(&s, |c: &Captures| format!("{}[USER]", &c[1]));
    REDDIT_USER
        .replace_all(&s, |c: &Captures| format!("{}[USER]", &c[1]))
        .into_owned()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ForumMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub votes: Option<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
}

/// A response and the thread text it answers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForumPost {
    #[serde(default)]
    pub context: Vec<String>,
    pub response: String,
    #[serde(default)]
    pub metadata: ForumMetadata,
}

impl ForumPost {
    pub fn new(response: impl Into<String>) -> ForumPost {
        ForumPost {
            context: Vec::new(),
            response: response.into(),
            metadata: ForumMetadata::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    Notation = 1,
    MoveNumber = 2,
    EventToken = 3,
    PieceToken = 4,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    ExternalLink,
    IrrelevantTag(String),
    EmptyResponse,
    NoPattern,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterDecision {
    pub keep: bool,
    pub patterns: Vec<Pattern>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<DropReason>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterConfig {
    /// Thread tags that mark a question as off-topic (case-insensitive).
    pub irrelevant_tags: Vec<String>,
}

fn has_notation(text: &str) -> bool {
    !text::san_runs(text).is_empty()
}

/// Drops threads with external links or irrelevant tags; otherwise keeps the
/// post if its response matches at least one pattern.
pub fn filter_forum_post(post: &ForumPost, config: &FilterConfig) -> FilterDecision {
    let drop = |reason| FilterDecision {
        keep: false,
        patterns: Vec::new(),
        reason: Some(reason),
    };
    if post.response.trim().is_empty() {
        return drop(DropReason::EmptyResponse);
    }
    let thread = post.context.iter().chain(std::iter::once(&post.response));
    if thread.clone().any(|t| URL.is_match(&EMAIL.replace_all(t, ""))) {
        return drop(DropReason::ExternalLink);
    }
    if let Some(tag) = post
        .metadata
        .tags
        .iter()
        .find(|t| config.irrelevant_tags.iter().any(|i| i.eq_ignore_ascii_case(t)))
    {
        return drop(DropReason::IrrelevantTag(tag.clone()));
    }

    let text = &post.response;
    let mut patterns = Vec::new();
    if has_notation(text) {
        patterns.push(Pattern::Notation);
    }
    if MOVE_NUMBER.is_match(text) {
        patterns.push(Pattern::MoveNumber);
    }
    if EVENT.is_match(text) {
        patterns.push(Pattern::EventToken);
    }
    if PIECE.is_match(text) {
        patterns.push(Pattern::PieceToken);
    }
    FilterDecision {
        keep: !patterns.is_empty(),
        reason: patterns.is_empty().then_some(DropReason::NoPattern),
        patterns,
    }
}
