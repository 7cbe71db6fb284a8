use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::Entities;
use crate::backend::{make_agent, post_json, BackendError, DEFAULT_TIMEOUT};

pub type ClassifierError = BackendError;

/// Reply of an external classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Label {
    pub label: String,
    pub confidence: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyRequest {
    pub task: String,
    pub text: String,
}

/// A learned replacement for the rule-based type and quality extractors.
/// `task` is `"commentary_type"` or `"move_quality"`; a quality label of
/// `"none"` means no quality cue.
pub trait TextClassifier {
    fn classify(&self, task: &str, text: &str) -> Result<Label, ClassifierError>;
}

/// A learned replacement for the entity extractor.
pub trait EntityRecognizer {
    fn recognize(&self, text: &str) -> Result<Entities, ClassifierError>;
}

/// `POST {"task", "text"}` to `url`, expecting `{"label", "confidence"}`.
#[derive(Clone, Debug)]
pub struct HttpClassifier {
    url: String,
    timeout: Duration,
    agent: ureq::Agent,
}

impl HttpClassifier {
    pub fn new(url: &str) -> HttpClassifier {
        HttpClassifier {
            url: url.to_string(),
            timeout: DEFAULT_TIMEOUT,
            agent: make_agent(DEFAULT_TIMEOUT),
        }
    }
}

impl TextClassifier for HttpClassifier {
    fn classify(&self, task: &str, text: &str) -> Result<Label, ClassifierError> {
        let req = ClassifyRequest {
            task: task.to_string(),
            text: text.to_string(),
        };
        let label: Label = post_json(&self.agent, &self.url, &req, self.timeout)?;
        if !(0.0..=1.0).contains(&label.confidence) {
            return Err(BackendError::Malformed(format!("confidence {} outside [0, 1]", label.confidence)));
        }
        Ok(label)
    }
}
