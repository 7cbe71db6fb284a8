//! Client side of the generation backend wire contract, plus in-process
//! stubs.
//!
//! ```text
//! POST /generate  {"input": str, "max_tokens": int}          -> {"text": str}
//! POST /score     {"prompt": str, "continuations": [str...]} -> {"logprobs": [float...]}
//! GET  /health                                               -> {"status": "ready"}
//! ```

use std::sync::LazyLock;
use std::time::Duration;

use regex::Regex;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BackendError {
    #[error("backend unreachable: {0}")]
    Unreachable(String),
    #[error("backend timed out after {0:?}")]
    Timeout(Duration),
    #[error("malformed backend response: {0}")]
    Malformed(String),
    #[error("backend returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("non-finite score {value} for continuation {index}")]
    NonFiniteScore { index: usize, value: f64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerateRequest {
    pub input: String,
    pub max_tokens: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerateResponse {
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub prompt: String,
    pub continuations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreResponse {
    pub logprobs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
}

/// Produces commentary text from an assembled input.
pub trait Generator {
    fn generate(&self, input: &str, max_tokens: usize) -> Result<String, BackendError>;
}

/// Scores continuations of a prompt with one log-probability each.
pub trait ScoreOracle {
    fn score(&self, prompt: &str, continuations: &[String]) -> Result<Vec<f64>, BackendError>;
}

impl<T: Generator + ?Sized> Generator for &T {
    fn generate(&self, input: &str, max_tokens: usize) -> Result<String, BackendError> {
        (**self).generate(input, max_tokens)
    }
}

impl<T: ScoreOracle + ?Sized> ScoreOracle for &T {
    fn score(&self, prompt: &str, continuations: &[String]) -> Result<Vec<f64>, BackendError> {
        (**self).score(prompt, continuations)
    }
}

/// JSON over HTTP to a backend at `base_url` (e.g. `http://127.0.0.1:8000`).
#[derive(Clone, Debug)]
pub struct HttpBackend {
    base_url: String,
    timeout: Duration,
    agent: ureq::Agent,
}

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

impl HttpBackend {
    pub fn new(base_url: &str) -> HttpBackend {
        HttpBackend::with_timeout(base_url, DEFAULT_TIMEOUT)
    }

    pub fn with_timeout(base_url: &str, timeout: Duration) -> HttpBackend {
        HttpBackend {
            base_url: base_url.trim_end_matches('/').to_string(),
            timeout,
            agent: make_agent(timeout),
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    pub fn health(&self) -> Result<HealthResponse, BackendError> {
        let url = format!("{}/health", self.base_url);
        let resp = self.agent.get(&url).call();
        read_response(resp, self.timeout)
    }
}

pub(crate) fn make_agent(timeout: Duration) -> ureq::Agent {
    ureq::Agent::config_builder()
        .timeout_global(Some(timeout))
        .http_status_as_error(false)
        .build()
        .into()
}

/// POSTs `body` as JSON and decodes the reply.
pub(crate) fn post_json<B: Serialize, R: DeserializeOwned>(
    agent: &ureq::Agent,
    url: &str,
    body: &B,
    timeout: Duration,
) -> Result<R, BackendError> {
    read_response(agent.post(url).send_json(body), timeout)
}

fn read_body(resp: Result<ureq::http::Response<ureq::Body>, ureq::Error>, timeout: Duration) -> Result<String, BackendError> {
    let mut resp = resp.map_err(|e| map_error(e, timeout))?;
    let status = resp.status().as_u16();
    let body = resp.body_mut().read_to_string().map_err(|e| map_error(e, timeout))?;
    if !(200..300).contains(&status) {
        return Err(BackendError::Status { status, body });
    }
    Ok(body)
}

fn read_response<R: DeserializeOwned>(
    resp: Result<ureq::http::Response<ureq::Body>, ureq::Error>,
    timeout: Duration,
) -> Result<R, BackendError> {
    let body = read_body(resp, timeout)?;
    serde_json::from_str(&body).map_err(|e| BackendError::Malformed(format!("{e}: {body}")))
}

static NON_FINITE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([\[,:]\s*)(-?Infinity|NaN)\b").unwrap());

/// Reads `{"logprobs": [...]}`, also accepting the bare `NaN`, `Infinity`
/// and `-Infinity` literals that Python's json module writes.
fn parse_logprobs(body: &str) -> Result<Vec<f64>, BackendError> {
    let malformed = |e: String| BackendError::Malformed(format!("{e}: {body}"));
    if let Ok(r) = serde_json::from_str::<ScoreResponse>(body) {
        return Ok(r.logprobs);
    }
    let quoted = NON_FINITE.replace_all(body, "$1\"$2\"");
    let value: serde_json::Value = serde_json::from_str(&quoted).map_err(|e| malformed(e.to_string()))?;
    let items = value
        .get("logprobs")
        .and_then(serde_json::Value::as_array)
        .ok_or_else(|| malformed("missing \"logprobs\" array".into()))?;
    items
        .iter()
        .map(|v| match v {
            serde_json::Value::Number(n) => n.as_f64().ok_or_else(|| malformed(format!("bad number {n}"))),
            serde_json::Value::String(s) if s == "-Infinity" => Ok(f64::NEG_INFINITY),
            serde_json::Value::String(s) if s == "Infinity" => Ok(f64::INFINITY),
            serde_json::Value::String(s) if s == "NaN" => Ok(f64::NAN),
            other => Err(malformed(format!("non-numeric logprob {other}"))),
        })
        .collect()
}

fn map_error(e: ureq::Error, timeout: Duration) -> BackendError {
    match e {
        ureq::Error::Timeout(_) => BackendError::Timeout(timeout),
        ureq::Error::Io(io) if io.kind() == std::io::ErrorKind::TimedOut || io.kind() == std::io::ErrorKind::WouldBlock => {
            BackendError::Timeout(timeout)
        }
        ureq::Error::Json(e) => BackendError::Malformed(e.to_string()),
        other => BackendError::Unreachable(other.to_string()),
    }
}

impl Generator for HttpBackend {
    fn generate(&self, input: &str, max_tokens: usize) -> Result<String, BackendError> {
        let req = GenerateRequest {
            input: input.to_string(),
            max_tokens,
        };
        let resp: GenerateResponse = post_json(&self.agent, &format!("{}/generate", self.base_url), &req, self.timeout)?;
        Ok(resp.text)
    }
}

impl ScoreOracle for HttpBackend {
    fn score(&self, prompt: &str, continuations: &[String]) -> Result<Vec<f64>, BackendError> {
        let req = ScoreRequest {
            prompt: prompt.to_string(),
            continuations: continuations.to_vec(),
        };
        let url = format!("{}/score", self.base_url);
        let body = read_body(self.agent.post(&url).send_json(&req), self.timeout)?;
        let logprobs = parse_logprobs(&body)?;
        if logprobs.len() != continuations.len() {
            return Err(BackendError::Malformed(format!(
                "expected {} logprobs, got {}",
                continuations.len(),
                logprobs.len()
            )));
        }
        if let Some((index, &value)) = logprobs.iter().enumerate().find(|(_, v)| v.is_nan() || **v == f64::INFINITY) {
            return Err(BackendError::NonFiniteScore { index, value });
        }
        Ok(logprobs)
    }
}

/// Returns a fixed string for every request.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EchoBackend {
    pub text: String,
}

impl EchoBackend {
    pub fn new(text: impl Into<String>) -> EchoBackend {
        EchoBackend { text: text.into() }
    }
}

impl Generator for EchoBackend {
    fn generate(&self, _input: &str, _max_tokens: usize) -> Result<String, BackendError> {
        Ok(self.text.clone())
    }
}

/// Equal log-probability for every continuation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UniformOracle;

impl ScoreOracle for UniformOracle {
    fn score(&self, _prompt: &str, continuations: &[String]) -> Result<Vec<f64>, BackendError> {
        Ok(vec![0.0; continuations.len()])
    }
}
