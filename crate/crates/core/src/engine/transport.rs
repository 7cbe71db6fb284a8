use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use super::transcript::Transcript;
use super::EngineError;

/// A line-oriented duplex channel to an engine.
pub trait Transport: Send {
    fn send(&mut self, line: &str) -> Result<(), EngineError>;
    /// Next engine line; `Ok(None)` when nothing arrived within `timeout`.
    fn recv(&mut self, timeout: Duration) -> Result<Option<String>, EngineError>;
    fn close(&mut self) {}
}

/// An engine child process spoken to over stdin/stdout.
pub struct ProcessTransport {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
}

impl ProcessTransport {
    pub fn spawn(path: &Path, args: &[String]) -> Result<ProcessTransport, EngineError> {
        let mut child = Command::new(path)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| EngineError::SpawnFailure(format!("{}: {e}", path.display())))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(ProcessTransport {
            child,
            stdin,
            lines: rx,
        })
    }
}

impl Transport for ProcessTransport {
    fn send(&mut self, line: &str) -> Result<(), EngineError> {
        log::trace!("engine <- {line}");
        writeln!(self.stdin, "{line}")
            .and_then(|_| self.stdin.flush())
            .map_err(|_| EngineError::EngineCrashed)
    }

    fn recv(&mut self, timeout: Duration) -> Result<Option<String>, EngineError> {
        match self.lines.recv_timeout(timeout) {
            Ok(line) => {
                log::trace!("engine -> {line}");
                Ok(Some(line))
            }
            Err(RecvTimeoutError::Timeout) => Ok(None),
            Err(RecvTimeoutError::Disconnected) => Err(EngineError::EngineCrashed),
        }
    }

    fn close(&mut self) {
        let _ = writeln!(self.stdin, "quit").and_then(|_| self.stdin.flush());
        for _ in 0..20 {
            if matches!(self.child.try_wait(), Ok(Some(_))) {
                return;
            }
            thread::sleep(Duration::from_millis(10));
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Drop for ProcessTransport {
    fn drop(&mut self) {
        if matches!(self.child.try_wait(), Ok(None)) {
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
    }
}

/// Replays a [`Transcript`] in memory. An empty output queue reads as an
/// immediate timeout. Every line sent is recorded in a shared log.
pub struct TranscriptTransport {
    script: Transcript,
    pending: VecDeque<String>,
    sent: Arc<Mutex<Vec<String>>>,
}

impl TranscriptTransport {
    pub fn new(mut script: Transcript) -> TranscriptTransport {
        let pending = script.preamble().into();
        TranscriptTransport {
            script,
            pending,
            sent: Arc::new(Mutex::new(Vec::new())),
        }
    }

    /// Handle on the lines sent so far; stays valid after the transport is
    /// moved into a session.
    pub fn sent_log(&self) -> Arc<Mutex<Vec<String>>> {
        Arc::clone(&self.sent)
    }
}

impl Transport for TranscriptTransport {
    fn send(&mut self, line: &str) -> Result<(), EngineError> {
        self.sent.lock().unwrap().push(line.to_string());
        if self.script.is_finished() && (line == "quit" || line == "stop") {
            return Ok(());
        }
        let replies = self.script.respond(line).map_err(EngineError::ProtocolViolation)?;
        self.pending.extend(replies);
        Ok(())
    }

    fn recv(&mut self, _timeout: Duration) -> Result<Option<String>, EngineError> {
        Ok(self.pending.pop_front())
    }
}
