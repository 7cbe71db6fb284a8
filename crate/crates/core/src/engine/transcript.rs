//! Scripted engine conversations.
//!
//! One line per step. `> text` is a line the client must send next (a
//! trailing `*` matches any suffix), `< text` is a line the engine writes.
//! Blank lines and lines starting with `#` are ignored.
//!
//! ```text
//! > uci
//! < id name Fake
//! < uciok
//! > isready
//! < readyok
//! ```

use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Expect(String),
    Emit(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    steps: VecDeque<Step>,
}

impl Transcript {
    pub fn parse(text: &str) -> Result<Transcript, String> {
        let mut steps = VecDeque::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("> ").or(line.strip_prefix('>').filter(|r| r.is_empty())) {
                steps.push_back(Step::Expect(rest.to_string()));
            } else if let Some(rest) = line.strip_prefix("< ").or(line.strip_prefix('<').filter(|r| r.is_empty())) {
                steps.push_back(Step::Emit(rest.to_string()));
            } else {
                return Err(format!("line {}: expected '> ' or '< ' prefix: {line:?}", i + 1));
            }
        }
        Ok(Transcript { steps })
    }

    pub fn from_steps(steps: impl IntoIterator<Item = Step>) -> Transcript {
        Transcript {
            steps: steps.into_iter().collect(),
        }
    }

    /// Renders back to the file format.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            match step {
                Step::Expect(s) => out.push_str(&format!("> {s}\n")),
                Step::Emit(s) => out.push_str(&format!("< {s}\n")),
            }
        }
        out
    }

    /// Engine output scripted before the first expected input.
    pub fn preamble(&mut self) -> Vec<String> {
        self.drain_emits()
    }

    fn drain_emits(&mut self) -> Vec<String> {
        let mut out = Vec::new();
        while let Some(Step::Emit(_)) = self.steps.front() {
            if let Some(Step::Emit(s)) = self.steps.pop_front() {
                out.push(s);
            }
        }
        out
    }

    /// Consumes the next expectation for `line` and returns the scripted
    /// replies. Errors when the line is not what the script expects.
    pub fn respond(&mut self, line: &str) -> Result<Vec<String>, String> {
        let pending = self.drain_emits();
        if !pending.is_empty() {
            // Unread output stays ahead of the replies.
            let mut out = pending;
            out.extend(self.respond(line)?);
            return Ok(out);
        }
        match self.steps.pop_front() {
            Some(Step::Expect(pattern)) if matches(&pattern, line) => Ok(self.drain_emits()),
            Some(Step::Expect(pattern)) => Err(format!("script expected {pattern:?}, got {line:?}")),
            Some(Step::Emit(_)) => unreachable!("emits drained"),
            None => Err(format!("script exhausted, got {line:?}")),
        }
    }

    pub fn is_finished(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Assembles transcripts step by step, mirroring what a session sends.
#[derive(Clone, Debug, Default)]
pub struct TranscriptBuilder {
    steps: Vec<Step>,
}

impl TranscriptBuilder {
    pub fn new() -> TranscriptBuilder {
        TranscriptBuilder::default()
    }

    pub fn expect(mut self, line: impl Into<String>) -> Self {
        self.steps.push(Step::Expect(line.into()));
        self
    }

    pub fn emit(mut self, line: impl Into<String>) -> Self {
        self.steps.push(Step::Emit(line.into()));
        self
    }

    /// `uci` … `uciok`, MultiPV, optional WDL, `isready` … `readyok`.
    pub fn handshake(self, name: &str, multipv: u32, wdl: bool) -> Self {
        let mut b = self.expect("uci").emit(format!("id name {name}")).emit("id author test");
        if wdl {
            b = b.emit("option name UCI_ShowWDL type check default false");
        }
        b = b.emit("uciok").expect(format!("setoption name MultiPV value {multipv}"));
        if wdl {
            b = b.expect("setoption name UCI_ShowWDL value true");
        }
        b.expect("isready").emit("readyok")
    }

    pub fn new_game(self) -> Self {
        self.expect("ucinewgame").expect("isready").emit("readyok")
    }

    /// One search: the position, a `go` line, then the scripted info lines
    /// and `bestmove`.
    pub fn search<S: AsRef<str>>(self, fen: &str, go: &str, infos: &[S], bestmove: &str) -> Self {
        let mut b = self.expect(format!("position fen {fen}")).expect(go);
        for info in infos {
            b = b.emit(info.as_ref());
        }
        b.emit(format!("bestmove {bestmove}"))
    }

    pub fn build(self) -> Transcript {
        Transcript::from_steps(self.steps)
    }
}

fn matches(pattern: &str, line: &str) -> bool {
    match pattern.strip_suffix('*') {
        Some(prefix) => line.starts_with(prefix),
        None => pattern == line,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay() {
        let mut t = Transcript::parse("# hi\n< banner\n> uci\n< id name X\n< uciok\n\n> position fen *\n> go nodes 100\n< bestmove e2e4\n").unwrap();
        assert_eq!(t.preamble(), ["banner"]);
        assert_eq!(t.respond("uci").unwrap(), ["id name X", "uciok"]);
        assert_eq!(t.respond("position fen 8/8 w").unwrap(), Vec::<String>::new());
        assert!(t.respond("go nodes 5").is_err());
    }

    #[test]
    fn render_round_trip() {
        let text = "> uci\n< uciok\n> isready\n< readyok\n";
        assert_eq!(Transcript::parse(text).unwrap().render(), text);
        assert!(Transcript::parse("uci\n").is_err());
    }
}
