//! Replays a UCI transcript over stdin/stdout, for driving the engine
//! adapter without a real engine.
//!
//! Usage: `fake-uci SCRIPT`. Exits 2 if the client deviates from the script.

use std::io::{self, BufRead, Write};
use std::process::ExitCode;

use chesstag_core::engine::Transcript;

fn main() -> ExitCode {
    let Some(path) = std::env::args().nth(1) else {
        eprintln!("usage: fake-uci SCRIPT");
        return ExitCode::from(64);
    };
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("fake-uci: {path}: {e}");
            return ExitCode::from(66);
        }
    };
    let mut script = match Transcript::parse(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("fake-uci: {e}");
            return ExitCode::from(65);
        }
    };

    let stdout = io::stdout();
    let mut out = stdout.lock();
    let emit = |out: &mut io::StdoutLock, lines: Vec<String>| -> io::Result<()> {
        for l in lines {
            writeln!(out, "{l}")?;
        }
        out.flush()
    };
    if emit(&mut out, script.preamble()).is_err() {
        return ExitCode::FAILURE;
    }
    for line in io::stdin().lock().lines() {
        let Ok(line) = line else { break };
        let line = line.trim_end().to_string();
        if line == "quit" && script.is_finished() {
            break;
        }
        if script.is_finished() && line == "stop" {
            continue;
        }
        match script.respond(&line) {
            Ok(replies) => {
                if emit(&mut out, replies).is_err() {
                    return ExitCode::FAILURE;
                }
            }
            Err(e) => {
                eprintln!("fake-uci: {e}");
                return ExitCode::from(2);
            }
        }
    }
    ExitCode::SUCCESS
}
