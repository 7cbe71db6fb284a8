//! Parsing of engine output lines.

use super::winprob::Score;
use super::EngineError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfoLine {
    pub multipv: u32,
    pub depth: Option<u32>,
    pub score: Option<Score>,
    pub wdl: Option<Score>,
    /// Moves in UCI coordinate form.
    pub pv: Vec<String>,
}

fn number<T: std::str::FromStr>(tok: Option<&str>, line: &str) -> Result<T, EngineError> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| EngineError::UnparseableInfo(line.to_string()))
}

/// Parses an `info` line. Returns `Ok(None)` for lines that are not `info`
/// or carry only a `string` payload.
pub fn parse_info(line: &str) -> Result<Option<InfoLine>, EngineError> {
    let mut toks = line.split_whitespace();
    if toks.next() != Some("info") {
        return Ok(None);
    }
    let mut info = InfoLine {
        multipv: 1,
        depth: None,
        score: None,
        wdl: None,
        pv: Vec::new(),
    };
    while let Some(tok) = toks.next() {
        match tok {
            "string" => break,
            "multipv" => info.multipv = number(toks.next(), line)?,
            "depth" => info.depth = Some(number(toks.next(), line)?),
            "score" => match toks.next() {
                Some("cp") => info.score = Some(Score::Cp(number(toks.next(), line)?)),
                Some("mate") => info.score = Some(Score::Mate(number(toks.next(), line)?)),
                _ => return Err(EngineError::UnparseableInfo(line.to_string())),
            },
            "wdl" => {
                info.wdl = Some(Score::Wdl {
                    w: number(toks.next(), line)?,
                    d: number(toks.next(), line)?,
                    l: number(toks.next(), line)?,
                })
            }
            "pv" => {
                info.pv = toks.by_ref().map(str::to_string).collect();
            }
            "seldepth" | "time" | "nodes" | "nps" | "hashfull" | "tbhits" | "currmovenumber" | "cpuload" | "sbhits" => {
                toks.next();
            }
            "currmove" | "refutation" | "currline" => {
                // Payloads of unknown length; nothing after them is needed.
                break;
            }
            _ => {}
        }
    }
    if info.score.is_none() && info.wdl.is_none() && info.pv.is_empty() && info.depth.is_none() {
        return Ok(None);
    }
    if info.multipv == 0 {
        return Err(EngineError::UnparseableInfo(line.to_string()));
    }
    Ok(Some(info))
}

/// The move of a `bestmove` line, `None` for `(none)`/`0000`.
pub fn parse_bestmove(line: &str) -> Option<Option<String>> {
    let mut toks = line.split_whitespace();
    if toks.next() != Some("bestmove") {
        return None;
    }
    Some(toks.next().filter(|m| *m != "(none)" && *m != "0000").map(str::to_string))
}
