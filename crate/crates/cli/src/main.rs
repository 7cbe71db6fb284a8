//! `chesstag`: corpus preparation, engine-grounded commentary and belief
//! probing from the command line.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use chesstag_chess::{BoardState, GameRecord};
use chesstag_core::backend::{HttpBackend, ScoreOracle, UniformOracle};
use chesstag_core::corpus::{
    annotate_record, evaluate_extractor, filter_forum_post, load_triplets, scrub_pii, split_dataset, ExtractorOutput,
    FilterConfig, ForumPost, Split, SplitSpec,
};
use chesstag_core::engine::{open_session, EngineConfig, EngineSource, SearchBudget};
use chesstag_core::inference::{infer, InferenceRequest, Realizer};
use chesstag_core::probe::{emit_heatmap, probe_metrics, probe_position, PromptTemplates};
use chesstag_core::representation::{game_state_text, Ablation, RepresentationConfig, StateSegments};
use chesstag_core::tags::{AllowList, CommentaryType, Extractors, HttpClassifier, LengthTag};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "chesstag", version, about = "Tagged chess commentary tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract tags from triplets and render generator inputs.
    Annotate {
        #[arg(long = "in")]
        input: PathBuf,
        /// unconditioned, move, game-state, tags or fully. Repeatable.
        #[arg(long, default_value = "fully")]
        ablation: Vec<Ablation>,
        #[arg(long)]
        out: PathBuf,
        /// Abort on the first bad record instead of skipping it.
        #[arg(long)]
        strict: bool,
        /// Proper-noun allow-list replacing the built-in one.
        #[arg(long)]
        allow_list: Option<PathBuf>,
        /// Score endpoint of an external commentary-type/quality classifier.
        #[arg(long)]
        classifier: Option<String>,
    },
    /// Partition a JSONL file into train/valid/test, grouped by `source`.
    Split {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "85:10:5")]
        ratios: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for train.jsonl, valid.jsonl and test.jsonl.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Keep forum posts that discuss concrete positions; PII is scrubbed.
    FilterForum {
        #[arg(long = "in")]
        input: PathBuf,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Thread tag marking an off-topic question. Repeatable.
        #[arg(long = "irrelevant-tag")]
        irrelevant_tags: Vec<String>,
    },
    /// Macro-F1 and exact-match of extractor predictions against gold.
    EvalExtractor {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
    },
    /// Comment on one move.
    Infer {
        #[arg(long)]
        fen: String,
        #[arg(long = "move")]
        mv: String,
        #[arg(long = "type", default_value = "move_quality")]
        commentary_type: CommentaryType,
        /// `template` or a generation endpoint URL.
        #[arg(long, default_value = "template")]
        backend: String,
        #[arg(long)]
        length: Option<LengthTag>,
        #[arg(long)]
        no_suggestion: bool,
        #[arg(long, default_value_t = 64)]
        max_tokens: usize,
        #[arg(long, default_value_t = 2)]
        retries: usize,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Square distributions for each piece prompt, written as heatmaps.
    Probe {
        #[arg(long)]
        fen: String,
        /// `uniform` or a score endpoint URL.
        #[arg(long)]
        backend: String,
        #[arg(long)]
        out: PathBuf,
        /// Prompt pattern with {Color}, {color} and {piece} placeholders.
        #[arg(long)]
        template: Option<String>,
    },
}

#[derive(Args)]
struct EngineArgs {
    /// UCI engine executable.
    #[arg(long, conflicts_with = "transcript")]
    engine: Option<PathBuf>,
    /// Argument passed to the engine. Repeatable.
    #[arg(long = "engine-arg", allow_hyphen_values = true)]
    engine_args: Vec<String>,
    /// Scripted engine transcript instead of a process.
    #[arg(long)]
    transcript: Option<PathBuf>,
    #[arg(long, conflicts_with = "depth")]
    nodes: Option<u64>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long, default_value_t = 1)]
    multipv: u32,
    /// Seconds to wait for each search.
    #[arg(long, default_value_t = 60)]
    search_timeout: u64,
}

impl EngineArgs {
    fn config(&self) -> Result<EngineConfig> {
        let source = match (&self.engine, &self.transcript) {
            (Some(path), None) => EngineSource::Executable {
                path: path.clone(),
                args: self.engine_args.clone(),
            },
            (None, Some(path)) => EngineSource::TranscriptFile(path.clone()),
            _ => bail!("one of --engine or --transcript is required"),
        };
        let mut config = EngineConfig::new(source);
        config.multipv = self.multipv;
        config.search_timeout = Duration::from_secs(self.search_timeout);
        if let Some(n) = self.nodes {
            config.budget = SearchBudget::Nodes(n);
        }
        if let Some(d) = self.depth {
            config.budget = SearchBudget::Depth(d);
        }
        Ok(config)
    }
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Prints to stdout; a closed pipe (`| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), i + 1))?);
    }
    Ok(out)
}

fn annotate(
    input: &Path,
    ablations: &[Ablation],
    out: &Path,
    strict: bool,
    allow_list: Option<&Path>,
    classifier: Option<&str>,
) -> Result<()> {
    let mut extractors = Extractors::default();
    if let Some(p) = allow_list {
        extractors.allow_list = AllowList::load(p).with_context(|| format!("reading {}", p.display()))?;
    }
    if let Some(url) = classifier {
        extractors.classifier = Some(Box::new(HttpClassifier::new(url)));
    }
    let configs: Vec<RepresentationConfig> = ablations.iter().cloned().map(RepresentationConfig::new).collect();
    let report = load_triplets(input, strict)?;
    for (line, err) in &report.rejected {
        log::warn!("{}:{line}: {err}", input.display());
    }
    let mut w = writer(Some(out))?;
    for record in &report.records {
        let annotated = annotate_record(record, &extractors, &configs);
        for warning in &annotated.warnings {
            log::debug!("{}: {}", warning.extractor, warning.message);
        }
        serde_json::to_writer(&mut w, &annotated)?;
        writeln!(w)?;
    }
    w.flush()?;
    eprintln!("annotated {} records, rejected {}", report.records.len(), report.rejected.len());
    Ok(())
}

fn split(input: &Path, ratios: &str, seed: u64, out_dir: &Path) -> Result<()> {
    let spec: SplitSpec = ratios.parse().map_err(anyhow::Error::msg)?;
    let spec = SplitSpec::new(spec.ratios, seed).map_err(anyhow::Error::msg)?;
    let records: Vec<Value> = read_jsonl(input)?;
    for (i, r) in records.iter().enumerate() {
        if !r.get("source").is_some_and(Value::is_string) {
            bail!("{}: record {} has no string \"source\" field", input.display(), i + 1);
        }
    }
    let splits = split_dataset(&records, |r| r["source"].as_str().unwrap_or_default().to_string(), &spec);
    fs::create_dir_all(out_dir)?;
    for which in [Split::Train, Split::Valid, Split::Test] {
        let path = out_dir.join(format!("{}.jsonl", which.name()));
        let mut w = writer(Some(&path))?;
        for r in splits.get(which) {
            serde_json::to_writer(&mut w, r)?;
            writeln!(w)?;
        }
        w.flush()?;
    }
    let (train, valid, test) = splits.sizes();
    eprintln!("train {train}, valid {valid}, test {test}");
    Ok(())
}

fn filter_forum(input: &Path, out: Option<&Path>, irrelevant_tags: Vec<String>) -> Result<()> {
    let config = FilterConfig { irrelevant_tags };
    let posts: Vec<ForumPost> = read_jsonl(input)?;
    let mut w = writer(out)?;
    let mut dropped: BTreeMap<String, usize> = BTreeMap::new();
    let mut kept = 0;
    for post in &posts {
        let decision = filter_forum_post(post, &config);
        if !decision.keep {
            let reason = decision.reason.map_or("unknown".to_string(), |r| {
                serde_json::to_value(r)
                    .ok()
                    .and_then(|v| match v {
                        Value::String(s) => Some(s),
                        Value::Object(m) => m.keys().next().cloned(),
                        _ => None,
                    })
                    .unwrap_or_default()
            });
            *dropped.entry(reason).or_default() += 1;
            continue;
        }
        kept += 1;
        let clean = ForumPost {
            context: post.context.iter().map(|c| scrub_pii(c)).collect(),
            response: scrub_pii(&post.response),
            metadata: post.metadata.clone(),
        };
        let mut value = serde_json::to_value(&clean)?;
        value["patterns"] = serde_json::to_value(&decision.patterns)?;
        serde_json::to_writer(&mut w, &value)?;
        writeln!(w)?;
    }
    w.flush()?;
    eprintln!("kept {kept} of {}; dropped {dropped:?}", posts.len());
    Ok(())
}

fn eval_extractor(pred: &Path, gold: &Path) -> Result<()> {
    let p: Vec<ExtractorOutput> = read_jsonl(pred)?;
    let g: Vec<ExtractorOutput> = read_jsonl(gold)?;
    let metrics = evaluate_extractor(&p, &g)?;
    emit(&serde_json::to_string_pretty(&metrics)?)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_infer(
    fen: &str,
    mv: &str,
    commentary_type: CommentaryType,
    backend: &str,
    length: Option<LengthTag>,
    want_suggestion: bool,
    max_tokens: usize,
    retries: usize,
    engine: &EngineArgs,
) -> Result<()> {
    let board = BoardState::from_fen(fen).context("bad --fen")?;
    let mut request = InferenceRequest::from_position(board, mv, commentary_type)?;
    request.length = length;
    request.want_suggestion = want_suggestion;
    let mut session = open_session(engine.config()?)?;
    let http;
    let realizer = if backend == "template" {
        Realizer::Template
    } else {
        http = HttpBackend::new(backend);
        Realizer::Backend {
            generator: &http,
            max_tokens,
            retries,
        }
    };
    let output = infer(&mut session, &request, &realizer);
    session.close();
    let output = output?;
    emit(&serde_json::to_string_pretty(&output)?)?;
    if !output.grounding.is_clean() {
        log::warn!("commentary has {} grounding violations", output.grounding.violations.len());
    }
    Ok(())
}

fn probe(fen: &str, backend: &str, out: &Path, template: Option<String>) -> Result<()> {
    let board = BoardState::from_fen(fen).context("bad --fen")?;
    let http;
    let oracle: &dyn ScoreOracle = if backend == "uniform" {
        &UniformOracle
    } else {
        http = HttpBackend::new(backend);
        &http
    };
    let mut templates = PromptTemplates::default();
    if let Some(t) = template {
        templates.pattern = t;
    }
    let game = GameRecord::new(board.clone());
    let context = game_state_text(&game, &board, &RepresentationConfig::new(Ablation::GameState(StateSegments::ALL)))?;
    let states = probe_position(oracle, &board, &context, &templates)?;
    fs::create_dir_all(out)?;
    for s in &states {
        let stem = format!("{}_{}", s.prompt.color.name(), s.prompt.kind.name()).to_lowercase();
        emit_heatmap(s, &out.join(format!("{stem}.csv")))?;
    }
    let metrics = probe_metrics(&states)?;
    fs::write(out.join("metrics.json"), serde_json::to_string_pretty(&metrics)?)?;
    emit(&serde_json::to_string_pretty(&metrics)?)?;
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Annotate {
            input,
            ablation,
            out,
            strict,
            allow_list,
            classifier,
        } => annotate(&input, &ablation, &out, strict, allow_list.as_deref(), classifier.as_deref()),
        Command::Split {
            input,
            ratios,
            seed,
            out_dir,
        } => split(&input, &ratios, seed, &out_dir),
        Command::FilterForum {
            input,
            out,
            irrelevant_tags,
        } => filter_forum(&input, out.as_deref(), irrelevant_tags),
        Command::EvalExtractor { pred, gold } => eval_extractor(&pred, &gold),
        Command::Infer {
            fen,
            mv,
            commentary_type,
            backend,
            length,
            no_suggestion,
            max_tokens,
            retries,
            engine,
        } => run_infer(&fen, &mv, commentary_type, &backend, length, !no_suggestion, max_tokens, retries, &engine),
        Command::Probe {
            fen,
            backend,
            out,
            template,
        } => probe(&fen, &backend, &out, template),
    }
}
