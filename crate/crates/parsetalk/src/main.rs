use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use parsetalk::config::Settings;
use parsetalk::corpus::{load_corpus, load_text, tokenize};
use parsetalk::format::{load_grammar, load_kb, trace_line, ParseResultDoc, TextReportDoc};
use parsetalk::harness::{reduction_factor, run_corpus, Check, System};
use parsetalk::report::write_reports;
use parsetalk_core::text::parse_text;
use parsetalk_core::{Grammar, Kb, Metrics};

#[derive(Parser)]
#[command(
    name = "parsetalk",
    version,
    about = "Incremental dependency parsing with call-count instrumentation"
)]
struct Cli {
    /// JSON file presetting any long flag (keys are flag names); flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse one sentence and print the result as JSON.
    Parse {
        grammar: PathBuf,
        kb: PathBuf,
        /// A sentence, or a file holding one.
        input: String,
        #[command(flatten)]
        flags: ParseFlags,
    },
    /// Run systems over a corpus and write metrics.csv and plotdata.json.
    Bench {
        grammar: PathBuf,
        kb: PathBuf,
        corpus: PathBuf,
        #[command(flatten)]
        flags: BenchFlags,
    },
    /// Parse a text utterance by utterance and report anaphora resolution.
    Resolve {
        grammar: PathBuf,
        kb: PathBuf,
        text: PathBuf,
        #[command(flatten)]
        engine: EngineFlags,
    },
}

#[derive(Args)]
struct EngineFlags {
    #[arg(long)]
    seed: Option<u64>,
    /// Preference predicate: all-preferred or closest-attachment.
    #[arg(long)]
    preference: Option<String>,
    /// Memoization pruning of the parse history (restricted mode).
    #[arg(long)]
    pruning: Option<bool>,
    /// Barrier-bounded skipping and backtracking (restricted mode).
    #[arg(long)]
    bounding: Option<bool>,
    #[arg(long)]
    state_ceiling: Option<usize>,
    #[arg(long)]
    ambiguity_cap: Option<usize>,
}

#[derive(Args)]
struct ChartFlags {
    #[arg(long)]
    gap_cap: Option<usize>,
    #[arg(long)]
    edge_ceiling: Option<usize>,
}

#[derive(Args)]
struct ParseFlags {
    /// engine, engine-restricted, engine-exhaustive, chart-standard or chart-discontinuous.
    #[arg(long)]
    system: Option<String>,
    /// restricted or exhaustive (for --system engine).
    #[arg(long)]
    mode: Option<String>,
    /// Print the protocol trace to stderr.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    trace: Option<bool>,
    #[command(flatten)]
    engine: EngineFlags,
    #[command(flatten)]
    chart: ChartFlags,
}

#[derive(Args)]
struct BenchFlags {
    /// Comma-separated system ids.
    #[arg(long)]
    systems: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall-clock milliseconds (makes the CSV run-dependent).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    wall_time: Option<bool>,
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    engine: EngineFlags,
    #[command(flatten)]
    chart: ChartFlags,
}

impl EngineFlags {
    fn into_settings(self, s: Settings) -> Settings {
        Settings {
            seed: self.seed,
            preference: self.preference,
            pruning: self.pruning,
            bounding: self.bounding,
            state_ceiling: self.state_ceiling,
            ambiguity_cap: self.ambiguity_cap,
            ..s
        }
    }
}

impl ChartFlags {
    fn into_settings(self, s: Settings) -> Settings {
        Settings {
            gap_cap: self.gap_cap,
            edge_ceiling: self.edge_ceiling,
            ..s
        }
    }
}

fn load(grammar: &Path, kb: &Path) -> Result<(Grammar, Kb)> {
    let g = load_grammar(grammar).with_context(|| format!("loading grammar {}", grammar.display()))?;
    let kb = load_kb(kb).with_context(|| format!("loading knowledge base {}", kb.display()))?;
    Ok((g, kb))
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn parse_cmd(settings: &Settings, grammar: &Path, kb: &Path, input: &str) -> Result<()> {
    let (g, kb) = load(grammar, kb)?;
    let path = Path::new(input);
    let tokens = if path.is_file() {
        load_text(path)?
    } else {
        tokenize(input)
    };
    let tokens: Vec<&str> = tokens.iter().map(String::as_str).collect();
    let system = settings.single_system()?;
    let cfg = settings.bench_config()?;
    let result = system.parse(&tokens, &g, &kb, &cfg.parse, &cfg.chart, &Metrics::new())?;
    if cfg.parse.trace {
        let mut err = std::io::stderr().lock();
        for e in &result.trace {
            writeln!(err, "{}", trace_line(e))?;
        }
    }
    print_json(&ParseResultDoc::from(&result))
}

fn bench_cmd(settings: &Settings, grammar: &Path, kb: &Path, corpus: &Path) -> Result<()> {
    let (g, kb) = load(grammar, kb)?;
    let sentences = load_corpus(corpus)?;
    let systems = settings.bench_systems()?;
    let out = settings.out.clone().context("missing --out")?;
    let table = run_corpus(&sentences, &g, &kb, &systems, &settings.bench_config()?);
    write_reports(&table, &out).with_context(|| format!("writing reports to {}", out.display()))?;

    let absent = table.cells.iter().filter(|c| c.record.is_none()).count();
    println!("{} cells, {absent} absent", table.cells.len());
    let engine = System::EngineRestricted;
    if systems.contains(&engine) {
        for &baseline in systems.iter().filter(|&&s| s != engine) {
            let factors: Vec<String> = Check::ALL
                .iter()
                .map(|&c| match reduction_factor(&table, baseline, engine, c) {
                    Some(f) => format!("{} {f:.2}", c.id()),
                    None => format!("{} n/a", c.id()),
                })
                .collect();
            println!("reduction {baseline}/{engine}: {}", factors.join(", "));
        }
    }
    Ok(())
}

fn resolve_cmd(settings: &Settings, grammar: &Path, kb: &Path, text: &Path) -> Result<()> {
    let (g, kb) = load(grammar, kb)?;
    let tokens = load_text(text)?;
    let tokens: Vec<&str> = tokens.iter().map(String::as_str).collect();
    let result = parse_text(&tokens, &g, &kb, &settings.parse_config()?, &Metrics::new())?;
    print_json(&TextReportDoc::from(&result))
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => Settings::load(p).with_context(|| format!("reading config {}", p.display()))?,
        None => Settings::default(),
    };
    match cli.command {
        Command::Parse {
            grammar,
            kb,
            input,
            flags,
        } => {
            let s = Settings {
                system: flags.system,
                mode: flags.mode,
                trace: flags.trace,
                ..Default::default()
            };
            let s = flags.chart.into_settings(flags.engine.into_settings(s));
            parse_cmd(&file.overridden_by(s), &grammar, &kb, &input)
        }
        Command::Bench {
            grammar,
            kb,
            corpus,
            flags,
        } => {
            let s = Settings {
                systems: flags.systems,
                out: flags.out,
                wall_time: flags.wall_time,
                threads: flags.threads,
                ..Default::default()
            };
            let s = flags.chart.into_settings(flags.engine.into_settings(s));
            bench_cmd(&file.overridden_by(s), &grammar, &kb, &corpus)
        }
        Command::Resolve {
            grammar,
            kb,
            text,
            engine,
        } => {
            let s = engine.into_settings(Settings::default());
            resolve_cmd(&file.overridden_by(s), &grammar, &kb, &text)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
