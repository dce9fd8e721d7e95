// SPDX-License-Identifier: MIT OR Apache-2.0

//! `sremo` command-line tool.
//!
//! Exit codes: 0 success, 1 match-phase failure, 2 pattern error, 3 I/O error.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sremo::srt::accepts;
use sremo::windowing::{complement, determinize};
use sremo::{
    compile, make_streaming, parse_pattern, read_stream, Counters, Engine, Error, Event, Pattern,
    Schema, Srt, Strategy, Value,
};

#[derive(Parser)]
#[command(
    name = "sremo",
    version,
    about = "Complex event recognition with register transducers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a pattern and print a summary of the automaton.
    Compile {
        #[command(flatten)]
        pattern: PatternArgs,
        /// Write the automaton in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Stream a CSV file through a pattern and print matches.
    Match {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long)]
        stream: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
    /// Measure throughput over a CSV file.
    Bench {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long)]
        stream: PathBuf,
        #[arg(long, default_value_t = 3)]
        repeat: u32,
        /// Numeric attribute used by the counting sink; the event index by default.
        #[arg(long)]
        field: Option<String>,
    },
    /// Build the output-agnostic deterministic automaton of a windowed pattern.
    Determinize {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Check that a pattern's deterministic automaton and its complement
    /// disagree on every window-sized suffix of a stream.
    ComplementCheck {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long)]
        stream: PathBuf,
    },
}

#[derive(Args)]
struct PatternArgs {
    #[arg(long)]
    pattern: PathBuf,
    #[arg(long)]
    schema: PathBuf,
    /// Override the pattern window.
    #[arg(long)]
    window: Option<u64>,
    /// Selection strategy for the top-level sequence when the pattern names none.
    #[arg(long, value_enum, default_value_t = StrategyArg::Strict)]
    strategy: StrategyArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Strict,
    Any,
    Next,
}

enum Failure {
    Match(String),
    Pattern(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Match(_) => 1,
            Failure::Pattern(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Match(m) | Failure::Pattern(m) | Failure::Io(m) => m,
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn pattern_error(e: Error) -> Failure {
    Failure::Pattern(e.to_string())
}

fn match_error(e: Error) -> Failure {
    Failure::Match(e.to_string())
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_pattern(args: &PatternArgs) -> CliResult<Pattern> {
    let schema = Arc::new(Schema::parse(&read_file(&args.schema)?).map_err(pattern_error)?);
    let text = read_file(&args.pattern)?;
    let mut p = parse_pattern(&text, &schema).map_err(pattern_error)?;
    if args.window.is_some() {
        p = p.with_window(args.window);
        p.validate().map_err(pattern_error)?;
    }
    let strategy = match args.strategy {
        StrategyArg::Strict => Strategy::Strict,
        StrategyArg::Any => Strategy::Any,
        StrategyArg::Next => Strategy::Next,
    };
    Ok(p.with_strategy(strategy))
}

fn load_stream(schema: &Schema, path: &Path) -> CliResult<Vec<Arc<Event>>> {
    let file = fs::File::open(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    read_stream(schema, io::BufReader::new(file)).map_err(|e| match e {
        Error::Stream { .. } => Failure::Io(format!("{}: {e}", path.display())),
        other => match_error(other),
    })
}

fn summary(t: &Srt) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "states={}", t.num_states());
    let _ = writeln!(s, "transitions={}", t.transitions().len());
    let _ = writeln!(s, "finals={}", t.finals().count());
    let _ = writeln!(s, "registers={}", t.registers.len());
    let _ = writeln!(s, "register_names={}", t.registers.names().join(","));
    s
}

fn cmd_compile(args: &PatternArgs, dot: Option<&Path>) -> CliResult<()> {
    let p = load_pattern(args)?;
    let t = compile(&p).map_err(pattern_error)?;
    print!("{}", summary(&t));
    if let Some(w) = p.window() {
        println!("window={w}");
    }
    if let Some(path) = dot {
        write_file(path, &t.to_dot())?;
    }
    Ok(())
}

fn cmd_match(args: &PatternArgs, stream: &Path, format: Format) -> CliResult<()> {
    let p = load_pattern(args)?;
    let compiled = make_streaming(&p).map_err(pattern_error)?;
    let events = load_stream(&p.schema, stream)?;
    let mut engine = Engine::new(&compiled).map_err(pattern_error)?;
    let out = io::stdout();
    let mut out = BufWriter::new(out.lock());
    let mut io_error = None;
    let mut sink = |detection: u64, indices: &[u64]| {
        let line = match format {
            Format::Tsv => {
                let list: Vec<String> = indices.iter().map(u64::to_string).collect();
                format!("{detection}\t{}", list.join(","))
            }
            Format::Json => json!({ "detection": detection, "indices": indices }).to_string(),
        };
        if let Err(e) = writeln!(out, "{line}") {
            io_error.get_or_insert(e);
        }
    };
    engine.run_stream(&events, &mut sink).map_err(match_error)?;
    if let Some(e) = io_error {
        return Err(Failure::Io(e.to_string()));
    }
    out.flush().map_err(|e| Failure::Io(e.to_string()))
}

/// Counts marked events whose chosen field is divisible by ten.
struct CountingSink {
    field: Option<usize>,
    events: Vec<Arc<Event>>,
    count: u64,
}

impl CountingSink {
    fn key(&self, index: u64) -> Option<i64> {
        let e = &self.events[index as usize - 1];
        match self.field {
            None => Some(e.index as i64),
            Some(a) => match e.get(a) {
                Value::Int(i) => Some(*i),
                Value::Real(r) => Some(r.floor() as i64),
                Value::Str(_) => None,
            },
        }
    }
}

impl sremo::MatchSink for CountingSink {
    fn emit(&mut self, _detection: u64, indices: &[u64]) {
        for &i in indices {
            if self.key(i).is_some_and(|k| k.rem_euclid(10) == 0) {
                self.count += 1;
            }
        }
    }
}

fn cmd_bench(args: &PatternArgs, stream: &Path, repeat: u32, field: Option<&str>) -> CliResult<()> {
    let p = load_pattern(args)?;
    let compiled = make_streaming(&p).map_err(pattern_error)?;
    let events = load_stream(&p.schema, stream)?;
    let field = match field {
        None => None,
        Some(name) => Some(
            p.schema
                .attr(name)
                .ok_or_else(|| pattern_error(Error::UnknownAttribute(name.to_string())))?,
        ),
    };
    let repeat = repeat.max(1);
    let mut total_ns: u128 = 0;
    let mut counters = Counters::default();
    let mut peak = 0usize;
    let mut sink_count = 0;
    for _ in 0..repeat {
        let mut engine = Engine::new(&compiled).map_err(pattern_error)?;
        let mut sink = CountingSink {
            field,
            events: events.clone(),
            count: 0,
        };
        peak = engine.stats().active_runs;
        let start = Instant::now();
        for e in &events {
            engine.advance_into(e, &mut sink).map_err(match_error)?;
            peak = peak.max(engine.stats().active_runs);
        }
        total_ns += start.elapsed().as_nanos();
        counters = engine.stats().counters;
        sink_count = sink.count;
    }
    let mean_ns = total_ns / repeat as u128;
    let eps = if mean_ns == 0 {
        0.0
    } else {
        events.len() as f64 / (mean_ns as f64 / 1e9)
    };
    println!("repeat={repeat}");
    println!("events_consumed={}", events.len());
    println!("matches_emitted={}", counters.matches_emitted);
    println!("elapsed_ns={mean_ns}");
    println!("events_per_second={eps:.1}");
    println!("peak_active_runs={peak}");
    println!("sink_count={sink_count}");
    println!("predicate_evaluations={}", counters.predicate_evaluations);
    println!("run_clones={}", counters.run_clones);
    println!("run_updates={}", counters.run_updates);
    println!("runs_created={}", counters.runs_created);
    println!("runs_discarded={}", counters.runs_discarded);
    println!("runs_completed={}", counters.runs_completed);
    Ok(())
}

fn cmd_determinize(args: &PatternArgs, dot: Option<&Path>) -> CliResult<()> {
    let p = load_pattern(args)?;
    let d = determinize(&p).map_err(pattern_error)?;
    if !d.coreachable()[d.start as usize] {
        eprintln!("warning: the window is shorter than every accepting walk; the automaton accepts nothing");
    }
    print!("{}", summary(&d));
    if let Some(path) = dot {
        write_file(path, &d.to_dot())?;
    }
    Ok(())
}

fn cmd_complement_check(args: &PatternArgs, stream: &Path) -> CliResult<()> {
    let p = load_pattern(args)?;
    let w = p
        .window()
        .ok_or_else(|| pattern_error(Error::WindowRequired))? as usize;
    let d = determinize(&p).map_err(pattern_error)?;
    let c = complement(&d).map_err(pattern_error)?;
    let events = load_stream(&p.schema, stream)?;
    let mut checked = 0u64;
    for k in 1..=events.len() {
        for m in k.saturating_sub(w)..k {
            let suffix: Vec<Arc<Event>> = events[m..k]
                .iter()
                .enumerate()
                .map(|(i, e)| Arc::new(e.reindexed(i as u64 + 1)))
                .collect();
            checked += 1;
            if accepts(&d, &suffix) == accepts(&c, &suffix) {
                println!(
                    "FAIL complement-check: events {}..={} accepted by both or neither",
                    m + 1,
                    k
                );
                return Err(Failure::Match("complement check failed".into()));
            }
        }
    }
    println!("PASS complement-check: {checked} suffixes");
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Compile { pattern, dot } => cmd_compile(pattern, dot.as_deref()),
        Command::Match {
            pattern,
            stream,
            format,
        } => cmd_match(pattern, stream, *format),
        Command::Bench {
            pattern,
            stream,
            repeat,
            field,
        } => cmd_bench(pattern, stream, *repeat, field.as_deref()),
        Command::Determinize { pattern, dot } => cmd_determinize(pattern, dot.as_deref()),
        Command::ComplementCheck { pattern, stream } => cmd_complement_check(pattern, stream),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
