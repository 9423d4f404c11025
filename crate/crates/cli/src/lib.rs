//! Command-line front end: argument parsing, dispatch and rendering.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use picalc::encoders::{encode, Encoder, EncoderId};
use picalc::harness::{default_substitutions, gen_terms, pinned_terms, run_gorla_suite, CriteriaReport, Criterion};
use picalc::semantics::{
    always_reaches_success_in, explore, has_divergence_in, reaches_success_in, successors, Bounds, StateGraph, Truth,
    Verdict,
};
use picalc::{format_term, parse_process, parse_term, CalculusId, Process};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const SEPARATION_TERM: &str = "[a=b]ok | [b=a]ok";

#[derive(Parser, Debug)]
#[command(name = "picalc", version, about = "Execute process calculi and check encodings of the match prefix")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print one successor of a term.
    Reduce(TermArgs),
    /// Explore the reduction graph of a term.
    Explore(TermArgs),
    /// Report success reachability, guaranteed success and divergence.
    Check(TermArgs),
    /// Translate a π term.
    Encode(EncodeArgs),
    /// Run the encoding criteria over a corpus.
    Verify(VerifyArgs),
    /// Show the naive encoder breaking success sensitiveness.
    DemoSeparation(Common),
    /// Step through reductions interactively.
    Step(TermArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, default_value_t = 12)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 20000)]
    pub max_states: usize,
    #[arg(long, default_value_t = 3)]
    pub repl_copies: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

impl Common {
    pub fn bounds(&self) -> Bounds {
        Bounds { max_steps: self.max_steps, max_states: self.max_states, repl_copies: self.repl_copies }
    }
}

#[derive(Args, Debug, Clone)]
#[group(id = "input", required = true, multiple = false)]
pub struct Input {
    #[arg(long, group = "input")]
    pub term: Option<String>,
    #[arg(long, group = "input")]
    pub file: Option<std::path::PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct TermArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value = "pi", value_parser = parse_calculus)]
    pub calculus: CalculusId,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_parser = parse_encoder)]
    pub encoder: EncoderId,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// A single term; without it, the pinned terms plus seeded random terms.
    #[arg(long, conflicts_with = "file")]
    pub term: Option<String>,
    /// One term per line; blank lines and lines starting with '#' are skipped.
    #[arg(long)]
    pub file: Option<std::path::PathBuf>,
    #[arg(long, value_parser = parse_encoder)]
    pub encoder: EncoderId,
    /// Number of seeded random terms in the default corpus.
    #[arg(long, default_value_t = 30)]
    pub corpus_size: usize,
    #[arg(long, default_value_t = 4)]
    pub corpus_depth: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

fn parse_calculus(s: &str) -> Result<CalculusId, String> {
    CalculusId::from_tag(s).ok_or_else(|| {
        let tags: Vec<_> = CalculusId::ALL.iter().map(|c| c.tag()).collect();
        format!("unknown calculus '{s}', expected one of {}", tags.join(", "))
    })
}

fn parse_encoder(s: &str) -> Result<EncoderId, String> {
    EncoderId::from_tag(s).ok_or_else(|| {
        let tags: Vec<_> = EncoderId::ALL.iter().map(|e| e.tag()).collect();
        format!("unknown encoder '{s}', expected one of {}", tags.join(", "))
    })
}

/// A failure that ends the command with a status.
#[derive(Debug)]
pub struct Failure {
    pub status: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { status: EXIT_USAGE, message: message.into() }
    }
}

impl From<picalc::Error> for Failure {
    fn from(e: picalc::Error) -> Self {
        let status = match e {
            picalc::Error::Syntax { .. } | picalc::Error::IllFormed { .. } => EXIT_USAGE,
            _ => EXIT_FAIL,
        };
        Failure { status, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { status: EXIT_FAIL, message: e.to_string() }
    }
}

type Outcome = Result<i32, Failure>;

fn read_input(input: &Input) -> Result<String, Failure> {
    match (&input.term, &input.file) {
        (Some(t), _) => Ok(t.clone()),
        (None, Some(f)) => {
            std::fs::read_to_string(f).map_err(|e| Failure::usage(format!("cannot read {}: {e}", f.display())))
        }
        (None, None) => Err(Failure::usage("one of --term or --file is required")),
    }
}

/// Run a parsed command, writing its rendered output to `out`.
pub fn dispatch(cli: Cli, input: &mut dyn BufRead, out: &mut dyn Write) -> Outcome {
    match cli.command {
        Command::Reduce(a) => reduce(&a, out),
        Command::Explore(a) => explore_cmd(&a, out),
        Command::Check(a) => check(&a, out),
        Command::Encode(a) => encode_cmd(&a, out),
        Command::Verify(a) => verify(&a, out),
        Command::DemoSeparation(c) => demo(&c, out),
        Command::Step(a) => step(&a, input, out),
    }
}

fn term_of(a: &TermArgs) -> Result<Process, Failure> {
    Ok(parse_term(&read_input(&a.input)?, a.calculus)?)
}

fn reduce(a: &TermArgs, out: &mut dyn Write) -> Outcome {
    let p = term_of(a)?;
    let next = successors(&p, a.calculus, a.common.repl_copies)?;
    if next.is_empty() {
        writeln!(out, "no reduction")?;
        return Ok(EXIT_PASS);
    }
    let chosen = &next[(a.common.seed % next.len() as u64) as usize];
    match a.common.format {
        Format::Json => writeln!(out, "{}", json(&serde_json::json!({ "successor": chosen.to_string() })))?,
        _ => writeln!(out, "{}", format_term(chosen))?,
    }
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct GraphState {
    id: usize,
    term: String,
    successful: bool,
    terminal: bool,
    frontier: bool,
    successors: Vec<usize>,
}

#[derive(Serialize)]
struct GraphDump {
    calculus: CalculusId,
    bounds: Bounds,
    exhausted: Vec<&'static str>,
    root: usize,
    states: Vec<GraphState>,
}

fn dump(g: &StateGraph, calc: CalculusId) -> GraphDump {
    GraphDump {
        calculus: calc,
        bounds: g.bounds(),
        exhausted: g.exhausted(),
        root: g.root(),
        states: (0..g.len())
            .map(|i| GraphState {
                id: i,
                term: g.state(i).to_string(),
                successful: g.is_successful(i),
                terminal: g.is_terminal(i),
                frontier: g.is_frontier(i),
                successors: g.successors(i).to_vec(),
            })
            .collect(),
    }
}

/// Graphviz rendering: successful states get a double border, frontier states a dashed one.
pub fn to_dot(g: &StateGraph) -> String {
    let mut s = String::from("digraph states {\n  node [shape=box, fontname=\"monospace\"];\n");
    for i in 0..g.len() {
        let mut attrs = vec![format!("label=\"{}\"", escape(&g.state(i).to_string()))];
        if g.is_successful(i) {
            attrs.push("peripheries=2".into());
        }
        if g.is_frontier(i) {
            attrs.push("style=dashed".into());
        }
        let _ = writeln!(s, "  s{i} [{}];", attrs.join(", "));
    }
    for (i, j) in g.edges() {
        let _ = writeln!(s, "  s{i} -> s{j};");
    }
    s.push_str("}\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn explore_cmd(a: &TermArgs, out: &mut dyn Write) -> Outcome {
    let p = term_of(a)?;
    let g = explore(&p, a.calculus, a.common.bounds())?;
    match a.common.format {
        Format::Dot => write!(out, "{}", to_dot(&g))?,
        Format::Json => writeln!(out, "{}", json(&dump(&g, a.calculus)))?,
        Format::Text => {
            for i in 0..g.len() {
                let mut flags = String::new();
                if g.is_successful(i) {
                    flags.push_str(" [ok]");
                }
                if g.is_frontier(i) {
                    flags.push_str(" [frontier]");
                }
                let succ: Vec<String> = g.successors(i).iter().map(|j| j.to_string()).collect();
                writeln!(out, "{i}: {}{flags} -> [{}]", g.state(i), succ.join(", "))?;
            }
            writeln!(out, "{} states; exhausted: {}", g.len(), exhausted_text(&g))?;
        }
    }
    Ok(EXIT_PASS)
}

fn exhausted_text(g: &StateGraph) -> String {
    let e = g.exhausted();
    if e.is_empty() {
        "none".into()
    } else {
        e.join(", ")
    }
}

#[derive(Serialize)]
struct VerdictJson {
    verdict: Truth,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

impl From<&Verdict> for VerdictJson {
    fn from(v: &Verdict) -> Self {
        VerdictJson { verdict: v.value, reason: v.reason.clone() }
    }
}

fn check(a: &TermArgs, out: &mut dyn Write) -> Outcome {
    let p = term_of(a)?;
    let g = explore(&p, a.calculus, a.common.bounds())?;
    let rows = [
        ("reaches_success", reaches_success_in(&g, g.root())),
        ("always_reaches_success", always_reaches_success_in(&g, g.root())),
        ("has_divergence", has_divergence_in(&g, g.root())),
    ];
    match a.common.format {
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = rows
                .iter()
                .map(|(k, v)| (k.to_string(), serde_json::to_value(VerdictJson::from(v)).expect("serializable")))
                .collect();
            writeln!(out, "{}", json(&map))?;
        }
        _ => {
            for (k, v) in &rows {
                writeln!(out, "{k}: {v}")?;
            }
        }
    }
    Ok(EXIT_PASS)
}

fn encode_cmd(a: &EncodeArgs, out: &mut dyn Write) -> Outcome {
    let e = Encoder::new(a.encoder);
    let p = parse_term(&read_input(&a.input)?, e.source)?;
    let t = encode(&e, &p)?;
    match a.common.format {
        Format::Json => writeln!(
            out,
            "{}",
            json(&serde_json::json!({ "encoder": a.encoder.tag(), "target": e.target.tag(), "term": t.to_string() }))
        )?,
        _ => writeln!(out, "{}", format_term(&t))?,
    }
    Ok(EXIT_PASS)
}

fn corpus_of(a: &VerifyArgs) -> Result<Vec<Process>, Failure> {
    if let Some(t) = &a.term {
        return Ok(vec![parse_term(t, CalculusId::Pi)?]);
    }
    if let Some(f) = &a.file {
        let text =
            std::fs::read_to_string(f).map_err(|e| Failure::usage(format!("cannot read {}: {e}", f.display())))?;
        return text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| parse_term(l, CalculusId::Pi).map_err(Failure::from))
            .collect();
    }
    let mut corpus = pinned_terms();
    corpus.extend(gen_terms(a.common.seed, a.corpus_depth.max(1), CalculusId::Pi, a.corpus_size));
    Ok(corpus)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Outcome {
    let corpus = corpus_of(a)?;
    let report = run_gorla_suite(&Encoder::new(a.encoder), &corpus, &default_substitutions(), a.common.bounds())?;
    match a.common.format {
        Format::Json => writeln!(out, "{}", json(&report))?,
        _ => write!(out, "{}", report_text(&report))?,
    }
    Ok(if report.all_pass() { EXIT_PASS } else { EXIT_FAIL })
}

/// Human-readable summary: tallies, then every failure with its witness.
pub fn report_text(r: &CriteriaReport) -> String {
    let mut s = String::new();
    let b = r.bounds;
    let _ = writeln!(
        s,
        "encoder {}: {} terms, max_steps={} max_states={} repl_copies={}",
        r.encoder, r.corpus_size, b.max_steps, b.max_states, b.repl_copies
    );
    let _ = writeln!(s, "equivalence: {}", r.equivalence);
    for c in Criterion::ALL {
        let t = r.tally(c);
        let _ = writeln!(s, "  {:<26} pass {:>3}  fail {:>3}  unknown {:>3}", c.tag(), t.pass, t.fail, t.unknown);
    }
    for f in r.results.iter().filter(|f| f.verdict != Truth::Yes) {
        let _ = write!(s, "{} {}: {}", f.verdict, f.criterion, f.term);
        if let Some(reason) = &f.reason {
            let _ = write!(s, " ({reason})");
        }
        s.push('\n');
        if let Some(w) = &f.witness {
            if let Some(sub) = &w.substitution {
                let _ = writeln!(s, "    substitution {sub}");
            }
            if !w.note.is_empty() {
                let _ = writeln!(s, "    {}", w.note);
            }
            for (k, t) in w.trace.iter().enumerate() {
                let _ = writeln!(s, "    {k}: {t}");
            }
        }
    }
    s
}

fn demo(c: &Common, out: &mut dyn Write) -> Outcome {
    let term = parse_process(SEPARATION_TERM)?;
    let report = run_gorla_suite(&Encoder::new(EncoderId::NaivePix), &[term], &default_substitutions(), c.bounds())?;
    let failure = report.failures().find(|f| f.criterion == Criterion::SuccessSensitiveness).cloned();
    match c.format {
        Format::Json => writeln!(out, "{}", json(&report))?,
        _ => {
            writeln!(out, "source {SEPARATION_TERM} under the naive match-free encoder")?;
            match &failure {
                Some(f) => {
                    let w = f.witness.as_ref().expect("a failure carries a witness");
                    writeln!(out, "success sensitiveness: no")?;
                    writeln!(out, "{}", w.note)?;
                    for (k, t) in w.trace.iter().enumerate() {
                        writeln!(out, "  {k}: {t}")?;
                    }
                }
                None => writeln!(out, "success sensitiveness: not violated within bounds")?,
            }
        }
    }
    Ok(if report.all_pass() { EXIT_PASS } else { EXIT_FAIL })
}

fn step(a: &TermArgs, input: &mut dyn BufRead, out: &mut dyn Write) -> Outcome {
    let mut current = term_of(a)?;
    let mut line = String::new();
    loop {
        writeln!(out, "{}", format_term(&current))?;
        let next = successors(&current, a.calculus, a.common.repl_copies)?;
        if next.is_empty() {
            writeln!(out, "no further reductions")?;
            return Ok(EXIT_PASS);
        }
        for (k, n) in next.iter().enumerate() {
            writeln!(out, "  [{}] {}", k + 1, format_term(n))?;
        }
        write!(out, "choose 1-{} or q: ", next.len())?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            return Ok(EXIT_PASS);
        }
        let answer = line.trim();
        if answer == "q" {
            return Ok(EXIT_PASS);
        }
        match answer.parse::<usize>() {
            Ok(k) if (1..=next.len()).contains(&k) => current = next[k - 1].clone(),
            _ => writeln!(out, "expected a number between 1 and {}", next.len())?,
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report types serialize")
}
