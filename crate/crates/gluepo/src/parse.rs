//! Text formats for the three model kinds, with line/column diagnostics
//! and canonical emitters that round-trip byte-stably.
//!
//! PTI-net format (one declaration per line, `#` comments):
//! ```text
//! net <id>
//! place <id> [init <n>]
//! trans <id>
//! arc <src> -> <dst> [<weight>]
//! inhibit <place> <trans>
//! ```
//!
//! CTS format:
//! ```text
//! system <id>
//! agent <id>
//! state <id> [listen <chan>,...]      # `*` is implicit everywhere
//! init <state>
//! trans <src> -> <dst> on <payload> <!|?> <chan>
//! ```
//!
//! Asynchronous automata reuse the CTS shape with `process` stanzas and
//! plain letters: `trans <src> -> <dst> on <letter>`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use gluepo_core::async_automata::{AsyncSystem, Process};
use gluepo_core::cts::{CtsAgent, CtsSystem, Polarity, TransLabel, STAR};
use gluepo_core::pti::{Marking, PtiNet};
use thiserror::Error;

/// A parsed model of any kind.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Model {
    Pti(PtiNet),
    Cts(CtsSystem),
    Async(AsyncSystem),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Pti(_) => "pti",
            Model::Cts(_) => "cts",
            Model::Async(_) => "async",
        }
    }
}

/// A diagnostic with its position in the source text.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

/// Tokenized line with the position of each token.
struct Line<'a> {
    number: usize,
    tokens: Vec<(usize, &'a str)>,
}

impl<'a> Line<'a> {
    fn keyword(&self) -> &'a str {
        self.tokens[0].1
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.number, self.tokens[0].0, message)
    }

    fn arg(&self, i: usize, what: &str) -> Result<&'a str, ParseError> {
        self.tokens
            .get(i + 1)
            .map(|(_, t)| *t)
            .ok_or_else(|| self.err(format!("`{}` needs {what}", self.keyword())))
    }

    /// Rejects tokens after argument index `after`.
    fn no_more(&self, after: usize) -> Result<(), ParseError> {
        match self.tokens.get(after + 2) {
            Some((col, tok)) => Err(ParseError::new(
                self.number,
                *col,
                format!("unexpected `{tok}`"),
            )),
            None => Ok(()),
        }
    }
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut col = 0;
        for tok in body.split_whitespace() {
            let at = body[col..].find(tok).map(|o| col + o).unwrap_or(col);
            tokens.push((at + 1, tok));
            col = at + tok.len();
        }
        if !tokens.is_empty() {
            lines.push(Line {
                number: i + 1,
                tokens,
            });
        }
    }
    lines
}

/// Parses a model, detecting its kind from the header and stanzas.
pub fn parse_model(text: &str) -> Result<Model, ParseError> {
    let lines = tokenize(text);
    let Some(first) = lines.first() else {
        return Err(ParseError::new(1, 1, "missing header"));
    };
    match first.keyword() {
        "net" => parse_pti(&lines).map(Model::Pti),
        "system" => {
            let stanza = lines.iter().skip(1).find_map(|l| match l.keyword() {
                "agent" => Some("agent"),
                "process" => Some("process"),
                _ => None,
            });
            match stanza {
                Some("process") => parse_async(&lines).map(Model::Async),
                _ => parse_cts(&lines).map(Model::Cts),
            }
        }
        other => Err(first.err(format!(
            "expected `net` or `system` header, found `{other}`"
        ))),
    }
}

fn parse_pti(lines: &[Line<'_>]) -> Result<PtiNet, ParseError> {
    let mut net = PtiNet::default();
    let mut init: BTreeMap<String, u32> = BTreeMap::new();
    for line in &lines[1..] {
        match line.keyword() {
            "place" => {
                let id = line.arg(0, "a place id")?;
                net.places.insert(id.to_owned());
                if line.tokens.len() > 2 {
                    if line.arg(1, "")? != "init" {
                        return Err(line.err("expected `init <n>` after the place id"));
                    }
                    let n: u32 = line
                        .arg(2, "a token count")?
                        .parse()
                        .map_err(|_| line.err("token count must be a natural number"))?;
                    if n > 0 {
                        init.insert(id.to_owned(), n);
                    }
                    line.no_more(2)?;
                }
            }
            "trans" => {
                net.transitions
                    .insert(line.arg(0, "a transition id")?.to_owned());
                line.no_more(0)?;
            }
            "arc" => {
                let src = line.arg(0, "a source id")?;
                if line.arg(1, "`->`")? != "->" {
                    return Err(line.err("expected `->` between source and target"));
                }
                let dst = line.arg(2, "a target id")?;
                let weight = match line.tokens.get(4) {
                    Some((col, tok)) => tok.parse::<u32>().map_err(|_| {
                        ParseError::new(line.number, *col, "weight must be a natural number")
                    })?,
                    None => 1,
                };
                if weight == 0 {
                    return Err(line.err("arc weight must be at least 1"));
                }
                line.no_more(if line.tokens.len() > 4 { 3 } else { 2 })?;
                net.flow.insert((src.to_owned(), dst.to_owned()), weight);
            }
            "inhibit" => {
                let place = line.arg(0, "a place id")?;
                let trans = line.arg(1, "a transition id")?;
                line.no_more(1)?;
                net.inhibitors.insert((place.to_owned(), trans.to_owned()));
            }
            other => return Err(line.err(format!("unknown declaration `{other}`"))),
        }
    }
    net.initial = Marking::from_counts(init);
    net.check()
        .map_err(|e| ParseError::new(lines[0].number, 1, format!("invalid net: {e:?}")))?;
    Ok(net)
}

fn parse_cts(lines: &[Line<'_>]) -> Result<CtsSystem, ParseError> {
    let mut sys = CtsSystem::default();
    let mut current: Option<CtsAgent> = None;
    for line in &lines[1..] {
        if line.keyword() == "agent" {
            if let Some(agent) = current.take() {
                sys.agents.push(agent);
            }
            current = Some(CtsAgent {
                name: line.arg(0, "an agent id")?.to_owned(),
                ..CtsAgent::default()
            });
            line.no_more(0)?;
            continue;
        }
        let Some(agent) = current.as_mut() else {
            return Err(line.err("declaration outside an `agent` stanza"));
        };
        match line.keyword() {
            "state" => {
                let id = line.arg(0, "a state id")?;
                agent.states.insert(id.to_owned());
                if line.tokens.len() > 2 {
                    if line.arg(1, "")? != "listen" {
                        return Err(line.err("expected `listen <chan>,...` after the state id"));
                    }
                    let chans = line.arg(2, "a channel list")?;
                    line.no_more(2)?;
                    let listen: std::collections::BTreeSet<String> = chans
                        .split(',')
                        .filter(|c| !c.is_empty() && *c != STAR)
                        .map(str::to_owned)
                        .collect();
                    if !listen.is_empty() {
                        agent.listening.insert(id.to_owned(), listen);
                    }
                }
            }
            "init" => {
                agent.initial = line.arg(0, "a state id")?.to_owned();
                line.no_more(0)?;
            }
            "trans" => {
                let src = line.arg(0, "a source state")?;
                if line.arg(1, "`->`")? != "->" {
                    return Err(line.err("expected `->` between states"));
                }
                let dst = line.arg(2, "a target state")?;
                if line.arg(3, "`on`")? != "on" {
                    return Err(line.err("expected `on <payload> <!|?> <chan>`"));
                }
                let payload = line.arg(4, "a payload")?;
                let polarity = match line.arg(5, "`!` or `?`")? {
                    "!" => Polarity::Send,
                    "?" => Polarity::Recv,
                    other => return Err(line.err(format!("expected `!` or `?`, found `{other}`"))),
                };
                let chan = line.arg(6, "a channel")?;
                line.no_more(6)?;
                let label = TransLabel {
                    payload: payload.to_owned(),
                    polarity,
                    channel: chan.to_owned(),
                };
                agent
                    .transitions
                    .insert((src.to_owned(), label, dst.to_owned()));
            }
            other => return Err(line.err(format!("unknown declaration `{other}`"))),
        }
    }
    if let Some(agent) = current.take() {
        sys.agents.push(agent);
    }
    sys.check()
        .map_err(|e| ParseError::new(lines[0].number, 1, format!("invalid system: {e}")))?;
    Ok(sys)
}

fn parse_async(lines: &[Line<'_>]) -> Result<AsyncSystem, ParseError> {
    let mut sys = AsyncSystem::default();
    let mut current: Option<Process> = None;
    for line in &lines[1..] {
        if line.keyword() == "process" {
            if let Some(p) = current.take() {
                sys.processes.push(p);
            }
            current = Some(Process {
                name: line.arg(0, "a process id")?.to_owned(),
                ..Process::default()
            });
            line.no_more(0)?;
            continue;
        }
        let Some(p) = current.as_mut() else {
            return Err(line.err("declaration outside a `process` stanza"));
        };
        match line.keyword() {
            "state" => {
                p.states.insert(line.arg(0, "a state id")?.to_owned());
                line.no_more(0)?;
            }
            "init" => {
                p.initial = line.arg(0, "a state id")?.to_owned();
                line.no_more(0)?;
            }
            "trans" => {
                let src = line.arg(0, "a source state")?;
                if line.arg(1, "`->`")? != "->" {
                    return Err(line.err("expected `->` between states"));
                }
                let dst = line.arg(2, "a target state")?;
                if line.arg(3, "`on`")? != "on" {
                    return Err(line.err("expected `on <letter>`"));
                }
                let letter = line.arg(4, "a letter")?;
                line.no_more(4)?;
                p.alphabet.insert(letter.to_owned());
                p.delta
                    .insert((src.to_owned(), letter.to_owned(), dst.to_owned()));
            }
            other => return Err(line.err(format!("unknown declaration `{other}`"))),
        }
    }
    if let Some(p) = current.take() {
        sys.processes.push(p);
    }
    sys.check()
        .map_err(|e| ParseError::new(lines[0].number, 1, format!("invalid system: {e}")))?;
    Ok(sys)
}

/// Canonical emission; `parse_model(emit_model(m)) == m` byte-stably.
pub fn emit_model(model: &Model) -> String {
    match model {
        Model::Pti(net) => emit_pti(net),
        Model::Cts(sys) => emit_cts(sys),
        Model::Async(sys) => emit_async(sys),
    }
}

pub fn emit_pti(net: &PtiNet) -> String {
    let mut out = String::from("net n\n");
    for p in &net.places {
        let init = net.initial.get(p);
        if init > 0 {
            let _ = writeln!(out, "place {p} init {init}");
        } else {
            let _ = writeln!(out, "place {p}");
        }
    }
    for t in &net.transitions {
        let _ = writeln!(out, "trans {t}");
    }
    for ((src, dst), w) in &net.flow {
        if *w == 1 {
            let _ = writeln!(out, "arc {src} -> {dst}");
        } else {
            let _ = writeln!(out, "arc {src} -> {dst} {w}");
        }
    }
    for (p, t) in &net.inhibitors {
        let _ = writeln!(out, "inhibit {p} {t}");
    }
    out
}

pub fn emit_cts(sys: &CtsSystem) -> String {
    let mut out = String::from("system s\n");
    for agent in &sys.agents {
        let _ = writeln!(out, "agent {}", agent.name);
        for s in &agent.states {
            match agent.listening.get(s).filter(|l| !l.is_empty()) {
                Some(listen) => {
                    let chans: Vec<&str> = listen.iter().map(String::as_str).collect();
                    let _ = writeln!(out, "state {s} listen {}", chans.join(","));
                }
                None => {
                    let _ = writeln!(out, "state {s}");
                }
            }
        }
        let _ = writeln!(out, "init {}", agent.initial);
        for (src, label, dst) in &agent.transitions {
            let p = match label.polarity {
                Polarity::Send => "!",
                Polarity::Recv => "?",
            };
            let _ = writeln!(
                out,
                "trans {src} -> {dst} on {} {p} {}",
                label.payload, label.channel
            );
        }
    }
    out
}

pub fn emit_async(sys: &AsyncSystem) -> String {
    let mut out = String::from("system s\n");
    for p in &sys.processes {
        let _ = writeln!(out, "process {}", p.name);
        for s in &p.states {
            let _ = writeln!(out, "state {s}");
        }
        let _ = writeln!(out, "init {}", p.initial);
        for (src, letter, dst) in &p.delta {
            let _ = writeln!(out, "trans {src} -> {dst} on {letter}");
        }
    }
    out
}
