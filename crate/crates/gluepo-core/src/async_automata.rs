//! Baseline LPO semantics for asynchronous automata.
//!
//! Processes synchronize on shared letters with a fixed participant
//! structure: every process owning a letter takes part in every event with
//! that letter. Because the interaction structure never changes, the
//! interleaving relation stays empty and the glued form of a computation
//! has no glue — it is refined only by itself.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::po::{ElementId, GluedLpo, Lpo};

/// Label and identifier of the joint initial edge.
pub const INIT_EDGE: &str = "init";

/// Characters with structural meaning inside async element identifiers.
const ASYNC_DELIMITERS: &[char] = &['<', '>', '{', '}', '|', ':', ','];

/// One sequential process: an alphabet, states, and a step relation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct Process {
    pub name: String,
    pub alphabet: BTreeSet<String>,
    pub states: BTreeSet<String>,
    pub initial: String,
    pub delta: BTreeSet<(String, String, String)>,
}

/// Structural problems with a process or system definition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AsyncError {
    UnknownState(String),
    UnknownLetter(String),
    NoInitialState(String),
    ReservedName(String),
    EmptyProcess(String),
}

impl fmt::Display for AsyncError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AsyncError::UnknownState(s) => write!(f, "unknown state `{s}`"),
            AsyncError::UnknownLetter(a) => write!(f, "undeclared letter `{a}`"),
            AsyncError::NoInitialState(p) => write!(f, "process `{p}` has no initial state"),
            AsyncError::ReservedName(n) => write!(f, "`{n}` is a reserved name"),
            AsyncError::EmptyProcess(p) => write!(f, "process `{p}` has no states"),
        }
    }
}

impl Process {
    pub fn check(&self) -> Result<(), AsyncError> {
        if self.states.is_empty() {
            return Err(AsyncError::EmptyProcess(self.name.clone()));
        }
        if !self.states.contains(&self.initial) {
            return Err(AsyncError::NoInitialState(self.name.clone()));
        }
        let reserved = |n: &str| n == INIT_EDGE || n.is_empty() || n.contains(ASYNC_DELIMITERS);
        if reserved(&self.name) {
            return Err(AsyncError::ReservedName(self.name.clone()));
        }
        for s in &self.states {
            if reserved(s) {
                return Err(AsyncError::ReservedName(s.clone()));
            }
        }
        for a in &self.alphabet {
            if reserved(a) {
                return Err(AsyncError::ReservedName(a.clone()));
            }
        }
        for (s, a, s2) in &self.delta {
            if !self.states.contains(s) {
                return Err(AsyncError::UnknownState(s.clone()));
            }
            if !self.states.contains(s2) {
                return Err(AsyncError::UnknownState(s2.clone()));
            }
            if !self.alphabet.contains(a) {
                return Err(AsyncError::UnknownLetter(a.clone()));
            }
        }
        Ok(())
    }

    pub fn targets(&self, state: &str, letter: &str) -> Vec<&str> {
        self.delta
            .iter()
            .filter(|(s, a, _)| s == state && a == letter)
            .map(|(_, _, s2)| s2.as_str())
            .collect()
    }
}

/// An ordered list of processes forming an asynchronous automaton.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct AsyncSystem {
    pub processes: Vec<Process>,
}

impl AsyncSystem {
    pub fn check(&self) -> Result<(), AsyncError> {
        let mut names = BTreeSet::new();
        for p in &self.processes {
            p.check()?;
            if !names.insert(p.name.as_str()) {
                return Err(AsyncError::ReservedName(p.name.clone()));
            }
        }
        Ok(())
    }

    /// Union of the process alphabets.
    pub fn alphabet(&self) -> BTreeSet<&str> {
        self.processes
            .iter()
            .flat_map(|p| p.alphabet.iter())
            .map(String::as_str)
            .collect()
    }

    /// Indices of the processes owning `letter`.
    pub fn participants(&self, letter: &str) -> Vec<usize> {
        self.processes
            .iter()
            .enumerate()
            .filter(|(_, p)| p.alphabet.contains(letter))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn process_index(&self, name: &str) -> Option<usize> {
        self.processes.iter().position(|p| p.name == name)
    }

    pub fn initial_states(&self) -> Vec<String> {
        self.processes.iter().map(|p| p.initial.clone()).collect()
    }
}

/// The state sequence one process has moved through; identifier
/// `<process:s0,s1,...>`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ProcessHistory {
    pub process: usize,
    pub states: Vec<String>,
}

impl ProcessHistory {
    pub fn last(&self) -> &str {
        self.states.last().expect("histories are non-empty")
    }

    pub fn id(&self, sys: &AsyncSystem) -> ElementId {
        let name = &sys.processes[self.process].name;
        ElementId::new(format!("<{}:{}>", name, self.states.join(",")))
    }

    pub fn parse(s: &str, sys: &AsyncSystem) -> Option<ProcessHistory> {
        let inner = s.strip_prefix('<')?.strip_suffix('>')?;
        let (name, states) = inner.split_once(':')?;
        let process = sys.process_index(name)?;
        let states: Vec<String> = states.split(',').map(str::to_owned).collect();
        if states.iter().any(String::is_empty) {
            return None;
        }
        Some(ProcessHistory { process, states })
    }

    /// Is this a run of its process: starts initial, steps δ-conformant?
    pub fn conformant(&self, sys: &AsyncSystem) -> bool {
        let p = &sys.processes[self.process];
        if self.states.first().map(String::as_str) != Some(p.initial.as_str()) {
            return false;
        }
        self.states
            .windows(2)
            .all(|w| p.delta.iter().any(|(s, _, s2)| *s == w[0] && *s2 == w[1]))
    }
}

/// Canonical identity of a joint event: the participants' predecessor
/// histories and the letter; rendered `{h1,h2|letter}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct AsyncEdgeId {
    pub preset: BTreeSet<ProcessHistory>,
    pub letter: String,
}

impl AsyncEdgeId {
    pub fn id(&self, sys: &AsyncSystem) -> ElementId {
        let hists: Vec<String> = self.preset.iter().map(|h| h.id(sys).0).collect();
        ElementId::new(format!("{{{}|{}}}", hists.join(","), self.letter))
    }

    pub fn parse(s: &str, sys: &AsyncSystem) -> Option<AsyncEdgeId> {
        let inner = s.strip_prefix('{')?.strip_suffix('}')?;
        let (hists, letter) = inner.rsplit_once('|')?;
        if letter.is_empty() {
            return None;
        }
        let mut preset = BTreeSet::new();
        let mut rest = hists;
        while !rest.is_empty() {
            let end = rest.find('>')?;
            let h = ProcessHistory::parse(&rest[..=end], sys)?;
            if !preset.insert(h) {
                return None;
            }
            rest = rest[end + 1..]
                .strip_prefix(',')
                .unwrap_or(&rest[end + 1..]);
        }
        if preset.is_empty() {
            return None;
        }
        Some(AsyncEdgeId {
            preset,
            letter: letter.to_owned(),
        })
    }
}

/// One resolved joint step: the letter and every participant's next state.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct AsyncStep {
    pub letter: String,
    pub targets: BTreeMap<usize, String>,
}

/// All resolved joint steps from `states`, in deterministic order.
fn step_choices(sys: &AsyncSystem, states: &[String]) -> Vec<AsyncStep> {
    let mut out = BTreeSet::new();
    for letter in sys.alphabet() {
        let participants = sys.participants(letter);
        let mut resolutions: Vec<BTreeMap<usize, String>> = alloc::vec![BTreeMap::new()];
        let mut blocked = false;
        for &i in &participants {
            let targets = sys.processes[i].targets(&states[i], letter);
            if targets.is_empty() {
                blocked = true;
                break;
            }
            let mut next = Vec::new();
            for partial in &resolutions {
                for t in &targets {
                    let mut with = partial.clone();
                    with.insert(i, (*t).to_owned());
                    next.push(with);
                }
            }
            resolutions = next;
        }
        if blocked {
            continue;
        }
        for targets in resolutions {
            out.insert(AsyncStep {
                letter: letter.to_owned(),
                targets,
            });
        }
    }
    out.into_iter().collect()
}

/// All executions of length ≤ `max_events`, including every prefix.
pub fn async_executions(sys: &AsyncSystem, max_events: usize) -> Vec<Vec<AsyncStep>> {
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    fn go(
        sys: &AsyncSystem,
        states: &[String],
        prefix: &mut Vec<AsyncStep>,
        max: usize,
        out: &mut Vec<Vec<AsyncStep>>,
    ) {
        out.push(prefix.clone());
        if prefix.len() == max {
            return;
        }
        for step in step_choices(sys, states) {
            let mut next: Vec<String> = states.to_owned();
            for (&i, s) in &step.targets {
                next[i] = s.clone();
            }
            prefix.push(step);
            go(sys, &next, prefix, max, out);
            prefix.pop();
        }
    }
    go(
        sys,
        &sys.initial_states(),
        &mut prefix,
        max_events,
        &mut out,
    );
    out
}

/// Builds the LPO of an execution; the interleaving relation is empty.
pub fn lpo_from_async_execution(sys: &AsyncSystem, exec: &[AsyncStep]) -> Lpo {
    let mut lpo = Lpo::default();
    let init = ElementId::new(INIT_EDGE);
    lpo.edges.insert(init.clone());
    lpo.edge_label.insert(init.clone(), INIT_EDGE.to_owned());

    let mut current: Vec<ProcessHistory> = Vec::new();
    for (i, p) in sys.processes.iter().enumerate() {
        let h = ProcessHistory {
            process: i,
            states: alloc::vec![p.initial.clone()],
        };
        let id = h.id(sys);
        lpo.nodes.insert(id.clone());
        lpo.node_label.insert(id.clone(), id.0.clone());
        lpo.comm.insert((init.clone(), id));
        current.push(h);
    }

    for step in exec {
        let preset: BTreeSet<ProcessHistory> =
            step.targets.keys().map(|&i| current[i].clone()).collect();
        let edge = AsyncEdgeId {
            preset,
            letter: step.letter.clone(),
        };
        let eid = edge.id(sys);
        lpo.edges.insert(eid.clone());
        lpo.edge_label.insert(eid.clone(), step.letter.clone());
        for (&i, target) in &step.targets {
            lpo.comm.insert((current[i].id(sys), eid.clone()));
            let mut states = current[i].states.clone();
            states.push(target.clone());
            let post = ProcessHistory { process: i, states };
            let post_id = post.id(sys);
            lpo.nodes.insert(post_id.clone());
            lpo.node_label.insert(post_id.clone(), post_id.0.clone());
            lpo.comm.insert((eid.clone(), post_id));
            current[i] = post;
        }
    }
    lpo
}

/// A violated clause of the asynchronous computation definition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AsyncViolation {
    Generic(crate::po::Violation),
    /// Asynchronous automata use the communication relation only.
    InterleavePresent(crate::po::Pair),
    UnparsableNode(ElementId),
    UnparsableEdge(ElementId),
    BadHistory(ElementId),
    WrongLabel(ElementId),
    /// 1: init edge missing, not minimal, or an initial history unfed.
    InitialWiring(ElementId),
    /// 2: producer missing, not unique, or not δ-conformant.
    Producer(ElementId),
    /// 3: more than one successor event.
    Successors(ElementId),
    /// 4: participant set differs from the letter's owners, or the per
    /// participant pre/post wiring is broken.
    Participants(ElementId),
}

impl fmt::Display for AsyncViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AsyncViolation::Generic(v) => write!(f, "{v}"),
            AsyncViolation::InterleavePresent((a, b)) => {
                write!(
                    f,
                    "interleave pair ({a}, {b}) in an asynchronous computation"
                )
            }
            AsyncViolation::UnparsableNode(id) => write!(f, "node id `{id}` is not a history"),
            AsyncViolation::UnparsableEdge(id) => write!(f, "edge id `{id}` is not an event"),
            AsyncViolation::BadHistory(id) => write!(f, "`{id}` is not a run of its process"),
            AsyncViolation::WrongLabel(id) => write!(f, "label of `{id}` disagrees with its id"),
            AsyncViolation::InitialWiring(id) => write!(f, "initial wiring broken at `{id}`"),
            AsyncViolation::Producer(id) => write!(f, "`{id}` lacks a unique producer"),
            AsyncViolation::Successors(id) => write!(f, "`{id}` has several successors"),
            AsyncViolation::Participants(id) => {
                write!(f, "participant wiring broken at `{id}`")
            }
        }
    }
}

/// Validity report for asynchronous computations.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct AsyncReport {
    pub violations: Vec<AsyncViolation>,
}

impl AsyncReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a candidate LPO against conditions 1–4 of the asynchronous
/// computation definition; any interleaving is an immediate violation.
pub fn validate_lpo_async(sys: &AsyncSystem, lpo: &Lpo) -> AsyncReport {
    let mut report = AsyncReport::default();
    for v in lpo.validate().violations {
        report.violations.push(AsyncViolation::Generic(v));
    }
    for pair in &lpo.interleave {
        report
            .violations
            .push(AsyncViolation::InterleavePresent(pair.clone()));
    }
    if !report.is_ok() {
        return report;
    }

    let init = ElementId::new(INIT_EDGE);
    let mut nodes: BTreeMap<ElementId, ProcessHistory> = BTreeMap::new();
    for id in &lpo.nodes {
        match ProcessHistory::parse(id.as_str(), sys) {
            Some(h) if h.conformant(sys) => {
                if lpo.node_label.get(id) != Some(&id.0) {
                    report
                        .violations
                        .push(AsyncViolation::WrongLabel(id.clone()));
                } else {
                    nodes.insert(id.clone(), h);
                }
            }
            Some(_) => report
                .violations
                .push(AsyncViolation::BadHistory(id.clone())),
            None => report
                .violations
                .push(AsyncViolation::UnparsableNode(id.clone())),
        }
    }
    let mut edges: BTreeMap<ElementId, AsyncEdgeId> = BTreeMap::new();
    for id in &lpo.edges {
        if *id == init {
            if lpo.edge_label.get(id).map(String::as_str) != Some(INIT_EDGE) {
                report
                    .violations
                    .push(AsyncViolation::WrongLabel(id.clone()));
            }
            continue;
        }
        match AsyncEdgeId::parse(id.as_str(), sys) {
            Some(e) => {
                if lpo.edge_label.get(id) != Some(&e.letter) {
                    report
                        .violations
                        .push(AsyncViolation::WrongLabel(id.clone()));
                } else {
                    edges.insert(id.clone(), e);
                }
            }
            None => report
                .violations
                .push(AsyncViolation::UnparsableEdge(id.clone())),
        }
    }
    if !report.is_ok() {
        return report;
    }

    let order = lpo.order();

    // 1: the joint initial edge is present, minimal, and feeds exactly the
    // initial histories.
    if !lpo.edges.contains(&init) {
        report
            .violations
            .push(AsyncViolation::InitialWiring(init.clone()));
    } else {
        for id in lpo.elements() {
            if order.le(&init, id) != Some(true) {
                report
                    .violations
                    .push(AsyncViolation::InitialWiring(id.clone()));
            }
        }
        for (i, p) in sys.processes.iter().enumerate() {
            let h0 = ProcessHistory {
                process: i,
                states: alloc::vec![p.initial.clone()],
            };
            let id = h0.id(sys);
            if !lpo.nodes.contains(&id) || !lpo.comm.contains(&(init.clone(), id.clone())) {
                report.violations.push(AsyncViolation::InitialWiring(id));
            }
        }
        let init_post: BTreeSet<&ElementId> = lpo
            .comm
            .iter()
            .filter(|(a, _)| *a == init)
            .map(|(_, b)| b)
            .collect();
        for id in init_post {
            if nodes.get(id).is_none_or(|h| h.states.len() != 1) {
                report
                    .violations
                    .push(AsyncViolation::InitialWiring(id.clone()));
            }
        }
    }

    // 2: unique producer; for longer histories the producer consumes the
    // prefix through a δ-conformant local step.
    for (vid, h) in &nodes {
        let preds: Vec<&ElementId> = lpo
            .comm
            .iter()
            .filter(|(_, b)| b == vid)
            .map(|(a, _)| a)
            .collect();
        if preds.len() != 1 {
            report
                .violations
                .push(AsyncViolation::Producer(vid.clone()));
            continue;
        }
        let producer = preds[0];
        if h.states.len() == 1 {
            if *producer != init {
                report
                    .violations
                    .push(AsyncViolation::Producer(vid.clone()));
            }
            continue;
        }
        let Some(edge) = edges.get(producer) else {
            report
                .violations
                .push(AsyncViolation::Producer(vid.clone()));
            continue;
        };
        let prefix = ProcessHistory {
            process: h.process,
            states: h.states[..h.states.len() - 1].to_vec(),
        };
        let conforms = sys.processes[h.process].delta.contains(&(
            prefix.last().to_owned(),
            edge.letter.clone(),
            h.last().to_owned(),
        ));
        if !lpo.comm.contains(&(prefix.id(sys), producer.clone())) || !conforms {
            report
                .violations
                .push(AsyncViolation::Producer(vid.clone()));
        }
    }

    // 3: at most one successor event per history.
    for vid in nodes.keys() {
        let succs = lpo
            .comm
            .iter()
            .filter(|(a, b)| a == vid && lpo.edges.contains(b))
            .count();
        if succs > 1 {
            report
                .violations
                .push(AsyncViolation::Successors(vid.clone()));
        }
    }

    // 4: the participant set is exactly the letter's owners, one pre- and
    // one post-history each, extending by one state.
    for (eid, edge) in &edges {
        let pre: Vec<&ProcessHistory> = lpo
            .comm
            .iter()
            .filter(|(_, b)| b == eid)
            .filter_map(|(a, _)| nodes.get(a))
            .collect();
        let post: Vec<&ProcessHistory> = lpo
            .comm
            .iter()
            .filter(|(a, _)| a == eid)
            .filter_map(|(_, b)| nodes.get(b))
            .collect();
        let owners: BTreeSet<usize> = sys.participants(&edge.letter).into_iter().collect();
        let pre_set: BTreeSet<ProcessHistory> = pre.iter().map(|h| (*h).clone()).collect();
        let pre_procs: BTreeSet<usize> = pre.iter().map(|h| h.process).collect();
        let post_procs: BTreeSet<usize> = post.iter().map(|h| h.process).collect();
        let ok = pre_set == edge.preset
            && pre.len() == pre_procs.len()
            && post.len() == post_procs.len()
            && pre_procs == owners
            && post_procs == owners
            && post.iter().all(|h2| {
                pre.iter().any(|h1| {
                    h1.process == h2.process && h2.states[..h2.states.len() - 1] == h1.states
                })
            });
        if !ok {
            report
                .violations
                .push(AsyncViolation::Participants(eid.clone()));
        }
    }

    report
}

/// Wraps a computation as a glued LPO with no glue at all.
pub fn glpo_from_lpo_async(lpo: &Lpo) -> GluedLpo {
    GluedLpo {
        base: lpo.clone(),
        glues: BTreeSet::new(),
        assignment: BTreeMap::new(),
    }
}

/// Enumerates the bounded computations of `sys` as deduplicated LPOs.
pub fn enumerate_computations_async(
    sys: &AsyncSystem,
    max_events: usize,
    maximal_only: bool,
) -> Vec<Lpo> {
    let mut lpos: BTreeSet<Lpo> = BTreeSet::new();
    for exec in async_executions(sys, max_events) {
        lpos.insert(lpo_from_async_execution(sys, &exec));
    }
    let mut lpos: Vec<Lpo> = lpos.into_iter().collect();
    if maximal_only {
        lpos = crate::po::maximal_filter(lpos);
        lpos.sort();
    }
    lpos
}

/// Why the baseline property failed for one computation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AsyncBaselineFailure {
    /// A generated computation did not validate.
    Invalid { lpo: Lpo },
    /// The glue-free wrapper was not refined by exactly the base itself.
    NotSelfRefining { lpo: Lpo },
}

/// Checks the baseline property at the bound: every computation validates
/// with an empty interleaving relation, and its glue-free wrapper is
/// refined by exactly one LPO — itself.
// Failures carry the full counterexample computation by design.
#[allow(clippy::result_large_err)]
pub fn check_async_baseline(
    sys: &AsyncSystem,
    max_events: usize,
) -> Result<usize, AsyncBaselineFailure> {
    let lpos = enumerate_computations_async(sys, max_events, false);
    for lpo in &lpos {
        if !lpo.interleave.is_empty() || !validate_lpo_async(sys, lpo).is_ok() {
            return Err(AsyncBaselineFailure::Invalid { lpo: lpo.clone() });
        }
        let refinements = crate::po::refinements(&glpo_from_lpo_async(lpo));
        if refinements != alloc::vec![lpo.clone()] {
            return Err(AsyncBaselineFailure::NotSelfRefining { lpo: lpo.clone() });
        }
    }
    Ok(lpos.len())
}
