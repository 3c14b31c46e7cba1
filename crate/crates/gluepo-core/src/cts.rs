//! Channeled transition systems (CTS): agents with per-state listening
//! functions, n-ary composition with blocking multicast and non-blocking
//! broadcast, execution generation, LPO and glued-LPO construction and
//! validation per conditions C1–C6 and *C6/*C7, the refinement theorem
//! checker, and separation witnesses.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::po::{
    refinements, refines, ElementId, GlueRelation, GluedLpo, Lpo, OrderIndex, OrderRelation, Pair,
    Refinement,
};
use crate::pti::Side;

/// The broadcast channel, always listened to.
pub const STAR: &str = "*";

/// Reserved payload of the initializing broadcast edge.
pub const INIT_PAYLOAD: &str = "init";

/// Identifier of the initializing broadcast edge.
pub const E_EPSILON: &str = "e_eps";

/// Characters with structural meaning inside CTS element identifiers.
const CTS_DELIMITERS: &[char] = &['<', '>', '{', '}', '|', ':', ',', '!', '?', '*'];

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Polarity {
    Send,
    Recv,
}

/// A transition label `(payload, !|?, channel)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TransLabel {
    pub payload: String,
    pub polarity: Polarity,
    pub channel: String,
}

impl TransLabel {
    pub fn send(payload: impl Into<String>, channel: impl Into<String>) -> Self {
        TransLabel {
            payload: payload.into(),
            polarity: Polarity::Send,
            channel: channel.into(),
        }
    }

    pub fn recv(payload: impl Into<String>, channel: impl Into<String>) -> Self {
        TransLabel {
            payload: payload.into(),
            polarity: Polarity::Recv,
            channel: channel.into(),
        }
    }

    /// The matching receive of a send label.
    pub fn matching_receive(&self) -> TransLabel {
        TransLabel {
            payload: self.payload.clone(),
            polarity: Polarity::Recv,
            channel: self.channel.clone(),
        }
    }

    pub fn is_broadcast(&self) -> bool {
        self.channel == STAR
    }

    pub fn render(&self) -> String {
        let p = match self.polarity {
            Polarity::Send => '!',
            Polarity::Recv => '?',
        };
        format!("{}{}{}", self.payload, p, self.channel)
    }

    pub fn parse(s: &str) -> Option<TransLabel> {
        let (i, polarity) = s.char_indices().find_map(|(i, c)| match c {
            '!' => Some((i, Polarity::Send)),
            '?' => Some((i, Polarity::Recv)),
            _ => None,
        })?;
        let payload = &s[..i];
        let channel = &s[i + 1..];
        if payload.is_empty() || channel.is_empty() {
            return None;
        }
        Some(TransLabel {
            payload: payload.to_owned(),
            polarity,
            channel: channel.to_owned(),
        })
    }
}

impl fmt::Display for TransLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// One agent: states with listening sets and send/receive transitions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct CtsAgent {
    pub name: String,
    pub states: BTreeSet<String>,
    pub initial: String,
    /// Extra listened channels per state; `*` is implicit everywhere.
    pub listening: BTreeMap<String, BTreeSet<String>>,
    pub transitions: BTreeSet<(String, TransLabel, String)>,
}

/// Structural problems with an agent or system definition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CtsError {
    UnknownState(String),
    NoInitialState(String),
    ReservedName(String),
    EmptyAgent(String),
}

impl fmt::Display for CtsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CtsError::UnknownState(s) => write!(f, "unknown state `{s}`"),
            CtsError::NoInitialState(a) => write!(f, "agent `{a}` has no initial state"),
            CtsError::ReservedName(n) => write!(f, "`{n}` is a reserved name"),
            CtsError::EmptyAgent(a) => write!(f, "agent `{a}` has no states"),
        }
    }
}

impl CtsAgent {
    /// Channels listened to in `state`, always including `*`.
    pub fn ls(&self, state: &str) -> BTreeSet<&str> {
        let mut set: BTreeSet<&str> = self
            .listening
            .get(state)
            .into_iter()
            .flatten()
            .map(String::as_str)
            .collect();
        set.insert(STAR);
        set
    }

    /// Does `state` have an outgoing transition with exactly this label?
    pub fn has_transition(&self, state: &str, label: &TransLabel) -> bool {
        self.transitions
            .iter()
            .any(|(s, l, _)| s == state && l == label)
    }

    pub fn targets(&self, state: &str, label: &TransLabel) -> Vec<&str> {
        self.transitions
            .iter()
            .filter(|(s, l, _)| s == state && l == label)
            .map(|(_, _, s2)| s2.as_str())
            .collect()
    }

    /// All channels mentioned by listening sets or transitions, plus `*`.
    pub fn channels(&self) -> BTreeSet<&str> {
        let mut set: BTreeSet<&str> = self
            .listening
            .values()
            .flatten()
            .map(String::as_str)
            .collect();
        set.extend(self.transitions.iter().map(|(_, l, _)| l.channel.as_str()));
        set.insert(STAR);
        set
    }

    pub fn check(&self) -> Result<(), CtsError> {
        if self.states.is_empty() {
            return Err(CtsError::EmptyAgent(self.name.clone()));
        }
        if !self.states.contains(&self.initial) {
            return Err(CtsError::NoInitialState(self.name.clone()));
        }
        let reserved = |n: &str| {
            n == E_EPSILON || n == INIT_PAYLOAD || n.is_empty() || n.contains(CTS_DELIMITERS)
        };
        if reserved(&self.name) {
            return Err(CtsError::ReservedName(self.name.clone()));
        }
        for s in self.states.iter() {
            if reserved(s) {
                return Err(CtsError::ReservedName(s.clone()));
            }
        }
        for s in self.listening.keys() {
            if !self.states.contains(s) {
                return Err(CtsError::UnknownState(s.clone()));
            }
        }
        for c in self.listening.values().flatten() {
            if c != STAR && reserved(c) {
                return Err(CtsError::ReservedName(c.clone()));
            }
        }
        for (s, l, s2) in &self.transitions {
            if !self.states.contains(s) {
                return Err(CtsError::UnknownState(s.clone()));
            }
            if !self.states.contains(s2) {
                return Err(CtsError::UnknownState(s2.clone()));
            }
            if reserved(&l.payload) || (l.channel != STAR && reserved(&l.channel)) {
                return Err(CtsError::ReservedName(l.render()));
            }
        }
        Ok(())
    }
}

/// Binary parallel composition: product states, union listening, joint
/// transitions with blocking multicast and non-blocking broadcast.
pub fn compose(a: &CtsAgent, b: &CtsAgent) -> CtsAgent {
    let join = |s1: &str, s2: &str| format!("{s1}.{s2}");
    let mut out = CtsAgent {
        name: join(&a.name, &b.name),
        initial: join(&a.initial, &b.initial),
        ..CtsAgent::default()
    };
    for s1 in &a.states {
        for s2 in &b.states {
            let s = join(s1, s2);
            let mut listen: BTreeSet<String> =
                a.ls(s1).union(&b.ls(s2)).map(|c| (*c).to_owned()).collect();
            listen.remove(STAR);
            if !listen.is_empty() {
                out.listening.insert(s.clone(), listen);
            }
            out.states.insert(s);
        }
    }

    let mut add = |s1: &str, s2: &str, l: &TransLabel, t1: &str, t2: &str| {
        out.transitions
            .insert((join(s1, s2), l.clone(), join(t1, t2)));
    };

    for s1 in &a.states {
        for s2 in &b.states {
            // Non-broadcast send and receive pairings.
            for (src, l, t1) in &a.transitions {
                if src != s1 || l.is_broadcast() {
                    continue;
                }
                match l.polarity {
                    Polarity::Send => {
                        if b.ls(s2).contains(l.channel.as_str()) {
                            for t2 in b.targets(s2, &l.matching_receive()) {
                                add(s1, s2, l, t1, t2);
                            }
                        } else {
                            add(s1, s2, l, t1, s2);
                        }
                    }
                    Polarity::Recv => {
                        if a.ls(s1).contains(l.channel.as_str()) {
                            for (src2, l2, t2) in &b.transitions {
                                if src2 == s2 && *l2 == TransLabel::send(&l.payload, &l.channel) {
                                    add(s1, s2, l2, t1, t2);
                                }
                            }
                            if b.ls(s2).contains(l.channel.as_str()) {
                                for t2 in b.targets(s2, l) {
                                    add(s1, s2, l, t1, t2);
                                }
                            }
                        }
                        if !b.ls(s2).contains(l.channel.as_str()) {
                            add(s1, s2, l, t1, s2);
                        }
                    }
                }
            }
            for (src, l, t2) in &b.transitions {
                if src != s2 || l.is_broadcast() {
                    continue;
                }
                match l.polarity {
                    Polarity::Send => {
                        if a.ls(s1).contains(l.channel.as_str()) {
                            // Covered above through a's receive loop only
                            // when a actually receives; the pairing is
                            // symmetric, so emit it here as well.
                            for t1 in a.targets(s1, &l.matching_receive()) {
                                add(s1, s2, l, t1, t2);
                            }
                        } else {
                            add(s1, s2, l, s1, t2);
                        }
                    }
                    Polarity::Recv => {
                        if !a.ls(s1).contains(l.channel.as_str()) {
                            add(s1, s2, l, s1, t2);
                        }
                    }
                }
            }
            // Broadcast: never blocked, received only by a ready partner.
            for (src, l, t1) in &a.transitions {
                if src != s1 || !l.is_broadcast() {
                    continue;
                }
                let partner_receives = b.targets(s2, &l.matching_receive());
                if partner_receives.is_empty() {
                    add(s1, s2, l, t1, s2);
                } else if l.polarity == Polarity::Send {
                    for t2 in partner_receives {
                        add(s1, s2, l, t1, t2);
                    }
                }
            }
            for (src, l, t2) in &b.transitions {
                if src != s2 || !l.is_broadcast() {
                    continue;
                }
                let partner_receives = a.targets(s1, &l.matching_receive());
                if partner_receives.is_empty() {
                    add(s1, s2, l, s1, t2);
                } else if l.polarity == Polarity::Send {
                    for t1 in partner_receives {
                        add(s1, s2, l, t1, t2);
                    }
                }
            }
        }
    }
    out
}

/// An ordered list of agents executing together.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CtsSystem {
    pub agents: Vec<CtsAgent>,
}

impl CtsSystem {
    pub fn check(&self) -> Result<(), CtsError> {
        let mut names = BTreeSet::new();
        for agent in &self.agents {
            agent.check()?;
            if !names.insert(agent.name.as_str()) {
                return Err(CtsError::ReservedName(agent.name.clone()));
            }
        }
        Ok(())
    }

    pub fn initial_states(&self) -> Vec<String> {
        self.agents.iter().map(|a| a.initial.clone()).collect()
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a.name == name)
    }
}

/// Which histories a multicast must be ordered against: every history
/// listening to the channel, or only listening histories that cannot
/// receive the message.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub enum MulticastBlockMode {
    #[default]
    Listening,
    CannotReceive,
}

impl fmt::Display for MulticastBlockMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MulticastBlockMode::Listening => "listening",
            MulticastBlockMode::CannotReceive => "cannot-receive",
        })
    }
}

/// Does `state` of `agent` satisfy the multicast-ordering condition for a
/// send `label` under `mode`?
fn multicast_condition(
    agent: &CtsAgent,
    state: &str,
    label: &TransLabel,
    mode: MulticastBlockMode,
) -> bool {
    let listens = agent.ls(state).contains(label.channel.as_str());
    match mode {
        MulticastBlockMode::Listening => listens,
        MulticastBlockMode::CannotReceive => {
            listens && !agent.has_transition(state, &label.matching_receive())
        }
    }
}

/// One resolved system event: the sender, the send label, and the next
/// state of every participant.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ExecStep {
    pub sender: usize,
    pub label: TransLabel,
    pub targets: BTreeMap<usize, String>,
}

/// All ways the system can take a step with `label` from `states`:
/// participant sets with successor state vectors.
pub fn system_step(
    sys: &CtsSystem,
    states: &[String],
    label: &TransLabel,
) -> Vec<(BTreeSet<usize>, Vec<String>)> {
    let mut out = BTreeSet::new();
    for step in step_choices(sys, states, Some(label)) {
        let participants: BTreeSet<usize> = step.targets.keys().copied().collect();
        let mut next: Vec<String> = states.to_owned();
        for (&i, s) in &step.targets {
            next[i] = s.clone();
        }
        out.insert((participants, next));
    }
    out.into_iter().collect()
}

/// All resolved steps from `states`, optionally restricted to one send
/// label, in deterministic order.
fn step_choices(sys: &CtsSystem, states: &[String], only: Option<&TransLabel>) -> Vec<ExecStep> {
    let mut out = BTreeSet::new();
    for (i, agent) in sys.agents.iter().enumerate() {
        for (src, label, sender_target) in &agent.transitions {
            if src != &states[i] || label.polarity != Polarity::Send {
                continue;
            }
            if only.is_some_and(|l| l != label) {
                continue;
            }
            let receive = label.matching_receive();
            // Receivers: listeners for a multicast (all must be able), and
            // ready receivers for a broadcast.
            let mut receiver_targets: Vec<(usize, Vec<&str>)> = Vec::new();
            let mut blocked = false;
            for (j, other) in sys.agents.iter().enumerate() {
                if j == i {
                    continue;
                }
                if label.is_broadcast() {
                    let targets = other.targets(&states[j], &receive);
                    if !targets.is_empty() {
                        receiver_targets.push((j, targets));
                    }
                } else if other.ls(&states[j]).contains(label.channel.as_str()) {
                    let targets = other.targets(&states[j], &receive);
                    if targets.is_empty() {
                        blocked = true;
                        break;
                    }
                    receiver_targets.push((j, targets));
                }
            }
            if blocked {
                continue;
            }
            let mut resolutions: Vec<BTreeMap<usize, String>> =
                alloc::vec![BTreeMap::from([(i, sender_target.clone())])];
            for (j, targets) in &receiver_targets {
                let mut next = Vec::new();
                for partial in &resolutions {
                    for t in targets {
                        let mut with = partial.clone();
                        with.insert(*j, (*t).to_owned());
                        next.push(with);
                    }
                }
                resolutions = next;
            }
            for targets in resolutions {
                out.insert(ExecStep {
                    sender: i,
                    label: label.clone(),
                    targets,
                });
            }
        }
    }
    out.into_iter().collect()
}

/// All executions of length ≤ `max_events`, including every prefix, in
/// deterministic order.
pub fn executions(sys: &CtsSystem, max_events: usize) -> Vec<Vec<ExecStep>> {
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    fn go(
        sys: &CtsSystem,
        states: &[String],
        prefix: &mut Vec<ExecStep>,
        max: usize,
        out: &mut Vec<Vec<ExecStep>>,
    ) {
        out.push(prefix.clone());
        if prefix.len() == max {
            return;
        }
        for step in step_choices(sys, states, None) {
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

/// The state sequence one agent has moved through.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AgentHistory {
    pub agent: usize,
    pub states: Vec<String>,
}

impl AgentHistory {
    pub fn last(&self) -> &str {
        self.states.last().expect("histories are non-empty")
    }

    pub fn extended(&self, state: &str) -> AgentHistory {
        let mut states = self.states.clone();
        states.push(state.to_owned());
        AgentHistory {
            agent: self.agent,
            states,
        }
    }

    /// Canonical identifier `<agent:s0,s1,...>`.
    pub fn id(&self, sys: &CtsSystem) -> ElementId {
        let name = &sys.agents[self.agent].name;
        ElementId::new(format!("<{}:{}>", name, self.states.join(",")))
    }

    pub fn parse(s: &str, sys: &CtsSystem) -> Option<AgentHistory> {
        let inner = s.strip_prefix('<')?.strip_suffix('>')?;
        let (name, states) = inner.split_once(':')?;
        let agent = sys.agent_index(name)?;
        let states: Vec<String> = states.split(',').map(str::to_owned).collect();
        if states.iter().any(String::is_empty) {
            return None;
        }
        Some(AgentHistory { agent, states })
    }

    /// Is this a run of its agent: starts initial, steps R-conformant?
    pub fn conformant(&self, sys: &CtsSystem) -> bool {
        let agent = &sys.agents[self.agent];
        if self.states.first().map(String::as_str) != Some(agent.initial.as_str()) {
            return false;
        }
        self.states.windows(2).all(|w| {
            agent
                .transitions
                .iter()
                .any(|(s, _, s2)| *s == w[0] && *s2 == w[1])
        })
    }
}

/// Canonical identity of a communication event: the participants'
/// predecessor histories, the sending agent, and the send label.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct CtsEdgeId {
    pub preset: BTreeSet<AgentHistory>,
    pub sender: usize,
    pub label: TransLabel,
}

impl CtsEdgeId {
    /// Canonical identifier `{h1,h2|sender|payload!chan}`.
    pub fn id(&self, sys: &CtsSystem) -> ElementId {
        let hists: Vec<String> = self.preset.iter().map(|h| h.id(sys).0).collect();
        ElementId::new(format!(
            "{{{}|{}|{}}}",
            hists.join(","),
            sys.agents[self.sender].name,
            self.label.render()
        ))
    }

    pub fn parse(s: &str, sys: &CtsSystem) -> Option<CtsEdgeId> {
        let inner = s.strip_prefix('{')?.strip_suffix('}')?;
        let mut parts = inner.rsplitn(3, '|');
        let label = TransLabel::parse(parts.next()?)?;
        let sender = sys.agent_index(parts.next()?)?;
        let hists = parts.next()?;
        if label.polarity != Polarity::Send {
            return None;
        }
        let mut preset = BTreeSet::new();
        let mut rest = hists;
        while !rest.is_empty() {
            let end = rest.find('>')?;
            let h = AgentHistory::parse(&rest[..=end], sys)?;
            if !preset.insert(h) {
                return None;
            }
            rest = rest[end + 1..]
                .strip_prefix(',')
                .unwrap_or(&rest[end + 1..]);
        }
        if preset.is_empty() || !preset.iter().any(|h| h.agent == sender) {
            return None;
        }
        Some(CtsEdgeId {
            preset,
            sender,
            label,
        })
    }
}

fn init_label() -> TransLabel {
    TransLabel::send(INIT_PAYLOAD, STAR)
}

/// Builds the LPO of an execution per conditions C1–C6.
///
/// Same-channel events are chained in schedule order (C5 via C6(a));
/// multicasts and broadcasts are ordered against reconfigured histories by
/// scheduling pairs (C6(b)–(e)), added only where comparability is not
/// already present, and redundant additions are dropped afterwards.
pub fn lpo_from_execution(sys: &CtsSystem, exec: &[ExecStep], mode: MulticastBlockMode) -> Lpo {
    let mut lpo = Lpo::default();
    let eps = ElementId::new(E_EPSILON);
    lpo.edges.insert(eps.clone());
    lpo.edge_label.insert(eps.clone(), init_label().render());

    let mut current: Vec<AgentHistory> = Vec::new();
    // Creation/exit bookkeeping per history node.
    let mut creator: BTreeMap<ElementId, (ElementId, isize)> = BTreeMap::new();
    let mut exit: BTreeMap<ElementId, (ElementId, isize)> = BTreeMap::new();
    let mut history_of: BTreeMap<ElementId, AgentHistory> = BTreeMap::new();

    for (i, agent) in sys.agents.iter().enumerate() {
        let h = AgentHistory {
            agent: i,
            states: alloc::vec![agent.initial.clone()],
        };
        let id = h.id(sys);
        lpo.nodes.insert(id.clone());
        lpo.node_label.insert(id.clone(), id.0.clone());
        lpo.comm.insert((eps.clone(), id.clone()));
        creator.insert(id.clone(), (eps.clone(), -1));
        history_of.insert(id, h.clone());
        current.push(h);
    }

    let mut edge_ids: Vec<ElementId> = Vec::new();
    let mut channel_chain: BTreeMap<String, Vec<ElementId>> = BTreeMap::new();
    for (idx, step) in exec.iter().enumerate() {
        let preset: BTreeSet<AgentHistory> =
            step.targets.keys().map(|&i| current[i].clone()).collect();
        let edge = CtsEdgeId {
            preset,
            sender: step.sender,
            label: step.label.clone(),
        };
        let eid = edge.id(sys);
        lpo.edges.insert(eid.clone());
        lpo.edge_label.insert(eid.clone(), step.label.render());
        for (&i, target) in &step.targets {
            let pre_id = current[i].id(sys);
            lpo.comm.insert((pre_id.clone(), eid.clone()));
            exit.insert(pre_id, (eid.clone(), idx as isize));
            let post = current[i].extended(target);
            let post_id = post.id(sys);
            lpo.nodes.insert(post_id.clone());
            lpo.node_label.insert(post_id.clone(), post_id.0.clone());
            lpo.comm.insert((eid.clone(), post_id.clone()));
            creator.insert(post_id.clone(), (eid.clone(), idx as isize));
            history_of.insert(post_id, post.clone());
            current[i] = post;
        }
        channel_chain
            .entry(step.label.channel.clone())
            .or_default()
            .push(eid.clone());
        edge_ids.push(eid);
    }

    // C5: chain same-channel events in schedule order.
    let mut protected: BTreeSet<Pair> = BTreeSet::new();
    for chain in channel_chain.values() {
        for w in chain.windows(2) {
            let pair = (w[0].clone(), w[1].clone());
            lpo.interleave.insert(pair.clone());
            protected.insert(pair);
        }
    }

    // C6(b)–(e): order communications against reconfigured histories.
    for (idx, step) in exec.iter().enumerate() {
        let eid = &edge_ids[idx];
        let order = lpo.order();
        let mut added = false;
        for (vid, h) in &history_of {
            if lpo.comm.contains(&(vid.clone(), eid.clone()))
                || lpo.comm.contains(&(eid.clone(), vid.clone()))
            {
                continue;
            }
            let agent = &sys.agents[h.agent];
            let relevant = if step.label.is_broadcast() {
                agent.has_transition(h.last(), &step.label.matching_receive())
            } else {
                multicast_condition(agent, h.last(), &step.label, mode)
            };
            if !relevant || order.comparable(eid, vid) == Some(true) {
                continue;
            }
            let (creator_edge, created_at) = &creator[vid];
            if *created_at > idx as isize {
                lpo.interleave.insert((eid.clone(), creator_edge.clone()));
                added = true;
            } else if let Some((exit_edge, exit_at)) = exit.get(vid) {
                if *exit_at < idx as isize && exit_edge != eid {
                    lpo.interleave.insert((exit_edge.clone(), eid.clone()));
                    added = true;
                }
            }
        }
        let _ = added;
    }

    drop_implied_keeping(&mut lpo.interleave, &protected);
    lpo
}

/// Removes unprotected interleave pairs implied by a two-step interleave
/// path; the generated order is unchanged.
fn drop_implied_keeping(rel: &mut BTreeSet<Pair>, protected: &BTreeSet<Pair>) {
    loop {
        let implied = rel.iter().find(|(a, c)| {
            !protected.contains(&(a.clone(), c.clone()))
                && rel
                    .iter()
                    .any(|(x, b)| x == a && rel.contains(&(b.clone(), c.clone())))
        });
        match implied {
            Some(pair) => {
                let pair = pair.clone();
                rel.remove(&pair);
            }
            None => return,
        }
    }
}

/// A violated clause of the CTS computation definition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CtsViolation {
    Generic(crate::po::Violation),
    UnparsableNode(ElementId),
    UnparsableEdge(ElementId),
    /// The history is not a run of its agent.
    BadHistory(ElementId),
    WrongLabel(ElementId),
    /// C1: e_eps missing, not minimal, or an initial history unfed.
    C1Initial(ElementId),
    /// C2: producer missing, not unique, or not R-conformant.
    C2Producer(ElementId),
    /// C3: more than one successor event.
    C3Successors(ElementId),
    /// C4(a)/(b): participant wiring or sender resolution broken.
    C4Participants(ElementId),
    /// C4(c): multicast incomparable with a listening history.
    C4cIncomparable {
        edge: ElementId,
        node: ElementId,
    },
    /// C4(d): broadcast incomparable with a receive-ready history.
    C4dIncomparable {
        edge: ElementId,
        node: ElementId,
    },
    /// C5: two same-channel events unordered.
    C5Unordered(Pair),
    /// C6: an interleave pair without justification.
    C6Unjustified(Pair),
}

impl fmt::Display for CtsViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CtsViolation::Generic(v) => write!(f, "{v}"),
            CtsViolation::UnparsableNode(id) => write!(f, "node id `{id}` is not a history"),
            CtsViolation::UnparsableEdge(id) => write!(f, "edge id `{id}` is not an event"),
            CtsViolation::BadHistory(id) => write!(f, "`{id}` is not a run of its agent"),
            CtsViolation::WrongLabel(id) => write!(f, "label of `{id}` disagrees with its id"),
            CtsViolation::C1Initial(id) => write!(f, "C1: initial wiring broken at `{id}`"),
            CtsViolation::C2Producer(id) => write!(f, "C2: `{id}` lacks a unique producer"),
            CtsViolation::C3Successors(id) => write!(f, "C3: `{id}` has several successors"),
            CtsViolation::C4Participants(id) => {
                write!(f, "C4(a)/(b): participant wiring broken at `{id}`")
            }
            CtsViolation::C4cIncomparable { edge, node } => {
                write!(f, "C4(c): `{node}` incomparable with multicast `{edge}`")
            }
            CtsViolation::C4dIncomparable { edge, node } => {
                write!(f, "C4(d): `{node}` incomparable with broadcast `{edge}`")
            }
            CtsViolation::C5Unordered((a, b)) => {
                write!(f, "C5: same-channel events `{a}` and `{b}` unordered")
            }
            CtsViolation::C6Unjustified((a, b)) => {
                write!(f, "C6: interleave pair ({a}, {b}) unjustified")
            }
        }
    }
}

/// Validity report for CTS computations.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CtsReport {
    pub violations: Vec<CtsViolation>,
}

impl CtsReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a candidate LPO against conditions C1–C6 (after the generic LPO
/// invariants).
pub fn validate_lpo_cts(sys: &CtsSystem, lpo: &Lpo, mode: MulticastBlockMode) -> CtsReport {
    let mut report = CtsReport::default();
    for v in lpo.validate().violations {
        report.violations.push(CtsViolation::Generic(v));
    }
    if !report.is_ok() {
        return report;
    }

    let eps = ElementId::new(E_EPSILON);
    let mut nodes: BTreeMap<ElementId, AgentHistory> = BTreeMap::new();
    for id in &lpo.nodes {
        match AgentHistory::parse(id.as_str(), sys) {
            Some(h) if h.conformant(sys) => {
                if lpo.node_label.get(id) != Some(&id.0) {
                    report.violations.push(CtsViolation::WrongLabel(id.clone()));
                } else {
                    nodes.insert(id.clone(), h);
                }
            }
            Some(_) => report.violations.push(CtsViolation::BadHistory(id.clone())),
            None => report
                .violations
                .push(CtsViolation::UnparsableNode(id.clone())),
        }
    }
    let mut edges: BTreeMap<ElementId, CtsEdgeId> = BTreeMap::new();
    for id in &lpo.edges {
        if *id == eps {
            if lpo.edge_label.get(id) != Some(&init_label().render()) {
                report.violations.push(CtsViolation::WrongLabel(id.clone()));
            }
            continue;
        }
        match CtsEdgeId::parse(id.as_str(), sys) {
            Some(e) => {
                if lpo.edge_label.get(id) != Some(&e.label.render()) {
                    report.violations.push(CtsViolation::WrongLabel(id.clone()));
                } else {
                    edges.insert(id.clone(), e);
                }
            }
            None => report
                .violations
                .push(CtsViolation::UnparsableEdge(id.clone())),
        }
    }
    if !report.is_ok() {
        return report;
    }

    let order = lpo.order();

    // C1: e_eps is present, minimal, and feeds every initial history.
    if !lpo.edges.contains(&eps) {
        report.violations.push(CtsViolation::C1Initial(eps.clone()));
    } else {
        for id in lpo.elements() {
            if order.le(&eps, id) != Some(true) {
                report.violations.push(CtsViolation::C1Initial(id.clone()));
            }
        }
        for (i, agent) in sys.agents.iter().enumerate() {
            let h0 = AgentHistory {
                agent: i,
                states: alloc::vec![agent.initial.clone()],
            };
            let id = h0.id(sys);
            if !lpo.nodes.contains(&id) || !lpo.comm.contains(&(eps.clone(), id.clone())) {
                report.violations.push(CtsViolation::C1Initial(id));
            }
        }
        let eps_post: BTreeSet<&ElementId> = lpo
            .comm
            .iter()
            .filter(|(a, _)| *a == eps)
            .map(|(_, b)| b)
            .collect();
        for id in eps_post {
            if nodes.get(id).is_none_or(|h| h.states.len() != 1) {
                report.violations.push(CtsViolation::C1Initial(id.clone()));
            }
        }
    }

    // C2: unique producer; for longer histories the producer consumes the
    // prefix with an R-conformant local transition.
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
                .push(CtsViolation::C2Producer(vid.clone()));
            continue;
        }
        let producer = preds[0];
        if h.states.len() == 1 {
            if *producer != eps {
                report
                    .violations
                    .push(CtsViolation::C2Producer(vid.clone()));
            }
            continue;
        }
        let Some(edge) = edges.get(producer) else {
            report
                .violations
                .push(CtsViolation::C2Producer(vid.clone()));
            continue;
        };
        let prefix = AgentHistory {
            agent: h.agent,
            states: h.states[..h.states.len() - 1].to_vec(),
        };
        let prefix_id = prefix.id(sys);
        let local = if edge.sender == h.agent {
            edge.label.clone()
        } else {
            edge.label.matching_receive()
        };
        let conforms = sys.agents[h.agent].transitions.contains(&(
            prefix.last().to_owned(),
            local,
            h.last().to_owned(),
        ));
        if !lpo.comm.contains(&(prefix_id, producer.clone())) || !conforms {
            report
                .violations
                .push(CtsViolation::C2Producer(vid.clone()));
        }
    }

    // C3: at most one successor event per history.
    for vid in nodes.keys() {
        let succs = lpo
            .comm
            .iter()
            .filter(|(a, b)| a == vid && lpo.edges.contains(b))
            .count();
        if succs > 1 {
            report
                .violations
                .push(CtsViolation::C3Successors(vid.clone()));
        }
    }

    // C4(a)/(b): per participant exactly one pre and one post history;
    // unique sender with a send transition; receivers with receives.
    for (eid, edge) in &edges {
        let pre: Vec<&AgentHistory> = lpo
            .comm
            .iter()
            .filter(|(_, b)| b == eid)
            .filter_map(|(a, _)| nodes.get(a))
            .collect();
        let post: Vec<&AgentHistory> = lpo
            .comm
            .iter()
            .filter(|(a, _)| a == eid)
            .filter_map(|(_, b)| nodes.get(b))
            .collect();
        let pre_set: BTreeSet<AgentHistory> = pre.iter().map(|h| (*h).clone()).collect();
        let pre_agents: BTreeSet<usize> = pre.iter().map(|h| h.agent).collect();
        let post_agents: BTreeSet<usize> = post.iter().map(|h| h.agent).collect();
        let wiring_ok = pre_set == edge.preset
            && pre.len() == pre_agents.len()
            && post.len() == post_agents.len()
            && pre_agents == post_agents
            && pre_agents.contains(&edge.sender)
            && post.iter().all(|h2| {
                pre.iter()
                    .any(|h1| h1.agent == h2.agent && h2.states[..h2.states.len() - 1] == h1.states)
            });
        let roles_ok = pre.iter().all(|h1| {
            let Some(h2) = post.iter().find(|h2| h2.agent == h1.agent) else {
                return false;
            };
            let local = if h1.agent == edge.sender {
                edge.label.clone()
            } else {
                edge.label.matching_receive()
            };
            sys.agents[h1.agent].transitions.contains(&(
                h1.last().to_owned(),
                local,
                h2.last().to_owned(),
            ))
        });
        if !wiring_ok || !roles_ok {
            report
                .violations
                .push(CtsViolation::C4Participants(eid.clone()));
        }
    }

    // C4(c)/(d): ordering against reconfigured histories.
    for (eid, edge) in &edges {
        for (vid, h) in &nodes {
            let agent = &sys.agents[h.agent];
            let relevant = if edge.label.is_broadcast() {
                agent.ls(h.last()).contains(STAR)
                    && agent.has_transition(h.last(), &edge.label.matching_receive())
            } else {
                multicast_condition(agent, h.last(), &edge.label, mode)
            };
            if relevant && order.comparable(eid, vid) != Some(true) {
                let violation = if edge.label.is_broadcast() {
                    CtsViolation::C4dIncomparable {
                        edge: eid.clone(),
                        node: vid.clone(),
                    }
                } else {
                    CtsViolation::C4cIncomparable {
                        edge: eid.clone(),
                        node: vid.clone(),
                    }
                };
                report.violations.push(violation);
            }
        }
    }

    // C5: same-channel events are totally ordered. The initial broadcast
    // participates through its minimality.
    let channel_of = |id: &ElementId| -> Option<String> {
        if *id == eps {
            Some(STAR.to_owned())
        } else {
            edges.get(id).map(|e| e.label.channel.clone())
        }
    };
    let edge_list: Vec<&ElementId> = lpo.edges.iter().collect();
    for (i, a) in edge_list.iter().enumerate() {
        for b in &edge_list[i + 1..] {
            if channel_of(a) == channel_of(b) && order.comparable(a, b) != Some(true) {
                report
                    .violations
                    .push(CtsViolation::C5Unordered(((*a).clone(), (*b).clone())));
            }
        }
    }

    // C6: justification of interleave pairs.
    for (a, b) in &lpo.interleave {
        if !cts_interleave_justified(sys, lpo, &nodes, &edges, mode, a, b) {
            report
                .violations
                .push(CtsViolation::C6Unjustified((a.clone(), b.clone())));
        }
    }

    report
}

/// C6: a pair (e, e') is justified by a shared channel, or by a history
/// whose reconfiguration forces the order.
fn cts_interleave_justified(
    sys: &CtsSystem,
    lpo: &Lpo,
    nodes: &BTreeMap<ElementId, AgentHistory>,
    edges: &BTreeMap<ElementId, CtsEdgeId>,
    mode: MulticastBlockMode,
    e: &ElementId,
    e2: &ElementId,
) -> bool {
    let eps = ElementId::new(E_EPSILON);
    let channel = |id: &ElementId| -> Option<String> {
        if *id == eps {
            Some(STAR.to_owned())
        } else {
            edges.get(id).map(|ed| ed.label.channel.clone())
        }
    };
    // (a) same channel.
    if channel(e).is_some() && channel(e) == channel(e2) {
        return true;
    }
    let forced = |label: &TransLabel, h: &AgentHistory| -> bool {
        let agent = &sys.agents[h.agent];
        if label.is_broadcast() {
            agent.has_transition(h.last(), &label.matching_receive())
        } else {
            multicast_condition(agent, h.last(), label, mode)
        }
    };
    // (b)/(d): some h feeds e and is reconfigured by e'.
    if let Some(edge2) = edges.get(e2) {
        let hit = lpo.comm.iter().any(|(v, target)| {
            target == e && nodes.get(v).is_some_and(|h| forced(&edge2.label, h))
        });
        if hit {
            return true;
        }
    }
    // (c)/(e): e' creates some h reconfigured by e.
    if let Some(edge) = edges.get(e) {
        let hit = lpo.comm.iter().any(|(source, v)| {
            source == e2 && nodes.get(v).is_some_and(|h| forced(&edge.label, h))
        });
        if hit {
            return true;
        }
    }
    false
}

/// Builds the glued LPO of a computation per *C6/*C7: only same-channel
/// interleaving is kept, and every send label is glued to the comm pairs of
/// histories it reconfigures.
pub fn glpo_from_lpo_cts(sys: &CtsSystem, lpo: &Lpo, mode: MulticastBlockMode) -> GluedLpo {
    let eps = ElementId::new(E_EPSILON);
    let mut edges: BTreeMap<ElementId, CtsEdgeId> = BTreeMap::new();
    for id in &lpo.edges {
        if let Some(e) = CtsEdgeId::parse(id.as_str(), sys) {
            edges.insert(id.clone(), e);
        }
    }
    let mut nodes: BTreeMap<ElementId, AgentHistory> = BTreeMap::new();
    for id in &lpo.nodes {
        if let Some(h) = AgentHistory::parse(id.as_str(), sys) {
            nodes.insert(id.clone(), h);
        }
    }

    let channel = |id: &ElementId| -> Option<String> {
        if *id == eps {
            Some(STAR.to_owned())
        } else {
            edges.get(id).map(|e| e.label.channel.clone())
        }
    };
    let mut base = lpo.clone();
    base.interleave
        .retain(|(a, b)| channel(a).is_some() && channel(a) == channel(b));

    // One glue per send label present in the computation.
    let labels: BTreeSet<TransLabel> = edges.values().map(|e| e.label.clone()).collect();
    let mut glues = BTreeSet::new();
    let mut assignment = BTreeMap::new();
    for label in labels {
        let forced = |h: &AgentHistory| -> bool {
            let agent = &sys.agents[h.agent];
            if label.is_broadcast() {
                agent.has_transition(h.last(), &label.matching_receive())
            } else {
                multicast_condition(agent, h.last(), &label, mode)
            }
        };
        let mut pairs = BTreeSet::new();
        for (a, b) in &base.comm {
            let node_side = if base.nodes.contains(a) { a } else { b };
            if nodes.get(node_side).is_some_and(forced) {
                pairs.insert((a.clone(), b.clone()));
            }
        }
        if pairs.is_empty() {
            continue;
        }
        let glue = GlueRelation::new(pairs);
        glues.insert(glue.clone());
        assignment.insert(label.render(), glue);
    }
    GluedLpo {
        base,
        glues,
        assignment,
    }
}

/// Enumerates the computations of `sys` with at most `max_events` events,
/// as deduplicated LPOs and their glued forms.
pub fn enumerate_computations_cts(
    sys: &CtsSystem,
    max_events: usize,
    maximal_only: bool,
    mode: MulticastBlockMode,
) -> (Vec<Lpo>, Vec<GluedLpo>) {
    let mut lpos: BTreeSet<Lpo> = BTreeSet::new();
    for exec in executions(sys, max_events) {
        lpos.insert(lpo_from_execution(sys, &exec, mode));
    }
    let mut lpos: Vec<Lpo> = lpos.into_iter().collect();
    if maximal_only {
        lpos = crate::po::maximal_filter(lpos);
        lpos.sort();
    }
    let glpos: BTreeSet<GluedLpo> = lpos
        .iter()
        .map(|l| glpo_from_lpo_cts(sys, l, mode))
        .collect();
    (lpos, glpos.into_iter().collect())
}

/// Why the bounded refinement-theorem check failed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CtsTheoremFailure {
    NotRefining { lpo: Lpo },
    RefinementInvalid { glpo: GluedLpo, refinement: Lpo },
}

/// Checks both directions of the refinement theorem at the bound.
// Failures carry the full counterexample computation by design.
#[allow(clippy::result_large_err)]
pub fn check_refinement_theorem_cts(
    sys: &CtsSystem,
    max_events: usize,
    mode: MulticastBlockMode,
) -> Result<(), CtsTheoremFailure> {
    let (lpos, glpos) = enumerate_computations_cts(sys, max_events, false, mode);
    for lpo in &lpos {
        let glpo = glpo_from_lpo_cts(sys, lpo, mode);
        if !matches!(refines(lpo, &glpo), Ok(Refinement::Holds)) {
            return Err(CtsTheoremFailure::NotRefining { lpo: lpo.clone() });
        }
    }
    for glpo in &glpos {
        for refinement in refinements(glpo) {
            if !validate_lpo_cts(sys, &refinement, mode).is_ok() {
                return Err(CtsTheoremFailure::RefinementInvalid {
                    glpo: glpo.clone(),
                    refinement,
                });
            }
        }
    }
    Ok(())
}

/// Separation certificate between two glued computations of one system.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CtsWitness {
    /// A shared history with no continuation on one side only.
    MaximalityMismatch {
        agent: usize,
        history: AgentHistory,
        maximal_in: Side,
    },
    /// A shared history continuing with differently-labelled events. Labels
    /// are local: the history's own role (send or receive) is part of them.
    NextLabelMismatch {
        agent: usize,
        history: AgentHistory,
        left_label: String,
        right_label: String,
    },
    /// Two shared histories whose next communications are ordered
    /// differently by the two sides.
    ChannelOrderMismatch {
        agents: (usize, usize),
        histories: (AgentHistory, AgentHistory),
        left_edges: (ElementId, ElementId),
        right_edges: (ElementId, ElementId),
        orders: (OrderRelation, OrderRelation),
    },
}

/// Outcome of the separation search.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CtsSeparation {
    Equal,
    Witness(CtsWitness),
}

/// Failure of the separation search.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CtsSeparationError {
    /// The inputs are not glued computations of the same system.
    InputMismatch,
    /// The inputs differ but none of the theorem's certificate shapes
    /// applies (possible only outside the deterministic fragment).
    NoWitnessFound,
}

impl fmt::Display for CtsSeparationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CtsSeparationError::InputMismatch => {
                f.write_str("inputs are not glued computations of the same system")
            }
            CtsSeparationError::NoWitnessFound => {
                f.write_str("inputs differ but no witness shape applies")
            }
        }
    }
}

/// Parsed view of one glued computation's base.
struct CtsView {
    nodes: BTreeMap<ElementId, AgentHistory>,
    edges: BTreeMap<ElementId, CtsEdgeId>,
    successor: BTreeMap<ElementId, ElementId>,
    order: OrderIndex,
    depth: BTreeMap<ElementId, u32>,
}

fn cts_view(sys: &CtsSystem, glpo: &GluedLpo) -> Option<CtsView> {
    let eps = ElementId::new(E_EPSILON);
    let mut nodes = BTreeMap::new();
    for id in &glpo.base.nodes {
        nodes.insert(id.clone(), AgentHistory::parse(id.as_str(), sys)?);
    }
    let mut edges = BTreeMap::new();
    for id in &glpo.base.edges {
        if *id == eps {
            continue;
        }
        edges.insert(id.clone(), CtsEdgeId::parse(id.as_str(), sys)?);
    }
    if !glpo.base.edges.contains(&eps) {
        return None;
    }
    let mut successor = BTreeMap::new();
    for (a, b) in &glpo.base.comm {
        if glpo.base.nodes.contains(a)
            && glpo.base.edges.contains(b)
            && successor.insert(a.clone(), b.clone()).is_some()
        {
            return None;
        }
    }
    let order = glpo.base.order();
    let depth = graph_depths(&glpo.base)?;
    Some(CtsView {
        nodes,
        edges,
        successor,
        order,
        depth,
    })
}

/// Longest-path depth from the minimal elements over comm ∪ interleave.
fn graph_depths(lpo: &Lpo) -> Option<BTreeMap<ElementId, u32>> {
    let mut preds: BTreeMap<&ElementId, Vec<&ElementId>> = BTreeMap::new();
    let mut out_count: BTreeMap<&ElementId, usize> = BTreeMap::new();
    for id in lpo.elements() {
        preds.entry(id).or_default();
        out_count.entry(id).or_insert(0);
    }
    let mut in_count: BTreeMap<&ElementId, usize> = BTreeMap::new();
    for (a, b) in lpo.comm.iter().chain(lpo.interleave.iter()) {
        preds.entry(b).or_default().push(a);
        *in_count.entry(b).or_insert(0) += 1;
    }
    let mut depth: BTreeMap<ElementId, u32> = BTreeMap::new();
    let mut remaining: Vec<&ElementId> = lpo.elements().collect();
    // Kahn-style relaxation; the graph is small.
    let mut progress = true;
    while !remaining.is_empty() && progress {
        progress = false;
        let mut next = Vec::new();
        for id in remaining {
            let ps = &preds[id];
            if ps.iter().all(|p| depth.contains_key(*p)) {
                let d = ps.iter().map(|p| depth[*p] + 1).max().unwrap_or(0);
                depth.insert(id.clone(), d);
                progress = true;
            } else {
                next.push(id);
            }
        }
        remaining = next;
    }
    if depth.len() == lpo.element_count() {
        Some(depth)
    } else {
        None
    }
}

/// The history's own view of an event's label: its role flips the
/// polarity.
fn local_label(h: &AgentHistory, edge: &CtsEdgeId) -> String {
    if edge.sender == h.agent {
        edge.label.render()
    } else {
        edge.label.matching_receive().render()
    }
}

/// Finds the first difference between two glued computations, walking
/// shared structure in increasing depth order; same-channel order reversals
/// are searched when the element structure agrees.
pub fn separation_witness_cts(
    sys: &CtsSystem,
    g1: &GluedLpo,
    g2: &GluedLpo,
) -> Result<CtsSeparation, CtsSeparationError> {
    let left = cts_view(sys, g1).ok_or(CtsSeparationError::InputMismatch)?;
    let right = cts_view(sys, g2).ok_or(CtsSeparationError::InputMismatch)?;
    if g1 == g2 {
        return Ok(CtsSeparation::Equal);
    }

    let eps = ElementId::new(E_EPSILON);
    let mut marked: BTreeSet<ElementId> = BTreeSet::new();
    marked.insert(eps.clone());

    let key =
        |view: &CtsView, id: &ElementId| (view.depth.get(id).copied().unwrap_or(0), id.clone());

    loop {
        let next_left = left
            .edges
            .keys()
            .filter(|id| !marked.contains(*id))
            .min_by_key(|id| key(&left, id))
            .cloned();
        let next_right = right
            .edges
            .keys()
            .filter(|id| !marked.contains(*id))
            .min_by_key(|id| key(&right, id))
            .cloned();
        match (next_left, next_right) {
            (None, None) => {
                // Element structure agrees; the difference must be in the
                // same-channel order.
                return channel_order_witness(&left, &right)
                    .map(CtsSeparation::Witness)
                    .ok_or(CtsSeparationError::NoWitnessFound);
            }
            (None, Some(e2)) => {
                let edge = &right.edges[&e2];
                let sender = edge
                    .preset
                    .iter()
                    .find(|h| h.agent == edge.sender)
                    .ok_or(CtsSeparationError::InputMismatch)?;
                return Ok(CtsSeparation::Witness(CtsWitness::MaximalityMismatch {
                    agent: sender.agent,
                    history: sender.clone(),
                    maximal_in: Side::Left,
                }));
            }
            (Some(e1), None) => {
                let edge = &left.edges[&e1];
                let sender = edge
                    .preset
                    .iter()
                    .find(|h| h.agent == edge.sender)
                    .ok_or(CtsSeparationError::InputMismatch)?;
                return Ok(CtsSeparation::Witness(CtsWitness::MaximalityMismatch {
                    agent: sender.agent,
                    history: sender.clone(),
                    maximal_in: Side::Right,
                }));
            }
            (Some(e1), Some(_)) => {
                let edge = left.edges[&e1].clone();
                for h in &edge.preset {
                    let hid = h.id(sys);
                    if !right.nodes.contains_key(&hid) {
                        return Err(CtsSeparationError::InputMismatch);
                    }
                    let Some(succ2) = right.successor.get(&hid) else {
                        return Ok(CtsSeparation::Witness(CtsWitness::MaximalityMismatch {
                            agent: h.agent,
                            history: h.clone(),
                            maximal_in: Side::Right,
                        }));
                    };
                    let right_label = local_label(h, &right.edges[succ2]);
                    let left_label = local_label(h, &edge);
                    if left_label != right_label {
                        return Ok(CtsSeparation::Witness(CtsWitness::NextLabelMismatch {
                            agent: h.agent,
                            history: h.clone(),
                            left_label,
                            right_label,
                        }));
                    }
                }
                if right.edges.contains_key(&e1) {
                    marked.insert(e1);
                    continue;
                }
                // Same local labels everywhere, but the events themselves
                // differ: the participants are matched to communications in
                // a different way or order.
                return channel_order_witness(&left, &right)
                    .map(CtsSeparation::Witness)
                    .ok_or(CtsSeparationError::NoWitnessFound);
            }
        }
    }
}

/// Finds two shared histories whose next communications are ordered
/// differently by the two sides.
fn channel_order_witness(left: &CtsView, right: &CtsView) -> Option<CtsWitness> {
    let shared: Vec<(&ElementId, &AgentHistory)> = left
        .nodes
        .iter()
        .filter(|(id, _)| right.nodes.contains_key(*id))
        .collect();
    for (i, (id_a, h_a)) in shared.iter().enumerate() {
        for (id_b, h_b) in &shared[i + 1..] {
            if h_a.agent == h_b.agent {
                continue;
            }
            let (Some(la), Some(lb)) = (left.successor.get(*id_a), left.successor.get(id_b)) else {
                continue;
            };
            let (Some(ra), Some(rb)) = (right.successor.get(*id_a), right.successor.get(id_b))
            else {
                continue;
            };
            let lo = left.order.relation(la, lb)?;
            let ro = right.order.relation(ra, rb)?;
            if lo != ro {
                return Some(CtsWitness::ChannelOrderMismatch {
                    agents: (h_a.agent, h_b.agent),
                    histories: ((*h_a).clone(), (*h_b).clone()),
                    left_edges: (la.clone(), lb.clone()),
                    right_edges: (ra.clone(), rb.clone()),
                    orders: (lo, ro),
                });
            }
        }
    }
    None
}

/// Re-validates a witness against the two inputs it was extracted from.
pub fn cts_witness_valid(
    sys: &CtsSystem,
    g1: &GluedLpo,
    g2: &GluedLpo,
    witness: &CtsWitness,
) -> bool {
    let (Some(left), Some(right)) = (cts_view(sys, g1), cts_view(sys, g2)) else {
        return false;
    };
    match witness {
        CtsWitness::MaximalityMismatch {
            agent,
            history,
            maximal_in,
        } => {
            let id = history.id(sys);
            let (max_side, other) = match maximal_in {
                Side::Left => (&left, &right),
                Side::Right => (&right, &left),
            };
            history.agent == *agent
                && left.nodes.contains_key(&id)
                && right.nodes.contains_key(&id)
                && !max_side.successor.contains_key(&id)
                && other.successor.contains_key(&id)
        }
        CtsWitness::NextLabelMismatch {
            agent,
            history,
            left_label,
            right_label,
        } => {
            let id = history.id(sys);
            let (Some(l), Some(r)) = (left.successor.get(&id), right.successor.get(&id)) else {
                return false;
            };
            history.agent == *agent
                && left_label != right_label
                && local_label(history, &left.edges[l]) == *left_label
                && local_label(history, &right.edges[r]) == *right_label
        }
        CtsWitness::ChannelOrderMismatch {
            agents,
            histories,
            left_edges,
            right_edges,
            orders,
        } => {
            let (ha, hb) = histories;
            let (ia, ib) = (ha.id(sys), hb.id(sys));
            let in_both = left.nodes.contains_key(&ia)
                && left.nodes.contains_key(&ib)
                && right.nodes.contains_key(&ia)
                && right.nodes.contains_key(&ib);
            in_both
                && (ha.agent, hb.agent) == *agents
                && left.successor.get(&ia) == Some(&left_edges.0)
                && left.successor.get(&ib) == Some(&left_edges.1)
                && right.successor.get(&ia) == Some(&right_edges.0)
                && right.successor.get(&ib) == Some(&right_edges.1)
                && left.order.relation(&left_edges.0, &left_edges.1) == Some(orders.0)
                && right.order.relation(&right_edges.0, &right_edges.1) == Some(orders.1)
                && orders.0 != orders.1
        }
    }
}
