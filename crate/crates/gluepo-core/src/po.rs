//! Generic labelled partial orders with two order-generating relations,
//! glue relations, refinement, embedding, and maximality.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Canonical element identifier.
///
/// Node ids are full history values and edge ids canonical event
/// identities, so structural equality of ids coincides with semantic
/// identity of elements. No isomorphism search is ever needed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct ElementId(pub String);

impl ElementId {
    pub fn new(s: impl Into<String>) -> Self {
        ElementId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ElementId {
    fn from(s: &str) -> Self {
        ElementId::new(s)
    }
}

/// A directed pair of elements.
pub type Pair = (ElementId, ElementId);

/// Outcome of comparing two elements under the generated partial order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum OrderRelation {
    Before,
    After,
    Equal,
    Incomparable,
}

impl fmt::Display for OrderRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OrderRelation::Before => "before",
            OrderRelation::After => "after",
            OrderRelation::Equal => "equal",
            OrderRelation::Incomparable => "incomparable",
        };
        f.write_str(s)
    }
}

/// Error for queries naming an element that is not part of the LPO.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UnknownElement(pub ElementId);

impl fmt::Display for UnknownElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown element id `{}`", self.0)
    }
}

/// A labelled partial order.
///
/// Elements are partitioned into nodes and edges. `comm` relates nodes and
/// edges (participation), `interleave` relates edges to edges (forced
/// scheduling). The order `<=` is the reflexive-transitive closure of their
/// union and must be a partial order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct Lpo {
    pub nodes: BTreeSet<ElementId>,
    pub edges: BTreeSet<ElementId>,
    pub comm: BTreeSet<Pair>,
    pub interleave: BTreeSet<Pair>,
    pub node_label: BTreeMap<ElementId, String>,
    pub edge_label: BTreeMap<ElementId, String>,
}

impl Lpo {
    pub fn contains(&self, id: &ElementId) -> bool {
        self.nodes.contains(id) || self.edges.contains(id)
    }

    pub fn elements(&self) -> impl Iterator<Item = &ElementId> {
        self.nodes.iter().chain(self.edges.iter())
    }

    pub fn element_count(&self) -> usize {
        self.nodes.len() + self.edges.len()
    }

    /// Label of an element, looked up in the partition it belongs to.
    pub fn label(&self, id: &ElementId) -> Option<&str> {
        self.node_label
            .get(id)
            .or_else(|| self.edge_label.get(id))
            .map(String::as_str)
    }

    /// Reflexive-transitive closure of `comm ∪ interleave`.
    pub fn order(&self) -> OrderIndex {
        OrderIndex::new(
            self.elements().cloned(),
            self.comm.iter().chain(self.interleave.iter()).cloned(),
        )
    }

    /// Compares two elements under the closure of `comm ∪ interleave`.
    pub fn order_query(
        &self,
        a: &ElementId,
        b: &ElementId,
    ) -> Result<OrderRelation, UnknownElement> {
        if !self.contains(a) {
            return Err(UnknownElement(a.clone()));
        }
        if !self.contains(b) {
            return Err(UnknownElement(b.clone()));
        }
        Ok(self.order().relation(a, b).expect("elements are indexed"))
    }

    /// Checks every structural invariant and reports all violations.
    pub fn validate(&self) -> ValidityReport {
        let mut report = ValidityReport::default();

        for id in self.nodes.intersection(&self.edges) {
            report.push(Violation::NodeEdgeOverlap(id.clone()));
        }
        for id in &self.nodes {
            if !self.node_label.contains_key(id) {
                report.push(Violation::MissingLabel(id.clone()));
            }
        }
        for id in &self.edges {
            if !self.edge_label.contains_key(id) {
                report.push(Violation::MissingLabel(id.clone()));
            }
        }
        for id in self.node_label.keys() {
            if !self.nodes.contains(id) {
                report.push(Violation::DanglingLabel(id.clone()));
            }
        }
        for id in self.edge_label.keys() {
            if !self.edges.contains(id) {
                report.push(Violation::DanglingLabel(id.clone()));
            }
        }

        for pair in &self.comm {
            if !self.contains(&pair.0) || !self.contains(&pair.1) {
                report.push(Violation::DanglingRelation(
                    RelationKind::Comm,
                    pair.clone(),
                ));
                continue;
            }
            let node_to_edge = self.nodes.contains(&pair.0) && self.edges.contains(&pair.1);
            let edge_to_node = self.edges.contains(&pair.0) && self.nodes.contains(&pair.1);
            if !node_to_edge && !edge_to_node {
                report.push(Violation::CommTyping(pair.clone()));
            }
        }
        for pair in &self.interleave {
            if !self.contains(&pair.0) || !self.contains(&pair.1) {
                report.push(Violation::DanglingRelation(
                    RelationKind::Interleave,
                    pair.clone(),
                ));
                continue;
            }
            if !(self.edges.contains(&pair.0) && self.edges.contains(&pair.1)) {
                report.push(Violation::InterleaveTyping(pair.clone()));
            }
        }
        for pair in self.comm.intersection(&self.interleave) {
            report.push(Violation::RelationOverlap(pair.clone()));
        }

        self.check_relation(RelationKind::Comm, &self.comm, &mut report);
        self.check_relation(RelationKind::Interleave, &self.interleave, &mut report);

        let order = self.order();
        for a in self.elements() {
            for b in self.elements() {
                if a < b && order.le(a, b) == Some(true) && order.le(b, a) == Some(true) {
                    report.push(Violation::OrderCycle(a.clone(), b.clone()));
                }
            }
        }

        report
    }

    fn check_relation(
        &self,
        kind: RelationKind,
        rel: &BTreeSet<Pair>,
        report: &mut ValidityReport,
    ) {
        for (a, b) in rel {
            if a == b {
                report.push(Violation::SelfLoop(kind, (a.clone(), b.clone())));
            }
            if a < b && rel.contains(&(b.clone(), a.clone())) {
                report.push(Violation::MutualPair(kind, (a.clone(), b.clone())));
            }
        }
        // Non-transitivity: no pair of the relation may be implied by a
        // two-step composition within the same relation.
        for (a, b) in rel {
            for (x, y) in rel.range((a.clone(), ElementId::default())..) {
                if x != a {
                    break;
                }
                if y != b && rel.contains(&(y.clone(), b.clone())) {
                    report.push(Violation::TransitiveTriple(
                        kind,
                        (a.clone(), b.clone()),
                        y.clone(),
                    ));
                }
            }
        }
    }
}

/// Which relation a violation concerns.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RelationKind {
    Comm,
    Interleave,
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationKind::Comm => "comm",
            RelationKind::Interleave => "interleave",
        })
    }
}

/// A violated structural invariant of an [`Lpo`] or [`GluedLpo`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    NodeEdgeOverlap(ElementId),
    MissingLabel(ElementId),
    DanglingLabel(ElementId),
    DanglingRelation(RelationKind, Pair),
    CommTyping(Pair),
    InterleaveTyping(Pair),
    RelationOverlap(Pair),
    SelfLoop(RelationKind, Pair),
    MutualPair(RelationKind, Pair),
    TransitiveTriple(RelationKind, Pair, ElementId),
    OrderCycle(ElementId, ElementId),
    GluePairNotInComm(Pair),
    AssignmentNotInFamily(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NodeEdgeOverlap(id) => write!(f, "element `{id}` is both node and edge"),
            Violation::MissingLabel(id) => write!(f, "element `{id}` has no label"),
            Violation::DanglingLabel(id) => write!(f, "label for unknown element `{id}`"),
            Violation::DanglingRelation(k, (a, b)) => {
                write!(f, "{k} pair ({a}, {b}) references an unknown element")
            }
            Violation::CommTyping((a, b)) => {
                write!(f, "comm pair ({a}, {b}) is not node-edge or edge-node")
            }
            Violation::InterleaveTyping((a, b)) => {
                write!(f, "interleave pair ({a}, {b}) is not edge-edge")
            }
            Violation::RelationOverlap((a, b)) => {
                write!(f, "pair ({a}, {b}) is in both comm and interleave")
            }
            Violation::SelfLoop(k, (a, _)) => write!(f, "{k} has self-loop on `{a}`"),
            Violation::MutualPair(k, (a, b)) => {
                write!(f, "{k} contains both ({a}, {b}) and ({b}, {a})")
            }
            Violation::TransitiveTriple(k, (a, b), via) => {
                write!(f, "{k} pair ({a}, {b}) is implied two-step via `{via}`")
            }
            Violation::OrderCycle(a, b) => {
                write!(f, "order cycle through `{a}` and `{b}`")
            }
            Violation::GluePairNotInComm((a, b)) => {
                write!(f, "glue pair ({a}, {b}) is not in comm")
            }
            Violation::AssignmentNotInFamily(label) => {
                write!(
                    f,
                    "glue assigned to label `{label}` is not in the glue family"
                )
            }
        }
    }
}

/// Result of a validity check: empty means the structure is well formed.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }
}

/// Reflexive-transitive closure over a fixed element universe.
pub struct OrderIndex {
    ids: Vec<ElementId>,
    pos: BTreeMap<ElementId, usize>,
    reach: Vec<bool>,
    n: usize,
}

impl OrderIndex {
    pub fn new(
        elements: impl IntoIterator<Item = ElementId>,
        pairs: impl IntoIterator<Item = Pair>,
    ) -> Self {
        let ids: Vec<ElementId> = elements.into_iter().collect();
        let n = ids.len();
        let pos: BTreeMap<ElementId, usize> = ids
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, id)| (id, i))
            .collect();
        let mut reach = vec![false; n * n];
        for i in 0..n {
            reach[i * n + i] = true;
        }
        for (a, b) in pairs {
            if let (Some(&i), Some(&j)) = (pos.get(&a), pos.get(&b)) {
                reach[i * n + j] = true;
            }
        }
        // Warshall closure; universes are small (tens to low hundreds).
        for k in 0..n {
            for i in 0..n {
                if reach[i * n + k] {
                    for j in 0..n {
                        if reach[k * n + j] {
                            reach[i * n + j] = true;
                        }
                    }
                }
            }
        }
        OrderIndex { ids, pos, reach, n }
    }

    pub fn le(&self, a: &ElementId, b: &ElementId) -> Option<bool> {
        let i = *self.pos.get(a)?;
        let j = *self.pos.get(b)?;
        Some(self.reach[i * self.n + j])
    }

    pub fn relation(&self, a: &ElementId, b: &ElementId) -> Option<OrderRelation> {
        if a == b {
            self.pos.get(a)?;
            return Some(OrderRelation::Equal);
        }
        let ab = self.le(a, b)?;
        let ba = self.le(b, a)?;
        Some(match (ab, ba) {
            (true, true) => OrderRelation::Equal, // only on cycles; callers validate first
            (true, false) => OrderRelation::Before,
            (false, true) => OrderRelation::After,
            (false, false) => OrderRelation::Incomparable,
        })
    }

    pub fn comparable(&self, a: &ElementId, b: &ElementId) -> Option<bool> {
        Some(self.relation(a, b)? != OrderRelation::Incomparable)
    }

    pub fn is_acyclic(&self) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.reach[i * self.n + j] && self.reach[j * self.n + i] {
                    return false;
                }
            }
        }
        true
    }

    pub fn ids(&self) -> &[ElementId] {
        &self.ids
    }
}

/// A glue relation: a subset of the host LPO's comm pairs. An edge glued to
/// a pair (a, b) must happen wholly before a or wholly after b.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct GlueRelation {
    pub pairs: BTreeSet<Pair>,
}

impl GlueRelation {
    pub fn new(pairs: BTreeSet<Pair>) -> Self {
        GlueRelation { pairs }
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// A glued LPO: a base LPO (with its own interleaving `→i^g`), a family of
/// glue relations, and a partial label-indexed glue assignment. Labels
/// absent from the assignment carry empty glue.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct GluedLpo {
    pub base: Lpo,
    pub glues: BTreeSet<GlueRelation>,
    pub assignment: BTreeMap<String, GlueRelation>,
}

impl GluedLpo {
    /// Glue pairs for an edge label; absent labels mean empty glue.
    pub fn glue_for(&self, label: &str) -> Option<&GlueRelation> {
        self.assignment.get(label)
    }

    pub fn validate(&self) -> ValidityReport {
        let mut report = self.base.validate();
        for glue in &self.glues {
            for pair in &glue.pairs {
                if !self.base.comm.contains(pair) {
                    report.push(Violation::GluePairNotInComm(pair.clone()));
                }
            }
        }
        for (label, glue) in &self.assignment {
            if !self.glues.contains(glue) {
                report.push(Violation::AssignmentNotInFamily(label.clone()));
            }
        }
        report
    }
}

/// Why a refinement check failed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RefineFailure {
    /// Clause 1: same elements but labels differ.
    LabelMismatch(ElementId),
    /// Clause 1: comm relations differ; the pair is in exactly one side.
    CommMismatch(Pair),
    /// Clause 2: a base interleave pair is missing from the refining LPO.
    BaseInterleaveDropped(Pair),
    /// Clause 3: a glue pair of a labelled edge is not resolved.
    UnresolvedGlue { edge: ElementId, pair: Pair },
    /// Clause 4: an added interleave pair has no glue justification.
    UnjustifiedInterleave(Pair),
}

impl fmt::Display for RefineFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefineFailure::LabelMismatch(id) => write!(f, "labels differ on `{id}`"),
            RefineFailure::CommMismatch((a, b)) => {
                write!(f, "comm pair ({a}, {b}) present in one side only")
            }
            RefineFailure::BaseInterleaveDropped((a, b)) => {
                write!(f, "base interleave pair ({a}, {b}) not kept")
            }
            RefineFailure::UnresolvedGlue { edge, pair: (a, b) } => {
                write!(
                    f,
                    "edge `{edge}` resolves glue pair ({a}, {b}) neither before nor after"
                )
            }
            RefineFailure::UnjustifiedInterleave((a, b)) => {
                write!(
                    f,
                    "added interleave pair ({a}, {b}) has no glue justification"
                )
            }
        }
    }
}

/// Outcome of [`refines`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Refinement {
    Holds,
    Fails(RefineFailure),
}

impl Refinement {
    pub fn holds(&self) -> bool {
        matches!(self, Refinement::Holds)
    }
}

/// The two arguments do not even range over the same elements; this is an
/// error, not a `false` answer.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ElementUniverseMismatch;

impl fmt::Display for ElementUniverseMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("LPO and glued LPO range over different element sets")
    }
}

/// Does `lpo` refine `glpo`?
///
/// The two must share nodes, edges, labels and comm; the base interleaving
/// must be kept; every glue pair of every labelled edge must be resolved
/// strictly before-or-after; and every extra interleave pair must be
/// justified by glue.
pub fn refines(lpo: &Lpo, glpo: &GluedLpo) -> Result<Refinement, ElementUniverseMismatch> {
    let base = &glpo.base;
    if lpo.nodes != base.nodes || lpo.edges != base.edges {
        return Err(ElementUniverseMismatch);
    }
    if lpo.node_label != base.node_label || lpo.edge_label != base.edge_label {
        let id = lpo
            .elements()
            .find(|id| lpo.label(id) != base.label(id))
            .cloned()
            .unwrap_or_default();
        return Ok(Refinement::Fails(RefineFailure::LabelMismatch(id)));
    }
    if lpo.comm != base.comm {
        let pair = lpo
            .comm
            .symmetric_difference(&base.comm)
            .next()
            .cloned()
            .unwrap_or_default();
        return Ok(Refinement::Fails(RefineFailure::CommMismatch(pair)));
    }
    for pair in &base.interleave {
        if !lpo.interleave.contains(pair) {
            return Ok(Refinement::Fails(RefineFailure::BaseInterleaveDropped(
                pair.clone(),
            )));
        }
    }

    let order = lpo.order();
    for edge in &lpo.edges {
        let label = lpo.edge_label.get(edge).expect("validated edge label");
        let Some(glue) = glpo.glue_for(label) else {
            continue;
        };
        for (a, b) in &glue.pairs {
            let before = order.le(edge, a) == Some(true);
            let after = order.le(b, edge) == Some(true);
            if !before && !after {
                return Ok(Refinement::Fails(RefineFailure::UnresolvedGlue {
                    edge: edge.clone(),
                    pair: (a.clone(), b.clone()),
                }));
            }
        }
    }

    for pair in lpo.interleave.difference(&base.interleave) {
        if !pair_justified(lpo, glpo, pair) {
            return Ok(Refinement::Fails(RefineFailure::UnjustifiedInterleave(
                pair.clone(),
            )));
        }
    }

    Ok(Refinement::Holds)
}

/// An extra pair (e, e') is justified when (e', v) is glued for e's label or
/// (v, e) is glued for e''s label, for some node v.
fn pair_justified(lpo: &Lpo, glpo: &GluedLpo, (e, e2): &Pair) -> bool {
    if let Some(label) = lpo.edge_label.get(e) {
        if let Some(glue) = glpo.glue_for(label) {
            if glue.pairs.iter().any(|(a, _)| a == e2) {
                return true;
            }
        }
    }
    if let Some(label) = lpo.edge_label.get(e2) {
        if let Some(glue) = glpo.glue_for(label) {
            if glue.pairs.iter().any(|(_, b)| b == e) {
                return true;
            }
        }
    }
    false
}

/// Does `small` embed into `big`? Elements must be a subset, comm must be
/// exactly big's comm restricted to small's elements, and interleaving a
/// subset. Maximality of a computation is maximality under this order.
pub fn embeds(small: &Lpo, big: &Lpo) -> bool {
    if !small.nodes.is_subset(&big.nodes) || !small.edges.is_subset(&big.edges) {
        return false;
    }
    for (id, label) in &small.node_label {
        if big.node_label.get(id) != Some(label) {
            return false;
        }
    }
    for (id, label) in &small.edge_label {
        if big.edge_label.get(id) != Some(label) {
            return false;
        }
    }
    let restricted: BTreeSet<Pair> = big
        .comm
        .iter()
        .filter(|(a, b)| small.contains(a) && small.contains(b))
        .cloned()
        .collect();
    if small.comm != restricted {
        return false;
    }
    small.interleave.is_subset(&big.interleave)
}

/// Keeps exactly the LPOs maximal under [`embeds`].
pub fn maximal_filter(lpos: Vec<Lpo>) -> Vec<Lpo> {
    let mut out = Vec::new();
    for (i, candidate) in lpos.iter().enumerate() {
        let dominated = lpos
            .iter()
            .enumerate()
            .any(|(j, other)| i != j && candidate != other && embeds(candidate, other));
        if dominated {
            continue;
        }
        if !out.contains(candidate) {
            out.push(candidate.clone());
        }
    }
    out
}

/// All interleave pairs over the base's edges that could justify a
/// refinement extension, minus what the base already contains.
pub fn justified_pairs(glpo: &GluedLpo) -> Vec<Pair> {
    let base = &glpo.base;
    let mut out = Vec::new();
    for e in &base.edges {
        for e2 in &base.edges {
            if e == e2 {
                continue;
            }
            let pair = (e.clone(), e2.clone());
            if base.interleave.contains(&pair) {
                continue;
            }
            if pair_justified(base, glpo, &pair) {
                out.push(pair);
            }
        }
    }
    out
}

/// Exhaustively enumerates every LPO that refines `glpo`.
///
/// Candidates extend the base interleaving with subsets of the justified
/// pairs; cyclic extensions are pruned during the search. Only structurally
/// valid LPOs that pass [`refines`] are returned, in canonical order.
pub fn refinements(glpo: &GluedLpo) -> Vec<Lpo> {
    let candidates = justified_pairs(glpo);
    let ids: Vec<ElementId> = glpo.base.elements().cloned().collect();
    let pos: BTreeMap<&ElementId, usize> = ids.iter().enumerate().map(|(i, id)| (id, i)).collect();
    let n = ids.len();

    let mut reach = vec![false; n * n];
    for i in 0..n {
        reach[i * n + i] = true;
    }
    for (a, b) in glpo.base.comm.iter().chain(glpo.base.interleave.iter()) {
        if let (Some(&i), Some(&j)) = (pos.get(a), pos.get(b)) {
            reach[i * n + j] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i * n + k] {
                for j in 0..n {
                    if reach[k * n + j] {
                        reach[i * n + j] = true;
                    }
                }
            }
        }
    }

    let mut chosen: Vec<Pair> = Vec::new();
    let mut out: Vec<Lpo> = Vec::new();
    search(glpo, &candidates, 0, &mut chosen, reach, &pos, n, &mut out);
    out.sort();
    out
}

#[allow(clippy::too_many_arguments)]
fn search(
    glpo: &GluedLpo,
    candidates: &[Pair],
    idx: usize,
    chosen: &mut Vec<Pair>,
    reach: Vec<bool>,
    pos: &BTreeMap<&ElementId, usize>,
    n: usize,
    out: &mut Vec<Lpo>,
) {
    if idx == candidates.len() {
        let mut lpo = glpo.base.clone();
        lpo.interleave.extend(chosen.iter().cloned());
        if lpo.validate().is_ok() && matches!(refines(&lpo, glpo), Ok(Refinement::Holds)) {
            out.push(lpo);
        }
        return;
    }

    // Exclude the pair.
    search(
        glpo,
        candidates,
        idx + 1,
        chosen,
        reach.clone(),
        pos,
        n,
        out,
    );

    // Include the pair unless it closes a cycle.
    let (a, b) = &candidates[idx];
    let (&i, &j) = (pos.get(a).unwrap(), pos.get(b).unwrap());
    if reach[j * n + i] {
        return;
    }
    let mut next = reach;
    for x in 0..n {
        if next[x * n + i] {
            for y in 0..n {
                if next[j * n + y] {
                    next[x * n + y] = true;
                }
            }
        }
    }
    chosen.push(candidates[idx].clone());
    search(glpo, candidates, idx + 1, chosen, next, pos, n, out);
    chosen.pop();
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> ElementId {
        ElementId::new(s)
    }

    /// Small chain: e0 -> v1 -> e1 -> v2, plus an isolated node v3.
    fn chain() -> Lpo {
        let mut lpo = Lpo::default();
        for v in ["v1", "v2", "v3"] {
            lpo.nodes.insert(id(v));
            lpo.node_label.insert(id(v), v.into());
        }
        for e in ["e0", "e1"] {
            lpo.edges.insert(id(e));
            lpo.edge_label.insert(id(e), e.into());
        }
        lpo.comm.insert((id("e0"), id("v1")));
        lpo.comm.insert((id("v1"), id("e1")));
        lpo.comm.insert((id("e1"), id("v2")));
        lpo
    }

    #[test]
    fn order_query_chain() {
        let lpo = chain();
        assert_eq!(
            lpo.order_query(&id("e0"), &id("v2")),
            Ok(OrderRelation::Before)
        );
        assert_eq!(
            lpo.order_query(&id("v2"), &id("e0")),
            Ok(OrderRelation::After)
        );
        assert_eq!(
            lpo.order_query(&id("v1"), &id("v1")),
            Ok(OrderRelation::Equal)
        );
        assert_eq!(
            lpo.order_query(&id("v3"), &id("v2")),
            Ok(OrderRelation::Incomparable)
        );
        assert_eq!(
            lpo.order_query(&id("zz"), &id("v1")),
            Err(UnknownElement(id("zz")))
        );
    }

    #[test]
    fn validate_flags_self_loop_in_interleave() {
        let mut lpo = chain();
        lpo.interleave.insert((id("e1"), id("e1")));
        let report = lpo.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::SelfLoop(RelationKind::Interleave, _))));
    }

    #[test]
    fn validate_flags_interleave_cycle() {
        let mut lpo = chain();
        lpo.interleave.insert((id("e0"), id("e1")));
        lpo.interleave.insert((id("e1"), id("e0")));
        let report = lpo.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::MutualPair(RelationKind::Interleave, _))));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::OrderCycle(_, _))));
    }

    #[test]
    fn validate_flags_comm_typing() {
        let mut lpo = chain();
        lpo.comm.insert((id("v1"), id("v2")));
        let report = lpo.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::CommTyping(_))));
    }

    #[test]
    fn empty_glue_refines_itself() {
        let lpo = chain();
        let glpo = GluedLpo {
            base: lpo.clone(),
            glues: BTreeSet::new(),
            assignment: BTreeMap::new(),
        };
        assert_eq!(refines(&lpo, &glpo), Ok(Refinement::Holds));
    }

    #[test]
    fn refines_universe_mismatch_is_error() {
        let lpo = chain();
        let mut other = chain();
        other.nodes.insert(id("v9"));
        other.node_label.insert(id("v9"), "v9".into());
        let glpo = GluedLpo {
            base: other,
            glues: BTreeSet::new(),
            assignment: BTreeMap::new(),
        };
        assert_eq!(refines(&lpo, &glpo), Err(ElementUniverseMismatch));
    }

    #[test]
    fn embeds_is_reflexive() {
        let lpo = chain();
        assert!(embeds(&lpo, &lpo));
    }

    #[test]
    fn maximal_filter_singleton() {
        let lpo = chain();
        assert_eq!(maximal_filter(vec![lpo.clone()]), vec![lpo]);
    }

    #[test]
    fn refinements_of_empty_glue_is_base_only() {
        let glpo = GluedLpo {
            base: chain(),
            glues: BTreeSet::new(),
            assignment: BTreeMap::new(),
        };
        assert_eq!(refinements(&glpo), vec![glpo.base.clone()]);
    }
}
