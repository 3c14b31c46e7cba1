//! Deterministic DOT rendering of LPOs and glued LPOs.
//!
//! Nodes are ellipses labeled with their element label and history depth,
//! events are boxes, communication arrows are solid, interleaving arrows
//! dashed, and glue pairs are colored annotated arrows grouped per owning
//! event label.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use gluepo_core::po::{ElementId, GluedLpo, Lpo};

const GLUE_COLORS: &[&str] = &[
    "firebrick",
    "royalblue",
    "darkgreen",
    "darkorange",
    "purple",
];

// Model identifiers never contain backslashes, so only quotes need
// escaping; `\n` inside labels must reach DOT unescaped.
fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\\\""))
}

/// Longest-path depth from the minimal elements over comm ∪ interleave;
/// model-agnostic (works on raw relation structure, not element ids).
fn element_depths(lpo: &Lpo) -> BTreeMap<ElementId, u32> {
    let mut preds: BTreeMap<&ElementId, Vec<&ElementId>> = BTreeMap::new();
    for id in lpo.elements() {
        preds.entry(id).or_default();
    }
    for (a, b) in lpo.comm.iter().chain(lpo.interleave.iter()) {
        preds.entry(b).or_default().push(a);
    }
    let mut depth: BTreeMap<ElementId, u32> = BTreeMap::new();
    let mut remaining: Vec<&ElementId> = lpo.elements().collect();
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
    depth
}

fn write_elements(out: &mut String, lpo: &Lpo) {
    let depths = element_depths(lpo);
    for id in &lpo.nodes {
        let label = lpo.label(id).unwrap_or(id.as_str());
        let depth = depths.get(id).copied().unwrap_or(0);
        let _ = writeln!(
            out,
            "  {} [shape=ellipse, label={}];",
            quoted(id.as_str()),
            quoted(&format!("{label}\\nd={depth}"))
        );
    }
    for id in &lpo.edges {
        let label = lpo.label(id).unwrap_or(id.as_str());
        let _ = writeln!(
            out,
            "  {} [shape=box, label={}];",
            quoted(id.as_str()),
            quoted(label)
        );
    }
    for (a, b) in &lpo.comm {
        let _ = writeln!(out, "  {} -> {};", quoted(a.as_str()), quoted(b.as_str()));
    }
    for (a, b) in &lpo.interleave {
        let _ = writeln!(
            out,
            "  {} -> {} [style=dashed];",
            quoted(a.as_str()),
            quoted(b.as_str())
        );
    }
}

/// Renders one computation.
pub fn export_dot_lpo(lpo: &Lpo) -> String {
    let mut out = String::from("digraph lpo {\n  rankdir=TB;\n");
    write_elements(&mut out, lpo);
    out.push_str("}\n");
    out
}

/// Renders a glued computation: the base plus its glue annotations.
pub fn export_dot_glpo(glpo: &GluedLpo) -> String {
    let mut out = String::from("digraph glpo {\n  rankdir=TB;\n");
    write_elements(&mut out, &glpo.base);
    for (i, (label, glue)) in glpo.assignment.iter().enumerate() {
        let color = GLUE_COLORS[i % GLUE_COLORS.len()];
        for (a, b) in &glue.pairs {
            let _ = writeln!(
                out,
                "  {} -> {} [color={color}, fontcolor={color}, label={}, constraint=false];",
                quoted(a.as_str()),
                quoted(b.as_str()),
                quoted(&format!("glue:{label}"))
            );
        }
    }
    out.push_str("}\n");
    out
}

/// Renders either flavor behind one entry point.
pub enum Renderable<'a> {
    Lpo(&'a Lpo),
    Glpo(&'a GluedLpo),
}

pub fn export_dot(x: Renderable<'_>) -> String {
    match x {
        Renderable::Lpo(lpo) => export_dot_lpo(lpo),
        Renderable::Glpo(glpo) => export_dot_glpo(glpo),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gluepo_core::po::GlueRelation;
    use std::collections::{BTreeMap, BTreeSet};

    fn sample() -> Lpo {
        let mut lpo = Lpo::default();
        for v in ["v1", "v2"] {
            lpo.nodes.insert(ElementId::new(v));
            lpo.node_label.insert(ElementId::new(v), v.into());
        }
        for e in ["e1", "e2"] {
            lpo.edges.insert(ElementId::new(e));
            lpo.edge_label.insert(ElementId::new(e), e.into());
        }
        lpo.comm
            .insert((ElementId::new("e1"), ElementId::new("v1")));
        lpo.comm
            .insert((ElementId::new("v1"), ElementId::new("e2")));
        lpo.comm
            .insert((ElementId::new("e2"), ElementId::new("v2")));
        lpo
    }

    #[test]
    fn dot_is_deterministic_and_styled() {
        let lpo = sample();
        let a = export_dot_lpo(&lpo);
        let b = export_dot_lpo(&lpo.clone());
        assert_eq!(a, b);
        assert!(a.contains("shape=ellipse"));
        assert!(a.contains("shape=box"));
        assert!(a.contains("d=1"));
    }

    #[test]
    fn interleave_is_dashed_and_glue_annotated() {
        let mut lpo = sample();
        lpo.interleave
            .insert((ElementId::new("e1"), ElementId::new("e2")));
        assert!(export_dot_lpo(&lpo).contains("style=dashed"));

        let glue = GlueRelation::new(BTreeSet::from([(
            ElementId::new("v1"),
            ElementId::new("e2"),
        )]));
        let glpo = GluedLpo {
            base: sample(),
            glues: BTreeSet::from([glue.clone()]),
            assignment: BTreeMap::from([("e2".to_string(), glue)]),
        };
        let dot = export_dot_glpo(&glpo);
        assert!(dot.contains("glue:e2"));
        assert!(dot.contains("color=firebrick"));
    }
}
