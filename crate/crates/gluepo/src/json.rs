//! Versioned, byte-stable JSON documents for LPOs and glued LPOs.
//!
//! Field order is fixed by the struct definitions and all lists are sorted
//! lexicographically, so equal values serialize to equal bytes.

use std::collections::BTreeMap;

use gluepo_core::po::{ElementId, GlueRelation, GluedLpo, Lpo, Pair};
use serde::{Deserialize, Serialize};

/// Schema version of the documents in this module.
pub const SCHEMA_VERSION: u32 = 1;

fn current_version<'de, D>(d: D) -> Result<u32, D::Error>
where
    D: serde::Deserializer<'de>,
{
    let v = u32::deserialize(d)?;
    if v != SCHEMA_VERSION {
        return Err(serde::de::Error::custom(format!(
            "unsupported schema version {v}, expected {SCHEMA_VERSION}"
        )));
    }
    Ok(v)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LpoDoc {
    #[serde(deserialize_with = "current_version")]
    pub version: u32,
    pub nodes: Vec<String>,
    pub edges: Vec<String>,
    pub comm: Vec<(String, String)>,
    pub interleave: Vec<(String, String)>,
    pub node_labels: BTreeMap<String, String>,
    pub edge_labels: BTreeMap<String, String>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GluedLpoDoc {
    #[serde(deserialize_with = "current_version")]
    pub version: u32,
    pub base: LpoDoc,
    pub glues: Vec<Vec<(String, String)>>,
    pub assignment: BTreeMap<String, Vec<(String, String)>>,
}

fn pairs_out(pairs: impl IntoIterator<Item = Pair>) -> Vec<(String, String)> {
    pairs.into_iter().map(|(a, b)| (a.0, b.0)).collect()
}

fn pairs_in(pairs: &[(String, String)]) -> impl Iterator<Item = Pair> + '_ {
    pairs
        .iter()
        .map(|(a, b)| (ElementId::new(a.clone()), ElementId::new(b.clone())))
}

impl From<&Lpo> for LpoDoc {
    fn from(lpo: &Lpo) -> Self {
        LpoDoc {
            version: SCHEMA_VERSION,
            nodes: lpo.nodes.iter().map(|n| n.0.clone()).collect(),
            edges: lpo.edges.iter().map(|e| e.0.clone()).collect(),
            comm: pairs_out(lpo.comm.iter().cloned()),
            interleave: pairs_out(lpo.interleave.iter().cloned()),
            node_labels: lpo
                .node_label
                .iter()
                .map(|(k, v)| (k.0.clone(), v.clone()))
                .collect(),
            edge_labels: lpo
                .edge_label
                .iter()
                .map(|(k, v)| (k.0.clone(), v.clone()))
                .collect(),
        }
    }
}

impl From<&LpoDoc> for Lpo {
    fn from(doc: &LpoDoc) -> Self {
        Lpo {
            nodes: doc
                .nodes
                .iter()
                .map(|n| ElementId::new(n.clone()))
                .collect(),
            edges: doc
                .edges
                .iter()
                .map(|e| ElementId::new(e.clone()))
                .collect(),
            comm: pairs_in(&doc.comm).collect(),
            interleave: pairs_in(&doc.interleave).collect(),
            node_label: doc
                .node_labels
                .iter()
                .map(|(k, v)| (ElementId::new(k.clone()), v.clone()))
                .collect(),
            edge_label: doc
                .edge_labels
                .iter()
                .map(|(k, v)| (ElementId::new(k.clone()), v.clone()))
                .collect(),
        }
    }
}

impl From<&GluedLpo> for GluedLpoDoc {
    fn from(glpo: &GluedLpo) -> Self {
        GluedLpoDoc {
            version: SCHEMA_VERSION,
            base: LpoDoc::from(&glpo.base),
            glues: glpo
                .glues
                .iter()
                .map(|g| pairs_out(g.pairs.iter().cloned()))
                .collect(),
            assignment: glpo
                .assignment
                .iter()
                .map(|(label, g)| (label.clone(), pairs_out(g.pairs.iter().cloned())))
                .collect(),
        }
    }
}

impl From<&GluedLpoDoc> for GluedLpo {
    fn from(doc: &GluedLpoDoc) -> Self {
        GluedLpo {
            base: Lpo::from(&doc.base),
            glues: doc
                .glues
                .iter()
                .map(|g| GlueRelation::new(pairs_in(g).collect()))
                .collect(),
            assignment: doc
                .assignment
                .iter()
                .map(|(label, g)| (label.clone(), GlueRelation::new(pairs_in(g).collect())))
                .collect(),
        }
    }
}

/// Serializes any document in the canonical (pretty, sorted) form.
pub fn to_canonical_json<T: Serialize>(doc: &T) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("documents serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn sample() -> Lpo {
        let mut lpo = Lpo::default();
        lpo.nodes.insert(ElementId::new("v1"));
        lpo.edges.insert(ElementId::new("e1"));
        lpo.edges.insert(ElementId::new("e2"));
        lpo.comm
            .insert((ElementId::new("e1"), ElementId::new("v1")));
        lpo.comm
            .insert((ElementId::new("v1"), ElementId::new("e2")));
        lpo.node_label.insert(ElementId::new("v1"), "v1".into());
        lpo.edge_label.insert(ElementId::new("e1"), "a".into());
        lpo.edge_label.insert(ElementId::new("e2"), "b".into());
        lpo
    }

    #[test]
    fn lpo_round_trips() {
        let lpo = sample();
        let doc = LpoDoc::from(&lpo);
        assert_eq!(doc.version, SCHEMA_VERSION);
        let back = Lpo::from(&doc);
        assert_eq!(back, lpo);
    }

    #[test]
    fn glpo_round_trips_and_is_byte_stable() {
        let lpo = sample();
        let glue = GlueRelation::new(BTreeSet::from([(
            ElementId::new("e1"),
            ElementId::new("v1"),
        )]));
        let glpo = GluedLpo {
            base: lpo,
            glues: BTreeSet::from([glue.clone()]),
            assignment: BTreeMap::from([("b".to_string(), glue)]),
        };
        let doc = GluedLpoDoc::from(&glpo);
        assert_eq!(GluedLpo::from(&doc), glpo);
        let a = to_canonical_json(&doc);
        let b = to_canonical_json(&GluedLpoDoc::from(&GluedLpo::from(&doc)));
        assert_eq!(a, b);
        let parsed: GluedLpoDoc = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed, doc);
    }
}
