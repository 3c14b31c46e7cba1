//! Structural suites: partial-order axioms checked exhaustively on small
//! instances, generator/validator agreement across all three models, and
//! canonical-identity stability under permuted enumeration order.

use std::collections::{BTreeMap, BTreeSet};

use gluepo_core::async_automata::{
    async_executions, enumerate_computations_async, lpo_from_async_execution, validate_lpo_async,
    AsyncSystem, Process,
};
use gluepo_core::cts::{
    enumerate_computations_cts, executions, lpo_from_execution, validate_lpo_cts, CtsAgent,
    CtsSystem, MulticastBlockMode, TransLabel,
};
use gluepo_core::po::{embeds, ElementId, Lpo};
use gluepo_core::pti::{
    enumerate_computations_pn, lpo_from_run, runs, validate_lpo_pn, Marking, PtiNet,
};

fn fig1() -> PtiNet {
    let mut net = PtiNet::default();
    for p in ["p1", "p2", "p3", "p4", "p5", "p6", "p7", "p8"] {
        net.places.insert(p.into());
    }
    for t in ["t1", "t2", "t3", "t4"] {
        net.transitions.insert(t.into());
    }
    let flows = [
        ("p1", "t1"),
        ("p2", "t1"),
        ("t1", "p3"),
        ("t1", "p4"),
        ("p3", "t2"),
        ("p4", "t2"),
        ("t2", "p5"),
        ("t2", "p6"),
        ("p4", "t3"),
        ("t3", "p6"),
        ("p7", "t4"),
        ("t4", "p8"),
    ];
    for (a, b) in flows {
        net.flow.insert((a.into(), b.into()), 1);
    }
    net.inhibitors.insert(("p3".into(), "t4".into()));
    net.initial = Marking::from_counts([("p1".into(), 1), ("p2".into(), 1), ("p7".into(), 1)]);
    net.check().expect("fig1 net is well-formed");
    net
}

fn fig2() -> CtsSystem {
    fn agent(
        name: &str,
        states: &[(&str, &[&str])],
        initial: &str,
        trans: &[(&str, TransLabel, &str)],
    ) -> CtsAgent {
        let mut a = CtsAgent {
            name: name.into(),
            initial: initial.into(),
            ..CtsAgent::default()
        };
        for (s, listen) in states {
            a.states.insert((*s).into());
            if !listen.is_empty() {
                a.listening
                    .insert((*s).into(), listen.iter().map(|c| (*c).into()).collect());
            }
        }
        for (s, l, s2) in trans {
            a.transitions.insert(((*s).into(), l.clone(), (*s2).into()));
        }
        a
    }
    let sys = CtsSystem {
        agents: vec![
            agent(
                "T1",
                &[("1", &[]), ("2", &[])],
                "1",
                &[("1", TransLabel::send("v1", "c"), "2")],
            ),
            agent(
                "T2",
                &[("1", &[]), ("2", &["c"]), ("3", &[])],
                "1",
                &[
                    ("1", TransLabel::send("v2", "d"), "2"),
                    ("2", TransLabel::send("v3", "e"), "3"),
                ],
            ),
            agent(
                "T3",
                &[("1", &["d"]), ("2", &["e"]), ("3", &[]), ("4", &[])],
                "1",
                &[
                    ("1", TransLabel::recv("v2", "d"), "2"),
                    ("2", TransLabel::recv("v3", "e"), "3"),
                    ("2", TransLabel::send("v4", "b"), "4"),
                ],
            ),
        ],
    };
    sys.check().expect("fig2 system is well-formed");
    sys
}

fn handshake() -> AsyncSystem {
    fn process(
        name: &str,
        letters: &[&str],
        states: &[&str],
        initial: &str,
        delta: &[(&str, &str, &str)],
    ) -> Process {
        Process {
            name: name.into(),
            alphabet: letters.iter().map(|a| (*a).into()).collect(),
            states: states.iter().map(|s| (*s).into()).collect(),
            initial: initial.into(),
            delta: delta
                .iter()
                .map(|(s, a, s2)| ((*s).into(), (*a).into(), (*s2).into()))
                .collect(),
        }
    }
    let sys = AsyncSystem {
        processes: vec![
            process(
                "P",
                &["a", "b"],
                &["1", "2", "3"],
                "1",
                &[("1", "a", "2"), ("2", "b", "3")],
            ),
            process(
                "Q",
                &["b", "c"],
                &["1", "2", "3"],
                "1",
                &[("1", "c", "2"), ("2", "b", "3")],
            ),
        ],
    };
    sys.check().expect("handshake system is well-formed");
    sys
}

/// Every computation any model module produces at moderate depth.
fn sample_lpos() -> Vec<Lpo> {
    let mut out = Vec::new();
    let net = fig1();
    for run in runs(&net, 4) {
        out.push(lpo_from_run(&net, &run));
    }
    let sys = fig2();
    for mode in [
        MulticastBlockMode::Listening,
        MulticastBlockMode::CannotReceive,
    ] {
        for exec in executions(&sys, 4) {
            out.push(lpo_from_execution(&sys, &exec, mode));
        }
    }
    let auto = handshake();
    for exec in async_executions(&auto, 3) {
        out.push(lpo_from_async_execution(&auto, &exec));
    }
    out
}

/// order_query defines a partial order on every instance with ≤ 40
/// elements: reflexive, antisymmetric, transitive, by exhaustive triples.
#[test]
fn order_is_a_partial_order_on_small_instances() {
    let mut checked = 0usize;
    for lpo in sample_lpos() {
        if lpo.element_count() > 40 {
            continue;
        }
        checked += 1;
        let order = lpo.order();
        let ids: Vec<&ElementId> = lpo.elements().collect();
        for a in &ids {
            assert_eq!(order.le(a, a), Some(true), "reflexivity at {a}");
            for b in &ids {
                if order.le(a, b) == Some(true) && order.le(b, a) == Some(true) {
                    assert_eq!(a, b, "antisymmetry at ({a}, {b})");
                }
                for c in &ids {
                    if order.le(a, b) == Some(true) && order.le(b, c) == Some(true) {
                        assert_eq!(order.le(a, c), Some(true), "transitivity at ({a},{b},{c})");
                    }
                }
            }
        }
    }
    assert!(checked >= 30, "only {checked} instances checked");
}

/// Typing and disjointness hold for every constructed computation.
#[test]
fn relations_are_typed_and_disjoint() {
    for lpo in sample_lpos() {
        assert!(lpo.nodes.is_disjoint(&lpo.edges));
        for (a, b) in &lpo.comm {
            let node_edge = lpo.nodes.contains(a) && lpo.edges.contains(b);
            let edge_node = lpo.edges.contains(a) && lpo.nodes.contains(b);
            assert!(node_edge || edge_node, "comm typing at ({a}, {b})");
            assert!(!lpo.interleave.contains(&(a.clone(), b.clone())));
        }
        for (a, b) in &lpo.interleave {
            assert!(lpo.edges.contains(a) && lpo.edges.contains(b));
        }
    }
}

/// embeds is reflexive and transitive on the sampled computations, and
/// antisymmetric through canonical identity.
#[test]
fn embeds_is_a_partial_order() {
    let lpos: Vec<Lpo> = {
        // Deduplicate to keep the cubic loop small.
        let set: BTreeSet<Lpo> = sample_lpos().into_iter().collect();
        set.into_iter().take(40).collect()
    };
    for a in &lpos {
        assert!(embeds(a, a));
        for b in &lpos {
            if embeds(a, b) && embeds(b, a) {
                assert_eq!(a, b);
            }
            for c in &lpos {
                if embeds(a, b) && embeds(b, c) {
                    assert!(embeds(a, c));
                }
            }
        }
    }
}

/// Every generated LPO passes its model validator.
#[test]
fn generator_validator_agreement() {
    let net = fig1();
    for run in runs(&net, 4) {
        let lpo = lpo_from_run(&net, &run);
        let report = validate_lpo_pn(&net, &lpo);
        assert!(report.is_ok(), "{:?}", report.violations);
    }
    let sys = fig2();
    for mode in [
        MulticastBlockMode::Listening,
        MulticastBlockMode::CannotReceive,
    ] {
        for exec in executions(&sys, 4) {
            let lpo = lpo_from_execution(&sys, &exec, mode);
            let report = validate_lpo_cts(&sys, &lpo, mode);
            assert!(report.is_ok(), "{:?}", report.violations);
        }
    }
    let auto = handshake();
    for exec in async_executions(&auto, 3) {
        let lpo = lpo_from_async_execution(&auto, &exec);
        let report = validate_lpo_async(&auto, &lpo);
        assert!(report.is_ok(), "{:?}", report.violations);
    }
}

/// Deduplicated computation sets do not depend on the order in which the
/// underlying schedules were enumerated.
#[test]
fn canonical_identity_is_enumeration_order_stable() {
    let net = fig1();
    let forward: BTreeSet<Lpo> = runs(&net, 4)
        .iter()
        .map(|r| lpo_from_run(&net, r))
        .collect();
    let backward: BTreeSet<Lpo> = runs(&net, 4)
        .iter()
        .rev()
        .map(|r| lpo_from_run(&net, r))
        .collect();
    assert_eq!(forward, backward);

    let sys = fig2();
    let mode = MulticastBlockMode::Listening;
    let forward: BTreeSet<Lpo> = executions(&sys, 4)
        .iter()
        .map(|e| lpo_from_execution(&sys, e, mode))
        .collect();
    let backward: BTreeSet<Lpo> = executions(&sys, 4)
        .iter()
        .rev()
        .map(|e| lpo_from_execution(&sys, e, mode))
        .collect();
    assert_eq!(forward, backward);
}

/// Each agent's histories form a chain, and each channel's events are
/// totally ordered, in every generated CTS computation.
#[test]
fn cts_chains_and_channel_orders() {
    let sys = fig2();
    let mode = MulticastBlockMode::Listening;
    for exec in executions(&sys, 4) {
        let lpo = lpo_from_execution(&sys, &exec, mode);
        let order = lpo.order();
        let mut by_agent: BTreeMap<&str, Vec<&ElementId>> = BTreeMap::new();
        for id in &lpo.nodes {
            let agent = id.as_str().split(':').next().unwrap();
            by_agent.entry(agent).or_default().push(id);
        }
        for group in by_agent.values() {
            for a in group {
                for b in group {
                    assert_eq!(order.comparable(a, b), Some(true), "chain broken: {a} {b}");
                }
            }
        }
        let mut by_channel: BTreeMap<&str, Vec<&ElementId>> = BTreeMap::new();
        for id in &lpo.edges {
            let label = lpo.label(id).unwrap();
            let channel = label.rsplit(['!', '?']).next().unwrap();
            by_channel.entry(channel).or_default().push(id);
        }
        for group in by_channel.values() {
            for a in group {
                for b in group {
                    assert_eq!(order.comparable(a, b), Some(true), "C5 broken: {a} {b}");
                }
            }
        }
    }
}

/// Cross-model sanity: the deduplicated maximal counts at the documented
/// depths stay frozen.
#[test]
fn frozen_maximal_counts() {
    let (lpos, glpos) = enumerate_computations_pn(&fig1(), 4, true);
    assert_eq!((lpos.len(), glpos.len()), (3, 2));
    let (lpos, glpos) = enumerate_computations_cts(&fig2(), 4, true, MulticastBlockMode::Listening);
    assert_eq!((lpos.len(), glpos.len()), (4, 2));
    let lpos = enumerate_computations_async(&handshake(), 3, true);
    assert_eq!(lpos.len(), 1);
}
