//! Acceptance suite: one test and one printed pass/fail line per
//! criterion. Run with `--nocapture` to see every line.
//!
//! 1. Fig. 1 counts: 3 maximal LPOs / 2 g-LPOs at max-events 4, < 1 s.
//! 2. Refinement counts of the two Fig. 1 g-LPOs: 2 and 1.
//! 3. Theorem 1 on fig1 and 200 seeded random PTI-nets, < 60 s.
//! 4. Theorem 2 on fig2 and 200 seeded random CTS systems, both
//!    multicast-block modes, < 120 s.
//! 5. Theorems 3–4: pairwise witnesses re-validate; equal g-images stay
//!    inseparable, over the same model populations as criteria 3–4.
//! 6. Async baseline over 100 seeded random systems.
//! 7. Structural suites: generator/validator agreement, canonical-identity
//!    stability, partial-order axioms on all instances ≤ 40 elements.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use gluepo::parse::{parse_model, Model};
use gluepo::random::{random_async_system, random_cts_system, random_pti_net, rng_for};
use gluepo::suite::{
    async_random_campaign, cts_random_campaign, cts_separation_suite, pn_random_campaign,
    pn_separation_suite,
};
use gluepo_core::async_automata::{
    check_async_baseline, enumerate_computations_async, validate_lpo_async, AsyncSystem,
};
use gluepo_core::cts::{
    check_refinement_theorem_cts, enumerate_computations_cts, validate_lpo_cts, CtsSystem,
    MulticastBlockMode,
};
use gluepo_core::po::{refinements, ElementId, Lpo};
use gluepo_core::pti::{
    check_refinement_theorem_pn, enumerate_computations_pn, validate_lpo_pn, PtiNet,
};

const BOTH_MODES: [MulticastBlockMode; 2] = [
    MulticastBlockMode::Listening,
    MulticastBlockMode::CannotReceive,
];

fn report(criterion: u32, ok: bool, detail: &str) {
    let verdict = if ok { "pass" } else { "fail" };
    println!("criterion {criterion}: {verdict} — {detail}");
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn fixture(name: &str) -> Model {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name);
    let text = std::fs::read_to_string(path).expect("fixtures ship with the crate");
    parse_model(&text).expect("fixtures parse")
}

fn fig1() -> PtiNet {
    let Model::Pti(net) = fixture("fig1.pti") else {
        panic!("fig1 is a net");
    };
    net
}

fn fig2() -> CtsSystem {
    let Model::Cts(sys) = fixture("fig2.cts") else {
        panic!("fig2 is a cts");
    };
    sys
}

fn handshake() -> AsyncSystem {
    let Model::Async(sys) = fixture("handshake.async") else {
        panic!("handshake is async");
    };
    sys
}

#[test]
fn criterion_1_fig1_counts() {
    let start = Instant::now();
    let (lpos, glpos) = enumerate_computations_pn(&fig1(), 4, true);
    let elapsed = start.elapsed();
    report(
        1,
        lpos.len() == 3 && glpos.len() == 2 && elapsed < Duration::from_secs(1),
        &format!(
            "fig1 at max-events 4: {} maximal LPOs, {} g-LPOs in {elapsed:?}",
            lpos.len(),
            glpos.len()
        ),
    );
}

#[test]
fn criterion_2_fig1_refinement_counts() {
    let (_, glpos) = enumerate_computations_pn(&fig1(), 4, true);
    let mut counts: Vec<usize> = glpos.iter().map(|g| refinements(g).len()).collect();
    counts.sort_unstable();
    report(
        2,
        counts == [1, 2],
        &format!("fig1 g-LPO refinement counts (sorted): {counts:?}, expected [1, 2]"),
    );
}

#[test]
fn criterion_3_theorem_1_at_desk_scale() {
    let start = Instant::now();
    let fig1_ok = check_refinement_theorem_pn(&fig1(), 5);
    let campaign = pn_random_campaign(200, 0, 5);
    let elapsed = start.elapsed();
    report(
        3,
        fig1_ok.is_ok() && campaign.is_ok() && elapsed < Duration::from_secs(60),
        &format!(
            "Theorem 1 on fig1 ({:?}) and 200 random nets ({}) in {elapsed:?}",
            fig1_ok.map(|()| "holds"),
            campaign
                .map(|s| format!("{} net(s) ok", s.models))
                .unwrap_or_else(|e| e),
        ),
    );
}

#[test]
fn criterion_4_theorem_2_at_desk_scale() {
    let start = Instant::now();
    let sys = fig2();
    let fig2_ok = BOTH_MODES
        .iter()
        .all(|&mode| check_refinement_theorem_cts(&sys, 5, mode).is_ok());
    let campaign = cts_random_campaign(200, 0, 5);
    let elapsed = start.elapsed();
    report(
        4,
        fig2_ok && campaign.is_ok() && elapsed < Duration::from_secs(120),
        &format!(
            "Theorem 2 on fig2 in both modes ({}) and 200 random systems ({}) in {elapsed:?}",
            if fig2_ok { "holds" } else { "violated" },
            campaign
                .map(|s| format!("{} system(s) ok", s.models))
                .unwrap_or_else(|e| e),
        ),
    );
}

#[test]
fn criterion_5_separation_witnesses() {
    // The fixtures explicitly, then the same seeded populations as
    // criteria 3–4: the campaigns run the pairwise suites per model.
    let fig1_sep = pn_separation_suite(&fig1(), 5);
    let sys = fig2();
    let fig2_sep: Result<Vec<_>, String> = BOTH_MODES
        .iter()
        .map(|&mode| cts_separation_suite(&sys, 5, mode))
        .collect();
    let pn = pn_random_campaign(200, 0, 5);
    let cts = cts_random_campaign(200, 0, 5);
    let fig_ok = matches!(&fig1_sep, Ok(s) if s.witnessed_pairs >= 1 && s.equal_pairs >= 1)
        && matches!(&fig2_sep, Ok(all) if all.iter().all(|s| s.witnessed_pairs >= 1 && s.equal_pairs >= 1));
    report(
        5,
        fig_ok && pn.is_ok() && cts.is_ok(),
        &format!(
            "fig1 pairs {fig1_sep:?}, fig2 pairs {fig2_sep:?}; random populations: \
             pti {}, cts {}",
            pn.map(|s| format!("{} witnessed / {} equal", s.witnessed_pairs, s.equal_pairs))
                .unwrap_or_else(|e| e),
            cts.map(|s| format!("{} witnessed / {} equal", s.witnessed_pairs, s.equal_pairs))
                .unwrap_or_else(|e| e),
        ),
    );
}

#[test]
fn criterion_6_async_baseline() {
    let handshake_ok = check_async_baseline(&handshake(), 4);
    let campaign = async_random_campaign(100, 0, 5);
    report(
        6,
        handshake_ok.is_ok() && campaign.is_ok(),
        &format!(
            "handshake baseline ({:?}), 100 random systems ({})",
            handshake_ok.map(|n| format!("{n} computation(s)")),
            campaign
                .map(|s| format!("{} system(s) ok", s.models))
                .unwrap_or_else(|e| e),
        ),
    );
}

/// Sampled computations across fixtures and seeded random models.
fn sample_lpos() -> Vec<(String, Lpo)> {
    let mut out = Vec::new();
    let net = fig1();
    let (lpos, _) = enumerate_computations_pn(&net, 4, false);
    for lpo in lpos {
        let ok = validate_lpo_pn(&net, &lpo).is_ok();
        out.push((format!("fig1 valid={ok}"), lpo));
        assert!(ok, "fig1 computation failed validation");
    }
    let sys = fig2();
    for mode in BOTH_MODES {
        let (lpos, _) = enumerate_computations_cts(&sys, 4, false, mode);
        for lpo in lpos {
            let ok = validate_lpo_cts(&sys, &lpo, mode).is_ok();
            out.push((format!("fig2 {mode} valid={ok}"), lpo));
            assert!(ok, "fig2 computation failed validation");
        }
    }
    let auto = handshake();
    for lpo in enumerate_computations_async(&auto, 3, false) {
        let ok = validate_lpo_async(&auto, &lpo).is_ok();
        out.push((format!("handshake valid={ok}"), lpo));
        assert!(ok, "handshake computation failed validation");
    }
    let mut rng = rng_for(7);
    for i in 0..10 {
        let net = random_pti_net(&mut rng);
        let (lpos, _) = enumerate_computations_pn(&net, 3, false);
        for lpo in lpos {
            let ok = validate_lpo_pn(&net, &lpo).is_ok();
            out.push((format!("random net {i} valid={ok}"), lpo));
            assert!(ok, "random net {i} computation failed validation");
        }
        let sys = random_cts_system(&mut rng);
        for mode in BOTH_MODES {
            let (lpos, _) = enumerate_computations_cts(&sys, 3, false, mode);
            for lpo in lpos {
                let ok = validate_lpo_cts(&sys, &lpo, mode).is_ok();
                out.push((format!("random system {i} {mode} valid={ok}"), lpo));
                assert!(ok, "random system {i} computation failed validation");
            }
        }
        let auto = random_async_system(&mut rng);
        for lpo in enumerate_computations_async(&auto, 3, false) {
            let ok = validate_lpo_async(&auto, &lpo).is_ok();
            out.push((format!("random async {i} valid={ok}"), lpo));
            assert!(ok, "random async {i} computation failed validation");
        }
    }
    out
}

#[test]
fn criterion_7_structural_suites() {
    // Generator/validator agreement is asserted while sampling.
    let samples = sample_lpos();

    // Canonical identity: rebuilding any computation from its parts in
    // reversed iteration order yields the identical value, and the
    // deduplicated sets agree.
    let mut stable = true;
    for (_, lpo) in &samples {
        let mut rebuilt = Lpo::default();
        rebuilt.nodes.extend(lpo.nodes.iter().rev().cloned());
        rebuilt.edges.extend(lpo.edges.iter().rev().cloned());
        rebuilt.comm.extend(lpo.comm.iter().rev().cloned());
        rebuilt
            .interleave
            .extend(lpo.interleave.iter().rev().cloned());
        rebuilt.node_label.extend(
            lpo.node_label
                .iter()
                .rev()
                .map(|(k, v)| (k.clone(), v.clone())),
        );
        rebuilt.edge_label.extend(
            lpo.edge_label
                .iter()
                .rev()
                .map(|(k, v)| (k.clone(), v.clone())),
        );
        stable &= &rebuilt == lpo;
    }
    let forward: BTreeSet<&Lpo> = samples.iter().map(|(_, l)| l).collect();
    let backward: BTreeSet<&Lpo> = samples.iter().rev().map(|(_, l)| l).collect();
    stable &= forward == backward;

    // Partial-order axioms, exhaustively on every instance ≤ 40 elements.
    let mut checked = 0usize;
    let mut axioms = true;
    for (name, lpo) in &samples {
        if lpo.element_count() > 40 {
            continue;
        }
        checked += 1;
        let order = lpo.order();
        let ids: Vec<&ElementId> = lpo.elements().collect();
        for a in &ids {
            axioms &= order.le(a, a) == Some(true);
            for b in &ids {
                if order.le(a, b) == Some(true) && order.le(b, a) == Some(true) {
                    axioms &= a == b;
                }
                for c in &ids {
                    if order.le(a, b) == Some(true) && order.le(b, c) == Some(true) {
                        axioms &= order.le(a, c) == Some(true);
                    }
                }
            }
        }
        assert!(axioms, "partial-order axioms failed on {name}");
    }

    report(
        7,
        stable && axioms && checked >= 30,
        &format!(
            "{} computations validated, canonical identity stable: {stable}, \
             axioms exhaustive on {checked} instance(s) ≤ 40 elements",
            samples.len()
        ),
    );
}
