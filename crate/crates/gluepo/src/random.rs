//! Seeded random model generators for the property campaigns.
//!
//! Sizes stay within the theorem-checker bounds: PTI-nets with at most 5
//! places, 4 transitions, and 2 inhibitor arcs; CTS systems with at most 3
//! agents, 4 states per agent, and 3 channels; asynchronous systems with at
//! most 3 processes over a shared 3-letter pool. CTS transitions are kept
//! deterministic per (state, label) so resolutions are unique.

use std::collections::{BTreeMap, BTreeSet};

use gluepo_core::async_automata::{AsyncSystem, Process};
use gluepo_core::cts::{CtsAgent, CtsSystem, TransLabel};
use gluepo_core::pti::{Marking, PtiNet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The deterministic generator shared by all campaigns; ChaCha keeps the
/// stream stable across platforms and library versions.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_pti_net(rng: &mut impl Rng) -> PtiNet {
    let n_places = rng.gen_range(2..=5);
    let n_trans = rng.gen_range(1..=4);
    let places: Vec<String> = (1..=n_places).map(|i| format!("p{i}")).collect();
    let mut net = PtiNet {
        places: places.iter().cloned().collect(),
        ..PtiNet::default()
    };
    for i in 1..=n_trans {
        let t = format!("t{i}");
        let pre_size = rng.gen_range(1..=2.min(n_places));
        for p in places.choose_multiple(rng, pre_size) {
            net.flow.insert((p.clone(), t.clone()), 1);
        }
        // Bias post-sets small: dense token regeneration makes the bounded
        // unfolding explode combinatorially without exercising anything new.
        let post_size = *[0, 0, 1, 1, 1, 2].choose(rng).expect("pool is non-empty");
        for p in places.choose_multiple(rng, post_size.min(n_places)) {
            net.flow.insert((t.clone(), p.clone()), 1);
        }
        net.transitions.insert(t);
    }
    let transitions: Vec<String> = net.transitions.iter().cloned().collect();
    for _ in 0..rng.gen_range(0..=2u32) {
        let p = places.choose(rng).expect("nets have places").clone();
        let t = transitions
            .choose(rng)
            .expect("nets have transitions")
            .clone();
        net.inhibitors.insert((p, t));
    }
    let mut init = BTreeMap::new();
    for p in &places {
        // Mostly single tokens; double tokens still appear so the
        // token-split and duplicate-history paths stay exercised.
        let n = *[0u32, 1, 1, 1, 2].choose(rng).expect("pool is non-empty");
        if n > 0 {
            init.insert(p.clone(), n);
        }
    }
    net.initial = Marking::from_counts(init);
    net.check().expect("generated nets are well-formed");
    net
}

pub fn random_cts_system(rng: &mut impl Rng) -> CtsSystem {
    let channels = ["c1", "c2", "c3"];
    let payloads = ["u", "v", "w"];
    let n_channels = rng.gen_range(1..=channels.len());
    let channels = &channels[..n_channels];
    let n_agents = rng.gen_range(1..=3);
    let mut agents = Vec::new();
    for a in 1..=n_agents {
        let n_states = rng.gen_range(1..=4);
        let states: Vec<String> = (1..=n_states).map(|i| format!("s{i}")).collect();
        let mut agent = CtsAgent {
            name: format!("A{a}"),
            states: states.iter().cloned().collect(),
            initial: "s1".into(),
            ..CtsAgent::default()
        };
        for s in &states {
            let mut listen = BTreeSet::new();
            for c in channels {
                if rng.gen_bool(0.4) {
                    listen.insert((*c).to_string());
                }
            }
            if !listen.is_empty() {
                agent.listening.insert(s.clone(), listen);
            }
        }
        // At most one transition per (state, label): resolutions stay
        // unique, so the separation shapes of the theorem suffice.
        let mut by_key: BTreeMap<(String, TransLabel), String> = BTreeMap::new();
        for _ in 0..rng.gen_range(0..=3) {
            let src = states.choose(rng).expect("agents have states").clone();
            let dst = states.choose(rng).expect("agents have states").clone();
            let payload = *payloads.choose(rng).expect("payload pool is non-empty");
            // Broadcasts stay rare: unreceived broadcasts commute freely, so
            // their order permutations multiply the bounded enumeration.
            let channel = if rng.gen_bool(0.15) {
                gluepo_core::cts::STAR
            } else {
                channels.choose(rng).expect("channel pool is non-empty")
            };
            let label = if rng.gen_bool(0.6) {
                TransLabel::send(payload, channel)
            } else {
                TransLabel::recv(payload, channel)
            };
            by_key.entry((src, label)).or_insert(dst);
        }
        agent.transitions = by_key
            .into_iter()
            .map(|((src, label), dst)| (src, label, dst))
            .collect();
        agents.push(agent);
    }
    let sys = CtsSystem { agents };
    sys.check().expect("generated systems are well-formed");
    sys
}

pub fn random_async_system(rng: &mut impl Rng) -> AsyncSystem {
    let letters = ["a", "b", "c"];
    let n_procs = rng.gen_range(1..=3);
    let mut processes = Vec::new();
    for p in 1..=n_procs {
        let n_states = rng.gen_range(1..=3);
        let states: Vec<String> = (1..=n_states).map(|i| format!("s{i}")).collect();
        let mut alphabet = BTreeSet::new();
        for l in letters {
            if rng.gen_bool(0.5) {
                alphabet.insert(l.to_string());
            }
        }
        let mut delta = BTreeSet::new();
        let owned: Vec<&String> = alphabet.iter().collect();
        if !owned.is_empty() {
            for _ in 0..rng.gen_range(0..=3) {
                let src = states.choose(rng).expect("processes have states").clone();
                let dst = states.choose(rng).expect("processes have states").clone();
                let letter = (*owned.choose(rng).expect("alphabet non-empty")).clone();
                delta.insert((src, letter, dst));
            }
        }
        processes.push(Process {
            name: format!("P{p}"),
            alphabet,
            states: states.into_iter().collect(),
            initial: "s1".into(),
            delta,
        });
    }
    let sys = AsyncSystem { processes };
    sys.check().expect("generated systems are well-formed");
    sys
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_seed_deterministic() {
        let a = random_pti_net(&mut rng_for(7));
        let b = random_pti_net(&mut rng_for(7));
        assert_eq!(a, b);
        let a = random_cts_system(&mut rng_for(7));
        let b = random_cts_system(&mut rng_for(7));
        assert_eq!(a, b);
        let a = random_async_system(&mut rng_for(7));
        let b = random_async_system(&mut rng_for(7));
        assert_eq!(a, b);
    }

    #[test]
    fn sizes_stay_within_bounds() {
        let mut rng = rng_for(1);
        for _ in 0..50 {
            let net = random_pti_net(&mut rng);
            assert!(net.places.len() <= 5);
            assert!(net.transitions.len() <= 4);
            assert!(net.inhibitors.len() <= 2);
            let sys = random_cts_system(&mut rng);
            assert!(sys.agents.len() <= 3);
            for a in &sys.agents {
                assert!(a.states.len() <= 4);
            }
            let auto = random_async_system(&mut rng);
            assert!(auto.processes.len() <= 3);
        }
    }

    #[test]
    fn cts_transitions_are_deterministic_per_state_and_label() {
        let mut rng = rng_for(2);
        for _ in 0..50 {
            let sys = random_cts_system(&mut rng);
            for a in &sys.agents {
                let mut seen = BTreeSet::new();
                for (s, l, _) in &a.transitions {
                    assert!(
                        seen.insert((s.clone(), l.clone())),
                        "nondeterministic {s} {l}"
                    );
                }
            }
        }
    }
}
