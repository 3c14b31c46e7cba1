//! Reusable property campaigns: theorem checks, pairwise separation
//! suites, and the seeded random campaigns behind `random-suite`.

use crate::random::{random_async_system, random_cts_system, random_pti_net, rng_for};
use gluepo_core::async_automata::{check_async_baseline, AsyncSystem};
use gluepo_core::cts::{
    check_refinement_theorem_cts, cts_witness_valid, enumerate_computations_cts, glpo_from_lpo_cts,
    separation_witness_cts, CtsSeparation, CtsSystem, MulticastBlockMode,
};
use gluepo_core::pti::{
    check_refinement_theorem_pn, enumerate_computations_pn, glpo_from_lpo_pn, pn_witness_valid,
    separation_witness_pn, PnSeparation, PtiNet,
};

/// Outcome counters of one separation suite.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct SeparationStats {
    /// Distinct g-LPO pairs that produced a re-validating witness.
    pub witnessed_pairs: usize,
    /// LPO pairs with equal g-images confirmed inseparable.
    pub equal_pairs: usize,
}

/// Theorem 3 plus its converse on every pair of bounded computations of a
/// net: distinct g-LPOs yield re-validating witnesses, equal g-images
/// yield none.
pub fn pn_separation_suite(net: &PtiNet, max_events: usize) -> Result<SeparationStats, String> {
    let (lpos, glpos) = enumerate_computations_pn(net, max_events, true);
    let mut stats = SeparationStats::default();
    for (i, a) in glpos.iter().enumerate() {
        for b in &glpos[i + 1..] {
            match separation_witness_pn(net, a, b) {
                Ok(PnSeparation::Witness(w)) => {
                    if !pn_witness_valid(a, b, &w) {
                        return Err(format!("witness failed re-validation: {w:?}"));
                    }
                    stats.witnessed_pairs += 1;
                }
                Ok(PnSeparation::Equal) => {
                    return Err("distinct g-LPOs reported equal".to_string());
                }
                Err(e) => return Err(format!("separation failed: {e}")),
            }
        }
    }
    for (i, a) in lpos.iter().enumerate() {
        for b in &lpos[i + 1..] {
            let (ga, gb) = (glpo_from_lpo_pn(net, a), glpo_from_lpo_pn(net, b));
            if ga != gb {
                continue;
            }
            match separation_witness_pn(net, &ga, &gb) {
                Ok(PnSeparation::Equal) => stats.equal_pairs += 1,
                other => {
                    return Err(format!("equal g-images separated: {other:?}"));
                }
            }
        }
    }
    Ok(stats)
}

/// Theorem 4 analogue of [`pn_separation_suite`] for a CTS.
pub fn cts_separation_suite(
    sys: &CtsSystem,
    max_events: usize,
    mode: MulticastBlockMode,
) -> Result<SeparationStats, String> {
    let (lpos, glpos) = enumerate_computations_cts(sys, max_events, true, mode);
    let mut stats = SeparationStats::default();
    for (i, a) in glpos.iter().enumerate() {
        for b in &glpos[i + 1..] {
            match separation_witness_cts(sys, a, b) {
                Ok(CtsSeparation::Witness(w)) => {
                    if !cts_witness_valid(sys, a, b, &w) {
                        return Err(format!("witness failed re-validation: {w:?}"));
                    }
                    stats.witnessed_pairs += 1;
                }
                Ok(CtsSeparation::Equal) => {
                    return Err("distinct g-LPOs reported equal".to_string());
                }
                Err(e) => return Err(format!("separation failed: {e}")),
            }
        }
    }
    for (i, a) in lpos.iter().enumerate() {
        for b in &lpos[i + 1..] {
            let (ga, gb) = (
                glpo_from_lpo_cts(sys, a, mode),
                glpo_from_lpo_cts(sys, b, mode),
            );
            if ga != gb {
                continue;
            }
            match separation_witness_cts(sys, &ga, &gb) {
                Ok(CtsSeparation::Equal) => stats.equal_pairs += 1,
                other => {
                    return Err(format!("equal g-images separated: {other:?}"));
                }
            }
        }
    }
    Ok(stats)
}

/// Per-model random campaign summaries.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct CampaignStats {
    pub models: usize,
    pub witnessed_pairs: usize,
    pub equal_pairs: usize,
}

/// Theorem 1 plus the separation suite over seeded random PTI-nets.
pub fn pn_random_campaign(
    count: usize,
    seed: u64,
    max_events: usize,
) -> Result<CampaignStats, String> {
    let mut rng = rng_for(seed);
    let mut stats = CampaignStats::default();
    for i in 0..count {
        let net = random_pti_net(&mut rng);
        check_refinement_theorem_pn(&net, max_events)
            .map_err(|e| format!("net {i} (seed {seed}): theorem failed: {e:?}"))?;
        let sep = pn_separation_suite(&net, max_events)
            .map_err(|e| format!("net {i} (seed {seed}): {e}"))?;
        stats.models += 1;
        stats.witnessed_pairs += sep.witnessed_pairs;
        stats.equal_pairs += sep.equal_pairs;
    }
    Ok(stats)
}

/// Theorem 2 (both multicast-block modes) plus the separation suite over
/// seeded random CTS systems.
pub fn cts_random_campaign(
    count: usize,
    seed: u64,
    max_events: usize,
) -> Result<CampaignStats, String> {
    let mut rng = rng_for(seed);
    let mut stats = CampaignStats::default();
    for i in 0..count {
        let sys = random_cts_system(&mut rng);
        for mode in [
            MulticastBlockMode::Listening,
            MulticastBlockMode::CannotReceive,
        ] {
            check_refinement_theorem_cts(&sys, max_events, mode)
                .map_err(|e| format!("system {i} (seed {seed}, {mode}): theorem failed: {e:?}"))?;
            let sep = cts_separation_suite(&sys, max_events, mode)
                .map_err(|e| format!("system {i} (seed {seed}, {mode}): {e}"))?;
            stats.witnessed_pairs += sep.witnessed_pairs;
            stats.equal_pairs += sep.equal_pairs;
        }
        stats.models += 1;
    }
    Ok(stats)
}

/// The asynchronous baseline over seeded random systems.
pub fn async_random_campaign(
    count: usize,
    seed: u64,
    max_events: usize,
) -> Result<CampaignStats, String> {
    let mut rng = rng_for(seed);
    let mut stats = CampaignStats::default();
    for i in 0..count {
        let sys: AsyncSystem = random_async_system(&mut rng);
        check_async_baseline(&sys, max_events)
            .map_err(|e| format!("system {i} (seed {seed}): baseline failed: {e:?}"))?;
        stats.models += 1;
    }
    Ok(stats)
}
