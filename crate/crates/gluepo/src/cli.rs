//! Command-line interface: model loading, enumeration commands, theorem
//! and separation checks, composition, rendering, and the seeded random
//! campaigns.
//!
//! Exit status: 0 on success or theorem-holds, 1 on a property violation
//! (with a counterexample dump), 2 on usage or parse errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use gluepo_core::async_automata::{
    check_async_baseline, enumerate_computations_async, glpo_from_lpo_async,
};
use gluepo_core::cts::{
    check_refinement_theorem_cts, compose, enumerate_computations_cts, CtsSystem,
    MulticastBlockMode,
};
use gluepo_core::po::{GluedLpo, Lpo};
use gluepo_core::pti::{check_refinement_theorem_pn, enumerate_computations_pn};

use crate::dot::{export_dot_glpo, export_dot_lpo};
use crate::json::{to_canonical_json, GluedLpoDoc, LpoDoc};
use crate::parse::{emit_cts, parse_model, Model};
use crate::suite;

/// Hard cap on `--max-events` unless overridden by GLUEPO_MAX_EVENTS_CAP.
pub const DEFAULT_MAX_EVENTS_CAP: usize = 12;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "gluepo",
    version,
    about = "Labelled-partial-order and glued-LPO analysis for PTI-nets, \
             channeled transition systems, and asynchronous automata"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum ModeArg {
    #[default]
    Listening,
    CannotReceive,
}

impl From<ModeArg> for MulticastBlockMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Listening => MulticastBlockMode::Listening,
            ModeArg::CannotReceive => MulticastBlockMode::CannotReceive,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Summary,
    Json,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteModel {
    Pti,
    Cts,
    Async,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the bounded LPO computations of a model.
    Unfold {
        model: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_events: usize,
        #[arg(long)]
        maximal_only: bool,
        #[arg(long, value_enum, default_value_t)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Enumerate the bounded g-LPO computations of a model.
    Glue {
        model: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_events: usize,
        #[arg(long)]
        maximal_only: bool,
        #[arg(long, value_enum, default_value_t)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Check both refinement-theorem directions at the bound.
    CheckEquivalence {
        model: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_events: usize,
        #[arg(long, value_enum, default_value_t)]
        mode: ModeArg,
    },
    /// Extract and re-validate pairwise separation witnesses.
    Separate {
        model: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_events: usize,
        #[arg(long, value_enum, default_value_t)]
        mode: ModeArg,
    },
    /// Fold a CTS into one product agent and emit it.
    Compose { model: PathBuf },
    /// Check the asynchronous-automata baseline at the bound.
    Baseline {
        model: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_events: usize,
    },
    /// Render one enumerated computation as DOT.
    Render {
        model: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_events: usize,
        #[arg(long)]
        maximal_only: bool,
        #[arg(long, value_enum, default_value_t)]
        mode: ModeArg,
        /// Index into the sorted enumeration.
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Render the glued form instead of the plain LPO.
        #[arg(long)]
        glued: bool,
    },
    /// Run a seeded random property campaign.
    RandomSuite {
        #[arg(long, value_enum)]
        model: SuiteModel,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        max_events: usize,
    },
}

fn max_events_cap() -> usize {
    std::env::var("GLUEPO_MAX_EVENTS_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_EVENTS_CAP)
}

enum CmdError {
    Usage(String),
    Violation(String),
}

type CmdResult = Result<String, CmdError>;

fn usage(msg: impl Into<String>) -> CmdError {
    CmdError::Usage(msg.into())
}

fn check_cap(max_events: usize) -> Result<(), CmdError> {
    let cap = max_events_cap();
    if max_events > cap {
        return Err(usage(format!(
            "--max-events {max_events} exceeds the cap {cap} \
             (override with GLUEPO_MAX_EVENTS_CAP)"
        )));
    }
    Ok(())
}

fn load_model(path: &Path) -> Result<Model, CmdError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Enumerates both flavors for any model kind.
fn enumerate(
    model: &Model,
    max_events: usize,
    maximal_only: bool,
    mode: MulticastBlockMode,
) -> (Vec<Lpo>, Vec<GluedLpo>) {
    match model {
        Model::Pti(net) => enumerate_computations_pn(net, max_events, maximal_only),
        Model::Cts(sys) => enumerate_computations_cts(sys, max_events, maximal_only, mode),
        Model::Async(sys) => {
            let lpos = enumerate_computations_async(sys, max_events, maximal_only);
            let glpos = lpos.iter().map(glpo_from_lpo_async).collect();
            (lpos, glpos)
        }
    }
}

fn unfold_cmd(
    path: &Path,
    max_events: usize,
    maximal_only: bool,
    mode: MulticastBlockMode,
    format: Format,
) -> CmdResult {
    check_cap(max_events)?;
    let model = load_model(path)?;
    let (lpos, _) = enumerate(&model, max_events, maximal_only, mode);
    Ok(match format {
        Format::Summary => format!("{} LPOs\n", lpos.len()),
        Format::Json => {
            let docs: Vec<LpoDoc> = lpos.iter().map(LpoDoc::from).collect();
            to_canonical_json(&serde_json::json!({
                "version": crate::json::SCHEMA_VERSION,
                "count": docs.len(),
                "lpos": docs,
            }))
        }
        Format::Dot => {
            let mut out = String::new();
            for lpo in &lpos {
                out.push_str(&export_dot_lpo(lpo));
            }
            out
        }
    })
}

fn glue_cmd(
    path: &Path,
    max_events: usize,
    maximal_only: bool,
    mode: MulticastBlockMode,
    format: Format,
) -> CmdResult {
    check_cap(max_events)?;
    let model = load_model(path)?;
    let (_, glpos) = enumerate(&model, max_events, maximal_only, mode);
    Ok(match format {
        Format::Summary => format!("{} g-LPOs\n", glpos.len()),
        Format::Json => {
            let docs: Vec<GluedLpoDoc> = glpos.iter().map(GluedLpoDoc::from).collect();
            to_canonical_json(&serde_json::json!({
                "version": crate::json::SCHEMA_VERSION,
                "count": docs.len(),
                "glpos": docs,
            }))
        }
        Format::Dot => {
            let mut out = String::new();
            for glpo in &glpos {
                out.push_str(&export_dot_glpo(glpo));
            }
            out
        }
    })
}

fn check_equivalence_cmd(path: &Path, max_events: usize, mode: MulticastBlockMode) -> CmdResult {
    check_cap(max_events)?;
    match load_model(path)? {
        Model::Pti(net) => check_refinement_theorem_pn(&net, max_events)
            .map(|()| "equivalence holds (both directions)\n".to_string())
            .map_err(|e| CmdError::Violation(format!("equivalence violated: {e:#?}"))),
        Model::Cts(sys) => check_refinement_theorem_cts(&sys, max_events, mode)
            .map(|()| "equivalence holds (both directions)\n".to_string())
            .map_err(|e| CmdError::Violation(format!("equivalence violated: {e:#?}"))),
        Model::Async(_) => Err(usage(
            "check-equivalence applies to pti and cts models; use `baseline` for async",
        )),
    }
}

fn separate_cmd(path: &Path, max_events: usize, mode: MulticastBlockMode) -> CmdResult {
    check_cap(max_events)?;
    let (stats, kind) = match load_model(path)? {
        Model::Pti(net) => (
            suite::pn_separation_suite(&net, max_events).map_err(CmdError::Violation)?,
            "pti",
        ),
        Model::Cts(sys) => (
            suite::cts_separation_suite(&sys, max_events, mode).map_err(CmdError::Violation)?,
            "cts",
        ),
        Model::Async(_) => {
            return Err(usage(
                "separate applies to pti and cts models; async computations have no glue",
            ))
        }
    };
    Ok(format!(
        "{kind}: {} distinct pair(s) witnessed, {} equal-image pair(s) confirmed inseparable\n",
        stats.witnessed_pairs, stats.equal_pairs
    ))
}

fn compose_cmd(path: &Path) -> CmdResult {
    let Model::Cts(sys) = load_model(path)? else {
        return Err(usage("compose applies to cts models"));
    };
    let mut agents = sys.agents.into_iter();
    let Some(first) = agents.next() else {
        return Err(usage("the system has no agents"));
    };
    let product = agents.fold(first, |acc, next| compose(&acc, &next));
    Ok(emit_cts(&CtsSystem {
        agents: vec![product],
    }))
}

fn baseline_cmd(path: &Path, max_events: usize) -> CmdResult {
    check_cap(max_events)?;
    let Model::Async(sys) = load_model(path)? else {
        return Err(usage("baseline applies to async models"));
    };
    match check_async_baseline(&sys, max_events) {
        Ok(count) => Ok(format!(
            "baseline holds: {count} computation(s), no interleaving, unique self-refinement\n"
        )),
        Err(e) => Err(CmdError::Violation(format!("baseline violated: {e:#?}"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn render_cmd(
    path: &Path,
    max_events: usize,
    maximal_only: bool,
    mode: MulticastBlockMode,
    index: usize,
    glued: bool,
) -> CmdResult {
    check_cap(max_events)?;
    let model = load_model(path)?;
    let (lpos, glpos) = enumerate(&model, max_events, maximal_only, mode);
    if glued {
        let glpo = glpos.get(index).ok_or_else(|| {
            usage(format!(
                "index {index} out of range ({} g-LPOs)",
                glpos.len()
            ))
        })?;
        Ok(export_dot_glpo(glpo))
    } else {
        let lpo = lpos
            .get(index)
            .ok_or_else(|| usage(format!("index {index} out of range ({} LPOs)", lpos.len())))?;
        Ok(export_dot_lpo(lpo))
    }
}

fn random_suite_cmd(model: SuiteModel, count: usize, seed: u64, max_events: usize) -> CmdResult {
    check_cap(max_events)?;
    let mut out = String::new();
    match model {
        SuiteModel::Pti => {
            let stats =
                suite::pn_random_campaign(count, seed, max_events).map_err(CmdError::Violation)?;
            let _ = writeln!(
                out,
                "pti campaign: {} net(s) ok, {} pair(s) witnessed, {} equal pair(s)",
                stats.models, stats.witnessed_pairs, stats.equal_pairs
            );
        }
        SuiteModel::Cts => {
            let stats =
                suite::cts_random_campaign(count, seed, max_events).map_err(CmdError::Violation)?;
            let _ = writeln!(
                out,
                "cts campaign: {} system(s) ok in both modes, {} pair(s) witnessed, {} equal pair(s)",
                stats.models, stats.witnessed_pairs, stats.equal_pairs
            );
        }
        SuiteModel::Async => {
            let stats = suite::async_random_campaign(count, seed, max_events)
                .map_err(CmdError::Violation)?;
            let _ = writeln!(out, "async campaign: {} system(s) ok", stats.models);
        }
    }
    Ok(out)
}

/// Executes the parsed command; returns the process exit status.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Unfold {
            model,
            max_events,
            maximal_only,
            mode,
            format,
        } => unfold_cmd(&model, max_events, maximal_only, mode.into(), format),
        Command::Glue {
            model,
            max_events,
            maximal_only,
            mode,
            format,
        } => glue_cmd(&model, max_events, maximal_only, mode.into(), format),
        Command::CheckEquivalence {
            model,
            max_events,
            mode,
        } => check_equivalence_cmd(&model, max_events, mode.into()),
        Command::Separate {
            model,
            max_events,
            mode,
        } => separate_cmd(&model, max_events, mode.into()),
        Command::Compose { model } => compose_cmd(&model),
        Command::Baseline { model, max_events } => baseline_cmd(&model, max_events),
        Command::Render {
            model,
            max_events,
            maximal_only,
            mode,
            index,
            glued,
        } => render_cmd(&model, max_events, maximal_only, mode.into(), index, glued),
        Command::RandomSuite {
            model,
            count,
            seed,
            max_events,
        } => random_suite_cmd(model, count, seed, max_events),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            EXIT_OK
        }
        Err(CmdError::Violation(msg)) => {
            eprintln!("violation: {msg}");
            EXIT_VIOLATION
        }
        Err(CmdError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}
