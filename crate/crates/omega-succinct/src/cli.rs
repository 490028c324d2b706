//! Command-line surface. The binary is a thin wrapper around [`run`];
//! everything here dispatches straight into the library.
//!
//! Exit codes: 0 on success, 1 on failed assertions or contract violations,
//! 2 on malformed inputs.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::automaton::Automaton;
use crate::dot;
use crate::error::{Error, Result};
use crate::families;
use crate::hoa;
use crate::marking;
use crate::mdp::{self, rational_string, LabelledMdp};
use crate::product;
use crate::props;
use crate::report;

/// Environment variable overriding the default base seed of the random-chain
/// spot check.
pub const SEED_ENV: &str = "OMEGA_SUCCINCT_SEED";

#[derive(Parser)]
#[command(
    name = "omega-succinct",
    version,
    about = "Automaton families, exact MDP products, and succinctness experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a family member and print it as HOA (default) or DOT.
    Gen(GenArgs),
    /// Compute a satisfaction probability for an MDP and an automaton.
    Analyze(AnalyzeArgs),
    /// Run the marking algorithm and the collapse-based size bound.
    Mark(MarkArgs),
    /// Decide an automaton property.
    Props(PropsArgs),
    /// Run an experiment.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Run the whole reproduction suite.
    ReproduceAll(ReproduceArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Family name: an, an-prime, gn, bn, dn, rn, sn, rn-prime, cn, gamma,
    /// sn-dba, rn-dba.
    family: String,
    #[arg(long)]
    n: usize,
    /// Emit HOA (the default).
    #[arg(long)]
    hoa: bool,
    /// Emit DOT instead of HOA.
    #[arg(long)]
    dot: bool,
    /// Write to a file instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AnalyzeMode {
    Psyn,
    Psem,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// MDP or chain in the JSON schema.
    #[arg(long)]
    mdp: PathBuf,
    /// Automaton in HOA (the NBA for psyn).
    #[arg(long)]
    automaton: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: AnalyzeMode,
    /// Deterministic complete Büchi automaton for psem.
    #[arg(long)]
    dba: Option<PathBuf>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MarkArgs {
    #[arg(long)]
    n: usize,
    /// Optional DBA to mark instead of the canonical determinization.
    #[arg(long)]
    dba: Option<PathBuf>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PropCheck {
    Unambiguous,
    StronglyUnambiguous,
    Separating,
}

#[derive(Args)]
struct PropsArgs {
    #[arg(long)]
    automaton: PathBuf,
    #[arg(long, value_enum)]
    check: PropCheck,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// The 2^n-chain lower-bound sweep for one candidate automaton.
    #[command(name = "lower-bound", alias = "thm10")]
    LowerBound(LowerBoundArgs),
    /// Exact equality of syntactic and semantic values on random chains.
    #[command(name = "gfm-spotcheck")]
    GfmSpotCheck(SpotCheckArgs),
}

#[derive(Args)]
struct LowerBoundArgs {
    #[arg(long)]
    n: usize,
    /// Candidate automaton in HOA; defaults to the deterministic automaton
    /// for the flavor's language.
    #[arg(long)]
    candidate: Option<PathBuf>,
    /// Either "reach" or "safety".
    #[arg(long)]
    flavor: String,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpotCheckArgs {
    #[arg(long)]
    n: usize,
    /// Seeds: comma-separated list and/or `a..b` ranges (e.g. "0..50,99").
    #[arg(long)]
    seeds: Option<String>,
    /// Number of seeds when --seeds is absent (seeded from the base).
    #[arg(long, default_value_t = 50)]
    count: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(long, default_value_t = 5)]
    max_n: usize,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn load_automaton(path: &PathBuf) -> Result<Automaton> {
    hoa::parse_hoa(&std::fs::read_to_string(path)?)
}

fn load_mdp(path: &PathBuf) -> Result<LabelledMdp> {
    mdp::from_json(&std::fs::read_to_string(path)?)
}

fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some((a, b)) = part.split_once("..") {
            let lo: u64 = a
                .trim()
                .parse()
                .map_err(|_| Error::input(format!("bad seed range '{part}'")))?;
            let hi: u64 = b
                .trim()
                .parse()
                .map_err(|_| Error::input(format!("bad seed range '{part}'")))?;
            if hi < lo {
                return Err(Error::input(format!("empty seed range '{part}'")));
            }
            seeds.extend(lo..hi);
        } else {
            seeds.push(
                part.parse()
                    .map_err(|_| Error::input(format!("bad seed '{part}'")))?,
            );
        }
    }
    if seeds.is_empty() {
        return Err(Error::input("no seeds given"));
    }
    Ok(seeds)
}

fn base_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

#[derive(Serialize)]
struct AnalyzeReport {
    mode: &'static str,
    value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    strategy: Option<Vec<StrategyRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    accepting_mecs: Option<Vec<Vec<(usize, usize)>>>,
}

#[derive(Serialize)]
struct StrategyRow {
    state: (usize, usize),
    base_action: usize,
    choices: BTreeMap<char, usize>,
}

#[derive(Serialize)]
struct PropsReport {
    check: String,
    automaton_states: usize,
    holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

fn run_command(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen(args) => {
            let a = families::by_name(&args.family, args.n)?;
            let text = if args.dot {
                dot::to_dot(&a, &format!("{}-{}", args.family, args.n))
            } else {
                hoa::to_hoa(&a, Some(&format!("{} n={}", args.family, args.n)))
            };
            emit(&text, args.out.as_ref())?;
            Ok(true)
        }
        Command::Analyze(args) => {
            let m = load_mdp(&args.mdp)?;
            let report = match args.mode {
                AnalyzeMode::Psyn => {
                    let aut_path = args.automaton.as_ref().ok_or_else(|| {
                        Error::input("--automaton is required for psyn")
                    })?;
                    let aut = load_automaton(aut_path)?;
                    let outcome = product::psyn_full(&m, &aut)?;
                    let strategy = outcome
                        .strategy
                        .0
                        .iter()
                        .enumerate()
                        .filter_map(|(state, act)| {
                            act.map(|a| {
                                let action = &outcome.product.actions[state][a];
                                StrategyRow {
                                    state: outcome.product.provenance[state],
                                    base_action: action.base_action,
                                    choices: action.choices.clone(),
                                }
                            })
                        })
                        .collect();
                    let mecs = outcome
                        .accepting_mecs
                        .iter()
                        .map(|mec| {
                            mec.states
                                .iter()
                                .map(|&s| outcome.product.provenance[s])
                                .collect()
                        })
                        .collect();
                    AnalyzeReport {
                        mode: "psyn",
                        value: rational_string(&outcome.value),
                        strategy: Some(strategy),
                        accepting_mecs: Some(mecs),
                    }
                }
                AnalyzeMode::Psem => {
                    let dba_path = args
                        .dba
                        .as_ref()
                        .or(args.automaton.as_ref())
                        .ok_or_else(|| Error::input("--dba is required for psem"))?;
                    let dba = load_automaton(dba_path)?;
                    let value = product::psem(&m, &dba)?;
                    AnalyzeReport {
                        mode: "psem",
                        value: rational_string(&value),
                        strategy: None,
                        accepting_mecs: None,
                    }
                }
            };
            println!("{}", report.value);
            emit(&serde_json::to_string_pretty(&report)?, args.out.as_ref())?;
            Ok(true)
        }
        Command::Mark(args) => {
            let report = match args.dba {
                Some(path) => {
                    let d = load_automaton(&path)?;
                    marking::marking_bound_report_for(&d, args.n)?
                }
                None => marking::marking_bound_report(args.n)?,
            };
            let ok = report.all_checks_pass();
            emit(&serde_json::to_string_pretty(&report)?, args.out.as_ref())?;
            Ok(ok)
        }
        Command::Props(args) => {
            let a = load_automaton(&args.automaton)?;
            let (name, holds, witness) = match args.check {
                PropCheck::Unambiguous => {
                    let (ok, w) = props::is_unambiguous(&a)?;
                    ("unambiguous", ok, w.map(|w| props::witness_summary(&w)))
                }
                PropCheck::StronglyUnambiguous => {
                    let (ok, w) = props::is_strongly_unambiguous(&a)?;
                    (
                        "strongly-unambiguous",
                        ok,
                        w.map(|w| props::witness_summary(&w)),
                    )
                }
                PropCheck::Separating => {
                    let (ok, w) = props::is_separating(&a)?;
                    (
                        "separating",
                        ok,
                        w.map(|w| {
                            format!(
                                "states {} and {} share {}",
                                w.state_a, w.state_b, w.lasso
                            )
                        }),
                    )
                }
            };
            let report = PropsReport {
                check: name.to_string(),
                automaton_states: a.num_states(),
                holds,
                witness,
            };
            emit(&serde_json::to_string_pretty(&report)?, args.out.as_ref())?;
            Ok(true)
        }
        Command::Experiment(ExperimentCommand::LowerBound(args)) => {
            let flavor = props::LanguageFlavor::parse(&args.flavor)?;
            let candidate = match args.candidate {
                Some(path) => load_automaton(&path)?,
                None => match flavor {
                    props::LanguageFlavor::Safety => families::build_sn_dba(args.n)?,
                    props::LanguageFlavor::Reach => families::build_rn_dba(args.n)?,
                },
            };
            let report = props::gfm_lower_bound_experiment(args.n, &candidate, flavor)?;
            emit(&serde_json::to_string_pretty(&report)?, args.out.as_ref())?;
            Ok(true)
        }
        Command::Experiment(ExperimentCommand::GfmSpotCheck(args)) => {
            let seeds = match args.seeds {
                Some(spec) => parse_seeds(&spec)?,
                None => {
                    let base = base_seed();
                    (base..base + args.count).collect()
                }
            };
            let report = props::gfm_spot_check(args.n, &seeds)?;
            let ok = report.all_equal;
            emit(&serde_json::to_string_pretty(&report)?, args.out.as_ref())?;
            Ok(ok)
        }
        Command::ReproduceAll(args) => {
            let start = std::time::Instant::now();
            let report = report::reproduce_all(args.max_n, base_seed())?;
            for criterion in &report.criteria {
                eprintln!("{}", criterion.summary_line());
                for assertion in &criterion.assertions {
                    if !assertion.passed {
                        eprintln!("    FAILED: {} ({})", assertion.name, assertion.detail);
                    }
                }
            }
            eprintln!(
                "reproduce-all: {} in {} ms",
                if report.all_passed { "all criteria passed" } else { "FAILURES present" },
                start.elapsed().as_millis()
            );
            let ok = report.all_passed;
            emit(&serde_json::to_string_pretty(&report)?, args.out.as_ref())?;
            Ok(ok)
        }
    }
}

/// Entry point shared by the binary and tests. Returns the process exit
/// code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own help/version output.
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_command(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Error::Input(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
