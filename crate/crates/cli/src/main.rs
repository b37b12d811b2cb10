//! Command line front end: model checking, validity search, filtration,
//! proof checking and the bundled proposition catalogue.
//!
//! Exit codes are stable: 0 confirms the checked claim (or plain success),
//! 1 refutes it (for example a counter-model was found), 2 is a usage or
//! parse error, 3 means the time budget ran out.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use secretum_core::corpus::Corpus;
use secretum_core::decision::{
    decide, filtrate, find_countermodel, verify_filtration, SearchConfig, SearchOutcome,
};
use secretum_core::formula::{AgentId, Formula};
use secretum_core::hilbert::{check_proof, proof_from_json_str, Verdict};
use secretum_core::kripke::KripkeModel;
use secretum_core::parser::{parse_formula, print_formula, print_formula_sugared};

const EXIT_CONFIRMED: u8 = 0;
const EXIT_REFUTED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "secretum",
    version,
    about = "Toolkit for a multimodal logic of secrecy intentions",
    after_help = "Formulas use the ASCII grammar: ~  &  |  ->  <->  K[a]  B[a]  I[a]  S[a,b]  T[a]  true  false."
)]
struct Cli {
    /// Emit one JSON document instead of line-oriented text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized features; the current commands are deterministic
    /// and ignore it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Wall-clock budget in seconds for search-backed commands.
    #[arg(long, global = true, default_value_t = 30.0)]
    budget: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SearchArgs {
    /// Formula to check for validity.
    formula: String,
    /// Largest world count to explore (default 4). With --exhaustive the
    /// search instead runs to the finite-model-property bound.
    #[arg(long)]
    max_worlds: Option<usize>,
    /// Comma-separated agent universe; default is the formula's agents plus
    /// one fresh agent.
    #[arg(long)]
    agents: Option<String>,
    /// Exhaust every tier up to the finite-model-property bound, turning a
    /// clean sweep into a validity certificate.
    #[arg(long)]
    exhaustive: bool,
    /// Write a found counter-model to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the frame conditions of a model file.
    CheckModel { path: PathBuf },
    /// Evaluate a formula at one world of a model.
    Eval {
        path: PathBuf,
        world: String,
        formula: String,
        /// Evaluate even if the model violates the frame conditions.
        #[arg(long)]
        unchecked: bool,
    },
    /// Check whether a formula is true at every world of a model.
    Holds {
        path: PathBuf,
        formula: String,
        /// Evaluate even if the model violates the frame conditions.
        #[arg(long)]
        unchecked: bool,
    },
    /// Search for a counter-model and report a verdict.
    Decide(SearchArgs),
    /// Search for a counter-model and print it when found.
    Countermodel(SearchArgs),
    /// Quotient a model through the closure of a translated formula.
    Filtrate {
        path: PathBuf,
        formula: String,
        /// Write the quotient model to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the class map and closure to this file instead of stdout.
        #[arg(long)]
        classes: Option<PathBuf>,
    },
    /// Print the secrecy expansion and the intention-to-knowledge
    /// translation of a formula.
    Translate { formula: String },
    /// Verify a derivation file line by line.
    ProveCheck { path: PathBuf },
    /// Run the bundled proposition catalogue.
    Corpus {
        /// Only entries whose id matches this pattern (`*` is the wildcard).
        #[arg(long)]
        filter: Option<String>,
        /// Largest world count for entries that need the search.
        #[arg(long, default_value_t = 4)]
        max_worlds: usize,
        /// Load the catalogue from a directory instead of the bundled one.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = cli.seed;
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn load_model(path: &Path) -> Result<KripkeModel, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    KripkeModel::from_json_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse(text: &str) -> Result<Formula, String> {
    parse_formula(text).map_err(|e| e.to_string())
}

fn parse_agents(spec: &str) -> Result<BTreeSet<AgentId>, String> {
    spec.split(',')
        .map(|name| AgentId::new(name.trim()).map_err(|e| e.to_string()))
        .collect()
}

fn write_or_print(doc: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => {
            std::fs::write(path, format!("{doc}\n")).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => {
            println!("{doc}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    let budget = Duration::from_secs_f64(cli.budget.max(0.0));
    match cli.command {
        Command::CheckModel { path } => {
            let model = load_model(&path)?;
            let report = model.check_frame();
            if cli.json {
                let conditions: Vec<_> = report
                    .conditions
                    .iter()
                    .map(|c| {
                        json!({
                            "number": c.condition.number(),
                            "description": c.condition.describe(),
                            "passed": c.passed(),
                            "violations": c.violations.iter().map(|v| json!({
                                "agent": v.agent.as_str(),
                                "worlds": v.worlds.iter().map(|w| w.as_str()).collect::<Vec<_>>(),
                            })).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    json!({"admissible": report.all_passed(), "conditions": conditions})
                );
            } else {
                for c in &report.conditions {
                    if c.passed() {
                        println!("PASS {}", c.condition);
                    } else {
                        let witnesses: Vec<String> =
                            c.violations.iter().map(|v| v.to_string()).collect();
                        println!("FAIL {} — {}", c.condition, witnesses.join("; "));
                    }
                }
            }
            Ok(if report.all_passed() {
                EXIT_CONFIRMED
            } else {
                EXIT_REFUTED
            })
        }

        Command::Eval {
            path,
            world,
            formula,
            unchecked,
        } => {
            let model = load_model(&path)?;
            let phi = parse(&formula)?;
            let world = model
                .world(&world)
                .ok_or_else(|| format!("unknown world {world}"))?
                .clone();
            let value = if unchecked {
                model.eval_unchecked(&world, &phi)
            } else {
                model.eval(&world, &phi)
            }
            .map_err(|e| e.to_string())?;
            if cli.json {
                println!("{}", json!({"value": value}));
            } else {
                println!("{value}");
            }
            Ok(if value { EXIT_CONFIRMED } else { EXIT_REFUTED })
        }

        Command::Holds {
            path,
            formula,
            unchecked,
        } => {
            let model = load_model(&path)?;
            let phi = parse(&formula)?;
            let value = if unchecked {
                model.validates_unchecked(&phi)
            } else {
                model.validates(&phi)
            }
            .map_err(|e| e.to_string())?;
            if cli.json {
                println!("{}", json!({"value": value}));
            } else {
                println!("{value}");
            }
            Ok(if value { EXIT_CONFIRMED } else { EXIT_REFUTED })
        }

        Command::Decide(args) => run_search(&args, budget, cli.json),
        Command::Countermodel(args) => run_search(&args, budget, cli.json),

        Command::Filtrate {
            path,
            formula,
            out,
            classes,
        } => {
            let model = load_model(&path)?;
            let phi = parse(&formula)?.desugar();
            let result = filtrate(&model, &phi).map_err(|e| e.to_string())?;
            let report = verify_filtration(&model, &result, &phi).map_err(|e| e.to_string())?;
            if !report.is_ok() {
                return Err("filtration failed its own verification".to_owned());
            }
            let class_map: serde_json::Map<String, serde_json::Value> = result
                .class_map
                .iter()
                .map(|(w, r)| (w.as_str().to_owned(), json!(r.as_str())))
                .collect();
            let theta: Vec<String> = result.theta.iter().map(print_formula).collect();
            if cli.json {
                let model_doc: serde_json::Value =
                    serde_json::from_str(&result.model.to_json_string()).unwrap();
                println!(
                    "{}",
                    json!({"model": model_doc, "class_map": class_map, "theta": theta})
                );
            } else {
                write_or_print(&result.model.to_json_string(), out.as_deref())?;
                let sibling =
                    serde_json::to_string_pretty(&json!({"class_map": class_map, "theta": theta}))
                        .unwrap();
                write_or_print(&sibling, classes.as_deref())?;
            }
            Ok(EXIT_CONFIRMED)
        }

        Command::Translate { formula } => {
            let phi = parse(&formula)?;
            let translated = secretum_core::formula::translate_t(&phi.desugar());
            let expanded = print_formula(&phi);
            let translated = print_formula_sugared(&translated);
            if cli.json {
                println!(
                    "{}",
                    json!({"input": formula, "expanded": expanded, "translated": translated})
                );
            } else {
                println!("expanded: {expanded}");
                println!("translated: {translated}");
            }
            Ok(EXIT_CONFIRMED)
        }

        Command::ProveCheck { path } => {
            let text =
                std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            let proof = proof_from_json_str(&text).map_err(|e| e.to_string())?;
            let verdict = check_proof(&proof).map_err(|e| e.to_string())?;
            match verdict {
                Verdict::Accepted => {
                    if cli.json {
                        println!("{}", json!({"accepted": true, "lines": proof.lines.len()}));
                    } else {
                        println!("accepted ({} lines)", proof.lines.len());
                    }
                    Ok(EXIT_CONFIRMED)
                }
                Verdict::Rejected { line, reason } => {
                    if cli.json {
                        println!(
                            "{}",
                            json!({"accepted": false, "line": line, "reason": reason})
                        );
                    } else {
                        println!("rejected at line {line}: {reason}");
                    }
                    Ok(EXIT_REFUTED)
                }
            }
        }

        Command::Corpus {
            filter,
            max_worlds,
            dir,
        } => {
            let corpus = match dir {
                Some(path) => Corpus::from_dir(&path).map_err(|e| e.to_string())?,
                None => Corpus::builtin(),
            };
            let selected = corpus.list(filter.as_deref());
            if selected.is_empty() {
                return Err(format!(
                    "no entries match {:?}",
                    filter.as_deref().unwrap_or("*")
                ));
            }
            let cfg = SearchConfig::new(max_worlds).with_budget(budget);
            let report = corpus.run(filter.as_deref(), &cfg);
            if cli.json {
                let entries: Vec<_> = report
                    .entries
                    .iter()
                    .map(|e| json!({"id": e.id, "passed": e.passed, "detail": e.detail}))
                    .collect();
                println!(
                    "{}",
                    json!({"all_passed": report.all_passed(), "entries": entries})
                );
            } else {
                for entry in &report.entries {
                    println!("{entry}");
                }
                let failures = report.failures().count();
                println!("{} entries, {} failed", report.entries.len(), failures);
            }
            Ok(if report.all_passed() {
                EXIT_CONFIRMED
            } else {
                EXIT_REFUTED
            })
        }
    }
}

fn run_search(args: &SearchArgs, budget: Duration, json: bool) -> Result<u8, String> {
    let phi = parse(&args.formula)?.desugar();
    let outcome = if args.exhaustive && args.max_worlds.is_none() {
        decide(&phi, budget).map_err(|e| e.to_string())?
    } else {
        let mut cfg = SearchConfig::new(args.max_worlds.unwrap_or(4)).with_budget(budget);
        if let Some(agents) = &args.agents {
            cfg = cfg.with_agents(parse_agents(agents)?);
        }
        if args.exhaustive {
            cfg = cfg.exhaustive();
        }
        find_countermodel(&phi, &cfg).map_err(|e| e.to_string())?
    };
    match outcome {
        SearchOutcome::Invalid { model, world } => {
            let rendered = model.to_json_string();
            if json {
                let model_doc: serde_json::Value = serde_json::from_str(&rendered).unwrap();
                println!(
                    "{}",
                    json!({"outcome": "invalid", "world": world.as_str(), "model": model_doc})
                );
            } else {
                println!("invalid: counter-model falsifies at world {world}");
                write_or_print(&rendered, args.out.as_deref())?;
            }
            Ok(EXIT_REFUTED)
        }
        SearchOutcome::ValidUpTo(n) => {
            if json {
                println!("{}", json!({"outcome": "valid-up-to", "worlds": n}));
            } else {
                println!("no counter-model up to {n} worlds");
            }
            Ok(EXIT_CONFIRMED)
        }
        SearchOutcome::Valid { certified_bound } => {
            if json {
                println!("{}", json!({"outcome": "valid", "bound": certified_bound}));
            } else {
                println!("valid: exhausted every tier up to the bound {certified_bound}");
            }
            Ok(EXIT_CONFIRMED)
        }
        SearchOutcome::Timeout { explored_worlds } => {
            if json {
                println!(
                    "{}",
                    json!({"outcome": "timeout", "explored_worlds": explored_worlds})
                );
            } else {
                println!("budget exhausted after {explored_worlds} world tiers; no verdict");
            }
            Ok(EXIT_BUDGET)
        }
    }
}
