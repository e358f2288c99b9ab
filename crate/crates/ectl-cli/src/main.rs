//! Command-line frontend: evaluate formulas at states of a system,
//! transform automata, and emit the generated example families.
//!
//! Exit codes: 0 — the formula holds at every queried state; 1 — it fails
//! at some queried state (or a word is rejected); 2 — undecidable or
//! unsupported combination, or a determinization cap was exceeded;
//! 3 — parse or validation error.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ectl::automata::{self, Automaton, AutomatonError};
use ectl::checker::{self, CheckError, CheckOptions, CheckResult};
use ectl::env::{Env, EnvError};
use ectl::logic::{Formula, LogicError};
use ectl::lts::Lts;
use ectl::text::{parse_aut, parse_formula, parse_lts, write_aut, write_lts};
use ectl_oracle::bounded::{bounded_path_check, V3};
use ectl_oracle::corpus::write_corpus;
use ectl_oracle::families::{gen_fairness_family, gen_micro_tiling, TilingInstance};

use report::{ConjunctRow, OracleSummary, StateVerdict};

#[derive(Parser)]
#[command(name = "ectl", version, about = "Model checker for CTL with automaton-annotated operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula at states of a system
    Check(CheckArgs),
    /// Inspect and transform automata
    #[command(subcommand)]
    Aut(AutCommand),
    /// Emit generated example families
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Args)]
struct CheckArgs {
    /// System file (.lts)
    #[arg(long, value_name = "FILE")]
    system: PathBuf,
    /// Formula file (.ectl)
    #[arg(long, value_name = "FILE", required_unless_present = "expr", conflicts_with = "expr")]
    formula: Option<PathBuf>,
    /// Formula given inline
    #[arg(long, value_name = "STRING")]
    expr: Option<String>,
    /// Automaton file to load into the environment (repeatable)
    #[arg(long = "aut", value_name = "FILE")]
    auts: Vec<PathBuf>,
    /// State to query (repeatable; default: the system's designated states, else all)
    #[arg(long = "at", value_name = "STATE")]
    at: Vec<String>,
    /// Print a witness path where an until-shaped formula holds
    #[arg(long)]
    witness: bool,
    /// Emit the machine-readable JSON report
    #[arg(long)]
    json: bool,
    /// Append the per-subformula engine table
    #[arg(long)]
    table: bool,
    /// Cross-check against the bounded reference search at this depth
    #[arg(long, value_name = "DEPTH")]
    oracle: Option<usize>,
    /// Determinization state cap
    #[arg(long, value_name = "N", default_value_t = 65536)]
    cap: usize,
    /// Dump each temporal node's saturated configuration automaton
    #[arg(long)]
    dump_ca: bool,
}

#[derive(Subcommand)]
enum AutCommand {
    /// Rewrite as an equivalent deterministic automaton
    Determinize {
        file: PathBuf,
        /// State cap for the construction
        #[arg(long, value_name = "N", default_value_t = 65536)]
        cap: usize,
        /// Write here instead of stdout
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Add a rejecting sink so every letter is enabled everywhere
    Complete {
        file: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Complement the language (determinizes and completes first)
    Complement {
        file: PathBuf,
        #[arg(long, value_name = "N", default_value_t = 65536)]
        cap: usize,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run the automaton on a word and report membership
    Accepts {
        file: PathBuf,
        /// The word, one letter per argument
        letters: Vec<String>,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// The ladder pair T/S that only a deep-enough formula can tell apart
    Fairness {
        /// Number of descending levels
        #[arg(long)]
        n: usize,
        /// Rungs per level between the marked heads
        #[arg(long)]
        k: usize,
        /// Output directory
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
    },
    /// A corridor tiling instance: system, violation automaton, formula
    Tiling {
        /// Columns per row (1..=3)
        #[arg(long, value_name = "N")]
        width: usize,
        /// Number of tiles (1..=3)
        #[arg(long)]
        tiles: usize,
        /// Allowed horizontal pairs, e.g. "0:0,0:1"
        #[arg(long, value_name = "PAIRS", default_value = "")]
        horizontal: String,
        /// Allowed vertical pairs, e.g. "0:0,1:1"
        #[arg(long, value_name = "PAIRS", default_value = "")]
        vertical: String,
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
    },
    /// The full example corpus
    Corpus {
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Failure {
        Failure { code: 3, message: message.into() }
    }

    fn unsupported(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check(args) => run_check(&args),
        Command::Aut(cmd) => run_aut(&cmd),
        Command::Gen(cmd) => run_gen(&cmd),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))
}

fn load_lts(path: &Path) -> Result<Lts, Failure> {
    let src = read_file(path)?;
    parse_lts(&src).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))
}

fn load_aut(path: &Path) -> Result<Automaton, Failure> {
    let src = read_file(path)?;
    parse_aut(&src).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))
}

/// Exit-code mapping for engine errors: undecidable combinations and cap
/// overruns are "unsupported" (2); everything else is validation (3).
fn check_failure(e: CheckError) -> Failure {
    let code = match &e {
        CheckError::Logic(LogicError::UndecidableRelease { .. }) => 2,
        CheckError::Logic(LogicError::Env(EnvError::Automaton(
            AutomatonError::CapExceeded { .. },
        ))) => 2,
        CheckError::Automaton(AutomatonError::CapExceeded { .. }) => 2,
        _ => 3,
    };
    Failure { code, message: e.to_string() }
}

fn run_check(args: &CheckArgs) -> Result<u8, Failure> {
    let lts = load_lts(&args.system)?;
    let mut env = Env::with_cap(lts.actions(), args.cap);
    for path in &args.auts {
        let aut = load_aut(path)?;
        env.insert(aut)
            .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    }

    let (formula_src, origin) = match (&args.formula, &args.expr) {
        (Some(path), None) => (read_file(path)?, path.display().to_string()),
        (None, Some(expr)) => (expr.clone(), "--expr".to_string()),
        _ => unreachable!("clap enforces exactly one formula source"),
    };
    let formula = parse_formula(&formula_src)
        .map_err(|e| Failure::validation(format!("{origin}: {e}")))?;

    let queried: Vec<u32> = if args.at.is_empty() {
        if lts.designated().is_empty() {
            (0..lts.state_count() as u32).collect()
        } else {
            lts.designated().to_vec()
        }
    } else {
        let mut ids = Vec::new();
        for name in &args.at {
            let id = lts
                .state_id(name)
                .map_err(|e| Failure::validation(e.to_string()))?;
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        ids
    };

    let opts = CheckOptions { dump_ca: args.dump_ca };
    let result = checker::check_with(&lts, &env, &formula, opts).map_err(check_failure)?;

    let mut rows = Vec::new();
    for &s in &queried {
        let verdict = result.sat.contains(s);
        let witness = if args.witness && verdict {
            checker::witness(&lts, &env, &formula, s).map_err(check_failure)?
        } else {
            None
        };
        rows.push(StateVerdict { name: lts.state_name(s).to_string(), verdict, witness });
    }

    let oracle = match args.oracle {
        Some(depth) => run_oracle(&lts, &env, &result, depth),
        None => None,
    };
    if let Some(summary) = &oracle {
        for line in &summary.disagreements {
            eprintln!("oracle disagreement: {line}");
        }
    }

    // With a table requested and a conjunction at top level, break the
    // verdict down per conjunct at every queried state.
    let mut conjunct_rows = Vec::new();
    if args.table && !args.json {
        let parts = conjunct_list(&formula);
        if parts.len() >= 2 {
            for part in parts {
                let sub = checker::check(&lts, &env, part).map_err(check_failure)?;
                conjunct_rows.push(ConjunctRow {
                    formula: part.to_string(),
                    verdicts: queried
                        .iter()
                        .map(|&s| (lts.state_name(s).to_string(), sub.sat.contains(s)))
                        .collect(),
                });
            }
        }
    }

    if args.json {
        let report = report::build_json(&format!("{formula}"), &rows, &result, oracle);
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print!("{}", report::render_text(
            &format!("{formula}"),
            &rows,
            &result,
            args.table,
            &conjunct_rows,
        ));
        if let Some(summary) = &oracle {
            println!(
                "oracle (depth {}): agreed at {} states, unknown at {}",
                summary.depth, summary.agreed, summary.unknown
            );
        }
    }
    for (node, dump) in &result.dumps {
        println!("--- configuration automaton for {node} ---");
        print!("{dump}");
    }

    Ok(if rows.iter().all(|r| r.verdict) { 0 } else { 1 })
}

/// Flattens a top-level conjunction into its conjuncts, left to right.
fn conjunct_list(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(a, b) => {
            let mut parts = conjunct_list(a);
            parts.extend(conjunct_list(b));
            parts
        }
        other => vec![other],
    }
}

/// Cross-checks the engine verdicts with the bounded reference search.
/// Oracle limitations (regex annotations, say) degrade to a note rather
/// than an error: the oracle is advisory.
fn run_oracle(lts: &Lts, env: &Env, result: &CheckResult, depth: usize) -> Option<OracleSummary> {
    let verdict = match bounded_path_check(lts, &result.core, env, depth) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("oracle skipped: {e}");
            return None;
        }
    };
    let mut summary =
        OracleSummary { depth, agreed: 0, unknown: 0, disagreements: Vec::new() };
    for s in 0..lts.state_count() as u32 {
        let engine = result.sat.contains(s);
        match verdict.values[s as usize] {
            V3::Unknown => summary.unknown += 1,
            V3::True if engine => summary.agreed += 1,
            V3::False if !engine => summary.agreed += 1,
            v => summary.disagreements.push(format!(
                "state {}: engine says {}, bounded search (depth {}) says {}",
                lts.state_name(s),
                engine,
                depth,
                if v == V3::True { "true" } else { "false" }
            )),
        }
    }
    Some(summary)
}

fn emit_aut(aut: &Automaton, out: &Option<PathBuf>) -> Result<(), Failure> {
    let text = write_aut(aut);
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::validation(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Transform-level kind errors are "unsupported" (2): the operation itself
/// has no meaning for the automaton's kind.
fn transform_failure(e: AutomatonError) -> Failure {
    match &e {
        AutomatonError::CapExceeded { .. } | AutomatonError::KindMismatch { .. } => {
            Failure::unsupported(e.to_string())
        }
        _ => Failure::validation(e.to_string()),
    }
}

fn run_aut(cmd: &AutCommand) -> Result<u8, Failure> {
    match cmd {
        AutCommand::Determinize { file, cap, out } => {
            let aut = load_aut(file)?;
            let det = automata::determinize(&aut, *cap).map_err(transform_failure)?;
            emit_aut(&det, out)?;
            Ok(0)
        }
        AutCommand::Complete { file, out } => {
            let aut = load_aut(file)?;
            let comp = automata::complete(&aut).map_err(transform_failure)?;
            emit_aut(&comp, out)?;
            Ok(0)
        }
        AutCommand::Complement { file, cap, out } => {
            let aut = load_aut(file)?;
            let det = if aut.kind().deterministic() {
                aut
            } else {
                automata::determinize(&aut, *cap).map_err(transform_failure)?
            };
            let full = automata::complete(&det).map_err(transform_failure)?;
            let neg = automata::complement(&full).map_err(transform_failure)?;
            emit_aut(&neg, out)?;
            Ok(0)
        }
        AutCommand::Accepts { file, letters } => {
            let aut = load_aut(file)?;
            let word: Vec<&str> = letters.iter().map(|s| s.as_str()).collect();
            let accepted = aut
                .accepts(&word)
                .map_err(|e| Failure::validation(e.to_string()))?;
            println!("{}", if accepted { "accepted" } else { "rejected" });
            Ok(if accepted { 0 } else { 1 })
        }
    }
}

fn parse_pairs(src: &str) -> Result<Vec<(usize, usize)>, Failure> {
    let mut out = Vec::new();
    for part in src.split(',').filter(|p| !p.is_empty()) {
        let (a, b) = part
            .split_once(':')
            .ok_or_else(|| Failure::validation(format!("pair `{part}` is not INDEX:INDEX")))?;
        let a = a.parse().map_err(|_| Failure::validation(format!("bad tile index `{a}`")))?;
        let b = b.parse().map_err(|_| Failure::validation(format!("bad tile index `{b}`")))?;
        out.push((a, b));
    }
    Ok(out)
}

fn write_named(dir: &Path, name: &str, content: String) -> Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, content)
        .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::validation(format!("{}: {e}", dir.display())))
}

fn run_gen(cmd: &GenCommand) -> Result<u8, Failure> {
    match cmd {
        GenCommand::Fairness { n, k, out } => {
            ensure_dir(out)?;
            let (t, s) = gen_fairness_family(*n, *k);
            write_named(out, &format!("fairness_T_{n}_{k}.lts"), write_lts(&t))?;
            write_named(out, &format!("fairness_S_{n}_{k}.lts"), write_lts(&s))?;
            Ok(0)
        }
        GenCommand::Tiling { width, tiles, horizontal, vertical, out } => {
            ensure_dir(out)?;
            let h = parse_pairs(horizontal)?;
            let v = parse_pairs(vertical)?;
            let inst = TilingInstance::new(*width, *tiles, &h, &v)
                .map_err(|e| Failure::validation(e.to_string()))?;
            let (lts, formula, aut) = gen_micro_tiling(&inst);
            let stem = format!("tiling_{width}x{tiles}");
            write_named(out, &format!("{stem}.lts"), write_lts(&lts))?;
            write_named(out, &format!("{stem}.aut"), write_aut(&aut))?;
            write_named(out, &format!("{stem}.ectl"), format!("{formula}\n"))?;
            Ok(0)
        }
        GenCommand::Corpus { out } => {
            ensure_dir(out)?;
            let paths = write_corpus(out)
                .map_err(|e| Failure::validation(format!("{}: {e}", out.display())))?;
            println!("wrote {} files under {}", paths.len(), out.display());
            Ok(0)
        }
    }
}
