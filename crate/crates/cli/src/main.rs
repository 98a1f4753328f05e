use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use clap::{Parser, Subcommand, ValueEnum};
use fsm_verify::formula::Formula;
use fsm_verify::fsmlang::{compile, parse, parse_property, CompileOptions, SymbolicFsm};
use fsm_verify::itp::{run_itp, ItpConfig};
use fsm_verify::kind::{run_kind, CompletenessMode, KindConfig};
use fsm_verify::oracle::check_explicit;
use fsm_verify::outcome::{CheckOutcome, EngineError};
use fsm_verify::report::{render_compare, RunReport};
use fsm_verify::sat::{Heuristic, SatError, SolverConfig};

const EXIT_SAFE: u8 = 0;
const EXIT_UNSAFE: u8 = 1;
const EXIT_BOUND: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

#[derive(Parser)]
#[command(
    name = "fsm-verify",
    version,
    about = "SAT-based safety checking for finite state machines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a safety property on a model.
    Check(CheckArgs),
    /// Print the symbolic initial-state and transition formulas.
    Compile {
        model: PathBuf,
        #[arg(long)]
        allow_deadlock: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Kind,
    Itp,
    Oracle,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Completeness {
    Bound2n,
    Loopfree,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicArg {
    Static,
    Activity,
}

#[derive(clap::Args)]
struct CheckArgs {
    model: PathBuf,
    /// Property that must hold in every reachable state. Overrides a PROP line in the model.
    #[arg(long)]
    prop: Option<String>,
    #[arg(long, value_enum, default_value = "all")]
    engine: Engine,
    /// Largest BMC bound (default 2^n).
    #[arg(long)]
    max_k: Option<usize>,
    /// Initial bound of the interpolation engine.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    k0: u64,
    /// Bound increase on interpolation restarts (default n).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k_increment: Option<u64>,
    /// Give up after this many interpolation restarts.
    #[arg(long)]
    max_restarts: Option<usize>,
    #[arg(long, value_enum, default_value = "bound2n")]
    completeness: Completeness,
    #[arg(long)]
    strengthened_induction: bool,
    /// Give states without successors a self-loop instead of rejecting the model.
    #[arg(long)]
    allow_deadlock: bool,
    #[arg(long)]
    json: bool,
    /// Print every logged query of every engine in one table.
    #[arg(long)]
    compare: bool,
    /// Write each SAT query as DIMACS into this directory.
    #[arg(long)]
    dump_cnf: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "static")]
    heuristic: HeuristicArg,
    /// Per-query decision limit; exceeding it ends the run with status 2.
    #[arg(long)]
    decision_budget: Option<u64>,
}

/// A failure with its exit status.
struct Failure(u8, String);

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_SAFE
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Check(args) => check(&args),
        Command::Compile {
            model,
            allow_deadlock,
        } => load_model(&model, allow_deadlock).map(|(fsm, _)| {
            println!("I = {}", fsm.init());
            println!("T = {}", fsm.trans());
            EXIT_SAFE
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("fsm-verify: {msg}");
            ExitCode::from(code)
        }
    }
}

fn load_model(path: &Path, allow_deadlock: bool) -> Result<(SymbolicFsm, Option<String>), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure(EXIT_DATA, format!("{}: {e}", path.display())))?;
    let ast = parse(&text).map_err(|e| Failure(EXIT_DATA, format!("{}: {e}", path.display())))?;
    let prop = ast.prop.clone();
    let fsm = compile(&ast, CompileOptions { allow_deadlock })
        .map_err(|e| Failure(EXIT_DATA, format!("{}: {e}", path.display())))?;
    Ok((fsm, prop))
}

fn check(args: &CheckArgs) -> Result<u8, Failure> {
    let (fsm, file_prop) = load_model(&args.model, args.allow_deadlock)?;
    let (source, text) = match (&args.prop, file_prop) {
        (Some(p), _) => ("--prop".to_string(), p.clone()),
        (None, Some(p)) => (args.model.display().to_string(), p),
        (None, None) => {
            return Err(Failure(
                EXIT_USAGE,
                "no property given; pass --prop or add a PROP line to the model".into(),
            ))
        }
    };
    let prop = parse_property(&text, &fsm)
        .map_err(|e| Failure(EXIT_DATA, format!("{source}: {e}")))?
        .formula;

    let engines: &[&str] = match args.engine {
        Engine::Kind => &["kind"],
        Engine::Itp => &["itp"],
        Engine::Oracle => &["oracle"],
        Engine::All => &["kind", "itp", "oracle"],
    };
    let outcomes: Vec<Result<CheckOutcome, EngineError>> = thread::scope(|s| {
        let handles: Vec<_> = engines
            .iter()
            .map(|&name| s.spawn(|| run_engine(name, &fsm, &prop, args)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("engine thread panicked"))
            .collect()
    });

    let mut reports = Vec::new();
    for (name, outcome) in engines.iter().zip(outcomes) {
        match outcome {
            Ok(out) => reports.push(RunReport::from_outcome(name, &out)),
            Err(EngineError::Sat(SatError::ResourceLimit(n))) => {
                return Err(Failure(
                    EXIT_BOUND,
                    format!("{name}: gave up after {n} decisions in one SAT query"),
                ))
            }
            Err(e) => return Err(Failure(EXIT_DATA, format!("{name}: {e}"))),
        }
    }

    if args.json {
        let json = if reports.len() == 1 {
            serde_json::to_string_pretty(&reports[0])
        } else {
            serde_json::to_string_pretty(&reports)
        };
        println!("{}", json.expect("reports serialize"));
    } else {
        if args.compare {
            print!("{}", render_compare(&reports));
            println!();
        }
        for r in &reports {
            print_report(r);
        }
    }
    Ok(exit_status(&reports))
}

fn run_engine(
    name: &str,
    fsm: &SymbolicFsm,
    prop: &Formula,
    args: &CheckArgs,
) -> Result<CheckOutcome, EngineError> {
    let solver = SolverConfig {
        heuristic: match args.heuristic {
            HeuristicArg::Static => Heuristic::Static,
            HeuristicArg::Activity => Heuristic::Activity,
        },
        seed: args.seed,
        decision_budget: args.decision_budget,
        dump_dir: args.dump_cnf.clone(),
    };
    match name {
        "kind" => run_kind(
            fsm,
            prop,
            &KindConfig {
                max_k: args.max_k,
                completeness: match args.completeness {
                    Completeness::Bound2n => CompletenessMode::Bound2n,
                    Completeness::Loopfree => CompletenessMode::LoopFree,
                    Completeness::None => CompletenessMode::None,
                },
                strengthened_induction: args.strengthened_induction,
                solver,
            },
        ),
        "itp" => run_itp(
            fsm,
            prop,
            &ItpConfig {
                k0: args.k0 as usize,
                increment: args.k_increment.map(|n| n as usize),
                max_restarts: args.max_restarts,
                solver,
            },
        ),
        _ => Ok(check_explicit(fsm, prop).expect("property ranges over state bits")),
    }
}

fn print_report(r: &RunReport) {
    let detail = r
        .method
        .as_deref()
        .map(|m| format!(" by {m}"))
        .unwrap_or_default();
    println!(
        "{}: {}{} at k={} ({} SAT queries, {} interpolants, {} restarts, {:.3}s)",
        r.engine,
        r.verdict.to_uppercase(),
        detail,
        r.k,
        r.sat_queries,
        r.interpolants,
        r.restarts,
        r.wall_time
    );
    if let Some(trace) = &r.trace {
        println!("  counterexample, {} states:", trace.len());
        for (i, step) in trace.iter().enumerate() {
            println!("    {i}: {step}");
        }
    }
}

/// Unsafe if any engine found a counterexample, else bound if any gave up.
fn exit_status(reports: &[RunReport]) -> u8 {
    if reports.iter().any(|r| r.verdict == "unsafe") {
        EXIT_UNSAFE
    } else if reports.iter().any(|r| r.verdict == "bound_reached") {
        EXIT_BOUND
    } else {
        EXIT_SAFE
    }
}
