//! Command-line front end. Exit codes are a stable contract:
//! 0 success (or verdict equal), 1 semantic mismatch, 2 validation/parse
//! error, 3 resource guard exceeded.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stackelkep::caps::Caps;
use stackelkep::error::Error;
use stackelkep::graph::KepInstance;
use stackelkep::packing::packing_from_json;
use stackelkep::reduction::{
    classify_cycles, classify_gadget, reduce_to_kep, verdict_to_json, verify_reduction, RoleMap,
};
use stackelkep::sat::{
    brute_sat, parse_formula, to_sat22, write_formula, FormulaFile,
};
use stackelkep::solver::{report_to_json, solve_exact_opts, solve_k2_opts, SolveOptions};
use stackelkep::{gen, Result};

#[derive(Parser)]
#[command(name = "stackelkep", version, about = "Stackelberg kidney-exchange solver and SAT-reduction toolkit")]
struct Cli {
    /// Disable the exponential-search guards (same as maxing out
    /// STACKELKEP_CAPS).
    #[arg(long, global = true)]
    i_know_this_is_exponential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the leader's problem on an instance file.
    Solve(SolveArgs),
    /// Run one stage of the SAT-to-KEP pipeline.
    Reduce(ReduceArgs),
    /// Cross-check a reduction (or the variable-splitting transform) with brute force.
    Verify(VerifyArgs),
    /// Generate random instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Classify a follower packing on a reduced instance.
    Classify(ClassifyArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// `exact` (any K) or `k2` (matching-based, K=2 only).
    #[arg(long, default_value = "exact")]
    mode: String,
    /// Threshold override for the decision question.
    #[arg(long)]
    decision: Option<u64>,
    /// Include the full strategy-value table in the report.
    #[arg(long)]
    table: bool,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long)]
    pretty: bool,
    /// Report file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    /// `sat3-to-sat22`, `adv-to-kep`, or `full`.
    stage: String,
    #[arg(long)]
    formula: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    formula: PathBuf,
    /// Check equisatisfiability of the variable-splitting transform instead of
    /// full reduction (expects a plain CNF).
    #[arg(long)]
    equisat: bool,
    #[arg(long)]
    pretty: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random KEP instance.
    Kep(GenKepArgs),
    /// Random (2,2)-valid adversarial formula.
    Asat(GenAsatArgs),
}

#[derive(Args)]
struct GenKepArgs {
    #[arg(long)]
    nodes: u32,
    #[arg(long, default_value_t = 0)]
    leader: u32,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value_t = 3)]
    max_cycle_len: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenAsatArgs {
    #[arg(long, default_value_t = 1)]
    vars_x: u32,
    #[arg(long, default_value_t = 1)]
    vars_y: u32,
    #[arg(long, default_value_t = 3)]
    clauses: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    packing: PathBuf,
    #[arg(long)]
    pretty: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let caps = match load_caps(cli.i_know_this_is_exponential) {
        Ok(caps) => caps,
        Err(e) => return fail(&e),
    };
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args, &caps),
        Command::Reduce(args) => cmd_reduce(args),
        Command::Verify(args) => cmd_verify(args, &caps),
        Command::Gen(args) => cmd_gen(args),
        Command::Classify(args) => cmd_classify(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::CapExceeded { .. } => ExitCode::from(3),
        _ => ExitCode::from(2),
    }
}

fn load_caps(unlimited: bool) -> Result<Caps> {
    if unlimited {
        return Ok(Caps::unlimited());
    }
    match std::env::var("STACKELKEP_CAPS") {
        Ok(raw) => Caps::parse_overrides(&raw),
        Err(_) => Ok(Caps::default()),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs, caps: &Caps) -> Result<ExitCode> {
    let inst = KepInstance::load(&args.instance)?;
    let opts = SolveOptions {
        threads: args.threads,
        with_table: args.table,
        decision_k: args.decision,
    };
    let report = match args.mode.as_str() {
        "exact" => solve_exact_opts(&inst, caps, &opts)?,
        "k2" => solve_k2_opts(&inst, caps, &opts)?,
        other => {
            return Err(Error::Validation(format!(
                "unknown mode `{other}` (want exact|k2)"
            )))
        }
    };
    emit(&args.out, &report_to_json(&report, args.pretty))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_reduce(args: ReduceArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&args.formula)?;
    let parsed = parse_formula(&text)?;
    match args.stage.as_str() {
        "sat3-to-sat22" => {
            let formula = match parsed {
                FormulaFile::Plain(f) => f,
                FormulaFile::Adversarial(_) => {
                    return Err(Error::Validation(
                        "sat3-to-sat22 expects a plain CNF (no x/y lines)".into(),
                    ))
                }
            };
            let (out, _mapping, singletons) = to_sat22(&formula)?;
            for v in singletons {
                eprintln!("warning: variable {v} occurs once; its consistency clause is a tautology");
            }
            emit(&args.out, &write_formula(&FormulaFile::Plain(out)))?;
        }
        "adv-to-kep" => {
            let a = match parsed {
                FormulaFile::Adversarial(a) => a,
                FormulaFile::Plain(_) => {
                    return Err(Error::Validation(
                        "adv-to-kep expects an adversarial CNF (`p acnf` with x/y lines)".into(),
                    ))
                }
            };
            let (inst, _rm) = reduce_to_kep(&a)?;
            emit(&args.out, &inst.to_json())?;
        }
        "full" => {
            let a = match parsed {
                FormulaFile::Adversarial(a) => a,
                FormulaFile::Plain(_) => {
                    return Err(Error::Validation(
                        "full expects an adversarial CNF (`p acnf` with x/y lines)".into(),
                    ))
                }
            };
            let (a22, _mapping) = stackelkep::adversarialize(&a)?;
            let (inst, _rm) = reduce_to_kep(&a22)?;
            emit(&args.out, &inst.to_json())?;
        }
        other => {
            return Err(Error::Validation(format!(
                "unknown reduce stage `{other}` (want sat3-to-sat22|adv-to-kep|full)"
            )))
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs, caps: &Caps) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&args.formula)?;
    let parsed = parse_formula(&text)?;
    let verdict = if args.equisat {
        let formula = match parsed {
            FormulaFile::Plain(f) => f,
            FormulaFile::Adversarial(a) => a.formula,
        };
        let (transformed, _, _) = to_sat22(&formula)?;
        let before = brute_sat(&formula, caps)?.is_some();
        let after = brute_sat(&transformed, caps)?.is_some();
        stackelkep::Verdict {
            sat_answer: before,
            kep_decision: after,
            equal: before == after,
            witness_strategy: None,
        }
    } else {
        let a = match parsed {
            FormulaFile::Adversarial(a) => a,
            FormulaFile::Plain(_) => {
                return Err(Error::Validation(
                    "verify expects an adversarial CNF; use --equisat for plain CNFs".into(),
                ))
            }
        };
        verify_reduction(&a, caps)?
    };
    emit(&args.out, &verdict_to_json(&verdict, args.pretty))?;
    if verdict.equal {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: oracle answers disagree — this is a correctness bug");
        Ok(ExitCode::from(1))
    }
}

fn cmd_gen(args: GenCommand) -> Result<ExitCode> {
    match args {
        GenCommand::Kep(a) => {
            let inst = gen::random_kep(a.nodes, a.leader, a.density, a.max_cycle_len, a.seed)?;
            emit(&a.out, &inst.to_json())?;
        }
        GenCommand::Asat(a) => {
            let instance = gen::random_adversarial_22(a.vars_x, a.vars_y, a.clauses, a.seed)?;
            emit(&a.out, &write_formula(&FormulaFile::Adversarial(instance)))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_classify(args: ClassifyArgs) -> Result<ExitCode> {
    let inst = KepInstance::load(&args.instance)?;
    let rm = RoleMap::from_instance(&inst)?;
    let packing_text = std::fs::read_to_string(&args.packing)?;
    let packing = packing_from_json(&packing_text, &inst)?;

    let cycle_types = classify_cycles(&rm, &packing)?;
    let mut gadgets: BTreeMap<String, stackelkep::GadgetClass> = BTreeMap::new();
    for &v in rm.x_vars().iter().chain(rm.y_vars()) {
        gadgets.insert(v.to_string(), classify_gadget(&rm, &packing, v)?);
    }
    let report = serde_json::json!({
        "cycles": cycle_types,
        "gadgets": gadgets,
        "d_covered": packing.covers(rm.d_node()),
    });
    let mut text = if args.pretty {
        serde_json::to_string_pretty(&report).expect("report serializes")
    } else {
        report.to_string()
    };
    text.push('\n');
    emit(&args.out, &text)?;
    Ok(ExitCode::SUCCESS)
}
