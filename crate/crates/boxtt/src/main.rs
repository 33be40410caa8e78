//! Command-line surface: parse programs, evaluate, trace, compute moduli,
//! and run the validation suites with reproducible seeds.
//!
//! Exit codes: 0 ok; 1 suite failure / modulus disagreement or purity
//! violation; 2 stuck; 3 timeout; 64 usage; 65 malformed input; 74 I/O.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::exit;

use clap::{Parser, Subcommand};

use boxtt::continuity::{compute_modulus, oracle_modulus, ModulusError};
use boxtt::eval::{eval, eval_trace, EvalResult, DEFAULT_FUEL};
use boxtt::sexpr::{parse_term, parse_world, print_term, print_world};
use boxtt::term::Term;
use boxtt::validation::{
    check_continuity_suite, check_extension_suite, check_highest_suite, check_membership_suite,
    check_modulus_suite, check_purity_counterexample, run_all, SuiteConfig, SuiteReport,
};
use boxtt::world::RefWorld;

#[derive(Parser)]
#[command(
    name = "boxtt",
    version,
    about = "Effectful call-by-name interpreter and continuity harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a program to a value.
    Eval {
        /// Program file (.sexp)
        file: PathBuf,
        /// Initial world literal file; empty world if omitted
        #[arg(long)]
        world: Option<PathBuf>,
        /// Step budget (default: BOXTT_FUEL or 100000)
        #[arg(long)]
        fuel: Option<u64>,
    },
    /// Evaluate a program, printing every intermediate state.
    Trace {
        file: PathBuf,
        #[arg(long)]
        world: Option<PathBuf>,
        #[arg(long)]
        fuel: Option<u64>,
        /// Write the trace as JSON lines to this path
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compute the modulus of continuity of F at alpha, object-level and
    /// via the probe oracle, and report whether they agree.
    Modulus {
        f_file: PathBuf,
        alpha_file: PathBuf,
        #[arg(long)]
        world: Option<PathBuf>,
        #[arg(long)]
        fuel: Option<u64>,
        /// Write a JSON report to this path
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a validation suite: modulus, highest, continuity, extension,
    /// purity-counterexample, membership, or all.
    Check {
        suite: String,
        #[arg(long)]
        cases: Option<u32>,
        /// Suite seed; fixed default so plain runs are reproducible
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        fuel: Option<u64>,
        /// Betas per case in the continuity suite
        #[arg(long)]
        betas: Option<u32>,
        /// Sampled extensions per world quantifier
        #[arg(long)]
        samples: Option<u32>,
        /// Depth of each sampled extension
        #[arg(long)]
        depth: Option<u32>,
        /// Size budget for generated terms
        #[arg(long)]
        size: Option<u32>,
        /// Write the aggregated JSON report to this path
        #[arg(long)]
        json: Option<PathBuf>,
        /// Dump failing cases as re-runnable .sexp files into this directory
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

struct CliError {
    code: i32,
    message: String,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError {
        code: 74,
        message: format!("{}: {e}", path.display()),
    }
}

fn data_err(message: impl Into<String>) -> CliError {
    CliError {
        code: 65,
        message: message.into(),
    }
}

fn load_term(path: &Path) -> Result<Term, CliError> {
    let src = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_term(&src).map_err(|e| data_err(format!("{}: {e}", path.display())))
}

fn load_world(path: Option<&Path>) -> Result<RefWorld, CliError> {
    match path {
        None => Ok(RefWorld::new()),
        Some(p) => {
            let src = fs::read_to_string(p).map_err(|e| io_err(p, e))?;
            parse_world(&src).map_err(|e| data_err(format!("{}: {e}", p.display())))
        }
    }
}

/// Programs may mention (name k) only when the world supplies that cell.
fn check_names(t: &Term, w: &RefWorld) -> Result<(), CliError> {
    for k in t.names() {
        if w.read(k).is_none() {
            return Err(data_err(format!(
                "program mentions (name {k}) but the world has no such cell"
            )));
        }
    }
    Ok(())
}

fn effective_fuel(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(f) = flag {
        return Ok(f);
    }
    match std::env::var("BOXTT_FUEL") {
        Ok(s) => s.trim().parse().map_err(|_| CliError {
            code: 64,
            message: format!("BOXTT_FUEL must be a natural number, got `{s}`"),
        }),
        Err(_) => Ok(DEFAULT_FUEL),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                exit(0);
            }
            eprint!("{e}");
            exit(64);
        }
    };
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            code
        }
    };
    exit(code);
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Eval { file, world, fuel } => cmd_eval(&file, world.as_deref(), fuel),
        Command::Trace {
            file,
            world,
            fuel,
            json,
        } => cmd_trace(&file, world.as_deref(), fuel, json.as_deref()),
        Command::Modulus {
            f_file,
            alpha_file,
            world,
            fuel,
            report,
        } => cmd_modulus(&f_file, &alpha_file, world.as_deref(), fuel, report.as_deref()),
        Command::Check {
            suite,
            cases,
            seed,
            fuel,
            betas,
            samples,
            depth,
            size,
            json,
            dump,
        } => {
            let defaults = SuiteConfig::default();
            let cfg = SuiteConfig {
                cases: cases.unwrap_or(defaults.cases),
                seed: seed.unwrap_or(defaults.seed),
                fuel: effective_fuel(fuel)?,
                betas: betas.unwrap_or(defaults.betas),
                samples: samples.unwrap_or(defaults.samples),
                depth: depth.unwrap_or(defaults.depth),
                size: size.unwrap_or(defaults.size),
            };
            cmd_check(&suite, cfg, json.as_deref(), dump.as_deref())
        }
    }
}

fn cmd_eval(file: &Path, world: Option<&Path>, fuel: Option<u64>) -> Result<i32, CliError> {
    let term = load_term(file)?;
    let w = load_world(world)?;
    check_names(&term, &w)?;
    let fuel = effective_fuel(fuel)?;
    match eval(&term, &w, fuel) {
        EvalResult::Done {
            value,
            world,
            steps,
        } => {
            println!("value: {}", print_term(&value));
            println!("world: {}", print_world(&world));
            println!("steps: {steps}");
            Ok(0)
        }
        EvalResult::StuckAt { term, reason, .. } => {
            eprintln!("stuck ({reason:?}) at {}", print_term(&term));
            Ok(2)
        }
        EvalResult::Timeout { .. } => {
            eprintln!("timeout after {fuel} steps");
            Ok(3)
        }
    }
}

fn cmd_trace(
    file: &Path,
    world: Option<&Path>,
    fuel: Option<u64>,
    json: Option<&Path>,
) -> Result<i32, CliError> {
    let term = load_term(file)?;
    let w = load_world(world)?;
    check_names(&term, &w)?;
    let fuel = effective_fuel(fuel)?;
    let trace = eval_trace(&term, &w, fuel);
    for (i, (t, _)) in trace.states.iter().enumerate() {
        println!("[{i}] {}", print_term(t));
    }
    println!("final world: {}", print_world(&trace.last().1));
    if let Some(path) = json {
        let mut out = String::new();
        for (i, (t, w)) in trace.states.iter().enumerate() {
            let record = serde_json::json!({
                "step": i,
                "term": print_term(t),
                "world": w,
            });
            out.push_str(&record.to_string());
            out.push('\n');
        }
        write_file(path, &out)?;
    }
    if let Some(reason) = trace.stuck {
        eprintln!("stuck ({reason:?})");
        return Ok(2);
    }
    if trace.exhausted {
        eprintln!("timeout after {fuel} steps");
        return Ok(3);
    }
    Ok(0)
}

fn cmd_modulus(
    f_file: &Path,
    alpha_file: &Path,
    world: Option<&Path>,
    fuel: Option<u64>,
    report_path: Option<&Path>,
) -> Result<i32, CliError> {
    let f = load_term(f_file)?;
    let alpha = load_term(alpha_file)?;
    let w = load_world(world)?;
    let fuel = effective_fuel(fuel)?;

    let object = compute_modulus(&f, &alpha, &w, fuel, false);
    let oracle = oracle_modulus(&f, &alpha, &w, fuel);
    match (object, oracle) {
        (Ok(report), Ok(oracle)) => {
            let agree = report.modulus == oracle;
            println!(
                "modulus = {}, oracle = {}, {}",
                report.modulus,
                oracle,
                if agree { "AGREE" } else { "DISAGREE" }
            );
            if let Some(path) = report_path {
                let json = serde_json::json!({
                    "report": report,
                    "oracle": oracle.to_string(),
                    "agree": agree,
                });
                write_file(path, &serde_json::to_string_pretty(&json).unwrap())?;
            }
            Ok(if agree { 0 } else { 1 })
        }
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("modulus computation failed: {e}");
            Ok(match e {
                ModulusError::PurityViolation { .. } => 1,
                ModulusError::NonNumeralResult { .. } => 1,
                ModulusError::Stuck { .. } => 2,
                ModulusError::Timeout => 3,
            })
        }
    }
}

fn suite_by_name(name: &str, cfg: &SuiteConfig) -> Option<Vec<SuiteReport>> {
    Some(match name {
        "modulus" => vec![check_modulus_suite(cfg)],
        "highest" => vec![check_highest_suite(cfg)],
        "continuity" => vec![check_continuity_suite(cfg)],
        "extension" => vec![check_extension_suite(cfg)],
        "purity-counterexample" => vec![check_purity_counterexample(cfg.fuel)],
        "membership" => vec![check_membership_suite(cfg.fuel)],
        "all" => run_all(cfg),
        _ => return None,
    })
}

fn cmd_check(
    suite: &str,
    cfg: SuiteConfig,
    json: Option<&Path>,
    dump: Option<&Path>,
) -> Result<i32, CliError> {
    let reports = suite_by_name(suite, &cfg).ok_or(CliError {
        code: 64,
        message: format!(
            "unknown suite `{suite}` (expected modulus, highest, continuity, extension, \
             purity-counterexample, membership, or all)"
        ),
    })?;
    let mut all_passed = true;
    for report in &reports {
        println!(
            "suite {:<22} {:>5} cases, {:>3} failures, {} ms",
            report.suite,
            report.cases_run,
            report.failures.len(),
            report.wall_ms
        );
        for f in &report.failures {
            all_passed = false;
            println!(
                "  case {} (seed {}): {} — expected {}, got {}",
                f.case_index, f.seed, f.message, f.expected, f.actual
            );
        }
    }
    if let Some(dir) = dump {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        for report in &reports {
            for f in &report.failures {
                let stem = format!("{}_case{}", report.suite, f.case_index);
                write_file(&dir.join(format!("{stem}_f.sexp")), &f.f)?;
                write_file(&dir.join(format!("{stem}_alpha.sexp")), &f.alpha)?;
                write_file(&dir.join(format!("{stem}_world.sexp")), &f.world)?;
            }
        }
    }
    if let Some(path) = json {
        let payload = serde_json::json!({
            "config": cfg,
            "suites": reports,
        });
        write_file(path, &serde_json::to_string_pretty(&payload).unwrap())?;
    }
    Ok(if all_passed { 0 } else { 1 })
}
