//! `gpe` command-line interface.
//!
//! Verbs: `solve`, `refine` (cascadic solve), `compare-init`,
//! `convergence-study`. Flags: `--config PATH`, `--out DIR`, `--trace`,
//! `--seed N`, `--threads N`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 nonconvergence,
//! 4 I/O error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use commands::CommandContext;
use config::{Method, RawConfig};

const USAGE: &str = "\
usage: gpe <verb> --config PATH [--out DIR] [--trace] [--seed N] [--threads N]

verbs:
  solve               run the configured solver on the configured grid
  refine              cascadic multigrid solve (grid.n is the coarsest level)
  compare-init        solve from every init kind in compare.kinds, flag the best
  convergence-study   mesh-refinement errors against a fine sine-spectral reference

flags:
  --config PATH       flat key = value configuration file (required)
  --out DIR           output directory (default .)
  --trace             write a per-iteration trace next to the report
  --seed N            override the configured RNG seed
  --threads N         cap the worker thread pool
";

struct Args {
    verb: String,
    config: PathBuf,
    out: PathBuf,
    trace: bool,
    seed: Option<u64>,
    threads: Option<usize>,
}

fn parse_args() -> Result<Args, String> {
    let mut argv = std::env::args().skip(1);
    let verb = match argv.next() {
        Some(v) if v == "--help" || v == "-h" => return Err(String::new()),
        Some(v) => v,
        None => return Err("missing verb".into()),
    };
    let mut config = None;
    let mut out = PathBuf::from(".");
    let mut trace = false;
    let mut seed = None;
    let mut threads = None;
    while let Some(flag) = argv.next() {
        let mut value = |name: &str| {
            argv.next()
                .ok_or_else(|| format!("{name} expects a value"))
        };
        match flag.as_str() {
            "--config" => config = Some(PathBuf::from(value("--config")?)),
            "--out" => out = PathBuf::from(value("--out")?),
            "--trace" => trace = true,
            "--seed" => {
                seed = Some(
                    value("--seed")?
                        .parse()
                        .map_err(|_| "--seed expects an integer".to_string())?,
                )
            }
            "--threads" => {
                threads = Some(
                    value("--threads")?
                        .parse()
                        .map_err(|_| "--threads expects an integer".to_string())?,
                )
            }
            other => return Err(format!("unknown flag '{other}'")),
        }
    }
    Ok(Args {
        verb,
        config: config.ok_or("--config PATH is required")?,
        out,
        trace,
        seed,
        threads,
    })
}

fn exit_code(err: &gpe::Error) -> u8 {
    match err {
        gpe::Error::Config(_)
        | gpe::Error::Format(_)
        | gpe::Error::GridMismatch(_)
        | gpe::Error::Normalization { .. } => 2,
        gpe::Error::Io(_) => 4,
        gpe::Error::StepFailure { .. } | gpe::Error::NumericalOverflow { .. } => 3,
    }
}

fn main() -> ExitCode {
    let args = match parse_args() {
        Ok(a) => a,
        Err(msg) => {
            if msg.is_empty() {
                print!("{USAGE}");
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {msg}");
            eprint!("{USAGE}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = args.threads {
        // ignore failure: the global pool may already exist in tests
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(4);
        }
    };
    let mut cfg = match RawConfig::parse(&text).and_then(RawConfig::resolve) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.verb == "refine" {
        cfg.method = Method::Cascadic;
    }
    let ctx = CommandContext {
        out: args.out,
        trace: args.trace,
    };
    let outcome = match args.verb.as_str() {
        "solve" | "refine" => commands::solve(&cfg, &ctx),
        "compare-init" => commands::compare_init(&cfg, &ctx),
        "convergence-study" => commands::convergence_study(&cfg, &ctx),
        other => {
            eprintln!("error: unknown verb '{other}'");
            eprint!("{USAGE}");
            return ExitCode::from(2);
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("warning: solver did not meet its stopping criterion");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
