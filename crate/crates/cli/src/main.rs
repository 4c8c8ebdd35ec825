//! `adaptctl` — certificates, simulations and frequency-domain studies for
//! indirect adaptive control with a static update law.
//!
//! Exit codes: 0 success, 2 configuration error, 3 infeasibility,
//! 4 numerical failure.

mod commands;
mod config;
mod output;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use adaptctl_core::error::Error;

const USAGE: &str = "usage: adaptctl <analyze|kyp|simulate|bode|reproduce> --config <path> \
[--out <dir>] [--seed <u64>]
       adaptctl reproduce --figure <1|2|3> [--out <dir>] [--seed <u64>]";

/// Command-line failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(message: String) -> Self {
        Self { code: 2, message }
    }

    pub fn runtime(message: String) -> Self {
        Self { code: 4, message }
    }

    /// Map core errors onto exit codes: infeasibility verdicts map to 3,
    /// numerical breakdowns to 4, everything else is a configuration issue.
    pub fn from_core(e: Error) -> Self {
        let code = match &e {
            Error::CriteriaViolated { .. }
            | Error::LmiInfeasible { .. }
            | Error::IndeterminateLimit => 3,
            Error::Divergence { .. } | Error::Singular(_) | Error::LimitMismatch { .. } => 4,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

/// Deterministic fan-out of independent jobs, capped by `ADAPTCTL_THREADS`.
pub mod parallel {
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;

    fn thread_cap(jobs: usize) -> usize {
        let default = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        let cap = std::env::var("ADAPTCTL_THREADS")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&n| n >= 1)
            .unwrap_or(default);
        cap.min(jobs).max(1)
    }

    /// Run all jobs and return their results in submission order. Jobs may
    /// borrow from the caller; scoped threads keep that sound.
    pub fn run_all<'a, T: Send>(jobs: Vec<Box<dyn FnOnce() -> T + Send + 'a>>) -> Vec<T> {
        let n = jobs.len();
        let workers = thread_cap(n);
        if workers <= 1 {
            return jobs.into_iter().map(|job| job()).collect();
        }
        let slots: Vec<Mutex<Option<T>>> = (0..n).map(|_| Mutex::new(None)).collect();
        let queue: Vec<Mutex<Option<Box<dyn FnOnce() -> T + Send + 'a>>>> =
            jobs.into_iter().map(|j| Mutex::new(Some(j))).collect();
        let next = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let idx = next.fetch_add(1, Ordering::Relaxed);
                    if idx >= n {
                        break;
                    }
                    let job = queue[idx].lock().unwrap().take().expect("job taken once");
                    *slots[idx].lock().unwrap() = Some(job());
                });
            }
        });
        slots
            .into_iter()
            .map(|slot| slot.into_inner().unwrap().expect("job completed"))
            .collect()
    }
}

struct Args {
    command: String,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    figure: Option<u32>,
}

fn parse_args(argv: &[String]) -> Result<Args, CliError> {
    let mut it = argv.iter();
    let command = it
        .next()
        .cloned()
        .ok_or_else(|| CliError::config(format!("missing command\n{USAGE}")))?;
    let mut args = Args { command, config: None, out: None, seed: None, figure: None };
    while let Some(flag) = it.next() {
        let mut value = |name: &str| {
            it.next()
                .cloned()
                .ok_or_else(|| CliError::config(format!("{name} requires a value\n{USAGE}")))
        };
        match flag.as_str() {
            "--config" => args.config = Some(PathBuf::from(value("--config")?)),
            "--out" => args.out = Some(PathBuf::from(value("--out")?)),
            "--seed" => {
                let raw = value("--seed")?;
                args.seed = Some(raw.parse().map_err(|_| {
                    CliError::config(format!("--seed expects an unsigned integer, got {raw}"))
                })?);
            }
            "--figure" => {
                let raw = value("--figure")?;
                args.figure = Some(raw.parse().map_err(|_| {
                    CliError::config(format!("--figure expects 1, 2 or 3, got {raw}"))
                })?);
            }
            other => {
                return Err(CliError::config(format!("unknown flag {other}\n{USAGE}")));
            }
        }
    }
    Ok(args)
}

fn run(argv: &[String]) -> Result<(), CliError> {
    let args = parse_args(argv)?;
    if args.command == "reproduce" {
        let figure = args
            .figure
            .ok_or_else(|| CliError::config(format!("reproduce requires --figure\n{USAGE}")))?;
        let out = args.out.unwrap_or_else(|| PathBuf::from("out"));
        return reproduce::run(figure, &out, args.seed);
    }

    let config_path = args
        .config
        .ok_or_else(|| CliError::config(format!("{} requires --config\n{USAGE}", args.command)))?;
    let text = std::fs::read_to_string(&config_path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", config_path.display())))?;
    let cfg = config::ConfigFile::parse(&text)?;
    let out = args
        .out
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    match args.command.as_str() {
        "analyze" => commands::cmd_analyze(&cfg, &out, args.seed),
        "kyp" => commands::cmd_kyp(&cfg, &out),
        "simulate" => commands::cmd_simulate(&cfg, &out, args.seed),
        "bode" => commands::cmd_bode(&cfg, &out, args.seed),
        other => Err(CliError::config(format!("unknown command {other}\n{USAGE}"))),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match run(&argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
