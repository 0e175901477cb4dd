use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;
use std::time::Instant;

use clap::{Parser, Subcommand};

use evlogic_cli::{build_report, render_text, run_fuzz, ColorMode, FuzzOptions, RunReport};
use evlogic_core::oracle;

#[derive(Parser)]
#[command(
    name = "evlogic",
    version,
    about = "Rewrites evidence theories to a verdict: a plausible model or a contradiction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full procedure on one or more .el files
    Run {
        /// Input theory files
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// One JSON report object per input instead of text
        #[arg(long)]
        json: bool,
        /// Attach the full rewrite trace to each report
        #[arg(long)]
        trace: bool,
        /// Print only the plausible (positive) facts in text mode
        #[arg(long)]
        plausible: bool,
    },
    /// Parse and validate files without rewriting
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Generate seeded theories and cross-check the engine against the
    /// independent conformance checks
    Fuzz {
        /// How many seeds to check
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// Fixed conflict bias in [0, 1]; omitted, each seed sweeps the range
        #[arg(long)]
        bias: Option<f64>,
        /// Seed of the first generated theory
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
        #[arg(long, default_value_t = oracle::MAX_AGENTS)]
        agents: u8,
        #[arg(long, default_value_t = oracle::MAX_TIMES)]
        times: u8,
        #[arg(long, default_value_t = oracle::MAX_SIMPLE_VARS)]
        simple_vars: u8,
        #[arg(long, default_value_t = oracle::MAX_DERIVED_VARS)]
        derived_vars: u8,
        #[arg(long, default_value_t = oracle::MAX_REASONINGS)]
        reasonings: u8,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { files, json, trace, plausible } => cmd_run(&files, json, trace, plausible),
        Command::Check { files } => cmd_check(&files),
        Command::Fuzz {
            seeds,
            bias,
            base_seed,
            agents,
            times,
            simple_vars,
            derived_vars,
            reasonings,
        } => {
            let opts = FuzzOptions {
                seeds,
                bias,
                base_seed,
                agent_count: agents,
                time_count: times,
                simple_var_count: simple_vars,
                derived_var_count: derived_vars,
                reasoning_count: reasonings,
            };
            cmd_fuzz(&opts)
        }
    }
}

enum FileOutcome {
    Finished { report: RunReport, solved: evlogic_core::Theory },
    /// Unreadable or invalid input; one rendered line per error.
    Rejected { errors: Vec<String> },
}

fn process_file(path: &Path, with_trace: bool) -> FileOutcome {
    let name = path.display().to_string();
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => return FileOutcome::Rejected { errors: vec![format!("{}: {}", name, e)] },
    };
    let theory = match evlogic_core::parse_theory_named(&text, &name) {
        Ok(theory) => theory,
        Err(errors) => {
            return FileOutcome::Rejected {
                errors: errors.iter().map(|e| e.to_string()).collect(),
            }
        }
    };
    let started = Instant::now();
    let solved = evlogic_core::solve(&theory);
    let duration_ms = started.elapsed().as_millis() as u64;
    let report = build_report(&name, &solved, duration_ms, with_trace);
    FileOutcome::Finished { report, solved }
}

fn cmd_run(files: &[PathBuf], json: bool, trace: bool, plausible: bool) -> ExitCode {
    // One engine per file; reports come back in input order regardless of
    // which finishes first.
    let outcomes: Vec<FileOutcome> = thread::scope(|scope| {
        let workers: Vec<_> =
            files.iter().map(|path| scope.spawn(move || process_file(path, trace))).collect();
        workers.into_iter().map(|w| w.join().expect("engine worker panicked")).collect()
    });

    let color = ColorMode::from_env().enabled();
    let mut saw_unsat = false;
    let mut saw_error = false;
    for outcome in &outcomes {
        match outcome {
            FileOutcome::Finished { report, solved } => {
                saw_unsat |= report.verdict == "unsat";
                if json {
                    println!(
                        "{}",
                        serde_json::to_string(report).expect("reports serialize")
                    );
                } else {
                    print!("{}", render_text(report, solved, color, plausible));
                }
            }
            FileOutcome::Rejected { errors } => {
                saw_error = true;
                for line in errors {
                    eprintln!("{}", line);
                }
            }
        }
    }
    if saw_error {
        ExitCode::from(2)
    } else if saw_unsat {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_check(files: &[PathBuf]) -> ExitCode {
    let mut saw_error = false;
    for path in files {
        let name = path.display().to_string();
        let text = match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) => {
                eprintln!("{}: {}", name, e);
                saw_error = true;
                continue;
            }
        };
        match evlogic_core::parse_theory_named(&text, &name) {
            Ok(_) => println!("{}: ok", name),
            Err(errors) => {
                saw_error = true;
                for e in errors {
                    eprintln!("{}", e);
                }
            }
        }
    }
    if saw_error {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_fuzz(opts: &FuzzOptions) -> ExitCode {
    // Validate sizes and bias once up front; per-seed configs differ only
    // in seed and (possibly swept) bias.
    if let Err(e) = opts.config_for(0).validate() {
        eprintln!("fuzz: {}", e);
        return ExitCode::from(2);
    }
    let bias_text = match opts.bias {
        Some(b) => format!("bias {}", b),
        None => "bias sweep 0.0..=1.0".to_string(),
    };
    println!(
        "fuzz: {} seeds from {}, {}, sizes {}a/{}t/{}+{}v/{}r",
        opts.seeds,
        opts.base_seed,
        bias_text,
        opts.agent_count,
        opts.time_count,
        opts.simple_var_count,
        opts.derived_var_count,
        opts.reasoning_count
    );
    let outcome = run_fuzz(opts);
    match outcome.failure {
        None => {
            println!(
                "fuzz: {} checked, {} open, {} closed, 0 failures",
                outcome.checked, outcome.open, outcome.closed
            );
            ExitCode::SUCCESS
        }
        Some(failure) => {
            println!("fuzz: seed {} failed: {}", failure.seed, failure.reason);
            println!("fuzz: minimized reproduction:");
            for line in failure.theory.lines() {
                println!("    {}", line);
            }
            println!(
                "fuzz: 1 failure, stopped after {} of {} seeds",
                outcome.checked, opts.seeds
            );
            ExitCode::from(1)
        }
    }
}
