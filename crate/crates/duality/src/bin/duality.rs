//! Command-line front end: program-file execution, built-in algorithm
//! runners, interferometer sweeps and the verification suites.
//!
//! Exit codes: 0 success, 1 domain error (parse or validation), 2
//! verification failure (a failed suite, a failed cross-check, or an
//! incomplete enumeration).

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use duality::measurement::MeasurementPolicy;
use duality::report::{self, Emit, RunOptions, VerifySuite};

#[derive(Parser)]
#[command(
    name = "duality",
    version,
    about = "Wave-division state-vector simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PolicyArgs {
    /// Read-out model: 1 Born with no-click, 2 certain-but-slow, 3
    /// certain-above-threshold.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    model: u8,

    /// Amplitude-magnitude threshold for model 3.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,

    /// Base time unit for the read-out time laws.
    #[arg(long, default_value_t = 1.0)]
    t0: f64,

    /// Seed for the deterministic sampling stream.
    #[arg(long, default_value_t = report::DEFAULT_SEED)]
    seed: u64,

    /// Worker threads for the gate kernels; output is identical for any
    /// thread count.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

impl PolicyArgs {
    fn options(&self, emit: Emit) -> Result<RunOptions, duality::Error> {
        let policy = match self.model {
            1 => MeasurementPolicy::born(self.t0)?,
            2 => MeasurementPolicy::certain_slow(self.t0)?,
            _ => MeasurementPolicy::thresholded(self.epsilon, self.t0)?,
        };
        Ok(RunOptions {
            policy,
            seed: self.seed,
            threads: self.threads.max(1),
            emit,
        })
    }
}

fn parse_emit(s: &str) -> Result<Emit, String> {
    match s {
        "amplitudes" => Ok(Emit::Amplitudes),
        "outcome" => Ok(Emit::Outcome),
        "both" => Ok(Emit::Both),
        other => Err(format!(
            "expected amplitudes, outcome or both, got `{other}`"
        )),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a program file on |0…0⟩ and report the result.
    Run {
        /// Program file path.
        program: PathBuf,

        /// Report sections: amplitudes, outcome or both.
        #[arg(long, value_parser = parse_emit, default_value = "both")]
        emit: Emit,

        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Single-query search for a marked item among 2^n.
    Search {
        /// Register size in dubits.
        #[arg(long)]
        n: usize,

        /// Marked basis index.
        #[arg(long)]
        tau: usize,

        #[arg(long, value_parser = parse_emit, default_value = "both")]
        emit: Emit,

        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Solve or enumerate a DIMACS CNF formula.
    Sat {
        /// DIMACS CNF file path.
        file: PathBuf,

        /// Enumerate every solution by repeated measure-then-delete.
        #[arg(long)]
        enumerate: bool,

        /// Skip the exhaustive cross-check of enumerated solutions.
        #[arg(long)]
        no_crosscheck: bool,

        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Emit the interferometer sweep as two-column text.
    MzSweep {
        /// Number of sample points on [0, 2π].
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Run a named invariant battery.
    Verify {
        /// optics-cnot, lcu, dividers or all.
        #[arg(long, default_value = "all")]
        suite: String,

        #[arg(long, default_value_t = report::DEFAULT_SEED)]
        seed: u64,
    },
}

fn dispatch(cli: Cli, out: &mut impl Write) -> Result<ExitCode, duality::Error> {
    match cli.command {
        Command::Run {
            program,
            emit,
            policy,
        } => {
            let source = std::fs::read_to_string(&program).map_err(|e| duality::Error::Parse {
                line: 0,
                message: format!("cannot read {}: {e}", program.display()),
            })?;
            let name = program.display().to_string();
            report::run_report(&source, &name, &policy.options(emit)?, out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Search {
            n,
            tau,
            emit,
            policy,
        } => {
            report::search_report(n, tau, &policy.options(emit)?, out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sat {
            file,
            enumerate,
            no_crosscheck,
            policy,
        } => {
            let source = std::fs::read_to_string(&file).map_err(|e| duality::Error::Parse {
                line: 0,
                message: format!("cannot read {}: {e}", file.display()),
            })?;
            let status = report::sat_report(
                &source,
                enumerate,
                !no_crosscheck,
                &policy.options(Emit::Both)?,
                out,
            )?;
            if status.verification_failed {
                Ok(ExitCode::from(2))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::MzSweep { points } => {
            report::mz_sweep_report(points, out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, seed } => {
            let suite = VerifySuite::parse(&suite)?;
            if report::verify_report(suite, seed, out)? {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version land here too and must exit 0.
            let code = if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match dispatch(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
