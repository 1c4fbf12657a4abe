use clap::{Parser, ValueEnum};
use lemmaforge_cli::{run, Mode, ReportFormat, RunConfig};
use lemmaforge_core::{SearchSpace, SolverConfig};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

/// Auto-active verifier for annotated C with lemma functions.
///
/// Exit status is 0 on success, 1 when a VC is not proved or a
/// counterexample is found, and 2 on input or pipeline errors.
#[derive(Debug, Parser)]
#[command(name = "lemmaforge", version)]
struct Cli {
    /// Stage to run up to.
    #[arg(value_enum)]
    mode: Mode,
    /// Source files; for `corpus`, files or directories of `.c` files.
    inputs: Vec<PathBuf>,
    /// Solver command line; the script is written to its standard input.
    #[arg(long, env = "LEMMAFORGE_SOLVER", default_value = "z3 -in")]
    solver: String,
    /// Per-VC time budget in seconds.
    #[arg(long, env = "LEMMAFORGE_TIMEOUT", default_value_t = 10.0)]
    timeout: f64,
    /// Parallel solver jobs (0: one per core).
    #[arg(long, env = "LEMMAFORGE_JOBS", default_value_t = 0)]
    jobs: usize,
    #[arg(long, env = "LEMMAFORGE_EMIT_SMT", value_name = "DIR")]
    emit_smt: Option<PathBuf>,
    #[arg(long, env = "LEMMAFORGE_EMIT_VCS", value_name = "DIR")]
    emit_vcs: Option<PathBuf>,
    #[arg(long, env = "LEMMAFORGE_EMIT_ELABORATED", value_name = "DIR")]
    emit_elaborated: Option<PathBuf>,
    #[arg(long, value_enum, env = "LEMMAFORGE_REPORT", default_value = "text")]
    report: ReportFormat,
    /// Arithmetic overflow checks on bounded integer operations.
    #[arg(long, value_enum, env = "LEMMAFORGE_OVERFLOW_VCS", default_value = "on")]
    overflow_vcs: Switch,
    /// Lemma, axiom or lemma function to search counterexamples for.
    #[arg(long, value_name = "NAME")]
    falsify: Option<String>,
    #[arg(long, env = "LEMMAFORGE_MAX_LEN", default_value_t = 4)]
    max_len: usize,
    /// Non-zero characters strings are built from (0 is always included).
    #[arg(long, env = "LEMMAFORGE_ALPHABET", default_value = "abc")]
    alphabet: String,
    /// Directory of cached solver verdicts.
    #[arg(long, env = "LEMMAFORGE_CACHE", value_name = "DIR")]
    cache: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = RunConfig {
        inputs: cli.inputs,
        mode: cli.mode,
        solver: SolverConfig { command: cli.solver, timeout_s: cli.timeout },
        jobs: cli.jobs,
        emit_smt: cli.emit_smt,
        emit_vcs: cli.emit_vcs,
        emit_elaborated: cli.emit_elaborated,
        report: cli.report,
        overflow: cli.overflow_vcs == Switch::On,
        falsify: cli.falsify,
        space: SearchSpace::new(cli.max_len, &cli.alphabet),
        cache: cli.cache,
    };
    let out = run(&cfg);
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
