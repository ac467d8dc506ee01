//! `motzkin`: command-line front end for the colored Motzkin spin chain.
//!
//! Every subcommand emits one table, as CSV or JSON, to `--out` (written atomically) or to
//! standard output. Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 numerical
//! non-convergence.

mod commands;
mod table;

use clap::{Parser, Subcommand};
use commands::{
    ClassesArgs, EntropyArgs, ExcursionArgs, FieldArgs, GapArgs, MarkovArgs, Output, ReproduceArgs, Settings,
    SpectrumArgs,
};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use table::Format;

#[derive(Debug, Parser)]
#[command(name = "motzkin", version, about = "Colored Motzkin spin chain: entropy, spectra, gaps and bounds")]
struct Cli {
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Seed for the eigensolver's start vectors.
    #[arg(long, global = true, default_value_t = motzkin_core::hamiltonian::DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for the parallel kernels; all cores when absent.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact and asymptotic half-chain entanglement entropy.
    Entropy(EntropyArgs),
    /// Lowest eigenvalues of the chain Hamiltonian.
    Spectrum(SpectrumArgs),
    /// Spectral gap over a list of chain lengths, with a power-law fit.
    Gap(GapArgs),
    /// Classes of basis strings connected by local moves.
    Classes(ClassesArgs),
    /// Effective Markov chain on Dyck paths: gap and canonical-path bound.
    Markov(MarkovArgs),
    /// Excursion-area density, moments and the trial-state gap bound.
    Excursion(ExcursionArgs),
    /// First-order energies of the chain in an external field.
    Field(FieldArgs),
    /// Data behind one of the standard figures.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] motzkin_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Setup(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(motzkin_core::Error::NoConvergence(_)) => 3,
            CliError::Core(_) | CliError::Setup(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}

fn emit(path: Option<&PathBuf>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => table::write_atomic(p, contents).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => std::io::stdout()
            .lock()
            .write_all(contents.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Setup("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Setup(format!("thread pool: {e}")))?;
    }
    let settings = Settings { seed: cli.seed };
    let Output { table, summary } = match &cli.command {
        Command::Entropy(a) => {
            let out = commands::entropy(a)?;
            if let Some(path) = &a.counts {
                emit(Some(path), &commands::count_table(&a.n_list, a.s)?.render(cli.format))?;
            }
            out
        }
        Command::Spectrum(a) => commands::spectrum(a, settings)?,
        Command::Gap(a) => commands::gap(a, settings)?,
        Command::Classes(a) => commands::classes(a)?,
        Command::Markov(a) => commands::markov(a)?,
        Command::Excursion(a) => commands::excursion(a)?,
        Command::Field(a) => commands::field(a)?,
        Command::Reproduce(a) => commands::reproduce(a)?,
    };
    emit(cli.out.as_ref(), &table.render(cli.format))?;
    for line in summary {
        eprintln!("{line}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
