use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cmf::report::{execute, Command, RunConfig};
use cmf::{CmfError, pauli::SpinHamiltonian};

#[derive(Parser)]
#[command(name = "cmf", version, about = "Cluster mean-field eigensolver for Pauli spin Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Hamiltonian file: one `<coefficient> <pauli string>` per line.
    #[arg(long, global = true)]
    hamiltonian: Option<PathBuf>,

    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Assert the run draws no random numbers (none of the commands do).
    #[arg(long, global = true)]
    seedless: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// CMF ground state with exact comparison.
    Solve,
    /// Exact ground state by dense diagonalization.
    Oracle,
    /// Transverse-field chains over a range of lengths.
    ChainScan,
    /// Three-spin network over a coupling sweep.
    ThreespinScan,
    /// Ground state in truncated compressed subspaces.
    Truncate,
    /// Digitized adiabatic drag of a cluster Hamiltonian.
    Drag,
    /// Variational minimization in the compressed space.
    Vqe,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Solve => Command::Solve,
            Cmd::Oracle => Command::Oracle,
            Cmd::ChainScan => Command::ChainScan,
            Cmd::ThreespinScan => Command::ThreespinScan,
            Cmd::Truncate => Command::Truncate,
            Cmd::Drag => Command::Drag,
            Cmd::Vqe => Command::Vqe,
        }
    }
}

fn run(cli: &Cli) -> Result<(), CmfError> {
    let hamiltonian = cli
        .hamiltonian
        .as_ref()
        .map(|p| SpinHamiltonian::parse(&std::fs::read_to_string(p)?))
        .transpose()?;
    let config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let output = execute(cli.command.into(), hamiltonian.as_ref(), &config, cli.seedless)?;
    let text = match cli.format {
        Format::Json => output.report.to_json()? + "\n",
        Format::Csv => output.csv,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
