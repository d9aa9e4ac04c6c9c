mod commands;
mod config;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use config::{ConfigError, RunConfig, Settings};
use thiserror::Error;

/// Hamiltonian lattice gauge theory of SU(3) in the irrep basis.
///
/// Settings come from the defaults, then `--config`, then the flags below.
#[derive(Debug, Parser)]
#[command(name = "su3lgt", version)]
struct Cli {
    /// spectrum | evolve | converge | count | compile | benchmark | su2-tail
    subcommand: Option<String>,
    /// Flat `key = value` file using the flag names as keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// one | two | string:N
    #[arg(long)]
    geometry: Option<String>,
    /// Symmetric cutoff `N` or an irrep list such as `1,3,3bar`.
    #[arg(long)]
    trunc: Option<String>,
    /// Coupling, comma list, or `start:stop:step`.
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    tmax: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    /// Trotter order, 1 or 2.
    #[arg(long)]
    order: Option<String>,
    /// Named splitting: global8, color3, color6, twoplaq3, electric-magnetic.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    /// global | local | color-parity
    #[arg(long)]
    mode: Option<String>,
    /// mass_gap | mass_gap_c_even | plaquette_vev | electric_energy@T
    #[arg(long)]
    observable: Option<String>,
    /// `a..b` or a comma list.
    #[arg(long)]
    lambdas: Option<String>,
    #[arg(long)]
    j_max: Option<String>,
    /// vertices | plaquette | fit
    #[arg(long)]
    kind: Option<String>,
    /// qudit | pq
    #[arg(long)]
    encoding: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    /// Global cutoff on the summed link Casimir, e.g. `25/3`.
    #[arg(long)]
    casimir_max: Option<String>,
}

impl Cli {
    fn overrides(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("subcommand", &self.subcommand),
            ("geometry", &self.geometry),
            ("trunc", &self.trunc),
            ("g", &self.g),
            ("tmax", &self.tmax),
            ("dt", &self.dt),
            ("order", &self.order),
            ("scheme", &self.scheme),
            ("steps", &self.steps),
            ("mode", &self.mode),
            ("observable", &self.observable),
            ("lambdas", &self.lambdas),
            ("j_max", &self.j_max),
            ("kind", &self.kind),
            ("encoding", &self.encoding),
            ("out", &self.out),
            ("format", &self.format),
            ("threads", &self.threads),
            ("casimir_max", &self.casimir_max),
        ]
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] su3_lgt::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
    #[error("cannot start thread pool: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(su3_lgt::Error::Tolerance(_)) => 3,
            _ => 2,
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut settings = Settings::defaults();
    if let Some(path) = &cli.config {
        settings.merge_file(path)?;
    }
    for (key, value) in cli.overrides() {
        if let Some(v) = value {
            settings.set(key, v)?;
        }
    }
    let cfg = RunConfig::from_settings(&settings)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let report = commands::run(&cfg)?;
    let mut sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    report.write(cfg.subcommand.name(), cfg.format, &mut sink)?;
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("su3lgt: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
