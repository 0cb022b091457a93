use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{execute, Outcome};
use crate::config::{Format, Kind, Scenario};
use crate::error::{CliError, Result};
use crate::table::write_table;

#[derive(Debug, Parser)]
#[command(name = "wqed", version, about = "Single-photon router simulator for a transmon in a waveguide")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Scenario file (TOML).
    #[arg(long, short)]
    pub config: PathBuf,
    /// Output path; overrides `output.path`. Without either the table goes
    /// to standard output.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<Format>,
    /// Worker threads for sweeps.
    #[arg(long, env = "WQED_THREADS")]
    pub threads: Option<usize>,
    /// Master seed for randomized studies; overrides `scenario.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transmittance versus probe power.
    ExtinctionSweep(Common),
    /// Probe transmission with a pump on the other transition.
    TwoTone(Common),
    /// Transmission versus control amplitude.
    EitSweep(Common),
    /// Normalized on/off ratios versus control amplitude.
    OnoffSweep(Common),
    /// Time trace of a pulsed router.
    RoutePulse(Common),
    /// Routing table of a cascade.
    Network(Common),
    /// Parameter extraction or a synthetic recovery study.
    Fit(Common),
    /// Emission spectrum.
    Spectrum(Common),
    /// Dispatch on `scenario.kind`.
    Run(Common),
    /// Print the normalized scenario.
    Normalize {
        #[arg(long, short)]
        config: PathBuf,
    },
}

impl Command {
    fn split(&self) -> (Option<Kind>, &Common) {
        match self {
            Command::ExtinctionSweep(c) => (Some(Kind::ExtinctionSweep), c),
            Command::TwoTone(c) => (Some(Kind::TwoTone), c),
            Command::EitSweep(c) => (Some(Kind::EitSweep), c),
            Command::OnoffSweep(c) => (Some(Kind::OnoffSweep), c),
            Command::RoutePulse(c) => (Some(Kind::RoutePulse), c),
            Command::Network(c) => (Some(Kind::Network), c),
            Command::Fit(c) => (Some(Kind::Fit), c),
            Command::Spectrum(c) => (Some(Kind::Spectrum), c),
            Command::Run(c) => (None, c),
            Command::Normalize { .. } => unreachable!("handled before dispatch"),
        }
    }
}

/// Runs one invocation, writing results to `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    if let Command::Normalize { config } = &cli.command {
        let text = Scenario::load(config)?.normalized().to_toml();
        return emit(stdout, text.as_bytes());
    }
    let (kind, common) = cli.command.split();
    let mut scenario = Scenario::load(&common.config)?;
    if let Some(seed) = common.seed {
        scenario.scenario.seed = Some(seed);
    }
    let kind = match (kind, scenario.scenario.kind) {
        (Some(k), Some(declared)) if k != declared => {
            return Err(CliError::config(format!("subcommand {k} does not match scenario.kind = \"{declared}\"")))
        }
        (Some(k), _) | (None, Some(k)) => k,
        (None, None) => return Err(CliError::config("missing key scenario.kind")),
    };
    let outcome = with_threads(common.threads, || execute(kind, &scenario))?;
    let format = common.format.or(scenario.output.format).unwrap_or_default();
    let path = common.out.clone().or_else(|| scenario.output.path.clone());
    write_outcome(&outcome, path.as_deref(), format, scenario.output.plot.unwrap_or(true), stdout)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(0) => Err(CliError::config("--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::config(format!("cannot start {n} worker threads: {e}")))?
            .install(f),
    }
}

fn emit(out: &mut dyn Write, bytes: &[u8]) -> Result<()> {
    out.write_all(bytes).map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
}

/// With a path the table is written there and the summary goes to `out`;
/// without one the table goes to `out` and the summary to standard error.
pub fn write_outcome(
    outcome: &Outcome,
    path: Option<&std::path::Path>,
    format: Format,
    plot: bool,
    out: &mut dyn Write,
) -> Result<()> {
    match path {
        Some(p) => {
            let written = write_table(&outcome.table, p, format, plot)?;
            let mut text = outcome.summary_text();
            for w in written {
                text.push_str(&format!("wrote={}\n", w.display()));
            }
            emit(out, text.as_bytes())
        }
        None => {
            let bytes = outcome.table.render(format)?;
            eprint!("{}", outcome.summary_text());
            emit(out, &bytes)
        }
    }
}
