mod config;
mod error;
mod experiments;
mod output;
mod presets;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

use config::{Config, Layer};
use error::{CliError, CliResult};
use output::Output;
use presets::Preset;

const ABOUT: &str = "Arrival times of two-level atoms at a laser-illuminated half-plane.";

const EXIT_CODES: &str = "\
Settings are merged in order: built-in caesium defaults, --preset, --config,
then environment variables TOA_SIM_<SECTION>_<KEY> (e.g. TOA_SIM_PARAMS_GAMMA=2e8).
--config accepts the key = value format or a JSON sidecar written by a previous run.

Exit codes: 0 success, 2 config error, 3 numerical guard, 4 I/O error.";

#[derive(Debug, Parser)]
#[command(name = "toa-sim", version, about = ABOUT)]
struct Cli {
    /// Config file: `[section]` headers and `key = value` lines, or a JSON sidecar.
    #[arg(long, global = true, env = "TOA_SIM_CONFIG")]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = ".", env = "TOA_SIM_OUT")]
    out: PathBuf,

    /// Worker threads; 0 uses one per core. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0, env = "TOA_SIM_THREADS")]
    threads: usize,

    /// Named parameter set applied before the config file.
    #[arg(long, global = true, value_enum, env = "TOA_SIM_PRESET")]
    preset: Option<Preset>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Reflection probabilities |R1|², |R2|² against the transverse velocity.
    Eigen,
    /// First-photon distribution Π(t) by momentum quadrature.
    Toa,
    /// Π(t) from a split-step grid propagation.
    Oracle,
    /// Deconvolve Π(t) to the ideal distribution and compare with the flux.
    Deconv,
    /// The 1D model against a family of 2D runs.
    Compare,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Eigen => "eigen",
            Command::Toa => "toa",
            Command::Oracle => "oracle",
            Command::Deconv => "deconv",
            Command::Compare => "compare",
        }
    }
}

fn read_config(path: &Path) -> CliResult<Layer> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io("read", path, e))?;
    let origin = path.display().to_string();
    if text.trim_start().starts_with('{') {
        Layer::parse_json(&text, &origin)
    } else {
        Layer::parse_text(&text, &origin)
    }
}

fn resolve(cli: &Cli) -> CliResult<Config> {
    let mut c = Config::default();
    c.merge(presets::defaults());
    if let Some(p) = cli.preset {
        c.merge(presets::layer(p));
    }
    if let Some(path) = &cli.config {
        c.merge(read_config(path)?);
    }
    c.merge(Layer::from_env(std::env::vars())?);
    Ok(c)
}

fn execute(cli: Cli) -> CliResult<PathBuf> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::config(format!("cannot start {} threads: {e}", cli.threads)))?;
    }
    let config = resolve(&cli)?;
    let mut out = Output::new(&cli.out, cli.command.name())?;
    let diagnostics = match cli.command {
        Command::Eigen => experiments::eigen(&config, &mut out)?,
        Command::Toa => experiments::toa(&config, &mut out)?,
        Command::Oracle => experiments::oracle(&config, &mut out)?,
        Command::Deconv => experiments::deconv(&config, &mut out)?,
        Command::Compare => experiments::compare(&config, &mut out)?,
    };
    let preset = cli.preset.map(|p| format!("{p:?}").to_lowercase());
    out.finish(preset.as_deref(), config.to_json(), diagnostics)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let help = format!("{EXIT_CODES}\n\n{}", config::key_reference());
    let matches = Cli::command().after_long_help(help).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match execute(cli) {
        Ok(sidecar) => {
            log::info!("wrote {}", sidecar.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("toa-sim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
