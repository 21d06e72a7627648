//! `hwig`: run heralded photon-subtraction and photon-addition scenarios and
//! export reduced Wigner functions.
//!
//! Exit codes: 0 ok, 1 other failure, 2 config error, 3 herald impossible,
//! 4 numerical verification failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;
mod pipeline;
mod sweep;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Config, Format};
use pipeline::{evaluate, CliError};

#[derive(Parser, Debug)]
#[command(name = "hwig", version, about = "Heralded photon subtraction/addition on multimode Wigner functionals")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// Output directory (overrides [output] dir).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Grid axis for both quadratures, `qmin:qmax:n` (overrides [grid]).
    #[arg(long, global = true, value_name = "QMIN:QMAX:N", allow_hyphen_values = true)]
    grid: Option<String>,
    /// Mode-embedding seed (overrides [scenario] seed).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Grid file format (overrides [output] format).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Also fail (exit 4) when the grid quadrature misses 1 by more than 1e-3.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the scenario described by a config file.
    Run { config: PathBuf },
    /// Run a built-in scenario: fig3 (photon-added coherent), fig4
    /// (photon-added thermal, tau = 5) or sv-subtract (photon-subtracted
    /// squeezed vacuum).
    Preset {
        name: String,
        /// Print the preset as a config file instead of running it.
        #[arg(long)]
        print_config: bool,
    },
    /// Evaluate the [sweep] parameter list of a config file.
    Sweep { config: PathBuf },
}

fn load(path: &Path) -> Result<Config, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Config::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn apply_overrides(cfg: &mut Config, g: &GlobalOpts) -> Result<(), CliError> {
    if let Some(dir) = &g.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(grid) = &g.grid {
        cfg.apply_grid_override(grid)?;
    }
    if let Some(seed) = g.seed {
        cfg.scenario.seed = seed;
    }
    if let Some(f) = g.format {
        cfg.output.format = f;
    }
    Ok(())
}

fn write(path: PathBuf, text: &str) -> Result<(), CliError> {
    fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run(cfg: &Config, strict: bool) -> Result<(), CliError> {
    let ev = evaluate(&cfg.scenario, &cfg.grid)?;
    let dir = &cfg.output.dir;
    fs::create_dir_all(dir)?;
    let name = &cfg.output.name;
    for (m, sec) in ev.sections.iter().enumerate() {
        let stem = if m == 0 { name.clone() } else { format!("{name}_s{m}") };
        match cfg.output.format {
            Format::Csv => write(dir.join(format!("{stem}.csv")), &output::grid_csv(sec))?,
            Format::Pgm => write(
                dir.join(format!("{stem}.pgm")),
                &output::grid_pgm(sec).expect("sections are 2D"),
            )?,
        }
    }
    if ev.grid.dims() == 4 && cfg.grid.full4d {
        write(dir.join(format!("{name}_4d.csv")), &output::grid_csv(&ev.grid))?;
    }
    write(dir.join(format!("{name}_summary.txt")), &output::summary(cfg, &ev))?;
    ev.verify(strict)
}

fn sweep(cfg: &Config) -> Result<(), CliError> {
    let sw = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("config has no [sweep] table".into()))?;
    if sw.values.is_empty() || sw.values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Config("[sweep] values must be a non-empty list of finite numbers".into()));
    }
    let points = sweep::run_sweep(cfg, sw);
    fs::create_dir_all(&cfg.output.dir)?;
    write(
        cfg.output.dir.join(format!("{}_sweep.csv", cfg.output.name)),
        &sweep::sweep_csv(sw, &points),
    )?;
    let failed = points.iter().filter(|p| p.result.is_err()).count();
    if failed > 0 {
        eprintln!("{failed} of {} sweep points failed (recorded in the table)", points.len());
    }
    Ok(())
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config } => {
            let mut cfg = load(&config)?;
            apply_overrides(&mut cfg, &cli.global)?;
            run(&cfg, cli.global.strict)
        }
        Command::Preset { name, print_config } => {
            let mut cfg = Config::preset(&name).ok_or_else(|| {
                CliError::Config(format!("unknown preset {name:?} (expected one of {:?})", Config::PRESETS))
            })?;
            apply_overrides(&mut cfg, &cli.global)?;
            if print_config {
                print!("{}", cfg.to_toml());
                return Ok(());
            }
            run(&cfg, cli.global.strict)
        }
        Command::Sweep { config } => {
            let mut cfg = load(&config)?;
            apply_overrides(&mut cfg, &cli.global)?;
            sweep(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hwig: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
