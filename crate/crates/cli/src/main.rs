//! `tractlab`: reproducible experiments on tracts, growth and escaping sets
//! of transcendental entire functions.
//!
//! Every subcommand prints a JSON report on stdout. With an output directory
//! (`--out-dir`, `TRACTLAB_OUT_DIR` or `out_dir` in the config file) the
//! report and any CSV or raster files are also written there, named after
//! the subcommand. Exit status: 0 for a report or a passed check, 2 for a
//! failed check, 1 for errors.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::{Settings, OUT_DIR_ENV};
use output::Outcome;

#[derive(Parser)]
#[command(name = "tractlab", version, about = "Tract, growth and escaping-set experiments for entire functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate f at a point
    Eval(Settings),
    /// Profile of log log M(r)
    Maxmod(Settings),
    /// Order of growth from the slope of log log M against log r
    Order(Settings),
    /// Components of {|f| > R} on a polar grid
    Tracts(Settings),
    /// Angular measure θ(r) of one tract
    Theta(Settings),
    /// Angular measure ψ(r) of the part of a tract where |f| ≥ exp(r^β)
    Psi(Settings),
    /// Tsuji-type integral against log log M(r)
    Tsuji(Settings),
    /// log log M(r) − (N/2) log r for the tract count N
    Dca(Settings),
    /// Upper growth hypothesis log log M ≤ (N/2 + ε(r)) log r
    Hypothesis(Settings),
    /// Fixed point, Koenigs function Φ and ε = 1/Φ for E_β(x) = e^{βx}
    Schroeder(Settings),
    /// Harmonic-measure profile m(r) and its convexity in log r
    Mprofile(Settings),
    /// Logarithmic change of variable: orbit dump and expansion check
    Logvar(Settings),
    /// Density of points that keep escaping, per iteration level
    Escape(Settings),
    /// Escape densities across grid resolutions
    Refine(Settings),
}

impl Command {
    fn split(self) -> (&'static str, Settings, fn(Settings) -> Result<Outcome>) {
        match self {
            Command::Eval(s) => ("eval", s, commands::eval),
            Command::Maxmod(s) => ("maxmod", s, commands::maxmod),
            Command::Order(s) => ("order", s, commands::order),
            Command::Tracts(s) => ("tracts", s, commands::tracts),
            Command::Theta(s) => ("theta", s, commands::theta),
            Command::Psi(s) => ("psi", s, commands::psi),
            Command::Tsuji(s) => ("tsuji", s, commands::tsuji),
            Command::Dca(s) => ("dca", s, commands::dca),
            Command::Hypothesis(s) => ("hypothesis", s, commands::hypothesis),
            Command::Schroeder(s) => ("schroeder", s, commands::schroeder),
            Command::Mprofile(s) => ("mprofile", s, commands::mprofile),
            Command::Logvar(s) => ("logvar", s, commands::logvar),
            Command::Escape(s) => ("escape", s, commands::escape),
            Command::Refine(s) => ("refine", s, commands::refine),
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let (name, settings, handler) = cli.command.split();
    let env_dir = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(Into::into);
    let settings = settings.resolve(env_dir)?;
    let out_dir = settings.out_dir.clone();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = settings.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("starting worker threads")?;
    let outcome = pool.install(|| handler(settings))?;
    if let Some(dir) = out_dir {
        output::save(&dir, name, &outcome)?;
    }
    print!("{}", outcome.json);
    Ok(outcome.status.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
