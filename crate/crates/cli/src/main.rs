//! Batch front end for the variational regularization toolkit.
//!
//! Subcommands: `solve`, `figure1`, `crosscheck`, `converge`, `kl`.
//! Configuration comes from `--config PATH` or a shipped `--preset NAME`;
//! reports are written as CSV/JSON into `--out DIR` with fixed
//! 17-significant-digit decimals, so identical configs and seeds yield
//! byte-identical files. Exit codes: 0 all-pass, 1 config error,
//! 2 runtime/solver error, 3 property-assertion failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{EXIT_CONFIG, EXIT_OK};
use config::{ConvergeConfig, CrosscheckConfig, Figure1Config, KlConfig, SolveConfig};

#[derive(Parser)]
#[command(name = "varreg", version, about = "variational regularization toolkit")]
struct Cli {
    /// Path to a JSON config document.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Name of a shipped preset (for example `example24`, `hilbert2d`,
    /// `kl-counter`).
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output directory for report files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Seed override; also settable through VARREG_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one Tikhonov, Ivanov or Morozov problem.
    Solve {
        /// Override the configured problem kind.
        #[arg(long)]
        problem: Option<String>,
        /// Override the configured weight/level (alpha, tau or delta).
        #[arg(long)]
        parameter: Option<f64>,
    },
    /// Tabulate the worked example's curves (misfit, regularizer, weighted
    /// objectives) over an x grid.
    Figure1,
    /// Verify the minimizer cross-relations between the three problems.
    Crosscheck,
    /// Run the stability (r2) or convergence (r3) experiment.
    Converge,
    /// Kullback-Leibler tables: spike counterexample, entropy-to-norm
    /// inequality, divergence-implies-pairing probe.
    Kl,
}

/// Embedded presets, keyed by (command, name).
const PRESETS: &[(&str, &str, &str)] = &[
    ("solve", "example24", include_str!("../presets/solve_example24.json")),
    ("solve", "hilbert2d", include_str!("../presets/solve_hilbert2d.json")),
    ("crosscheck", "example24", include_str!("../presets/crosscheck_example24.json")),
    ("crosscheck", "hilbert2d", include_str!("../presets/crosscheck_hilbert2d.json")),
    ("converge", "r2-hilbert", include_str!("../presets/converge_r2-hilbert.json")),
    ("converge", "r3-diag", include_str!("../presets/converge_r3-diag.json")),
    ("kl", "kl-counter", include_str!("../presets/kl_kl-counter.json")),
];

fn load_text(command: &str, cli: &Cli) -> Result<String, String> {
    match (&cli.config, &cli.preset) {
        (Some(_), Some(_)) => Err("give either --config or --preset, not both".into()),
        (Some(path), None) => std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display())),
        (None, Some(name)) => PRESETS
            .iter()
            .find(|(c, n, _)| *c == command && n == name)
            .map(|(_, _, text)| text.to_string())
            .ok_or_else(|| {
                let available: Vec<&str> = PRESETS
                    .iter()
                    .filter(|(c, _, _)| *c == command)
                    .map(|(_, n, _)| *n)
                    .collect();
                format!(
                    "unknown preset '{name}' for {command}; available: {}",
                    available.join(", ")
                )
            }),
        (None, None) => Err("need --config PATH or --preset NAME".into()),
    }
}

/// Seed precedence: explicit flag, then VARREG_SEED, then the config file.
fn seed_override(cli: &Cli) -> Result<Option<u64>, String> {
    if cli.seed.is_some() {
        return Ok(cli.seed);
    }
    match std::env::var("VARREG_SEED") {
        Ok(text) => text
            .parse::<u64>()
            .map(Some)
            .map_err(|_| format!("VARREG_SEED must be an unsigned integer, got '{text}'")),
        Err(_) => Ok(None),
    }
}

fn run() -> i32 {
    let cli = Cli::parse();
    let seed = match seed_override(&cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };

    match &cli.command {
        Command::Solve { problem, parameter } => {
            let text = match load_text("solve", &cli) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return EXIT_CONFIG;
                }
            };
            let mut cfg: SolveConfig = match config::parse(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return EXIT_CONFIG;
                }
            };
            if let Some(kind) = problem {
                cfg.problem = match kind.as_str() {
                    "tikhonov" => config::ProblemKind::Tikhonov,
                    "ivanov" => config::ProblemKind::Ivanov,
                    "morozov" => config::ProblemKind::Morozov,
                    other => {
                        eprintln!("config error: unknown problem kind '{other}'");
                        return EXIT_CONFIG;
                    }
                };
            }
            if let Some(p) = parameter {
                cfg.parameter = *p;
            }
            commands::cmd_solve(&cfg, &cli.out)
        }
        Command::Figure1 => {
            let cfg: Figure1Config = match (&cli.config, &cli.preset) {
                (None, None) => Figure1Config::default(),
                _ => match load_text("figure1", &cli).and_then(|t| config::parse(&t)) {
                    Ok(c) => c,
                    Err(e) => {
                        eprintln!("{e}");
                        return EXIT_CONFIG;
                    }
                },
            };
            commands::cmd_figure1(&cfg, &cli.out)
        }
        Command::Crosscheck => {
            let cfg: CrosscheckConfig = match load_text("crosscheck", &cli).and_then(|t| config::parse(&t)) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return EXIT_CONFIG;
                }
            };
            commands::cmd_crosscheck(&cfg, &cli.out)
        }
        Command::Converge => {
            let cfg: ConvergeConfig = match load_text("converge", &cli).and_then(|t| config::parse(&t)) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return EXIT_CONFIG;
                }
            };
            commands::cmd_converge(&cfg, &cli.out, seed)
        }
        Command::Kl => {
            let cfg: KlConfig = match load_text("kl", &cli).and_then(|t| config::parse(&t)) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return EXIT_CONFIG;
                }
            };
            commands::cmd_kl(&cfg, &cli.out, seed)
        }
    }
}

fn main() -> ExitCode {
    let code = run();
    if code == EXIT_OK {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(code as u8)
    }
}
