//! Command-line front end for the three-spin transistor simulations.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical-tolerance
//! failure (the manifest records which check failed), 4 i/o error.

mod config;
mod output;
mod scenarios;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{validate_config, ScenarioConfig, UnitsMode, SCENARIO_NAMES};
use scenarios::RunError;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "transistor",
    about = "Three-spin quantum transistor simulations: transfer, blockade, and decoherence sweeps",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a configuration file.
    Simulate {
        /// Scenario name; must match the `scenario` field of the config.
        scenario: String,
        /// Path to the configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output_dir` from the config;
        /// default `out/<scenario>`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Frequency convention for config values (overrides `units_mode`).
        #[arg(long)]
        units: Option<String>,
        /// Override a config value, e.g. --override chain.delta=2e6.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Parse and validate a configuration file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the available scenarios.
    ListScenarios,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate {
            scenario,
            config,
            out,
            units,
            overrides,
        } => simulate(&scenario, &config, out, units.as_deref(), &overrides),
        Command::Validate { config } => validate(&config),
        Command::ListScenarios => {
            list_scenarios();
            ExitCode::SUCCESS
        }
    }
}

fn parse_units_flag(units: Option<&str>) -> Result<Option<UnitsMode>, String> {
    match units {
        None => Ok(None),
        Some(s) => UnitsMode::parse(s)
            .map(Some)
            .ok_or_else(|| format!("--units must be `angular` or `cyclic`, got `{s}`")),
    }
}

fn load_config(
    path: &PathBuf,
    overrides: &[String],
    units: Option<UnitsMode>,
) -> Result<config::ExperimentConfig, ExitCode> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(ExitCode::from(EXIT_IO));
        }
    };
    match validate_config(&text, overrides, units) {
        Ok(cfg) => Ok(cfg),
        Err(issues) => {
            eprintln!(
                "error: {} configuration problem(s) in {}:",
                issues.len(),
                path.display()
            );
            for issue in issues {
                eprintln!("  - {issue}");
            }
            Err(ExitCode::from(EXIT_CONFIG))
        }
    }
}

fn simulate(
    scenario: &str,
    config_path: &PathBuf,
    out: Option<PathBuf>,
    units: Option<&str>,
    overrides: &[String],
) -> ExitCode {
    let units = match parse_units_flag(units) {
        Ok(u) => u,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let cfg = match load_config(config_path, overrides, units) {
        Ok(cfg) => cfg,
        Err(code) => return code,
    };
    if cfg.scenario_name != scenario {
        eprintln!(
            "error: requested scenario `{scenario}` but {} declares `{}`",
            config_path.display(),
            cfg.scenario_name
        );
        return ExitCode::from(EXIT_CONFIG);
    }

    let out_dir = out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.scenario_name));

    match scenarios::run(&cfg, &out_dir) {
        Ok(manifest) => {
            if manifest.status_ok {
                println!(
                    "{}: {} file(s) written to {} in {:.3}s",
                    cfg.scenario_name,
                    manifest.outputs.len(),
                    out_dir.display(),
                    manifest.duration_s
                );
                ExitCode::SUCCESS
            } else {
                eprintln!(
                    "error: tolerance failure in {} (see {}): {}",
                    cfg.scenario_name,
                    out_dir.join("manifest.txt").display(),
                    manifest.failures.join(", ")
                );
                ExitCode::from(EXIT_NUMERICAL)
            }
        }
        Err(RunError::Io { path, source }) => {
            eprintln!("error: i/o failure on {}: {source}", path.display());
            ExitCode::from(EXIT_IO)
        }
        Err(RunError::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}

fn validate(config_path: &PathBuf) -> ExitCode {
    let cfg = match load_config(config_path, &[], None) {
        Ok(cfg) => cfg,
        Err(code) => return code,
    };
    println!(
        "{} is valid: scenario `{}`",
        config_path.display(),
        cfg.scenario_name
    );
    match &cfg.scenario {
        ScenarioConfig::ClosedGate { ratios, grid } => {
            println!(
                "  ratios {:?}, {} points on delta*t in [{}, {}]",
                ratios,
                grid.n_points,
                grid.t_start,
                grid.t_end.unwrap_or(20.0)
            );
        }
        ScenarioConfig::OpenGate { params, grid } => {
            println!(
                "  J = {} rad/s, delta = {} rad/s, {} points",
                params.coupling_j(),
                params.delta(),
                grid.n_points
            );
        }
        ScenarioConfig::Sweep {
            solver,
            kind,
            params,
            rates,
            grid,
            ..
        } => {
            println!(
                "  {} {:?} sweep: J = {} rad/s, delta = {} rad/s, rates {:?}, {} points",
                solver.name(),
                kind,
                params.coupling_j(),
                params.delta(),
                rates,
                grid.n_points
            );
        }
    }
    ExitCode::SUCCESS
}

fn list_scenarios() {
    println!("available scenarios:");
    let blurbs = [
        (
            "closed-gate",
            "exact vs expanded source survival under strong detuning (one CSV per J/delta ratio)",
        ),
        (
            "open-gate",
            "resonant source/gate/drain populations over one exchange period",
        ),
        (
            "lindblad-sweep",
            "transfer or blockade fidelity under per-site dephasing, swept over rates",
        ),
        (
            "milburn-sweep",
            "transfer or blockade fidelity under intrinsic decoherence, swept over rates",
        ),
        (
            "custom",
            "fully explicit fidelity run (requires delta, t_end, kind, and one rate family)",
        ),
    ];
    for (name, blurb) in blurbs {
        println!("  {name:<16} {blurb}");
    }
    debug_assert_eq!(blurbs.len(), SCENARIO_NAMES.len());
}
