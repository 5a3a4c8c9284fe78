use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vfm_cli::catalog::{list_catalog, render_text};
use vfm_cli::{emit_plotdata, run_scenario, CliError, ExperimentConfig, PlotKind, RunOptions, Scenario};

#[derive(Parser)]
#[command(name = "vfm", version, about = "Audits for maximal averages along vector fields")]
struct Cli {
    /// Experiment config (JSON); its scenario must match the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random draw; overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the sublevel decay constant over a grid of points and scales.
    AuditDecay,
    /// Check the doubling inequality between scales ε and 2ε.
    Doubling,
    /// Solve the τ-balancing equation.
    Balance,
    /// Audit the split of the averaged kernel.
    KernelSplit,
    /// Dyadic-annulus decomposition, reconstruction and Plancherel.
    Lp,
    /// Evaluate a maximal operator on a grid function.
    Maximal,
    /// Weak-type (1,1) ratio of the density-restricted maximal operator.
    WeakType,
    /// Covering certificates for random admissible families.
    Covering,
    /// Weighted sum over scales of band energies.
    ScaleSum,
    /// List the field catalog.
    Catalog,
    /// Flatten a result file into plot-ready CSV.
    Plotdata {
        /// Result JSON written by a scenario.
        #[arg(long)]
        input: PathBuf,
        /// Layout; inferred from the schema tag when omitted.
        #[arg(long, value_enum)]
        kind: Option<PlotKind>,
    },
}

impl Command {
    fn scenario_name(&self) -> Option<&'static str> {
        Some(match self {
            Command::AuditDecay => "audit-decay",
            Command::Doubling => "doubling",
            Command::Balance => "balance",
            Command::KernelSplit => "kernel-split",
            Command::Lp => "lp",
            Command::Maximal => "maximal",
            Command::WeakType => "weak-type",
            Command::Covering => "covering",
            Command::ScaleSum => "scale-sum",
            Command::Catalog | Command::Plotdata { .. } => return None,
        })
    }
}

fn load_config(cli: &Cli, name: &str) -> Result<ExperimentConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => {
            let config = ExperimentConfig::from_path(path)?;
            if config.scenario.name() != name {
                return Err(CliError::Usage(format!(
                    "config describes scenario `{}` but subcommand is `{name}`",
                    config.scenario.name()
                )));
            }
            config
        }
        None => ExperimentConfig::new(Scenario::default_for(name).expect("subcommand names a scenario"), 0),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    if let Some(name) = cli.command.scenario_name() {
        let config = load_config(cli, name)?;
        let out_dir = cli
            .out
            .clone()
            .or_else(|| config.output_dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out").join(name));
        let workers = cli.workers.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
        let manifest = run_scenario(&config, &RunOptions { out_dir: out_dir.clone(), workers })?;
        if cli.json {
            println!("{}", serde_json::to_string_pretty(&manifest).expect("manifest serializes"));
        } else {
            let status = if manifest.passed { "passed" } else { "FAILED" };
            println!("{name}: {status}, {} files in {}", manifest.files.len(), out_dir.display());
        }
        for f in &manifest.failures {
            eprintln!("assertion failed: {f}");
        }
        return Ok(manifest.passed);
    }
    match &cli.command {
        Command::Catalog => {
            let entries = list_catalog();
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&entries).expect("catalog serializes"));
            } else {
                print!("{}", render_text(&entries));
            }
        }
        Command::Plotdata { input, kind } => {
            let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let path = emit_plotdata(input, *kind, &out_dir)?;
            println!("{}", path.display());
        }
        _ => unreachable!("scenario subcommands handled above"),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
