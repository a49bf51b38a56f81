use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ris_aoi::config::{load_config, ScenarioConfig};
use ris_aoi::engine::Policy;
use ris_aoi::sweep::{run_single, run_sweep, to_csv, to_per_device_csv, ResultTable, SweepAxis};
use ris_aoi::validation;

#[derive(Parser)]
#[command(name = "ris-aoi", version, about = "AoI simulator for RIS-assisted uplink NOMA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo for one configuration
    Run(RunArgs),
    /// Monte Carlo along one configuration axis
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// l_elements, gamma_th_db or p_max_dbm
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated axis values; defaults depend on the axis
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Brute-force validation suites
    Oracle {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Print the effective configuration as TOML
    Config {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// TOML scenario file; missing keys take defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed; run r uses seed + r
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo runs per point
    #[arg(long)]
    runs: Option<usize>,
    /// Extra `key=value` overrides in TOML syntax, applied last
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Comma-separated policy names or phase:clustering:power triples
    #[arg(long, value_delimiter = ',')]
    policies: Vec<Policy>,
    /// Summary CSV; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-device CSV
    #[arg(long)]
    per_device: Option<PathBuf>,
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<ScenarioConfig> {
        let mut config = match &self.config {
            Some(path) => load_config(path).with_context(|| format!("reading {}", path.display()))?,
            None => ScenarioConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(runs) = self.runs {
            config.mc_runs = runs;
        }
        let config = config.with_overrides(&self.set)?;
        config.validate()?;
        Ok(config)
    }
}

impl RunArgs {
    fn policies(&self) -> Vec<Policy> {
        if self.policies.is_empty() {
            Policy::presets().map(|(_, p)| p).collect()
        } else {
            self.policies.clone()
        }
    }

    fn emit(&self, table: &ResultTable) -> Result<()> {
        let csv = to_csv(table);
        match &self.out {
            Some(path) => std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
            None => std::io::stdout().write_all(csv.as_bytes())?,
        }
        if let Some(path) = &self.per_device {
            std::fs::write(path, to_per_device_csv(table)).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}

fn default_values(axis: SweepAxis) -> Vec<f64> {
    match axis {
        SweepAxis::LElements => vec![8.0, 16.0, 32.0, 64.0],
        SweepAxis::GammaThDb => vec![30.0, 35.0, 40.0, 45.0, 50.0],
        SweepAxis::PMaxDbm => vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
    }
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(args) => {
            let config = args.scenario.resolve()?;
            let table = run_single(&config, &args.policies())?;
            args.emit(&table)?;
        }
        Command::Sweep { run, axis, values } => {
            let config = run.scenario.resolve()?;
            let values = if values.is_empty() { default_values(axis) } else { values };
            if values.iter().any(|v| !v.is_finite()) {
                bail!("sweep values must be finite");
            }
            let table = run_sweep(&config, axis, &values, &run.policies())?;
            run.emit(&table)?;
        }
        Command::Oracle { seed } => {
            let reports = validation::run_all(seed)?;
            for r in &reports {
                println!("{r}");
            }
            return Ok(reports.iter().all(|r| r.passed));
        }
        Command::Config { scenario } => print!("{}", scenario.resolve()?.to_toml_string()),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
