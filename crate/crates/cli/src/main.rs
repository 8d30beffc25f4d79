use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread::available_parallelism;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use sparesim::forecasting::Method;
use sparesim::pipeline::{self, RunOptions};
use sparesim::SimConfig;

#[derive(Debug, Parser)]
#[command(name = "sparesim", version, about = "Spare-parts demand, forecasting and inventory cost simulation")]
struct Cli {
    /// Print the default configuration as TOML and exit.
    #[arg(long)]
    print_defaults: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate demand for every scenario.
    Generate(Common),
    /// Fit forecasting models on the training window of each scenario.
    Forecast {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        models: ModelArgs,
    },
    /// Simulate inventory and score forecasts for every scenario.
    Simulate(Common),
    /// Summaries, regressions and plot data from metrics.csv and kpi.csv.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Metrics table; defaults to <out>/metrics.csv.
        #[arg(long)]
        metrics: Option<PathBuf>,
        /// KPI table; defaults to <out>/kpi.csv.
        #[arg(long)]
        kpi: Option<PathBuf>,
    },
    /// generate, forecast, simulate and analyze in sequence.
    RunAll {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        models: ModelArgs,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration. Later stages default to <out>/config.toml.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the master seed of the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for scenario fan-out [default: available cores].
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Comma-separated native models (croston, sba, tsb, ses, seasonal_naive).
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<String>>,
    /// External forecast CSV, or a directory of <scenario_id>.csv files.
    #[arg(long)]
    external: Option<PathBuf>,
}

impl Common {
    fn load(&self, fallback_to_run: bool) -> Result<SimConfig> {
        let run_copy = self.out.join(pipeline::CONFIG_FILE);
        let path = match &self.config {
            Some(p) => Some(p.clone()),
            None if fallback_to_run && run_copy.exists() => Some(run_copy),
            None => None,
        };
        let mut config = match path {
            Some(p) => SimConfig::load(&p)?,
            None => SimConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        config.validate()?;
        Ok(config)
    }

    fn jobs(&self) -> usize {
        self.jobs
            .unwrap_or_else(|| available_parallelism().map(|n| n.get()).unwrap_or(1))
    }
}

impl ModelArgs {
    fn apply(&self, config: &mut SimConfig) -> Result<()> {
        if let Some(names) = &self.models {
            config.forecast.models = names
                .iter()
                .map(|n| n.trim().parse::<Method>())
                .collect::<Result<_, _>>()?;
        }
        Ok(())
    }
}

fn print_summary(out: &Path, summary: &sparesim::analysis::Summary) {
    print!("{}", summary.to_text());
    println!("outputs in {}", out.display());
}

fn run(cli: Cli) -> Result<()> {
    if cli.print_defaults {
        print!("{}", SimConfig::default().to_toml()?);
        return Ok(());
    }
    let Some(command) = cli.command else {
        anyhow::bail!("no subcommand given; see --help");
    };
    match command {
        Command::Generate(c) => {
            let config = c.load(false)?;
            let manifest = pipeline::cmd_generate(&config, &c.out, c.jobs()).context("generate failed")?;
            println!("generated {} scenario(s) in {}", manifest.scenarios.len(), c.out.display());
        }
        Command::Forecast { common, models } => {
            let mut config = common.load(true)?;
            models.apply(&mut config)?;
            pipeline::cmd_forecast(
                &config,
                &common.out,
                &config.forecast.models,
                models.external.as_deref(),
                common.jobs(),
            )
            .context("forecast failed")?;
            println!("forecasts written under {}", common.out.display());
        }
        Command::Simulate(c) => {
            let config = c.load(true)?;
            pipeline::cmd_simulate(&config, &c.out, c.jobs()).context("simulate failed")?;
            println!("metrics.csv and kpi.csv written to {}", c.out.display());
        }
        Command::Analyze { common, metrics, kpi } => {
            let config = common.load(true)?;
            let (summary, _) = if metrics.is_none() && kpi.is_none() && common.out.join(pipeline::MANIFEST_FILE).exists() {
                pipeline::cmd_analyze_run(&config, &common.out)
            } else {
                let metrics = metrics.unwrap_or_else(|| common.out.join(sparesim::io::METRICS_FILE));
                let kpi = kpi.unwrap_or_else(|| common.out.join(sparesim::io::KPI_FILE));
                pipeline::cmd_analyze(&config, &metrics, &kpi, &common.out.join(pipeline::ANALYSIS_DIR))
            }
            .context("analyze failed")?;
            print_summary(&common.out.join(pipeline::ANALYSIS_DIR), &summary);
        }
        Command::RunAll { common, models } => {
            let mut config = common.load(false)?;
            models.apply(&mut config)?;
            let opts = RunOptions {
                jobs: common.jobs(),
                external: models.external.as_deref(),
            };
            let (summary, _) = pipeline::cmd_run_all(&config, &common.out, &opts).context("run-all failed")?;
            print_summary(&common.out, &summary);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
