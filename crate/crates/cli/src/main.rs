use std::path::PathBuf;
use std::process::ExitCode;

use algoselect::experiment::synth::{self, BUNDLED_SEED, TABLE_SHAPES};
use algoselect::experiment::tables::{emit_tables, render_tables, Destination};
use algoselect::experiment::{parse_config, run_experiment_grid, ConfigError, GridError};
use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

#[derive(Parser)]
#[command(name = "algoselect", version, about = "Train, score and rank 13 binary classifiers per dataset")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the model grid over one or more CSV files.
    Run(RunArgs),
    /// Write the seeded synthetic clones of the benchmark tables.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    /// CSV file; repeat for several datasets.
    #[arg(long)]
    data: Vec<String>,
    /// Class column; one per --data, or a single one for all.
    #[arg(long)]
    target: Vec<String>,
    /// Flat key=value config file. Flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Training fraction in (0, 1).
    #[arg(long)]
    split: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Criterion weights: accuracy,precision,recall,f,aic.
    #[arg(long)]
    weights: Option<String>,
    /// eager, lazy, hybrid or all.
    #[arg(long)]
    category: Option<String>,
    /// JSON report path.
    #[arg(long)]
    report: Option<String>,
    /// Text tables path; printed to stdout when absent.
    #[arg(long)]
    tables: Option<String>,
    /// Directory for per-model ROC CSVs.
    #[arg(long)]
    roc_dir: Option<String>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    threads: Option<String>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value = "data")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = BUNDLED_SEED)]
    seed: u64,
    /// Cap on rows per clone.
    #[arg(long)]
    max_rows: Option<usize>,
    /// Only this clone; repeatable.
    #[arg(long)]
    only: Vec<String>,
}

impl RunArgs {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        pairs.extend(self.data.iter().map(|d| ("data".to_string(), d.clone())));
        pairs.extend(self.target.iter().map(|t| ("target".to_string(), t.clone())));
        let scalars = [
            ("split_ratio", &self.split),
            ("seed", &self.seed),
            ("weights", &self.weights),
            ("category", &self.category),
            ("report", &self.report),
            ("tables", &self.tables),
            ("roc_dir", &self.roc_dir),
            ("threads", &self.threads),
        ];
        for (key, value) in scalars {
            if let Some(v) = value {
                pairs.push((key.to_string(), v.clone()));
            }
        }
        pairs
    }
}

enum Failure {
    Config(ConfigError),
    Fatal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Fatal(e)
    }
}

fn run(args: &RunArgs) -> Result<(), Failure> {
    let config = parse_config(args.config.as_deref(), &args.overrides()).map_err(Failure::Config)?;
    config.require_datasets().map_err(Failure::Config)?;
    let report = match run_experiment_grid(&config) {
        Ok(r) => r,
        Err(GridError::Config(e)) => return Err(Failure::Config(e)),
        Err(e) => return Err(Failure::Fatal(e.into())),
    };
    info!("grid finished in {:.2?}", report.wall_time);

    let dest = Destination {
        tables: config.tables_path.clone(),
        report: config.report_path.clone(),
        roc_dir: config.roc_dir.clone(),
    };
    for path in emit_tables(&report, &dest).context("writing outputs")? {
        info!("wrote {}", path.display());
    }
    if dest.tables.is_none() {
        print!("{}", render_tables(&report));
    }

    let failures: Vec<_> = report.failures().collect();
    for (name, error) in &failures {
        warn!("{name} failed: {error}");
    }
    if failures.len() == report.datasets.len() {
        return Err(Failure::Fatal(anyhow::anyhow!("every dataset failed")));
    }
    Ok(())
}

fn synth_cmd(args: &SynthArgs) -> anyhow::Result<()> {
    for name in &args.only {
        if synth::shape_by_name(name).is_none() {
            let known: Vec<&str> = TABLE_SHAPES.iter().map(|s| s.name).collect();
            bail!("unknown clone {name:?}; known: {}", known.join(", "));
        }
    }
    for shape in &TABLE_SHAPES {
        if !args.only.is_empty() && !args.only.iter().any(|n| n == shape.name) {
            continue;
        }
        let path = synth::write_clone(shape, args.seed, args.max_rows, &args.out_dir)
            .with_context(|| format!("writing {}", shape.name))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => run(args),
        Command::Synth(args) => synth_cmd(args).map_err(Failure::Fatal),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Fatal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
