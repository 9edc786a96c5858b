use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use phaseless::geometry::Family;
use phaseless::harness::{self, ExperimentConfig};

#[derive(Parser)]
#[command(name = "phaseless", version, about = "Phaseless far-field inverse scattering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config (JSON)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use the built-in preset for this family instead of a config file
    #[arg(long, conflicts_with = "config")]
    family: Option<Family>,
    /// Overrides the config seed
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, self.family) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(f)) => ExperimentConfig::preset(f),
            (None, None) => bail!("pass --config <path> or --family <disk|crack|kite>"),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write the noise-free data and observation file(s)
    Simulate(ConfigArgs),
    /// Run the sampler on an observation file
    Invert {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Observation CSV (its JSON sidecar must sit next to it)
        #[arg(long)]
        obs: PathBuf,
    },
    /// Summarize an existing chain CSV
    Stats {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        chain: PathBuf,
    },
    /// Reproduce a table or figure (table1..table6, figure7, figure8)
    Experiment {
        name: String,
        /// Multiplies burn-in, selected-state and replication counts
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print a preset config as JSON
    Preset { family: Family },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate(args) => {
            let cfg = args.load()?;
            for path in harness::cmd_simulate(&cfg, &args.out)? {
                println!("{}", path.display());
            }
        }
        Command::Invert { cfg: args, obs } => {
            let cfg = args.load()?;
            let summary = harness::cmd_invert(&cfg, &obs, &args.out)
                .with_context(|| format!("inverting {}", obs.display()))?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Stats { cfg: args, chain } => {
            let cfg = args.load()?;
            let summary = harness::cmd_stats(&cfg, &chain, &args.out)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Experiment { name, scale, jobs, seed, out } => {
            let table = harness::cmd_experiment(&name, scale, jobs, &out, seed)?;
            println!("{}", table.display());
        }
        Command::Preset { family } => {
            println!("{}", serde_json::to_string_pretty(&ExperimentConfig::preset(family))?);
        }
    }
    Ok(())
}
