use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use voi_learn::harness::{self, Dataset};
use voi_learn::{ExperimentConfig, PolicyKind, Result};

#[derive(Parser)]
#[command(name = "voi", about = "Value-of-information active learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one policy over one stream.
    Run {
        #[arg(long)]
        policy: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run several policies over the same stream and print the comparison table.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "voi_full,vop_only,random,uncertain")]
        policies: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// `cluster` or `csv:PATH`.
    #[arg(long, default_value = "cluster")]
    dataset: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let (policies, common, nested) = match cli.command {
        Command::Run { policy, common } => (vec![policy], common, false),
        Command::Sweep { policies, common } => (policies, common, true),
    };
    let policies = policies
        .iter()
        .map(|p| p.trim().parse::<PolicyKind>())
        .collect::<Result<Vec<_>>>()?;
    let config = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let dataset: Dataset = common.dataset.parse()?;
    let stream = dataset.load(&config, common.seed)?;

    std::fs::create_dir_all(&common.out)?;
    let mut summaries = Vec::new();
    for policy in policies {
        let (summary, records) = harness::run_experiment(&stream, policy, &config, common.seed)?;
        if nested {
            let dir = common.out.join(policy.name());
            std::fs::create_dir_all(&dir)?;
            harness::write_steps(&records, dir.join("steps.csv"))?;
            harness::append_summary(&summary, common.out.join("summary.csv"))?;
        } else {
            harness::emit_outputs(&summary, &records, &common.out)?;
        }
        summaries.push(summary);
    }
    print!("{}", harness::format_table(&summaries));
    Ok(())
}
