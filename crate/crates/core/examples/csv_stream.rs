//! Streams from CSV files.
//!
//! `export` writes a generated cluster stream in the CSV stream format;
//! `replay` runs every policy over a CSV file and prints the comparison.
//!
//! ```bash
//! cargo run -p voi-learn --example csv_stream -- export stream.csv 42 120
//! cargo run -p voi-learn --example csv_stream -- replay stream.csv configs/asymmetric.toml
//! ```

use voi_learn::harness::{format_table, run_experiment, Dataset};
use voi_learn::stream::{generate_cluster_stream, to_csv};
use voi_learn::{ClusterStreamConfig, Error, ExperimentConfig, PolicyKind};

fn main() -> voi_learn::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.first().map(String::as_str) {
        Some("export") if args.len() >= 2 => {
            let seed = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0);
            let total_points = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(100);
            let cfg = ClusterStreamConfig {
                seed,
                total_points,
                ..ClusterStreamConfig::default()
            };
            let points = generate_cluster_stream(&cfg)?;
            std::fs::write(&args[1], to_csv(&points))?;
            println!("wrote {} points to {}", points.len(), args[1]);
            Ok(())
        }
        Some("replay") if args.len() >= 2 => {
            let config = match args.get(2) {
                Some(path) => ExperimentConfig::load(path)?,
                None => ExperimentConfig::asymmetric(),
            };
            let stream = Dataset::Csv(args[1].clone().into()).load(&config, 0)?;
            let summaries = PolicyKind::ALL
                .into_iter()
                .map(|policy| run_experiment(&stream, policy, &config, 0).map(|(s, _)| s))
                .collect::<voi_learn::Result<Vec<_>>>()?;
            print!("{}", format_table(&summaries));
            Ok(())
        }
        _ => Err(Error::InvalidConfig(
            "usage: csv_stream export PATH [seed] [points] | replay PATH [config.toml]".into(),
        )),
    }
}
