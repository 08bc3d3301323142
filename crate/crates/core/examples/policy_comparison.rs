//! Head-to-head comparison of the four probing policies on the drifting
//! cluster stream, over a range of seeds.
//!
//! ```bash
//! cargo run -p voi-learn --example policy_comparison -- 20 [config.toml]
//! ```

use voi_learn::harness::{format_table, run_experiment, Dataset};
use voi_learn::{ExperimentConfig, PolicyKind, RunSummary};

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn main() -> voi_learn::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let config = match std::env::args().nth(2) {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };

    let mut per_policy: Vec<Vec<RunSummary>> = vec![Vec::new(); PolicyKind::ALL.len()];
    let mut voi_cheapest = 0;
    for seed in 0..seeds {
        let stream = Dataset::Cluster.load(&config, seed)?;
        let mut costs = Vec::new();
        for (i, policy) in PolicyKind::ALL.into_iter().enumerate() {
            let (summary, _) = run_experiment(&stream, policy, &config, seed)?;
            costs.push(summary.total_cost);
            per_policy[i].push(summary);
        }
        if costs[1..].iter().all(|&c| costs[0] <= c) {
            voi_cheapest += 1;
        }
        if seed == 0 {
            println!("seed 0");
            print!(
                "{}",
                format_table(&per_policy.iter().map(|r| r[0].clone()).collect::<Vec<_>>())
            );
            println!();
        }
    }

    println!("medians over {seeds} seeds");
    let medians: Vec<RunSummary> = PolicyKind::ALL
        .iter()
        .zip(&per_policy)
        .map(|(policy, runs)| RunSummary {
            policy: policy.name().to_string(),
            probes: median(runs.iter().map(|r| r.probes as f64).collect()) as usize,
            total_cost: median(runs.iter().map(|r| r.total_cost).collect()),
            accuracy: median(runs.iter().map(|r| r.accuracy).collect()),
            accuracy_undefined: false,
        })
        .collect();
    print!("{}", format_table(&medians));
    println!("\nvoi_full has the lowest final cost in {voi_cheapest} of {seeds} seeds");
    Ok(())
}
