//! Replays the drifting cluster stream through the full engine and prints
//! every probe, cache and recall decision with its value of information.
//!
//! ```bash
//! cargo run -p voi-learn --example cluster_replay -- [seed] [config.toml]
//! ```

use voi_learn::engine::{self, LearnerState};
use voi_learn::harness::Dataset;
use voi_learn::stream::augment_bias;
use voi_learn::{ExperimentConfig, Vector};

fn main() -> voi_learn::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let config = match args.next() {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let stream = Dataset::Cluster.load(&config, seed)?;
    let engine_cfg = config.engine_config(stream.len());

    let mut state = LearnerState::new(3)?;
    for point in &stream {
        let x = augment_bias(&point.features);
        let truth = point.true_label;
        let predicted = state.posterior().classify(&x)?;
        let mut oracle = |_: u64, _: &Vector| Some(truth);
        let (next, d) = engine::step(&state, &x, &mut oracle, &engine_cfg)?;

        let mark = if predicted == truth { ' ' } else { 'x' };
        print!(
            "{:>3} c{} {:>2} {mark} p={:.3} vop={:+.3}",
            point.index,
            point.cluster.map_or(0, |c| c + 1),
            truth,
            state.posterior().predictive_prob(&x)?,
            d.vop.unwrap_or(f64::NAN),
        );
        if d.probed.is_some() {
            print!("  PROBE");
        }
        let positive: Vec<String> = d
            .vof
            .iter()
            .filter(|(_, v)| *v > 0.0)
            .map(|(id, v)| format!("{id}:{v:+.3}"))
            .collect();
        if !d.cached_ids.is_empty() {
            print!("  cache {:?} (vof {})", d.cached_ids, positive.join(" "));
        }
        if !d.recalled_ids.is_empty() {
            print!("  recall {:?}", d.recalled_ids);
        }
        println!("  |L|={} |C|={}", next.active().len(), next.cache().len());
        state = next;
    }
    Ok(())
}
