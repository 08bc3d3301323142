//! The three value-of-information quantities on a small hand-built state:
//! probing a new point, forgetting a stale contradicting one, and recalling
//! a cached point once its context is back in the buffer.
//!
//! ```bash
//! cargo run -p voi-learn --example value_of_information
//! ```

use voi_learn::engine::{self, compute_vof, compute_vop, compute_vor};
use voi_learn::{fit_ep, EngineConfig, EpOptions, Label, LabeledPoint, LearnerState, ProbeCosts, RiskMatrix, Vector};

fn x(x1: f64, x2: f64) -> Vector {
    Vector::from_vec(vec![x1, x2, 1.0])
}

fn main() -> voi_learn::Result<()> {
    let config = EngineConfig {
        s_buffer: 5,
        k_horiz: 10.0,
        risk: RiskMatrix::symmetric(1.0)?,
        probe_costs: ProbeCosts::flat(1.0)?,
    };

    // VOP on an empty learner: an unseen point is worth labeling
    let fresh = x(1.0, 0.0);
    let empty = LearnerState::new(3)?.observe(fresh.clone(), config.s_buffer)?;
    println!(
        "VOP of a first point:          {:+.4}",
        compute_vop(&empty, &fresh, &config)?
    );

    // point 4 is a positive left over from an earlier context; the buffer
    // now holds negatives right next to it
    let active = vec![
        LabeledPoint::new(0, x(0.0, 2.0), Label::Positive),
        LabeledPoint::new(1, x(0.2, 1.8), Label::Positive),
        LabeledPoint::new(2, x(2.0, -1.2), Label::Negative),
        LabeledPoint::new(3, x(-2.0, -1.0), Label::Negative),
        LabeledPoint::new(4, x(1.9, -0.8), Label::Positive),
    ];
    let post = fit_ep(&active, 3, &EpOptions::default())?.posterior;
    let mut state = LearnerState::from_posterior(post, [])?;
    for b in [x(2.1, -1.0), x(1.9, -0.9), x(2.0, -1.1)] {
        state = state.observe(b, config.s_buffer)?;
    }
    for id in [0, 4] {
        println!(
            "VOF of point {id}:                {:+.4}",
            compute_vof(&state, id, &config)?
        );
    }

    // run the engine's forget cycle on the next observation
    let next = x(2.0, -0.95);
    let mut oracle = |_: u64, _: &Vector| Some(Label::Negative);
    let (state, d) = engine::step(&state, &next, &mut oracle, &config)?;
    println!("step {}: probed {:?}, cached {:?}", d.step, d.probed, d.cached_ids);

    println!("cache after the step: {:?}", state.cache().keys().collect::<Vec<_>>());

    // a positive from another context sits in the cache; the buffer refills
    // with points around it
    let keep = vec![
        LabeledPoint::new(0, x(0.0, 2.0), Label::Positive),
        LabeledPoint::new(1, x(0.2, 1.8), Label::Positive),
        LabeledPoint::new(2, x(-2.0, -1.0), Label::Negative),
    ];
    let cached = LabeledPoint::new(3, x(2.0, 1.0), Label::Positive);
    let post = fit_ep(&keep, 3, &EpOptions::default())?.posterior;
    let mut state = LearnerState::from_posterior(post, [cached])?;
    for b in [x(2.0, 1.1), x(1.8, 0.9), x(2.2, 1.0)] {
        state = state.observe(b, config.s_buffer)?;
    }
    println!(
        "VOR of cached point 3:         {:+.4}",
        compute_vor(&state, 3, &config)?
    );
    Ok(())
}
