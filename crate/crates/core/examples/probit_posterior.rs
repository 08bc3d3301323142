//! Bayesian probit classification on a handful of labeled points: online
//! assumed-density filtering, a batch expectation-propagation fit, and the
//! leave-one-out cavity obtained by removing one site.
//!
//! ```bash
//! cargo run -p voi-learn --example probit_posterior
//! ```

use voi_learn::gaussian::probit_moments;
use voi_learn::{fit_ep, EpOptions, Label, LabeledPoint, Posterior, Vector};

fn show(name: &str, post: &Posterior, probes: &[Vector]) -> voi_learn::Result<()> {
    let mean: Vec<String> = post.mean().iter().map(|m| format!("{m:+.3}")).collect();
    let probs: Vec<String> = probes
        .iter()
        .map(|x| post.predictive_prob(x).map(|p| format!("{p:.3}")))
        .collect::<voi_learn::Result<_>>()?;
    println!(
        "{name:<18} mean [{}]  var diag [{:.3} {:.3} {:.3}]  P(+1) [{}]",
        mean.join(" "),
        post.cov()[(0, 0)],
        post.cov()[(1, 1)],
        post.cov()[(2, 2)],
        probs.join(" ")
    );
    Ok(())
}

fn main() -> voi_learn::Result<()> {
    // one tilted update by hand: prior N(0, 1) on the margin, label +1
    let m = probit_moments(0.0, 1.0, Label::Positive)?;
    println!(
        "tilted N(0,1) with label +1: mean {:.4}, var {:.4}\n",
        m.matched_mean(0.0, 1.0),
        m.matched_var(1.0)
    );

    // features (x1, x2) with a trailing bias coordinate
    let point = |id, x1, x2, label| LabeledPoint::new(id, Vector::from_vec(vec![x1, x2, 1.0]), label);
    let points = [
        point(0, 0.0, 2.0, Label::Positive),
        point(1, 0.3, 1.7, Label::Positive),
        point(2, -2.0, -1.0, Label::Negative),
        point(3, 2.0, -1.0, Label::Negative),
        point(4, 1.8, -0.7, Label::Negative),
    ];
    let probes = [
        Vector::from_vec(vec![0.0, 1.5, 1.0]),
        Vector::from_vec(vec![0.0, 0.0, 1.0]),
        Vector::from_vec(vec![2.0, -1.0, 1.0]),
    ];

    let mut online = Posterior::prior(3)?;
    for p in &points {
        online = online.adf_update(p)?;
    }
    show("online (ADF)", &online, &probes)?;

    let fit = fit_ep(&points, 3, &EpOptions::default())?;
    println!("EP converged: {} after {} sweeps", fit.converged, fit.sweeps);
    show("batch (EP)", &fit.posterior, &probes)?;

    let (cavity, site) = fit.posterior.downdate_site(4)?;
    show("without point 4", &cavity, &probes)?;
    let restored = cavity.restore_site(site)?;
    show("restored", &restored, &probes)?;
    Ok(())
}
