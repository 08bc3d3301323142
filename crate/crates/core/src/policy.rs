//! Probe rules compared against the full engine.
//!
//! All policies learn with the same classifier; they differ only in when they
//! buy a label. Only `voi_full` ever forgets or recalls.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::engine::{compute_vop, EngineConfig, LearnerState};
use crate::{Error, Posterior, Result, Vector};

/// Inclusive band of predictive probability the uncertainty rule probes in.
pub const UNCERTAINTY_BAND: (f64, f64) = (0.3, 0.7);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    /// Probe, forget and recall by value of information.
    VoiFull,
    /// Probe by value of information; never forget.
    VopOnly,
    /// Probe with a fixed probability.
    Random,
    /// Probe when the prediction is uncertain.
    Uncertain,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::VoiFull,
        PolicyKind::VopOnly,
        PolicyKind::Random,
        PolicyKind::Uncertain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::VoiFull => "voi_full",
            PolicyKind::VopOnly => "vop_only",
            PolicyKind::Random => "random",
            PolicyKind::Uncertain => "uncertain",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPolicy(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeReason {
    VopPositive,
    RandomDraw,
    UncertaintyBand,
    Never,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolicyDecision {
    pub probe: bool,
    pub reason: ProbeReason,
}

impl PolicyDecision {
    fn new(probe: bool, reason: ProbeReason) -> Self {
        PolicyDecision {
            probe,
            reason: if probe { reason } else { ProbeReason::Never },
        }
    }
}

/// Probes with probability `p_probe`, ignoring `x`. One draw per call.
pub fn random_policy<R: Rng + ?Sized>(p_probe: f64, rng: &mut R, _x: &Vector) -> Result<PolicyDecision> {
    if !(0.0..=1.0).contains(&p_probe) {
        return Err(Error::InvalidConfig(format!(
            "probe probability must lie in [0, 1], got {p_probe}"
        )));
    }
    let draw: f64 = rng.random();
    Ok(PolicyDecision::new(draw < p_probe, ProbeReason::RandomDraw))
}

/// Probes iff `0.3 <= p(+1 | x) <= 0.7`.
pub fn uncertainty_policy(post: &Posterior, x: &Vector) -> Result<PolicyDecision> {
    let p = post.predictive_prob(x)?;
    Ok(uncertainty_decision(p))
}

pub fn uncertainty_decision(p: f64) -> PolicyDecision {
    let (lo, hi) = UNCERTAINTY_BAND;
    PolicyDecision::new(lo <= p && p <= hi, ProbeReason::UncertaintyBand)
}

/// Probes iff VOP > 0. The caller must skip the cache and recall cycles.
pub fn vop_only_policy(state: &LearnerState, x: &Vector, config: &EngineConfig) -> Result<PolicyDecision> {
    let vop = compute_vop(state, x, config)?;
    Ok(vop_decision(vop))
}

pub fn vop_decision(vop: f64) -> PolicyDecision {
    PolicyDecision::new(vop > 0.0, ProbeReason::VopPositive)
}
