//! Decision-theoretic active learning over non-stationary streams.
//!
//! A Bayesian linear probit classifier, trained with expectation propagation
//! and updated incrementally with assumed density filtering, drives three
//! value-of-information decisions for each arriving point:
//!
//! * **probe** the point for its label when the expected reduction in risk on
//!   the recent context outweighs the labeling cost ([`engine::compute_vop`]),
//! * **forget** active labeled points whose removal lowers that risk, moving
//!   them to a cache ([`engine::compute_vof`]),
//! * **recall** cached points whose reintroduction lowers it again
//!   ([`engine::compute_vor`]).
//!
//! [`harness`] runs whole streams under a prequential protocol and compares the
//! engine against the baseline probing [`policy`] rules. See the crate's
//! `examples/` directory for one runnable program per capability.

pub mod engine;
pub mod error;
pub mod gaussian;
pub mod harness;
pub mod policy;
pub mod posterior;
pub mod risk;
pub mod stream;

pub use engine::{EngineConfig, LabelOracle, LearnerState, StepDecisions};
pub use error::{Error, Result};
pub use harness::{ExperimentConfig, Horizon, RunSummary, StepRecord};
pub use policy::PolicyKind;
pub use posterior::{fit_ep, EpFit, EpOptions, LabeledPoint, Posterior, SiteParams};
pub use risk::{ProbeCosts, RiskMatrix};
pub use stream::{ClusterStreamConfig, StreamPoint};

/// Feature vectors. Callers append the bias coordinate before the learner sees them.
pub type Vector = nalgebra::DVector<f64>;
pub type Matrix = nalgebra::DMatrix<f64>;

/// Identifier of a labeled point; the engine uses the arrival index.
pub type PointId = u64;

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    /// `+1.0` or `-1.0`.
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn from_sign(value: f64) -> Label {
        if value >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::Positive => "+1",
            Label::Negative => "-1",
        })
    }
}

impl std::str::FromStr for Label {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+1" | "1" => Ok(Label::Positive),
            "-1" => Ok(Label::Negative),
            _ => Err(()),
        }
    }
}
