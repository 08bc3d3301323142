//! Misclassification risk on the context buffer and probe pricing.

use crate::{Error, Label, Posterior, Result, Vector};

/// Off-diagonal entries of the 2×2 risk matrix; the diagonal is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskMatrix {
    /// Cost of classifying a true +1 as -1.
    pub r12: f64,
    /// Cost of classifying a true -1 as +1.
    pub r21: f64,
}

impl RiskMatrix {
    pub fn new(r12: f64, r21: f64) -> Result<Self> {
        let risk = RiskMatrix { r12, r21 };
        risk.validate()?;
        Ok(risk)
    }

    pub fn symmetric(cost: f64) -> Result<Self> {
        RiskMatrix::new(cost, cost)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r12 >= 0.0 && self.r21 >= 0.0) || !self.r12.is_finite() || !self.r21.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "risk entries must be finite and nonnegative, got r12 = {}, r21 = {}",
                self.r12, self.r21
            )));
        }
        Ok(())
    }

    /// Realized cost of predicting `predicted` when the truth is `truth`.
    pub fn cost(&self, truth: Label, predicted: Label) -> f64 {
        match (truth, predicted) {
            (Label::Positive, Label::Negative) => self.r12,
            (Label::Negative, Label::Positive) => self.r21,
            _ => 0.0,
        }
    }
}

/// Label-dependent price of asking for a label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeCosts {
    pub cost_pos: f64,
    pub cost_neg: f64,
}

impl ProbeCosts {
    pub fn new(cost_pos: f64, cost_neg: f64) -> Result<Self> {
        let costs = ProbeCosts { cost_pos, cost_neg };
        costs.validate()?;
        Ok(costs)
    }

    pub fn flat(cost: f64) -> Result<Self> {
        ProbeCosts::new(cost, cost)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cost_pos >= 0.0 && self.cost_neg >= 0.0) || !self.cost_pos.is_finite() || !self.cost_neg.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "probe costs must be finite and nonnegative, got {} / {}",
                self.cost_pos, self.cost_neg
            )));
        }
        Ok(())
    }

    /// Price actually paid once the label is revealed.
    pub fn actual(&self, label: Label) -> f64 {
        match label {
            Label::Positive => self.cost_pos,
            Label::Negative => self.cost_neg,
        }
    }
}

/// Probe cost averaged over the model's belief `p_pos = p(+1 | x)`.
pub fn expected_probe_cost(p_pos: f64, costs: &ProbeCosts) -> f64 {
    costs.cost_pos * p_pos + costs.cost_neg * (1.0 - p_pos)
}

/// Risk `J` of the Bayes-point classifier on `buffer`.
///
/// Each point is charged `r12 · p` when classified -1 and `r21 · (1 - p)`
/// when classified +1, where `p` is the predictive probability of +1 under
/// the same posterior that makes the classification.
pub fn buffer_risk<'a, I>(post: &Posterior, buffer: I, risk: &RiskMatrix) -> Result<f64>
where
    I: IntoIterator<Item = &'a Vector>,
{
    let mut total = 0.0;
    for x in buffer {
        total += point_risk(post.classify(x)?, post.predictive_prob(x)?, risk);
    }
    Ok(total)
}

/// Expected cost of one decision: `r12 · p` for a -1 call, `r21 · (1 - p)` for +1.
pub fn point_risk(predicted: Label, p_pos: f64, risk: &RiskMatrix) -> f64 {
    match predicted {
        Label::Negative => risk.r12 * p_pos,
        Label::Positive => risk.r21 * (1.0 - p_pos),
    }
}
